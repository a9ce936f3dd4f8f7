#include <iostream>

#include "respcluster/pipeline.hpp"

int main(int argc, char** argv)
{
    return respcluster::run_cli(argc, argv, std::cout, std::cerr);
}
