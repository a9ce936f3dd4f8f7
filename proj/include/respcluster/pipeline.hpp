#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "respcluster/cluster.hpp"
#include "respcluster/preprocess.hpp"

namespace respcluster {

inline constexpr const char* kVersion = "0.1.0";

enum class Method { kmeans, ap, spectral };

std::string to_string(Method m);
Method parse_method(std::string_view name);

struct RunConfig {
    std::filesystem::path corpus;
    std::optional<std::filesystem::path> labels;
    std::optional<std::filesystem::path> stoplist;
    std::string stemmer = "en-suffix";
    std::vector<Variant> variants{Variant::filtered, Variant::stemmed};
    std::vector<Method> methods{Method::kmeans, Method::ap, Method::spectral};
    std::optional<int> k;  // empty = elbow selection
    int k_min = 2;
    int k_max = 10;
    std::uint64_t seed = 0;
    std::size_t min_cluster_size = 4;
    double damping = 0.5;
    std::optional<double> preference;
    std::filesystem::path out = "out";
    int jobs = 1;
    bool allow_empty = false;
    bool evaluate = false;         // require labels and evaluation output
    bool emphasize_best = false;
};

// Canonical JSON of the settings that influence results, and its FNV-1a hash.
std::string config_fingerprint(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

// Clusters one corpus variant with one method. AP failures throw Error.
Clustering run_method(const DocumentVectors& vectors, Method method, const RunConfig& cfg);

// Entry points; each returns a process exit code (0 ok, 1 partial, 2 invalid input).
int cmd_stats(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_cluster(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_evaluate(const RunConfig& cfg, const std::vector<std::filesystem::path>& clusterings, std::ostream& out,
                 std::ostream& err);
int cmd_topics(const RunConfig& cfg, const std::filesystem::path& clustering, std::ostream& out, std::ostream& err);
int cmd_grid(const RunConfig& cfg, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace respcluster
