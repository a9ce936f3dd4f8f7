#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "respcluster/cluster.hpp"
#include "respcluster/corpus.hpp"
#include "respcluster/linalg.hpp"

namespace respcluster {

// Joint distribution of clusters and (probabilistic) classes, plus the entropies
// derived from it. All logs are natural; values in nats.
struct MutualInformation {
    Matrix joint;                    // M x L, P(omega, c)
    std::vector<double> p_cluster;   // |omega| / N
    std::vector<double> p_class;     // sum_d w(c|d) / N
    double mi = 0.0;
    double h_cluster = 0.0;
    double h_class = 0.0;
    double nmi = 0.0;
};

double purity(const Clustering& clustering, const Classification& labels);
MutualInformation mutual_information(const Clustering& clustering, const Classification& labels);
double nmi(const Clustering& clustering, const Classification& labels);

Clustering exclude_singletons(const Clustering& clustering);

struct EvaluationRow {
    std::string method;
    std::string variant;
    double purity = 0.0;
    double nmi = 0.0;
    int clusters = 0;
    std::size_t singletons = 0;
    std::optional<double> purity_excl_singletons;
    double mi = 0.0;
    double h_cluster = 0.0;
    double h_class = 0.0;
    bool best_purity = false;
    bool best_nmi = false;
};

struct EvaluationReport {
    std::vector<EvaluationRow> rows;
};

EvaluationReport evaluate_grid(const std::vector<Clustering>& clusterings, const Classification& labels);

// Tab-separated, one row per clustering. Best values get a trailing '*' when emphasize_best.
std::string report_to_tsv(const EvaluationReport& report, bool emphasize_best, const std::string& header_comment = {});
std::string report_to_json(const EvaluationReport& report, const std::string& header_json = {});

} // namespace respcluster
