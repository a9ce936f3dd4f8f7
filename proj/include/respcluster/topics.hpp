#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "respcluster/cluster.hpp"
#include "respcluster/corpus.hpp"
#include "respcluster/linalg.hpp"
#include "respcluster/vectorize.hpp"

namespace respcluster {

struct ClusterMembers {
    int cluster_id = 0;
    std::vector<std::size_t> members;  // dense indices into the clustering
};

std::vector<ClusterMembers> main_clusters(const Clustering& clustering, std::size_t min_size = 4);

struct HitsResult {
    std::vector<double> hub;
    std::vector<double> authority;
    int iterations = 0;
};

// Power iteration a <- norm(A^T h), h <- norm(A a) from uniform vectors.
// Throws Error("no connectivity") if A has no positive entry.
HitsResult hits(const Matrix& a, double tol = 1e-8, int max_iter = 100);

struct ClusterRepresentative {
    int cluster_id = 0;
    std::size_t size = 0;
    std::string doc_id;
    std::vector<std::string> member_ids;
    std::vector<double> authority_scores;  // parallel to member_ids
    double authority = 0.0;
    std::optional<std::string> major_class;
    bool disconnected = false;
};

// HITS over the within-cluster cosine graph of the raw-variant vectors.
std::vector<ClusterRepresentative> representatives(const Clustering& clustering, const DocumentVectors& raw_vectors,
                                                   std::size_t min_size = 4, const Classification* labels = nullptr);

// cluster_id, size, representative_id, representative_text, major_class, authority_score, note
std::string topics_to_tsv(const std::vector<ClusterRepresentative>& reps, const Corpus& corpus,
                          const std::string& header_comment = {});

} // namespace respcluster
