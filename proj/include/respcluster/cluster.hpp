#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "respcluster/linalg.hpp"
#include "respcluster/vectorize.hpp"

namespace respcluster {

// Hard partition of documents. Cluster ids are 0..M-1, none empty.
class Clustering {
public:
    Clustering() = default;
    // Relabels arbitrary integer labels to 0..M-1 by first appearance.
    Clustering(std::vector<std::string> ids, const std::vector<int>& labels,
               std::string method = {}, std::string variant = {});

    const std::vector<std::string>& ids() const { return ids_; }
    const std::vector<int>& assignment() const { return assignment_; }
    int cluster_of(std::size_t i) const { return assignment_[i]; }
    std::size_t size() const { return ids_.size(); }
    int num_clusters() const { return num_clusters_; }
    std::vector<std::size_t> cluster_sizes() const;
    // Dense document indices per cluster, ascending.
    std::vector<std::vector<std::size_t>> members() const;

    const std::string& method() const { return method_; }
    const std::string& variant() const { return variant_; }
    void set_provenance(std::string method, std::string variant);

private:
    std::vector<std::string> ids_;
    std::vector<int> assignment_;
    int num_clusters_ = 0;
    std::string method_;
    std::string variant_;
};

struct KMeansParams {
    int k = 2;
    std::uint64_t seed = 0;
    int n_restarts = 10;
    int max_iter = 100;
    double tol = 1e-9;
};

struct KMeansResult {
    std::vector<int> labels;
    Matrix centroids;
    double mse = 0.0;
    int restart = 0;
    int iterations = 0;
};

// Called with the objective after every assignment step of every restart.
using KMeansObserver = std::function<void(int restart, int iteration, double objective)>;

// Lloyd's algorithm on the rows of `points` with k-means++ seeding, centroids
// kept on the unit sphere. Best restart by (MSE, restart index).
KMeansResult kmeans_points(const Matrix& points, const KMeansParams& params, const KMeansObserver& observer = {});

// Empty documents are excluded and appended afterwards as singleton clusters.
Clustering kmeans(const DocumentVectors& vectors, const KMeansParams& params, const KMeansObserver& observer = {});

// Mean squared Euclidean distance to the renormalized cluster centroid.
double mse(const DocumentVectors& vectors, const Clustering& clustering);

// The k in mse_by_k maximizing the second difference over
// interior k; ties go to the smallest k.
int elbow_from_curve(const std::map<int, double>& mse_by_k);

struct ElbowResult {
    int k = 0;
    std::map<int, double> curve;
};

ElbowResult elbow_select_k(const DocumentVectors& vectors, int k_min, int k_max, const KMeansParams& params);

struct APParams {
    std::optional<double> preference;  // default: median of off-diagonal similarities
    double damping = 0.5;
    int max_iter = 200;
    int convergence_iter = 15;
};

struct APResult {
    std::vector<int> labels;            // exemplar index per point
    std::vector<std::size_t> exemplars; // ascending
    int iterations = 0;
    bool converged = false;
    double preference = 0.0;
};

double median_off_diagonal(const Matrix& s);

APResult affinity_propagation_raw(const Matrix& s, const APParams& params);
Clustering affinity_propagation(const Matrix& s, const std::vector<std::string>& ids, const APParams& params);
// Runs on the similarity of non-empty documents; empty ones become singletons.
Clustering affinity_propagation(const DocumentVectors& vectors, const APParams& params);

// I - D^{-1/2} A D^{-1/2}; rows with zero degree keep a 1 on the diagonal.
Matrix normalized_laplacian(const Matrix& affinity);

struct SpectralParams {
    int k = 2;
    std::uint64_t seed = 0;
    int n_restarts = 10;
};

Clustering spectral(const Matrix& s, const std::vector<std::string>& ids, const SpectralParams& params);
Clustering spectral(const DocumentVectors& vectors, const SpectralParams& params);

// Same second-difference rule, where MSE(k) is measured in tf-idf space on the spectral partition.
ElbowResult spectral_elbow_select_k(const DocumentVectors& vectors, int k_min, int k_max, const SpectralParams& params);

// Appends `extra` ids as singleton clusters after the clusters of `base`.
Clustering append_singletons(const Clustering& base, const std::vector<std::string>& extra);

} // namespace respcluster
