#include "respcluster/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "respcluster/error.hpp"

namespace respcluster {

namespace {

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double squared_distance(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

Matrix seed_plus_plus(const Matrix& points, int k, std::mt19937_64& rng)
{
    const std::size_t n = points.rows();
    std::vector<std::size_t> chosen;
    std::vector<bool> taken(n, false);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());

    auto take = [&](std::size_t p) {
        chosen.push_back(p);
        taken[p] = true;
        for (std::size_t i = 0; i < n; ++i)
            d2[i] = std::min(d2[i], squared_distance(points.row(i), points.row(p)));
    };

    take(std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n))));
    while (chosen.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!taken[i])
                total += d2[i];
        const double target = uniform01(rng) * total;
        std::size_t pick = n;
        if (total > 0.0) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (taken[i] || d2[i] <= 0.0)
                    continue;
                acc += d2[i];
                pick = i;
                if (acc > target)
                    break;
            }
        } else {
            for (std::size_t i = 0; i < n && pick == n; ++i)
                if (!taken[i])
                    pick = i;
        }
        take(pick);
    }

    Matrix centroids(k, points.cols());
    for (int c = 0; c < k; ++c) {
        auto src = points.row(chosen[c]);
        std::copy(src.begin(), src.end(), centroids.row(c).begin());
    }
    return centroids;
}

struct LloydRun {
    std::vector<int> labels;
    Matrix centroids;
    double mse = 0.0;
    int iterations = 0;
};

// Unit-sphere centroid of each cluster; a cluster whose mean vanishes keeps
// its previous centroid.
void update_centroids(const Matrix& points, const std::vector<int>& labels, Matrix& centroids)
{
    const std::size_t k = centroids.rows();
    Matrix sums(k, points.cols());
    for (std::size_t i = 0; i < points.rows(); ++i) {
        auto dst = sums.row(labels[i]);
        auto src = points.row(i);
        for (std::size_t j = 0; j < src.size(); ++j)
            dst[j] += src[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
        auto row = sums.row(c);
        if (normalize(row) > 0.0)
            std::copy(row.begin(), row.end(), centroids.row(c).begin());
    }
}

LloydRun lloyd(const Matrix& points, Matrix centroids, const KMeansParams& params, int restart,
               const KMeansObserver& observer)
{
    const std::size_t n = points.rows();
    const std::size_t k = centroids.rows();
    std::vector<int> labels(n, -1);
    std::vector<int> previous;
    std::vector<double> dist(n, 0.0);
    double last_objective = std::numeric_limits<double>::infinity();

    int iter = 0;
    while (iter < params.max_iter) {
        ++iter;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = squared_distance(points.row(i), centroids.row(0));
            for (std::size_t c = 1; c < k; ++c) {
                const double d = squared_distance(points.row(i), centroids.row(c));
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(c);
                }
            }
            labels[i] = best;
            dist[i] = best_d;
        }

        // An empty cluster takes over the point farthest from its centroid,
        // drawn from clusters that keep at least one member.
        std::vector<std::size_t> counts(k, 0);
        for (int l : labels)
            ++counts[l];
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0)
                continue;
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i)
                if (counts[labels[i]] >= 2 && (far == n || dist[i] > dist[far]))
                    far = i;
            --counts[labels[far]];
            labels[far] = static_cast<int>(c);
            ++counts[c];
            dist[far] = 0.0;
            auto src = points.row(far);
            std::copy(src.begin(), src.end(), centroids.row(c).begin());
        }

        double objective = 0.0;
        for (double d : dist)
            objective += d;
        objective /= static_cast<double>(n);
        if (observer)
            observer(restart, iter, objective);

        const bool stable = labels == previous;
        const bool flat = last_objective - objective < params.tol;
        previous = labels;
        last_objective = objective;
        update_centroids(points, labels, centroids);
        if (stable || flat)
            break;
    }

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        total += squared_distance(points.row(i), centroids.row(labels[i]));
    return {std::move(labels), std::move(centroids), total / static_cast<double>(n), iter};
}

std::vector<std::size_t> non_empty_indices(const DocumentVectors& vectors)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < vectors.size(); ++i)
        if (!vectors.is_empty(i))
            out.push_back(i);
    return out;
}

// Labels for `subset` of all documents; remaining documents become singletons.
Clustering with_singletons(const std::vector<std::string>& ids, const std::vector<std::size_t>& subset,
                           const std::vector<int>& subset_labels)
{
    int next = 0;
    for (int l : subset_labels)
        next = std::max(next, l + 1);
    std::vector<int> labels(ids.size(), -1);
    for (std::size_t j = 0; j < subset.size(); ++j)
        labels[subset[j]] = subset_labels[j];
    for (auto& l : labels)
        if (l < 0)
            l = next++;
    return Clustering(ids, labels);
}

void require_square_symmetric(const Matrix& s, const char* what)
{
    if (s.rows() != s.cols())
        throw Error(std::string(what) + ": similarity matrix is not square");
    if (!s.is_symmetric(1e-12))
        throw Error(std::string(what) + ": similarity matrix is not symmetric");
}

} // namespace

Clustering::Clustering(std::vector<std::string> ids, const std::vector<int>& labels, std::string method,
                       std::string variant)
    : ids_(std::move(ids)), method_(std::move(method)), variant_(std::move(variant))
{
    if (labels.size() != ids_.size())
        throw Error("clustering: ids and labels differ in length");
    std::unordered_set<std::string> seen;
    for (const auto& id : ids_)
        if (!seen.insert(id).second)
            throw Error("clustering: duplicate document id: " + id);

    std::unordered_map<int, int> relabel;
    assignment_.reserve(labels.size());
    for (int l : labels) {
        auto [it, inserted] = relabel.emplace(l, static_cast<int>(relabel.size()));
        assignment_.push_back(it->second);
    }
    num_clusters_ = static_cast<int>(relabel.size());
}

std::vector<std::size_t> Clustering::cluster_sizes() const
{
    std::vector<std::size_t> sizes(num_clusters_, 0);
    for (int c : assignment_)
        ++sizes[c];
    return sizes;
}

std::vector<std::vector<std::size_t>> Clustering::members() const
{
    std::vector<std::vector<std::size_t>> out(num_clusters_);
    for (std::size_t i = 0; i < assignment_.size(); ++i)
        out[assignment_[i]].push_back(i);
    return out;
}

void Clustering::set_provenance(std::string method, std::string variant)
{
    method_ = std::move(method);
    variant_ = std::move(variant);
}

KMeansResult kmeans_points(const Matrix& points, const KMeansParams& params, const KMeansObserver& observer)
{
    const std::size_t n = points.rows();
    if (params.k < 2)
        throw Error("k-means: k must be at least 2");
    if (static_cast<std::size_t>(params.k) > n)
        throw Error("k-means: k = " + std::to_string(params.k) + " exceeds the " + std::to_string(n) +
                    " non-empty documents");
    if (params.n_restarts < 1 || params.max_iter < 1)
        throw Error("k-means: restarts and max_iter must be positive");

    std::mt19937_64 rng(params.seed);
    KMeansResult best;
    bool have = false;
    for (int r = 0; r < params.n_restarts; ++r) {
        auto run = lloyd(points, seed_plus_plus(points, params.k, rng), params, r, observer);
        if (!have || run.mse < best.mse) {
            best.labels = std::move(run.labels);
            best.centroids = std::move(run.centroids);
            best.mse = run.mse;
            best.restart = r;
            best.iterations = run.iterations;
            have = true;
        }
    }
    return best;
}

Clustering kmeans(const DocumentVectors& vectors, const KMeansParams& params, const KMeansObserver& observer)
{
    const auto keep = non_empty_indices(vectors);
    if (static_cast<std::size_t>(params.k) > keep.size())
        throw Error("k-means: k = " + std::to_string(params.k) + " exceeds the " + std::to_string(keep.size()) +
                    " non-empty documents");
    const Matrix points = vectors.non_empty().dense();
    auto result = kmeans_points(points, params, observer);
    return with_singletons(vectors.ids, keep, result.labels);
}

double mse(const DocumentVectors& vectors, const Clustering& clustering)
{
    if (vectors.size() != clustering.size())
        throw Error("mse: clustering and vectors cover different documents");
    std::unordered_map<std::string, std::size_t> row;
    for (std::size_t i = 0; i < vectors.size(); ++i)
        row.emplace(vectors.ids[i], i);

    const Matrix dense = vectors.dense();
    const std::size_t dim = dense.cols();
    const int m = clustering.num_clusters();
    std::vector<std::size_t> rows(clustering.size());
    Matrix centroids(m, dim);
    for (std::size_t i = 0; i < clustering.size(); ++i) {
        auto it = row.find(clustering.ids()[i]);
        if (it == row.end())
            throw Error("mse: document " + clustering.ids()[i] + " has no vector");
        rows[i] = it->second;
        auto dst = centroids.row(clustering.cluster_of(i));
        auto src = dense.row(it->second);
        for (std::size_t j = 0; j < dim; ++j)
            dst[j] += src[j];
    }
    for (int c = 0; c < m; ++c)
        normalize(centroids.row(c));

    double total = 0.0;
    for (std::size_t i = 0; i < clustering.size(); ++i)
        total += squared_distance(dense.row(rows[i]), centroids.row(clustering.cluster_of(i)));
    return clustering.size() == 0 ? 0.0 : total / static_cast<double>(clustering.size());
}

int elbow_from_curve(const std::map<int, double>& mse_by_k)
{
    if (mse_by_k.size() < 3)
        throw Error("elbow: need at least three k values");
    int expect = mse_by_k.begin()->first;
    for (const auto& [k, v] : mse_by_k)
        if (k != expect++)
            throw Error("elbow: k values must be consecutive");

    int best_k = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (auto it = std::next(mse_by_k.begin()); std::next(it) != mse_by_k.end(); ++it) {
        const double second = std::prev(it)->second - 2.0 * it->second + std::next(it)->second;
        if (second > best) {
            best = second;
            best_k = it->first;
        }
    }
    return best_k;
}

namespace {

void check_elbow_range(int k_min, int k_max, std::size_t n)
{
    if (k_min < 2)
        throw Error("elbow: k_min must be at least 2");
    if (k_max < k_min + 2)
        throw Error("elbow: range [" + std::to_string(k_min) + ", " + std::to_string(k_max) +
                    "] has no interior point");
    if (static_cast<std::size_t>(k_max) + 1 > n)
        throw Error("elbow: k_max = " + std::to_string(k_max) + " must be below the " + std::to_string(n) +
                    " clusterable documents");
}

} // namespace

ElbowResult elbow_select_k(const DocumentVectors& vectors, int k_min, int k_max, const KMeansParams& params)
{
    const auto keep = non_empty_indices(vectors);
    check_elbow_range(k_min, k_max, keep.size());
    const Matrix points = vectors.non_empty().dense();
    ElbowResult out;
    for (int k = k_min; k <= k_max; ++k) {
        KMeansParams p = params;
        p.k = k;
        out.curve[k] = kmeans_points(points, p).mse;
    }
    out.k = elbow_from_curve(out.curve);
    return out;
}

double median_off_diagonal(const Matrix& s)
{
    const std::size_t n = s.rows();
    if (n < 2)
        throw Error("median: need at least two points");
    std::vector<double> v;
    v.reserve(n * (n - 1));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j)
                v.push_back(s(i, j));
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

APResult affinity_propagation_raw(const Matrix& input, const APParams& params)
{
    require_square_symmetric(input, "affinity propagation");
    const std::size_t n = input.rows();
    if (n < 2)
        throw Error("affinity propagation: need at least two points");
    if (!(params.damping >= 0.5 && params.damping < 1.0))
        throw Error("affinity propagation: damping must be in [0.5, 1)");
    if (params.max_iter < 1 || params.convergence_iter < 1)
        throw Error("affinity propagation: iteration limits must be positive");

    APResult out;
    out.preference = params.preference.value_or(median_off_diagonal(input));

    // Ties between candidate exemplars never resolve under symmetric message
    // passing, so lower indices get a vanishing bonus (lowest index wins).
    double scale = std::abs(out.preference);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            scale = std::max(scale, std::abs(input(i, j)));
    const double bias = 1e-10 * std::max(scale, 1.0);

    Matrix s = input;
    for (std::size_t i = 0; i < n; ++i)
        s(i, i) = out.preference;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            s(i, k) += bias * static_cast<double>(n - k) / static_cast<double>(n);

    const double lambda = params.damping;
    Matrix r(n, n), a(n, n);
    std::vector<std::size_t> exemplars, previous;
    int stable = 0;

    int it = 0;
    while (it < params.max_iter) {
        ++it;
        for (std::size_t i = 0; i < n; ++i) {
            double first = -std::numeric_limits<double>::infinity();
            double second = first;
            std::size_t arg = 0;
            for (std::size_t k = 0; k < n; ++k) {
                const double v = a(i, k) + s(i, k);
                if (v > first) {
                    second = first;
                    first = v;
                    arg = k;
                } else if (v > second) {
                    second = v;
                }
            }
            for (std::size_t k = 0; k < n; ++k) {
                const double fresh = s(i, k) - (k == arg ? second : first);
                r(i, k) = lambda * r(i, k) + (1.0 - lambda) * fresh;
            }
        }

        for (std::size_t k = 0; k < n; ++k) {
            double positive = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (i != k)
                    positive += std::max(0.0, r(i, k));
            for (std::size_t i = 0; i < n; ++i) {
                double fresh;
                if (i == k)
                    fresh = positive;
                else
                    fresh = std::min(0.0, r(k, k) + positive - std::max(0.0, r(i, k)));
                a(i, k) = lambda * a(i, k) + (1.0 - lambda) * fresh;
            }
        }

        exemplars.clear();
        for (std::size_t k = 0; k < n; ++k)
            if (r(k, k) + a(k, k) > 0.0)
                exemplars.push_back(k);

        if (!exemplars.empty() && exemplars == previous)
            ++stable;
        else
            stable = 0;
        previous = exemplars;
        if (stable + 1 >= params.convergence_iter) {
            out.converged = true;
            break;
        }
    }
    out.iterations = it;

    if (exemplars.empty())
        throw ConvergenceError("affinity propagation did not converge to any exemplar");

    // Refinement: within each cluster move the exemplar to the member with the
    // largest summed similarity, then reassign. Net similarity never decreases.
    auto assign = [&](const std::vector<std::size_t>& ex) {
        std::vector<int> labels(n, -1);
        for (auto e : ex)
            labels[e] = static_cast<int>(e);
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] >= 0)
                continue;
            std::size_t best = ex.front();
            for (auto e : ex)
                if (input(i, e) > input(i, best))
                    best = e;
            labels[i] = static_cast<int>(best);
        }
        return labels;
    };
    std::vector<int> labels = assign(exemplars);
    for (std::size_t round = 0; round < n; ++round) {
        std::vector<std::size_t> next;
        for (auto e : exemplars) {
            std::size_t best = e;
            double best_gain = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j) {
                if (labels[j] != static_cast<int>(e))
                    continue;
                double gain = out.preference;
                for (std::size_t i = 0; i < n; ++i)
                    if (i != j && labels[i] == static_cast<int>(e))
                        gain += input(i, j);
                if (gain > best_gain) {
                    best_gain = gain;
                    best = j;
                }
            }
            next.push_back(best);
        }
        std::sort(next.begin(), next.end());
        if (next == exemplars)
            break;
        exemplars = std::move(next);
        labels = assign(exemplars);
    }

    out.exemplars = exemplars;
    out.labels = std::move(labels);
    return out;
}

Clustering affinity_propagation(const Matrix& s, const std::vector<std::string>& ids, const APParams& params)
{
    if (ids.size() != s.rows())
        throw Error("affinity propagation: id count does not match matrix size");
    return Clustering(ids, affinity_propagation_raw(s, params).labels);
}

Clustering affinity_propagation(const DocumentVectors& vectors, const APParams& params)
{
    const auto keep = non_empty_indices(vectors);
    const auto ne = vectors.non_empty();
    auto result = affinity_propagation_raw(similarity_matrix(ne), params);
    return with_singletons(vectors.ids, keep, result.labels);
}

Matrix normalized_laplacian(const Matrix& affinity)
{
    const std::size_t n = affinity.rows();
    std::vector<double> inv_sqrt(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            d += affinity(i, j);
        inv_sqrt[i] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
    }
    Matrix l = Matrix::identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            l(i, j) -= inv_sqrt[i] * affinity(i, j) * inv_sqrt[j];
    // Exact symmetry for the eigensolver.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            l(j, i) = l(i, j);
    return l;
}

Clustering spectral(const Matrix& s, const std::vector<std::string>& ids, const SpectralParams& params)
{
    require_square_symmetric(s, "spectral");
    const std::size_t n = s.rows();
    if (ids.size() != n)
        throw Error("spectral: id count does not match matrix size");
    if (params.k < 2)
        throw Error("spectral: k must be at least 2");

    std::vector<std::size_t> connected;
    for (std::size_t i = 0; i < n; ++i) {
        double degree = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (s(i, j) < 0.0)
                throw Error("spectral: similarities must be non-negative");
            if (i != j)
                degree += s(i, j);
        }
        if (degree > 0.0)
            connected.push_back(i);
    }
    if (static_cast<std::size_t>(params.k) > connected.size())
        throw Error("spectral: k = " + std::to_string(params.k) + " exceeds the " +
                    std::to_string(connected.size()) + " non-isolated documents");

    const std::size_t m = connected.size();
    Matrix affinity(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (i != j)
                affinity(i, j) = s(connected[i], connected[j]);

    const auto eig = symmetric_eigen(normalized_laplacian(affinity));
    Matrix embedding(m, params.k);
    for (std::size_t i = 0; i < m; ++i) {
        for (int c = 0; c < params.k; ++c)
            embedding(i, c) = eig.vectors(i, c);
        normalize(embedding.row(i));
    }

    KMeansParams kp;
    kp.k = params.k;
    kp.seed = params.seed;
    kp.n_restarts = params.n_restarts;
    auto result = kmeans_points(embedding, kp);
    return with_singletons(ids, connected, result.labels);
}

Clustering spectral(const DocumentVectors& vectors, const SpectralParams& params)
{
    return spectral(similarity_matrix(vectors), vectors.ids, params);
}

ElbowResult spectral_elbow_select_k(const DocumentVectors& vectors, int k_min, int k_max, const SpectralParams& params)
{
    const Matrix s = similarity_matrix(vectors);
    std::size_t connected = 0;
    for (std::size_t i = 0; i < s.rows(); ++i) {
        double degree = 0.0;
        for (std::size_t j = 0; j < s.cols(); ++j)
            if (i != j)
                degree += s(i, j);
        if (degree > 0.0)
            ++connected;
    }
    check_elbow_range(k_min, k_max, connected);

    ElbowResult out;
    for (int k = k_min; k <= k_max; ++k) {
        SpectralParams p = params;
        p.k = k;
        out.curve[k] = mse(vectors, spectral(s, vectors.ids, p));
    }
    out.k = elbow_from_curve(out.curve);
    return out;
}

Clustering append_singletons(const Clustering& base, const std::vector<std::string>& extra)
{
    std::vector<std::string> ids = base.ids();
    std::vector<int> labels = base.assignment();
    int next = base.num_clusters();
    for (const auto& id : extra) {
        ids.push_back(id);
        labels.push_back(next++);
    }
    return Clustering(std::move(ids), labels, base.method(), base.variant());
}

} // namespace respcluster
