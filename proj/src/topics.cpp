#include "respcluster/topics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "respcluster/error.hpp"

namespace respcluster {

namespace {

// Relative slack when comparing authority scores, so rounding noise between
// symmetric documents does not override the lowest-index rule.
constexpr double kTieSlack = 1e-12;

std::string sanitize(std::string s)
{
    for (char& c : s)
        if (c == '\t' || c == '\n' || c == '\r')
            c = ' ';
    return s;
}

} // namespace

std::vector<ClusterMembers> main_clusters(const Clustering& clustering, std::size_t min_size)
{
    if (min_size < 2)
        throw Error("main clusters: min_size must be at least 2");
    std::vector<ClusterMembers> out;
    auto members = clustering.members();
    for (std::size_t c = 0; c < members.size(); ++c)
        if (members[c].size() >= min_size)
            out.push_back({static_cast<int>(c), std::move(members[c])});
    return out;
}

HitsResult hits(const Matrix& a, double tol, int max_iter)
{
    const std::size_t n = a.rows();
    if (a.cols() != n)
        throw Error("hits: matrix is not square");
    bool any = false;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (a(i, j) < 0.0)
                throw Error("hits: matrix has negative entries");
            any = any || a(i, j) > 0.0;
        }
    if (!any)
        throw Error("no connectivity");

    HitsResult r;
    r.hub.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
    r.authority = r.hub;
    std::vector<double> auth(n), hub(n);
    for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations) {
        std::fill(auth.begin(), auth.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                auth[j] += a(i, j) * r.hub[i];
        normalize(auth);
        for (std::size_t i = 0; i < n; ++i)
            hub[i] = dot(a.row(i), auth);
        normalize(hub);

        double da = 0.0, dh = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            da += (auth[i] - r.authority[i]) * (auth[i] - r.authority[i]);
            dh += (hub[i] - r.hub[i]) * (hub[i] - r.hub[i]);
        }
        r.authority = auth;
        r.hub = hub;
        if (std::sqrt(da) < tol && std::sqrt(dh) < tol)
            break;
    }
    r.iterations = std::min(r.iterations, max_iter);
    return r;
}

std::vector<ClusterRepresentative> representatives(const Clustering& clustering, const DocumentVectors& raw_vectors,
                                                   std::size_t min_size, const Classification* labels)
{
    std::unordered_map<std::string, std::size_t> row;
    for (std::size_t i = 0; i < raw_vectors.size(); ++i)
        row.emplace(raw_vectors.ids[i], i);

    std::vector<ClusterRepresentative> out;
    for (const auto& mc : main_clusters(clustering, min_size)) {
        const std::size_t n = mc.members.size();
        std::vector<std::size_t> vec_rows;
        ClusterRepresentative rep;
        rep.cluster_id = mc.cluster_id;
        rep.size = n;
        for (auto m : mc.members) {
            const auto& id = clustering.ids()[m];
            auto it = row.find(id);
            if (it == row.end())
                throw Error("representatives: document " + id + " has no raw vector");
            vec_rows.push_back(it->second);
            rep.member_ids.push_back(id);
        }

        Matrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double c =
                    cosine_similarity(raw_vectors.vectors[vec_rows[i]], raw_vectors.vectors[vec_rows[j]]);
                a(i, j) = c;
                a(j, i) = c;
            }

        std::size_t best = 0;
        try {
            rep.authority_scores = hits(a).authority;
            const double top = *std::max_element(rep.authority_scores.begin(), rep.authority_scores.end());
            while (rep.authority_scores[best] < top * (1.0 - kTieSlack))
                ++best;
        } catch (const Error&) {
            rep.disconnected = true;
            rep.authority_scores.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
        }
        rep.doc_id = rep.member_ids[best];
        rep.authority = rep.authority_scores[best];

        if (labels) {
            std::vector<double> mass(labels->classes().size(), 0.0);
            for (const auto& id : rep.member_ids) {
                auto li = labels->index_of(id);
                if (!li)
                    throw Error("representatives: document " + id + " has no classification");
                for (const auto& cw : labels->memberships(*li))
                    mass[cw.cls] += cw.weight;
            }
            const auto top = std::max_element(mass.begin(), mass.end());
            if (top != mass.end())
                rep.major_class = labels->classes()[static_cast<std::size_t>(top - mass.begin())];
        }
        out.push_back(std::move(rep));
    }
    return out;
}

std::string topics_to_tsv(const std::vector<ClusterRepresentative>& reps, const Corpus& corpus,
                          const std::string& header_comment)
{
    std::ostringstream out;
    if (!header_comment.empty())
        out << "# " << header_comment << '\n';
    out << "cluster_id\tsize\trepresentative_id\trepresentative_text\tmajor_class\tauthority_score\tnote\n";
    for (const auto& r : reps) {
        auto idx = corpus.index_of(r.doc_id);
        const std::string text = idx ? corpus[*idx].text : std::string();
        char score[32];
        std::snprintf(score, sizeof score, "%.6f", r.authority);
        out << r.cluster_id << '\t' << r.size << '\t' << sanitize(r.doc_id) << '\t' << sanitize(text) << '\t'
            << (r.major_class ? sanitize(*r.major_class) : std::string("NA")) << '\t' << score
            << '\t' << (r.disconnected ? "disconnected" : "") << '\n';
    }
    return out.str();
}

} // namespace respcluster
