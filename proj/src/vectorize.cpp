#include "respcluster/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "respcluster/error.hpp"

namespace respcluster {

std::optional<std::size_t> Vocabulary::index_of(const std::string& term) const
{
    auto it = std::lower_bound(terms.begin(), terms.end(), term);
    if (it == terms.end() || *it != term)
        return std::nullopt;
    return static_cast<std::size_t>(it - terms.begin());
}

double Vocabulary::idf(std::size_t term) const
{
    return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(df[term]))) + 1.0;
}

DocumentVectors DocumentVectors::non_empty() const
{
    DocumentVectors out;
    out.vocab = vocab;
    for (std::size_t i = 0; i < size(); ++i) {
        if (is_empty(i))
            continue;
        out.ids.push_back(ids[i]);
        out.vectors.push_back(vectors[i]);
    }
    return out;
}

Matrix DocumentVectors::dense() const
{
    Matrix m(size(), vocab.terms.size());
    for (std::size_t i = 0; i < size(); ++i)
        for (const auto& e : vectors[i])
            m(i, e.term) = e.weight;
    return m;
}

Vocabulary build_vocabulary(const std::vector<TokenizedDocument>& docs, const VocabularyOptions& opts)
{
    if (opts.min_df < 1)
        throw Error("min_df must be at least 1");
    if (!(opts.max_df_fraction > 0.0 && opts.max_df_fraction <= 1.0))
        throw Error("max_df fraction must be in (0, 1]");
    if (std::all_of(docs.begin(), docs.end(), [](const auto& d) { return d.empty(); }))
        throw Error("cannot build a vocabulary: all documents are empty");

    std::map<std::string, std::size_t, std::less<>> df;
    for (const auto& d : docs) {
        std::vector<std::string> uniq = d.tokens;
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (auto& t : uniq)
            ++df[t];
    }

    const double max_df = opts.max_df_fraction * static_cast<double>(docs.size());
    Vocabulary v;
    v.n_docs = docs.size();
    for (auto& [term, count] : df) {
        if (count < opts.min_df)
            continue;
        if (opts.max_df_fraction < 1.0 && static_cast<double>(count) > max_df)
            continue;
        v.terms.push_back(term);
        v.df.push_back(count);
    }
    return v;
}

DocumentVectors tfidf_vectors(const std::vector<TokenizedDocument>& docs, const Vocabulary& vocab)
{
    DocumentVectors out;
    out.vocab = vocab;
    out.ids.reserve(docs.size());
    out.vectors.reserve(docs.size());
    for (const auto& d : docs) {
        std::map<std::uint32_t, double> counts;
        for (const auto& t : d.tokens)
            if (auto idx = vocab.index_of(t))
                counts[static_cast<std::uint32_t>(*idx)] += 1.0;

        SparseVector vec;
        vec.reserve(counts.size());
        double sq = 0.0;
        for (const auto& [term, tf] : counts) {
            const double w = tf * vocab.idf(term);
            vec.push_back({term, w});
            sq += w * w;
        }
        const double norm = std::sqrt(sq);
        for (auto& e : vec)
            e.weight /= norm;

        if (vec.empty())
            out.empty_docs.push_back(d.id);
        out.ids.push_back(d.id);
        out.vectors.push_back(std::move(vec));
    }
    return out;
}

double cosine_similarity(const SparseVector& u, const SparseVector& v)
{
    double uv = 0.0, uu = 0.0, vv = 0.0;
    for (const auto& e : u)
        uu += e.weight * e.weight;
    for (const auto& e : v)
        vv += e.weight * e.weight;
    if (uu == 0.0 || vv == 0.0)
        return 0.0;
    auto a = u.begin();
    auto b = v.begin();
    while (a != u.end() && b != v.end()) {
        if (a->term < b->term) {
            ++a;
        } else if (b->term < a->term) {
            ++b;
        } else {
            uv += a->weight * b->weight;
            ++a;
            ++b;
        }
    }
    return std::clamp(uv / (std::sqrt(uu) * std::sqrt(vv)), 0.0, 1.0);
}

Matrix similarity_matrix(const DocumentVectors& vectors)
{
    const std::size_t n = vectors.size();
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        s(i, i) = vectors.is_empty(i) ? 0.0 : 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double c = cosine_similarity(vectors.vectors[i], vectors.vectors[j]);
            s(i, j) = c;
            s(j, i) = c;
        }
    }
    return s;
}

std::string vectors_to_json(const DocumentVectors& vectors, const Matrix* similarity)
{
    nlohmann::ordered_json j;
    j["terms"] = vectors.vocab.terms;
    auto& vecs = j["vectors"] = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        auto& obj = vecs[vectors.ids[i]] = nlohmann::ordered_json::object();
        for (const auto& e : vectors.vectors[i])
            obj[vectors.vocab.terms[e.term]] = e.weight;
    }
    if (similarity) {
        auto& rows = j["similarity"] = nlohmann::ordered_json::array();
        for (std::size_t r = 0; r < similarity->rows(); ++r) {
            auto row = similarity->row(r);
            rows.push_back(std::vector<double>(row.begin(), row.end()));
        }
    }
    return j.dump();
}

} // namespace respcluster
