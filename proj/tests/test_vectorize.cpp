#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "respcluster/error.hpp"
#include "respcluster/vectorize.hpp"
#include "support/oracles.hpp"

using namespace respcluster;
using Tokens = std::vector<std::string>;

namespace {

std::vector<TokenizedDocument> docs_of(const std::vector<Tokens>& toks)
{
    std::vector<TokenizedDocument> out;
    for (std::size_t i = 0; i < toks.size(); ++i)
        out.push_back({"d" + std::to_string(i + 1), toks[i]});
    return out;
}

double weight_of(const DocumentVectors& v, std::size_t doc, const std::string& term)
{
    const auto idx = v.vocab.index_of(term);
    if (!idx)
        return 0.0;
    for (const auto& e : v.vectors[doc])
        if (e.term == *idx)
            return e.weight;
    return 0.0;
}

std::vector<Tokens> random_docs(std::mt19937_64& rng, int n, int vocab)
{
    std::vector<Tokens> out;
    for (int i = 0; i < n; ++i) {
        Tokens t;
        const int len = static_cast<int>(rng() % 6);
        for (int j = 0; j < len; ++j)
            t.push_back("w" + std::to_string(rng() % vocab));
        out.push_back(t);
    }
    return out;
}

const std::vector<Tokens> kThree{{"scripting", "hard"}, {"scripting", "fun"}, {"essay", "hard", "hard"}};

} // namespace

TEST_CASE("build_vocabulary")
{
    auto v = build_vocabulary(docs_of({{"a", "b"}, {"a", "c"}}));
    CHECK(v.terms == Tokens{"a", "b", "c"});
    CHECK(v.df[0] == 2);
    CHECK(build_vocabulary(docs_of({{"a", "b"}, {"a", "c"}}), {2}).terms == Tokens{"a"});
    v = build_vocabulary(docs_of({{"x", "x", "x"}}));
    CHECK(v.terms == Tokens{"x"});
    CHECK(v.df[0] == 1);
    CHECK_THROWS_AS(build_vocabulary(docs_of({{}, {}})), Error);
    CHECK_THROWS_AS(build_vocabulary(docs_of({{"a"}}), {0}), Error);

    VocabularyOptions capped;
    capped.max_df_fraction = 0.5;
    CHECK(build_vocabulary(docs_of({{"a", "b"}, {"a", "c"}}), capped).terms == Tokens{"b", "c"});
}

TEST_CASE("tfidf weights match the brute-force oracle")
{
    const auto docs = docs_of(kThree);
    const auto v = tfidf_vectors(docs, build_vocabulary(docs));
    const auto expected = oracle::tfidf(kThree);

    CHECK(v.vocab.idf(*v.vocab.index_of("scripting")) == doctest::Approx(std::log(4.0 / 3.0) + 1.0));
    CHECK(v.vocab.idf(*v.vocab.index_of("fun")) == doctest::Approx(std::log(2.0) + 1.0));
    for (std::size_t d = 0; d < kThree.size(); ++d)
        for (const auto& [term, w] : expected[d])
            CHECK(weight_of(v, d, term) == doctest::Approx(w).epsilon(1e-12));

    // Frozen from the oracle.
    CHECK(weight_of(v, 0, "scripting") == doctest::Approx(0.7071).epsilon(1e-4));
    CHECK(weight_of(v, 0, "hard") == doctest::Approx(0.7071).epsilon(1e-4));
    CHECK(weight_of(v, 2, "hard") == doctest::Approx(0.8356).epsilon(1e-4));
    CHECK(weight_of(v, 2, "essay") == doctest::Approx(0.5493).epsilon(1e-4));
}

TEST_CASE("out-of-vocabulary documents are empty")
{
    const auto docs = docs_of({{"a", "a"}, {"b"}, {"zzz"}});
    const auto vocab = build_vocabulary(docs, {2});
    CHECK(vocab.terms.empty());
    const auto v = tfidf_vectors(docs, build_vocabulary(docs_of({{"a"}, {"b"}})));
    CHECK(v.empty_docs == Tokens{"d3"});
    CHECK(v.is_empty(2));
    CHECK(v.non_empty().size() == 2);
}

TEST_CASE("cosine similarity")
{
    const auto docs = docs_of(kThree);
    const auto v = tfidf_vectors(docs, build_vocabulary(docs));
    CHECK(cosine_similarity(v.vectors[0], v.vectors[0]) == doctest::Approx(1.0));
    CHECK(cosine_similarity(v.vectors[1], v.vectors[2]) == 0.0);
    CHECK(cosine_similarity(v.vectors[0], SparseVector{}) == 0.0);
    const auto expected = oracle::tfidf(kThree);
    CHECK(cosine_similarity(v.vectors[0], v.vectors[2]) ==
          doctest::Approx(oracle::map_cosine(expected[0], expected[2])).epsilon(1e-12));
    CHECK(cosine_similarity(v.vectors[0], v.vectors[2]) == doctest::Approx(0.5909).epsilon(1e-4));
}

TEST_CASE("similarity matrix")
{
    auto docs = docs_of({{"a", "b"}, {"a", "b"}});
    auto s = similarity_matrix(tfidf_vectors(docs, build_vocabulary(docs)));
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(s(i, j) == doctest::Approx(1.0));

    docs = docs_of({{"a"}, {"b"}});
    s = similarity_matrix(tfidf_vectors(docs, build_vocabulary(docs)));
    CHECK(s(0, 1) == 0.0);
    CHECK(s(0, 0) == 1.0);

    docs = docs_of(kThree);
    s = similarity_matrix(tfidf_vectors(docs, build_vocabulary(docs)));
    CHECK(s(0, 2) == doctest::Approx(0.5909).epsilon(1e-4));
    const auto ref = oracle::tfidf(kThree);
    CHECK(s(0, 1) == doctest::Approx(oracle::map_cosine(ref[0], ref[1])).epsilon(1e-12));
    // d2 is (scripting 0.6053, fun 0.7960), so the shared term gives 0.7071 * 0.6053.
    CHECK(s(0, 1) == doctest::Approx(0.4280).epsilon(1e-4));

    docs = docs_of({{"a"}, {"q"}});
    const auto v = tfidf_vectors(docs, build_vocabulary(docs_of({{"a"}})));
    s = similarity_matrix(v);
    CHECK(s(1, 1) == 0.0);
}

TEST_CASE("vector invariants on random corpora")
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        auto toks = random_docs(rng, 2 + static_cast<int>(rng() % 12), 8);
        toks[0].push_back("w0");
        const auto docs = docs_of(toks);
        const auto v = tfidf_vectors(docs, build_vocabulary(docs));
        const auto s = similarity_matrix(v);
        const Matrix dense = v.dense();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v.is_empty(i))
                CHECK(norm2(dense.row(i)) == doctest::Approx(1.0).epsilon(1e-9));
            for (const auto& e : v.vectors[i])
                CHECK(e.weight >= 0.0);
            for (std::size_t j = 0; j < v.size(); ++j) {
                CHECK(s(i, j) == s(j, i));
                CHECK(s(i, j) >= 0.0);
                CHECK(s(i, j) <= 1.0);
                if (!v.is_empty(i) && !v.is_empty(j)) {
                    double d2 = 0.0;
                    for (std::size_t t = 0; t < dense.cols(); ++t)
                        d2 += (dense(i, t) - dense(j, t)) * (dense(i, t) - dense(j, t));
                    CHECK(d2 == doctest::Approx(2.0 * (1.0 - s(i, j))).epsilon(1e-9));
                }
            }
        }
    }
}

TEST_CASE("adding a document never lowers df and idf falls with df")
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        auto toks = random_docs(rng, 3 + static_cast<int>(rng() % 6), 6);
        toks[0].push_back("w1");
        const auto before = build_vocabulary(docs_of(toks));
        toks.push_back(random_docs(rng, 1, 6)[0]);
        const auto after = build_vocabulary(docs_of(toks));
        for (std::size_t t = 0; t < before.terms.size(); ++t) {
            const auto idx = after.index_of(before.terms[t]);
            REQUIRE(idx.has_value());
            CHECK(after.df[*idx] >= before.df[t]);
        }
        for (std::size_t a = 0; a < after.terms.size(); ++a)
            for (std::size_t b = 0; b < after.terms.size(); ++b)
                if (after.df[a] <= after.df[b])
                    CHECK(after.idf(a) >= after.idf(b));
    }
}

TEST_CASE("json export")
{
    const auto docs = docs_of(kThree);
    const auto v = tfidf_vectors(docs, build_vocabulary(docs));
    const auto s = similarity_matrix(v);
    const auto j = nlohmann::json::parse(vectors_to_json(v, &s));
    CHECK(j["terms"].size() == 4);
    CHECK(j["vectors"]["d3"]["hard"].get<double>() == doctest::Approx(0.8356).epsilon(1e-4));
    CHECK(j["similarity"][0][2].get<double>() == doctest::Approx(0.5909).epsilon(1e-4));
    CHECK_FALSE(nlohmann::json::parse(vectors_to_json(v)).contains("similarity"));
}
