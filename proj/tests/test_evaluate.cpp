#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "respcluster/error.hpp"
#include "respcluster/evaluate.hpp"
#include "support/oracles.hpp"

using namespace respcluster;
using Classes = std::vector<std::vector<std::string>>;

namespace {

std::vector<std::string> ids_for(std::size_t n)
{
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i)
        ids.push_back("d" + std::to_string(i));
    return ids;
}

Classes hard_classes(const std::vector<int>& labels)
{
    Classes out;
    for (int l : labels)
        out.push_back({"c" + std::to_string(l)});
    return out;
}

Classes random_soft(std::size_t n, int n_classes, double multi_rate, std::mt19937_64& rng)
{
    Classes out(n);
    for (auto& cs : out) {
        cs.push_back("c" + std::to_string(rng() % n_classes));
        if (static_cast<double>(rng() >> 11) * 0x1.0p-53 < multi_rate)
            cs.push_back("c" + std::to_string(rng() % n_classes));
    }
    return out;
}

std::vector<int> random_partition(std::size_t n, std::mt19937_64& rng)
{
    const int m = 1 + static_cast<int>(rng() % n);
    std::vector<int> out(n);
    for (auto& l : out)
        l = static_cast<int>(rng() % m);
    return out;
}

} // namespace

TEST_CASE("purity worked examples")
{
    const auto ids = ids_for(3);
    Classification labels(ids, {{"c1"}, {"c1", "c2"}, {"c2"}});
    CHECK(purity(Clustering(ids, {0, 0, 1}), labels) == doctest::Approx(2.5 / 3.0).epsilon(1e-12));

    Classification hard(ids, {{"a"}, {"a"}, {"b"}});
    CHECK(purity(Clustering(ids, {0, 0, 1}), hard) == 1.0);
    CHECK(purity(Clustering(ids, {0, 1, 2}), hard) == 1.0);
}

TEST_CASE("nmi worked examples")
{
    const auto ids = ids_for(4);
    Classification labels(ids, {{"c1"}, {"c1"}, {"c1"}, {"c2"}});
    const auto mi = mutual_information(Clustering(ids, {0, 0, 1, 1}), labels);
    CHECK(mi.mi == doctest::Approx(0.21576).epsilon(1e-4));
    CHECK(mi.h_cluster == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(mi.h_class == doctest::Approx(0.56234).epsilon(1e-4));
    CHECK(mi.nmi == doctest::Approx(0.3456).epsilon(1e-4));
    const auto ref = oracle::hard_nmi({0, 0, 1, 1}, {0, 0, 0, 1});
    CHECK(mi.nmi == doctest::Approx(ref).epsilon(1e-12));

    CHECK(nmi(Clustering(ids, {0, 0, 0, 0}), labels) == 0.0);
    CHECK(nmi(Clustering(ids, {0, 0, 0, 1}), labels) == doctest::Approx(1.0));
}

TEST_CASE("metrics reject mismatched document sets")
{
    const auto ids = ids_for(3);
    Classification labels(ids, {{"a"}, {"a"}, {"b"}});
    CHECK_THROWS_AS(purity(Clustering({"d0", "d1"}, {0, 1}), labels), Error);
    CHECK_THROWS_AS(nmi(Clustering({"d0", "d1", "zz"}, {0, 1, 1}), labels), Error);
}

TEST_CASE("hard-label metrics equal brute-force oracles on every partition pair")
{
    for (int n = 1; n <= 5; ++n) {
        const auto parts = oracle::all_partitions(n);
        const auto ids = ids_for(n);
        for (const auto& cls : parts) {
            Classification labels(ids, hard_classes(cls));
            for (const auto& om : parts) {
                const Clustering c(ids, om);
                CHECK(std::abs(purity(c, labels) - oracle::hard_purity(om, cls)) < 1e-9);
                const double got = nmi(c, labels);
                CHECK(std::abs(got - oracle::hard_nmi(om, cls)) < 1e-9);
                // NMI = 1 exactly when the partitions coincide, given two or more blocks.
                if (*std::max_element(cls.begin(), cls.end()) > 0 && *std::max_element(om.begin(), om.end()) > 0)
                    CHECK((std::abs(got - 1.0) < 1e-9) == (om == cls));
            }
        }
    }
}

TEST_CASE("purity oracle equivalence at N = 8 on sampled partitions")
{
    std::mt19937_64 rng(5);
    const auto ids = ids_for(8);
    for (int trial = 0; trial < 300; ++trial) {
        const auto om = random_partition(8, rng);
        const auto cls = random_partition(8, rng);
        CHECK(std::abs(purity(Clustering(ids, om), Classification(ids, hard_classes(cls))) -
                       oracle::hard_purity(om, cls)) < 1e-9);
    }
}

TEST_CASE("soft metrics equal direct sums")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng() % 20;
        const auto ids = ids_for(n);
        const auto om = random_partition(n, rng);
        const auto cls = random_soft(n, 1 + static_cast<int>(rng() % 5), 0.3, rng);
        const Classification labels(ids, cls);
        // Duplicate labels within a document collapse, so the oracle sees the same sets.
        Classes dedup;
        for (auto cs : cls) {
            std::sort(cs.begin(), cs.end());
            cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
            dedup.push_back(cs);
        }
        const auto ref = oracle::soft_scores(om, dedup);
        const Clustering c(ids, om);
        const auto mi = mutual_information(c, labels);
        CHECK(std::abs(purity(c, labels) - ref.purity) < 1e-9);
        CHECK(std::abs(mi.mi - std::max(ref.mi, 0.0)) < 1e-9);
        CHECK(std::abs(mi.h_cluster - ref.h_omega) < 1e-9);
        CHECK(std::abs(mi.h_class - ref.h_c) < 1e-9);
        CHECK(std::abs(mi.nmi - std::clamp(ref.nmi, 0.0, 1.0)) < 1e-9);
        CHECK(mi.nmi >= 0.0);
        CHECK(mi.nmi <= 1.0);
        double total = 0;
        for (std::size_t r = 0; r < mi.joint.rows(); ++r)
            for (std::size_t col = 0; col < mi.joint.cols(); ++col)
                total += mi.joint(r, col);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("purity is below one whenever an answer has several classes")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng() % 20;
        const auto ids = ids_for(n);
        auto cls = random_soft(n, 2 + static_cast<int>(rng() % 4), 0.2, rng);
        cls[rng() % n] = {"c0", "c1"};
        CHECK(purity(Clustering(ids, random_partition(n, rng)), Classification(ids, cls)) < 1.0);
    }
}

TEST_CASE("metrics are invariant under relabeling")
{
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 15;
        const auto ids = ids_for(n);
        const auto om = random_partition(n, rng);
        const auto cls = random_partition(n, rng);
        std::vector<int> om2 = om;
        for (auto& l : om2)
            l = 100 - 3 * l;
        Classes renamed;
        for (int l : cls)
            renamed.push_back({"z" + std::to_string(7 * l + 1)});
        const Classification a(ids, hard_classes(cls)), b(ids, renamed);
        CHECK(nmi(Clustering(ids, om), a) == doctest::Approx(nmi(Clustering(ids, om2), b)).epsilon(1e-12));
        CHECK(purity(Clustering(ids, om), a) == doctest::Approx(purity(Clustering(ids, om2), b)).epsilon(1e-12));
    }
}

TEST_CASE("merging clusters never increases purity")
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng() % 18;
        const auto ids = ids_for(n);
        const Classification labels(ids, random_soft(n, 3, 0.3, rng));
        const Clustering c(ids, random_partition(n, rng));
        if (c.num_clusters() < 2)
            continue;
        const int a = static_cast<int>(rng() % c.num_clusters());
        const int b = (a + 1 + static_cast<int>(rng() % (c.num_clusters() - 1))) % c.num_clusters();
        std::vector<int> merged = c.assignment();
        for (auto& l : merged)
            if (l == b)
                l = a;
        CHECK(purity(Clustering(ids, merged), labels) <= purity(c, labels) + 1e-12);
    }
}

TEST_CASE("exclude_singletons")
{
    const Clustering c({"a", "b", "c"}, {0, 0, 1}, "ap", "filtered");
    const auto e = exclude_singletons(c);
    CHECK(e.ids() == std::vector<std::string>{"a", "b"});
    CHECK(e.num_clusters() == 1);
    CHECK(e.method() == "ap");
    const Clustering none({"a", "b"}, {0, 0});
    CHECK(exclude_singletons(none).assignment() == none.assignment());
    CHECK_THROWS_WITH_AS(exclude_singletons(Clustering({"a", "b"}, {0, 1})), "no non-singleton clusters", Error);
}

TEST_CASE("evaluate_grid")
{
    const auto ids = ids_for(4);
    const Classification labels(ids, {{"x"}, {"x"}, {"y"}, {"y"}});
    const std::vector<Clustering> cs{Clustering(ids, {0, 0, 1, 1}, "kmeans", "filtered"),
                                     Clustering(ids, {0, 1, 2, 3}, "ap", "filtered"),
                                     Clustering(ids, {0, 0, 0, 0}, "spectral", "stemmed")};
    const auto r = evaluate_grid(cs, labels);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].method == "kmeans");
    CHECK(r.rows[0].purity == 1.0);
    CHECK(r.rows[0].nmi == doctest::Approx(1.0));
    CHECK(r.rows[0].best_purity);
    CHECK(r.rows[0].best_nmi);
    CHECK(r.rows[1].best_purity);
    CHECK_FALSE(r.rows[1].best_nmi);
    CHECK(r.rows[1].singletons == 4);
    CHECK_FALSE(r.rows[1].purity_excl_singletons.has_value());
    CHECK(r.rows[2].clusters == 1);
    CHECK(r.rows[2].purity == 0.5);
    CHECK(r.rows[2].purity_excl_singletons.value() == 0.5);

    CHECK_THROWS_AS(evaluate_grid({}, labels), Error);
    CHECK_THROWS_AS(evaluate_grid({cs[0], Clustering({"d0", "d1", "d2", "q"}, {0, 0, 1, 1})}, labels), Error);

    const auto single = evaluate_grid({cs[0]}, labels);
    CHECK(single.rows.size() == 1);
    CHECK(single.rows[0].best_purity);
}

TEST_CASE("singleton exclusion can lower purity")
{
    // Two mixed clusters plus pure singletons: dropping the singletons lowers purity.
    const auto ids = ids_for(8);
    const Classification labels(ids, {{"a"}, {"b"}, {"a"}, {"b"}, {"c"}, {"d"}, {"e"}, {"f"}});
    const Clustering c(ids, {0, 0, 1, 1, 2, 3, 4, 5});
    const auto row = evaluate_grid({c}, labels).rows[0];
    CHECK(row.purity == doctest::Approx(6.0 / 8.0));
    CHECK(row.purity_excl_singletons.value() == doctest::Approx(0.5));
}

TEST_CASE("report formats")
{
    const auto ids = ids_for(4);
    const Classification labels(ids, {{"x"}, {"x"}, {"y"}, {"y"}});
    const auto r = evaluate_grid({Clustering(ids, {0, 0, 1, 1}, "kmeans", "filtered"),
                                  Clustering(ids, {0, 1, 2, 3}, "ap", "stemmed")},
                                 labels);
    const auto tsv = report_to_tsv(r, true, "hdr");
    CHECK(tsv.rfind("# hdr\nmethod\tvariant\tpurity\tnmi\tM\tsingletons\t", 0) == 0);
    CHECK(tsv.find("kmeans\tfiltered\t1.000000*\t1.000000*\t2\t0\t1.000000") != std::string::npos);
    CHECK(tsv.find("ap\tstemmed\t1.000000*\t") != std::string::npos);
    CHECK(tsv.find("\tNA\t") != std::string::npos);
    CHECK(report_to_tsv(r, false).find('*') == std::string::npos);
    std::size_t lines = 0;
    for (char ch : report_to_tsv(r, false))
        lines += ch == '\n';
    CHECK(lines == 3);

    const auto j = nlohmann::json::parse(report_to_json(r));
    CHECK(j["rows"].size() == 2);
    CHECK(j["rows"][0]["purity"].get<double>() == 1.0);
}
