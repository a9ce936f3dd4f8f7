#include "respcluster/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "respcluster/error.hpp"

namespace respcluster {

namespace {

// Summed class weights per cluster: table(omega, c) = sum_{d in omega} w(c|d).
Matrix weight_table(const Clustering& clustering, const Classification& labels)
{
    if (clustering.size() != labels.size())
        throw Error("evaluation: clustering has " + std::to_string(clustering.size()) +
                    " documents but the classification has " + std::to_string(labels.size()));
    Matrix table(clustering.num_clusters(), labels.classes().size());
    for (std::size_t i = 0; i < clustering.size(); ++i) {
        auto li = labels.index_of(clustering.ids()[i]);
        if (!li)
            throw Error("evaluation: document " + clustering.ids()[i] + " has no classification");
        for (const auto& cw : labels.memberships(*li))
            table(clustering.cluster_of(i), cw.cls) += cw.weight;
    }
    return table;
}

// Exactly 0 when at most one outcome has mass, so rounding in the summed
// weights cannot make a degenerate distribution look informative.
double entropy(const std::vector<double>& p)
{
    if (std::count_if(p.begin(), p.end(), [](double x) { return x > 0.0; }) < 2)
        return 0.0;
    double h = 0.0;
    for (double x : p)
        if (x > 0.0)
            h -= x * std::log(x);
    return h;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string tsv_field(std::string s)
{
    for (char& c : s)
        if (c == '\t' || c == '\n' || c == '\r')
            c = ' ';
    return s;
}

} // namespace

double purity(const Clustering& clustering, const Classification& labels)
{
    const Matrix table = weight_table(clustering, labels);
    if (clustering.size() == 0)
        throw Error("purity: empty clustering");
    double total = 0.0;
    for (std::size_t w = 0; w < table.rows(); ++w) {
        auto row = table.row(w);
        total += row.empty() ? 0.0 : *std::max_element(row.begin(), row.end());
    }
    return total / static_cast<double>(clustering.size());
}

MutualInformation mutual_information(const Clustering& clustering, const Classification& labels)
{
    MutualInformation out;
    out.joint = weight_table(clustering, labels);
    const double n = static_cast<double>(clustering.size());
    if (clustering.size() == 0)
        throw Error("nmi: empty clustering");

    const std::size_t m = out.joint.rows();
    const std::size_t l = out.joint.cols();
    out.p_cluster.assign(m, 0.0);
    out.p_class.assign(l, 0.0);
    const auto sizes = clustering.cluster_sizes();
    for (std::size_t w = 0; w < m; ++w) {
        out.p_cluster[w] = static_cast<double>(sizes[w]) / n;
        for (std::size_t c = 0; c < l; ++c) {
            out.joint(w, c) /= n;
            out.p_class[c] += out.joint(w, c);
        }
    }

    for (std::size_t w = 0; w < m; ++w)
        for (std::size_t c = 0; c < l; ++c) {
            const double p = out.joint(w, c);
            if (p > 0.0)
                out.mi += p * std::log(p / (out.p_cluster[w] * out.p_class[c]));
        }
    out.h_cluster = entropy(out.p_cluster);
    out.h_class = entropy(out.p_class);

    if (out.h_cluster > 0.0 && out.h_class > 0.0)
        out.nmi = std::clamp(out.mi / std::sqrt(out.h_cluster * out.h_class), 0.0, 1.0);
    return out;
}

double nmi(const Clustering& clustering, const Classification& labels)
{
    return mutual_information(clustering, labels).nmi;
}

Clustering exclude_singletons(const Clustering& clustering)
{
    const auto sizes = clustering.cluster_sizes();
    std::vector<std::string> ids;
    std::vector<int> labels;
    for (std::size_t i = 0; i < clustering.size(); ++i) {
        if (sizes[clustering.cluster_of(i)] < 2)
            continue;
        ids.push_back(clustering.ids()[i]);
        labels.push_back(clustering.cluster_of(i));
    }
    if (ids.empty())
        throw Error("no non-singleton clusters");
    return Clustering(std::move(ids), labels, clustering.method(), clustering.variant());
}

EvaluationReport evaluate_grid(const std::vector<Clustering>& clusterings, const Classification& labels)
{
    if (clusterings.empty())
        throw Error("evaluation: no clusterings given");
    const std::set<std::string> reference(clusterings.front().ids().begin(), clusterings.front().ids().end());
    for (const auto& c : clusterings)
        if (std::set<std::string>(c.ids().begin(), c.ids().end()) != reference)
            throw Error("evaluation: clusterings cover different corpora");

    EvaluationReport report;
    for (const auto& c : clusterings) {
        EvaluationRow row;
        row.method = c.method();
        row.variant = c.variant();
        row.purity = purity(c, labels);
        const auto mi = mutual_information(c, labels);
        row.nmi = mi.nmi;
        row.mi = mi.mi;
        row.h_cluster = mi.h_cluster;
        row.h_class = mi.h_class;
        row.clusters = c.num_clusters();
        for (auto s : c.cluster_sizes())
            if (s == 1)
                ++row.singletons;
        if (row.singletons < static_cast<std::size_t>(row.clusters)) {
            const auto kept = exclude_singletons(c);
            row.purity_excl_singletons = purity(kept, labels.restricted_to(kept.ids()));
        }
        report.rows.push_back(std::move(row));
    }

    double best_p = 0.0, best_n = 0.0;
    for (const auto& r : report.rows) {
        best_p = std::max(best_p, r.purity);
        best_n = std::max(best_n, r.nmi);
    }
    for (auto& r : report.rows) {
        r.best_purity = r.purity >= best_p;
        r.best_nmi = r.nmi >= best_n;
    }
    return report;
}

std::string report_to_tsv(const EvaluationReport& report, bool emphasize_best, const std::string& header_comment)
{
    std::ostringstream out;
    if (!header_comment.empty())
        out << "# " << header_comment << '\n';
    out << "method\tvariant\tpurity\tnmi\tM\tsingletons\tpurity_excl_singletons\tmi_nats\th_cluster_nats\th_class_nats\n";
    for (const auto& r : report.rows) {
        out << tsv_field(r.method) << '\t' << tsv_field(r.variant) << '\t' << fmt(r.purity)
            << (emphasize_best && r.best_purity ? "*" : "") << '\t' << fmt(r.nmi)
            << (emphasize_best && r.best_nmi ? "*" : "") << '\t' << r.clusters << '\t' << r.singletons << '\t'
            << (r.purity_excl_singletons ? fmt(*r.purity_excl_singletons) : "NA") << '\t' << fmt(r.mi) << '\t'
            << fmt(r.h_cluster) << '\t' << fmt(r.h_class) << '\n';
    }
    return out.str();
}

std::string report_to_json(const EvaluationReport& report, const std::string& header_json)
{
    nlohmann::ordered_json j;
    if (!header_json.empty())
        j["header"] = nlohmann::ordered_json::parse(header_json);
    auto& rows = j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        nlohmann::ordered_json o;
        o["method"] = r.method;
        o["variant"] = r.variant;
        o["purity"] = r.purity;
        o["nmi"] = r.nmi;
        o["M"] = r.clusters;
        o["singletons"] = r.singletons;
        o["purity_excl_singletons"] =
            r.purity_excl_singletons ? nlohmann::ordered_json(*r.purity_excl_singletons) : nullptr;
        o["best_purity"] = r.best_purity;
        o["best_nmi"] = r.best_nmi;
        o["diagnostics"] = {{"mi_nats", r.mi}, {"h_cluster_nats", r.h_cluster}, {"h_class_nats", r.h_class}};
        rows.push_back(std::move(o));
    }
    return j.dump(2) + "\n";
}

} // namespace respcluster
