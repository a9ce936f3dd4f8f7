#include "respcluster/pipeline.hpp"

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "respcluster/clustering_io.hpp"
#include "respcluster/corpus.hpp"
#include "respcluster/error.hpp"
#include "respcluster/evaluate.hpp"
#include "respcluster/topics.hpp"
#include "respcluster/vectorize.hpp"

namespace respcluster {

namespace {

using nlohmann::ordered_json;

struct Inputs {
    Corpus corpus;
    std::optional<Classification> labels;
    Stoplist stoplist;
};

Inputs load_inputs(const RunConfig& cfg, bool need_labels)
{
    Inputs in;
    in.corpus = load_corpus(cfg.corpus, cfg.allow_empty);
    if (in.corpus.empty())
        throw Error("corpus is empty: " + cfg.corpus.string());
    if (cfg.labels)
        in.labels = load_labels(*cfg.labels, in.corpus);
    else if (need_labels)
        throw Error("labels are required (--labels)");
    in.stoplist = cfg.stoplist ? load_stoplist(*cfg.stoplist) : default_stoplist();
    return in;
}

VariantConfig variant_config(Variant v, const Inputs& in, const RunConfig& cfg)
{
    VariantConfig vc;
    vc.variant = v;
    vc.stoplist = in.stoplist;
    vc.stemmer = cfg.stemmer;
    return vc;
}

DocumentVectors vectors_for(Variant v, const Inputs& in, const RunConfig& cfg)
{
    const auto docs = preprocess_corpus(in.corpus, variant_config(v, in, cfg));
    return tfidf_vectors(docs, build_vocabulary(docs));
}

std::size_t count_non_empty(const DocumentVectors& vectors)
{
    std::size_t n = 0;
    for (std::size_t i = 0; i < vectors.size(); ++i)
        if (!vectors.is_empty(i))
            ++n;
    return n;
}

ordered_json header_json(const RunConfig& cfg)
{
    ordered_json h;
    h["tool"] = "respcluster";
    h["version"] = kVersion;
    h["config_hash"] = config_hash(cfg);
    h["seed"] = cfg.seed;
    return h;
}

std::string header_comment(const RunConfig& cfg)
{
    return std::string("respcluster ") + kVersion + " config_hash=" + config_hash(cfg) +
           " seed=" + std::to_string(cfg.seed);
}

struct MethodRun {
    Clustering clustering;
    ordered_json params;
};

MethodRun run_method_detailed(const DocumentVectors& vectors, Method method, const RunConfig& cfg)
{
    MethodRun out;
    switch (method) {
    case Method::kmeans: {
        KMeansParams p;
        p.seed = cfg.seed;
        if (cfg.k) {
            p.k = *cfg.k;
            out.params["k_mode"] = "fixed";
        } else {
            const int k_max = std::min<int>(cfg.k_max, static_cast<int>(count_non_empty(vectors)) - 1);
            auto elbow = elbow_select_k(vectors, cfg.k_min, k_max, p);
            p.k = elbow.k;
            out.params["k_mode"] = "elbow";
            ordered_json curve = ordered_json::object();
            for (const auto& [k, v] : elbow.curve)
                curve[std::to_string(k)] = v;
            out.params["mse_curve"] = curve;
        }
        out.params["k"] = p.k;
        out.params["n_restarts"] = p.n_restarts;
        out.params["max_iter"] = p.max_iter;
        out.clustering = kmeans(vectors, p);
        break;
    }
    case Method::ap: {
        APParams p;
        p.damping = cfg.damping;
        p.preference = cfg.preference;
        out.clustering = affinity_propagation(vectors, p);
        out.params["damping"] = p.damping;
        out.params["preference"] = cfg.preference ? ordered_json(*cfg.preference) : ordered_json("median");
        out.params["max_iter"] = p.max_iter;
        out.params["convergence_iter"] = p.convergence_iter;
        break;
    }
    case Method::spectral: {
        SpectralParams p;
        p.seed = cfg.seed;
        if (cfg.k) {
            p.k = *cfg.k;
            out.params["k_mode"] = "fixed";
        } else {
            const int k_max = std::min<int>(cfg.k_max, static_cast<int>(count_non_empty(vectors)) - 1);
            auto elbow = spectral_elbow_select_k(vectors, cfg.k_min, k_max, p);
            p.k = elbow.k;
            out.params["k_mode"] = "elbow";
            ordered_json curve = ordered_json::object();
            for (const auto& [k, v] : elbow.curve)
                curve[std::to_string(k)] = v;
            out.params["mse_curve"] = curve;
        }
        out.params["k"] = p.k;
        out.clustering = spectral(vectors, p);
        break;
    }
    }
    return out;
}

std::string fmt(double v, const char* pattern = "%.2f")
{
    char buf[32];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string cell_name(Method m, Variant v)
{
    return to_string(m) + "_" + to_string(v);
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn)
{
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++)
                fn(i);
        });
}

} // namespace

std::string to_string(Method m)
{
    switch (m) {
    case Method::kmeans:
        return "kmeans";
    case Method::ap:
        return "ap";
    case Method::spectral:
        return "spectral";
    }
    return "unknown";
}

Method parse_method(std::string_view name)
{
    if (name == "kmeans")
        return Method::kmeans;
    if (name == "ap")
        return Method::ap;
    if (name == "spectral")
        return Method::spectral;
    throw Error("unknown method: " + std::string(name));
}

std::string config_fingerprint(const RunConfig& cfg)
{
    ordered_json j;
    j["corpus"] = cfg.corpus.string();
    j["labels"] = cfg.labels ? ordered_json(cfg.labels->string()) : ordered_json(nullptr);
    j["stoplist"] = cfg.stoplist ? ordered_json(cfg.stoplist->string()) : ordered_json("default");
    j["stemmer"] = cfg.stemmer;
    auto& vs = j["variants"] = ordered_json::array();
    for (auto v : cfg.variants)
        vs.push_back(to_string(v));
    auto& ms = j["methods"] = ordered_json::array();
    for (auto m : cfg.methods)
        ms.push_back(to_string(m));
    j["k"] = cfg.k ? ordered_json(*cfg.k) : ordered_json("auto");
    j["k_min"] = cfg.k_min;
    j["k_max"] = cfg.k_max;
    j["seed"] = cfg.seed;
    j["min_cluster_size"] = cfg.min_cluster_size;
    j["damping"] = cfg.damping;
    j["preference"] = cfg.preference ? ordered_json(*cfg.preference) : ordered_json("median");
    j["allow_empty"] = cfg.allow_empty;
    return j.dump();
}

std::string config_hash(const RunConfig& cfg)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : config_fingerprint(cfg)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

Clustering run_method(const DocumentVectors& vectors, Method method, const RunConfig& cfg)
{
    return run_method_detailed(vectors, method, cfg).clustering;
}

int cmd_stats(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    try {
        const auto in = load_inputs(cfg, false);
        const auto raw = corpus_stats(in.corpus, in.labels ? &*in.labels : nullptr,
                                      variant_config(Variant::raw, in, cfg));
        const auto processed = corpus_stats(in.corpus, nullptr, variant_config(Variant::stemmed, in, cfg));

        out << "# " << header_comment(cfg) << '\n';
        out << "n_A\tmu_A\tn_W\tmu_S\tn_SW";
        if (in.labels)
            out << "\tK\tn_ol\tn_mc";
        out << '\n';
        out << raw.n_answers << '\t' << fmt(raw.mean_tokens) << '\t' << raw.vocab_size << '\t'
            << fmt(processed.mean_tokens) << '\t' << processed.vocab_size;
        if (in.labels)
            out << '\t' << *raw.n_proper_classes << '\t' << *raw.n_outliers << '\t' << *raw.n_multiclass;
        out << '\n';
        return 0;
    } catch (const Error& e) {
        err << "stats: " << e.what() << '\n';
        return 2;
    }
}

int cmd_cluster(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    if (cfg.methods.size() != 1 || cfg.variants.size() != 1) {
        err << "cluster: exactly one --method and one --variant are required\n";
        return 2;
    }
    try {
        const auto in = load_inputs(cfg, false);
        const auto vectors = vectors_for(cfg.variants.front(), in, cfg);
        auto run = run_method_detailed(vectors, cfg.methods.front(), cfg);
        run.clustering.set_provenance(to_string(cfg.methods.front()), to_string(cfg.variants.front()));
        auto header = header_json(cfg);
        header["params"] = run.params;
        const auto text = clustering_to_jsonl(run.clustering, nlohmann::json::parse(header.dump()));
        if (cfg.out.empty() || cfg.out == "-")
            out << text;
        else
            write_file_atomic(cfg.out, text);
        return 0;
    } catch (const Error& e) {
        err << "cluster: " << e.what() << '\n';
        return 2;
    }
}

int cmd_evaluate(const RunConfig& cfg, const std::vector<std::filesystem::path>& clusterings, std::ostream& out,
                 std::ostream& err)
{
    try {
        if (clusterings.empty())
            throw Error("no clustering files given (--clustering)");
        const auto in = load_inputs(cfg, true);
        std::vector<Clustering> loaded;
        const auto ids = in.corpus.ids();
        const std::set<std::string> corpus_ids(ids.begin(), ids.end());
        for (const auto& p : clusterings) {
            auto file = load_clustering(p);
            if (std::set<std::string>(file.clustering.ids().begin(), file.clustering.ids().end()) != corpus_ids)
                throw Error("clustering " + p.string() + " does not cover the corpus documents");
            loaded.push_back(std::move(file.clustering));
        }
        const auto report = evaluate_grid(loaded, *in.labels);
        const auto tsv = report_to_tsv(report, cfg.emphasize_best, header_comment(cfg));
        if (cfg.out.empty() || cfg.out == "-") {
            out << tsv;
        } else {
            write_file_atomic(cfg.out / "evaluation.tsv", tsv);
            write_file_atomic(cfg.out / "evaluation.json", report_to_json(report, header_json(cfg).dump()));
        }
        return 0;
    } catch (const Error& e) {
        err << "evaluate: " << e.what() << '\n';
        return 2;
    }
}

int cmd_topics(const RunConfig& cfg, const std::filesystem::path& clustering, std::ostream& out, std::ostream& err)
{
    try {
        const auto in = load_inputs(cfg, false);
        const auto file = load_clustering(clustering);
        const auto raw = vectors_for(Variant::raw, in, cfg);
        const auto reps =
            representatives(file.clustering, raw, cfg.min_cluster_size, in.labels ? &*in.labels : nullptr);
        const auto tsv = topics_to_tsv(reps, in.corpus, header_comment(cfg));
        if (cfg.out.empty() || cfg.out == "-")
            out << tsv;
        else
            write_file_atomic(cfg.out, tsv);
        return 0;
    } catch (const Error& e) {
        err << "topics: " << e.what() << '\n';
        return 2;
    }
}

int cmd_grid(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    std::mutex log_mutex;
    auto log = [&](const std::string& line) {
        std::lock_guard lock(log_mutex);
        err << line << '\n';
    };

    Inputs in;
    std::vector<DocumentVectors> variant_vectors;
    DocumentVectors raw;
    try {
        if (cfg.methods.empty() || cfg.variants.empty())
            throw Error("at least one method and one variant are required");
        in = load_inputs(cfg, cfg.evaluate);
        for (auto v : cfg.variants)
            variant_vectors.push_back(vectors_for(v, in, cfg));
        raw = vectors_for(Variant::raw, in, cfg);
    } catch (const Error& e) {
        err << "grid: input: " << e.what() << '\n';
        return 2;
    }

    struct Cell {
        Method method;
        std::size_t variant;
        std::optional<Clustering> clustering;
        ordered_json params;
        std::vector<ClusterRepresentative> reps;
        std::string failure;
        bool fatal = false;
    };
    std::vector<Cell> cells;
    for (auto m : cfg.methods)
        for (std::size_t v = 0; v < cfg.variants.size(); ++v)
            cells.push_back({m, v, std::nullopt, {}, {}, {}, false});

    parallel_for(cells.size(), cfg.jobs, [&](std::size_t i) {
        auto& cell = cells[i];
        const auto name = cell_name(cell.method, cfg.variants[cell.variant]);
        std::string stage = "cluster";
        try {
            auto run = run_method_detailed(variant_vectors[cell.variant], cell.method, cfg);
            run.clustering.set_provenance(to_string(cell.method), to_string(cfg.variants[cell.variant]));
            stage = "topics";
            cell.reps = representatives(run.clustering, raw, cfg.min_cluster_size, in.labels ? &*in.labels : nullptr);
            cell.params = std::move(run.params);
            cell.clustering = std::move(run.clustering);
            log("grid: " + name + ": M=" + std::to_string(cell.clustering->num_clusters()));
        } catch (const ConvergenceError& e) {
            cell.failure = e.what();
            log("grid: " + name + ": " + stage + ": " + e.what());
        } catch (const Error& e) {
            cell.failure = stage + ": " + e.what();
            cell.fatal = true;
            log("grid: " + name + ": " + stage + ": " + e.what());
        }
    });

    for (const auto& cell : cells)
        if (cell.fatal) {
            err << "grid: aborted: " << cell_name(cell.method, cfg.variants[cell.variant]) << ": " << cell.failure
                << '\n';
            return 2;
        }

    try {
        const auto header = header_json(cfg);
        const auto comment = header_comment(cfg);
        std::vector<Clustering> done;
        for (const auto& cell : cells) {
            if (!cell.clustering)
                continue;
            const auto name = cell_name(cell.method, cfg.variants[cell.variant]);
            auto h = header;
            h["params"] = cell.params;
            write_file_atomic(cfg.out / "clusterings" / (name + ".jsonl"),
                              clustering_to_jsonl(*cell.clustering, nlohmann::json::parse(h.dump())));
            write_file_atomic(cfg.out / "topics" / (name + ".tsv"), topics_to_tsv(cell.reps, in.corpus, comment));
            done.push_back(*cell.clustering);
        }
        if (in.labels && !done.empty()) {
            const auto report = evaluate_grid(done, *in.labels);
            write_file_atomic(cfg.out / "evaluation.tsv", report_to_tsv(report, cfg.emphasize_best, comment));
            write_file_atomic(cfg.out / "evaluation.json", report_to_json(report, header.dump()));
        }
        out << "grid: " << done.size() << " of " << cells.size() << " clusterings written to " << cfg.out.string()
            << '\n';
        return done.size() == cells.size() ? 0 : 1;
    } catch (const Error& e) {
        err << "grid: output: " << e.what() << '\n';
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "grid: output: " << e.what() << '\n';
        return 2;
    }
}

namespace {

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Cluster short free-form answers and evaluate against human classifications", "respcluster"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string corpus, labels, stoplist, k = "auto", method, variant, methods, variants, outpath, grid_out;
    std::optional<std::uint64_t> seed;
    std::optional<double> preference;
    std::vector<std::string> clustering_files;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--corpus", corpus, "Corpus JSONL ({\"id\",\"text\"} per line)")->required();
        sub->add_option("--labels", labels, "Label JSONL ({\"id\",\"classes\":[...]} per line)");
        sub->add_option("--stoplist", stoplist, "Stop word file (one per line, # comments)");
        sub->add_option("--stemmer", cfg.stemmer, "Stemmer id")->capture_default_str();
        sub->add_flag("--allow-empty", cfg.allow_empty, "Accept documents with empty text");
        sub->add_option("--seed", seed, "RNG seed (falls back to RESPCLUSTER_SEED, then 0)");
    };
    auto clustering_opts = [&](CLI::App* sub) {
        sub->add_option("--k", k, "Cluster count for kmeans/spectral, or \"auto\" for the elbow rule")
            ->capture_default_str();
        sub->add_option("--k-min", cfg.k_min, "Smallest k tried by the elbow rule")->capture_default_str();
        sub->add_option("--k-max", cfg.k_max, "Largest k tried by the elbow rule")->capture_default_str();
        sub->add_option("--damping", cfg.damping, "Affinity propagation damping")->capture_default_str();
        sub->add_option("--preference", preference, "Affinity propagation preference (default: median similarity)");
    };

    auto* stats = app.add_subcommand("stats", "Corpus statistics (n_A, mu_A, n_W, mu_S, n_SW, K, n_ol, n_mc)");
    common(stats);

    auto* cluster = app.add_subcommand("cluster", "Cluster one variant with one method");
    common(cluster);
    clustering_opts(cluster);
    cluster->add_option("--method", method, "kmeans | ap | spectral")->required();
    cluster->add_option("--variant", variant, "raw | filtered | stemmed")->default_val("filtered");
    cluster->add_option("--out", outpath, "Output JSONL file (default: stdout)");

    auto* evaluate = app.add_subcommand("evaluate", "Score clustering files against labels");
    common(evaluate);
    evaluate->add_option("--clustering", clustering_files, "Clustering JSONL file(s)")->required();
    evaluate->add_option("--out", outpath, "Output directory (default: TSV on stdout)");
    evaluate->add_flag("--emphasize-best", cfg.emphasize_best, "Mark per-column best values with *");

    auto* topics = app.add_subcommand("topics", "HITS representatives of main clusters");
    common(topics);
    topics->add_option("--clustering", clustering_files, "Clustering JSONL file")->required()->expected(1);
    topics->add_option("--min-cluster-size", cfg.min_cluster_size, "Smallest main cluster")->capture_default_str();
    topics->add_option("--out", outpath, "Output TSV file (default: stdout)");

    auto* grid = app.add_subcommand("grid", "Run every method x variant, evaluate, extract topics");
    common(grid);
    clustering_opts(grid);
    grid->add_option("--methods,--method", methods, "Comma-separated methods")->default_val("kmeans,ap,spectral");
    grid->add_option("--variants,--variant", variants, "Comma-separated variants")->default_val("filtered,stemmed");
    grid->add_option("--min-cluster-size", cfg.min_cluster_size, "Smallest main cluster")->capture_default_str();
    grid->add_option("--out", grid_out, "Output directory")->default_val("out");
    grid->add_option("--jobs", cfg.jobs, "Concurrent grid cells")->capture_default_str();
    grid->add_flag("--evaluate", cfg.evaluate, "Require labels and write the evaluation report");
    grid->add_flag("--emphasize-best", cfg.emphasize_best, "Mark per-column best values with *");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return 2;
    }

    try {
        cfg.corpus = corpus;
        if (!labels.empty())
            cfg.labels = labels;
        if (!stoplist.empty())
            cfg.stoplist = stoplist;
        cfg.preference = preference;
        if (seed) {
            cfg.seed = *seed;
        } else if (const char* env = std::getenv("RESPCLUSTER_SEED"); env && *env) {
            char* end = nullptr;
            cfg.seed = std::strtoull(env, &end, 10);
            if (*end != '\0')
                throw Error("RESPCLUSTER_SEED is not an unsigned integer: " + std::string(env));
        }
        if (k != "auto") {
            std::size_t used = 0;
            int value = 0;
            try {
                value = std::stoi(k, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != k.size())
                throw Error("--k must be an integer or \"auto\"");
            cfg.k = value;
        }
        if (cfg.jobs < 1)
            throw Error("--jobs must be at least 1");
        if (*cluster) {
            cfg.methods = {parse_method(method)};
            cfg.variants = {parse_variant(variant)};
        }
        if (*grid) {
            cfg.methods.clear();
            cfg.variants.clear();
            for (const auto& m : split_list(methods))
                cfg.methods.push_back(parse_method(m));
            for (const auto& v : split_list(variants))
                cfg.variants.push_back(parse_variant(v));
        }
        cfg.out = *grid ? grid_out : outpath;
        if (cfg.k && *cfg.k < 2)
            throw Error("--k must be at least 2");
    } catch (const Error& e) {
        err << e.what() << '\n';
        return 2;
    }

    if (*stats)
        return cmd_stats(cfg, out, err);
    if (*cluster)
        return cmd_cluster(cfg, out, err);
    if (*evaluate)
        return cmd_evaluate(cfg, {clustering_files.begin(), clustering_files.end()}, out, err);
    if (*topics)
        return cmd_topics(cfg, clustering_files.front(), out, err);
    return cmd_grid(cfg, out, err);
}

} // namespace respcluster
