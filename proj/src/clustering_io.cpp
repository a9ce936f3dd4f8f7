#include "respcluster/clustering_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "respcluster/error.hpp"

namespace respcluster {

using nlohmann::json;

void write_clustering(std::ostream& out, const Clustering& clustering, const json& header)
{
    json h = header.is_object() ? header : json::object();
    h["method"] = clustering.method();
    h["variant"] = clustering.variant();
    h["M"] = clustering.num_clusters();
    out << json{{"header", h}}.dump() << '\n';
    for (std::size_t i = 0; i < clustering.size(); ++i)
        out << json{{"id", clustering.ids()[i]}, {"cluster", clustering.cluster_of(i)}}.dump() << '\n';
}

std::string clustering_to_jsonl(const Clustering& clustering, const json& header)
{
    std::ostringstream out;
    write_clustering(out, clustering, header);
    return out.str();
}

ClusteringFile read_clustering(std::istream& in)
{
    ClusteringFile file;
    std::vector<std::string> ids;
    std::vector<int> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error("clustering line " + std::to_string(lineno) + ": malformed JSON: " + e.what());
        }
        if (file.header.is_null()) {
            if (!obj.contains("header") || !obj["header"].is_object())
                throw Error("clustering line " + std::to_string(lineno) + ": expected a {\"header\": {...}} line first");
            file.header = obj["header"];
            continue;
        }
        if (!obj.contains("id") || !obj["id"].is_string() || !obj.contains("cluster") ||
            !obj["cluster"].is_number_integer())
            throw Error("clustering line " + std::to_string(lineno) + ": expected {\"id\": string, \"cluster\": int}");
        ids.push_back(obj["id"].get<std::string>());
        labels.push_back(obj["cluster"].get<int>());
    }
    if (file.header.is_null())
        throw Error("clustering file has no header line");
    const std::string method = file.header.value("method", "");
    const std::string variant = file.header.value("variant", "");
    file.clustering = Clustering(std::move(ids), labels, method, variant);
    return file;
}

ClusteringFile load_clustering(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open clustering " + path.string());
    return read_clustering(in);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot write " + tmp.string());
        out << content;
        if (!out.flush())
            throw Error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace respcluster
