#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "respcluster/cluster.hpp"

namespace respcluster {

// First line: {"header": {...}} with at least method, variant, M; then one
// {"id": ..., "cluster": ...} object per document in clustering order.
void write_clustering(std::ostream& out, const Clustering& clustering, const nlohmann::json& header);
std::string clustering_to_jsonl(const Clustering& clustering, const nlohmann::json& header);

struct ClusteringFile {
    Clustering clustering;
    nlohmann::json header;
};

ClusteringFile read_clustering(std::istream& in);
ClusteringFile load_clustering(const std::filesystem::path& path);

// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace respcluster
