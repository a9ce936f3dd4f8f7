#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace respcluster {

struct VariantConfig;

struct Document {
    std::string id;
    std::string text;

    bool operator==(const Document&) const = default;
};

// Ordered, immutable collection of answers. Dense indices follow input order.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<Document> docs);

    std::size_t size() const { return docs_.size(); }
    bool empty() const { return docs_.empty(); }
    const std::vector<Document>& documents() const { return docs_; }
    const Document& operator[](std::size_t i) const { return docs_[i]; }

    std::optional<std::size_t> index_of(const std::string& id) const;
    std::vector<std::string> ids() const;

    bool operator==(const Corpus& other) const { return docs_ == other.docs_; }

private:
    std::vector<Document> docs_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct ClassWeight {
    std::size_t cls;
    double weight;
};

// Probabilistic, overlapping human classification. A document in m classes
// has weight 1/m in each of them. Documents with no class get a synthetic
// singleton class "_outlier_<id>".
class Classification {
public:
    Classification() = default;
    // memberships[i] lists class labels of document ids[i]; duplicates within
    // one list are collapsed.
    Classification(std::vector<std::string> ids, const std::vector<std::vector<std::string>>& memberships);

    const std::vector<std::string>& classes() const { return classes_; }
    const std::vector<std::string>& ids() const { return ids_; }
    std::size_t size() const { return ids_.size(); }

    std::optional<std::size_t> index_of(const std::string& id) const;
    // Class memberships of the document at dense index i, with weights.
    const std::vector<ClassWeight>& memberships(std::size_t i) const { return members_[i]; }
    double weight(const std::string& cls, const std::string& id) const;
    std::size_t class_size(std::size_t cls) const;

    // Same weights, restricted to a subset of documents (weights are not renormalized
    // because every document keeps all of its classes).
    Classification restricted_to(const std::vector<std::string>& ids) const;

private:
    std::vector<std::string> ids_;
    std::vector<std::string> classes_;
    std::vector<std::vector<ClassWeight>> members_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct CorpusStats {
    std::size_t n_answers = 0;
    double mean_tokens = 0.0;
    std::size_t vocab_size = 0;
    // Present only when labels were supplied.
    std::optional<std::size_t> n_proper_classes;
    std::optional<std::size_t> n_outliers;
    std::optional<std::size_t> n_multiclass;
};

Corpus read_corpus(std::istream& in, bool allow_empty = false);
Corpus load_corpus(const std::filesystem::path& path, bool allow_empty = false);
void write_corpus(std::ostream& out, const Corpus& corpus);

Classification read_labels(std::istream& in, const Corpus& corpus);
Classification load_labels(const std::filesystem::path& path, const Corpus& corpus);

CorpusStats corpus_stats(const Corpus& corpus, const Classification* labels, const VariantConfig& variant);

} // namespace respcluster
