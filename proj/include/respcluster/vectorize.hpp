#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "respcluster/linalg.hpp"
#include "respcluster/preprocess.hpp"

namespace respcluster {

struct Vocabulary {
    std::vector<std::string> terms;     // sorted
    std::vector<std::size_t> df;        // parallel to terms
    std::size_t n_docs = 0;             // documents df was counted over

    std::optional<std::size_t> index_of(const std::string& term) const;
    double idf(std::size_t term) const;
};

struct SparseEntry {
    std::uint32_t term;
    double weight;
};

// Sorted by term index.
using SparseVector = std::vector<SparseEntry>;

struct DocumentVectors {
    Vocabulary vocab;
    std::vector<std::string> ids;
    std::vector<SparseVector> vectors;
    std::vector<std::string> empty_docs;

    std::size_t size() const { return ids.size(); }
    bool is_empty(std::size_t i) const { return vectors[i].empty(); }
    // Copy holding only documents with a non-zero vector, order preserved.
    DocumentVectors non_empty() const;
    // Rows are documents, columns vocabulary terms.
    Matrix dense() const;
};

struct VocabularyOptions {
    std::size_t min_df = 1;
    // Terms present in more than this fraction of documents are dropped. 1.0 disables.
    double max_df_fraction = 1.0;
};

Vocabulary build_vocabulary(const std::vector<TokenizedDocument>& docs, const VocabularyOptions& opts = {});

// weight = raw count * (ln((1+N)/(1+df)) + 1), then L2-normalized.
DocumentVectors tfidf_vectors(const std::vector<TokenizedDocument>& docs, const Vocabulary& vocab);

double cosine_similarity(const SparseVector& u, const SparseVector& v);

// Symmetric cosine matrix; diagonal 1 for non-empty documents and 0 for empty ones.
Matrix similarity_matrix(const DocumentVectors& vectors);

// {"terms":[...], "vectors":{id:{term:weight}}, "similarity":[[...]]}
std::string vectors_to_json(const DocumentVectors& vectors, const Matrix* similarity = nullptr);

} // namespace respcluster
