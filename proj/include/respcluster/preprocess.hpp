#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace respcluster {

class Corpus;

enum class Variant { raw, filtered, stemmed };

std::string to_string(Variant v);
Variant parse_variant(std::string_view name);

using Stoplist = std::set<std::string, std::less<>>;

struct VariantConfig {
    Variant variant = Variant::raw;
    Stoplist stoplist;
    std::string stemmer = "en-suffix";
    std::size_t min_token_length = 1;
};

struct TokenizedDocument {
    std::string id;
    std::vector<std::string> tokens;

    bool empty() const { return tokens.empty(); }
};

// Lowercases and splits on non-alphanumeric code points. Apostrophes between
// two word characters are dropped and the pieces joined.
std::vector<std::string> tokenize(std::string_view text);

std::vector<std::string> filter_stopwords(const std::vector<std::string>& tokens, const Stoplist& stoplist);
std::vector<std::string> stem(const std::vector<std::string>& tokens, const std::string& stemmer_id);

std::vector<TokenizedDocument> preprocess_corpus(const Corpus& corpus, const VariantConfig& config);

// Built-in English function-word list.
const Stoplist& default_stoplist();
// One word per line; '#' lines and blank lines ignored; words are lowercased.
Stoplist read_stoplist(std::istream& in);
Stoplist load_stoplist(const std::filesystem::path& path);

} // namespace respcluster
