#include "respcluster/preprocess.hpp"

#include <fstream>
#include <istream>

#include "respcluster/corpus.hpp"
#include "respcluster/error.hpp"
#include "respcluster/stemmer.hpp"

namespace respcluster {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one code point starting at text[pos] and advances pos. Invalid
// sequences yield U+FFFD and consume one byte.
char32_t next_code_point(std::string_view text, std::size_t& pos)
{
    const auto b0 = static_cast<unsigned char>(text[pos]);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++pos;
        return kReplacement;
    }
    if (pos + len > text.size()) {
        ++pos;
        return kReplacement;
    }
    for (int i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(text[pos + i]);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return kReplacement;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    pos += len;
    return cp;
}

void append_utf8(std::string& out, char32_t cp)
{
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_apostrophe(char32_t cp)
{
    return cp == U'\'' || cp == 0x2019;
}

// Letters and digits. Outside ASCII this is a block-level approximation:
// punctuation, symbol, private-use and emoji blocks separate words, every
// other assigned block counts as letters.
bool is_word_char(char32_t cp)
{
    if (cp < 0x80)
        return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') || (cp >= U'0' && cp <= U'9');
    if (cp < 0xC0)
        return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
    if (cp == 0xD7 || cp == 0xF7)
        return false;
    if (cp >= 0x2000 && cp <= 0x2BFF)
        return false;
    if (cp >= 0x3000 && cp <= 0x303F)
        return false;
    if (cp >= 0xE000 && cp <= 0xF8FF)
        return false;
    if (cp >= 0xFE00 && cp <= 0xFE4F)
        return false;
    if ((cp >= 0xFF00 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) || (cp >= 0xFF3B && cp <= 0xFF40) ||
        (cp >= 0xFF5B && cp <= 0xFF65))
        return false;
    if (cp == kReplacement || cp >= 0x1F000)
        return false;
    return true;
}

char32_t to_lower(char32_t cp)
{
    if (cp >= U'A' && cp <= U'Z')
        return cp + 0x20;
    if (cp < 0xC0)
        return cp;
    if (cp <= 0xDE && cp != 0xD7)
        return cp + 0x20;
    if ((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177))
        return (cp % 2 == 0) ? cp + 1 : cp;
    if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E))
        return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp == 0x178)
        return 0xFF;
    if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2)
        return cp + 0x20;
    if (cp >= 0x410 && cp <= 0x42F)
        return cp + 0x20;
    if (cp >= 0x400 && cp <= 0x40F)
        return cp + 0x50;
    return cp;
}

std::string strip_apostrophes(std::string_view word)
{
    std::string out;
    std::size_t pos = 0;
    while (pos < word.size()) {
        const char32_t cp = next_code_point(word, pos);
        if (!is_apostrophe(cp))
            append_utf8(out, to_lower(cp));
    }
    return out;
}

std::size_t code_points(std::string_view s)
{
    std::size_t n = 0;
    for (char c : s)
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80)
            ++n;
    return n;
}

} // namespace

std::string to_string(Variant v)
{
    switch (v) {
    case Variant::raw:
        return "raw";
    case Variant::filtered:
        return "filtered";
    case Variant::stemmed:
        return "stemmed";
    }
    return "unknown";
}

Variant parse_variant(std::string_view name)
{
    if (name == "raw")
        return Variant::raw;
    if (name == "filtered")
        return Variant::filtered;
    if (name == "stemmed")
        return Variant::stemmed;
    throw Error("unknown variant: " + std::string(name));
}

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> tokens;
    std::string current;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const char32_t cp = next_code_point(text, pos);
        if (is_word_char(cp)) {
            append_utf8(current, to_lower(cp));
            continue;
        }
        if (is_apostrophe(cp) && !current.empty() && pos < text.size()) {
            std::size_t peek = pos;
            if (is_word_char(next_code_point(text, peek)))
                continue;
        }
        if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty())
        tokens.push_back(std::move(current));
    return tokens;
}

std::vector<std::string> filter_stopwords(const std::vector<std::string>& tokens, const Stoplist& stoplist)
{
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens)
        if (!stoplist.contains(t))
            out.push_back(t);
    return out;
}

std::vector<std::string> stem(const std::vector<std::string>& tokens, const std::string& stemmer_id)
{
    const auto stemmer = make_stemmer(stemmer_id);
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens)
        out.push_back(stemmer->stem(t));
    return out;
}

std::vector<TokenizedDocument> preprocess_corpus(const Corpus& corpus, const VariantConfig& config)
{
    std::unique_ptr<Stemmer> stemmer;
    if (config.variant == Variant::stemmed)
        stemmer = make_stemmer(config.stemmer);

    std::vector<TokenizedDocument> out;
    out.reserve(corpus.size());
    for (const auto& doc : corpus.documents()) {
        TokenizedDocument td{doc.id, {}};
        for (auto& tok : tokenize(doc.text)) {
            if (code_points(tok) < config.min_token_length)
                continue;
            if (config.variant != Variant::raw && config.stoplist.contains(tok))
                continue;
            if (stemmer)
                tok = stemmer->stem(tok);
            td.tokens.push_back(std::move(tok));
        }
        out.push_back(std::move(td));
    }
    return out;
}

const Stoplist& default_stoplist()
{
    // v1
    static const Stoplist list{
        "a",       "about",   "above",  "after",   "again",  "against", "all",    "am",      "an",     "and",
        "any",     "are",     "arent",  "as",      "at",     "be",      "because", "been",   "before", "being",
        "below",   "between", "both",   "but",     "by",     "can",     "cant",   "could",   "did",    "didnt",
        "do",      "does",    "doesnt", "doing",   "dont",   "down",    "during", "each",    "few",    "for",
        "from",    "further", "had",    "has",     "have",   "having",  "he",     "her",     "here",   "hers",
        "herself", "him",     "himself", "his",    "how",    "i",       "if",     "im",      "in",     "into",
        "is",      "isnt",    "it",     "its",     "itself", "ive",     "me",     "more",    "most",   "my",
        "myself",  "no",      "nor",    "not",     "of",     "off",     "on",     "once",    "only",   "or",
        "other",   "our",     "ours",   "ourselves", "out",  "over",    "own",    "same",    "she",    "should",
        "so",      "some",    "such",   "than",    "that",   "the",     "their",  "theirs",  "them",   "themselves",
        "then",    "there",   "these",  "they",    "this",   "those",   "through", "to",     "too",    "under",
        "until",   "up",      "very",   "was",     "wasnt",  "we",      "were",   "what",    "when",   "where",
        "which",   "while",   "who",    "whom",    "why",    "will",    "with",   "would",   "you",    "your",
        "yours",   "yourself", "yourselves",
    };
    return list;
}

Stoplist read_stoplist(std::istream& in)
{
    Stoplist out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
            line.erase(0, 3);
        first = false;
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#')
            continue;
        const auto e = line.find_last_not_of(" \t\r");
        auto word = strip_apostrophes(std::string_view(line).substr(b, e - b + 1));
        if (!word.empty())
            out.insert(std::move(word));
    }
    return out;
}

Stoplist load_stoplist(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open stoplist " + path.string());
    return read_stoplist(in);
}

} // namespace respcluster
