#include "respcluster/stemmer.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <span>
#include <utility>

#include "respcluster/error.hpp"

namespace respcluster {

namespace {

// Working buffer for one word. `stem_end` marks the end of the stem left
// after removing a candidate suffix.
class PorterWord {
public:
    explicit PorterWord(std::string w) : w_(std::move(w)) {}

    std::string take() { return std::move(w_); }

    bool ends_with(std::string_view s) const
    {
        return w_.size() >= s.size() && std::string_view(w_).substr(w_.size() - s.size()) == s;
    }

    // Measure of w_[0, len): number of VC sequences.
    int measure(std::size_t len) const
    {
        int m = 0;
        std::size_t i = 0;
        while (i < len && consonant(i))
            ++i;
        while (i < len) {
            while (i < len && !consonant(i))
                ++i;
            if (i >= len)
                break;
            while (i < len && consonant(i))
                ++i;
            ++m;
        }
        return m;
    }

    bool has_vowel(std::size_t len) const
    {
        for (std::size_t i = 0; i < len; ++i)
            if (!consonant(i))
                return true;
        return false;
    }

    bool double_consonant(std::size_t len) const
    {
        return len >= 2 && w_[len - 1] == w_[len - 2] && consonant(len - 1);
    }

    // *o: stem ends consonant-vowel-consonant, the last not w, x or y.
    bool cvc(std::size_t len) const
    {
        if (len < 3 || !consonant(len - 1) || consonant(len - 2) || !consonant(len - 3))
            return false;
        const char c = w_[len - 1];
        return c != 'w' && c != 'x' && c != 'y';
    }

    std::size_t size() const { return w_.size(); }
    char back() const { return w_.back(); }
    char at(std::size_t i) const { return w_[i]; }

    void replace_suffix(std::size_t suffix_len, std::string_view with)
    {
        w_.resize(w_.size() - suffix_len);
        w_.append(with);
    }

private:
    bool consonant(std::size_t i) const
    {
        switch (w_[i]) {
        case 'a':
        case 'e':
        case 'i':
        case 'o':
        case 'u':
            return false;
        case 'y':
            return i == 0 || !consonant(i - 1);
        default:
            return true;
        }
    }

    std::string w_;
};

struct Rule {
    std::string_view suffix;
    std::string_view replacement;
};

// Applies the longest matching rule if the remaining stem has measure > min_m.
// Returns true if some suffix matched, whether or not it was replaced.
bool apply_longest(PorterWord& w, std::span<const Rule> rules, int min_m)
{
    const Rule* best = nullptr;
    for (const auto& r : rules)
        if (w.ends_with(r.suffix) && (!best || r.suffix.size() > best->suffix.size()))
            best = &r;
    if (!best)
        return false;
    if (w.measure(w.size() - best->suffix.size()) > min_m)
        w.replace_suffix(best->suffix.size(), best->replacement);
    return true;
}

void step1a(PorterWord& w)
{
    if (w.ends_with("sses"))
        w.replace_suffix(4, "ss");
    else if (w.ends_with("ies"))
        w.replace_suffix(3, "i");
    else if (w.ends_with("ss"))
        return;
    else if (w.ends_with("s"))
        w.replace_suffix(1, "");
}

void step1b(PorterWord& w)
{
    if (w.ends_with("eed")) {
        if (w.measure(w.size() - 3) > 0)
            w.replace_suffix(1, "");
        return;
    }
    std::size_t cut = 0;
    if (w.ends_with("ed") && w.has_vowel(w.size() - 2))
        cut = 2;
    else if (w.ends_with("ing") && w.has_vowel(w.size() - 3))
        cut = 3;
    if (cut == 0)
        return;
    w.replace_suffix(cut, "");

    if (w.ends_with("at") || w.ends_with("bl") || w.ends_with("iz")) {
        w.replace_suffix(0, "e");
    } else if (w.double_consonant(w.size())) {
        const char c = w.back();
        if (c != 'l' && c != 's' && c != 'z')
            w.replace_suffix(1, "");
    } else if (w.measure(w.size()) == 1 && w.cvc(w.size())) {
        w.replace_suffix(0, "e");
    }
}

void step1c(PorterWord& w)
{
    if (w.ends_with("y") && w.has_vowel(w.size() - 1))
        w.replace_suffix(1, "i");
}

void step2(PorterWord& w)
{
    static constexpr Rule rules[] = {
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},    {"izer", "ize"},
        {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},   {"eli", "e"},        {"ousli", "ous"},
        {"ization", "ize"}, {"ation", "ate"},   {"ator", "ate"},    {"alism", "al"},     {"iveness", "ive"},
        {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},    {"biliti", "ble"},
    };
    apply_longest(w, rules, 0);
}

void step3(PorterWord& w)
{
    static constexpr Rule rules[] = {
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"}, {"ical", "ic"}, {"ful", ""}, {"ness", ""},
    };
    apply_longest(w, rules, 0);
}

void step4(PorterWord& w)
{
    static constexpr std::string_view suffixes[] = {
        "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
        "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize",
    };
    std::string_view best;
    for (auto s : suffixes)
        if (w.ends_with(s) && s.size() > best.size())
            best = s;
    if (best.empty())
        return;
    const std::size_t stem_len = w.size() - best.size();
    if (w.measure(stem_len) <= 1)
        return;
    if (best == "ion" && (stem_len == 0 || (w.at(stem_len - 1) != 's' && w.at(stem_len - 1) != 't')))
        return;
    w.replace_suffix(best.size(), "");
}

void step5(PorterWord& w)
{
    if (w.ends_with("e")) {
        const int m = w.measure(w.size() - 1);
        if (m > 1 || (m == 1 && !w.cvc(w.size() - 1)))
            w.replace_suffix(1, "");
    }
    if (w.measure(w.size()) > 1 && w.double_consonant(w.size()) && w.back() == 'l')
        w.replace_suffix(1, "");
}

std::mutex& registry_mutex()
{
    static std::mutex m;
    return m;
}

std::map<std::string, StemmerFactory>& registry()
{
    static std::map<std::string, StemmerFactory> r{
        {"en-suffix", [] { return std::make_unique<EnglishSuffixStemmer>(); }},
        {"identity", [] { return std::make_unique<IdentityStemmer>(); }},
    };
    return r;
}

} // namespace

std::string EnglishSuffixStemmer::stem(std::string_view word) const
{
    if (word.empty() || !std::all_of(word.begin(), word.end(), [](char c) { return c >= 'a' && c <= 'z'; }))
        return std::string(word);

    PorterWord w{std::string(word)};
    step1a(w);
    step1b(w);
    step1c(w);
    step2(w);
    step3(w);
    step4(w);
    step5(w);
    return w.take();
}

std::unique_ptr<Stemmer> make_stemmer(const std::string& id)
{
    std::lock_guard lock(registry_mutex());
    auto it = registry().find(id);
    if (it == registry().end())
        throw Error("unknown stemmer: " + id);
    return it->second();
}

void register_stemmer(const std::string& id, StemmerFactory factory)
{
    std::lock_guard lock(registry_mutex());
    registry()[id] = std::move(factory);
}

std::vector<std::string> registered_stemmers()
{
    std::lock_guard lock(registry_mutex());
    std::vector<std::string> out;
    for (const auto& [id, f] : registry())
        out.push_back(id);
    return out;
}

} // namespace respcluster
