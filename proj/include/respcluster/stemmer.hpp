#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace respcluster {

class Stemmer {
public:
    virtual ~Stemmer() = default;
    virtual std::string stem(std::string_view word) const = 0;
};

class IdentityStemmer final : public Stemmer {
public:
    std::string stem(std::string_view word) const override { return std::string(word); }
};

// Porter's five-step English suffix stripper, original 1980 rule set. Expects
// lowercase input; words containing non a-z bytes are returned unchanged.
class EnglishSuffixStemmer final : public Stemmer {
public:
    std::string stem(std::string_view word) const override;
};

using StemmerFactory = std::function<std::unique_ptr<Stemmer>()>;

// Registry lookup. "en-suffix" and "identity" are always registered.
std::unique_ptr<Stemmer> make_stemmer(const std::string& id);
void register_stemmer(const std::string& id, StemmerFactory factory);
std::vector<std::string> registered_stemmers();

} // namespace respcluster
