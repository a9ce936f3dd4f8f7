#include "respcluster/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "respcluster/error.hpp"
#include "respcluster/preprocess.hpp"

namespace respcluster {

namespace {

using nlohmann::json;

const std::string kOutlierPrefix = "_outlier_";

void strip_bom(std::string& line)
{
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF)
        line.erase(0, 3);
}

bool is_blank(const std::string& line)
{
    return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

// Calls fn(line_number, object) for every non-blank JSONL record.
template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn)
{
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1)
            strip_bom(line);
        if (is_blank(line))
            continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error("line " + std::to_string(lineno) + ": malformed JSON: " + e.what());
        }
        if (!obj.is_object())
            throw Error("line " + std::to_string(lineno) + ": expected a JSON object");
        fn(lineno, obj);
    }
}

std::string require_string(const json& obj, const char* key, std::size_t lineno)
{
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string())
        throw Error("line " + std::to_string(lineno) + ": missing or non-string field \"" + key + "\"");
    return it->get<std::string>();
}

std::ifstream open_input(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path.string());
    return in;
}

} // namespace

Corpus::Corpus(std::vector<Document> docs) : docs_(std::move(docs))
{
    index_.reserve(docs_.size());
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        if (docs_[i].id.empty())
            throw Error("empty document id");
        if (!index_.emplace(docs_[i].id, i).second)
            throw Error("duplicate document id: " + docs_[i].id);
    }
}

std::optional<std::size_t> Corpus::index_of(const std::string& id) const
{
    auto it = index_.find(id);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

std::vector<std::string> Corpus::ids() const
{
    std::vector<std::string> out;
    out.reserve(docs_.size());
    for (const auto& d : docs_)
        out.push_back(d.id);
    return out;
}

Classification::Classification(std::vector<std::string> ids, const std::vector<std::vector<std::string>>& memberships)
    : ids_(std::move(ids))
{
    if (memberships.size() != ids_.size())
        throw Error("classification: ids and memberships differ in length");

    std::unordered_map<std::string, std::size_t> class_index;
    auto intern = [&](const std::string& label) {
        auto [it, inserted] = class_index.emplace(label, classes_.size());
        if (inserted)
            classes_.push_back(label);
        return it->second;
    };

    members_.resize(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (!index_.emplace(ids_[i], i).second)
            throw Error("duplicate document id: " + ids_[i]);

        std::vector<std::string> labels;
        std::set<std::string> seen;
        for (const auto& l : memberships[i])
            if (seen.insert(l).second)
                labels.push_back(l);
        if (labels.empty())
            labels.push_back(kOutlierPrefix + ids_[i]);

        const double w = 1.0 / static_cast<double>(labels.size());
        for (const auto& l : labels)
            members_[i].push_back({intern(l), w});
    }
}

std::optional<std::size_t> Classification::index_of(const std::string& id) const
{
    auto it = index_.find(id);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

double Classification::weight(const std::string& cls, const std::string& id) const
{
    auto i = index_of(id);
    if (!i)
        return 0.0;
    for (const auto& cw : members_[*i])
        if (classes_[cw.cls] == cls)
            return cw.weight;
    return 0.0;
}

std::size_t Classification::class_size(std::size_t cls) const
{
    std::size_t n = 0;
    for (const auto& m : members_)
        for (const auto& cw : m)
            if (cw.cls == cls)
                ++n;
    return n;
}

Classification Classification::restricted_to(const std::vector<std::string>& ids) const
{
    Classification out;
    out.ids_ = ids;
    out.classes_ = classes_;
    out.members_.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto src = index_of(ids[i]);
        if (!src)
            throw Error("classification has no document " + ids[i]);
        if (!out.index_.emplace(ids[i], i).second)
            throw Error("duplicate document id: " + ids[i]);
        out.members_.push_back(members_[*src]);
    }
    return out;
}

Corpus read_corpus(std::istream& in, bool allow_empty)
{
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    for_each_record(in, [&](std::size_t lineno, const json& obj) {
        Document d{require_string(obj, "id", lineno), require_string(obj, "text", lineno)};
        if (d.id.empty())
            throw Error("line " + std::to_string(lineno) + ": empty document id");
        if (!seen.insert(d.id).second)
            throw Error("duplicate document id: " + d.id);
        if (d.text.empty() && !allow_empty)
            throw Error("line " + std::to_string(lineno) + ": empty text for document " + d.id);
        docs.push_back(std::move(d));
    });
    return Corpus(std::move(docs));
}

Corpus load_corpus(const std::filesystem::path& path, bool allow_empty)
{
    auto in = open_input(path);
    return read_corpus(in, allow_empty);
}

void write_corpus(std::ostream& out, const Corpus& corpus)
{
    for (const auto& d : corpus.documents())
        out << json{{"id", d.id}, {"text", d.text}}.dump() << '\n';
}

Classification read_labels(std::istream& in, const Corpus& corpus)
{
    std::vector<std::optional<std::vector<std::string>>> found(corpus.size());
    for_each_record(in, [&](std::size_t lineno, const json& obj) {
        const std::string id = require_string(obj, "id", lineno);
        auto idx = corpus.index_of(id);
        if (!idx)
            throw Error("line " + std::to_string(lineno) + ": unknown document id: " + id);
        if (found[*idx])
            throw Error("duplicate label line for document id: " + id);

        auto it = obj.find("classes");
        if (it == obj.end() || !it->is_array())
            throw Error("line " + std::to_string(lineno) + ": missing or non-array field \"classes\"");
        std::vector<std::string> classes;
        for (const auto& c : *it) {
            if (!c.is_string())
                throw Error("line " + std::to_string(lineno) + ": class labels must be strings");
            auto label = c.get<std::string>();
            if (label.empty())
                throw Error("line " + std::to_string(lineno) + ": empty class label");
            if (label.rfind(kOutlierPrefix, 0) == 0)
                throw Error("line " + std::to_string(lineno) + ": class label prefix \"" + kOutlierPrefix +
                            "\" is reserved for outliers");
            classes.push_back(std::move(label));
        }
        found[*idx] = std::move(classes);
    });

    std::vector<std::vector<std::string>> memberships;
    memberships.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (!found[i])
            throw Error("missing labels for document id: " + corpus[i].id);
        memberships.push_back(std::move(*found[i]));
    }
    return Classification(corpus.ids(), memberships);
}

Classification load_labels(const std::filesystem::path& path, const Corpus& corpus)
{
    auto in = open_input(path);
    return read_labels(in, corpus);
}

CorpusStats corpus_stats(const Corpus& corpus, const Classification* labels, const VariantConfig& variant)
{
    if (corpus.empty())
        throw Error("corpus is empty");

    CorpusStats st;
    st.n_answers = corpus.size();
    std::set<std::string, std::less<>> vocab;
    std::size_t tokens = 0;
    for (const auto& td : preprocess_corpus(corpus, variant)) {
        tokens += td.tokens.size();
        vocab.insert(td.tokens.begin(), td.tokens.end());
    }
    st.mean_tokens = static_cast<double>(tokens) / static_cast<double>(corpus.size());
    st.vocab_size = vocab.size();

    if (labels) {
        std::vector<std::size_t> sizes(labels->classes().size(), 0);
        std::size_t multi = 0;
        for (std::size_t i = 0; i < labels->size(); ++i) {
            const auto& m = labels->memberships(i);
            if (m.size() >= 2)
                ++multi;
            for (const auto& cw : m)
                ++sizes[cw.cls];
        }
        std::size_t proper = 0, singletons = 0;
        for (auto s : sizes) {
            if (s >= 2)
                ++proper;
            else if (s == 1)
                ++singletons;
        }
        st.n_proper_classes = proper;
        st.n_outliers = singletons;
        st.n_multiclass = multi;
    }
    return st;
}

} // namespace respcluster
