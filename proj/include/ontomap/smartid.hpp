#pragma once
// Hierarchical path identifiers.
//
// A class's paths are the token sequences of its root-to-class walks, where
// the token of a child under a parent is the base-36 ordinal of the child in
// the parent's class_id-sorted child list. Paths render as tokens joined by
// "-". The shortest path (then the lexicographically smallest rendering) is
// the class's SmartID; the rest are SynonymIDs.
//
// With several roots a virtual super-root is assumed and each root gets a
// one-token path. With a single root, that root is the top of every path: it
// owns the empty path and its children render as one token.

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "ontomap/error.hpp"
#include "ontomap/ontology.hpp"
#include "ontomap/provenance.hpp"

namespace ontomap {

inline constexpr size_t kDefaultPathCap = 64;

inline std::string to_base36(size_t n) {
    static constexpr char digits[] = "0123456789abcdefghijklmnopqrstuvwxyz";
    std::string out;
    do {
        out.push_back(digits[n % 36]);
        n /= 36;
    } while (n > 0);
    std::reverse(out.begin(), out.end());
    return out;
}

class PathId {
public:
    PathId() = default;
    explicit PathId(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {}

    static PathId parse(std::string_view rendered) {
        std::vector<std::string> tokens;
        if (rendered.empty()) return PathId{};
        size_t i = 0;
        while (true) {
            size_t j = rendered.find('-', i);
            std::string_view tok = rendered.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i);
            if (tok.empty()) throw Error(Errc::ParseError, "empty token in path id '" + std::string(rendered) + "'");
            for (char c : tok) {
                if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'z')))
                    throw Error(Errc::ParseError, "bad character in path id '" + std::string(rendered) + "'");
            }
            tokens.emplace_back(tok);
            if (j == std::string_view::npos) break;
            i = j + 1;
        }
        return PathId(std::move(tokens));
    }

    const std::vector<std::string>& tokens() const { return tokens_; }
    size_t size() const { return tokens_.size(); }
    bool empty() const { return tokens_.empty(); }

    std::string rendered() const {
        std::string out;
        for (size_t i = 0; i < tokens_.size(); ++i) {
            if (i) out += '-';
            out += tokens_[i];
        }
        return out;
    }

    // Shorter first, then by rendered form.
    friend bool operator<(const PathId& a, const PathId& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a.rendered() < b.rendered();
    }
    bool operator==(const PathId&) const = default;

private:
    std::vector<std::string> tokens_;
};

struct SmartIdOptions {
    size_t path_cap = kDefaultPathCap;
    // Maximum base-36 digits per token; 0 means unbounded.
    size_t max_token_len = 0;
};

namespace detail {

struct RawPath {
    size_t ntok = 0;
    std::string rendered;

    friend bool operator<(const RawPath& a, const RawPath& b) {
        if (a.ntok != b.ntok) return a.ntok < b.ntok;
        return a.rendered < b.rendered;
    }
};

inline void check_fanout(size_t siblings, const SmartIdOptions& opts, std::string_view where) {
    if (opts.max_token_len == 0 || opts.max_token_len >= 13) return;
    size_t limit = 1;
    for (size_t i = 0; i < opts.max_token_len; ++i) limit *= 36;
    if (siblings > limit)
        throw Error(Errc::TokenOverflow, std::to_string(siblings) + " siblings under " + std::string(where) +
                                             " exceed 36^" + std::to_string(opts.max_token_len));
}

// Capped shortest-first path lists for every class, or only for the classes
// in `only` (which must be closed under parents). Keeping the `cap` smallest
// paths per node is exact: a path among a child's `cap` smallest always
// extends one of its parent's `cap` smallest, since '-' sorts below every
// token character.
inline std::unordered_map<std::string, std::vector<RawPath>> capped_paths(
    const OntologyGraph& graph, const SmartIdOptions& opts, const std::unordered_set<std::string>* only = nullptr) {
    if (opts.path_cap == 0) throw Error(Errc::InvalidArgument, "path_cap must be >= 1");
    const auto& roots = graph.roots();
    const bool single_root = roots.size() == 1;
    check_fanout(roots.size(), opts, "<virtual root>");

    auto order = topological_order(graph);
    if (order.size() != graph.size()) throw Error(Errc::CyclicOntology, "graph has a cycle");

    std::unordered_map<std::string, std::vector<RawPath>> paths;
    paths.reserve(only ? only->size() : graph.size());
    for (const auto& id : order) {
        if (only && !only->count(id)) continue;
        const ClassRecord& rec = graph.at(id);
        std::vector<RawPath> mine;
        if (rec.parents.empty()) {
            if (single_root) {
                mine.push_back(RawPath{0, ""});
            } else {
                auto pos = std::lower_bound(roots.begin(), roots.end(), id);
                mine.push_back(RawPath{1, to_base36(static_cast<size_t>(pos - roots.begin()))});
            }
        }
        for (const auto& p : rec.parents) {
            const auto& siblings = graph.children(p);
            auto pos = std::lower_bound(siblings.begin(), siblings.end(), id);
            std::string tok = to_base36(static_cast<size_t>(pos - siblings.begin()));
            for (const RawPath& pp : paths.at(p))
                mine.push_back(RawPath{pp.ntok + 1, pp.rendered.empty() ? tok : pp.rendered + "-" + tok});
        }
        if (mine.size() > opts.path_cap) {
            std::partial_sort(mine.begin(), mine.begin() + static_cast<std::ptrdiff_t>(opts.path_cap), mine.end());
            mine.resize(opts.path_cap);
        } else {
            std::sort(mine.begin(), mine.end());
        }
        paths.emplace(id, std::move(mine));
    }
    return paths;
}

} // namespace detail

// Up to `path_cap` distinct paths of one class, shortest first.
inline std::vector<PathId> enumerate_paths(const OntologyGraph& graph, std::string_view class_id,
                                           size_t path_cap) {
    if (!graph.contains(class_id)) throw Error(Errc::UnknownClass, std::string(class_id));
    std::unordered_set<std::string> ancestors{std::string(class_id)};
    std::vector<std::string> stack{std::string(class_id)};
    while (!stack.empty()) {
        std::string id = std::move(stack.back());
        stack.pop_back();
        for (const auto& p : graph.at(id).parents)
            if (ancestors.insert(p).second) stack.push_back(p);
    }
    SmartIdOptions opts;
    opts.path_cap = path_cap;
    auto paths = detail::capped_paths(graph, opts, &ancestors);
    std::vector<PathId> out;
    for (const auto& rp : paths.at(std::string(class_id))) out.push_back(PathId::parse(rp.rendered));
    return out;
}

class SmartIdTable {
public:
    SmartIdTable() = default;

    const std::string& ontology_id() const { return ontology_id_; }
    size_t size() const { return smart_of_.size(); }

    const std::map<std::string, PathId>& smart_ids() const { return smart_of_; }

    const PathId& smart_id(std::string_view class_id) const {
        auto it = smart_of_.find(std::string(class_id));
        if (it == smart_of_.end()) throw Error(Errc::UnknownClass, std::string(class_id));
        return it->second;
    }

    const std::vector<PathId>& synonym_ids(std::string_view class_id) const {
        static const std::vector<PathId> none;
        auto it = synonyms_of_.find(std::string(class_id));
        return it == synonyms_of_.end() ? none : it->second;
    }

    // SmartID followed by SynonymIDs.
    std::vector<PathId> all_paths(std::string_view class_id) const {
        std::vector<PathId> out{smart_id(class_id)};
        const auto& syn = synonym_ids(class_id);
        out.insert(out.end(), syn.begin(), syn.end());
        return out;
    }

    // The single root class that owns the empty path, if any.
    const std::optional<std::string>& anchor() const { return anchor_; }

    std::optional<std::string> try_resolve(std::string_view rendered) const {
        auto it = node_of_.find(std::string(rendered));
        if (it == node_of_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& resolve(std::string_view rendered) const {
        auto it = node_of_.find(std::string(rendered));
        if (it == node_of_.end()) throw Error(Errc::UnknownPathId, "'" + std::string(rendered) + "'");
        return it->second;
    }

    size_t path_count() const { return node_of_.size(); }

    // Each entry: class_id and its paths, shortest first.
    static SmartIdTable from_paths(std::string ontology_id, std::map<std::string, std::vector<PathId>> paths) {
        SmartIdTable t;
        t.ontology_id_ = std::move(ontology_id);
        for (auto& [id, list] : paths) {
            if (list.empty()) throw Error(Errc::InvalidArgument, "class " + id + " has no path");
            std::sort(list.begin(), list.end());
            for (const auto& p : list) {
                auto [it, inserted] = t.node_of_.emplace(p.rendered(), id);
                if (!inserted)
                    throw Error(Errc::InvalidArgument,
                                "path '" + p.rendered() + "' claimed by " + it->second + " and " + id);
            }
            if (list.front().empty()) t.anchor_ = id;
            t.smart_of_.emplace(id, list.front());
            if (list.size() > 1) t.synonyms_of_.emplace(id, std::vector<PathId>(list.begin() + 1, list.end()));
        }
        return t;
    }

    bool operator==(const SmartIdTable& other) const {
        return ontology_id_ == other.ontology_id_ && smart_of_ == other.smart_of_ &&
               synonyms_of_ == other.synonyms_of_;
    }

private:
    std::string ontology_id_;
    std::map<std::string, PathId> smart_of_;
    std::map<std::string, std::vector<PathId>> synonyms_of_;
    std::unordered_map<std::string, std::string> node_of_;
    std::optional<std::string> anchor_;
};

inline SmartIdTable assign_smartids(const OntologyGraph& graph, const SmartIdOptions& opts = {}) {
    for (const auto& [id, kids] : graph.child_index()) detail::check_fanout(kids.size(), opts, id);
    auto raw = detail::capped_paths(graph, opts);
    std::map<std::string, std::vector<PathId>> paths;
    for (auto& [id, list] : raw) {
        std::vector<PathId> ids;
        ids.reserve(list.size());
        for (const auto& rp : list) ids.push_back(PathId::parse(rp.rendered));
        paths.emplace(id, std::move(ids));
    }
    return SmartIdTable::from_paths(graph.ontology_id(), std::move(paths));
}

inline SmartIdTable assign_smartids(const OntologyGraph& graph, size_t path_cap) {
    SmartIdOptions opts;
    opts.path_cap = path_cap;
    return assign_smartids(graph, opts);
}

inline const std::string& resolve(const SmartIdTable& table, std::string_view rendered) {
    return table.resolve(rendered);
}

// Line-delimited export: {"class_id", "smart_id", "synonym_ids"} in class_id order.
inline void write_smartid_table(const SmartIdTable& table, std::ostream& out) {
    for (const auto& [id, smart] : table.smart_ids()) {
        nlohmann::ordered_json j;
        j["class_id"] = id;
        j["smart_id"] = smart.rendered();
        auto syn = nlohmann::ordered_json::array();
        for (const auto& p : table.synonym_ids(id)) syn.push_back(p.rendered());
        j["synonym_ids"] = std::move(syn);
        out << j.dump() << '\n';
    }
}

inline SmartIdTable read_smartid_table(std::istream& in, std::string ontology_id) {
    std::map<std::string, std::vector<PathId>> paths;
    std::string text;
    size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (trim(text).empty() || is_provenance_record(text)) continue;
        auto where = "line " + std::to_string(line) + ": ";
        auto j = nlohmann::json::parse(text, nullptr, false);
        if (!j.is_object() || !j.contains("class_id") || !j.contains("smart_id") || !j["class_id"].is_string() ||
            !j["smart_id"].is_string())
            throw Error(Errc::ParseError, where + "expected {class_id, smart_id, synonym_ids}");
        std::vector<PathId> list{PathId::parse(j["smart_id"].get<std::string>())};
        if (j.contains("synonym_ids")) {
            if (!j["synonym_ids"].is_array()) throw Error(Errc::ParseError, where + "synonym_ids must be an array");
            for (const auto& s : j["synonym_ids"]) {
                if (!s.is_string()) throw Error(Errc::ParseError, where + "synonym_ids must hold strings");
                list.push_back(PathId::parse(s.get<std::string>()));
            }
        }
        if (!paths.emplace(j["class_id"].get<std::string>(), std::move(list)).second)
            throw Error(Errc::DuplicateClass, where + j["class_id"].get<std::string>());
    }
    return SmartIdTable::from_paths(std::move(ontology_id), std::move(paths));
}

// Token trie over every path of a table. Children are kept sorted by token.
class PathTrie {
public:
    static constexpr size_t kRoot = 0;

    struct Node {
        std::vector<std::pair<std::string, size_t>> children;
        std::optional<std::string> terminal;
    };

    PathTrie() : nodes_(1) {}

    static PathTrie build(const SmartIdTable& table) {
        PathTrie trie;
        trie.ontology_id_ = table.ontology_id();
        for (const auto& [id, smart] : table.smart_ids()) {
            trie.insert(smart, id);
            for (const auto& p : table.synonym_ids(id)) trie.insert(p, id);
        }
        return trie;
    }

    const std::string& ontology_id() const { return ontology_id_; }
    size_t node_count() const { return nodes_.size(); }
    size_t terminal_count() const { return terminals_; }
    bool empty() const { return terminals_ == 0; }
    const Node& node(size_t index) const { return nodes_.at(index); }

    std::optional<size_t> child(size_t index, std::string_view token) const {
        const auto& kids = nodes_.at(index).children;
        auto it = std::lower_bound(kids.begin(), kids.end(), token,
                                   [](const auto& kv, std::string_view t) { return kv.first < t; });
        if (it == kids.end() || it->first != token) return std::nullopt;
        return it->second;
    }

    std::optional<size_t> find(std::span<const std::string> prefix) const {
        size_t at = kRoot;
        for (const auto& tok : prefix) {
            auto next = child(at, tok);
            if (!next) return std::nullopt;
            at = *next;
        }
        return at;
    }

    std::vector<std::string> children(std::span<const std::string> prefix) const {
        std::vector<std::string> out;
        if (auto at = find(prefix)) {
            for (const auto& [tok, idx] : nodes_[*at].children) out.push_back(tok);
        }
        return out;
    }

    std::optional<std::string> terminal(std::span<const std::string> prefix) const {
        auto at = find(prefix);
        if (!at) return std::nullopt;
        return nodes_[*at].terminal;
    }

    // Every accepted token sequence, in depth-first token order.
    std::vector<std::pair<std::vector<std::string>, std::string>> language() const {
        std::vector<std::pair<std::vector<std::string>, std::string>> out;
        std::vector<std::string> prefix;
        walk(kRoot, prefix, out);
        return out;
    }

private:
    void insert(const PathId& path, const std::string& class_id) {
        size_t at = kRoot;
        for (const auto& tok : path.tokens()) {
            auto& kids = nodes_[at].children;
            auto it = std::lower_bound(kids.begin(), kids.end(), tok,
                                       [](const auto& kv, const std::string& t) { return kv.first < t; });
            if (it != kids.end() && it->first == tok) {
                at = it->second;
            } else {
                size_t fresh = nodes_.size();
                kids.insert(it, {tok, fresh});
                nodes_.emplace_back();
                at = fresh;
            }
        }
        if (!nodes_[at].terminal) ++terminals_;
        nodes_[at].terminal = class_id;
    }

    void walk(size_t at, std::vector<std::string>& prefix,
              std::vector<std::pair<std::vector<std::string>, std::string>>& out) const {
        if (nodes_[at].terminal) out.emplace_back(prefix, *nodes_[at].terminal);
        for (const auto& [tok, idx] : nodes_[at].children) {
            prefix.push_back(tok);
            walk(idx, prefix, out);
            prefix.pop_back();
        }
    }

    std::vector<Node> nodes_;
    std::string ontology_id_;
    size_t terminals_ = 0;
};

inline PathTrie build_trie(const SmartIdTable& table) { return PathTrie::build(table); }

} // namespace ontomap
