#pragma once
// Immutable ontology graphs loaded from the line-delimited class file format:
//
//   {"id": "...", "label": "...", "synonyms": [...], "definitions": [...], "parents": [...]}
//
// One object per line. Blank lines are ignored.

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "ontomap/error.hpp"
#include "ontomap/provenance.hpp"
#include "ontomap/text.hpp"

namespace ontomap {

struct ClassRecord {
    std::string class_id;
    std::string label;
    std::vector<std::string> synonyms;
    std::vector<std::string> definitions;
    std::vector<std::string> parents;

    bool operator==(const ClassRecord&) const = default;
};

class OntologyGraph {
public:
    OntologyGraph() = default;

    // Builds the indices without checking invariants; see validate_graph().
    static OntologyGraph from_records(std::string ontology_id, std::vector<ClassRecord> records) {
        OntologyGraph g;
        g.ontology_id_ = std::move(ontology_id);
        for (auto& r : records) {
            std::string id = r.class_id;
            g.classes_.insert_or_assign(std::move(id), std::move(r));
        }
        for (const auto& [id, rec] : g.classes_) {
            g.child_index_[id];
            if (rec.parents.empty()) g.roots_.push_back(id);
            for (const auto& p : rec.parents) g.child_index_[p].push_back(id);
        }
        for (auto& [id, kids] : g.child_index_) {
            std::sort(kids.begin(), kids.end());
            kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
        }
        return g;
    }

    const std::string& ontology_id() const { return ontology_id_; }
    const std::map<std::string, ClassRecord>& classes() const { return classes_; }
    const std::vector<std::string>& roots() const { return roots_; }
    size_t size() const { return classes_.size(); }
    bool contains(std::string_view id) const { return classes_.find(std::string(id)) != classes_.end(); }

    const ClassRecord& at(std::string_view id) const {
        auto it = classes_.find(std::string(id));
        if (it == classes_.end()) throw Error(Errc::UnknownClass, std::string(id));
        return it->second;
    }

    // Children sorted by class_id; empty for leaves and unknown ids.
    const std::vector<std::string>& children(std::string_view id) const {
        static const std::vector<std::string> none;
        auto it = child_index_.find(std::string(id));
        return it == child_index_.end() ? none : it->second;
    }

    const std::map<std::string, std::vector<std::string>>& child_index() const { return child_index_; }

    bool operator==(const OntologyGraph& other) const {
        return ontology_id_ == other.ontology_id_ && classes_ == other.classes_;
    }

private:
    std::string ontology_id_;
    std::map<std::string, ClassRecord> classes_;
    std::vector<std::string> roots_;
    std::map<std::string, std::vector<std::string>> child_index_;
};

struct ValidationIssue {
    Errc code;
    std::string detail;
};

struct ValidationReport {
    size_t classes = 0;
    size_t roots = 0;
    size_t multi_parent = 0;
    size_t max_depth = 0;
    std::vector<ValidationIssue> errors;

    bool ok() const { return errors.empty(); }
    bool has(Errc code) const {
        return std::any_of(errors.begin(), errors.end(), [&](const ValidationIssue& e) { return e.code == code; });
    }
};

// Kahn order over parent -> child edges (unknown parents ignored). Returns
// fewer than size() ids iff the graph has a cycle.
inline std::vector<std::string> topological_order(const OntologyGraph& graph) {
    std::map<std::string, size_t> indegree;
    for (const auto& [id, rec] : graph.classes()) {
        indegree[id] = static_cast<size_t>(
            std::count_if(rec.parents.begin(), rec.parents.end(), [&](const std::string& p) { return graph.contains(p); }));
    }
    std::vector<std::string> order;
    std::vector<std::string> frontier;
    for (const auto& [id, d] : indegree)
        if (d == 0) frontier.push_back(id);
    std::reverse(frontier.begin(), frontier.end());
    while (!frontier.empty()) {
        std::string id = std::move(frontier.back());
        frontier.pop_back();
        order.push_back(id);
        const auto& kids = graph.children(id);
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
            auto d = indegree.find(*it);
            if (d != indegree.end() && --d->second == 0) frontier.push_back(*it);
        }
    }
    return order;
}

inline ValidationReport validate_graph(const OntologyGraph& graph) {
    ValidationReport report;
    report.classes = graph.size();
    report.roots = graph.roots().size();
    if (graph.size() == 0) {
        report.errors.push_back({Errc::EmptyOntology, "ontology has no classes"});
        return report;
    }

    bool self_loop = false;
    for (const auto& [id, rec] : graph.classes()) {
        if (rec.parents.size() > 1) ++report.multi_parent;
        if (trim(rec.label).empty()) report.errors.push_back({Errc::ParseError, id + ": empty label"});
        std::set<std::string> seen;
        for (const auto& p : rec.parents) {
            if (!seen.insert(p).second) report.errors.push_back({Errc::ParseError, id + ": duplicate parent " + p});
            if (p == id) {
                report.errors.push_back({Errc::CyclicOntology, id + " lists itself as parent"});
                self_loop = true;
            } else if (!graph.contains(p)) {
                report.errors.push_back({Errc::DanglingParent, id + " -> unknown parent " + p});
            }
        }
    }
    auto order = topological_order(graph);
    if (order.size() != graph.size()) {
        if (!self_loop) report.errors.push_back({Errc::CyclicOntology, "cycle among class parents"});
        return report;
    }

    // Depth is the longest parent chain from a root.
    std::unordered_map<std::string, size_t> depth;
    for (const auto& id : order) {
        size_t d = 0;
        for (const auto& p : graph.at(id).parents)
            if (graph.contains(p)) d = std::max(d, depth[p] + 1);
        depth[id] = d;
        report.max_depth = std::max(report.max_depth, d);
    }
    return report;
}

namespace detail {

inline std::vector<std::string> string_array(const nlohmann::json& obj, const char* key, size_t line) {
    std::vector<std::string> out;
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return out;
    if (!it->is_array())
        throw Error(Errc::ParseError, "line " + std::to_string(line) + ": '" + key + "' must be an array");
    for (const auto& v : *it) {
        if (!v.is_string())
            throw Error(Errc::ParseError, "line " + std::to_string(line) + ": '" + key + "' must hold strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

inline ClassRecord parse_class_line(std::string_view text, size_t line) {
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ParseError, "line " + std::to_string(line) + ": " + e.what());
    }
    if (!obj.is_object()) throw Error(Errc::ParseError, "line " + std::to_string(line) + ": expected an object");
    auto required = [&](const char* key) {
        auto it = obj.find(key);
        if (it == obj.end() || !it->is_string())
            throw Error(Errc::ParseError, "line " + std::to_string(line) + ": missing string field '" + key + "'");
        return it->get<std::string>();
    };
    ClassRecord rec;
    rec.class_id = required("id");
    rec.label = required("label");
    if (rec.class_id.empty()) throw Error(Errc::ParseError, "line " + std::to_string(line) + ": empty id");
    if (trim(rec.label).empty()) throw Error(Errc::ParseError, "line " + std::to_string(line) + ": empty label");
    rec.synonyms = string_array(obj, "synonyms", line);
    rec.definitions = string_array(obj, "definitions", line);
    rec.parents = string_array(obj, "parents", line);
    std::set<std::string> seen;
    for (const auto& p : rec.parents) {
        if (!seen.insert(p).second)
            throw Error(Errc::ParseError, "line " + std::to_string(line) + ": duplicate parent " + p);
    }
    return rec;
}

} // namespace detail

// Reads and validates a class file. Class order in the stream does not
// affect the result.
inline OntologyGraph load_ontology(std::istream& in, std::string ontology_id) {
    std::vector<ClassRecord> records;
    std::map<std::string, size_t> first_line;
    std::string text;
    size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (trim(text).empty()) continue;
        if (is_provenance_record(text)) continue;
        ClassRecord rec = detail::parse_class_line(text, line);
        auto [it, inserted] = first_line.emplace(rec.class_id, line);
        if (!inserted)
            throw Error(Errc::DuplicateClass, "'" + rec.class_id + "' on lines " + std::to_string(it->second) +
                                                  " and " + std::to_string(line));
        records.push_back(std::move(rec));
    }
    if (in.bad()) throw Error(Errc::IoError, "read failure");

    OntologyGraph graph = OntologyGraph::from_records(std::move(ontology_id), std::move(records));
    ValidationReport report = validate_graph(graph);
    for (Errc code : {Errc::DanglingParent, Errc::CyclicOntology, Errc::ParseError}) {
        for (const auto& e : report.errors)
            if (e.code == code) throw Error(e.code, e.detail);
    }
    return graph;
}

inline nlohmann::ordered_json class_to_json(const ClassRecord& rec) {
    nlohmann::ordered_json obj;
    obj["id"] = rec.class_id;
    obj["label"] = rec.label;
    obj["synonyms"] = rec.synonyms;
    obj["definitions"] = rec.definitions;
    obj["parents"] = rec.parents;
    return obj;
}

// Writes the class file in class_id order.
inline void write_ontology(const OntologyGraph& graph, std::ostream& out) {
    for (const auto& [id, rec] : graph.classes()) out << class_to_json(rec).dump() << '\n';
}

// Normalized label and synonyms of one class (plus singular forms when asked).
struct DescriptionSet {
    std::string owner;
    std::set<std::string> terms;

    bool operator==(const DescriptionSet&) const = default;
};

struct DescriptionOptions {
    bool singularize = false;
    bool lowercase = true;
};

inline std::set<std::string> normalize_terms(const ClassRecord& rec, const DescriptionOptions& opts) {
    std::set<std::string> terms;
    auto add = [&](const std::string& raw) {
        std::string t = normalize_term(raw, opts.lowercase);
        if (t.empty()) return;
        if (opts.singularize) terms.insert(singularize(t));
        terms.insert(std::move(t));
    };
    add(rec.label);
    for (const auto& s : rec.synonyms) add(s);
    return terms;
}

inline DescriptionSet description_set(const OntologyGraph& graph, std::string_view class_id,
                                      const DescriptionOptions& opts = {}) {
    const ClassRecord& rec = graph.at(class_id);
    return DescriptionSet{rec.class_id, normalize_terms(rec, opts)};
}

inline DescriptionSet description_set(const OntologyGraph& graph, std::string_view class_id, bool singularize) {
    return description_set(graph, class_id, DescriptionOptions{singularize, true});
}

} // namespace ontomap
