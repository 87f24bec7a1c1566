#pragma once
// Fixtures and independent oracles shared by the unit and acceptance suites.

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "ontomap/ontomap.hpp"

namespace testsupport {

using namespace ontomap;

inline ClassRecord rec(std::string id, std::string label, std::vector<std::string> parents = {},
                       std::vector<std::string> synonyms = {}, std::vector<std::string> definitions = {}) {
    return ClassRecord{std::move(id), std::move(label), std::move(synonyms), std::move(definitions),
                       std::move(parents)};
}

// R -> {A, B}, A -> {C, D}, B -> {D}
inline OntologyGraph toy_graph(std::string id = "toy") {
    return OntologyGraph::from_records(std::move(id), {
                                                          rec("R", "Root"),
                                                          rec("A", "Alpha", {"R"}),
                                                          rec("B", "Beta", {"R"}),
                                                          rec("C", "Gamma", {"A"}),
                                                          rec("D", "Chest wall", {"A", "B"}, {"Thoracic wall"}),
                                                      });
}

inline std::string lines(const std::vector<std::string>& ls) {
    std::string out;
    for (const auto& l : ls) out += l + "\n";
    return out;
}

inline OntologyGraph load_string(const std::string& text, std::string id = "t") {
    std::istringstream in(text);
    return load_ontology(in, std::move(id));
}

// Random DAG: classes "n0000".. with labels drawn from a small vocabulary.
// Each non-root picks 1 parent among earlier nodes, plus a second one with
// probability multi_parent.
struct DagSpec {
    size_t nodes = 50;
    size_t roots = 1;
    double multi_parent = 0.2;
    bool labels_from_vocab = true;
};

inline const std::vector<std::string>& vocabulary() {
    static const std::vector<std::string> words = {
        "chest", "wall",   "thoracic", "lung",   "heart",  "valve",   "artery",  "vein",    "bone",   "rib",
        "femur", "tibia",  "skull",    "brain",  "nerve",  "muscle",  "tendon",  "disorder", "enzyme", "cell",
        "liver", "kidney", "renal",    "cardiac", "upper", "lower",   "left",    "right",   "deep",   "structure",
        "of",    "the",    "pancreas", "studies", "tissue", "gland",  "duct",    "cavity",  "joint",  "spine",
    };
    return words;
}

inline std::string random_phrase(SplitMix64& rng, size_t min_words = 1, size_t max_words = 3) {
    const auto& v = vocabulary();
    size_t n = min_words + rng.below(max_words - min_words + 1);
    std::string out;
    for (size_t i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += v[rng.below(v.size())];
    }
    return out;
}

inline std::string node_id(size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "n%05zu", i);
    return buf;
}

inline OntologyGraph random_dag(SplitMix64& rng, const DagSpec& spec, std::string onto = "rand") {
    std::vector<ClassRecord> records;
    // Shuffled ids so that id order and creation order differ.
    std::vector<size_t> perm(spec.nodes);
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    for (size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    for (size_t i = 0; i < spec.nodes; ++i) {
        ClassRecord r;
        r.class_id = node_id(perm[i]);
        r.label = spec.labels_from_vocab ? random_phrase(rng) : "label " + r.class_id;
        if (rng.below(3) == 0) r.synonyms.push_back(random_phrase(rng));
        if (i >= spec.roots) {
            size_t p = rng.below(i);
            r.parents.push_back(node_id(perm[p]));
            if (i > 1 && rng.below(1000) < static_cast<uint64_t>(spec.multi_parent * 1000)) {
                size_t q = rng.below(i);
                if (q != p) r.parents.push_back(node_id(perm[q]));
            }
        }
        records.push_back(std::move(r));
    }
    return OntologyGraph::from_records(std::move(onto), std::move(records));
}

// Balanced tree with the given branching; ids are zero-padded BFS numbers.
inline OntologyGraph balanced_tree(size_t n, size_t branching, SplitMix64& rng, std::string onto = "tree") {
    std::vector<ClassRecord> records;
    for (size_t i = 0; i < n; ++i) {
        ClassRecord r;
        r.class_id = node_id(i);
        r.label = random_phrase(rng, 2, 4) + " " + std::to_string(i);
        if (i > 0) r.parents.push_back(node_id((i - 1) / branching));
        records.push_back(std::move(r));
    }
    return OntologyGraph::from_records(std::move(onto), std::move(records));
}

// Exhaustive root-to-class walks, rendered with the same token scheme but
// computed by plain DFS over every walk (no capping, no DP).
inline std::map<std::string, std::vector<std::vector<std::string>>> all_walks(const OntologyGraph& g) {
    std::map<std::string, std::vector<std::vector<std::string>>> out;
    const bool single = g.roots().size() == 1;
    std::function<void(const std::string&, std::vector<std::string>&)> dfs = [&](const std::string& id,
                                                                                std::vector<std::string>& path) {
        out[id].push_back(path);
        const auto& kids = g.children(id);
        for (size_t i = 0; i < kids.size(); ++i) {
            path.push_back(to_base36(i));
            dfs(kids[i], path);
            path.pop_back();
        }
    };
    for (size_t r = 0; r < g.roots().size(); ++r) {
        std::vector<std::string> path;
        if (!single) path.push_back(to_base36(r));
        dfs(g.roots()[r], path);
    }
    return out;
}

inline std::string render(const std::vector<std::string>& tokens) {
    std::string s;
    for (size_t i = 0; i < tokens.size(); ++i) s += (i ? "-" : "") + tokens[i];
    return s;
}

inline std::set<std::string> ancestors(const OntologyGraph& g, const std::string& id) {
    std::set<std::string> out;
    std::vector<std::string> stack{id};
    while (!stack.empty()) {
        auto cur = stack.back();
        stack.pop_back();
        for (const auto& p : g.at(cur).parents)
            if (out.insert(p).second) stack.push_back(p);
    }
    return out;
}

// Independent edit distance (full matrix) over code points.
inline size_t oracle_levenshtein(const std::u32string& a, const std::u32string& b) {
    std::vector<std::vector<size_t>> d(a.size() + 1, std::vector<size_t>(b.size() + 1));
    for (size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (size_t i = 1; i <= a.size(); ++i)
        for (size_t j = 1; j <= b.size(); ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
    return d[a.size()][b.size()];
}

inline double oracle_edit_similarity(const std::string& a, const std::string& b) {
    auto ua = to_u32(a), ub = to_u32(b);
    size_t m = std::max(ua.size(), ub.size());
    return m == 0 ? 1.0 : 1.0 - static_cast<double>(oracle_levenshtein(ua, ub)) / static_cast<double>(m);
}

// Brute-force answer to "which target class does greedy decode pick": the
// classes with the best max-description edit similarity, then the smallest
// token path among all of their paths (a prefix sorts first).
inline std::string oracle_best_class(const std::string& source, const OntologyGraph& target,
                                     const SmartIdTable& table) {
    const std::string src = normalize_term(source);
    double best = -1.0;
    std::vector<std::string> best_path;
    std::string best_class;
    for (const auto& [id, r] : target.classes()) {
        double s = 0.0;
        for (const auto& term : description_set(target, id, false).terms)
            s = std::max(s, oracle_edit_similarity(src, term));
        for (const auto& p : table.all_paths(id)) {
            if (s > best || (s == best && p.tokens() < best_path)) {
                best = s;
                best_path = p.tokens();
                best_class = id;
            }
        }
    }
    return best_class;
}

// Scripted translator: score_tokens from a callback, embeddings from a table.
class FakeTranslator : public Translator {
public:
    std::function<std::vector<double>(std::string_view, std::span<const std::string>, std::span<const std::string>)>
        scorer;
    std::map<std::string, std::vector<double>> vectors;
    size_t dim = 2;
    size_t score_calls = 0;

    TranslatorInfo info() override { return {{"score_tokens", "embed"}, dim, true}; }

    std::vector<double> score_tokens(const TaskId&, std::string_view source, std::span<const std::string> prefix,
                                     std::span<const std::string> allowed) override {
        ++score_calls;
        if (scorer) return scorer(source, prefix, allowed);
        return std::vector<double>(allowed.size(), 0.0);
    }

    std::vector<double> embed(const TaskId&, std::string_view text) override {
        auto it = vectors.find(std::string(text));
        if (it == vectors.end()) throw Error(Errc::TranslatorError, "no vector for '" + std::string(text) + "'");
        return it->second;
    }
};

// Counts calls on the way through to another translator.
class CountingTranslator : public Translator {
public:
    explicit CountingTranslator(Translator& inner) : inner_(inner) {}
    size_t calls = 0;

    TranslatorInfo info() override { return inner_.info(); }
    std::vector<double> score_tokens(const TaskId& t, std::string_view s, std::span<const std::string> p,
                                     std::span<const std::string> a) override {
        ++calls;
        return inner_.score_tokens(t, s, p, a);
    }
    std::vector<double> embed(const TaskId& t, std::string_view s) override { return inner_.embed(t, s); }

private:
    Translator& inner_;
};

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "ontomap-XXXXXX").string();
        char* made = ::mkdtemp(tmpl.data());
        if (!made) throw std::runtime_error("mkdtemp failed");
        path = made;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline OntologyGraph load_file(const std::string& path, std::string id) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return load_ontology(in, std::move(id));
}

struct RunResult {
    int status = -1;
    std::string out;
    std::string err;
};

inline std::string shell_quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) {
        if (c == '\'')
            q += "'\\''";
        else
            q += c;
    }
    return q + "'";
}

// Runs a shell command line, capturing stdout and stderr through files.
inline RunResult run(const std::string& cmd, const std::string& cwd = "") {
    TempDir tmp;
    std::string full = (cwd.empty() ? "" : "cd " + shell_quote(cwd) + " && ") + cmd + " >" +
                       shell_quote(tmp / "out") + " 2>" + shell_quote(tmp / "err");
    int rc = std::system(full.c_str());
    RunResult r;
    r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = read_file(tmp / "out");
    r.err = read_file(tmp / "err");
    return r;
}

} // namespace testsupport
