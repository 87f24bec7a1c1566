#pragma once
// Global (precision / recall / F-beta) and local (Hits@K, MRR) alignment
// metrics, plus accuracy of top-1 predictions against a reference.

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ontomap/error.hpp"
#include "ontomap/text.hpp"

namespace ontomap {

class MappingSet {
public:
    using Pair = std::pair<std::string, std::string>;

    // Returns false if the pair was already present.
    bool add(std::string source, std::string target, std::optional<double> score = std::nullopt) {
        Pair key{std::move(source), std::move(target)};
        if (pairs_.count(key)) return false;
        if (score) scores_[key] = *score;
        pairs_.insert(std::move(key));
        return true;
    }

    bool contains(const Pair& p) const { return pairs_.count(p) > 0; }
    size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }
    const std::set<Pair>& pairs() const { return pairs_; }

    std::optional<double> score(const Pair& p) const {
        auto it = scores_.find(p);
        if (it == scores_.end()) return std::nullopt;
        return it->second;
    }

    // Best-scored target per source (ties: smallest target id). Unscored pairs rank as 0.
    std::map<std::string, std::string> top_predictions() const {
        std::map<std::string, std::pair<double, std::string>> best;
        for (const auto& p : pairs_) {
            double s = score(p).value_or(0.0);
            auto it = best.find(p.first);
            if (it == best.end() || s > it->second.first) best[p.first] = {s, p.second};
        }
        std::map<std::string, std::string> out;
        for (auto& [src, v] : best) out.emplace(src, v.second);
        return out;
    }

private:
    std::set<Pair> pairs_;
    std::map<Pair, double> scores_;
};

struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f = 0.0;
    size_t true_positives = 0;
};

inline PRF precision_recall_f(const MappingSet& out, const MappingSet& ref, double beta = 1.0) {
    if (out.empty()) throw Error(Errc::PrecisionUndefined, "no output mappings");
    if (ref.empty()) throw Error(Errc::RecallUndefined, "no reference mappings");
    if (!(beta > 0.0)) throw Error(Errc::InvalidArgument, "beta must be positive");
    PRF r;
    for (const auto& p : out.pairs())
        if (ref.contains(p)) ++r.true_positives;
    r.precision = static_cast<double>(r.true_positives) / static_cast<double>(out.size());
    r.recall = static_cast<double>(r.true_positives) / static_cast<double>(ref.size());
    double b2 = beta * beta;
    double denom = b2 * r.precision + r.recall;
    r.f = denom > 0.0 ? (1.0 + b2) * r.precision * r.recall / denom : 0.0;
    return r;
}

// One reference pair with its negative candidates (M_m).
struct RankingCase {
    std::string source_id;
    std::string reference_target_id;
    std::vector<std::string> negative_targets;
    // Filled in by scoring; negative_scores parallels negative_targets.
    std::optional<double> reference_score;
    std::vector<double> negative_scores;
};

// 1 + #candidates scoring strictly higher + #equal-scored candidates whose id
// sorts before the reference id.
inline size_t rank_of(const RankingCase& c) {
    if (!c.reference_score || c.negative_scores.size() != c.negative_targets.size())
        throw Error(Errc::IncompleteScores, "ranking case for " + c.source_id + " lacks scores");
    const double ref = *c.reference_score;
    size_t rank = 1;
    for (size_t i = 0; i < c.negative_targets.size(); ++i) {
        double s = c.negative_scores[i];
        if (s > ref || (s == ref && c.negative_targets[i] < c.reference_target_id)) ++rank;
    }
    return rank;
}

inline double hits_at_k(std::span<const RankingCase> cases, size_t k) {
    if (cases.empty()) throw Error(Errc::NoCases, "no ranking cases");
    if (k == 0) throw Error(Errc::InvalidArgument, "k must be >= 1");
    size_t hits = 0;
    for (const auto& c : cases)
        if (rank_of(c) <= k) ++hits;
    return static_cast<double>(hits) / static_cast<double>(cases.size());
}

inline double mrr(std::span<const RankingCase> cases) {
    if (cases.empty()) throw Error(Errc::NoCases, "no ranking cases");
    double sum = 0.0;
    for (const auto& c : cases) sum += 1.0 / static_cast<double>(rank_of(c));
    return sum / static_cast<double>(cases.size());
}

// Share of reference pairs whose source is predicted to the reference target;
// a missing prediction counts as wrong.
inline double accuracy(const std::map<std::string, std::string>& predictions, const MappingSet& ref) {
    if (ref.empty()) throw Error(Errc::RecallUndefined, "no reference mappings");
    size_t correct = 0;
    for (const auto& [src, tgt] : ref.pairs()) {
        auto it = predictions.find(src);
        if (it != predictions.end() && it->second == tgt) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(ref.size());
}

namespace detail {

inline std::vector<std::string> split_tabs(std::string_view line) {
    std::vector<std::string> out;
    size_t i = 0;
    while (true) {
        size_t j = line.find('\t', i);
        out.emplace_back(line.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
        if (j == std::string_view::npos) break;
        i = j + 1;
    }
    return out;
}

inline std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

inline std::optional<double> parse_score(const std::string& text) {
    if (trim(text).empty()) return std::nullopt;
    size_t used = 0;
    double v = std::stod(text, &used);
    if (trim(text.substr(used)).size()) throw std::invalid_argument("trailing characters");
    return v;
}

} // namespace detail

// Tab-separated SrcEntity, TgtEntity[, Score] with a single header line.
// "#" comment lines and blank lines are skipped.
inline MappingSet read_mappings(std::istream& in) {
    MappingSet set;
    std::string line;
    size_t n = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++n;
        line = detail::strip_cr(line);
        if (trim(line).empty() || line.front() == '#') continue;
        if (!header) {
            header = true;
            auto cols = detail::split_tabs(line);
            if (cols.size() < 2 || cols[0] != "SrcEntity" || cols[1] != "TgtEntity")
                throw Error(Errc::ParseError, "line " + std::to_string(n) + ": expected header SrcEntity<TAB>TgtEntity");
            continue;
        }
        auto cols = detail::split_tabs(line);
        if (cols.size() < 2 || cols.size() > 3 || cols[0].empty() || cols[1].empty())
            throw Error(Errc::ParseError, "line " + std::to_string(n) + ": expected 2 or 3 tab-separated columns");
        std::optional<double> score;
        if (cols.size() == 3) {
            try {
                score = detail::parse_score(cols[2]);
            } catch (const std::exception&) {
                throw Error(Errc::ParseError, "line " + std::to_string(n) + ": bad score '" + cols[2] + "'");
            }
        }
        if (!set.add(cols[0], cols[1], score))
            throw Error(Errc::ParseError, "line " + std::to_string(n) + ": duplicate pair");
    }
    if (in.bad()) throw Error(Errc::IoError, "read failure");
    if (!header) throw Error(Errc::ParseError, "missing header line");
    return set;
}

// Candidate lists: comma-separated ids, optionally wrapped in () or [] and
// optionally quoted, e.g. "a,b", "('a', 'b')" or "["a","b"]".
inline std::vector<std::string> parse_candidate_list(std::string_view text) {
    std::string t = trim(text);
    if (!t.empty() && (t.front() == '(' || t.front() == '[')) {
        char close = t.front() == '(' ? ')' : ']';
        if (t.size() < 2 || t.back() != close) throw Error(Errc::ParseError, "unterminated candidate list");
        t = t.substr(1, t.size() - 2);
    }
    std::vector<std::string> out;
    size_t i = 0;
    while (i <= t.size()) {
        size_t j = t.find(',', i);
        if (j == std::string::npos) j = t.size();
        std::string id = trim(std::string_view(t).substr(i, j - i));
        if (id.size() >= 2 && (id.front() == '\'' || id.front() == '"')) {
            if (id.back() != id.front()) throw Error(Errc::ParseError, "unterminated quoted id " + id);
            id = id.substr(1, id.size() - 2);
        }
        if (!id.empty()) out.push_back(std::move(id));
        i = j + 1;
    }
    return out;
}

// Tab-separated SrcEntity, TgtEntity, TgtCandidates with a single header line.
inline std::vector<RankingCase> read_ranking(std::istream& in) {
    std::vector<RankingCase> cases;
    std::string line;
    size_t n = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++n;
        line = detail::strip_cr(line);
        if (trim(line).empty() || line.front() == '#') continue;
        if (!header) {
            header = true;
            auto cols = detail::split_tabs(line);
            if (cols.size() != 3 || cols[0] != "SrcEntity" || cols[1] != "TgtEntity" || cols[2] != "TgtCandidates")
                throw Error(Errc::ParseError,
                            "line " + std::to_string(n) + ": expected header SrcEntity<TAB>TgtEntity<TAB>TgtCandidates");
            continue;
        }
        auto cols = detail::split_tabs(line);
        if (cols.size() != 3 || cols[0].empty() || cols[1].empty())
            throw Error(Errc::ParseError, "line " + std::to_string(n) + ": expected 3 tab-separated columns");
        RankingCase c;
        c.source_id = cols[0];
        c.reference_target_id = cols[1];
        try {
            c.negative_targets = parse_candidate_list(cols[2]);
        } catch (const Error& e) {
            throw Error(Errc::ParseError, "line " + std::to_string(n) + ": " + e.message());
        }
        auto self = std::find(c.negative_targets.begin(), c.negative_targets.end(), c.reference_target_id);
        if (self != c.negative_targets.end())
            throw Error(Errc::ParseError, "line " + std::to_string(n) + ": reference target listed as a negative");
        cases.push_back(std::move(c));
    }
    if (in.bad()) throw Error(Errc::IoError, "read failure");
    if (!header) throw Error(Errc::ParseError, "missing header line");
    return cases;
}

} // namespace ontomap
