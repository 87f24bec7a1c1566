// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--only NAME]... [--allow-red NAME]... [--regenerate-golden]
//
// Exit status is 0 when every selected criterion passes or is listed in
// --allow-red. Red criteria still print FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>

#include <CLI11.hpp>

#include "support.hpp"

using namespace ontomap;
using namespace testsupport;

namespace {

// Pinned tolerances and limits.
constexpr double kFTolerance = 0.001;
constexpr double kFRuntimeSec = 1.0;
constexpr size_t kSmartIdDags = 1000;
constexpr size_t kSmartIdMaxNodes = 5000;
constexpr size_t kExhaustiveMaxNodes = 200;
constexpr double kMaxMultiParent = 0.30;
constexpr double kSmartIdRuntimeSec = 120.0;
constexpr size_t kDecodePairs = 50;
constexpr size_t kDecodeMaxTarget = 1000;
constexpr double kDecodeRuntimeSec = 120.0;
constexpr double kMaxExponent = 0.1;
constexpr double kComplexityRuntimeSec = 300.0;
constexpr double kMaskTolerance = 0.01;
constexpr double kMetricTolerance = 1e-12;
constexpr size_t kMetricFixtures = 200;
constexpr double kEndToEndRuntimeSec = 60.0;

struct Verdict {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

// ---------------------------------------------------------------- F-score

Verdict f_score_fixtures() {
    auto t0 = Clock::now();
    struct Row {
        size_t hits, out;
        double want;
    };
    const size_t ref = 10000;
    std::string detail;
    bool ok = true;
    for (const auto& row : {Row{7380, 7793, 0.830}, Row{9290, 9558, 0.950}, Row{7950, 9827, 0.802}}) {
        MappingSet o, r;
        for (size_t i = 0; i < ref; ++i) r.add("s" + std::to_string(i), "t" + std::to_string(i));
        for (size_t i = 0; i < row.out; ++i)
            o.add("s" + std::to_string(i), (i < row.hits ? "t" : "x") + std::to_string(i));
        auto prf = precision_recall_f(o, r);
        ok = ok && std::abs(prf.f - row.want) <= kFTolerance;
        detail += "P=" + fmt("%.3f", prf.precision) + " R=" + fmt("%.3f", prf.recall) + " F=" + fmt("%.4f", prf.f) +
                  " (want " + fmt("%.3f", row.want) + "); ";
    }
    double secs = seconds_since(t0);
    ok = ok && secs < kFRuntimeSec;
    return {ok, detail + fmt("%.3fs", secs)};
}

// ---------------------------------------------------------------- SmartIDs

struct Violations {
    size_t count = 0;
    std::string first;
    void add(const std::string& what) {
        if (count++ == 0) first = what;
    }
};

void smartid_checks(const OntologyGraph& g, bool exhaustive, Violations& v) {
    auto t = assign_smartids(g);
    std::ostringstream a, b;
    write_smartid_table(t, a);
    write_smartid_table(assign_smartids(g), b);
    if (a.str() != b.str()) v.add("nondeterministic table");

    std::set<std::string> seen;
    for (const auto& [id, p] : t.smart_ids())
        if (!seen.insert(p.rendered()).second) v.add("SmartID reused: " + p.rendered());
    if (t.size() != g.size()) v.add("missing classes");

    for (const auto& [id, p] : t.smart_ids()) {
        auto anc = ancestors(g, id);
        for (const auto& path : t.all_paths(id)) {
            if (t.try_resolve(path.rendered()) != id) v.add("path does not resolve: " + path.rendered());
            for (size_t k = 0; k < path.size(); ++k) {
                std::vector<std::string> prefix(path.tokens().begin(), path.tokens().begin() + k);
                auto owner = t.try_resolve(render(prefix));
                if (!owner) {
                    if (k > 0 || t.anchor()) v.add("unowned prefix " + render(prefix));
                } else if (!anc.count(*owner)) {
                    v.add(*owner + " is not an ancestor of " + id);
                }
            }
        }
    }
    if (!exhaustive) return;
    for (const auto& [id, walks] : all_walks(g)) {
        std::vector<PathId> want;
        for (const auto& w : walks) want.emplace_back(w);
        std::sort(want.begin(), want.end());
        size_t shortest = want.front().size();
        if (t.smart_id(id).size() != shortest) v.add("SmartID of " + id + " is not a shortest path");
        want.resize(std::min(want.size(), kDefaultPathCap));
        if (t.all_paths(id) != want) v.add("paths of " + id + " differ from exhaustive enumeration");
    }
}

Verdict smartid_suite() {
    auto t0 = Clock::now();
    SplitMix64 rng(20240601);
    Violations v;
    size_t exhaustive = 0, largest = 0;
    for (size_t i = 0; i < kSmartIdDags; ++i) {
        DagSpec spec;
        bool big = i % 10 == 9;
        spec.nodes = big ? kExhaustiveMaxNodes + 1 + rng.below(kSmartIdMaxNodes - kExhaustiveMaxNodes)
                         : 1 + rng.below(kExhaustiveMaxNodes);
        spec.roots = 1 + rng.below(std::min<size_t>(3, spec.nodes));
        spec.multi_parent = kMaxMultiParent * static_cast<double>(rng.below(1001)) / 1000.0;
        spec.labels_from_vocab = false;
        auto g = random_dag(rng, spec, "dag" + std::to_string(i));
        smartid_checks(g, !big, v);
        exhaustive += !big;
        largest = std::max(largest, spec.nodes);
    }
    double secs = seconds_since(t0);
    std::string detail = std::to_string(kSmartIdDags) + " DAGs (" + std::to_string(exhaustive) +
                         " exhaustive, largest " + std::to_string(largest) + " nodes), " + std::to_string(v.count) +
                         " violations";
    if (v.count) detail += " (first: " + v.first + ")";
    return {v.count == 0 && secs < kSmartIdRuntimeSec, detail + ", " + fmt("%.1fs", secs)};
}

// ---------------------------------------------------------------- decode oracle

// Source labels: half copied from the target with one character changed,
// half random phrases.
OntologyGraph perturbed_source(SplitMix64& rng, const OntologyGraph& target, size_t n, std::string id) {
    DagSpec spec;
    spec.nodes = n;
    spec.multi_parent = 0.2;
    auto base = random_dag(rng, spec, id);
    std::vector<std::string> target_labels;
    for (const auto& [tid, r] : target.classes()) target_labels.push_back(r.label);
    std::vector<ClassRecord> records;
    for (const auto& [sid, r] : base.classes()) {
        ClassRecord c = r;
        if (rng.below(2) == 0) {
            std::string l = target_labels[rng.below(target_labels.size())];
            size_t at = rng.below(l.size());
            l[at] = static_cast<char>('a' + rng.below(26));
            c.label = l;
        }
        records.push_back(std::move(c));
    }
    return OntologyGraph::from_records(std::move(id), std::move(records));
}

Verdict decode_oracle() {
    auto t0 = Clock::now();
    SplitMix64 rng(777);
    size_t queries = 0, agree = 0;
    std::string first;
    for (size_t i = 0; i < kDecodePairs; ++i) {
        DagSpec spec;
        spec.nodes = 20 + rng.below(kDecodeMaxTarget - 19);
        spec.roots = 1 + rng.below(3);
        spec.multi_parent = kMaxMultiParent * static_cast<double>(rng.below(1001)) / 1000.0;
        auto target = random_dag(rng, spec, "t" + std::to_string(i));
        auto source = perturbed_source(rng, target, 10 + rng.below(51), "s" + std::to_string(i));
        auto table = assign_smartids(target);
        auto trie = build_trie(table);
        TaskId task{"s2t", source.ontology_id(), target.ontology_id()};
        EditSimilarityTranslator tr;
        tr.register_target(task, target, table);
        for (const auto& [sid, r] : source.classes()) {
            auto got = decode(tr, trie, task, r.label).candidates.at(0).class_id;
            auto want = oracle_best_class(r.label, target, table);
            ++queries;
            if (got == want) {
                ++agree;
            } else if (first.empty()) {
                first = "'" + r.label + "': decode " + got + ", oracle " + want;
            }
        }
    }
    double secs = seconds_since(t0);
    std::string detail = std::to_string(agree) + "/" + std::to_string(queries) + " source classes agree over " +
                         std::to_string(kDecodePairs) + " pairs";
    if (!first.empty()) detail += " (first miss: " + first + ")";
    return {agree == queries && secs < kDecodeRuntimeSec, detail + ", " + fmt("%.1fs", secs)};
}

// ---------------------------------------------------------------- complexity

double fitted_exponent(const std::vector<double>& n, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (size_t i = 0; i < n.size(); ++i) {
        mx += std::log(n[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(n.size());
    my /= static_cast<double>(n.size());
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < n.size(); ++i) {
        double dx = std::log(n[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

Verdict complexity() {
    auto t0 = Clock::now();
    const size_t branching = 10, queries = 300, baseline_queries = 10;
    std::vector<double> sizes, mean_calls, mean_depth, baseline_calls;
    size_t depth_mismatch = 0;
    SplitMix64 rng(5150);
    for (size_t n : {100, 1000, 10000}) {
        auto target = balanced_tree(n, branching, rng, "tree");
        auto table = assign_smartids(target);
        auto trie = build_trie(table);
        TaskId task{"q2tree", "q", "tree"};
        EditSimilarityTranslator tr;
        tr.register_target(task, target, table);
        CountingTranslator counter(tr);

        std::vector<std::string> ids;
        for (const auto& [id, r] : target.classes()) ids.push_back(id);
        double calls = 0, depth = 0;
        for (size_t q = 0; q < queries; ++q) {
            const auto& id = ids[rng.below(ids.size())];
            counter.calls = 0;
            auto r = decode(counter, trie, task, target.at(id).label);
            const auto& c = r.candidates.at(0);
            bool inner = !trie.node(*trie.find(c.path)).children.empty();
            if (c.class_id != id || counter.calls != c.path.size() + (inner ? 1 : 0)) ++depth_mismatch;
            calls += static_cast<double>(counter.calls);
            depth += static_cast<double>(c.path.size());
        }

        // Linear scan: one score call per target class.
        CountingTranslator scan(tr);
        for (size_t q = 0; q < baseline_queries; ++q) {
            const std::string src = target.at(ids[rng.below(ids.size())]).label;
            for (const auto& [id, smart] : table.smart_ids()) {
                std::vector<std::string> prefix(smart.tokens().begin(), smart.tokens().end());
                std::vector<std::string> end{std::string(kEndToken)};
                if (prefix.empty()) {
                    scan.score_tokens(task, src, prefix, end);
                } else {
                    std::vector<std::string> last{prefix.back()};
                    prefix.pop_back();
                    scan.score_tokens(task, src, prefix, last);
                }
            }
        }
        sizes.push_back(static_cast<double>(n));
        mean_calls.push_back(calls / static_cast<double>(queries));
        mean_depth.push_back(depth / static_cast<double>(queries));
        baseline_calls.push_back(static_cast<double>(scan.calls) / static_cast<double>(baseline_queries));
    }
    double k = fitted_exponent(sizes, mean_calls), kb = fitted_exponent(sizes, baseline_calls);
    double secs = seconds_since(t0);
    std::string detail = "mean calls";
    for (size_t i = 0; i < sizes.size(); ++i)
        detail += " n=" + fmt("%.0f", sizes[i]) + ":" + fmt("%.2f", mean_calls[i]) + "/" +
                  fmt("%.2f", mean_calls[i] / std::log(sizes[i])) + "ln(n)";
    detail += "; fitted exponent " + fmt("%.3f", k) + " (limit " + fmt("%.2f", kMaxExponent) + "), linear scan " +
              fmt("%.3f", kb) + "; calls==depth violations " + std::to_string(depth_mismatch) + "; " +
              fmt("%.1fs", secs);
    return {depth_mismatch == 0 && k < kMaxExponent && secs < kComplexityRuntimeSec, detail};
}

// ---------------------------------------------------------------- Eq. 1

Verdict validation_score() {
    SplitMix64 rng(31337);
    TaskId task{"t", "s", "g"};
    size_t bad_exact = 0, bad_cosine = 0, bad_monotone = 0;
    const size_t fixtures = 1000;
    auto random_vec = [&](size_t dim) {
        std::vector<double> v(dim);
        for (auto& x : v) x = static_cast<double>(rng.below(2001)) / 1000.0 - 1.0;
        return v;
    };
    for (size_t i = 0; i < fixtures; ++i) {
        FakeTranslator fake;
        std::set<std::string> a, b;
        for (size_t k = 0, n = 1 + rng.below(4); k < n; ++k) a.insert("a" + std::to_string(rng.below(1000)));
        for (size_t k = 0, n = 1 + rng.below(4); k < n; ++k) b.insert("b" + std::to_string(rng.below(1000)));
        for (const auto& t : a) fake.vectors[t] = random_vec(4);
        for (const auto& t : b) fake.vectors[t] = random_vec(4);

        // disjoint: best clamped cosine, computed directly
        double want = 0.0;
        for (const auto& x : a)
            for (const auto& y : b) {
                const auto &u = fake.vectors[x], &v = fake.vectors[y];
                double dot = 0, nu = 0, nv = 0;
                for (size_t d = 0; d < 4; ++d) {
                    dot += u[d] * v[d];
                    nu += u[d] * u[d];
                    nv += v[d] * v[d];
                }
                if (nu > 0 && nv > 0) want = std::max(want, dot / std::sqrt(nu * nv));
            }
        want = std::min(want, 1.0);
        EmbeddingCache cache;
        auto disjoint = score_descriptions(fake, task, {"s", a}, {"t", b}, cache);
        if (disjoint.method != MatchMethod::Similarity || std::abs(disjoint.score - want) > 1e-12) ++bad_cosine;

        // intersecting: share one term
        std::string shared = *std::next(a.begin(), static_cast<long>(rng.below(a.size())));
        b.insert(shared);
        auto hit = score_descriptions(fake, task, {"s", a}, {"t", b}, cache);
        if (hit.method != MatchMethod::Exact || hit.score != 1.0) ++bad_exact;
    }

    const size_t pairs = 30;
    for (size_t i = 0; i < pairs; ++i) {
        DagSpec spec;
        spec.nodes = 10 + rng.below(120);
        spec.multi_parent = 0.3;
        auto target = random_dag(rng, spec, "g");
        auto source = perturbed_source(rng, target, 10 + rng.below(80), "s");
        auto table = assign_smartids(target);
        auto trie = build_trie(table);
        EditSimilarityTranslator tr;
        tr.register_target(task, target, table);
        std::set<std::pair<std::string, std::string>> prev;
        bool first = true;
        for (double tau : {0.0, 0.1, 0.3, 0.5, 0.7, 0.8, 0.9, 0.95, 0.99, 1.0}) {
            MatchConfig cfg;
            cfg.threshold = tau;
            std::set<std::pair<std::string, std::string>> cur;
            for (const auto& m : match_ontologies(source, target, table, trie, tr, task, cfg).mappings)
                cur.emplace(m.source_id, m.target_id);
            if (!first && !std::includes(prev.begin(), prev.end(), cur.begin(), cur.end())) ++bad_monotone;
            prev = std::move(cur);
            first = false;
        }
    }
    std::string detail = std::to_string(fixtures - bad_exact) + "/" + std::to_string(fixtures) +
                         " intersecting fixtures scored 1.0; " + std::to_string(fixtures - bad_cosine) + "/" +
                         std::to_string(fixtures) + " disjoint fixtures equal clamped max cosine; " +
                         std::to_string(bad_monotone) + " threshold-monotonicity violations over " +
                         std::to_string(pairs) + " ontology pairs";
    return {bad_exact == 0 && bad_cosine == 0 && bad_monotone == 0, detail};
}

// ---------------------------------------------------------------- masking

Verdict masking_schedule() {
    // A toy epoch: 1000 steps, each instance a 200-unit record.
    const size_t steps = 1000, units = 200;
    const uint64_t seed = 42;
    MaskingSchedule schedule{0.10, 0.35, steps};
    std::vector<std::string> record;
    for (size_t i = 0; i < units; ++i) record.push_back("u" + std::to_string(i));
    double worst = 0.0, prev = -1.0;
    bool monotone = true;
    std::string fractions;
    for (size_t d = 0; d < 10; ++d) {
        size_t lo = d * steps / 10, hi = (d + 1) * steps / 10;
        double masked = 0, total = 0, scheduled = 0;
        for (size_t s = lo; s < hi; ++s) {
            double r = masking_ratio(s, schedule);
            auto m = mask_instance(record, r, mix_seed(seed, s));
            masked += static_cast<double>(m.masked);
            total += static_cast<double>(m.units);
            scheduled += r;
        }
        double realized = masked / total;
        scheduled /= static_cast<double>(hi - lo);
        worst = std::max(worst, std::abs(realized - scheduled));
        monotone = monotone && realized >= prev;
        prev = realized;
        fractions += fmt(d ? " %.4f" : "%.4f", realized);
    }
    return {worst <= kMaskTolerance && monotone,
            "decile fractions " + fractions + "; max deviation " + fmt("%.4f", worst) + " (limit " +
                fmt("%.2f", kMaskTolerance) + ")"};
}

// ---------------------------------------------------------------- metrics

Verdict metric_suite() {
    SplitMix64 rng(4242);
    size_t mismatches = 0, bound_violations = 0;
    for (size_t f = 0; f < kMetricFixtures; ++f) {
        size_t n_src = 1 + rng.below(80), n_tgt = 1 + rng.below(80);
        std::vector<std::tuple<std::string, std::string, double>> out_v, ref_v;
        MappingSet out, ref;
        for (size_t i = 0, n = 1 + rng.below(200); i < n; ++i) {
            std::string s = "s" + std::to_string(rng.below(n_src)), t = "t" + std::to_string(rng.below(n_tgt));
            double sc = static_cast<double>(rng.below(11)) / 10.0;
            if (out.add(s, t, sc)) out_v.emplace_back(s, t, sc);
        }
        for (size_t i = 0, n = 1 + rng.below(200); i < n; ++i) {
            std::string s = "s" + std::to_string(rng.below(n_src)), t = "t" + std::to_string(rng.below(n_tgt));
            if (ref.add(s, t)) ref_v.emplace_back(s, t, 1.0);
        }

        size_t inter = 0;
        for (const auto& [s, t, x] : out_v)
            for (const auto& [rs, rt, y] : ref_v) inter += s == rs && t == rt;
        double P = static_cast<double>(inter) / static_cast<double>(out_v.size());
        double R = static_cast<double>(inter) / static_cast<double>(ref_v.size());
        double F = P + R > 0 ? 2 * P * R / (P + R) : 0.0;
        auto prf = precision_recall_f(out, ref);
        if (std::abs(prf.precision - P) > kMetricTolerance || std::abs(prf.recall - R) > kMetricTolerance ||
            std::abs(prf.f - F) > kMetricTolerance)
            ++mismatches;

        // accuracy from the best-scored output per source (ties: smallest target)
        std::map<std::string, std::pair<double, std::string>> best;
        for (const auto& [s, t, x] : out_v) {
            auto it = best.find(s);
            if (it == best.end() || x > it->second.first || (x == it->second.first && t < it->second.second))
                best[s] = {x, t};
        }
        std::map<std::string, std::string> preds;
        for (const auto& [s, bt] : best) preds[s] = bt.second;
        size_t right = 0;
        for (const auto& [s, t, y] : ref_v) right += best.count(s) && best[s].second == t;
        if (std::abs(accuracy(preds, ref) - static_cast<double>(right) / static_cast<double>(ref_v.size())) >
            kMetricTolerance)
            ++mismatches;

        // ranking
        size_t negs = 1 + rng.below(100);
        std::vector<RankingCase> cases;
        std::vector<size_t> ranks;
        for (size_t i = 0, n = 1 + rng.below(60); i < n; ++i) {
            RankingCase c;
            c.source_id = "s" + std::to_string(i);
            c.reference_target_id = "t" + std::to_string(rng.below(300));
            c.reference_score = static_cast<double>(rng.below(7)) / 6.0;
            std::vector<std::pair<double, std::string>> all{{*c.reference_score, c.reference_target_id}};
            for (size_t j = 0; j < negs; ++j) {
                std::string id = "t" + std::to_string(rng.below(300));
                if (id == c.reference_target_id) continue;
                double sc = static_cast<double>(rng.below(7)) / 6.0;
                c.negative_targets.push_back(id);
                c.negative_scores.push_back(sc);
                all.emplace_back(sc, id);
            }
            std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
                return x.first != y.first ? x.first > y.first : x.second < y.second;
            });
            size_t rank = 0;
            for (size_t k = 0; k < all.size() && !rank; ++k)
                if (all[k].second == c.reference_target_id && all[k].first == *c.reference_score) rank = k + 1;
            ranks.push_back(rank);
            cases.push_back(std::move(c));
        }
        double recip = 0;
        for (size_t r : ranks) recip += 1.0 / static_cast<double>(r);
        double m = mrr(cases);
        if (std::abs(m - recip / static_cast<double>(ranks.size())) > kMetricTolerance) ++mismatches;
        double prev = 0.0;
        for (size_t k = 1; k <= negs + 1; ++k) {
            double h = hits_at_k(cases, k);
            double want = static_cast<double>(std::count_if(ranks.begin(), ranks.end(), [&](size_t r) { return r <= k; })) /
                          static_cast<double>(ranks.size());
            if (std::abs(h - want) > kMetricTolerance) ++mismatches;
            if (h < prev) ++bound_violations;
            prev = h;
        }
        if (hits_at_k(cases, negs + 1) != 1.0) ++bound_violations;
        if (m < 1.0 / static_cast<double>(negs + 1) || m > 1.0 || hits_at_k(cases, 1) > m) ++bound_violations;
    }
    return {mismatches == 0 && bound_violations == 0,
            std::to_string(kMetricFixtures) + " fixtures, " + std::to_string(mismatches) + " oracle mismatches (tol " +
                fmt("%.0e", kMetricTolerance) + "), " + std::to_string(bound_violations) + " bound violations"};
}

// ---------------------------------------------------------------- end to end

std::string cli() { return shell_quote(ONTOMAP_CLI_PATH); }

// Runs ingest -> smartids -> match -> eval on the bundled toy pair inside
// `dir` and returns the eval report, or an error description.
std::optional<std::string> run_pipeline(const std::string& dir, std::string& error) {
    const std::string toy = ONTOMAP_TOY_DIR;
    for (const char* f : {"source.jsonl", "target.jsonl", "reference.tsv", "ranking.tsv"})
        std::filesystem::copy_file(toy + "/" + f, dir + "/" + f, std::filesystem::copy_options::overwrite_existing);
    const std::vector<std::string> steps = {
        cli() + " ingest source.jsonl",
        cli() + " ingest target.jsonl",
        cli() + " smartids target.jsonl --out target.smartids.jsonl",
        cli() + " match --source source.jsonl --target target.jsonl --table target.smartids.jsonl --mode tm1"
                " --translator edit --out mapping.tsv --predictions-out predictions.tsv",
        cli() + " eval --mapping mapping.tsv --reference reference.tsv --predictions predictions.tsv"
                " --ranking ranking.tsv --source source.jsonl --target target.jsonl --out report.txt",
    };
    for (const auto& s : steps) {
        auto r = run(s, dir);
        if (r.status != 0) {
            error = "'" + s + "' exited " + std::to_string(r.status) + ": " + r.err;
            return std::nullopt;
        }
    }
    return read_file(dir + "/report.txt");
}

const std::string kGolden = std::string(ONTOMAP_TOY_DIR) + "/golden_report.txt";

Verdict end_to_end() {
    TempDir dir;
    auto t0 = Clock::now();
    std::string error;
    auto report = run_pipeline(dir.path.string(), error);
    double secs = seconds_since(t0);
    if (!report) return {false, error};
    std::string golden = read_file(kGolden);
    bool same = !golden.empty() && *report == golden;
    std::string detail = same ? "report matches golden_report.txt byte for byte" : "report differs from golden_report.txt";
    if (!same) {
        std::istringstream a(*report), b(golden);
        std::string la, lb;
        for (size_t n = 1;; ++n) {
            bool ga = static_cast<bool>(std::getline(a, la)), gb = static_cast<bool>(std::getline(b, lb));
            if (!ga && !gb) break;
            if (!ga || !gb || la != lb) {
                detail += " (line " + std::to_string(n) + ": got '" + (ga ? la : "<eof>") + "', golden '" +
                          (gb ? lb : "<eof>") + "')";
                break;
            }
        }
    }
    return {same && secs < kEndToEndRuntimeSec, detail + ", " + fmt("%.2fs", secs)};
}

int regenerate_golden() {
    TempDir dir;
    std::string error;
    auto report = run_pipeline(dir.path.string(), error);
    if (!report) {
        std::cerr << error << '\n';
        return 1;
    }
    write_file(kGolden, *report);
    std::cout << "wrote " << kGolden << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<std::string> only, allow_red;
    bool regenerate = false;
    app.add_option("--only", only, "Run only these criteria");
    app.add_option("--allow-red", allow_red, "Criteria whose failure does not fail the run");
    app.add_flag("--regenerate-golden", regenerate, "Rewrite the toy golden report and exit");
    CLI11_PARSE(app, argc, argv);
    if (regenerate) return regenerate_golden();

    struct Criterion {
        std::string name;
        std::function<Verdict()> run;
    };
    std::vector<Criterion> substitutes = {
        {"smartid_suite", smartid_suite},       {"decode_oracle", decode_oracle}, {"complexity", complexity},
        {"validation_score", validation_score}, {"masking_schedule", masking_schedule},
        {"metric_suite", metric_suite},         {"end_to_end_toy", end_to_end},
    };

    std::vector<std::pair<std::string, Verdict>> results;
    auto selected = [&](const std::string& name) {
        return only.empty() || std::find(only.begin(), only.end(), name) != only.end();
    };
    auto report = [&](const std::string& name, const Verdict& v) {
        std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
        results.emplace_back(name, v);
    };
    auto guarded = [](const std::function<Verdict()>& f) {
        try {
            return f();
        } catch (const std::exception& e) {
            return Verdict{false, std::string("threw: ") + e.what()};
        }
    };

    if (selected("f_score_fixtures")) report("f_score_fixtures", guarded(f_score_fixtures));
    std::vector<std::string> ran;
    for (const auto& c : substitutes) {
        if (!selected(c.name)) continue;
        report(c.name, guarded(c.run));
        ran.push_back(c.name);
    }
    if (selected("published_tables_substitution")) {
        // The published end-to-end tables need full-scale data and training;
        // this line records which property criteria stand in for them.
        size_t green = 0;
        for (const auto& [name, v] : results)
            if (std::find(ran.begin(), ran.end(), name) != ran.end() && v.pass) ++green;
        bool complete = ran.size() == substitutes.size();
        report("published_tables_substitution",
               {complete, "not desk-reproducible; " + std::to_string(ran.size()) + "/" +
                              std::to_string(substitutes.size()) + " substitute criteria ran, " +
                              std::to_string(green) + " green"});
    }

    int status = 0;
    for (const auto& [name, v] : results) {
        if (v.pass) continue;
        if (std::find(allow_red.begin(), allow_red.end(), name) != allow_red.end()) {
            std::cout << "note: " << name << " is red and listed in --allow-red" << std::endl;
            continue;
        }
        status = 1;
    }
    return status;
}
