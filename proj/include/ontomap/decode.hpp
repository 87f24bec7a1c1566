#pragma once
// Trie-constrained decoding from a source description to a target path.
//
// At every trie node the translator only sees the node's child tokens (plus
// the end token when the node is itself a class), so every finished
// hypothesis is a valid path of the target ontology. Step probabilities are a
// temperature-scaled softmax over that allowed set; a hypothesis scores the
// product of its step probabilities.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ontomap/error.hpp"
#include "ontomap/smartid.hpp"
#include "ontomap/translator.hpp"

namespace ontomap {

enum class DecodeMode { Greedy, Beam };

struct DecodeConfig {
    DecodeMode mode = DecodeMode::Greedy;
    size_t beam_width = 4;
    double temperature = 1.0;
    size_t max_depth = 256;

    void validate() const {
        if (beam_width == 0) throw Error(Errc::InvalidArgument, "beam_width must be >= 1");
        if (!(temperature > 0.0) || !std::isfinite(temperature))
            throw Error(Errc::InvalidArgument, "temperature must be positive");
        if (max_depth == 0) throw Error(Errc::InvalidArgument, "max_depth must be >= 1");
    }
};

struct DecodeCandidate {
    std::string class_id;
    std::vector<std::string> path;
    double path_score = 0.0;

    std::string rendered() const { return PathId(path).rendered(); }
};

struct DecodeResult {
    std::vector<DecodeCandidate> candidates;
    // Number of score_tokens calls issued.
    size_t calls = 0;
};

// Log-probabilities of softmax(scores / temperature).
inline std::vector<double> log_softmax(std::span<const double> scores, double temperature) {
    std::vector<double> out(scores.size());
    if (scores.empty()) return out;
    double hi = *std::max_element(scores.begin(), scores.end()) / temperature;
    double sum = 0.0;
    for (size_t i = 0; i < scores.size(); ++i) {
        out[i] = scores[i] / temperature - hi;
        sum += std::exp(out[i]);
    }
    double log_sum = std::log(sum);
    for (double& x : out) x -= log_sum;
    return out;
}

namespace detail {

struct StepOptions {
    std::vector<std::string> tokens;
    std::vector<size_t> next;  // trie node per token; PathTrie::kRoot marks the end token
    bool has_end = false;
};

// End token first, then children in token order; argmax ties resolve in this order.
inline StepOptions step_options(const PathTrie& trie, size_t at) {
    StepOptions opts;
    const auto& node = trie.node(at);
    if (node.terminal) {
        opts.tokens.emplace_back(kEndToken);
        opts.next.push_back(PathTrie::kRoot);
        opts.has_end = true;
    }
    for (const auto& [tok, child] : node.children) {
        opts.tokens.push_back(tok);
        opts.next.push_back(child);
    }
    return opts;
}

inline std::vector<double> checked_scores(Translator& translator, const TaskId& task, std::string_view source,
                                          std::span<const std::string> prefix,
                                          std::span<const std::string> allowed) {
    std::vector<double> scores;
    try {
        scores = translator.score_tokens(task, source, prefix, allowed);
    } catch (const Error& e) {
        if (e.code() == Errc::TranslatorError) throw;
        throw Error(Errc::TranslatorError, e.what());
    } catch (const std::exception& e) {
        throw Error(Errc::TranslatorError, e.what());
    }
    if (scores.size() != allowed.size())
        throw Error(Errc::TranslatorError, "expected " + std::to_string(allowed.size()) + " scores, got " +
                                               std::to_string(scores.size()));
    for (double s : scores)
        if (!std::isfinite(s)) throw Error(Errc::TranslatorError, "non-finite token score");
    return scores;
}

inline void check_target(const PathTrie& trie, const TaskId& task) {
    if (trie.empty()) throw Error(Errc::EmptyTargetSpace, "target trie has no paths");
    if (!trie.ontology_id().empty() && trie.ontology_id() != task.target_ontology_id)
        throw Error(Errc::InvalidArgument,
                    "trie is for " + trie.ontology_id() + ", task " + task.name + " targets " + task.target_ontology_id);
}

inline DecodeResult greedy(Translator& translator, const PathTrie& trie, const TaskId& task, std::string_view source,
                           const DecodeConfig& config) {
    DecodeResult result;
    std::vector<std::string> prefix;
    size_t at = PathTrie::kRoot;
    double log_score = 0.0;
    while (true) {
        const auto& node = trie.node(at);
        bool must_stop = node.children.empty() || prefix.size() >= config.max_depth;
        if (must_stop) {
            if (node.terminal) result.candidates.push_back({*node.terminal, prefix, std::exp(log_score)});
            return result;
        }
        StepOptions opts = step_options(trie, at);
        auto scores = checked_scores(translator, task, source, prefix, opts.tokens);
        ++result.calls;
        auto logp = log_softmax(scores, config.temperature);
        size_t best = 0;
        for (size_t i = 1; i < scores.size(); ++i)
            if (scores[i] > scores[best]) best = i;
        log_score += logp[best];
        if (opts.has_end && best == 0) {
            result.candidates.push_back({*node.terminal, prefix, std::exp(log_score)});
            return result;
        }
        prefix.push_back(opts.tokens[best]);
        at = opts.next[best];
    }
}

struct Hypothesis {
    size_t node = PathTrie::kRoot;
    std::vector<std::string> prefix;
    double log_score = 0.0;
    bool finished = false;
};

inline bool better(const Hypothesis& a, const Hypothesis& b) {
    if (a.log_score != b.log_score) return a.log_score > b.log_score;
    if (a.prefix != b.prefix) return a.prefix < b.prefix;
    return a.finished && !b.finished;
}

inline DecodeResult beam(Translator& translator, const PathTrie& trie, const TaskId& task, std::string_view source,
                         const DecodeConfig& config) {
    DecodeResult result;
    std::vector<Hypothesis> active{Hypothesis{}};
    std::vector<Hypothesis> finished;
    while (!active.empty()) {
        std::vector<Hypothesis> pool;
        for (auto& h : active) {
            const auto& node = trie.node(h.node);
            if (node.children.empty() || h.prefix.size() >= config.max_depth) {
                if (node.terminal) {
                    h.finished = true;
                    finished.push_back(std::move(h));
                }
                continue;
            }
            StepOptions opts = step_options(trie, h.node);
            auto scores = checked_scores(translator, task, source, h.prefix, opts.tokens);
            ++result.calls;
            auto logp = log_softmax(scores, config.temperature);
            for (size_t i = 0; i < opts.tokens.size(); ++i) {
                Hypothesis next{h.node, h.prefix, h.log_score + logp[i], false};
                if (opts.has_end && i == 0) {
                    next.finished = true;
                } else {
                    next.node = opts.next[i];
                    next.prefix.push_back(opts.tokens[i]);
                }
                pool.push_back(std::move(next));
            }
        }
        std::sort(pool.begin(), pool.end(), better);
        if (pool.size() > config.beam_width) pool.resize(config.beam_width);
        active.clear();
        for (auto& h : pool) (h.finished ? finished : active).push_back(std::move(h));
    }
    std::sort(finished.begin(), finished.end(), better);
    std::vector<std::string> seen;
    for (const auto& h : finished) {
        const std::string& cls = *trie.node(h.node).terminal;
        if (std::find(seen.begin(), seen.end(), cls) != seen.end()) continue;
        seen.push_back(cls);
        result.candidates.push_back({cls, h.prefix, std::exp(h.log_score)});
    }
    return result;
}

} // namespace detail

// Candidates sorted by path_score, best first. Greedy yields at most one.
inline DecodeResult decode(Translator& translator, const PathTrie& trie, const TaskId& task, std::string_view source,
                           const DecodeConfig& config = {}) {
    config.validate();
    if (source.empty()) throw Error(Errc::InvalidArgument, "source text must not be empty");
    detail::check_target(trie, task);
    if (config.mode == DecodeMode::Greedy) return detail::greedy(translator, trie, task, source, config);
    return detail::beam(translator, trie, task, source, config);
}

} // namespace ontomap
