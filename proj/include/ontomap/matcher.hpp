#pragma once
// Zero-shot matching: predict a target class by constrained decoding, then
// validate the pair.
//
// Validation score for a source class o1 and predicted class o2:
//   1                                    if their description sets intersect
//   max cosine over description pairs    otherwise (clamped to [0, 1])
// Pairs scoring strictly above the threshold are kept.

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "ontomap/decode.hpp"
#include "ontomap/error.hpp"
#include "ontomap/ontology.hpp"
#include "ontomap/provenance.hpp"
#include "ontomap/smartid.hpp"
#include "ontomap/text.hpp"
#include "ontomap/translator.hpp"

namespace ontomap {

enum class MatchMethod { Exact, Similarity, Greedy };

inline std::string_view method_name(MatchMethod m) {
    switch (m) {
        case MatchMethod::Exact: return "exact";
        case MatchMethod::Similarity: return "similarity";
        case MatchMethod::Greedy: return "greedy";
    }
    return "unknown";
}

struct ScoredMapping {
    std::string source_id;
    std::string target_id;
    double score = 0.0;
    MatchMethod method = MatchMethod::Similarity;

    bool operator==(const ScoredMapping&) const = default;
};

inline std::optional<double> exact_match(const DescriptionSet& a, const DescriptionSet& b) {
    const auto& small = a.terms.size() <= b.terms.size() ? a.terms : b.terms;
    const auto& large = a.terms.size() <= b.terms.size() ? b.terms : a.terms;
    for (const auto& t : small)
        if (large.count(t)) return 1.0;
    return std::nullopt;
}

// Memoizes translator embeddings per (task, text).
class EmbeddingCache {
public:
    const std::vector<double>& get(Translator& translator, const TaskId& task, const std::string& text) {
        auto key = task.name + '\x1f' + text;
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        std::vector<double> v;
        try {
            v = translator.embed(task, text);
        } catch (const Error& e) {
            if (e.code() == Errc::TranslatorError) throw;
            throw Error(Errc::TranslatorError, e.what());
        } catch (const std::exception& e) {
            throw Error(Errc::TranslatorError, e.what());
        }
        if (v.empty()) throw Error(Errc::TranslatorError, "empty embedding");
        if (dim_ == 0) dim_ = v.size();
        if (v.size() != dim_) throw Error(Errc::TranslatorError, "embedding dimension changed");
        return cache_.emplace(std::move(key), std::move(v)).first->second;
    }

private:
    std::unordered_map<std::string, std::vector<double>> cache_;
    size_t dim_ = 0;
};

inline double similarity_score(Translator& translator, const TaskId& task, const DescriptionSet& a,
                               const DescriptionSet& b, EmbeddingCache& cache) {
    double best = 0.0;
    for (const auto& s : a.terms) {
        const auto& u = cache.get(translator, task, s);
        for (const auto& t : b.terms) {
            const auto& v = cache.get(translator, task, t);
            best = std::max(best, cosine(u, v));
        }
    }
    return std::clamp(best, 0.0, 1.0);
}

inline double similarity_score(Translator& translator, const TaskId& task, const DescriptionSet& a,
                               const DescriptionSet& b) {
    EmbeddingCache cache;
    return similarity_score(translator, task, a, b, cache);
}

inline ScoredMapping score_descriptions(Translator& translator, const TaskId& task, const DescriptionSet& source,
                                        const DescriptionSet& predicted, EmbeddingCache& cache) {
    if (auto hit = exact_match(source, predicted)) return {source.owner, predicted.owner, *hit, MatchMethod::Exact};
    return {source.owner, predicted.owner, similarity_score(translator, task, source, predicted, cache),
            MatchMethod::Similarity};
}

inline ScoredMapping score_mapping(Translator& translator, const TaskId& task, std::string_view source_class,
                                   std::string_view predicted_class, const OntologyGraph& source_graph,
                                   const OntologyGraph& target_graph, bool singularize = true) {
    EmbeddingCache cache;
    return score_descriptions(translator, task, description_set(source_graph, source_class, singularize),
                              description_set(target_graph, predicted_class, singularize), cache);
}

enum class ScoringMode { TM1, TM2 };

struct MatchConfig {
    DecodeConfig decode;
    double threshold = 0.80;
    // TM1: validation score (exact match, else embedding similarity).
    // TM2: greedy search path score.
    ScoringMode scoring = ScoringMode::TM1;
    bool singularize = true;
    // In beam mode, try lower-ranked candidates when the best one misses the threshold.
    bool beam_fallback = false;
};

struct MatchFailure {
    std::string source_id;
    std::string message;
};

struct MatchResult {
    // Pairs above the threshold, sorted by (source_id, target_id).
    std::vector<ScoredMapping> mappings;
    // Top-1 prediction for every source class, regardless of threshold.
    std::vector<ScoredMapping> predictions;
    std::vector<MatchFailure> failures;
    size_t decode_calls = 0;
};

inline MatchResult match_ontologies(const OntologyGraph& source, const OntologyGraph& target,
                                    const SmartIdTable& table, const PathTrie& trie, Translator& translator,
                                    const TaskId& task, const MatchConfig& config) {
    if (source.ontology_id() != task.source_ontology_id || target.ontology_id() != task.target_ontology_id ||
        table.ontology_id() != target.ontology_id())
        throw Error(Errc::InvalidArgument, "ontologies do not match task " + task.name);
    config.decode.validate();
    detail::check_target(trie, task);

    MatchResult result;
    EmbeddingCache cache;
    std::map<std::string, DescriptionSet> target_sets;
    auto target_set = [&](const std::string& id) -> const DescriptionSet& {
        auto it = target_sets.find(id);
        if (it == target_sets.end()) it = target_sets.emplace(id, description_set(target, id, config.singularize)).first;
        return it->second;
    };

    for (const auto& [sid, rec] : source.classes()) {
        try {
            DecodeResult decoded = decode(translator, trie, task, rec.label, config.decode);
            result.decode_calls += decoded.calls;
            if (decoded.candidates.empty()) {
                result.failures.push_back({sid, "no candidate within max_depth"});
                continue;
            }
            DescriptionSet source_set = description_set(source, sid, config.singularize);
            size_t tries = config.decode.mode == DecodeMode::Beam && config.beam_fallback ? decoded.candidates.size() : 1;
            for (size_t i = 0; i < tries; ++i) {
                const DecodeCandidate& cand = decoded.candidates[i];
                ScoredMapping m;
                if (config.scoring == ScoringMode::TM2) {
                    m = {sid, cand.class_id, std::clamp(cand.path_score, 0.0, 1.0), MatchMethod::Greedy};
                } else {
                    m = score_descriptions(translator, task, source_set, target_set(cand.class_id), cache);
                }
                if (i == 0) result.predictions.push_back(m);
                if (m.score > config.threshold) {
                    result.mappings.push_back(std::move(m));
                    break;
                }
            }
        } catch (const Error& e) {
            if (e.code() != Errc::TranslatorError) throw;
            result.failures.push_back({sid, e.what()});
        }
    }
    auto by_pair = [](const ScoredMapping& a, const ScoredMapping& b) {
        return std::tie(a.source_id, a.target_id) < std::tie(b.source_id, b.target_id);
    };
    std::sort(result.mappings.begin(), result.mappings.end(), by_pair);
    std::sort(result.predictions.begin(), result.predictions.end(), by_pair);
    return result;
}

// Scores for ranking: reference/negative candidates against one source class.
inline std::vector<double> score_candidates(Translator& translator, const TaskId& task, const OntologyGraph& source,
                                            const OntologyGraph& target, std::string_view source_id,
                                            std::span<const std::string> candidates, bool exact_override,
                                            bool singularize, EmbeddingCache& cache) {
    DescriptionSet src = description_set(source, source_id, singularize);
    std::vector<double> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) {
        DescriptionSet tgt = description_set(target, c, singularize);
        if (exact_override && exact_match(src, tgt)) {
            out.push_back(1.0);
        } else {
            out.push_back(similarity_score(translator, task, src, tgt, cache));
        }
    }
    return out;
}

inline std::string format_score(double score) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", score);
    return buf;
}

// Tab-separated SrcEntity, TgtEntity, Score with one header line.
inline void write_mappings(std::span<const ScoredMapping> mappings, std::ostream& out,
                           const Provenance* provenance = nullptr) {
    if (provenance) write_tsv_provenance(out, *provenance);
    out << "SrcEntity\tTgtEntity\tScore\n";
    for (const auto& m : mappings) out << m.source_id << '\t' << m.target_id << '\t' << format_score(m.score) << '\n';
}

} // namespace ontomap
