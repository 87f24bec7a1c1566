#pragma once
// Training corpora: masked relation records for pre-training and
// description -> SmartID pairs for fine-tuning.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ontomap/error.hpp"
#include "ontomap/ontology.hpp"
#include "ontomap/provenance.hpp"
#include "ontomap/smartid.hpp"

namespace ontomap {

// splitmix64; fully specified so corpora are identical across platforms.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n).
    uint64_t below(uint64_t n) {
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

private:
    uint64_t state_;
};

inline uint64_t mix_seed(uint64_t seed, uint64_t step) {
    SplitMix64 a(seed ^ (step * 0xd1342543de82ef95ULL));
    return a.next();
}

struct MaskingSchedule {
    double start_ratio = 0.10;
    double end_ratio = 0.35;
    size_t total_steps = 1;

    void validate() const {
        if (!(start_ratio > 0.0 && start_ratio <= end_ratio && end_ratio < 1.0))
            throw Error(Errc::InvalidArgument, "masking schedule needs 0 < start <= end < 1");
        if (total_steps == 0) throw Error(Errc::InvalidArgument, "masking schedule needs total_steps >= 1");
    }
};

// Linear ramp from start_ratio at step 0 to end_ratio at the final step.
inline double masking_ratio(size_t step, const MaskingSchedule& schedule) {
    schedule.validate();
    if (step >= schedule.total_steps)
        throw Error(Errc::StepOutOfRange,
                    "step " + std::to_string(step) + " not below " + std::to_string(schedule.total_steps));
    if (schedule.total_steps == 1) return schedule.start_ratio;
    double t = static_cast<double>(step) / static_cast<double>(schedule.total_steps - 1);
    return schedule.start_ratio + (schedule.end_ratio - schedule.start_ratio) * t;
}

inline size_t mask_count(double ratio, size_t units) {
    auto k = static_cast<size_t>(std::llround(ratio * static_cast<double>(units)));
    return std::clamp<size_t>(k, 1, units);
}

inline std::string sentinel(size_t i) { return "<m" + std::to_string(i) + ">"; }

struct Segment {
    std::string text;
    bool maskable = true;
};

struct MaskedText {
    std::string input;
    std::string target;
    size_t masked = 0;
    size_t units = 0;

    bool operator==(const MaskedText&) const = default;
};

// Replaces max(1, round(ratio * maskable)) maskable segments with sentinels
// <m0>, <m1>, ... in order of appearance. Segments are joined by spaces.
inline MaskedText mask_segments(std::span<const Segment> segments, double ratio, uint64_t seed) {
    std::vector<size_t> maskable;
    for (size_t i = 0; i < segments.size(); ++i)
        if (segments[i].maskable) maskable.push_back(i);
    if (maskable.empty()) throw Error(Errc::EmptyInstance, "no maskable units");
    if (!(ratio > 0.0 && ratio < 1.0)) throw Error(Errc::InvalidArgument, "mask ratio must be in (0, 1)");

    size_t k = mask_count(ratio, maskable.size());
    SplitMix64 rng(seed);
    for (size_t i = 0; i < k; ++i) {
        size_t j = i + static_cast<size_t>(rng.below(maskable.size() - i));
        std::swap(maskable[i], maskable[j]);
    }
    std::vector<bool> hidden(segments.size(), false);
    for (size_t i = 0; i < k; ++i) hidden[maskable[i]] = true;

    MaskedText out;
    out.masked = k;
    out.units = maskable.size();
    size_t next = 0;
    for (size_t i = 0; i < segments.size(); ++i) {
        if (i) out.input += ' ';
        if (hidden[i]) {
            std::string tag = sentinel(next++);
            out.input += tag;
            if (!out.target.empty()) out.target += ' ';
            out.target += tag + ' ' + segments[i].text;
        } else {
            out.input += segments[i].text;
        }
    }
    return out;
}

inline MaskedText mask_instance(std::span<const std::string> units, double ratio, uint64_t seed) {
    if (units.empty()) throw Error(Errc::EmptyInstance, "no units to mask");
    std::vector<Segment> segments;
    segments.reserve(units.size());
    for (const auto& u : units) segments.push_back({u, true});
    return mask_segments(segments, ratio, seed);
}

struct CorpusInstance {
    std::string task_tag;
    std::string ontology;
    std::string input_text;
    std::string target_text;
    // Masking bookkeeping for pre-training records; zero for fine-tuning.
    size_t masked_units = 0;
    size_t unit_count = 0;

    bool operator==(const CorpusInstance&) const = default;
};

enum class PretrainTemplate {
    ChildParent,
    SmartIdSynonymId,
    LabelSmartId,
    SynonymSmartId,
    DefinitionSmartId,
    LabelSynonym,
};

inline constexpr std::array<PretrainTemplate, 6> kPretrainTemplates = {
    PretrainTemplate::ChildParent,    PretrainTemplate::SmartIdSynonymId,  PretrainTemplate::LabelSmartId,
    PretrainTemplate::SynonymSmartId, PretrainTemplate::DefinitionSmartId, PretrainTemplate::LabelSynonym,
};

inline std::string_view template_name(PretrainTemplate t) {
    switch (t) {
        case PretrainTemplate::ChildParent: return "child_parent";
        case PretrainTemplate::SmartIdSynonymId: return "smartid_synonymid";
        case PretrainTemplate::LabelSmartId: return "label_smartid";
        case PretrainTemplate::SynonymSmartId: return "synonym_smartid";
        case PretrainTemplate::DefinitionSmartId: return "definition_smartid";
        case PretrainTemplate::LabelSynonym: return "label_synonym";
    }
    return "unknown";
}

namespace detail {

// "<a>: <x> | <b>: <y>"; field keywords and values are maskable, the bar is not.
inline std::vector<Segment> relation(std::string_view field_a, std::string value_a, std::string_view field_b,
                                     std::string value_b) {
    return {
        {std::string(field_a) + ":", true},
        {std::move(value_a), true},
        {"|", false},
        {std::string(field_b) + ":", true},
        {std::move(value_b), true},
    };
}

struct PendingRecord {
    std::string tag;
    std::string ontology;
    std::vector<Segment> segments;
};

inline void class_records(const OntologyGraph& graph, const SmartIdTable& table, const ClassRecord& rec,
                          std::vector<PendingRecord>& out) {
    const std::string& onto = graph.ontology_id();
    const PathId& smart = table.smart_id(rec.class_id);
    const bool has_id = !smart.empty();
    auto emit = [&](PretrainTemplate t, std::vector<Segment> segs) {
        out.push_back({"pretrain:" + std::string(template_name(t)), onto, std::move(segs)});
    };
    for (PretrainTemplate t : kPretrainTemplates) {
        switch (t) {
            case PretrainTemplate::ChildParent:
                for (const auto& p : rec.parents) emit(t, relation("child", rec.label, "parent", graph.at(p).label));
                break;
            case PretrainTemplate::SmartIdSynonymId:
                for (const auto& syn : table.synonym_ids(rec.class_id))
                    emit(t, relation("smartid", smart.rendered(), "synonymid", syn.rendered()));
                break;
            case PretrainTemplate::LabelSmartId:
                if (has_id) emit(t, relation("label", rec.label, "smartid", smart.rendered()));
                break;
            case PretrainTemplate::SynonymSmartId:
                if (has_id)
                    for (const auto& s : rec.synonyms) emit(t, relation("synonym", s, "smartid", smart.rendered()));
                break;
            case PretrainTemplate::DefinitionSmartId:
                if (has_id)
                    for (const auto& d : rec.definitions)
                        emit(t, relation("definition", d, "smartid", smart.rendered()));
                break;
            case PretrainTemplate::LabelSynonym:
                for (const auto& s : rec.synonyms) emit(t, relation("label", rec.label, "synonym", s));
                break;
        }
    }
}

} // namespace detail

// One masked record per relation per class, ordered by (ontology, class_id,
// template, index). The record at position i uses masking_ratio(i) over the
// whole corpus, so the mask share ramps across the epoch.
inline std::vector<CorpusInstance> build_pretrain_corpus(std::span<const OntologyGraph> graphs,
                                                         std::span<const SmartIdTable> tables,
                                                         MaskingSchedule schedule, uint64_t seed) {
    if (graphs.size() != tables.size()) throw Error(Errc::InvalidArgument, "need one SmartID table per graph");
    std::vector<size_t> order(graphs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return graphs[a].ontology_id() < graphs[b].ontology_id(); });

    std::vector<detail::PendingRecord> pending;
    for (size_t gi : order) {
        if (tables[gi].ontology_id() != graphs[gi].ontology_id())
            throw Error(Errc::InvalidArgument, "table " + tables[gi].ontology_id() + " does not belong to " +
                                                   graphs[gi].ontology_id());
        for (const auto& [id, rec] : graphs[gi].classes()) detail::class_records(graphs[gi], tables[gi], rec, pending);
    }

    std::vector<CorpusInstance> out;
    if (pending.empty()) return out;
    schedule.total_steps = pending.size();
    schedule.validate();
    out.reserve(pending.size());
    for (size_t step = 0; step < pending.size(); ++step) {
        auto& rec = pending[step];
        MaskedText m = mask_segments(rec.segments, masking_ratio(step, schedule), mix_seed(seed, step));
        out.push_back({std::move(rec.tag), std::move(rec.ontology), std::move(m.input), std::move(m.target),
                       m.masked, m.units});
    }
    return out;
}

struct AugmentationConfig {
    // Other subset ontologies whose exact-matching classes donate descriptions.
    std::vector<OntologyGraph> cross_subset_sources;
    // Older releases of the target ontologies, matched by class_id.
    std::vector<OntologyGraph> prior_versions;
    bool cross_subset_enabled = true;
    bool prior_versions_enabled = true;
};

struct FinetuneCorpus {
    std::vector<CorpusInstance> instances;
    std::vector<std::string> warnings;
};

// For every target class with a non-empty SmartID: one instance per label,
// synonym and augmented description, each translating to the SmartID.
inline FinetuneCorpus build_finetune_corpus(std::span<const OntologyGraph> targets,
                                            std::span<const SmartIdTable> tables,
                                            const AugmentationConfig& augmentation = {}) {
    if (targets.size() != tables.size()) throw Error(Errc::InvalidArgument, "need one SmartID table per target");
    FinetuneCorpus out;
    const DescriptionOptions norm{false, true};

    std::vector<size_t> order(targets.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return targets[a].ontology_id() < targets[b].ontology_id(); });

    for (size_t ti : order) {
        const OntologyGraph& target = targets[ti];
        const SmartIdTable& table = tables[ti];
        if (table.ontology_id() != target.ontology_id())
            throw Error(Errc::InvalidArgument, "table " + table.ontology_id() + " does not belong to " +
                                                   target.ontology_id());
        const std::string tag = "finetune:" + target.ontology_id();

        // normalized term -> donating classes, per cross-subset source
        std::vector<std::pair<const OntologyGraph*, std::map<std::string, std::set<std::string>>>> cross;
        if (augmentation.cross_subset_enabled) {
            for (const auto& src : augmentation.cross_subset_sources) {
                if (src.ontology_id() == target.ontology_id()) {
                    out.warnings.push_back("cross-subset source " + src.ontology_id() + " is the target itself; skipped");
                    continue;
                }
                std::map<std::string, std::set<std::string>> index;
                for (const auto& [id, rec] : src.classes())
                    for (const auto& term : normalize_terms(rec, norm)) index[term].insert(id);
                cross.emplace_back(&src, std::move(index));
            }
        }
        std::vector<const OntologyGraph*> priors;
        if (augmentation.prior_versions_enabled) {
            for (const auto& prior : augmentation.prior_versions) {
                if (prior.ontology_id() != target.ontology_id()) continue;
                priors.push_back(&prior);
                for (const auto& [id, rec] : prior.classes())
                    if (!target.contains(id))
                        out.warnings.push_back("prior version of " + prior.ontology_id() + ": class " + id +
                                               " missing from current release");
            }
        }

        for (const auto& [id, rec] : target.classes()) {
            const PathId& smart = table.smart_id(id);
            if (smart.empty()) continue;
            const std::string rendered = smart.rendered();

            std::vector<std::string> descriptions{rec.label};
            descriptions.insert(descriptions.end(), rec.synonyms.begin(), rec.synonyms.end());
            std::set<std::string> seen;
            for (const auto& d : descriptions) seen.insert(normalize_term(d));
            const std::set<std::string> own = seen;

            auto donate = [&](const ClassRecord& donor) {
                std::vector<std::string> terms{donor.label};
                terms.insert(terms.end(), donor.synonyms.begin(), donor.synonyms.end());
                for (const auto& t : terms) {
                    std::string n = normalize_term(t);
                    if (!n.empty() && seen.insert(n).second) descriptions.push_back(t);
                }
            };
            for (const OntologyGraph* prior : priors)
                if (prior->contains(id)) donate(prior->at(id));
            for (const auto& [src, index] : cross) {
                std::set<std::string> donors;
                for (const auto& term : own) {
                    auto it = index.find(term);
                    if (it != index.end()) donors.insert(it->second.begin(), it->second.end());
                }
                for (const auto& donor : donors) donate(src->at(donor));
            }

            for (const auto& d : descriptions) {
                std::string text = trim(d);
                if (text.empty()) continue;
                out.instances.push_back({tag, target.ontology_id(), std::move(text), rendered, 0, 0});
            }
        }
    }
    return out;
}

inline void write_corpus(std::span<const CorpusInstance> instances, std::ostream& out) {
    for (const auto& inst : instances) {
        nlohmann::ordered_json j;
        j["task_tag"] = inst.task_tag;
        j["ontology"] = inst.ontology;
        j["input"] = inst.input_text;
        j["target"] = inst.target_text;
        out << j.dump() << '\n';
    }
}

inline std::map<std::string, size_t> count_by_tag(std::span<const CorpusInstance> instances) {
    std::map<std::string, size_t> counts;
    for (const auto& inst : instances) ++counts[inst.task_tag];
    return counts;
}

} // namespace ontomap
