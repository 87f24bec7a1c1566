#pragma once
// Deterministic stand-in for a trained translator.
//
// score_tokens gives each continuation the best normalized edit similarity
// between the source text and any description of a class reachable through
// it (the class itself for the end token). Because every step scores the
// best class in its subtree, greedy constrained decoding lands on the global
// edit-similarity argmax, which makes this the classic Edit-Similarity
// baseline when driven through decode(). embed is an L2-normalized hashed
// character-trigram count vector.

#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ontomap/error.hpp"
#include "ontomap/ontology.hpp"
#include "ontomap/smartid.hpp"
#include "ontomap/text.hpp"
#include "ontomap/translator.hpp"

namespace ontomap {

struct EditTranslatorOptions {
    size_t embed_dim = 2048;
    bool singularize = false;
};

class EditSimilarityTranslator : public Translator {
public:
    explicit EditSimilarityTranslator(EditTranslatorOptions opts = {}) : opts_(opts) {
        if (opts_.embed_dim == 0) throw Error(Errc::InvalidArgument, "embed_dim must be positive");
    }

    void register_target(const TaskId& task, const OntologyGraph& target, const SmartIdTable& table) {
        if (target.ontology_id() != task.target_ontology_id)
            throw Error(Errc::InvalidArgument, "task " + task.name + " targets " + task.target_ontology_id + ", not " +
                                                   target.ontology_id());
        Target t;
        t.trie = PathTrie::build(table);
        const DescriptionOptions dopts{opts_.singularize, true};
        for (const auto& [id, rec] : target.classes()) {
            t.class_index.emplace(id, t.descriptions.size());
            std::vector<std::u32string> terms;
            for (const auto& term : normalize_terms(rec, dopts)) terms.push_back(to_u32(term));
            t.descriptions.push_back(std::move(terms));
        }
        t.terminal_class.assign(t.trie.node_count(), kNone);
        for (size_t i = 0; i < t.trie.node_count(); ++i) {
            const auto& term = t.trie.node(i).terminal;
            if (term) t.terminal_class[i] = t.class_index.at(*term);
        }
        std::lock_guard lock(mutex_);
        targets_.insert_or_assign(task.name, std::move(t));
    }

    TranslatorInfo info() override { return {{"score_tokens", "embed"}, opts_.embed_dim, true}; }

    std::vector<double> score_tokens(const TaskId& task, std::string_view source, std::span<const std::string> prefix,
                                     std::span<const std::string> allowed) override {
        std::lock_guard lock(mutex_);
        Target& t = target(task);
        refresh(t, source);
        auto at = t.trie.find(prefix);
        if (!at) throw Error(Errc::InvalidArgument, "prefix is not in the target trie");
        std::vector<double> scores;
        scores.reserve(allowed.size());
        for (const auto& tok : allowed) {
            if (tok == kEndToken) {
                size_t cls = t.terminal_class[*at];
                if (cls == kNone) throw Error(Errc::InvalidArgument, "end token at a non-terminal prefix");
                scores.push_back(t.class_score[cls]);
            } else {
                auto next = t.trie.child(*at, tok);
                if (!next) throw Error(Errc::InvalidArgument, "token '" + tok + "' does not extend the prefix");
                scores.push_back(t.subtree_max[*next]);
            }
        }
        return scores;
    }

    std::vector<double> embed(const TaskId&, std::string_view text) override {
        return trigram_embedding(normalize_term(text), opts_.embed_dim);
    }

    const EditTranslatorOptions& options() const { return opts_; }

private:
    static constexpr size_t kNone = std::numeric_limits<size_t>::max();

    struct Target {
        PathTrie trie;
        std::unordered_map<std::string, size_t> class_index;
        std::vector<std::vector<std::u32string>> descriptions;
        std::vector<size_t> terminal_class;

        bool cached = false;
        std::string cached_source;
        std::vector<double> class_score;
        std::vector<double> subtree_max;
    };

    Target& target(const TaskId& task) {
        auto it = targets_.find(task.name);
        if (it == targets_.end()) throw Error(Errc::UnknownTask, task.name);
        return it->second;
    }

    static void refresh(Target& t, std::string_view source) {
        if (t.cached && t.cached_source == source) return;
        std::u32string src = to_u32(normalize_term(source));
        t.class_score.assign(t.descriptions.size(), 0.0);
        for (size_t c = 0; c < t.descriptions.size(); ++c) {
            double best = 0.0;
            for (const auto& d : t.descriptions[c]) best = std::max(best, edit_similarity(src, d));
            t.class_score[c] = best;
        }
        // Trie children are always created after their parent, so a reverse
        // sweep visits every child before the node itself.
        const double lowest = -std::numeric_limits<double>::infinity();
        t.subtree_max.assign(t.trie.node_count(), lowest);
        for (size_t i = t.trie.node_count(); i-- > 0;) {
            double best = t.terminal_class[i] == kNone ? lowest : t.class_score[t.terminal_class[i]];
            for (const auto& [tok, child] : t.trie.node(i).children) best = std::max(best, t.subtree_max[child]);
            t.subtree_max[i] = best;
        }
        t.cached_source.assign(source);
        t.cached = true;
    }

    EditTranslatorOptions opts_;
    std::map<std::string, Target> targets_;
    std::mutex mutex_;
};

} // namespace ontomap
