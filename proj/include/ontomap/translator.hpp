#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ontomap/error.hpp"

namespace ontomap {

// Names one alignment direction, e.g. {"snomed2fma_body", "snomed", "fma_body"}.
struct TaskId {
    std::string name;
    std::string source_ontology_id;
    std::string target_ontology_id;

    bool operator==(const TaskId&) const = default;
};

class TaskRegistry {
public:
    void add(TaskId task) {
        if (task.name.empty()) throw Error(Errc::InvalidArgument, "task name must not be empty");
        auto [it, inserted] = tasks_.emplace(task.name, task);
        if (!inserted && !(it->second == task))
            throw Error(Errc::InvalidArgument, "task '" + task.name + "' registered twice with different ontologies");
    }

    const TaskId& get(std::string_view name) const {
        auto it = tasks_.find(std::string(name));
        if (it == tasks_.end()) throw Error(Errc::UnknownTask, std::string(name));
        return it->second;
    }

    bool contains(std::string_view name) const { return tasks_.count(std::string(name)) > 0; }

private:
    std::map<std::string, TaskId> tasks_;
};

// Decoding stops at a terminal trie node when this token wins.
inline constexpr std::string_view kEndToken = "</s>";

struct TranslatorInfo {
    std::vector<std::string> capabilities;
    size_t embed_dim = 0;
    bool concurrent = false;
};

// What the engine needs from a sequence model. score_tokens returns one
// finite score (a logit) per allowed continuation of `prefix`; embed returns
// a fixed-dimension vector that is identical for identical inputs.
class Translator {
public:
    virtual ~Translator() = default;

    virtual TranslatorInfo info() = 0;

    virtual std::vector<double> score_tokens(const TaskId& task, std::string_view source,
                                             std::span<const std::string> prefix,
                                             std::span<const std::string> allowed) = 0;

    virtual std::vector<double> embed(const TaskId& task, std::string_view text) = 0;
};

} // namespace ontomap
