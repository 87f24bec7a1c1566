#pragma once
// Provenance stamps written at the top of every output file.
//
// TSV outputs carry "#"-prefixed comment lines; line-delimited JSON outputs
// carry a first record {"provenance": {...}}. Readers skip both.

#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#ifndef ONTOMAP_VERSION
#define ONTOMAP_VERSION "0.1.0"
#endif

namespace ontomap {

inline constexpr std::string_view kToolVersion = ONTOMAP_VERSION;

struct Provenance {
    std::string tool = "ontomap";
    std::string version = std::string(kToolVersion);
    std::string command;
    uint64_t seed = 0;
    // Canonical parameter echo; hashed into config_hash.
    std::map<std::string, std::string> config;

    std::string config_hash() const {
        uint64_t h = 0xcbf29ce484222325ULL;
        auto mix = [&](std::string_view s) {
            for (unsigned char c : s) {
                h ^= c;
                h *= 0x100000001b3ULL;
            }
        };
        mix(command);
        mix("\n");
        for (const auto& [k, v] : config) {
            mix(k);
            mix("=");
            mix(v);
            mix("\n");
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["tool"] = tool;
        j["version"] = version;
        j["command"] = command;
        j["config_hash"] = config_hash();
        j["seed"] = seed;
        return j;
    }
};

inline void write_tsv_provenance(std::ostream& out, const Provenance& p) {
    out << "# " << p.tool << ' ' << p.version << ' ' << p.command << '\n';
    out << "# config_hash: " << p.config_hash() << '\n';
    out << "# seed: " << p.seed << '\n';
}

inline void write_jsonl_provenance(std::ostream& out, const Provenance& p) {
    nlohmann::ordered_json j;
    j["provenance"] = p.to_json();
    out << j.dump() << '\n';
}

inline bool is_provenance_record(std::string_view line) {
    if (line.empty() || line.front() != '{' || line.find("\"provenance\"") == std::string_view::npos) return false;
    auto obj = nlohmann::json::parse(line, nullptr, false);
    return obj.is_object() && obj.size() == 1 && obj.contains("provenance");
}

} // namespace ontomap
