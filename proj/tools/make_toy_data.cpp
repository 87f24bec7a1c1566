// Writes the synthetic toy benchmark: two ~200-class ontologies sharing 120
// concepts under different hierarchies and label variants, the reference
// alignment, and a 100-negative ranking file.
//
//   make_toy_data <out-dir> [--seed N]

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ontomap/corpus.hpp"

namespace fs = std::filesystem;
using ontomap::SplitMix64;

namespace {

const std::vector<std::string> kModifiers = {
    "left",   "right",  "upper",    "lower", "anterior",    "posterior", "medial",
    "lateral", "superior", "inferior", "deep", "superficial", "proximal",  "distal",
};

const std::vector<std::string> kHeads = {
    "chest wall", "rib",     "femur",    "tibia",  "ulna",   "radius", "humerus", "clavicle",
    "scapula",    "sternum", "skull",    "mandible", "maxilla", "vertebra", "patella", "fibula",
    "kidney",     "lung",    "liver",    "spleen", "stomach", "colon",  "bladder", "ureter",
    "artery",     "vein",    "nerve",    "muscle", "tendon", "ligament", "eyelid", "tonsil",
};

const size_t kShared = 120;
const size_t kSourceOnly = 80;
const size_t kTargetOnly = 80;
const size_t kNegatives = 100;

struct Concept {
    std::string modifier;
    std::string head;
    std::string label() const { return modifier + " " + head; }
};

template <class T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

std::string pluralize(const std::string& phrase) {
    auto sp = phrase.rfind(' ');
    std::string head = sp == std::string::npos ? phrase : phrase.substr(sp + 1);
    std::string stem = sp == std::string::npos ? "" : phrase.substr(0, sp + 1);
    auto ends = [&](const std::string& s) { return head.size() >= s.size() && head.ends_with(s); };
    if (ends("y") && head.size() > 1 && std::string("aeiou").find(head[head.size() - 2]) == std::string::npos)
        head = head.substr(0, head.size() - 1) + "ies";
    else if (ends("s") || ends("x") || ends("sh") || ends("ch"))
        head += "es";
    else
        head += "s";
    return stem + head;
}

std::string capitalize(std::string s) {
    if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

// One character replaced, avoiding spaces.
std::string typo(const std::string& s, SplitMix64& rng) {
    std::string out = s;
    for (int tries = 0; tries < 16; ++tries) {
        size_t i = rng.below(out.size());
        if (out[i] == ' ') continue;
        char c = static_cast<char>('a' + rng.below(26));
        if (c == out[i]) continue;
        out[i] = c;
        break;
    }
    return out;
}

struct Class {
    std::string id;
    std::string label;
    std::vector<std::string> synonyms;
    std::vector<std::string> definitions;
    std::vector<std::string> parents;
};

// Random DAG over classes[1..]: each class hangs under an earlier one, and
// about one in six gains a second parent.
void wire_hierarchy(std::vector<Class>& classes, SplitMix64& rng) {
    std::vector<size_t> fanout(classes.size(), 0);
    for (size_t i = 1; i < classes.size(); ++i) {
        size_t p;
        do {
            p = i <= 8 ? 0 : rng.below(i);
        } while (fanout[p] >= 12 && i > 8);
        ++fanout[p];
        classes[i].parents.push_back(classes[p].id);
        if (i > 8 && rng.below(6) == 0) {
            size_t q = 1 + rng.below(i - 1);
            if (classes[q].id != classes[p].id) classes[i].parents.push_back(classes[q].id);
        }
    }
}

void write_classes(const fs::path& path, const std::vector<Class>& classes) {
    std::ofstream out(path, std::ios::binary);
    for (const auto& c : classes) {
        nlohmann::ordered_json j;
        j["id"] = c.id;
        j["label"] = c.label;
        if (!c.synonyms.empty()) j["synonyms"] = c.synonyms;
        if (!c.definitions.empty()) j["definitions"] = c.definitions;
        if (!c.parents.empty()) j["parents"] = c.parents;
        out << j.dump() << '\n';
    }
}

std::string pad(size_t n) {
    std::string s = std::to_string(n);
    return std::string(4 - std::min<size_t>(4, s.size()), '0') + s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Write the synthetic toy benchmark"};
    std::string out;
    uint64_t seed = 7;
    app.add_option("out-dir", out, "Output directory")->required();
    app.add_option("--seed", seed, "Random seed");
    CLI11_PARSE(app, argc, argv);
    fs::path dir = out;
    fs::create_directories(dir);
    SplitMix64 rng(seed);

    std::vector<Concept> concepts;
    for (const auto& m : kModifiers)
        for (const auto& h : kHeads) concepts.push_back({m, h});
    shuffle(concepts, rng);
    concepts.resize(kShared + kSourceOnly + kTargetOnly);

    std::vector<Class> src{{"toysrc:0000", "Body structure", {"Anatomical structure"}, {}, {}}};
    std::vector<Class> tgt{{"toytgt:0000", "Anatomical entity", {}, {"Root of the anatomy hierarchy"}, {}}};

    std::vector<size_t> src_slots, tgt_slots;
    for (size_t i = 0; i < kShared + kSourceOnly; ++i) src_slots.push_back(i);
    for (size_t i = 0; i < kShared + kTargetOnly; ++i) tgt_slots.push_back(i);
    shuffle(src_slots, rng);
    shuffle(tgt_slots, rng);

    src.resize(1 + src_slots.size());
    tgt.resize(1 + tgt_slots.size());
    std::vector<size_t> src_pos(kShared), tgt_pos(kShared);
    for (size_t k = 0; k < src_slots.size(); ++k) {
        src[1 + k].id = "toysrc:" + pad(1 + k);
        if (src_slots[k] < kShared) src_pos[src_slots[k]] = 1 + k;
    }
    for (size_t k = 0; k < tgt_slots.size(); ++k) {
        tgt[1 + k].id = "toytgt:" + pad(1 + k);
        if (tgt_slots[k] < kShared) tgt_pos[tgt_slots[k]] = 1 + k;
    }

    // Shared concepts, one label-noise kind each.
    for (size_t i = 0; i < kShared; ++i) {
        const Concept& c = concepts[i];
        Class& s = src[src_pos[i]];
        Class& t = tgt[tgt_pos[i]];
        const std::string base = c.label();
        switch (i % 6) {
            case 0:  // identical label
                s.label = capitalize(base);
                t.label = capitalize(base);
                break;
            case 1:  // plural on one side
                s.label = capitalize(pluralize(base));
                t.label = capitalize(base);
                break;
            case 2:  // source label kept as a target synonym
                s.label = capitalize(base);
                t.label = capitalize("structure of " + base);
                t.synonyms.push_back(capitalize(base));
                break;
            case 3:  // single-character typo
                s.label = capitalize(base);
                t.label = capitalize(typo(base, rng));
                break;
            case 4:  // reordered phrase
                s.label = capitalize(base);
                t.label = capitalize(c.head + ", " + c.modifier);
                break;
            case 5:  // different wording, only a weak lexical link
                s.label = capitalize(base + " structure");
                t.label = capitalize(c.modifier + " part of " + c.head);
                break;
        }
        if (rng.below(3) == 0) s.synonyms.push_back(capitalize(c.head + " (" + c.modifier + ")"));
        if (rng.below(4) == 0) t.definitions.push_back("The " + base + ".");
    }
    // Unshared concepts: source slots >= kShared map to the next kSourceOnly
    // concepts, target slots to the kTargetOnly after those.
    auto fill_unshared = [&](std::vector<Class>& list, const std::vector<size_t>& slots, size_t offset) {
        for (size_t k = 0; k < slots.size(); ++k) {
            if (slots[k] < kShared) continue;
            const Concept& c = concepts[slots[k] + offset];
            Class& cls = list[1 + k];
            cls.label = capitalize(c.label());
            if (rng.below(4) == 0) cls.synonyms.push_back(capitalize(c.head + " (" + c.modifier + ")"));
        }
    };
    fill_unshared(src, src_slots, 0);
    fill_unshared(tgt, tgt_slots, kSourceOnly);
    wire_hierarchy(src, rng);
    wire_hierarchy(tgt, rng);

    write_classes(dir / "source.jsonl", src);
    write_classes(dir / "target.jsonl", tgt);

    std::vector<std::pair<std::string, std::string>> reference;
    for (size_t i = 0; i < kShared; ++i) reference.emplace_back(src[src_pos[i]].id, tgt[tgt_pos[i]].id);
    std::sort(reference.begin(), reference.end());
    {
        std::ofstream out(dir / "reference.tsv", std::ios::binary);
        out << "SrcEntity\tTgtEntity\tScore\n";
        for (const auto& [s, t] : reference) out << s << '\t' << t << "\t1.0\n";
    }
    {
        std::ofstream out(dir / "ranking.tsv", std::ios::binary);
        out << "SrcEntity\tTgtEntity\tTgtCandidates\n";
        for (const auto& [s, t] : reference) {
            std::vector<std::string> pool;
            for (const auto& c : tgt)
                if (c.id != t) pool.push_back(c.id);
            shuffle(pool, rng);
            pool.resize(kNegatives);
            out << s << '\t' << t << "\t(";
            for (size_t k = 0; k < pool.size(); ++k) out << (k ? ", " : "") << '\'' << pool[k] << '\'';
            out << ")\n";
        }
    }
    std::cerr << "wrote " << src.size() << " source and " << tgt.size() << " target classes, " << reference.size()
              << " reference pairs to " << dir.string() << '\n';
    return 0;
}
