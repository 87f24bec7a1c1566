#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ontomap/ontomap.hpp"

namespace fs = std::filesystem;
using namespace ontomap;

namespace {

// "id=path", or a bare path whose file stem becomes the id.
struct Named {
    std::string id;
    std::string path;
};

Named parse_named(const std::string& spec) {
    auto eq = spec.find('=');
    if (eq != std::string::npos && eq > 0) return {spec.substr(0, eq), spec.substr(eq + 1)};
    return {fs::path(spec).stem().string(), spec};
}

std::string base_name(const std::string& path) { return fs::path(path).filename().string(); }

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open '" + path + "'");
    return in;
}

OntologyGraph read_graph(const Named& n) {
    auto in = open_in(n.path);
    try {
        return load_ontology(in, n.id);
    } catch (const Error& e) {
        throw Error(e.code(), n.path + ": " + e.message());
    }
}

// Writes to a file, or to stdout for "" and "-".
class Output {
public:
    explicit Output(const std::string& path) : path_(path) {
        if (path.empty() || path == "-") return;
        if (auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
        file_.open(path, std::ios::binary | std::ios::trunc);
        if (!file_) throw Error(Errc::IoError, "cannot write '" + path + "'");
    }

    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

    void finish() {
        stream().flush();
        if (!stream()) throw Error(Errc::IoError, "write to '" + (path_.empty() ? "-" : path_) + "' failed");
    }

private:
    std::string path_;
    std::ofstream file_;
};

std::string fixed6(double x) { return format_score(x); }

std::string yes_no(bool b) { return b ? "true" : "false"; }

SmartIdTable table_for(const OntologyGraph& graph, const std::string& table_path, const SmartIdOptions& opts) {
    if (table_path.empty()) return assign_smartids(graph, opts);
    auto in = open_in(table_path);
    SmartIdTable table = read_smartid_table(in, graph.ontology_id());
    if (table.size() != graph.size())
        throw Error(Errc::UnknownClass, "table '" + table_path + "' covers " + std::to_string(table.size()) +
                                            " classes, ontology " + graph.ontology_id() + " has " +
                                            std::to_string(graph.size()));
    for (const auto& [id, rec] : graph.classes()) table.smart_id(id);
    return table;
}

std::unique_ptr<Translator> make_translator(const std::string& spec, const TaskId& task, const OntologyGraph* target,
                                            const SmartIdTable* table, size_t embed_dim) {
    if (spec == "edit") {
        auto tr = std::make_unique<EditSimilarityTranslator>(EditTranslatorOptions{embed_dim, false});
        if (target && table) tr->register_target(task, *target, *table);
        return tr;
    }
    if (spec.rfind("wire:", 0) == 0) return WireTranslator::connect(spec.substr(5));
    throw Error(Errc::InvalidArgument, "unknown translator '" + spec + "' (expected edit or wire:<address>)");
}

void require_capability(Translator& tr, const std::string& cap) {
    auto caps = tr.info().capabilities;
    if (std::find(caps.begin(), caps.end(), cap) == caps.end())
        throw Error(Errc::TranslatorError, "translator does not support " + cap);
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
    std::string file;
    std::string id;
    std::string out;
};

int cmd_ingest(const IngestArgs& a) {
    Named n = parse_named(a.file);
    if (!a.id.empty()) n.id = a.id;
    OntologyGraph graph = read_graph(n);
    ValidationReport r = validate_graph(graph);

    std::cout << "ontology: " << graph.ontology_id() << '\n'
              << "classes: " << r.classes << '\n'
              << "roots: " << r.roots << '\n'
              << "multi_parent: " << r.multi_parent << '\n'
              << "max_depth: " << r.max_depth << '\n'
              << "errors: " << r.errors.size() << '\n';
    for (const auto& e : r.errors) std::cout << "  " << errc_name(e.code) << ": " << e.detail << '\n';

    if (!a.out.empty()) {
        Provenance p;
        p.command = "ingest";
        p.config = {{"input", base_name(n.path)}, {"ontology", n.id}};
        Output out(a.out);
        write_jsonl_provenance(out.stream(), p);
        write_ontology(graph, out.stream());
        out.finish();
    }
    if (!r.ok()) {
        std::cerr << "error: " << errc_name(r.errors.front().code) << ": " << r.errors.front().detail << '\n';
        return exit_code(r.errors.front().code);
    }
    return 0;
}

// ---------------------------------------------------------------- smartids

struct SmartIdArgs {
    std::string file;
    std::string id;
    std::string out;
    size_t path_cap = kDefaultPathCap;
    size_t max_token_len = 0;
};

int cmd_smartids(const SmartIdArgs& a) {
    Named n = parse_named(a.file);
    if (!a.id.empty()) n.id = a.id;
    OntologyGraph graph = read_graph(n);
    SmartIdTable table = assign_smartids(graph, SmartIdOptions{a.path_cap, a.max_token_len});

    Provenance p;
    p.command = "smartids";
    p.config = {{"input", base_name(n.path)},
                {"ontology", n.id},
                {"path_cap", std::to_string(a.path_cap)},
                {"max_token_len", std::to_string(a.max_token_len)}};
    Output out(a.out);
    write_jsonl_provenance(out.stream(), p);
    write_smartid_table(table, out.stream());
    out.finish();
    std::cerr << "smartids: " << table.size() << " classes, " << table.path_count() << " path ids\n";
    return 0;
}

// ---------------------------------------------------------------- corpus

struct CorpusArgs {
    std::vector<std::string> ontologies;
    std::vector<std::string> tables;
    std::vector<std::string> finetune_targets;
    std::vector<std::string> cross;
    std::vector<std::string> prior;
    bool no_cross = false;
    bool no_prior = false;
    double mask_start = 0.10;
    double mask_end = 0.35;
    uint64_t seed = 0;
    size_t path_cap = kDefaultPathCap;
    std::string out_dir;
};

int cmd_corpus(const CorpusArgs& a) {
    std::vector<OntologyGraph> graphs;
    std::vector<SmartIdTable> tables;
    std::map<std::string, std::string> table_paths;
    for (const auto& t : a.tables) {
        Named n = parse_named(t);
        table_paths[n.id] = n.path;
    }
    Provenance p;
    p.command = "corpus";
    p.seed = a.seed;
    for (const auto& spec : a.ontologies) {
        Named n = parse_named(spec);
        graphs.push_back(read_graph(n));
        auto tp = table_paths.find(n.id);
        tables.push_back(table_for(graphs.back(), tp == table_paths.end() ? "" : tp->second,
                                   SmartIdOptions{a.path_cap, 0}));
        p.config["ontology." + n.id] = base_name(n.path);
        if (tp != table_paths.end()) p.config["table." + n.id] = base_name(tp->second);
    }
    for (const auto& [id, path] : table_paths)
        if (!p.config.count("ontology." + id)) throw Error(Errc::InvalidArgument, "table given for unknown ontology " + id);

    MaskingSchedule schedule{a.mask_start, a.mask_end, 1};
    schedule.validate();
    auto pretrain = build_pretrain_corpus(graphs, tables, schedule, a.seed);

    std::vector<OntologyGraph> ft_graphs;
    std::vector<SmartIdTable> ft_tables;
    for (size_t i = 0; i < graphs.size(); ++i) {
        const auto& id = graphs[i].ontology_id();
        if (a.finetune_targets.empty() ||
            std::find(a.finetune_targets.begin(), a.finetune_targets.end(), id) != a.finetune_targets.end()) {
            ft_graphs.push_back(graphs[i]);
            ft_tables.push_back(tables[i]);
        }
    }
    for (const auto& t : a.finetune_targets)
        if (std::none_of(graphs.begin(), graphs.end(), [&](const auto& g) { return g.ontology_id() == t; }))
            throw Error(Errc::InvalidArgument, "fine-tune target " + t + " is not among --ontology inputs");

    AugmentationConfig aug;
    aug.cross_subset_enabled = !a.no_cross;
    aug.prior_versions_enabled = !a.no_prior;
    for (const auto& spec : a.cross) {
        Named n = parse_named(spec);
        aug.cross_subset_sources.push_back(read_graph(n));
        p.config["cross." + n.id] = base_name(n.path);
    }
    for (const auto& spec : a.prior) {
        Named n = parse_named(spec);
        aug.prior_versions.push_back(read_graph(n));
        p.config["prior." + n.id] = base_name(n.path);
    }
    FinetuneCorpus finetune = build_finetune_corpus(ft_graphs, ft_tables, aug);

    p.config["mask_start"] = fixed6(a.mask_start);
    p.config["mask_end"] = fixed6(a.mask_end);
    p.config["path_cap"] = std::to_string(a.path_cap);
    p.config["cross_enabled"] = yes_no(!a.no_cross);
    p.config["prior_enabled"] = yes_no(!a.no_prior);

    fs::path dir(a.out_dir);
    {
        Output out((dir / "pretrain.jsonl").string());
        write_jsonl_provenance(out.stream(), p);
        write_corpus(pretrain, out.stream());
        out.finish();
    }
    {
        Output out((dir / "finetune.jsonl").string());
        write_jsonl_provenance(out.stream(), p);
        write_corpus(finetune.instances, out.stream());
        out.finish();
    }
    nlohmann::ordered_json manifest;
    manifest["provenance"] = p.to_json();
    manifest["schedule"] = {{"start_ratio", a.mask_start},
                            {"end_ratio", a.mask_end},
                            {"total_steps", pretrain.size()}};
    nlohmann::ordered_json pre_counts = nlohmann::ordered_json::object();
    for (const auto& [tag, n] : count_by_tag(pretrain)) pre_counts[tag] = n;
    nlohmann::ordered_json ft_counts = nlohmann::ordered_json::object();
    for (const auto& [tag, n] : count_by_tag(finetune.instances)) ft_counts[tag] = n;
    manifest["splits"] = {{"pretrain", {{"file", "pretrain.jsonl"}, {"instances", pretrain.size()}, {"counts", pre_counts}}},
                          {"finetune",
                           {{"file", "finetune.jsonl"}, {"instances", finetune.instances.size()}, {"counts", ft_counts}}}};
    manifest["warnings"] = finetune.warnings;
    {
        Output out((dir / "manifest.json").string());
        out.stream() << manifest.dump(2) << '\n';
        out.finish();
    }
    for (const auto& w : finetune.warnings) std::cerr << "warning: " << w << '\n';
    std::cerr << "corpus: " << pretrain.size() << " pretrain, " << finetune.instances.size() << " finetune instances\n";
    return 0;
}

// ---------------------------------------------------------------- match

struct MatchArgs {
    std::string source;
    std::string target;
    std::string table;
    std::string task;
    double threshold = 0.80;
    std::string mode = "tm1";
    std::string decode = "greedy";
    size_t beam_width = 4;
    double temperature = 1.0;
    size_t max_depth = 256;
    std::string translator = "edit";
    uint64_t seed = 0;
    size_t path_cap = kDefaultPathCap;
    size_t embed_dim = 2048;
    bool no_singularize = false;
    bool beam_fallback = false;
    std::string out;
    std::string predictions_out;
};

int cmd_match(const MatchArgs& a) {
    Named sn = parse_named(a.source), tn = parse_named(a.target);
    OntologyGraph source = read_graph(sn);
    OntologyGraph target = read_graph(tn);
    SmartIdTable table = table_for(target, a.table, SmartIdOptions{a.path_cap, 0});
    PathTrie trie = PathTrie::build(table);
    TaskId task{a.task.empty() ? sn.id + "2" + tn.id : a.task, sn.id, tn.id};

    MatchConfig config;
    config.threshold = a.threshold;
    config.scoring = a.mode == "tm2" ? ScoringMode::TM2 : ScoringMode::TM1;
    config.decode.mode = a.decode == "beam" ? DecodeMode::Beam : DecodeMode::Greedy;
    config.decode.beam_width = a.beam_width;
    config.decode.temperature = a.temperature;
    config.decode.max_depth = a.max_depth;
    config.singularize = !a.no_singularize;
    config.beam_fallback = a.beam_fallback;
    config.decode.validate();

    auto translator = make_translator(a.translator, task, &target, &table, a.embed_dim);
    require_capability(*translator, "score_tokens");
    if (config.scoring == ScoringMode::TM1) require_capability(*translator, "embed");

    MatchResult result = match_ontologies(source, target, table, trie, *translator, task, config);

    Provenance p;
    p.command = "match";
    p.seed = a.seed;
    p.config = {{"source", sn.id + ":" + base_name(sn.path)},
                {"target", tn.id + ":" + base_name(tn.path)},
                {"table", a.table.empty() ? "generated" : base_name(a.table)},
                {"task", task.name},
                {"threshold", fixed6(a.threshold)},
                {"mode", a.mode},
                {"decode", a.decode},
                {"beam_width", std::to_string(a.beam_width)},
                {"temperature", fixed6(a.temperature)},
                {"max_depth", std::to_string(a.max_depth)},
                {"translator", a.translator},
                {"path_cap", std::to_string(a.path_cap)},
                {"embed_dim", std::to_string(a.embed_dim)},
                {"singularize", yes_no(config.singularize)},
                {"beam_fallback", yes_no(a.beam_fallback)}};
    {
        Output out(a.out);
        write_mappings(result.mappings, out.stream(), &p);
        out.finish();
    }
    if (!a.predictions_out.empty()) {
        Output out(a.predictions_out);
        write_mappings(result.predictions, out.stream(), &p);
        out.finish();
    }
    for (const auto& f : result.failures) std::cerr << "warning: " << f.source_id << ": " << f.message << '\n';
    std::cerr << "match: " << result.mappings.size() << " mappings from " << source.size() << " source classes, "
              << result.decode_calls << " score calls\n";
    if (!result.failures.empty() && result.predictions.empty() && source.size() > 0)
        throw Error(Errc::TranslatorError, "every source class failed: " + result.failures.front().message);
    return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
    std::string mapping;
    std::string reference;
    std::string predictions;
    std::string ranking;
    std::string source;
    std::string target;
    std::string task;
    std::string translator = "edit";
    std::vector<size_t> k{1, 5};
    double beta = 1.0;
    bool rank_exact_override = false;
    bool no_singularize = false;
    size_t embed_dim = 2048;
    uint64_t seed = 0;
    std::string out;
};

MappingSet read_mapping_file(const std::string& path) {
    auto in = open_in(path);
    try {
        return read_mappings(in);
    } catch (const Error& e) {
        throw Error(e.code(), path + ": " + e.message());
    }
}

int cmd_eval(const EvalArgs& a) {
    MappingSet out = read_mapping_file(a.mapping);
    MappingSet ref = read_mapping_file(a.reference);
    if (ref.empty()) throw Error(Errc::RecallUndefined, a.reference + ": no reference mappings");

    Provenance p;
    p.command = "eval";
    p.seed = a.seed;
    p.config = {{"mapping", base_name(a.mapping)}, {"reference", base_name(a.reference)}, {"beta", fixed6(a.beta)}};
    if (!a.predictions.empty()) p.config["predictions"] = base_name(a.predictions);

    std::ostringstream report;
    report << "[global]\n";
    size_t tp = 0;
    for (const auto& pr : out.pairs())
        if (ref.contains(pr)) ++tp;
    report << "output_mappings: " << out.size() << '\n'
           << "reference_mappings: " << ref.size() << '\n'
           << "true_positives: " << tp << '\n';
    if (out.empty()) {
        report << "precision: undefined\n"
               << "recall: " << fixed6(0.0) << '\n'
               << "f_score: undefined\n";
    } else {
        PRF prf = precision_recall_f(out, ref, a.beta);
        report << "precision: " << fixed6(prf.precision) << '\n'
               << "recall: " << fixed6(prf.recall) << '\n'
               << "f_score: " << fixed6(prf.f) << '\n';
    }

    std::map<std::string, std::string> predictions;
    if (!a.predictions.empty()) {
        predictions = read_mapping_file(a.predictions).top_predictions();
    } else {
        predictions = out.top_predictions();
    }
    report << "[accuracy]\n"
           << "predicted_sources: " << predictions.size() << '\n'
           << "accuracy: " << fixed6(accuracy(predictions, ref)) << '\n';

    if (!a.ranking.empty()) {
        if (a.source.empty() || a.target.empty())
            throw Error(Errc::InvalidArgument, "--ranking needs --source and --target to score candidates");
        Named sn = parse_named(a.source), tn = parse_named(a.target);
        OntologyGraph source = read_graph(sn);
        OntologyGraph target = read_graph(tn);
        auto in = open_in(a.ranking);
        std::vector<RankingCase> cases;
        try {
            cases = read_ranking(in);
        } catch (const Error& e) {
            throw Error(e.code(), a.ranking + ": " + e.message());
        }
        TaskId task{a.task.empty() ? sn.id + "2" + tn.id : a.task, sn.id, tn.id};
        auto translator = make_translator(a.translator, task, nullptr, nullptr, a.embed_dim);
        require_capability(*translator, "embed");
        EmbeddingCache cache;
        for (auto& c : cases) {
            if (!source.contains(c.source_id)) throw Error(Errc::UnknownClass, "ranking source " + c.source_id);
            std::vector<std::string> all{c.reference_target_id};
            all.insert(all.end(), c.negative_targets.begin(), c.negative_targets.end());
            for (const auto& id : all)
                if (!target.contains(id)) throw Error(Errc::UnknownClass, "ranking candidate " + id);
            auto scores = score_candidates(*translator, task, source, target, c.source_id, all, a.rank_exact_override,
                                           !a.no_singularize, cache);
            c.reference_score = scores.front();
            c.negative_scores.assign(scores.begin() + 1, scores.end());
        }
        report << "[ranking]\n" << "cases: " << cases.size() << '\n';
        if (!cases.empty()) {
            for (size_t k : a.k) report << "hits@" << k << ": " << fixed6(hits_at_k(cases, k)) << '\n';
            report << "mrr: " << fixed6(mrr(cases)) << '\n';
        }
        p.config["ranking"] = base_name(a.ranking);
        p.config["source"] = sn.id + ":" + base_name(sn.path);
        p.config["target"] = tn.id + ":" + base_name(tn.path);
        p.config["translator"] = a.translator;
        p.config["embed_dim"] = std::to_string(a.embed_dim);
        p.config["rank_exact_override"] = yes_no(a.rank_exact_override);
        p.config["singularize"] = yes_no(!a.no_singularize);
        std::string ks;
        for (size_t k : a.k) ks += (ks.empty() ? "" : ",") + std::to_string(k);
        p.config["k"] = ks;
    }

    Output o(a.out);
    write_tsv_provenance(o.stream(), p);
    o.stream() << "[config]\n";
    for (const auto& [key, value] : p.config) o.stream() << key << ": " << value << '\n';
    o.stream() << report.str();
    o.finish();
    return 0;
}

// ---------------------------------------------------------------- serve

struct ServeArgs {
    std::string source;
    std::string target;
    std::string table;
    std::string task;
    size_t path_cap = kDefaultPathCap;
    size_t embed_dim = 2048;
    bool singularize = false;
    int listen = -1;
    size_t max_connections = 0;
};

int cmd_serve(const ServeArgs& a) {
    Named tn = parse_named(a.target);
    OntologyGraph target = read_graph(tn);
    std::string source_id = a.source.empty() ? "source" : parse_named(a.source).id;
    SmartIdTable table = table_for(target, a.table, SmartIdOptions{a.path_cap, 0});
    TaskId task{a.task.empty() ? source_id + "2" + tn.id : a.task, source_id, tn.id};
    TaskRegistry tasks;
    tasks.add(task);
    EditSimilarityTranslator tr(EditTranslatorOptions{a.embed_dim, a.singularize});
    tr.register_target(task, target, table);

    if (a.listen < 0) {
        serve(tr, tasks, std::cin, std::cout);
        return 0;
    }
    ::signal(SIGPIPE, SIG_IGN);
    TcpListener listener(static_cast<uint16_t>(a.listen));
    std::cout << "listening 127.0.0.1:" << listener.port() << std::endl;
    for (size_t served = 0; a.max_connections == 0 || served < a.max_connections; ++served) {
        auto conn = listener.accept();
        try {
            serve(tr, tasks, *conn);
        } catch (const Error& e) {
            std::cerr << "warning: connection dropped: " << e.what() << '\n';
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Translation-based ontology alignment"};
    app.set_config("--config", "", "Read options from a key=value config file");
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    IngestArgs ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Load and validate a class file");
    c_ingest->add_option("file", ingest.file, "Class file, as [id=]path")->required();
    c_ingest->add_option("--id", ingest.id, "Ontology id (default: file stem)");
    c_ingest->add_option("--out", ingest.out, "Write the normalized class file here");

    SmartIdArgs smart;
    auto* c_smart = app.add_subcommand("smartids", "Assign SmartIDs and SynonymIDs");
    c_smart->add_option("file", smart.file, "Class file, as [id=]path")->required();
    c_smart->add_option("--id", smart.id, "Ontology id (default: file stem)");
    c_smart->add_option("--out", smart.out, "Output table (default: stdout)");
    c_smart->add_option("--path-cap", smart.path_cap, "Paths kept per class")->check(CLI::PositiveNumber);
    c_smart->add_option("--max-token-len", smart.max_token_len, "Base-36 digits per token, 0 = unbounded");

    CorpusArgs corpus;
    auto* c_corpus = app.add_subcommand("corpus", "Build pre-training and fine-tuning corpora");
    c_corpus->add_option("--ontology", corpus.ontologies, "Ontology as [id=]path (repeatable)")->required();
    c_corpus->add_option("--table", corpus.tables, "SmartID table as id=path (default: generated)");
    c_corpus->add_option("--finetune-target", corpus.finetune_targets, "Ontology ids to fine-tune on (default: all)");
    c_corpus->add_option("--cross", corpus.cross, "Cross-subset augmentation source as [id=]path");
    c_corpus->add_option("--prior", corpus.prior, "Prior release of a target as id=path");
    c_corpus->add_flag("--no-cross", corpus.no_cross, "Disable cross-subset augmentation");
    c_corpus->add_flag("--no-prior", corpus.no_prior, "Disable prior-version augmentation");
    c_corpus->add_option("--mask-start", corpus.mask_start, "Masking ratio at the first step");
    c_corpus->add_option("--mask-end", corpus.mask_end, "Masking ratio at the last step");
    c_corpus->add_option("--seed", corpus.seed, "Random seed");
    c_corpus->add_option("--path-cap", corpus.path_cap, "Paths kept per class")->check(CLI::PositiveNumber);
    c_corpus->add_option("--out-dir", corpus.out_dir, "Output directory")->required();

    MatchArgs match;
    auto* c_match = app.add_subcommand("match", "Align a source ontology to a target ontology");
    c_match->add_option("--source", match.source, "Source ontology as [id=]path")->required();
    c_match->add_option("--target", match.target, "Target ontology as [id=]path")->required();
    c_match->add_option("--table", match.table, "Target SmartID table (default: generated)");
    c_match->add_option("--task", match.task, "Task name (default: <source>2<target>)");
    c_match->add_option("--threshold", match.threshold, "Keep mappings scoring above this");
    c_match->add_option("--mode", match.mode, "Scoring: tm1 (similarity) or tm2 (search score)")
        ->check(CLI::IsMember({"tm1", "tm2"}));
    c_match->add_option("--decode", match.decode, "greedy or beam")->check(CLI::IsMember({"greedy", "beam"}));
    c_match->add_option("--beam-width", match.beam_width, "Beam width")->check(CLI::PositiveNumber);
    c_match->add_option("--temperature", match.temperature, "Softmax temperature")->check(CLI::PositiveNumber);
    c_match->add_option("--max-depth", match.max_depth, "Maximum decode depth")->check(CLI::PositiveNumber);
    c_match->add_option("--translator", match.translator, "edit, or wire:<address>");
    c_match->add_option("--seed", match.seed, "Random seed");
    c_match->add_option("--path-cap", match.path_cap, "Paths kept per class")->check(CLI::PositiveNumber);
    c_match->add_option("--embed-dim", match.embed_dim, "Embedding size of the edit translator")
        ->check(CLI::PositiveNumber);
    c_match->add_flag("--no-singularize", match.no_singularize, "Do not add singular forms to description sets");
    c_match->add_flag("--beam-fallback", match.beam_fallback, "Try lower beam candidates below the threshold");
    c_match->add_option("--out", match.out, "Mapping file (default: stdout)");
    c_match->add_option("--predictions-out", match.predictions_out, "Unfiltered top-1 prediction per source");

    EvalArgs eval;
    auto* c_eval = app.add_subcommand("eval", "Score mappings against a reference");
    c_eval->add_option("--mapping", eval.mapping, "System mapping file")->required();
    c_eval->add_option("--reference", eval.reference, "Reference mapping file")->required();
    c_eval->add_option("--predictions", eval.predictions, "Top-1 predictions for accuracy (default: --mapping)");
    c_eval->add_option("--ranking", eval.ranking, "Candidate ranking file");
    c_eval->add_option("--source", eval.source, "Source ontology for ranking");
    c_eval->add_option("--target", eval.target, "Target ontology for ranking");
    c_eval->add_option("--task", eval.task, "Task name (default: <source>2<target>)");
    c_eval->add_option("--translator", eval.translator, "edit, or wire:<address>");
    c_eval->add_option("--k", eval.k, "Hits@K cut-offs")->delimiter(',')->check(CLI::PositiveNumber);
    c_eval->add_option("--beta", eval.beta, "F-score beta")->check(CLI::PositiveNumber);
    c_eval->add_flag("--rank-exact-override", eval.rank_exact_override, "Exact matches score 1 when ranking");
    c_eval->add_flag("--no-singularize", eval.no_singularize, "Do not add singular forms when ranking");
    c_eval->add_option("--embed-dim", eval.embed_dim, "Embedding size of the edit translator")
        ->check(CLI::PositiveNumber);
    c_eval->add_option("--seed", eval.seed, "Random seed");
    c_eval->add_option("--out", eval.out, "Report file (default: stdout)");

    ServeArgs srv;
    auto* c_serve = app.add_subcommand("serve", "Serve the edit-similarity translator over the wire protocol");
    c_serve->add_option("--target", srv.target, "Target ontology as [id=]path")->required();
    c_serve->add_option("--source", srv.source, "Source ontology id, as [id=]path");
    c_serve->add_option("--table", srv.table, "Target SmartID table (default: generated)");
    c_serve->add_option("--task", srv.task, "Task name (default: <source>2<target>)");
    c_serve->add_option("--path-cap", srv.path_cap, "Paths kept per class")->check(CLI::PositiveNumber);
    c_serve->add_option("--embed-dim", srv.embed_dim, "Embedding size")->check(CLI::PositiveNumber);
    c_serve->add_flag("--singularize", srv.singularize, "Singularize target descriptions before scoring");
    c_serve->add_option("--listen", srv.listen, "Serve TCP on this loopback port (0 = any) instead of stdio");
    c_serve->add_option("--max-connections", srv.max_connections, "Stop after this many connections (0 = never)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*c_ingest) return cmd_ingest(ingest);
        if (*c_smart) return cmd_smartids(smart);
        if (*c_corpus) return cmd_corpus(corpus);
        if (*c_match) return cmd_match(match);
        if (*c_eval) return cmd_eval(eval);
        if (*c_serve) return cmd_serve(srv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: IoError: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
