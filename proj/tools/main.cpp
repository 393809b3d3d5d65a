// apf: turn natural-language design requirements into formal optimization
// formulations, score them by ranking consistency, and export a filtered,
// augmented fine-tuning dataset. Every stage reads/writes JSON-lines files so
// intermediates stay inspectable; `run-all` chains the stages end to end.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "apf/config.hpp"
#include "apf/errors.hpp"
#include "apf/eval.hpp"
#include "apf/parser.hpp"
#include "apf/serialize.hpp"
#include "apf/util.hpp"

namespace fs = std::filesystem;
using namespace apf;

namespace {

struct FlagOverrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> provider;
    std::optional<double> threshold;
    std::optional<double> alpha;
    std::optional<int> variants;
    std::optional<int> samples;
    bool force = false;
};

AppConfig resolve_config(const FlagOverrides& fo) {
    AppConfig cfg;
    if (!fo.config_path.empty()) cfg = load_config_file(fo.config_path);
    apply_env_overrides(cfg);
    if (fo.seed) cfg.seed = *fo.seed;
    if (fo.provider) cfg.provider = *fo.provider;
    if (fo.threshold) cfg.threshold = *fo.threshold;
    if (fo.alpha) cfg.alpha = *fo.alpha;
    if (fo.variants) cfg.variants = *fo.variants;
    if (fo.samples) cfg.samples = *fo.samples;
    if (fo.force) cfg.force = true;
    cfg.validate();
    std::cerr << "resolved config (seed " << cfg.seed << "):\n"
              << resolved_config_json(cfg) << "\n";
    return cfg;
}

fs::path checked_out(const std::string& path, bool force) {
    if (fs::exists(path) && !force) {
        throw UsageError("output '" + path + "' already exists; pass --force to overwrite");
    }
    return path;
}

void report_failures(const std::vector<StageFailure>& failures, const char* stage) {
    for (const StageFailure& f : failures) {
        std::cerr << stage << " failure [" << f.id << "]: " << f.error << "\n";
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// The evaluation instances each set was (or would be) annotated on; shared by
// annotate, eval, and run-all so scores always refer to the same pick.
std::map<std::string, std::vector<TestInstance>> pick_instances(
    const std::vector<RequirementSet>& sets, const std::vector<TestInstance>& pool,
    const AppConfig& cfg) {
    std::map<std::string, std::vector<TestInstance>> out;
    for (const RequirementSet& rs : sets) {
        out[rs.id] = select_instances_for_set(rs.id, pool,
                                              static_cast<std::size_t>(cfg.instances_per_set),
                                              substream_seed(cfg.seed, "pick"));
    }
    return out;
}

std::vector<RequirementSet> first_n_sets(std::vector<RequirementSet> sets, int n) {
    if (n > 0 && static_cast<std::size_t>(n) < sets.size()) {
        sets.resize(static_cast<std::size_t>(n));
    }
    return sets;
}

std::vector<DatasetRecord> sorted_by_id(std::vector<DatasetRecord> records) {
    std::stable_sort(records.begin(), records.end(),
                     [](const DatasetRecord& a, const DatasetRecord& b) { return a.id < b.id; });
    return records;
}

// Rebuilds the per-set instance lists from ranking rows and the shared pool
// (standalone `score` runs from files, not from an in-memory pick).
std::map<std::string, std::vector<TestInstance>> instances_from_rankings(
    const std::map<std::string, Ranking>& rankings, const std::vector<TestInstance>& pool,
    std::vector<StageFailure>& failures) {
    std::map<std::string, const TestInstance*> by_id;
    for (const TestInstance& t : pool) by_id[t.id] = &t;
    std::map<std::string, std::vector<TestInstance>> out;
    for (const auto& [set_id, ranking] : rankings) {
        std::vector<TestInstance> insts;
        bool ok = true;
        for (const std::string& iid : ranking.instance_ids) {
            const auto it = by_id.find(iid);
            if (it == by_id.end()) {
                failures.push_back({set_id, "instance '" + iid + "' not in the pool file"});
                ok = false;
                break;
            }
            insts.push_back(*it->second);
        }
        if (ok) out[set_id] = std::move(insts);
    }
    return out;
}

std::vector<bool> ground_truth_feasibility(const RequirementSet& reqs,
                                           const std::vector<TestInstance>& insts,
                                           const EvalOptions& opts) {
    const Formulation truth = compile_requirements(reqs);
    std::vector<bool> out;
    out.reserve(insts.size());
    for (const TestInstance& inst : insts) {
        out.push_back(feasibility(truth, inst, opts).feasible);
    }
    return out;
}

RunReport do_run_all(const AppConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    const auto out = [&](const char* name) {
        return checked_out((dir / name).string(), cfg.force);
    };

    RunReport rep;

    const std::vector<TestInstance> pool = sample_instances(
        static_cast<std::size_t>(cfg.instances_total), cfg.bands, cfg.sampling,
        substream_seed(cfg.seed, "synth"));
    write_jsonl_as(out("instances.jsonl"), pool);
    rep.counts["instances"] = pool.size();

    std::vector<TestInstance> sources = pool;
    if (static_cast<std::size_t>(cfg.n_sets) < sources.size()) {
        sources.resize(static_cast<std::size_t>(cfg.n_sets));
    }
    const std::vector<RequirementSet> sets =
        derive_requirements(sources, cfg.bands, cfg.intents, substream_seed(cfg.seed, "derive"));
    write_jsonl_as(out("reqs.jsonl"), sets);
    rep.counts["requirement_sets"] = sets.size();

    const std::unique_ptr<Provider> provider = make_provider(cfg);

    GenerateResult gen = generate_base(sets, *provider, cfg.max_concurrency);
    write_jsonl_as(out("base.jsonl"), gen.records);
    rep.counts["base"] = gen.records.size();
    report_failures(gen.failures, "generate");
    for (auto& f : gen.failures) rep.failures.push_back(std::move(f));

    const auto insts_per_set = pick_instances(sets, pool, cfg);
    AnnotateResult ann = annotate_references(sets, insts_per_set, *provider,
                                             cfg.max_concurrency, cfg.annotation,
                                             cfg.expert_example);
    std::vector<Ranking> ranking_rows;
    for (const RequirementSet& rs : sets) {
        const auto it = ann.rankings.find(rs.id);
        if (it != ann.rankings.end()) ranking_rows.push_back(it->second);
    }
    write_jsonl_as(out("rankings.jsonl"), ranking_rows);
    rep.counts["rankings"] = ranking_rows.size();
    report_failures(ann.failures, "annotate");
    for (auto& f : ann.failures) rep.failures.push_back(std::move(f));

    std::vector<StageFailure> stage_failures;
    std::vector<DatasetRecord> scored;
    std::vector<DatasetRecord> train;
    if (cfg.augment_before_select) {
        std::vector<DatasetRecord> batch = gen.records;
        std::vector<DatasetRecord> children = augment_all(
            gen.records, cfg.variants, cfg.samples, *provider, cfg.seed, stage_failures,
            cfg.max_concurrency);
        for (auto& c : children) batch.push_back(std::move(c));
        scored = score_records(batch, ann.rankings, insts_per_set, stage_failures, cfg.eval);
        write_jsonl_as(out("scored.jsonl"), scored);
        const std::vector<DatasetRecord> hq = select_records(scored, cfg.threshold);
        write_jsonl_as(out("hq.jsonl"), hq);
        rep.counts["hq"] = hq.size();
        train = sorted_by_id(hq);
    } else {
        scored = score_records(gen.records, ann.rankings, insts_per_set, stage_failures,
                               cfg.eval);
        write_jsonl_as(out("scored.jsonl"), scored);
        const std::vector<DatasetRecord> hq = select_records(scored, cfg.threshold);
        write_jsonl_as(out("hq.jsonl"), hq);
        rep.counts["hq"] = hq.size();
        std::vector<DatasetRecord> children =
            augment_all(hq, cfg.variants, cfg.samples, *provider, cfg.seed, stage_failures,
                        cfg.max_concurrency);
        train = hq;
        for (auto& c : children) train.push_back(std::move(c));
        train = sorted_by_id(std::move(train));
    }
    rep.counts["scored"] = scored.size();
    write_jsonl_as(out("train.jsonl"), train);
    rep.counts["train"] = train.size();
    report_failures(stage_failures, "pipeline");
    for (auto& f : stage_failures) rep.failures.push_back(std::move(f));

    const std::vector<SftSample> sft = export_sft(train);
    write_jsonl_as(out("sft.jsonl"), sft);
    rep.counts["sft"] = sft.size();

    std::size_t scored_bases = 0;
    std::size_t kept_bases = 0;
    for (const DatasetRecord& r : scored) {
        if (!r.augmented) ++scored_bases;
    }
    for (const DatasetRecord& r : train) {
        if (!r.augmented) ++kept_bases;
    }
    rep.retention_rate =
        scored_bases == 0 ? 0.0
                          : static_cast<double>(kept_bases) / static_cast<double>(scored_bases);
    rep.histogram = report_scores(scored);

    {
        const fs::path report_path = checked_out((dir / "report.json").string(), cfg.force);
        const fs::path tmp = report_path.string() + ".partial";
        std::ofstream outf(tmp, std::ios::binary | std::ios::trunc);
        if (!outf) throw IoError("cannot open '" + tmp.string() + "' for writing");
        outf << nlohmann::json(rep).dump(2) << "\n";
        outf.close();
        fs::rename(tmp, report_path);
    }
    return rep;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"requirements-to-formulation dataset pipeline"};
    app.require_subcommand(1);

    FlagOverrides fo;
    std::function<int()> action;

    const auto add_common = [&fo](CLI::App* cmd) {
        cmd->add_option("--config", fo.config_path, "JSON config file");
        cmd->add_option("--seed", fo.seed, "base RNG seed");
        cmd->add_option("--provider", fo.provider,
                        "mock-faithful | mock-corrupt | mock-noisy | http");
        cmd->add_option("--threshold", fo.threshold, "selection threshold on the score");
        cmd->add_option("--alpha", fo.alpha, "objective/constraint mix for eval");
        cmd->add_option("--variants", fo.variants, "paraphrase versions per requirement (v)");
        cmd->add_option("--samples", fo.samples, "augmented children per base record (l)");
        cmd->add_flag("--force", fo.force, "overwrite existing outputs");
    };

    // synth -------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "sample benchmark instances into a pool file");
    static std::string synth_out = "instances.jsonl";
    static int synth_count = 0;
    add_common(synth);
    synth->add_option("--out", synth_out, "pool file to write");
    synth->add_option("--count", synth_count, "number of instances (default instances_total)");
    synth->callback([&] {
        action = [&]() {
            const AppConfig cfg = resolve_config(fo);
            const std::size_t count = synth_count > 0
                                          ? static_cast<std::size_t>(synth_count)
                                          : static_cast<std::size_t>(cfg.instances_total);
            const auto pool = sample_instances(count, cfg.bands, cfg.sampling,
                                               substream_seed(cfg.seed, "synth"));
            write_jsonl_as(checked_out(synth_out, cfg.force), pool);
            std::cerr << "wrote " << pool.size() << " instances to " << synth_out << "\n";
            return 0;
        };
    });

    // derive-reqs -------------------------------------------------------
    auto* derive = app.add_subcommand("derive-reqs",
                                      "derive one requirement set per source instance");
    static std::string derive_in = "instances.jsonl";
    static std::string derive_out = "reqs.jsonl";
    static int derive_sets = 0;
    add_common(derive);
    derive->add_option("--instances", derive_in, "instance pool file");
    derive->add_option("--out", derive_out, "requirement sets file to write");
    derive->add_option("--sets", derive_sets, "how many sets (default n_sets; 0 = n_sets)");
    derive->callback([&] {
        action = [&]() {
            const AppConfig cfg = resolve_config(fo);
            auto pool = read_jsonl_as<TestInstance>(derive_in);
            const int want = derive_sets > 0 ? derive_sets : cfg.n_sets;
            if (static_cast<std::size_t>(want) < pool.size()) {
                pool.resize(static_cast<std::size_t>(want));
            }
            const auto sets = derive_requirements(pool, cfg.bands, cfg.intents,
                                                  substream_seed(cfg.seed, "derive"));
            write_jsonl_as(checked_out(derive_out, cfg.force), sets);
            std::cerr << "wrote " << sets.size() << " requirement sets to " << derive_out
                      << "\n";
            return 0;
        };
    });

    // gen-formulations --------------------------------------------------
    auto* gen = app.add_subcommand("gen-formulations",
                                   "generate one formulation per requirement set");
    static std::string gen_in = "reqs.jsonl";
    static std::string gen_out = "base.jsonl";
    add_common(gen);
    gen->add_option("--reqs", gen_in, "requirement sets file");
    gen->add_option("--out", gen_out, "base records file to write");
    gen->callback([&] {
        action = [&]() {
            const AppConfig cfg = resolve_config(fo);
            const auto sets = read_jsonl_as<RequirementSet>(gen_in);
            const auto provider = make_provider(cfg);
            GenerateResult r = generate_base(sets, *provider, cfg.max_concurrency);
            write_jsonl_as(checked_out(gen_out, cfg.force), r.records);
            report_failures(r.failures, "generate");
            std::cerr << "wrote " << r.records.size() << " records (" << r.failures.size()
                      << " failures) to " << gen_out << "\n";
            return 0;
        };
    });

    // annotate ----------------------------------------------------------
    auto* annotate = app.add_subcommand("annotate",
                                        "obtain a reference ranking per requirement set");
    static std::string ann_reqs = "reqs.jsonl";
    static std::string ann_insts = "instances.jsonl";
    static std::string ann_out = "rankings.jsonl";
    add_common(annotate);
    annotate->add_option("--reqs", ann_reqs, "requirement sets file");
    annotate->add_option("--instances", ann_insts, "instance pool file");
    annotate->add_option("--out", ann_out, "rankings file to write");
    annotate->callback([&] {
        action = [&]() {
            const AppConfig cfg = resolve_config(fo);
            const auto sets = read_jsonl_as<RequirementSet>(ann_reqs);
            const auto pool = read_jsonl_as<TestInstance>(ann_insts);
            const auto insts_per_set = pick_instances(sets, pool, cfg);
            const auto provider = make_provider(cfg);
            AnnotateResult r = annotate_references(sets, insts_per_set, *provider,
                                                   cfg.max_concurrency, cfg.annotation,
                                                   cfg.expert_example);
            std::vector<Ranking> rows;
            for (const RequirementSet& rs : sets) {
                const auto it = r.rankings.find(rs.id);
                if (it != r.rankings.end()) rows.push_back(it->second);
            }
            write_jsonl_as(checked_out(ann_out, cfg.force), rows);
            report_failures(r.failures, "annotate");
            std::cerr << "wrote " << rows.size() << " rankings (" << r.failures.size()
                      << " failures) to " << ann_out << "\n";
            return 0;
        };
    });

    // score -------------------------------------------------------------
    auto* score = app.add_subcommand("score",
                                     "score records against their reference rankings");
    static std::string score_base = "base.jsonl";
    static std::string score_rankings = "rankings.jsonl";
    static std::string score_insts = "instances.jsonl";
    static std::string score_out = "scored.jsonl";
    add_common(score);
    score->add_option("--base", score_base, "records file");
    score->add_option("--rankings", score_rankings, "rankings file");
    score->add_option("--instances", score_insts, "instance pool file");
    score->add_option("--out", score_out, "scored records file to write");
    score->callback([&] {
        action = [&]() {
            const AppConfig cfg = resolve_config(fo);
            const auto records = read_jsonl_as<DatasetRecord>(score_base);
            const auto ranking_rows = read_jsonl_as<Ranking>(score_rankings);
            const auto pool = read_jsonl_as<TestInstance>(score_insts);
            std::map<std::string, Ranking> rankings;
            for (const Ranking& r : ranking_rows) rankings[r.id] = r;
            std::vector<StageFailure> failures;
            const auto insts_per_set = instances_from_rankings(rankings, pool, failures);
            const auto scored = score_records(records, rankings, insts_per_set, failures,
                                              cfg.eval);
            write_jsonl_as(checked_out(score_out, cfg.force), scored);
            report_failures(failures, "score");
            std::cerr << "wrote " << scored.size() << " scored records ("
                      << failures.size() << " failures) to " << score_out << "\n";
            return 0;
        };
    });

    // select ------------------------------------------------------------
    auto* select = app.add_subcommand("select", "retain records scoring >= threshold");
    static std::string select_in = "scored.jsonl";
    static std::string select_out = "hq.jsonl";
    add_common(select);
    select->add_option("--in", select_in, "scored records file");
    select->add_option("--out", select_out, "retained records file to write");
    select->callback([&] {
        action = [&]() {
            const AppConfig cfg = resolve_config(fo);
            const auto records = read_jsonl_as<DatasetRecord>(select_in);
            const auto kept = select_records(records, cfg.threshold);
            write_jsonl_as(checked_out(select_out, cfg.force), kept);
            std::cerr << "retained " << kept.size() << " of " << records.size()
                      << " records at threshold " << cfg.threshold << "\n";
            return 0;
        };
    });

    // augment -----------------------------------------------------------
    auto* augment = app.add_subcommand(
        "augment", "add paraphrased, permuted children to each base record");
    static std::string aug_in = "hq.jsonl";
    static std::string aug_out = "train.jsonl";
    add_common(augment);
    augment->add_option("--in", aug_in, "base records file");
    augment->add_option("--out", aug_out, "augmented records file to write");
    augment->callback([&] {
        action = [&]() {
            const AppConfig cfg = resolve_config(fo);
            const auto records = read_jsonl_as<DatasetRecord>(aug_in);
            const auto provider = make_provider(cfg);
            std::vector<StageFailure> flags;
            auto children = augment_all(records, cfg.variants, cfg.samples, *provider,
                                        cfg.seed, flags, cfg.max_concurrency);
            std::vector<DatasetRecord> train = records;
            for (auto& c : children) train.push_back(std::move(c));
            train = sorted_by_id(std::move(train));
            write_jsonl_as(checked_out(aug_out, cfg.force), train);
            report_failures(flags, "augment");
            std::cerr << "wrote " << train.size() << " records (" << children.size()
                      << " children) to " << aug_out << "\n";
            return 0;
        };
    });

    // export-sft --------------------------------------------------------
    auto* export_cmd = app.add_subcommand("export-sft",
                                          "export records as instruction-tuning rows");
    static std::string exp_in = "train.jsonl";
    static std::string exp_out = "sft.jsonl";
    add_common(export_cmd);
    export_cmd->add_option("--in", exp_in, "records file");
    export_cmd->add_option("--out", exp_out, "SFT rows file to write");
    export_cmd->callback([&] {
        action = [&]() {
            const AppConfig cfg = resolve_config(fo);
            const auto records = read_jsonl_as<DatasetRecord>(exp_in);
            const auto rows = export_sft(records);
            write_jsonl_as(checked_out(exp_out, cfg.force), rows);
            std::cerr << "wrote " << rows.size() << " SFT rows to " << exp_out << "\n";
            return 0;
        };
    });

    // eval --------------------------------------------------------------
    auto* eval_cmd = app.add_subcommand(
        "eval", "alignment of a formulation against ground truth on picked instances");
    static std::string eval_formulation;
    static std::string eval_reqs = "reqs.jsonl";
    static std::string eval_insts = "instances.jsonl";
    static std::string eval_set_id;
    add_common(eval_cmd);
    eval_cmd->add_option("--formulation", eval_formulation, "formulation text file")
        ->required();
    eval_cmd->add_option("--reqs", eval_reqs, "requirement sets file");
    eval_cmd->add_option("--instances", eval_insts, "instance pool file");
    eval_cmd->add_option("--set-id", eval_set_id, "requirement set id (default: first)");
    eval_cmd->callback([&] {
        action = [&]() {
            const AppConfig cfg = resolve_config(fo);
            const auto sets = read_jsonl_as<RequirementSet>(eval_reqs);
            if (sets.empty()) throw UsageError("requirement sets file is empty");
            const RequirementSet* chosen = &sets.front();
            if (!eval_set_id.empty()) {
                chosen = nullptr;
                for (const RequirementSet& rs : sets) {
                    if (rs.id == eval_set_id) chosen = &rs;
                }
                if (!chosen) throw UsageError("set id '" + eval_set_id + "' not found");
            }
            const auto pool = read_jsonl_as<TestInstance>(eval_insts);
            const auto insts = select_instances_for_set(
                chosen->id, pool, static_cast<std::size_t>(cfg.instances_per_set),
                substream_seed(cfg.seed, "pick"));
            const Formulation f =
                parse_formulation(read_text_file(eval_formulation), chosen->id);
            const Ranking truth_ranking = oracle_ranking(*chosen, insts);
            const auto truth_feasible = ground_truth_feasibility(*chosen, insts, cfg.eval);
            const AlignmentReport report = evaluate_alignment(f, insts, truth_ranking,
                                                              truth_feasible, cfg.alpha,
                                                              cfg.eval);
            std::cout << nlohmann::json(report).dump(2) << "\n";
            return 0;
        };
    });

    // report ------------------------------------------------------------
    auto* report_cmd = app.add_subcommand("report", "score histogram over a records file");
    static std::string report_in = "scored.jsonl";
    static bool report_json = false;
    add_common(report_cmd);
    report_cmd->add_option("--in", report_in, "scored records file");
    report_cmd->add_flag("--json", report_json, "emit JSON instead of text");
    report_cmd->callback([&] {
        action = [&]() {
            resolve_config(fo);
            const auto records = read_jsonl_as<DatasetRecord>(report_in);
            const ScoreHistogram h = report_scores(records);
            if (report_json) {
                std::cout << nlohmann::json(h).dump(2) << "\n";
            } else {
                std::cout << h.render_text();
            }
            return 0;
        };
    });

    // run-all -----------------------------------------------------------
    auto* run_all = app.add_subcommand("run-all", "full pipeline into an output directory");
    static std::string run_out;
    add_common(run_all);
    run_all->add_option("--out", run_out, "output directory (default from config)");
    run_all->callback([&] {
        action = [&]() {
            const AppConfig cfg = resolve_config(fo);
            const std::string dir = run_out.empty() ? cfg.out_dir : run_out;
            const RunReport rep = do_run_all(cfg, dir);
            std::cout << nlohmann::json(rep).dump(2) << "\n";
            return 0;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        return action ? action() : 1;
    } catch (const Error& e) {
        std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
        switch (e.category()) {
            case ErrorCategory::Usage: return 1;
            case ErrorCategory::Provider: return 3;
            case ErrorCategory::Data: return 2;
        }
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
