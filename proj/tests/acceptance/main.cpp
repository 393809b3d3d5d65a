// Acceptance gate: nine end-to-end checks over the whole pipeline, each
// reported as a single PASS/FAIL line. Derived constants (hand-computed
// fixture values, frozen per-seed counts) are literals here on purpose:
// regenerating them with library code would make the checks circular.
//
// Usage: apf_acceptance [criterion-number]

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "apf/config.hpp"
#include "apf/errors.hpp"
#include "apf/eval.hpp"
#include "apf/formulation.hpp"
#include "apf/parser.hpp"
#include "apf/pipeline.hpp"
#include "apf/provider.hpp"
#include "apf/ranking.hpp"
#include "apf/scoring.hpp"
#include "apf/serialize.hpp"
#include "apf/synth.hpp"
#include "apf/types.hpp"
#include "apf/util.hpp"
#include "generators.hpp"
#include "oracles.hpp"

#ifndef APF_CLI_PATH
#error "APF_CLI_PATH must point at the apf executable"
#endif

using namespace apf;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20260823;

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& msg) {
    if (!ok) throw CheckFailure(msg);
}

void require_close(double got, double want, double tol, const std::string& what) {
    if (!(std::fabs(got - want) <= tol)) {
        std::ostringstream ss;
        ss.precision(17);
        ss << what << ": got " << got << ", want " << want << " (tol " << tol << ")";
        throw CheckFailure(ss.str());
    }
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args, const fs::path& dir) {
    const fs::path err_file = dir / "cli-stderr.txt";
    const std::string cmd = std::string(APF_CLI_PATH) + " " + args + " >/dev/null 2>" +
                            err_file.string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Flat curve: every sample carries the same value, so band aggregates are
// trivially that value and feasibility can be read off by eye.
TestInstance flat(const std::string& id, double value) {
    TestInstance t;
    t.id = id;
    t.samples = {{0.0, value}, {0.5, value}, {1.0, value}};
    return t;
}

// Per-set evaluation instances near a source design: each neighbor perturbs
// every design component by U(-0.25, 0.25), clamped to [0, 1]. Instances
// close to the source straddle its extracted thresholds, which is what makes
// scores discriminate between faithful and corrupted formulations.
std::vector<TestInstance> neighbor_instances(const TestInstance& source,
                                             const BandSpec& bands,
                                             const SamplingSpec& sampling,
                                             std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.25, 0.25);
    std::vector<TestInstance> out;
    out.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        DesignParams x{source.design_params};
        if (x.x.empty()) x.x.assign(8, 0.5);
        for (double& c : x.x) {
            c = std::min(1.0, std::max(0.0, c + jitter(rng)));
        }
        char id[32];
        std::snprintf(id, sizeof id, "nb-%06zu", j + 1);
        out.push_back(render_curve(x, bands, sampling, rng(), id));
    }
    return out;
}

// ---------------------------------------------------------------------------
// 1. Induced rankings match a brute-force pairwise oracle on random fixtures.
// ---------------------------------------------------------------------------
void criterion1() {
    std::mt19937_64 rng(substream_seed(kSeed, "criterion-1"));
    const auto t0 = std::chrono::steady_clock::now();
    for (int t = 0; t < 200; ++t) {
        const int n_inst = testgen::uniform_int(rng, 1, 8);
        const int n_obj = testgen::uniform_int(rng, 1, 3);
        const int n_con = testgen::uniform_int(rng, 0, 4);
        const Formulation f =
            testgen::random_formulation(rng, n_obj, n_con, "fix-" + std::to_string(t));
        const std::vector<TestInstance> insts = testgen::random_instances(rng, n_inst);
        const Ranking got = induced_ranking(f, insts);
        const Ranking want = oracle::reference_ranking(f, insts);
        require(got.instance_ids == want.instance_ids,
                "fixture " + std::to_string(t) + ": id order diverged");
        require(got.ranks == want.ranks,
                "fixture " + std::to_string(t) + ": ranks diverged from the oracle");
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require(elapsed < 10.0,
            "200 fixtures took " + std::to_string(elapsed) + " s (budget 10 s)");
}

// ---------------------------------------------------------------------------
// 2. Tie-free rank correlation equals the closed form 1 - 6*sum(d^2)/(n(n^2-1)).
// ---------------------------------------------------------------------------
void criterion2() {
    const auto ids_of = [](std::size_t n) {
        std::vector<std::string> ids(n);
        for (std::size_t i = 0; i < n; ++i) ids[i] = "i-" + std::to_string(i + 1);
        return ids;
    };
    const auto ranking_of = [](std::string id, std::vector<std::string> ids,
                               std::vector<double> ranks) {
        Ranking r;
        r.id = std::move(id);
        r.instance_ids = std::move(ids);
        r.ranks = std::move(ranks);
        r.validate();
        return r;
    };

    for (std::size_t n = 2; n <= 50; ++n) {
        std::vector<double> up(n), down(n);
        for (std::size_t i = 0; i < n; ++i) {
            up[i] = static_cast<double>(i + 1);
            down[i] = static_cast<double>(n - i);
        }
        const Ranking a = ranking_of("a", ids_of(n), up);
        require(spearman(a, ranking_of("b", ids_of(n), up)) == 1.0,
                "identity at n=" + std::to_string(n) + " is not exactly 1.0");
        require(spearman(a, ranking_of("b", ids_of(n), down)) == -1.0,
                "reversal at n=" + std::to_string(n) + " is not exactly -1.0");
    }

    std::mt19937_64 rng(substream_seed(kSeed, "criterion-2"));
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n =
            static_cast<std::size_t>(testgen::uniform_int(rng, 2, 50));
        std::vector<double> up(n), perm(n);
        for (std::size_t i = 0; i < n; ++i) up[i] = perm[i] = static_cast<double>(i + 1);
        std::shuffle(perm.begin(), perm.end(), rng);
        const double got = spearman(ranking_of("a", ids_of(n), up),
                                    ranking_of("b", ids_of(n), perm));
        const double want = oracle::spearman_closed_form(up, perm);
        require_close(got, want, 1e-12, "trial " + std::to_string(t));
    }
}

// ---------------------------------------------------------------------------
// 3. Ground-truth formulations score exactly 1.0 against the oracle ranking.
// ---------------------------------------------------------------------------
void criterion3() {
    const BandSpec bands;
    const SamplingSpec sampling;
    const IntentTemplateSpec intents = IntentTemplateSpec::default_five_band();
    const std::vector<TestInstance> sources =
        sample_instances(100, bands, sampling, substream_seed(kSeed, "c3-sources"));

    for (std::size_t i = 0; i < sources.size(); ++i) {
        const RequirementSet reqs = extract_requirements(
            sources[i], bands, intents,
            substream_seed(kSeed, "c3-req-" + std::to_string(i)));
        const Formulation truth = compile_requirements(reqs);

        // Draw instance sets until the oracle ranking is tie-free.
        std::vector<TestInstance> insts;
        Ranking reference;
        bool tie_free = false;
        for (int attempt = 0; attempt < 10 && !tie_free; ++attempt) {
            insts = sample_instances(
                10, bands, sampling,
                substream_seed(kSeed, "c3-inst-" + std::to_string(i) + "-" +
                                          std::to_string(attempt)),
                "pt-");
            reference = oracle_ranking(reqs, insts);
            tie_free = std::set<double>(reference.ranks.begin(), reference.ranks.end())
                           .size() == reference.ranks.size();
        }
        require(tie_free, "set " + reqs.id + ": no tie-free instance draw in 10 tries");

        const QualityScore s = quality_score(truth, insts, reference);
        require(s.value == 1.0, "set " + reqs.id + ": ground truth scored " +
                                    std::to_string(s.value) + " instead of 1.0");
    }
}

// ---------------------------------------------------------------------------
// 4. Threshold filtering separates corrupted from faithful formulations.
// ---------------------------------------------------------------------------
void criterion4() {
    const BandSpec bands;
    const SamplingSpec sampling;
    const double threshold = 0.7;

    const std::vector<TestInstance> sources =
        sample_instances(500, bands, sampling, substream_seed(kSeed, "c4-sources"));
    const std::vector<RequirementSet> sets = derive_requirements(
        sources, bands, IntentTemplateSpec::default_five_band(),
        substream_seed(kSeed, "c4-derive"));
    require(sets.size() == 500, "expected 500 derived sets");

    MockOptions opts;
    opts.mode = MockMode::Corrupt;
    opts.seed = substream_seed(kSeed, "c4-provider");
    opts.corrupt_probability = 0.3;
    opts.random_kind = false;
    opts.kind = CorruptionKind::FLIP_COMPARATOR;
    MockProvider provider(opts);

    const GenerateResult gen = generate_base(sets, provider);
    require(gen.failures.empty(), "generation reported failures");
    require(gen.records.size() == 500, "expected 500 records");

    std::size_t corrupted_total = 0, corrupted_filtered = 0;
    std::size_t faithful_total = 0, faithful_retained = 0;
    for (std::size_t i = 0; i < gen.records.size(); ++i) {
        const DatasetRecord& rec = gen.records[i];
        const bool corrupted = print_formulation(rec.formulation) !=
                               print_formulation(compile_requirements(sets[i]));
        const std::vector<TestInstance> insts = neighbor_instances(
            sources[i], bands, sampling,
            substream_seed(kSeed, "c4-nb-" + rec.id), 10);
        const Ranking reference = oracle_ranking(sets[i], insts);
        const double score = quality_score(rec.formulation, insts, reference).value;
        const bool kept = score >= threshold;
        if (corrupted) {
            ++corrupted_total;
            if (!kept) ++corrupted_filtered;
        } else {
            ++faithful_total;
            if (kept) ++faithful_retained;
        }
    }

    require(corrupted_total + faithful_total == 500, "classification lost records");
    require(corrupted_filtered * 100 >= corrupted_total * 95,
            "filtered only " + std::to_string(corrupted_filtered) + " of " +
                std::to_string(corrupted_total) + " corrupted records (< 95%)");
    require(faithful_retained * 100 >= faithful_total * 95,
            "retained only " + std::to_string(faithful_retained) + " of " +
                std::to_string(faithful_total) + " faithful records (< 95%)");

    // Frozen per-seed counts: any drift in sampling, corruption, evaluation,
    // or scoring shows up here as an exact-count mismatch.
    const std::size_t expect_corrupted = 161;
    const std::size_t expect_filtered = 161;
    const std::size_t expect_retained = 339;
    const std::string observed = "observed corrupted=" + std::to_string(corrupted_total) +
                                 " filtered=" + std::to_string(corrupted_filtered) +
                                 " retained=" + std::to_string(faithful_retained);
    require(corrupted_total == expect_corrupted &&
                corrupted_filtered == expect_filtered &&
                faithful_retained == expect_retained,
            "per-seed counts drifted: " + observed);
}

// ---------------------------------------------------------------------------
// 5. Hand-built curve vs six transcribed formulation variants of the bundled
//    benchmark requirements, checked against hand-computed values.
// ---------------------------------------------------------------------------
void criterion5() {
    // Curve with three samples inside each band of interest; values chosen so
    // every aggregate is a short decimal. Band contents:
    //   passband   [0.95, 1.08] -> {-4.0, -2.5, -5.5}: min -5.5, max -2.5, mean -4.0
    //   stopband   [0.8, 0.92]  -> {-10.0, -3.2, -6.8}: max -3.2, mean -20/3
    //   null       [1.08, 1.12] -> {-5.5, -12.4, -11.9}: min -12.4, max -5.5, mean -29.8/3
    // The 1.08 sample sits on the shared passband/null edge and belongs to both.
    TestInstance curve;
    curve.id = "hand-curve";
    curve.samples = {{0.75, -20.0}, {0.8, -10.0}, {0.85, -3.2}, {0.92, -6.8},
                     {0.95, -4.0},  {1.0, -2.5},  {1.08, -5.5}, {1.1, -12.4},
                     {1.12, -11.9}, {1.2, -15.0}};
    curve.validate();

    // The bundled benchmark requirements compile to exactly the first variant.
    const std::string correct_text =
        "objective maximize mean(radiation_efficiency in [0.95, 1.08])\n"
        "constraint min(radiation_efficiency in [0.95, 1.08]) >= -4.49\n"
        "constraint max(radiation_efficiency in [0.8, 0.92]) <= -4.39\n"
        "constraint min(radiation_efficiency in [1.08, 1.12]) <= -11.74\n";
    require(print_formulation(compile_requirements(benchmark_requirement_set())) ==
                correct_text,
            "compiled benchmark requirements do not match the reference text");

    // Six ways the same four requirements get written down: a fully correct
    // one, aggregate substitutions, and comparator/sign mistakes.
    struct Variant {
        const char* label;
        std::string text;
        double objective;                  // minimization convention
        std::vector<double> residuals;     // constraint order as written
        std::vector<bool> feasible;
    };
    const std::vector<Variant> variants = {
        {"correct transcription", correct_text, 4.0,
         {1.01, 1.19, -0.66}, {false, false, true}},
        {"max objective, null depth via max",
         "objective maximize max(radiation_efficiency in [0.95, 1.08])\n"
         "constraint min(radiation_efficiency in [0.95, 1.08]) >= -4.49\n"
         "constraint max(radiation_efficiency in [0.8, 0.92]) <= -4.39\n"
         "constraint max(radiation_efficiency in [1.08, 1.12]) <= -11.74\n",
         2.5, {1.01, 1.19, 6.24}, {false, false, false}},
        {"sign error on the passband floor",
         "objective maximize mean(radiation_efficiency in [0.95, 1.08])\n"
         "constraint min(radiation_efficiency in [0.95, 1.08]) >= 4.49\n"
         "constraint max(radiation_efficiency in [0.8, 0.92]) <= -4.39\n"
         "constraint max(radiation_efficiency in [1.08, 1.12]) <= -11.74\n",
         4.0, {9.99, 1.19, 6.24}, {false, false, false}},
        {"max objective plus floor sign error",
         "objective maximize max(radiation_efficiency in [0.95, 1.08])\n"
         "constraint min(radiation_efficiency in [0.95, 1.08]) >= 4.49\n"
         "constraint max(radiation_efficiency in [0.8, 0.92]) <= -4.39\n"
         "constraint max(radiation_efficiency in [1.08, 1.12]) <= -11.74\n",
         2.5, {9.99, 1.19, 6.24}, {false, false, false}},
        {"null depth via max, rest correct",
         "objective maximize mean(radiation_efficiency in [0.95, 1.08])\n"
         "constraint min(radiation_efficiency in [0.95, 1.08]) >= -4.49\n"
         "constraint max(radiation_efficiency in [0.8, 0.92]) <= -4.39\n"
         "constraint max(radiation_efficiency in [1.08, 1.12]) <= -11.74\n",
         4.0, {1.01, 1.19, 6.24}, {false, false, false}},
        {"mean aggregates with flipped comparator and sign errors",
         "objective maximize mean(radiation_efficiency in [0.95, 1.08])\n"
         "constraint mean(radiation_efficiency in [0.95, 1.08]) <= -4.49\n"
         "constraint mean(radiation_efficiency in [0.8, 0.92]) <= 4.39\n"
         "constraint mean(radiation_efficiency in [1.08, 1.12]) <= 11.74\n",
         4.0,
         {0.49, -20.0 / 3.0 - 4.39, -29.8 / 3.0 - 11.74},
         {false, true, true}},
    };

    for (const Variant& v : variants) {
        const Formulation f = parse_formulation(v.text, "variant");
        const std::vector<double> objs = objective_values(f, curve);
        require(objs.size() == 1, std::string(v.label) + ": expected one objective");
        require_close(objs[0], v.objective, 1e-9,
                      std::string(v.label) + ": objective value");
        const std::vector<double> res = constraint_residuals(f, curve);
        require(res.size() == v.residuals.size(),
                std::string(v.label) + ": residual count");
        for (std::size_t k = 0; k < res.size(); ++k) {
            require_close(res[k], v.residuals[k], 1e-9,
                          std::string(v.label) + ": residual " + std::to_string(k + 1));
            require((res[k] < 0.0) == v.feasible[k],
                    std::string(v.label) + ": feasibility bit " + std::to_string(k + 1));
        }
        const Feasibility fs = feasibility(f, curve);
        const bool all_ok = std::all_of(v.feasible.begin(), v.feasible.end(),
                                        [](bool b) { return b; });
        require(fs.feasible == all_ok, std::string(v.label) + ": overall feasibility");
    }
}

// ---------------------------------------------------------------------------
// 6. Alignment metrics against hand-computed values on a five-instance fixture.
// ---------------------------------------------------------------------------
void criterion6() {
    const MetricId m{"gain", "dB"};
    const Band band{0.0, 1.0};

    Formulation f;
    f.id = "align-fixture";
    f.items.push_back(make_objective("obj1", Direction::MAXIMIZE, AggOp::MEAN, m, band));
    f.items.push_back(make_constraint("c1", AggOp::MIN, m, band, Comparator::GE, -5.0));
    f.items.push_back(make_constraint("c2", AggOp::MAX, m, band, Comparator::LE, 0.0));
    f.validate();

    // Flat instances at -2, -7, -1, -6, -4. Under f:
    //   objective ranks (higher value better): C A E D B -> (2, 5, 1, 4, 3)
    //   c1 (value > -5):  (1, 0, 1, 0, 1)
    //   c2 (value < 0):   (1, 1, 1, 1, 1)
    const std::vector<TestInstance> insts = {flat("A", -2.0), flat("B", -7.0),
                                             flat("C", -1.0), flat("D", -6.0),
                                             flat("E", -4.0)};

    // Hand-declared ground truth disagrees with f on purpose: D is deemed
    // feasible, and A/E swap places relative to the objective ordering.
    Ranking truth;
    truth.id = "truth";
    truth.instance_ids = {"A", "B", "C", "D", "E"};
    truth.ranks = {3.0, 5.0, 1.0, 4.0, 2.0};
    truth.validate();
    const std::vector<bool> truth_feasible = {true, false, true, true, true};

    // a_obj: Spearman((2,5,1,4,3), (3,5,1,4,2)) = 9/10.
    // a_con: c1 agrees on 4 of 5, c2 agrees on 4 of 5 -> mean 0.8.
    const AlignmentReport rep =
        evaluate_alignment(f, insts, truth, truth_feasible, 0.5);
    require_close(rep.a_obj, 0.9, 1e-12, "a_obj");
    require_close(rep.a_con, 0.8, 1e-12, "a_con");
    require_close(rep.a_total, 0.85, 1e-12, "a_total");
    require(rep.per_item.size() == 3, "expected three per-item entries");

    // Single-constraint classification: predictions (1,0,1) against ground
    // truth (1,1,1) must give accuracy 2/3.
    Formulation g;
    g.id = "two-thirds";
    g.items.push_back(make_objective("obj1", Direction::MAXIMIZE, AggOp::MEAN, m, band));
    g.items.push_back(make_constraint("c1", AggOp::MIN, m, band, Comparator::GE, -5.0));
    g.validate();
    const std::vector<TestInstance> three = {flat("A", -2.0), flat("B", -7.0),
                                             flat("C", -1.0)};
    require_close(alignment_con(g, three, {true, true, true}), 2.0 / 3.0, 1e-12,
                  "(1,0,1) vs (1,1,1)");
}

// ---------------------------------------------------------------------------
// 7. The full CLI pipeline is byte-reproducible and lineage-closed.
// ---------------------------------------------------------------------------
void criterion7() {
    const fs::path scratch =
        fs::temp_directory_path() /
        ("apf-acceptance-" + std::to_string(::getpid()) + "-c7");
    fs::remove_all(scratch);
    fs::create_directories(scratch);

    const fs::path cfg_path = scratch / "config.json";
    std::ofstream(cfg_path) << R"({
      "n_sets": 6,
      "instances_total": 12,
      "instances_per_set": 4,
      "variants": 3,
      "samples": 3
    })";

    const fs::path out1 = scratch / "run1";
    const fs::path out2 = scratch / "run2";
    const std::string common = "run-all --config " + cfg_path.string() +
                               " --provider mock-faithful --seed 20260823 --out ";
    require(run_cli(common + out1.string(), scratch) == 0, "first run failed");
    require(run_cli(common + out2.string(), scratch) == 0, "second run failed");

    for (const char* name :
         {"instances.jsonl", "reqs.jsonl", "base.jsonl", "rankings.jsonl",
          "scored.jsonl", "hq.jsonl", "train.jsonl", "sft.jsonl", "report.json"}) {
        const std::string a = slurp(out1 / name);
        require(!a.empty(), std::string(name) + " is missing or empty");
        require(a == slurp(out2 / name),
                std::string(name) + " differs between identically seeded runs");
    }

    const auto train = read_jsonl_as<DatasetRecord>(out1 / "train.jsonl");
    std::map<std::string, const DatasetRecord*> bases;
    std::size_t n_children = 0;
    for (const DatasetRecord& r : train) {
        if (!r.augmented) bases[r.id] = &r;
    }
    require(bases.size() == 6, "expected 6 base records, got " +
                                   std::to_string(bases.size()));
    for (const DatasetRecord& r : train) {
        if (!r.augmented) continue;
        ++n_children;
        const auto it = bases.find(r.base_id);
        require(it != bases.end(), "orphaned augmented record " + r.id);
        require(r.permutation.has_value(), r.id + " lacks a permutation");
        const Formulation restored =
            restore_base_order(r.formulation, *r.permutation);
        require(print_formulation(restored) ==
                    print_formulation(it->second->formulation),
                "un-permuting " + r.id + " does not recover its base formulation");
    }
    require(n_children == 18,
            "expected 18 augmented records, got " + std::to_string(n_children));

    fs::remove_all(scratch);
}

// ---------------------------------------------------------------------------
// 8. Dataset-scale corridor: 2,000 sets through corrupt generation, oracle
//    scoring, threshold selection and 5-fold augmentation land near the
//    expected exported row count.
// ---------------------------------------------------------------------------
void criterion8() {
    const BandSpec bands;
    const SamplingSpec sampling;
    const int v = 3, l = 5;
    const double threshold = 0.7;

    const std::vector<TestInstance> sources =
        sample_instances(2000, bands, sampling, substream_seed(kSeed, "c8-sources"));
    const std::vector<RequirementSet> sets = derive_requirements(
        sources, bands, IntentTemplateSpec::default_five_band(),
        substream_seed(kSeed, "c8-derive"));

    MockOptions opts;
    opts.mode = MockMode::Corrupt;
    opts.seed = substream_seed(kSeed, "c8-provider");
    // Tuned so that, with corrupted records almost always filtered at 0.7 and
    // faithful ones almost always kept, about 2000 * (1 - p) bases survive and
    // (1 + l) rows per base puts the export near 7,879.
    opts.corrupt_probability = 0.343;
    opts.random_kind = false;
    opts.kind = CorruptionKind::FLIP_COMPARATOR;
    MockProvider provider(opts);

    GenerateResult gen = generate_base(sets, provider);
    require(gen.failures.empty(), "generation reported failures");

    std::vector<DatasetRecord> scored;
    scored.reserve(gen.records.size());
    for (std::size_t i = 0; i < gen.records.size(); ++i) {
        DatasetRecord rec = gen.records[i];
        const std::vector<TestInstance> insts = neighbor_instances(
            sources[i], bands, sampling,
            substream_seed(kSeed, "c8-nb-" + rec.id), 10);
        const Ranking reference = oracle_ranking(sets[i], insts);
        rec.score = quality_score(rec.formulation, insts, reference).value;
        scored.push_back(std::move(rec));
    }

    const std::vector<DatasetRecord> hq = select_records(scored, threshold);
    std::vector<StageFailure> flags;
    std::vector<DatasetRecord> train = hq;
    for (DatasetRecord& c :
         augment_all(hq, v, l, provider, substream_seed(kSeed, "c8-augment"), flags)) {
        train.push_back(std::move(c));
    }
    const std::vector<SftSample> rows = export_sft(train);

    const double target = 7879.0;
    require(std::fabs(static_cast<double>(rows.size()) - target) <= 0.2 * target,
            "exported " + std::to_string(rows.size()) +
                " rows, outside [6303.2, 9454.8]");

    // Frozen per-seed count for drift detection.
    const std::size_t expect_rows = 7884;
    require(rows.size() == expect_rows,
            "per-seed row count drifted: observed " + std::to_string(rows.size()));
}

// ---------------------------------------------------------------------------
// 9. print -> parse -> print is byte-stable on random formulations.
// ---------------------------------------------------------------------------
void criterion9() {
    std::mt19937_64 rng(substream_seed(kSeed, "criterion-9"));
    for (int t = 0; t < 1000; ++t) {
        const Formulation f = testgen::random_formulation(
            rng, testgen::uniform_int(rng, 1, 3), testgen::uniform_int(rng, 0, 4),
            "rt-" + std::to_string(t));
        const std::string once = print_formulation(f);
        const std::string twice = print_formulation(parse_formulation(once, f.id));
        require(once == twice, "trial " + std::to_string(t) + ": reprint diverged");
    }
}

struct Criterion {
    int number;
    const char* summary;
    std::function<void()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "induced rankings match the brute-force oracle on 200 random fixtures",
         criterion1},
        {2, "rank correlation matches the closed form to 1e-12 over 1000 permutations",
         criterion2},
        {3, "ground-truth formulations score exactly 1.0 on 100 benchmark sets",
         criterion3},
        {4, "threshold 0.7 filters >= 95% corrupted and keeps >= 95% faithful records",
         criterion4},
        {5, "six transcribed formulation variants match hand-computed values to 1e-9",
         criterion5},
        {6, "alignment metrics match hand-computed values to 1e-12", criterion6},
        {7, "run-all is byte-reproducible with closed, invertible lineage", criterion7},
        {8, "2000-set corrupt run exports a row count within 20% of 7879", criterion8},
        {9, "1000 random formulations survive print -> parse -> print byte-identically",
         criterion9},
    };

    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    int failures = 0, ran = 0;
    for (const Criterion& c : criteria) {
        if (only != 0 && c.number != only) continue;
        ++ran;
        try {
            c.run();
            std::printf("PASS criterion %d: %s\n", c.number, c.summary);
        } catch (const std::exception& e) {
            ++failures;
            std::printf("FAIL criterion %d: %s -- %s\n", c.number, c.summary, e.what());
        }
        std::fflush(stdout);
    }
    if (ran == 0) {
        std::fprintf(stderr, "no such criterion: %d\n", only);
        return 1;
    }
    std::printf("%d/%d criteria passed\n", ran - failures, ran);
    return failures == 0 ? 0 : 1;
}
