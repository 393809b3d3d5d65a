#include "apf/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <random>
#include <set>
#include <thread>
#include <utility>

#include "apf/errors.hpp"
#include "apf/parser.hpp"
#include "apf/prompt.hpp"
#include "apf/util.hpp"

namespace apf {

const char* const kSftInstruction =
    "Translate the numbered design requirements below into an optimization "
    "formulation. Write exactly one line per requirement, in the same order. "
    "For an optimization goal write: objective <maximize|minimize> "
    "<min|max|mean>(<metric> in [<lo>, <hi>]). For a limit write: constraint "
    "<min|max|mean>(<metric> in [<lo>, <hi>]) <comparator> <value> where "
    "<comparator> is >= or <=. Output only these lines, nothing else. "
    "[sft-format v1]";

namespace {

// Runs fn(0..n-1) on up to `workers` threads, claiming indices from a shared
// counter. fn must not throw; callers store per-index errors instead.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    if (n == 0) return;
    workers = std::clamp<int>(workers, 1, static_cast<int>(std::min<std::size_t>(n, 64)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

// Uniform draw from [0, bound) using only the raw mt19937_64 stream, so the
// result does not depend on the standard library's distribution internals.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

std::vector<int> random_permutation(std::mt19937_64& rng, std::size_t n) {
    std::vector<int> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<int>(i);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t j = i + bounded(rng, n - i);
        std::swap(p[i], p[j]);
    }
    return p;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > std::numeric_limits<std::uint64_t>::max() / b)
        return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

std::uint64_t sat_pow(std::uint64_t base, std::size_t exp) {
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) r = sat_mul(r, base);
    return r;
}

std::uint64_t sat_factorial(std::size_t n) {
    std::uint64_t r = 1;
    for (std::size_t i = 2; i <= n; ++i) r = sat_mul(r, i);
    return r;
}

void check_permutation(const std::vector<int>& p, std::size_t n, const std::string& who) {
    if (p.size() != n) {
        throw InvariantViolation(who + ": permutation has " + std::to_string(p.size()) +
                                 " entries for " + std::to_string(n) + " items");
    }
    std::vector<char> seen(n, 0);
    for (int v : p) {
        if (v < 0 || static_cast<std::size_t>(v) >= n || seen[v]) {
            throw InvariantViolation(who + ": permutation is not a bijection on item positions");
        }
        seen[v] = 1;
    }
}

// All real literals in the text, canonicalized and sorted; used to verify a
// paraphrase kept every number intact.
std::vector<double> numbers_in(const std::string& text) {
    std::vector<double> out;
    const char* s = text.c_str();
    const char* end = s + text.size();
    const char* p = s;
    while (p < end) {
        const char c = *p;
        const bool digit_start = std::isdigit(static_cast<unsigned char>(c)) ||
                                 (c == '.' && p + 1 < end &&
                                  std::isdigit(static_cast<unsigned char>(p[1]))) ||
                                 ((c == '+' || c == '-') && p + 1 < end &&
                                  (std::isdigit(static_cast<unsigned char>(p[1])) ||
                                   (p[1] == '.' && p + 2 < end &&
                                    std::isdigit(static_cast<unsigned char>(p[2])))));
        if (!digit_start) {
            ++p;
            continue;
        }
        char* after = nullptr;
        const double v = std::strtod(p, &after);
        if (after == p) {
            ++p;
            continue;
        }
        out.push_back(canon6(v));
        p = after;
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool same_numbers(const std::string& a, const std::string& b) {
    return numbers_in(a) == numbers_in(b);
}

bool formulation_items_equal(const Formulation& a, const Formulation& b) {
    return a.items.size() == b.items.size() &&
           std::equal(a.items.begin(), a.items.end(), b.items.begin());
}

}  // namespace

void DatasetRecord::validate() const {
    if (id.empty()) throw InvariantViolation("dataset record has an empty id");
    requirement_set.validate();
    formulation.validate();
    if (requirement_set.id != id) {
        throw InvariantViolation("record '" + id + "': requirement set id '" +
                                 requirement_set.id + "' does not match");
    }
    if (formulation.id != id) {
        throw InvariantViolation("record '" + id + "': formulation id '" + formulation.id +
                                 "' does not match");
    }
    if (formulation.items.size() != requirement_set.size()) {
        throw InvariantViolation("record '" + id + "': " +
                                 std::to_string(formulation.items.size()) + " items for " +
                                 std::to_string(requirement_set.size()) + " requirements");
    }
    if (score) {
        if (!std::isfinite(*score)) throw NonFiniteError("score of record '" + id + "'");
        if (*score < -1.0 || *score > 1.0) {
            throw InvariantViolation("record '" + id + "': score " + std::to_string(*score) +
                                     " outside [-1, 1]");
        }
    }
    if (augmented) {
        if (base_id.empty()) {
            throw InvariantViolation("augmented record '" + id + "' has no base_id");
        }
        if (!permutation) {
            throw InvariantViolation("augmented record '" + id + "' has no permutation");
        }
        check_permutation(*permutation, formulation.items.size(), "record '" + id + "'");
    } else {
        if (!base_id.empty()) {
            throw InvariantViolation("base record '" + id + "' carries a base_id");
        }
        if (permutation) {
            throw InvariantViolation("base record '" + id + "' carries a permutation");
        }
    }
}

int ScoreHistogram::bin_of(double score) {
    if (!std::isfinite(score)) throw NonFiniteError("histogram score");
    const int b = static_cast<int>(std::floor((score + 1.0) * 10.0));
    return std::clamp(b, 0, kBins - 1);
}

double ScoreHistogram::proportion(int bin) const {
    if (bin < 0 || bin >= kBins) throw InvariantViolation("histogram bin out of range");
    return total == 0 ? 0.0 : static_cast<double>(counts[bin]) / static_cast<double>(total);
}

std::string ScoreHistogram::render_text() const {
    std::string out = "score histogram (n=" + std::to_string(total) + ")\n";
    char line[96];
    for (int b = 0; b < kBins; ++b) {
        const double lo = -1.0 + 0.1 * b;
        const double hi = lo + 0.1;
        std::snprintf(line, sizeof line, "[%5.2f, %5.2f%c %8zu  %5.1f%%\n", lo, hi,
                      b == kBins - 1 ? ']' : ')', counts[b], 100.0 * proportion(b));
        out += line;
    }
    return out;
}

std::vector<RequirementSet> derive_requirements(const std::vector<TestInstance>& insts,
                                                const BandSpec& bands,
                                                const IntentTemplateSpec& spec,
                                                std::uint64_t seed) {
    std::vector<RequirementSet> out;
    out.reserve(insts.size());
    for (const TestInstance& inst : insts) {
        out.push_back(extract_requirements(inst, bands, spec, substream_seed(seed, inst.id)));
    }
    return out;
}

std::vector<TestInstance> select_instances_for_set(const std::string& set_id,
                                                   const std::vector<TestInstance>& pool,
                                                   std::size_t count, std::uint64_t seed) {
    if (count < 2) throw TooFewInstancesError(count);
    if (pool.size() < count) throw TooFewInstancesError(pool.size());
    std::mt19937_64 rng(substream_seed(seed, "instances:" + set_id));
    std::vector<std::size_t> idx(pool.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + bounded(rng, idx.size() - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    std::sort(idx.begin(), idx.end());  // keep pool order within the pick
    std::vector<TestInstance> out;
    out.reserve(count);
    for (std::size_t i : idx) out.push_back(pool[i]);
    return out;
}

GenerateResult generate_base(const std::vector<RequirementSet>& reqsets, Provider& gateway,
                             int max_concurrency) {
    const std::size_t n = reqsets.size();
    std::vector<std::optional<DatasetRecord>> slots(n);
    std::vector<std::optional<StageFailure>> errs(n);
    parallel_for(n, max_concurrency, [&](std::size_t i) {
        const RequirementSet& rs = reqsets[i];
        try {
            const Prompt prompt = build_generation_prompt(rs);
            const Completion completion = gateway.complete(prompt);
            DatasetRecord rec;
            rec.id = rs.id;
            rec.requirement_set = rs;
            rec.formulation = parse_generation_response(completion.text, rs);
            rec.validate();
            slots[i] = std::move(rec);
        } catch (const std::exception& e) {
            errs[i] = StageFailure{rs.id, e.what()};
        }
    });
    GenerateResult result;
    for (std::size_t i = 0; i < n; ++i) {
        if (slots[i]) result.records.push_back(std::move(*slots[i]));
        if (errs[i]) result.failures.push_back(std::move(*errs[i]));
    }
    return result;
}

AnnotateResult annotate_references(const std::vector<RequirementSet>& reqsets,
                                   const std::map<std::string, std::vector<TestInstance>>& insts_per_set,
                                   Provider& gateway, int max_concurrency,
                                   const AnnotationStyle& style,
                                   const std::string& expert_example) {
    const std::size_t n = reqsets.size();
    std::vector<std::optional<Ranking>> slots(n);
    std::vector<std::optional<StageFailure>> errs(n);
    parallel_for(n, max_concurrency, [&](std::size_t i) {
        const RequirementSet& rs = reqsets[i];
        try {
            const auto it = insts_per_set.find(rs.id);
            if (it == insts_per_set.end() || it->second.size() < 2) {
                throw TooFewInstancesError(it == insts_per_set.end() ? 0 : it->second.size());
            }
            const std::vector<TestInstance>& insts = it->second;
            std::vector<std::string> ids;
            ids.reserve(insts.size());
            for (const TestInstance& t : insts) ids.push_back(t.id);
            const Prompt prompt = build_annotation_prompt(rs, insts, expert_example, style);
            // A malformed answer gets one fresh attempt; provider-side errors
            // were already retried inside the provider and fail straight away.
            for (int attempt = 0;; ++attempt) {
                const Completion completion = gateway.complete(prompt);
                try {
                    AnnotationResult ar = parse_annotation_response(completion.text, ids);
                    ar.ranking.id = rs.id;
                    ar.ranking.validate();
                    slots[i] = std::move(ar.ranking);
                    break;
                } catch (const Error& e) {
                    if (e.category() == ErrorCategory::Provider || attempt >= 1) throw;
                }
            }
        } catch (const std::exception& e) {
            errs[i] = StageFailure{rs.id, e.what()};
        }
    });
    AnnotateResult result;
    for (std::size_t i = 0; i < n; ++i) {
        if (slots[i]) result.rankings.emplace(reqsets[i].id, std::move(*slots[i]));
        if (errs[i]) result.failures.push_back(std::move(*errs[i]));
    }
    return result;
}

std::vector<DatasetRecord> score_records(const std::vector<DatasetRecord>& records,
                                         const std::map<std::string, Ranking>& rankings,
                                         const std::map<std::string, std::vector<TestInstance>>& insts_per_set,
                                         std::vector<StageFailure>& failures,
                                         const EvalOptions& opts) {
    std::vector<std::optional<DatasetRecord>> slots(records.size());
    std::map<std::string, double> base_scores;
    // Base records first: their scores feed the augmented children below.
    for (std::size_t i = 0; i < records.size(); ++i) {
        const DatasetRecord& r = records[i];
        if (r.augmented) continue;
        const auto rit = rankings.find(r.requirement_set.id);
        if (rit == rankings.end()) {
            failures.push_back({r.id, "unscorable: no reference ranking for set '" +
                                          r.requirement_set.id + "'"});
            continue;
        }
        const auto iit = insts_per_set.find(r.requirement_set.id);
        if (iit == insts_per_set.end()) {
            failures.push_back({r.id, "unscorable: no evaluation instances for set '" +
                                          r.requirement_set.id + "'"});
            continue;
        }
        try {
            const QualityScore q = quality_score(r.formulation, iit->second, rit->second, opts);
            DatasetRecord scored = r;
            scored.score = q.value;
            base_scores[r.id] = q.value;
            slots[i] = std::move(scored);
        } catch (const Error& e) {
            failures.push_back({r.id, std::string("unscorable: ") + e.what()});
        }
    }
    // Children share the inherent quality of their base: same items, same
    // semantics, just reordered. They inherit the base score.
    for (std::size_t i = 0; i < records.size(); ++i) {
        const DatasetRecord& r = records[i];
        if (!r.augmented) continue;
        if (r.score) {
            slots[i] = r;
            continue;
        }
        const auto bit = base_scores.find(r.base_id);
        if (bit == base_scores.end()) {
            failures.push_back({r.id, "unscorable: base record '" + r.base_id +
                                          "' has no score in this batch"});
            continue;
        }
        DatasetRecord scored = r;
        scored.score = bit->second;
        slots[i] = std::move(scored);
    }
    std::vector<DatasetRecord> out;
    for (auto& s : slots) {
        if (s) out.push_back(std::move(*s));
    }
    return out;
}

std::vector<DatasetRecord> select_records(const std::vector<DatasetRecord>& scored,
                                          double threshold) {
    if (!std::isfinite(threshold) || threshold < -1.0 || threshold > 1.0) {
        throw InvariantViolation("selection threshold must lie in [-1, 1]");
    }
    std::set<std::string> kept_bases;
    for (const DatasetRecord& r : scored) {
        if (!r.augmented && r.score && *r.score >= threshold) kept_bases.insert(r.id);
    }
    std::vector<DatasetRecord> out;
    for (const DatasetRecord& r : scored) {
        if (!r.augmented) {
            if (kept_bases.count(r.id)) out.push_back(r);
        } else if (kept_bases.count(r.base_id) && (!r.score || *r.score >= threshold)) {
            out.push_back(r);
        }
    }
    return out;
}

std::vector<DatasetRecord> augment_record(const DatasetRecord& base, int v, int l,
                                          Provider& gateway, std::uint64_t seed,
                                          std::vector<StageFailure>& flags) {
    if (v < 1) throw InvariantViolation("paraphrase versions per requirement must be >= 1");
    if (l < 0) throw InvariantViolation("children per record must be >= 0");
    base.validate();
    if (base.augmented) {
        throw InvariantViolation("record '" + base.id + "' is already augmented");
    }
    if (l == 0) return {};

    const std::size_t n = base.requirement_set.size();
    const std::uint64_t combo_space = sat_pow(static_cast<std::uint64_t>(v), n);
    const std::uint64_t budget = sat_mul(combo_space, sat_factorial(n));
    if (static_cast<std::uint64_t>(l) > budget) {
        throw CombinationBudgetError(
            "record '" + base.id + "': requested " + std::to_string(l) +
            " children but only " + std::to_string(budget) +
            " distinct (variant combination, permutation) pairs exist for n=" +
            std::to_string(n) + ", v=" + std::to_string(v));
    }

    // Paraphrase texts, falling back to the original wording per requirement
    // whenever the response (or a single entry) is unusable.
    std::vector<std::vector<std::string>> texts(n);
    for (std::size_t i = 0; i < n; ++i) {
        texts[i].assign(static_cast<std::size_t>(v), base.requirement_set.requirements[i].text);
    }
    std::string response;
    bool have_response = false;
    try {
        const Prompt prompt = build_paraphrase_prompt(base.requirement_set, v);
        response = gateway.complete(prompt).text;
        have_response = true;
    } catch (const std::exception& e) {
        flags.push_back({base.id, std::string("paraphrase request failed; children reuse "
                                              "the original wording: ") +
                                      e.what()});
    }
    if (have_response) {
        try {
            texts = parse_paraphrase_response(response, n, v);
        } catch (const Error& e) {
            flags.push_back({base.id, std::string("paraphrase response only partially "
                                                  "usable: ") +
                                          e.what()});
            const auto partial = parse_paraphrase_lenient(response, n, v);
            for (std::size_t i = 0; i < n; ++i) {
                if (partial[i]) texts[i] = *partial[i];
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (int j = 0; j < v; ++j) {
                const std::string& original = base.requirement_set.requirements[i].text;
                if (!same_numbers(original, texts[i][j])) {
                    flags.push_back({base.id, "paraphrase of requirement " +
                                                  std::to_string(i + 1) + " (variant " +
                                                  std::to_string(j + 1) +
                                                  ") changed numeric content; using the "
                                                  "original wording"});
                    texts[i][j] = original;
                }
            }
        }
    }

    std::mt19937_64 rng(substream_seed(seed, "augment:" + base.id));
    const bool combos_can_be_distinct = combo_space >= static_cast<std::uint64_t>(l);
    std::set<std::vector<int>> seen_combos;
    std::set<std::pair<std::vector<int>, std::vector<int>>> seen_pairs;

    std::vector<DatasetRecord> children;
    children.reserve(static_cast<std::size_t>(l));
    for (int k = 0; k < l; ++k) {
        std::vector<int> combo(n);
        std::vector<int> perm;
        for (long guard = 0;; ++guard) {
            if (guard > 1000000) {
                throw InvariantViolation("augmentation sampling stalled for record '" +
                                         base.id + "'");
            }
            for (std::size_t i = 0; i < n; ++i) {
                combo[i] = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(v)));
            }
            perm = random_permutation(rng, n);
            if (combos_can_be_distinct) {
                if (seen_combos.insert(combo).second) break;
            } else {
                if (seen_pairs.insert({combo, perm}).second) break;
            }
        }

        char suffix[16];
        std::snprintf(suffix, sizeof suffix, "-aug%02d", k + 1);
        const std::string child_id = base.id + suffix;

        DatasetRecord child;
        child.id = child_id;
        child.base_id = base.id;
        child.augmented = true;
        child.permutation = perm;
        child.score = base.score;

        child.requirement_set.id = child_id;
        child.requirement_set.requirements.reserve(n);
        std::vector<ItemKind> kinds;
        kinds.reserve(n);
        for (std::size_t j = 0; j < n; ++j) {
            const int src = perm[j];
            Requirement req = base.requirement_set.requirements[src];
            req.text = texts[src][combo[src]];
            child.requirement_set.requirements.push_back(std::move(req));
            kinds.push_back(base.formulation.items[src].kind);
        }
        const std::vector<std::string> names = canonical_item_names(kinds);
        child.formulation.id = child_id;
        child.formulation.items.reserve(n);
        for (std::size_t j = 0; j < n; ++j) {
            const FormulationItem& src = base.formulation.items[perm[j]];
            child.formulation.items.push_back(FormulationItem{src.kind, names[j], src.expr});
        }
        child.validate();
        children.push_back(std::move(child));
    }
    return children;
}

std::vector<DatasetRecord> augment_all(const std::vector<DatasetRecord>& records, int v,
                                       int l, Provider& gateway, std::uint64_t seed,
                                       std::vector<StageFailure>& flags,
                                       int max_concurrency) {
    const std::size_t n = records.size();
    std::vector<std::vector<DatasetRecord>> child_slots(n);
    std::vector<std::vector<StageFailure>> flag_slots(n);
    std::vector<std::optional<StageFailure>> errs(n);
    parallel_for(n, max_concurrency, [&](std::size_t i) {
        try {
            child_slots[i] = augment_record(records[i], v, l, gateway, seed, flag_slots[i]);
        } catch (const std::exception& e) {
            errs[i] = StageFailure{records[i].id, e.what()};
        }
    });
    std::vector<DatasetRecord> children;
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& f : flag_slots[i]) flags.push_back(std::move(f));
        if (errs[i]) flags.push_back(std::move(*errs[i]));
        for (auto& c : child_slots[i]) children.push_back(std::move(c));
    }
    return children;
}

Formulation restore_base_order(const Formulation& f, const std::vector<int>& permutation) {
    const std::size_t n = f.items.size();
    check_permutation(permutation, n, "formulation '" + f.id + "'");
    std::vector<FormulationItem> base_items(n);
    for (std::size_t j = 0; j < n; ++j) {
        base_items[static_cast<std::size_t>(permutation[j])] = f.items[j];
    }
    std::vector<ItemKind> kinds;
    kinds.reserve(n);
    for (const FormulationItem& item : base_items) kinds.push_back(item.kind);
    const std::vector<std::string> names = canonical_item_names(kinds);
    Formulation out;
    out.id = f.id;
    out.items.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        out.items.push_back(FormulationItem{base_items[j].kind, names[j], base_items[j].expr});
    }
    out.validate();
    return out;
}

std::vector<SftSample> export_sft(const std::vector<DatasetRecord>& records) {
    std::vector<const DatasetRecord*> ordered;
    ordered.reserve(records.size());
    for (const DatasetRecord& r : records) ordered.push_back(&r);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const DatasetRecord* a, const DatasetRecord* b) { return a->id < b->id; });
    for (std::size_t i = 1; i < ordered.size(); ++i) {
        if (ordered[i - 1]->id == ordered[i]->id) {
            throw InvariantViolation("duplicate record id '" + ordered[i]->id + "'");
        }
    }
    std::vector<SftSample> rows;
    rows.reserve(ordered.size());
    for (const DatasetRecord* r : ordered) {
        r->validate();
        SftSample s;
        s.instruction = kSftInstruction;
        s.input = requirements_text(r->requirement_set);
        s.output = print_formulation(r->formulation);
        s.score = r->score;
        s.base_id = r->augmented ? r->base_id : r->id;
        s.augmented = r->augmented;
        // Every exported output must survive a parse round trip unchanged.
        const Formulation reparsed = parse_formulation(s.output, r->formulation.id);
        if (!formulation_items_equal(reparsed, r->formulation)) {
            throw InvariantViolation("round-trip check failed for record '" + r->id + "'");
        }
        rows.push_back(std::move(s));
    }
    return rows;
}

ScoreHistogram report_scores(const std::vector<DatasetRecord>& records) {
    ScoreHistogram h;
    for (const DatasetRecord& r : records) {
        if (!r.score) continue;
        ++h.counts[ScoreHistogram::bin_of(*r.score)];
        ++h.total;
    }
    return h;
}

}  // namespace apf
