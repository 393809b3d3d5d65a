#include "apf/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "json.hpp"

#include "apf/errors.hpp"
#include "apf/util.hpp"

namespace apf {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (!known.count(key)) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

Band band_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) {
        throw ConfigError(where + " must be a [lo, hi] pair");
    }
    Band b{j[0].get<double>(), j[1].get<double>()};
    b.validate();
    return b;
}

void load_bands(const json& j, BandSpec& bands) {
    reject_unknown_keys(j, {"low_stopband", "low_null", "passband", "high_null",
                            "high_stopband"},
                        "bands");
    if (j.contains("low_stopband")) bands.low_stopband = band_from(j["low_stopband"], "bands.low_stopband");
    if (j.contains("low_null")) bands.low_null = band_from(j["low_null"], "bands.low_null");
    if (j.contains("passband")) bands.passband = band_from(j["passband"], "bands.passband");
    if (j.contains("high_null")) bands.high_null = band_from(j["high_null"], "bands.high_null");
    if (j.contains("high_stopband")) bands.high_stopband = band_from(j["high_stopband"], "bands.high_stopband");
    bands.validate();
}

void load_sampling(const json& j, SamplingSpec& s) {
    reject_unknown_keys(j, {"n_samples", "z_lo", "z_hi"}, "sampling");
    s.n_samples = j.value("n_samples", s.n_samples);
    s.z_lo = j.value("z_lo", s.z_lo);
    s.z_hi = j.value("z_hi", s.z_hi);
    s.validate();
}

void load_intents(const json& j, IntentTemplateSpec& spec) {
    reject_unknown_keys(j, {"preset", "metric", "units", "strictness_margin",
                            "threshold_jitter"},
                        "intents");
    if (j.contains("preset")) {
        const std::string preset = j["preset"].get<std::string>();
        if (preset == "default_five_band") {
            spec = IntentTemplateSpec::default_five_band();
        } else if (preset == "passband_core") {
            spec = IntentTemplateSpec::passband_core();
        } else {
            throw ConfigError("unknown intents.preset '" + preset + "'");
        }
    }
    if (j.contains("metric")) spec.metric.name = j["metric"].get<std::string>();
    if (j.contains("units")) spec.metric.units = j["units"].get<std::string>();
    spec.strictness_margin = j.value("strictness_margin", spec.strictness_margin);
    spec.threshold_jitter = j.value("threshold_jitter", spec.threshold_jitter);
    spec.validate();
}

void load_mock(const json& j, MockOptions& m) {
    reject_unknown_keys(j, {"corrupt_probability", "random_kind", "kind",
                            "shift_band_delta", "perturb_threshold_factor",
                            "transpositions"},
                        "mock");
    m.corrupt_probability = j.value("corrupt_probability", m.corrupt_probability);
    m.random_kind = j.value("random_kind", m.random_kind);
    if (j.contains("kind")) {
        m.kind = corruption_kind_from_string(j["kind"].get<std::string>());
        m.random_kind = j.value("random_kind", false);
    }
    m.shift_band_delta = j.value("shift_band_delta", m.shift_band_delta);
    m.perturb_threshold_factor = j.value("perturb_threshold_factor", m.perturb_threshold_factor);
    m.transpositions = j.value("transpositions", m.transpositions);
}

void load_http(const json& j, ProviderConfig& p) {
    reject_unknown_keys(j, {"endpoint", "model", "api_key_env", "max_concurrency",
                            "timeout_ms", "max_attempts", "initial_backoff_ms",
                            "backoff_multiplier", "temperature_paraphrase",
                            "temperature_generation", "temperature_annotation"},
                        "http");
    p.endpoint = j.value("endpoint", p.endpoint);
    p.model = j.value("model", p.model);
    p.api_key_env = j.value("api_key_env", p.api_key_env);
    p.max_concurrency = j.value("max_concurrency", p.max_concurrency);
    if (j.contains("timeout_ms")) p.timeout = std::chrono::milliseconds(j["timeout_ms"].get<long>());
    p.retry.max_attempts = j.value("max_attempts", p.retry.max_attempts);
    if (j.contains("initial_backoff_ms")) {
        p.retry.initial_backoff = std::chrono::milliseconds(j["initial_backoff_ms"].get<long>());
    }
    p.retry.backoff_multiplier = j.value("backoff_multiplier", p.retry.backoff_multiplier);
    p.temperature_paraphrase = j.value("temperature_paraphrase", p.temperature_paraphrase);
    p.temperature_generation = j.value("temperature_generation", p.temperature_generation);
    p.temperature_annotation = j.value("temperature_annotation", p.temperature_annotation);
}

void load_eval(const json& j, EvalOptions& e) {
    reject_unknown_keys(j, {"empty_band", "feasibility_tol"}, "eval");
    if (j.contains("empty_band")) {
        const std::string policy = j["empty_band"].get<std::string>();
        if (policy == "error") {
            e.empty_band = EmptyBandPolicy::Error;
        } else if (policy == "zero") {
            e.empty_band = EmptyBandPolicy::Zero;
        } else {
            throw ConfigError("eval.empty_band must be \"error\" or \"zero\"");
        }
    }
    e.feasibility_tol = j.value("feasibility_tol", e.feasibility_tol);
}

void load_annotation(const json& j, AnnotationStyle& a) {
    reject_unknown_keys(j, {"expert_role", "axis_x", "axis_y", "data_description",
                            "char_budget"},
                        "annotation");
    a.expert_role = j.value("expert_role", a.expert_role);
    a.axis_x = j.value("axis_x", a.axis_x);
    a.axis_y = j.value("axis_y", a.axis_y);
    a.data_description = j.value("data_description", a.data_description);
    a.char_budget = j.value("char_budget", a.char_budget);
}

const char* empty_band_name(EmptyBandPolicy p) {
    return p == EmptyBandPolicy::Error ? "error" : "zero";
}

json band_json(const Band& b) { return json::array({b.lo, b.hi}); }

}  // namespace

void AppConfig::validate() const {
    if (threshold < -1.0 || threshold > 1.0) {
        throw ConfigError("threshold must lie in [-1, 1]");
    }
    if (alpha < 0.0 || alpha > 1.0) throw ConfigError("alpha must lie in [0, 1]");
    if (variants < 1) throw ConfigError("variants must be >= 1");
    if (samples < 0) throw ConfigError("samples must be >= 0");
    if (instances_per_set < 2) throw ConfigError("instances_per_set must be >= 2");
    if (n_sets < 1) throw ConfigError("n_sets must be >= 1");
    if (instances_total < instances_per_set) {
        throw ConfigError("instances_total must be >= instances_per_set");
    }
    if (max_concurrency < 1) throw ConfigError("max_concurrency must be >= 1");
    if (provider != "mock-faithful" && provider != "mock-corrupt" &&
        provider != "mock-noisy" && provider != "http") {
        throw ConfigError("provider must be one of mock-faithful, mock-corrupt, "
                          "mock-noisy, http");
    }
    bands.validate();
    sampling.validate();
    intents.validate();
    if (provider == "http") http.validate();
}

AppConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    reject_unknown_keys(j, {"seed", "threshold", "alpha", "variants", "samples",
                            "instances_per_set", "n_sets", "instances_total",
                            "augment_before_select", "max_concurrency", "provider",
                            "mock", "http", "bands", "sampling", "intents", "eval",
                            "annotation", "expert_example", "out_dir"},
                        "config file");
    AppConfig cfg;
    cfg.seed = j.value("seed", cfg.seed);
    cfg.threshold = j.value("threshold", cfg.threshold);
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.variants = j.value("variants", cfg.variants);
    cfg.samples = j.value("samples", cfg.samples);
    cfg.instances_per_set = j.value("instances_per_set", cfg.instances_per_set);
    cfg.n_sets = j.value("n_sets", cfg.n_sets);
    cfg.instances_total = j.value("instances_total", cfg.instances_total);
    cfg.augment_before_select = j.value("augment_before_select", cfg.augment_before_select);
    cfg.max_concurrency = j.value("max_concurrency", cfg.max_concurrency);
    cfg.provider = j.value("provider", cfg.provider);
    if (j.contains("mock")) load_mock(j["mock"], cfg.mock);
    if (j.contains("http")) load_http(j["http"], cfg.http);
    if (j.contains("bands")) load_bands(j["bands"], cfg.bands);
    if (j.contains("sampling")) load_sampling(j["sampling"], cfg.sampling);
    if (j.contains("intents")) load_intents(j["intents"], cfg.intents);
    if (j.contains("eval")) load_eval(j["eval"], cfg.eval);
    if (j.contains("annotation")) load_annotation(j["annotation"], cfg.annotation);
    cfg.expert_example = j.value("expert_example", cfg.expert_example);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    return cfg;
}

void apply_env_overrides(AppConfig& cfg) {
    if (const char* base = std::getenv("APF_API_BASE"); base && *base) {
        cfg.http.endpoint = base;
    }
}

std::string resolved_config_json(const AppConfig& cfg) {
    json j{
        {"seed", cfg.seed},
        {"threshold", cfg.threshold},
        {"alpha", cfg.alpha},
        {"variants", cfg.variants},
        {"samples", cfg.samples},
        {"instances_per_set", cfg.instances_per_set},
        {"n_sets", cfg.n_sets},
        {"instances_total", cfg.instances_total},
        {"augment_before_select", cfg.augment_before_select},
        {"max_concurrency", cfg.max_concurrency},
        {"provider", cfg.provider},
        {"mock",
         {{"corrupt_probability", cfg.mock.corrupt_probability},
          {"random_kind", cfg.mock.random_kind},
          {"kind", to_string(cfg.mock.kind)},
          {"shift_band_delta", cfg.mock.shift_band_delta},
          {"perturb_threshold_factor", cfg.mock.perturb_threshold_factor},
          {"transpositions", cfg.mock.transpositions}}},
        {"http",
         {{"endpoint", cfg.http.endpoint},
          {"model", cfg.http.model},
          {"api_key_env", cfg.http.api_key_env},
          {"max_concurrency", cfg.http.max_concurrency},
          {"timeout_ms", cfg.http.timeout.count()},
          {"max_attempts", cfg.http.retry.max_attempts},
          {"initial_backoff_ms", cfg.http.retry.initial_backoff.count()},
          {"backoff_multiplier", cfg.http.retry.backoff_multiplier},
          {"temperature_paraphrase", cfg.http.temperature_paraphrase},
          {"temperature_generation", cfg.http.temperature_generation},
          {"temperature_annotation", cfg.http.temperature_annotation}}},
        {"bands",
         {{"low_stopband", band_json(cfg.bands.low_stopband)},
          {"low_null", band_json(cfg.bands.low_null)},
          {"passband", band_json(cfg.bands.passband)},
          {"high_null", band_json(cfg.bands.high_null)},
          {"high_stopband", band_json(cfg.bands.high_stopband)}}},
        {"sampling",
         {{"n_samples", cfg.sampling.n_samples},
          {"z_lo", cfg.sampling.z_lo},
          {"z_hi", cfg.sampling.z_hi}}},
        {"intents",
         {{"metric", cfg.intents.metric.name},
          {"units", cfg.intents.metric.units},
          {"templates", cfg.intents.templates.size()},
          {"strictness_margin", cfg.intents.strictness_margin},
          {"threshold_jitter", cfg.intents.threshold_jitter}}},
        {"eval",
         {{"empty_band", empty_band_name(cfg.eval.empty_band)},
          {"feasibility_tol", cfg.eval.feasibility_tol}}},
        {"annotation",
         {{"expert_role", cfg.annotation.expert_role},
          {"axis_x", cfg.annotation.axis_x},
          {"axis_y", cfg.annotation.axis_y},
          {"char_budget", cfg.annotation.char_budget}}},
        {"expert_example_chars", cfg.expert_example.size()},
        {"out_dir", cfg.out_dir},
        {"force", cfg.force},
    };
    return j.dump(2);
}

std::unique_ptr<Provider> make_provider(const AppConfig& cfg) {
    if (cfg.provider == "http") return std::make_unique<HttpProvider>(cfg.http);
    MockOptions opts = cfg.mock;
    opts.seed = substream_seed(cfg.seed, "provider");
    if (cfg.provider == "mock-faithful") {
        opts.mode = MockMode::Faithful;
    } else if (cfg.provider == "mock-corrupt") {
        opts.mode = MockMode::Corrupt;
    } else if (cfg.provider == "mock-noisy") {
        opts.mode = MockMode::NoisyRanker;
    } else {
        throw ConfigError("unknown provider '" + cfg.provider + "'");
    }
    return std::make_unique<MockProvider>(opts);
}

}  // namespace apf
