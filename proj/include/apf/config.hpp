#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "apf/eval.hpp"
#include "apf/pipeline.hpp"
#include "apf/prompt.hpp"
#include "apf/provider.hpp"
#include "apf/synth.hpp"

namespace apf {

// Everything the CLI can tune, with working defaults. Resolution order is
// flags > environment > config file > these defaults; the CLI logs the fully
// resolved configuration (and the effective seed) to stderr before running.
struct AppConfig {
    std::uint64_t seed = 0;
    double threshold = 0.7;       // selection cut on the consistency score
    double alpha = 0.5;           // objective/constraint mix in alignment
    int variants = 3;             // paraphrase versions per requirement (v)
    int samples = 5;              // augmented children per base record (l)
    int instances_per_set = 10;   // evaluation instances annotated per set
    int n_sets = 24;              // requirement sets derived by run-all
    int instances_total = 48;     // size of the shared instance pool
    bool augment_before_select = false;
    int max_concurrency = 4;      // provider calls in flight per batch

    // "mock-faithful" | "mock-corrupt" | "mock-noisy" | "http"
    std::string provider = "mock-faithful";
    MockOptions mock;
    ProviderConfig http;

    BandSpec bands;
    SamplingSpec sampling;
    IntentTemplateSpec intents = IntentTemplateSpec::default_five_band();
    EvalOptions eval;
    AnnotationStyle annotation;
    std::string expert_example;   // optional one-shot example for annotation

    std::string out_dir = "out";
    bool force = false;           // allow overwriting existing outputs

    void validate() const;
};

// JSON config file; unknown keys are rejected so typos fail loudly.
AppConfig load_config_file(const std::filesystem::path& path);

// APF_API_BASE overrides the HTTP endpoint. The API key itself is never
// stored: the provider reads it from the env var named by api_key_env.
void apply_env_overrides(AppConfig& cfg);

// Full resolved configuration as pretty JSON (for the stderr log).
std::string resolved_config_json(const AppConfig& cfg);

std::unique_ptr<Provider> make_provider(const AppConfig& cfg);

}  // namespace apf
