#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

#include "apf/prompt.hpp"
#include "apf/synth.hpp"

namespace apf {

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{250};
    double backoff_multiplier = 2.0;
};

struct ProviderConfig {
    std::string endpoint = "http://127.0.0.1:8000/v1/chat/completions";
    std::string model = "default";
    std::string api_key_env = "APF_API_KEY";  // name of the env var holding the key
    int max_concurrency = 4;
    RetryPolicy retry;
    std::chrono::milliseconds timeout{30000};
    // Decoding temperatures per request kind. Annotation and generation want
    // reproducible output; paraphrasing wants diversity.
    double temperature_paraphrase = 0.7;
    double temperature_generation = 0.0;
    double temperature_annotation = 0.0;

    double temperature_for(RequestKind kind) const;
    void validate() const;
};

struct Completion {
    std::string text;
    int attempts = 1;
};

class Provider {
public:
    virtual ~Provider() = default;
    virtual Completion complete(const Prompt& prompt) = 0;
};

// Chat-completion client over HTTP: POST {model, messages, temperature},
// answer read from choices[0].message.content. Transient failures (HTTP 429,
// 5xx, network errors, timeouts) are retried with exponential backoff; other
// HTTP statuses fail immediately. At most max_concurrency requests are in
// flight per client instance; the client is shareable across threads.
class HttpProvider : public Provider {
public:
    explicit HttpProvider(ProviderConfig cfg);
    ~HttpProvider() override;
    Completion complete(const Prompt& prompt) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

enum class MockMode {
    Faithful,     // ground-truth formulations and oracle rankings
    Corrupt,      // formulations corrupted with probability p
    NoisyRanker,  // oracle rankings with k random adjacent transpositions
};

struct MockOptions {
    MockMode mode = MockMode::Faithful;
    std::uint64_t seed = 0;
    // Corrupt mode:
    double corrupt_probability = 0.3;
    bool random_kind = true;  // pick the corruption kind per call
    CorruptionKind kind = CorruptionKind::FLIP_COMPARATOR;
    double shift_band_delta = 0.02;
    double perturb_threshold_factor = 0.1;
    // NoisyRanker mode:
    int transpositions = 2;
};

// Offline stand-in for a model. Answers are a pure function of the prompt and
// the configured seed: it compiles the requirement set carried in the prompt
// metadata and, for annotation prompts, reads the curves back out of the
// rendered instance table, so replays are byte-identical.
class MockProvider : public Provider {
public:
    explicit MockProvider(MockOptions opts = {});
    Completion complete(const Prompt& prompt) override;

private:
    MockOptions opts_;
};

}  // namespace apf
