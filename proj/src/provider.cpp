#include "apf/provider.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <semaphore>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "apf/errors.hpp"
#include "apf/util.hpp"

namespace apf {

using nlohmann::json;

double ProviderConfig::temperature_for(RequestKind kind) const {
    switch (kind) {
        case RequestKind::PARAPHRASE: return temperature_paraphrase;
        case RequestKind::GENERATION: return temperature_generation;
        case RequestKind::ANNOTATION: return temperature_annotation;
    }
    return 0.0;
}

void ProviderConfig::validate() const {
    if (max_concurrency < 1) {
        throw InvariantViolation("provider max_concurrency must be >= 1, got " +
                                 std::to_string(max_concurrency));
    }
    if (retry.max_attempts < 1) {
        throw InvariantViolation("provider retry attempts must be >= 1, got " +
                                 std::to_string(retry.max_attempts));
    }
    if (endpoint.empty()) throw InvariantViolation("provider endpoint must be nonempty");
}

// ---- HTTP ------------------------------------------------------------------

namespace {

struct SplitUrl {
    std::string base;  // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw InvariantViolation("endpoint must start with http:// or https://: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return SplitUrl{url, "/"};
    return SplitUrl{url.substr(0, path_start), url.substr(path_start)};
}

bool transient_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

}  // namespace

struct HttpProvider::Impl {
    ProviderConfig cfg;
    SplitUrl url;
    std::counting_semaphore<1024> slots;

    explicit Impl(ProviderConfig c)
        : cfg(std::move(c)),
          url(split_url(cfg.endpoint)),
          slots(std::min(cfg.max_concurrency, 1024)) {}
};

HttpProvider::HttpProvider(ProviderConfig cfg) {
    cfg.validate();
    impl_ = std::make_unique<Impl>(std::move(cfg));
}

HttpProvider::~HttpProvider() = default;

Completion HttpProvider::complete(const Prompt& prompt) {
    impl_->slots.acquire();
    struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
    } release{impl_->slots};

    json body = {
        {"model", impl_->cfg.model},
        {"messages", json::array({json{{"role", "user"}, {"content", prompt.render()}}})},
        {"temperature", impl_->cfg.temperature_for(prompt.meta.kind)},
    };
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (const char* key = std::getenv(impl_->cfg.api_key_env.c_str()); key && *key) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    int last_status = 0;
    std::string last_detail;
    auto backoff = impl_->cfg.retry.initial_backoff;
    for (int attempt = 1; attempt <= impl_->cfg.retry.max_attempts; ++attempt) {
        httplib::Client client(impl_->url.base);
        client.set_connection_timeout(impl_->cfg.timeout);
        client.set_read_timeout(impl_->cfg.timeout);
        client.set_write_timeout(impl_->cfg.timeout);

        auto res = client.Post(impl_->url.path, headers, payload, "application/json");
        if (!res) {
            // Connection-level failure (includes timeouts): transient.
            last_status = 0;
            last_detail = httplib::to_string(res.error());
        } else if (res->status >= 200 && res->status < 300) {
            json reply = json::parse(res->body, nullptr, false);
            if (reply.is_discarded()) {
                throw SchemaViolationError("provider returned non-JSON body");
            }
            try {
                Completion done;
                done.text = reply.at("choices").at(0).at("message").at("content")
                                .get<std::string>();
                done.attempts = attempt;
                return done;
            } catch (const json::exception& e) {
                throw SchemaViolationError(
                    std::string("provider reply missing choices[0].message.content: ") +
                    e.what());
            }
        } else if (transient_status(res->status)) {
            last_status = res->status;
            last_detail = res->body;
        } else {
            throw HttpStatusError(res->status, res->body);
        }

        if (attempt < impl_->cfg.retry.max_attempts) {
            std::this_thread::sleep_for(backoff);
            backoff = std::chrono::milliseconds(static_cast<long long>(
                static_cast<double>(backoff.count()) * impl_->cfg.retry.backoff_multiplier));
        }
    }
    throw ExhaustedRetriesError(impl_->cfg.retry.max_attempts, last_status);
}

// ---- mock ------------------------------------------------------------------

namespace {

// The deterministic paraphrase surface forms; text is embedded verbatim so
// numbers and units survive unchanged.
constexpr const char* kParaphrasePrefixes[] = {
    "Restated: ",          "In other words: ",      "Equivalently: ",
    "Put differently: ",   "Rephrased: ",           "Stated another way: ",
};
constexpr std::size_t kNumPrefixes = std::size(kParaphrasePrefixes);

std::string mock_paraphrase(const Prompt& prompt, std::mt19937_64& rng) {
    const RequirementSet& reqs = prompt.meta.requirement_set;
    const int v = prompt.meta.num_versions;
    json obj = json::object();
    for (std::size_t i = 0; i < reqs.requirements.size(); ++i) {
        std::uniform_int_distribution<std::size_t> shift_dist(0, kNumPrefixes - 1);
        const std::size_t shift = shift_dist(rng);
        json versions = json::array();
        for (int j = 0; j < v; ++j) {
            std::string s = kParaphrasePrefixes[(shift + static_cast<std::size_t>(j)) % kNumPrefixes];
            s += reqs.requirements[i].text;
            if (static_cast<std::size_t>(j) >= kNumPrefixes) {
                s += " (version " + std::to_string(j + 1) + ")";
            }
            versions.push_back(std::move(s));
        }
        obj[std::to_string(i + 1)] = std::move(versions);
    }
    return obj.dump();
}

std::string serialize_items(const Formulation& f) {
    json arr = json::array();
    for (std::size_t i = 0; i < f.items.size(); ++i) {
        arr.push_back(json{{"requirement_index", i + 1},
                           {"kind", to_string(f.items[i].kind)},
                           {"name", f.items[i].name},
                           {"item", print_item(f.items[i])}});
    }
    return arr.dump();
}

std::string mock_generation(const Prompt& prompt, const MockOptions& opts,
                            std::mt19937_64& rng) {
    Formulation truth = compile_requirements(prompt.meta.requirement_set);
    if (opts.mode == MockMode::Corrupt) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        if (unit(rng) < opts.corrupt_probability) {
            CorruptionKind kind = opts.kind;
            if (opts.random_kind) {
                std::uniform_int_distribution<int> pick(0, 3);
                kind = static_cast<CorruptionKind>(pick(rng));
            }
            CorruptionSpec spec{kind, 0.0};
            if (kind == CorruptionKind::SHIFT_BAND) spec.amount = opts.shift_band_delta;
            if (kind == CorruptionKind::PERTURB_THRESHOLD) {
                spec.amount = opts.perturb_threshold_factor;
            }
            truth = corrupt_formulation(truth, spec, rng()).formulation;
        }
    }
    return serialize_items(truth);
}

// Pulls the curve table back out of the rendered instance-table section.
std::string table_json_of(const Prompt& prompt) {
    for (const auto& section : prompt.sections) {
        if (section.tag != SectionTag::INSTANCE_TABLE) continue;
        const std::string& text = section.text;
        const auto open = text.find("```json\n");
        if (open == std::string::npos) break;
        const auto start = open + 8;
        const auto close = text.find("\n```", start);
        if (close == std::string::npos) break;
        return text.substr(start, close - start);
    }
    throw SchemaViolationError("annotation prompt carries no parsable instance table");
}

std::string mock_annotation(const Prompt& prompt, const MockOptions& opts,
                            std::mt19937_64& rng) {
    const std::vector<TestInstance> insts = parse_instance_table(table_json_of(prompt));
    const Ranking oracle = oracle_ranking(prompt.meta.requirement_set, insts);

    // Flatten fractional ranks into a strict best-first order (stable on ties).
    std::vector<std::size_t> order(oracle.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return oracle.ranks[a] < oracle.ranks[b];
    });
    std::vector<std::string> ids;
    ids.reserve(order.size());
    for (const std::size_t i : order) ids.push_back(oracle.instance_ids[i]);

    if (opts.mode == MockMode::NoisyRanker && ids.size() > 1) {
        std::uniform_int_distribution<std::size_t> pos(0, ids.size() - 2);
        for (int k = 0; k < opts.transpositions; ++k) {
            const std::size_t p = pos(rng);
            std::swap(ids[p], ids[p + 1]);
        }
    }
    return json(ids).dump();
}

}  // namespace

MockProvider::MockProvider(MockOptions opts) : opts_(opts) {}

Completion MockProvider::complete(const Prompt& prompt) {
    // Pure in (prompt, seed): all randomness flows from this stream.
    std::mt19937_64 rng(substream_seed(opts_.seed, prompt.render()));
    Completion done;
    done.attempts = 1;
    switch (prompt.meta.kind) {
        case RequestKind::PARAPHRASE: done.text = mock_paraphrase(prompt, rng); break;
        case RequestKind::GENERATION: done.text = mock_generation(prompt, opts_, rng); break;
        case RequestKind::ANNOTATION: done.text = mock_annotation(prompt, opts_, rng); break;
    }
    return done;
}

}  // namespace apf
