#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace apf {

// Coarse failure domains; the CLI maps these to process exit codes
// (data -> 2, provider -> 3, usage -> 1).
enum class ErrorCategory { Data, Provider, Usage };

class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message,
          ErrorCategory category = ErrorCategory::Data)
        : std::runtime_error(message), code_(std::move(code)), category_(category) {}

    const std::string& code() const noexcept { return code_; }
    ErrorCategory category() const noexcept { return category_; }

private:
    std::string code_;
    ErrorCategory category_;
};

// ---- formulation / parsing -------------------------------------------------

class SyntaxError : public Error {
public:
    SyntaxError(int line, int column, const std::string& message)
        : Error("syntax", "line " + std::to_string(line) + ", col " +
                              std::to_string(column) + ": " + message),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

class InvariantViolation : public Error {
public:
    explicit InvariantViolation(const std::string& message)
        : Error("invariant", message) {}
};

// ---- evaluation ------------------------------------------------------------

class EmptyBandError : public Error {
public:
    EmptyBandError(double lo, double hi, const std::string& context = "")
        : Error("empty_band",
                "no sample falls in band [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]" +
                    (context.empty() ? "" : " (" + context + ")")),
          lo_(lo), hi_(hi) {}

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

private:
    double lo_, hi_;
};

class NonFiniteError : public Error {
public:
    explicit NonFiniteError(const std::string& context)
        : Error("non_finite", "evaluation produced NaN/inf: " + context) {}
};

// ---- ranking / scoring -----------------------------------------------------

class IdMismatchError : public Error {
public:
    explicit IdMismatchError(const std::string& detail)
        : Error("id_mismatch", "instance id sets differ: " + detail) {}
};

class DegenerateRankingError : public Error {
public:
    explicit DegenerateRankingError(const std::string& detail)
        : Error("degenerate_ranking", detail) {}
};

class NoObjectivesError : public Error {
public:
    NoObjectivesError() : Error("no_objectives", "formulation has no objectives") {}
    explicit NoObjectivesError(const std::string& context)
        : Error("no_objectives", "formulation has no objectives: " + context) {}
};

class NoConstraintsError : public Error {
public:
    NoConstraintsError() : Error("no_constraints", "formulation has no constraints") {}
    explicit NoConstraintsError(const std::string& context)
        : Error("no_constraints", "formulation has no constraints: " + context) {}
};

class LengthMismatchError : public Error {
public:
    LengthMismatchError(std::size_t got, std::size_t want)
        : Error("length_mismatch", "vector length " + std::to_string(got) +
                                       " does not match instance count " +
                                       std::to_string(want)) {}
};

class AlphaOutOfRangeError : public Error {
public:
    explicit AlphaOutOfRangeError(double alpha)
        : Error("alpha_out_of_range",
                "alpha must lie in [0, 1], got " + std::to_string(alpha)) {}
};

// ---- gateway ---------------------------------------------------------------

class EmptyRequirementSetError : public Error {
public:
    EmptyRequirementSetError() : Error("empty_requirement_set", "requirement set is empty") {}
    explicit EmptyRequirementSetError(const std::string& detail)
        : Error("empty_requirement_set", detail) {}
};

class TooFewInstancesError : public Error {
public:
    explicit TooFewInstancesError(std::size_t n)
        : Error("too_few_instances",
                "annotation needs at least 2 instances, got " + std::to_string(n)) {}
    explicit TooFewInstancesError(const std::string& detail)
        : Error("too_few_instances", detail) {}
};

class PromptBudgetExceededError : public Error {
public:
    PromptBudgetExceededError(std::size_t size, std::size_t budget)
        : Error("prompt_budget_exceeded",
                "rendered prompt is " + std::to_string(size) +
                    " chars, budget is " + std::to_string(budget)) {}
};

class TimeoutError : public Error {
public:
    explicit TimeoutError(const std::string& detail)
        : Error("timeout", detail, ErrorCategory::Provider) {}
};

class HttpStatusError : public Error {
public:
    explicit HttpStatusError(int status, const std::string& body = "")
        : Error("http_status",
                "provider returned HTTP " + std::to_string(status) +
                    (body.empty() ? "" : ": " + body.substr(0, 200)),
                ErrorCategory::Provider),
          status_(status) {}

    int status() const noexcept { return status_; }

private:
    int status_;
};

class ExhaustedRetriesError : public Error {
public:
    ExhaustedRetriesError(int attempts, int last_status)
        : Error("exhausted_retries",
                "gave up after " + std::to_string(attempts) +
                    " attempts (last status " + std::to_string(last_status) + ")",
                ErrorCategory::Provider),
          attempts_(attempts), last_status_(last_status) {}

    int attempts() const noexcept { return attempts_; }
    int last_status() const noexcept { return last_status_; }

private:
    int attempts_;
    int last_status_;
};

class NoJsonFoundError : public Error {
public:
    explicit NoJsonFoundError(const std::string& what_kind)
        : Error("no_json_found", "no " + what_kind + " found in response") {}
};

class SchemaViolationError : public Error {
public:
    explicit SchemaViolationError(const std::string& detail)
        : Error("schema_violation", detail) {}
};

class IndexCoverageError : public Error {
public:
    explicit IndexCoverageError(const std::string& detail)
        : Error("index_coverage", detail) {}
};

class NotAPermutationError : public Error {
public:
    NotAPermutationError(std::vector<std::string> missing, std::vector<std::string> extra)
        : Error("not_a_permutation", describe(missing, extra)),
          missing_(std::move(missing)), extra_(std::move(extra)) {}

    const std::vector<std::string>& missing() const noexcept { return missing_; }
    const std::vector<std::string>& extra() const noexcept { return extra_; }

private:
    static std::string describe(const std::vector<std::string>& missing,
                                const std::vector<std::string>& extra) {
        std::string s = "response is not a permutation of the queried ids";
        if (!missing.empty()) {
            s += "; missing:";
            for (const auto& m : missing) s += " " + m;
        }
        if (!extra.empty()) {
            s += "; extra:";
            for (const auto& e : extra) s += " " + e;
        }
        return s;
    }

    std::vector<std::string> missing_;
    std::vector<std::string> extra_;
};

// ---- synth / pipeline ------------------------------------------------------

class NoEligibleItemError : public Error {
public:
    explicit NoEligibleItemError(const std::string& kind)
        : Error("no_eligible_item", "no item eligible for corruption kind " + kind) {}
};

class CombinationBudgetError : public Error {
public:
    explicit CombinationBudgetError(const std::string& detail)
        : Error("combination_budget", detail) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& detail) : Error("io", detail) {}
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& detail)
        : Error("usage", detail, ErrorCategory::Usage) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& detail)
        : Error("config", detail, ErrorCategory::Usage) {}
};

}  // namespace apf
