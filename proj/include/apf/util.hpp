#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace apf {

// Canonical real formatting: 6 significant digits, trailing zeros trimmed
// ("%.6g"). This is the one textual form for reals everywhere a number is
// rendered (formulation text, requirement text, prompt tables).
std::string format_real(double v);

// Nearest value representable by the canonical 6-significant-digit form.
// Idempotent, and format_real(canon6(v)) == format_real(v).
double canon6(double v);

// splitmix64 finalizer; good enough to derive independent RNG substreams.
std::uint64_t mix64(std::uint64_t x);

std::uint64_t fnv1a64(std::string_view s);

// Substream seed for (base seed, label), e.g. ("annotate/rs-000123").
// Stable across runs and independent of evaluation order.
std::uint64_t substream_seed(std::uint64_t base, std::string_view label);

}  // namespace apf
