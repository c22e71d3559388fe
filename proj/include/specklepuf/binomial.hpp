#pragma once

#include <cstdint>

namespace specklepuf {

/// A probability carried both linearly (may underflow to 0) and as log10.
struct Probability {
  double value = 0.0;
  double log10 = 0.0;
};

/// ln P(X = k) for X ~ Binomial(n, p), accurate to a few ulps for n in
/// the millions (saddle-point expansion, no lgamma cancellation).
double binom_log_pmf(std::int64_t k, std::int64_t n, double p);

/// P(X <= k).
Probability binom_cdf(std::int64_t k, std::int64_t n, double p);

/// P(X > k) = 1 - P(X <= k), summed directly so deep upper tails keep
/// their full relative precision.
Probability binom_sf(std::int64_t k, std::int64_t n, double p);

}  // namespace specklepuf
