#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "specklepuf/binary_key.hpp"
#include "specklepuf/grid.hpp"

namespace specklepuf {

struct Histogram {
  double lower = 0.0;
  double bin_width = 0.0;
  std::vector<std::size_t> counts;
};

/// Fixed-width histogram. bin_width <= 0 selects the Freedman-Diaconis
/// width 2 * IQR * n^(-1/3), falling back to a single bin when the IQR
/// vanishes.
Histogram make_histogram(std::span<const double> samples, double bin_width = 0.0);

struct GaussianFit {
  double mean = 0.0;
  double stddev = 0.0;
};

struct InterStats {
  std::size_t key_count = 0;
  std::size_t pair_count = 0;
  std::vector<double> hd_samples;  // pair (i, j), i < j, lexicographic
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  GaussianFit gaussian_fit;
  Histogram histogram;
};

enum class IntraReference { kFirstKey, kAllPairs };

struct BinomialFit {
  double n_eff = 0.0;
  double p_hat = 0.0;
};

struct IntraStats {
  std::size_t sample_count = 0;
  std::vector<double> hd_samples;
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance of hd_samples
  double min = 0.0;
  double max = 0.0;
  BinomialFit binomial_fit;
  Histogram histogram;
};

struct EntropyReport {
  std::vector<double> per_row;
  std::vector<double> per_col;
  double mean_x = 0.0;  // along x: one value per row
  double std_x = 0.0;
  double mean_y = 0.0;  // along y: one value per column
  double std_y = 0.0;
};

/// Binary Shannon entropy in bits with 0 log 0 = 0.
double binary_entropy(double p) noexcept;

EntropyReport axis_entropy(const BinaryKey& key);

/// Pearson coefficient over all pixels. Throws UndefinedCorrelationError
/// when both grids are constant; a single constant grid yields 0.
double correlation(const Grid<double>& a, const Grid<double>& b);
double correlation(const Grid<std::uint16_t>& a, const Grid<std::uint16_t>& b);

double fractional_hd(const BinaryKey& a, const BinaryKey& b);

InterStats inter_stats(std::span<const BinaryKey> keys, double bin_width = 0.0);

/// `n_eff` defaults to the key length when not supplied.
IntraStats intra_stats(std::span<const BinaryKey> keys,
                       IntraReference reference = IntraReference::kFirstKey,
                       std::optional<double> n_eff = std::nullopt, double bin_width = 0.0);

/// Degrees of freedom mu (1 - mu) / sigma^2.
double dof(double mean, double variance);

/// log10 of the coding-space size 2^F.
double capacity_log10(double degrees_of_freedom) noexcept;

enum class IntraDensity {
  kBinomialGaussian,  // N(p, p (1 - p) / n_eff)
  kSampleMoments,     // N(mean, sample variance)
};

GaussianFit intra_gaussian(const IntraStats& intra, IntraDensity model);

/// Abscissa in [intra.mean, inter.mean] where the two fitted normal
/// densities are equal, found by bisection on the log-density difference.
double fit_threshold(const GaussianFit& intra, const GaussianFit& inter);
double fit_threshold(const InterStats& inter, const IntraStats& intra,
                     IntraDensity model = IntraDensity::kBinomialGaussian);

}  // namespace specklepuf
