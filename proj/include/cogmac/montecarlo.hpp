#ifndef COGMAC_MONTECARLO_HPP
#define COGMAC_MONTECARLO_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>

#include "cogmac/oic_rates.hpp"
#include "cogmac/scenario.hpp"

namespace cogmac {

// Seeded Monte Carlo estimators.
//
// Samples are grouped in fixed blocks of kBlockSize; block b is driven by a
// std::mt19937_64 seeded from (seed, b) through std::seed_seq, so sample i
// depends only on (seed, i). Blocks are reduced in index order, so every
// estimate is independent of the worker count.

inline constexpr std::uint64_t kBlockSize = 4096;

/// Random stream for one block of samples.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t block);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Exponential with the given mean, by inversion. mean == 0 gives 0.
  double exponential(double mean);

 private:
  std::mt19937_64 engine_;
};

GainSample sample_gains(const Scenario& s, RandomStream& stream);
/// Same, reusing the vectors already held by `out`.
void sample_gains(const Scenario& s, RandomStream& stream, GainSample& out);

struct Conditioning {
  OicRegime regime = OicRegime::Weak;
  double probability = 0.0;  // empirical Pr{regime}
};

struct EstimateWithCI {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::optional<Conditioning> conditioning;
};

enum class FilterConvention {
  Restricted,   // E[R 1{regime}] over all n samples
  Conditional,  // E[R | regime]
};

/// No sample fell in the requested event.
class EmptyEventError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Worker threads used by the estimators: COGMAC_WORKERS if set, otherwise
/// hardware concurrency. Never changes results.
unsigned worker_count();

/// Fraction of samples with primary_rate < R_p; binomial standard error.
EstimateWithCI estimate_outage(std::span<const double> powers,
                               const Scenario& s, std::uint64_t n,
                               std::uint64_t seed);

/// Mean OIC sum rate, optionally filtered to one regime.
EstimateWithCI estimate_ergodic_rate(
    std::span<const double> powers, const Scenario& s, std::uint64_t n,
    std::uint64_t seed, std::optional<OicRegime> filter = std::nullopt,
    FilterConvention convention = FilterConvention::Restricted);

/// Mean of an arbitrary per-sample statistic.
EstimateWithCI estimate_mean(
    const Scenario& s, std::uint64_t n, std::uint64_t seed,
    const std::function<double(const GainSample&)>& statistic);

/// Empirical {Weak, Medium, Strong} frequencies.
std::array<double, 3> regime_frequencies(std::span<const double> powers,
                                         const Scenario& s, std::uint64_t n,
                                         std::uint64_t seed);

}  // namespace cogmac

#endif  // COGMAC_MONTECARLO_HPP
