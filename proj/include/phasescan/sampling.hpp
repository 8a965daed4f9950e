#pragma once

// Monte Carlo photocounting: a counter-based generator (philox4x32-10) keyed
// by (master seed, stream index, draw index), inverse-CDF event sampling, and
// weighted-series estimators with their analytic calibration moments.

#include <array>
#include <cstdint>
#include <vector>

#include "phasescan/fock.hpp"
#include "phasescan/optics.hpp"

namespace phasescan {

// Identifies one reproducible draw stream; distinct stream indices give
// independent sequences under the same master seed.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
};

// Algorithm tag recorded in scan outputs.  Pinned; never changed silently.
inline constexpr char kRngAlgorithm[] = "philox4x32-10";

// One keyed block of the counter-based generator (10 rounds).  Exposed for
// known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Draw-indexed access: low word | high word << 32 of the block keyed by the
// master seed with counter (draw index, stream index).
std::uint64_t philox_u64(const SeedSpec& seed, std::uint64_t draw_index);

// Uniform double in [0, 1) from the top 53 bits of the draw.
double philox_uniform(const SeedSpec& seed, std::uint64_t draw_index);

// events i.i.d. photocount draws by inverse-CDF lookup.  The distribution is
// renormalized once before sampling and the factor applied is reported
// through renorm_factor when provided; a probability deficit above
// kTruncationTol is refused instead of silently renormalized away.
std::vector<int> sample_photocounts(const PhotocountDistribution& p,
                                    std::int64_t events, const SeedSpec& seed,
                                    double* renorm_factor = nullptr);

// Per-photon weight c = 1 - 2/eta that undoes Bernoulli detector loss inside
// the weighted series; c = -1 at unit efficiency, |c| > 1 below it.
double compensation_base(Efficiency eta);

struct EstimatorResult {
  double mean = 0.0;
  // Sample standard deviation (n-1 normalization) over sqrt(events).
  double std_error = 0.0;
  std::int64_t events = 0;
  double base = 0.0;
};

// Sample mean and standard error of base^{n_i} over the draws.
EstimatorResult weighted_series_estimate(const std::vector<int>& draws,
                                         double base);

struct AnalyticMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Exact mean and variance of base^n under the distribution.
AnalyticMoments analytic_moments(const PhotocountDistribution& p, double base);

}  // namespace phasescan
