#include "phasescan/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "phasescan/errors.hpp"

namespace phasescan {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t(kMul0) * counter[0];
    const std::uint64_t p1 = std::uint64_t(kMul1) * counter[2];
    counter = {static_cast<std::uint32_t>(p1 >> 32) ^ counter[1] ^ key[0],
               static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ counter[3] ^ key[1],
               static_cast<std::uint32_t>(p0)};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return counter;
}

std::uint64_t philox_u64(const SeedSpec& seed, std::uint64_t draw_index) {
  const std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(seed.master_seed),
      static_cast<std::uint32_t>(seed.master_seed >> 32)};
  const std::array<std::uint32_t, 4> counter = {
      static_cast<std::uint32_t>(draw_index),
      static_cast<std::uint32_t>(draw_index >> 32),
      static_cast<std::uint32_t>(seed.stream_index),
      static_cast<std::uint32_t>(seed.stream_index >> 32)};
  const auto out = philox4x32(counter, key);
  return std::uint64_t(out[0]) | (std::uint64_t(out[1]) << 32);
}

double philox_uniform(const SeedSpec& seed, std::uint64_t draw_index) {
  return static_cast<double>(philox_u64(seed, draw_index) >> 11) * 0x1.0p-53;
}

std::vector<int> sample_photocounts(const PhotocountDistribution& p,
                                    std::int64_t events, const SeedSpec& seed,
                                    double* renorm_factor) {
  if (events < 1) throw std::invalid_argument("need at least one event");
  const double total = p.total();
  const double deficit = 1.0 - total;
  if (deficit > kTruncationTol)
    throw TruncationError("photocount distribution is missing probability " +
                          std::to_string(deficit) +
                          "; cutoff too small to sample from");

  const int d = static_cast<int>(p.p.size());
  std::vector<double> cumulative(d);
  double run = 0.0;
  for (int n = 0; n < d; ++n) {
    run += p.p(n);
    cumulative[n] = run / total;
  }
  // Close the support exactly so every u in [0, 1) lands inside it.
  cumulative[d - 1] = 1.0;
  if (renorm_factor) *renorm_factor = 1.0 / total;

  std::vector<int> draws(static_cast<std::size_t>(events));
  for (std::int64_t i = 0; i < events; ++i) {
    const double u = philox_uniform(seed, static_cast<std::uint64_t>(i));
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    draws[static_cast<std::size_t>(i)] =
        static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                  d - 1));
  }
  return draws;
}

double compensation_base(Efficiency eta) { return 1.0 - 2.0 / eta.value; }

EstimatorResult weighted_series_estimate(const std::vector<int>& draws,
                                         double base) {
  if (draws.empty()) throw std::invalid_argument("need at least one draw");
  double mean = 0.0;
  double m2 = 0.0;
  std::int64_t count = 0;
  for (const int n : draws) {
    if (n < 0) throw IntegrityError("negative photocount draw");
    const double x = std::pow(base, static_cast<double>(n));
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  EstimatorResult result;
  result.mean = mean;
  result.events = count;
  result.base = base;
  result.std_error =
      count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1) /
                            static_cast<double>(count))
                : 0.0;
  return result;
}

AnalyticMoments analytic_moments(const PhotocountDistribution& p,
                                 double base) {
  double mean = 0.0;
  double second = 0.0;
  double w = 1.0;
  double w2 = 1.0;
  const double b2 = base * base;
  for (int n = 0; n < p.p.size(); ++n) {
    mean += w * p.p(n);
    second += w2 * p.p(n);
    w *= base;
    w2 *= b2;
  }
  return {mean, std::max(0.0, second - mean * mean)};
}

}  // namespace phasescan
