#include "phasescan/quasi.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "phasescan/errors.hpp"

namespace phasescan {

namespace {

constexpr double kPi = std::numbers::pi;
const double kLogBand = std::log(1e100);

void check_ordering(double s, bool allow_positive_s) {
  if (!(s < 1.0))
    throw std::invalid_argument("ordering parameter must satisfy s < 1");
  if (s > 0.0 && !allow_positive_s)
    throw std::invalid_argument(
        "positive ordering parameters amplify truncation noise; pass "
        "allow_positive_s to evaluate anyway");
}

void check_point(PhasePoint beta) {
  if (!std::isfinite(beta.real()) || !std::isfinite(beta.imag()))
    throw IntegrityError("phase-space point must be finite");
}

}  // namespace

double laguerre(int n, double x) {
  if (n < 0) throw std::invalid_argument("Laguerre order must be nonnegative");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double wigner_fock(int n, PhasePoint beta) {
  if (n < 0) throw std::invalid_argument("Fock index must be nonnegative");
  check_point(beta);
  const double x = std::norm(beta);
  const double sign = n % 2 ? -1.0 : 1.0;
  return 2.0 / kPi * sign * std::exp(-2.0 * x) * laguerre(n, 4.0 * x);
}

double quasi_s(const DensityMatrix& rho, PhasePoint beta, double s,
               bool allow_positive_s, double conv_tol) {
  check_ordering(s, allow_positive_s);
  check_point(beta);
  const double r = (s + 1.0) / (s - 1.0);
  const Operator disp = displacement_operator(-beta, rho.cutoff);
  const DensityMatrix moved = conjugate_by(rho, disp);
  const PhotocountDistribution q = number_distribution(moved);
  const int d = rho.dim();

  double sum = 0.0;
  double weight = 1.0;
  for (int n = 0; n < d; ++n) {
    sum += weight * q.p(n);
    weight *= r;
  }

  // The truncated series misses sum_{n >= d} r^n q_n; |q tail| is bounded by
  // the probability deficit of the displaced state, amplified by |r|^d when
  // the ratio exceeds one.
  const double deficit = std::max(0.0, rho.trace_re() - q.total());
  double tail_bound = 0.0;
  if (deficit > 0.0)
    tail_bound =
        std::abs(r) <= 1.0 ? deficit : deficit * std::pow(std::abs(r), d);
  if (!(tail_bound <= conv_tol))
    throw TruncationError("quasi_s series tail bound " +
                          std::to_string(tail_bound) + " exceeds tolerance " +
                          std::to_string(conv_tol) + "; increase the cutoff");
  return 2.0 / (kPi * (1.0 - s)) * sum;
}

// Closed form for the matrix elements of the s-ordered kernel: with
// r = (s+1)/(s-1) and n = m + k (k >= 0),
//   <n| kernel(beta) |m> = e^{-(1-r)|beta|^2} ((1-r) beta)^k sqrt(m!/n!)
//                          * r^m L_m^{(k)}(-(1-r)^2 |beta|^2 / r),
// evaluated through the rescaled polynomial P_m = r^m L_m^{(k)}(.) which
// obeys (m+1) P_{m+1} = [r(2m+k+1) + w] P_m - r^2 (m+k) P_{m-1} with
// w = (1-r)^2 |beta|^2, so r = 0 (the s = -1 column) needs no special case.
// The lower triangle follows from Hermiticity of the kernel.
double quasi_s_closed(const DensityMatrix& rho, PhasePoint beta, double s,
                      bool allow_positive_s) {
  check_ordering(s, allow_positive_s);
  check_point(beta);
  const int d = rho.dim();
  const double r = (s + 1.0) / (s - 1.0);
  const double pref = 2.0 / (kPi * (1.0 - s));
  const double x = std::norm(beta);

  if (x == 0.0) {
    double acc = 0.0;
    double weight = 1.0;
    for (int m = 0; m < d; ++m) {
      acc += weight * rho.m(m, m).real();
      weight *= r;
    }
    return pref * acc;
  }

  const double one_minus_r = 1.0 - r;  // = 2/(1-s), always positive
  const double a = one_minus_r * x;
  const double w = one_minus_r * one_minus_r * x;
  const double z = one_minus_r * std::abs(beta);
  const double lz = std::log(z);
  const Complex ph = beta / std::abs(beta);

  // Upper bound on log |P_m| from the recurrence coefficients; used to pick
  // the evaluation branch and to discard points where every contribution
  // underflows (max of the k-dependent prefactor part is about e^{w/2 - a}).
  const double growth_cap =
      d * std::log1p(std::abs(r) * (3.0 * d + 1.0) + w + 2.0 * r * r * d);
  if (-a + 0.5 * w + growth_cap < -745.0) return 0.0;

  double acc = 0.0;
  double lfact = 0.0;  // log k!
  Complex phk = 1.0;   // ph^k
  for (int k = 0; k < d; ++k) {
    if (k > 0) {
      lfact += std::log(double(k));
      phk *= ph;
    }
    const double lstart = -a + k * lz - 0.5 * lfact;
    const int mmax = d - k;
    double p_prev = 0.0;
    double p_cur = 1.0;

    if (growth_cap < 500.0 && lstart > -700.0) {
      // No overflow or harmful underflow possible: plain multiplicative pass.
      double pre = std::exp(lstart);
      for (int m = 0; m < mmax; ++m) {
        if (m > 0) {
          const double p_next =
              ((r * (2.0 * (m - 1.0) + k + 1.0) + w) * p_cur -
               r * r * (m - 1.0 + k) * p_prev) /
              double(m);
          p_prev = p_cur;
          p_cur = p_next;
          pre *= std::sqrt(double(m) / double(m + k));
        }
        const double mag = pre * p_cur;
        if (k == 0)
          acc += rho.m(m, m).real() * mag;
        else
          acc += 2.0 * (rho.m(m, m + k) * phk).real() * mag;
      }
    } else {
      // Log-magnitude pass: the positive prefactor advances additively and
      // the P pair is kept inside [1e-100, 1e100] by joint rescaling (the
      // recurrence is linear, so rescaling both members is exact).
      double lpre = lstart;
      double plog = 0.0;
      for (int m = 0; m < mmax; ++m) {
        if (m > 0) {
          const double p_next =
              ((r * (2.0 * (m - 1.0) + k + 1.0) + w) * p_cur -
               r * r * (m - 1.0 + k) * p_prev) /
              double(m);
          p_prev = p_cur;
          p_cur = p_next;
          lpre += 0.5 * std::log(double(m) / double(m + k));
          const double scale = std::max(std::abs(p_cur), std::abs(p_prev));
          if (scale > 1e100) {
            p_cur *= 1e-100;
            p_prev *= 1e-100;
            plog += kLogBand;
          } else if (scale != 0.0 && scale < 1e-100 && plog > 0.0) {
            p_cur *= 1e100;
            p_prev *= 1e100;
            plog -= kLogBand;
          }
        }
        if (p_cur == 0.0) continue;
        const double le = lpre + plog + std::log(std::abs(p_cur));
        if (le < -745.0) continue;
        const double mag = (p_cur > 0.0 ? 1.0 : -1.0) * std::exp(le);
        if (k == 0)
          acc += rho.m(m, m).real() * mag;
        else
          acc += 2.0 * (rho.m(m, m + k) * phk).real() * mag;
      }
    }
  }
  return pref * acc;
}

double wigner(const DensityMatrix& rho, PhasePoint beta) {
  return quasi_s_closed(rho, beta, 0.0);
}

PhaseGrid::PhaseGrid(Complex center_in, double half_extent_in,
                     int points_per_axis_in)
    : center(center_in),
      half_extent(half_extent_in),
      points_per_axis(points_per_axis_in) {
  if (!std::isfinite(center.real()) || !std::isfinite(center.imag()))
    throw std::invalid_argument("grid center must be finite");
  if (!(half_extent > 0.0) || !std::isfinite(half_extent))
    throw std::invalid_argument("grid half extent must be positive and finite");
  if (points_per_axis < 2)
    throw std::invalid_argument("grid needs at least 2 points per axis");
}

PhaseGrid default_grid(const DensityMatrix& rho) {
  const double nbar = mean_photons(rho);
  const Complex field = mean_field(rho);
  const double n_fluct = std::max(0.0, nbar - std::norm(field));
  const double half_extent =
      std::max(3.0, std::abs(field) + 3.0 * std::sqrt(2.0 * n_fluct + 1.0));
  return PhaseGrid(Complex(0.0, 0.0), half_extent, 201);
}

double wigner_quadrature(const DensityMatrix& rho, const PhaseGrid& grid) {
  double acc = 0.0;
  for (int iy = 0; iy < grid.points_per_axis; ++iy)
    for (int ix = 0; ix < grid.points_per_axis; ++ix)
      acc += wigner(rho, grid.node(ix, iy));
  return acc * grid.cell_area();
}

double overlap_pi(const DensityMatrix& rho_signal,
                  const DensityMatrix& rho_probe, double transmission,
                  const PhaseGrid& grid) {
  if (!(transmission > 0.0 && transmission < 1.0))
    throw std::invalid_argument(
        "transmission must lie strictly inside (0, 1)");
  const double gamma = std::sqrt(transmission / (1.0 - transmission));
  const int n = grid.points_per_axis;
  double acc = 0.0;
  double peak = 0.0;
  double edge = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const Complex b = grid.node(ix, iy);
      const double f = wigner(rho_signal, b) * wigner(rho_probe, gamma * b);
      acc += f;
      const double af = std::abs(f);
      if (af > peak) peak = af;
      if ((ix == 0 || iy == 0 || ix == n - 1 || iy == n - 1) && af > edge)
        edge = af;
    }
  }
  if (peak == 0.0)
    throw SupportError("overlap grid sees no phase-space support");
  if (edge > 1e-10 * peak)
    throw SupportError(
        "overlap integrand has not decayed at the grid boundary; enlarge the "
        "grid");
  return kPi / (2.0 * (1.0 - transmission)) * acc * grid.cell_area();
}

}  // namespace phasescan
