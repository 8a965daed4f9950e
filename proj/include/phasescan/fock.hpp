#pragma once

// Truncated Fock-space primitives: pure states, density matrices, operators,
// displacement matrices and photon-number statistics.  Every object carries an
// explicit cutoff; operations refuse to mix cutoffs and fail loudly (via
// exceptions from errors.hpp) when truncation eats more mass than allowed.

#include <complex>

#include <Eigen/Dense>

#include "phasescan/errors.hpp"

namespace phasescan {

using Complex = std::complex<double>;

// A point in phase space (coherent amplitude).
using PhasePoint = Complex;

// Default budget for state mass lost to a finite cutoff.
inline constexpr double kTruncationTol = 1e-8;

// Number of Fock levels kept; valid indices are 0..dim-1.
struct Cutoff {
  explicit Cutoff(int dim_in);
  int dim;
  friend bool operator==(const Cutoff&, const Cutoff&) = default;
};

// Smallest dimension holding states of typical coherent amplitude |a| with a
// 6-sigma Poisson tail margin plus slack: ceil(|a|^2 + 6*sqrt(|a|^2+1) + 4).
int cutoff_for_amplitude(double amplitude);

// Pure state as Fock amplitudes c_0..c_{dim-1}.
struct StateVector {
  StateVector(Eigen::VectorXcd amplitudes, Cutoff cutoff_in);

  int dim() const { return cutoff.dim; }
  double norm_sq() const { return amp.squaredNorm(); }
  // Same amplitudes, zero-padded to a larger cutoff.
  StateVector embedded(Cutoff larger) const;

  Eigen::VectorXcd amp;
  Cutoff cutoff;
};

// Mixed state; Hermiticity is checked at construction (inf-norm 1e-12).
struct DensityMatrix {
  DensityMatrix(Eigen::MatrixXcd elements, Cutoff cutoff_in);

  int dim() const { return cutoff.dim; }
  double trace_re() const { return m.trace().real(); }
  DensityMatrix embedded(Cutoff larger) const;

  Eigen::MatrixXcd m;
  Cutoff cutoff;
};

// General (not necessarily Hermitian or unitary) operator on the truncated space.
struct Operator {
  Operator(Eigen::MatrixXcd elements, Cutoff cutoff_in);
  static Operator identity(Cutoff c);
  Operator adjoint() const;

  int dim() const { return cutoff.dim; }

  Eigen::MatrixXcd m;
  Cutoff cutoff;
};

// Probability vector over photocounts 0..dim-1.  Entries are nonnegative and
// the total never exceeds 1 beyond round-off; a deficit below 1 is mass lost
// to the cutoff (callers decide how much deficit they tolerate).
struct PhotocountDistribution {
  PhotocountDistribution(Eigen::VectorXd probabilities, Cutoff cutoff_in);

  int dim() const { return cutoff.dim; }
  double total() const { return p.sum(); }

  Eigen::VectorXd p;
  Cutoff cutoff;
};

// |n> at the given cutoff; n must lie below the cutoff.
StateVector fock_state(int n, Cutoff c);

// Coherent state, c_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!), built by the
// stable ratio recurrence.  Throws TruncationError if the captured norm falls
// below 1 - trunc_tol.
StateVector coherent_state(Complex alpha, Cutoff c,
                           double trunc_tol = kTruncationTol);

// Thermal state, diagonal p_n = nbar^n / (1+nbar)^(n+1) (nbar >= 0).  Throws
// TruncationError if the captured trace falls below 1 - trunc_tol.
DensityMatrix thermal_state(double nbar, Cutoff c,
                            double trunc_tol = kTruncationTol);

// Displacement D(delta) = exp(delta a^dag - conj(delta) a) on the truncated
// space, evaluated element-wise in closed form (associated-Laguerre recurrence
// per diagonal offset, factorial ratios carried in log space).  Unitary up to
// truncation leakage in the top levels.
Operator displacement_operator(Complex delta, Cutoff c);

// |psi><psi|.
DensityMatrix density_from_pure(const StateVector& psi);

// U rho U^dag, re-symmetrized as (X + X^dag)/2 to keep Hermiticity exact.
// Trace is preserved only as far as U is unitary on the support of rho; callers
// who displace near the cutoff must check the resulting mass themselves.
DensityMatrix conjugate_by(const DensityMatrix& rho, const Operator& u);

// Diagonal of rho as a photocount distribution.  Small negative round-off
// (above -1e-10) clamps to zero; anything more negative is an IntegrityError.
PhotocountDistribution number_distribution(const DensityMatrix& rho);

// Tr[rho a] -- the mean field, used for grid sizing.
Complex mean_field(const DensityMatrix& rho);

// Tr[rho n] -- mean photon number.
double mean_photons(const DensityMatrix& rho);

}  // namespace phasescan
