#include "phasescan/fock.hpp"

#include <cmath>
#include <sstream>

namespace phasescan {

namespace {

void require_same_cutoff(Cutoff a, Cutoff b, const char* where) {
  if (!(a == b)) {
    std::ostringstream os;
    os << where << ": cutoff mismatch (" << a.dim << " vs " << b.dim << ")";
    throw CutoffMismatch(os.str());
  }
}

template <class Mat>
void require_finite(const Mat& m, const char* where) {
  if (!m.allFinite()) throw IntegrityError(std::string(where) + ": non-finite entries");
}

}  // namespace

Cutoff::Cutoff(int dim_in) : dim(dim_in) {
  if (dim < 1) throw std::invalid_argument("Cutoff: dim must be >= 1");
}

int cutoff_for_amplitude(double amplitude) {
  if (!(amplitude >= 0.0)) throw std::invalid_argument("cutoff_for_amplitude: need |a| >= 0");
  const double n = amplitude * amplitude;
  return static_cast<int>(std::ceil(n + 6.0 * std::sqrt(n + 1.0) + 4.0));
}

StateVector::StateVector(Eigen::VectorXcd amplitudes, Cutoff cutoff_in)
    : amp(std::move(amplitudes)), cutoff(cutoff_in) {
  if (amp.size() != cutoff.dim)
    throw std::invalid_argument("StateVector: amplitude count != cutoff dim");
  require_finite(amp, "StateVector");
}

StateVector StateVector::embedded(Cutoff larger) const {
  if (larger.dim < cutoff.dim)
    throw std::invalid_argument("StateVector::embedded: target cutoff smaller");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(larger.dim);
  out.head(cutoff.dim) = amp;
  return StateVector(std::move(out), larger);
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd elements, Cutoff cutoff_in)
    : m(std::move(elements)), cutoff(cutoff_in) {
  if (m.rows() != cutoff.dim || m.cols() != cutoff.dim)
    throw std::invalid_argument("DensityMatrix: shape != cutoff dim");
  require_finite(m, "DensityMatrix");
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym >= 1e-12) {
    std::ostringstream os;
    os << "DensityMatrix: not Hermitian (max |rho - rho^dag| = " << asym << ")";
    throw IntegrityError(os.str());
  }
}

DensityMatrix DensityMatrix::embedded(Cutoff larger) const {
  if (larger.dim < cutoff.dim)
    throw std::invalid_argument("DensityMatrix::embedded: target cutoff smaller");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(larger.dim, larger.dim);
  out.topLeftCorner(cutoff.dim, cutoff.dim) = m;
  return DensityMatrix(std::move(out), larger);
}

Operator::Operator(Eigen::MatrixXcd elements, Cutoff cutoff_in)
    : m(std::move(elements)), cutoff(cutoff_in) {
  if (m.rows() != cutoff.dim || m.cols() != cutoff.dim)
    throw std::invalid_argument("Operator: shape != cutoff dim");
  require_finite(m, "Operator");
}

Operator Operator::identity(Cutoff c) {
  return Operator(Eigen::MatrixXcd::Identity(c.dim, c.dim), c);
}

Operator Operator::adjoint() const { return Operator(m.adjoint(), cutoff); }

PhotocountDistribution::PhotocountDistribution(Eigen::VectorXd probabilities,
                                               Cutoff cutoff_in)
    : p(std::move(probabilities)), cutoff(cutoff_in) {
  if (p.size() != cutoff.dim)
    throw std::invalid_argument("PhotocountDistribution: size != cutoff dim");
  if (!p.allFinite()) throw IntegrityError("PhotocountDistribution: non-finite entry");
  if (p.minCoeff() < 0.0)
    throw IntegrityError("PhotocountDistribution: negative probability");
  if (p.sum() > 1.0 + 1e-9)
    throw IntegrityError("PhotocountDistribution: total exceeds 1");
}

StateVector fock_state(int n, Cutoff c) {
  if (n < 0 || n >= c.dim)
    throw std::invalid_argument("fock_state: level outside cutoff");
  Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(c.dim);
  amp(n) = 1.0;
  return StateVector(std::move(amp), c);
}

StateVector coherent_state(Complex alpha, Cutoff c, double trunc_tol) {
  Eigen::VectorXcd amp(c.dim);
  // c_0 = e^{-|a|^2/2}, then c_{n} = c_{n-1} * alpha / sqrt(n).
  amp(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < c.dim; ++n) amp(n) = amp(n - 1) * alpha / std::sqrt(double(n));
  StateVector psi(std::move(amp), c);
  const double deficit = 1.0 - psi.norm_sq();
  if (deficit > trunc_tol) {
    std::ostringstream os;
    os << "coherent_state: cutoff " << c.dim << " leaves " << deficit
       << " of the norm uncaptured for |alpha| = " << std::abs(alpha);
    throw TruncationError(os.str());
  }
  return psi;
}

DensityMatrix thermal_state(double nbar, Cutoff c, double trunc_tol) {
  if (!(nbar >= 0.0)) throw std::invalid_argument("thermal_state: nbar must be >= 0");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(c.dim, c.dim);
  const double ratio = nbar / (1.0 + nbar);
  double pn = 1.0 / (1.0 + nbar);
  double total = 0.0;
  for (int n = 0; n < c.dim; ++n, pn *= ratio) {
    m(n, n) = pn;
    total += pn;
  }
  if (1.0 - total > trunc_tol) {
    std::ostringstream os;
    os << "thermal_state: cutoff " << c.dim << " leaves " << 1.0 - total
       << " of the trace uncaptured for nbar = " << nbar;
    throw TruncationError(os.str());
  }
  return DensityMatrix(std::move(m), c);
}

Operator displacement_operator(Complex delta, Cutoff c) {
  const int d = c.dim;
  if (delta == 0.0) return Operator::identity(c);
  const double x = std::norm(delta);  // |delta|^2, Laguerre argument
  const double lax = std::log(std::abs(delta));
  const Complex unit = delta / std::abs(delta);

  Eigen::MatrixXcd D(d, d);
  // Lower triangle, diagonal offset o = m - k >= 0:
  //   <m|D|k> = sqrt(k!/m!) delta^o e^{-x/2} L_k^{(o)}(x)
  // with the prefactor advanced by ratio sqrt((k+1)/(k+o+1)) and L_k^{(o)}
  // by the usual three-term recurrence.  Upper triangle follows from
  //   <k|D|m> = (-1)^(m-k) conj(<m|D|k>).
  double lgo = 0.0;  // ln(o!)
  Complex phase = 1.0;
  for (int o = 0; o < d; ++o) {
    if (o > 0) {
      lgo += std::log(double(o));
      phase *= unit;
    }
    double pref = std::exp(double(o) * lax - 0.5 * x - 0.5 * lgo);
    double lkm1 = 0.0;                  // L_{k-1}^{(o)}(x)
    double lk = 1.0;                    // L_k^{(o)}(x), k = 0
    for (int k = 0; k + o < d; ++k) {
      if (k > 0) {
        const double lkp1 =
            ((2.0 * (k - 1) + o + 1.0 - x) * lk - (k - 1 + o) * lkm1) / double(k);
        lkm1 = lk;
        lk = lkp1;
        pref *= std::sqrt(double(k) / double(k + o));
      }
      const Complex low = pref * phase * lk;
      D(k + o, k) = low;
      if (o > 0) D(k, k + o) = (o % 2 ? -1.0 : 1.0) * std::conj(low);
    }
  }
  return Operator(std::move(D), c);
}

DensityMatrix density_from_pure(const StateVector& psi) {
  return DensityMatrix(psi.amp * psi.amp.adjoint(), psi.cutoff);
}

DensityMatrix conjugate_by(const DensityMatrix& rho, const Operator& u) {
  require_same_cutoff(rho.cutoff, u.cutoff, "conjugate_by");
  Eigen::MatrixXcd x = u.m * rho.m * u.m.adjoint();
  return DensityMatrix(0.5 * (x + x.adjoint().eval()), rho.cutoff);
}

PhotocountDistribution number_distribution(const DensityMatrix& rho) {
  Eigen::VectorXd p = rho.m.diagonal().real();
  for (int n = 0; n < p.size(); ++n) {
    if (p(n) < 0.0) {
      if (p(n) <= -1e-10) {
        std::ostringstream os;
        os << "number_distribution: p_" << n << " = " << p(n) << " below round-off";
        throw IntegrityError(os.str());
      }
      p(n) = 0.0;
    }
  }
  return PhotocountDistribution(std::move(p), rho.cutoff);
}

Complex mean_field(const DensityMatrix& rho) {
  // Tr[rho a] = sum_n sqrt(n+1) rho(n+1, n)
  Complex acc = 0.0;
  for (int n = 0; n + 1 < rho.dim(); ++n)
    acc += std::sqrt(double(n + 1)) * rho.m(n + 1, n);
  return acc;
}

double mean_photons(const DensityMatrix& rho) {
  double acc = 0.0;
  for (int n = 1; n < rho.dim(); ++n) acc += double(n) * rho.m(n, n).real();
  return acc;
}

}  // namespace phasescan
