#include "phasescan/optics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "phasescan/errors.hpp"

namespace phasescan {

namespace {

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
         std::lgamma(n - k + 1.0);
}

// Shared-engine pure mixing; also the per-pair worker of the mixed path.
TwoModePureState mix_pure(const BeamSplitter& engine,
                          const StateVector& psi_signal,
                          const StateVector& psi_probe) {
  if (!(psi_signal.cutoff == psi_probe.cutoff))
    throw CutoffMismatch("signal and probe cutoffs differ");
  const int d = psi_signal.dim();

  // Weight sitting on total-photon blocks that no longer fit the cutoff.
  const Eigen::VectorXd ps = psi_signal.amp.cwiseAbs2();
  const Eigen::VectorXd pp = psi_probe.amp.cwiseAbs2();
  double high = 0.0;
  for (int p = 0; p < d; ++p) {
    double tail = 0.0;
    for (int q = d - p; q < d; ++q) tail += pp(q);
    high += ps(p) * tail;
  }
  if (high > kTruncationTol)
    throw TruncationError(
        "combined photon content above the cutoff carries weight " +
        std::to_string(high) + "; enlarge the shared cutoff");

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (int total = 0; total < d; ++total) {
    Eigen::VectorXcd v(total + 1);
    bool occupied = false;
    for (int m = 0; m <= total; ++m) {
      v(m) = psi_signal.amp(m) * psi_probe.amp(total - m);
      if (v(m) != 0.0) occupied = true;
    }
    if (!occupied) continue;
    const Eigen::VectorXcd u = engine.block(total) * v;
    for (int m = 0; m <= total; ++m) out(m, total - m) = u(m);
  }
  return TwoModePureState(std::move(out), psi_signal.cutoff);
}

}  // namespace

Transmission::Transmission(double value_in) : value(value_in) {
  if (!std::isfinite(value) || !(value > 0.0) || value > 1.0)
    throw std::invalid_argument("transmission must lie in (0, 1]");
}

Efficiency::Efficiency(double value_in) : value(value_in) {
  if (!std::isfinite(value) || !(value > 0.0) || value > 1.0)
    throw std::invalid_argument("efficiency must lie in (0, 1]");
}

TwoModePureState::TwoModePureState(Eigen::MatrixXcd amplitudes,
                                   Cutoff cutoff_in)
    : amp(std::move(amplitudes)), cutoff(cutoff_in) {
  if (amp.rows() != cutoff.dim || amp.cols() != cutoff.dim)
    throw CutoffMismatch("two-mode amplitude array does not match its cutoff");
  if (!amp.allFinite())
    throw IntegrityError("two-mode amplitudes must be finite");
  // Slack of twice the truncation tolerance: inputs may each sit at the edge
  // of their own truncation budget before mixing drops high blocks.
  const double n2 = amp.squaredNorm();
  if (n2 < 1.0 - 2.0 * kTruncationTol || n2 > 1.0 + 1e-9)
    throw TruncationError("two-mode state norm " + std::to_string(n2) +
                          " is outside the truncation budget");
}

BeamSplitter::BeamSplitter(Transmission t)
    : t_(t.value), theta_(-std::asin(std::sqrt(1.0 - t.value))) {
  if (!(t.value < 1.0))
    throw std::invalid_argument("two-mode mixing requires transmission < 1");
}

const Eigen::MatrixXd& BeamSplitter::block(int total) const {
  if (total < 0) throw std::invalid_argument("photon block must be >= 0");
  while (static_cast<int>(blocks_.size()) <= total) {
    const int n = static_cast<int>(blocks_.size());
    // Generator of the rotation restricted to |m, n-m>: antisymmetric
    // tridiagonal, so the exponential is a real orthogonal matrix.
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int m = 0; m < n; ++m) {
      const double c = std::sqrt((m + 1.0) * (n - m));
      gen(m + 1, m) = c;
      gen(m, m + 1) = -c;
    }
    blocks_.push_back((theta_ * gen).exp());
  }
  return blocks_[total];
}

TwoModePureState beam_splitter_pure(const StateVector& psi_signal,
                                    const StateVector& psi_probe,
                                    Transmission t) {
  const BeamSplitter engine(t);
  return mix_pure(engine, psi_signal, psi_probe);
}

PhotocountDistribution counted_mode_distribution(
    const TwoModePureState& two_mode) {
  Eigen::VectorXd p = two_mode.amp.cwiseAbs2().rowwise().sum();
  return PhotocountDistribution(std::move(p), two_mode.cutoff);
}

PhotocountDistribution mixed_counted_distribution(
    const DensityMatrix& rho_signal, const DensityMatrix& rho_probe,
    Transmission t) {
  if (!(rho_signal.cutoff == rho_probe.cutoff))
    throw CutoffMismatch("signal and probe cutoffs differ");
  const BeamSplitter engine(t);
  const int d = rho_signal.dim();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_signal.m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ep(rho_probe.m);
  if (es.info() != Eigen::Success || ep.info() != Eigen::Success)
    throw IntegrityError("eigendecomposition of a mixing input failed");

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < d; ++i) {
    const double ws = es.eigenvalues()(i);
    if (!(ws * ep.eigenvalues().maxCoeff() >= 1e-12)) continue;
    const StateVector s(es.eigenvectors().col(i), rho_signal.cutoff);
    for (int j = 0; j < d; ++j) {
      const double w = ws * ep.eigenvalues()(j);
      if (!(w >= 1e-12)) continue;
      const StateVector pr(ep.eigenvectors().col(j), rho_probe.cutoff);
      const TwoModePureState mixed = mix_pure(engine, s, pr);
      acc += w * mixed.amp.cwiseAbs2().rowwise().sum();
    }
  }
  return PhotocountDistribution(std::move(acc), rho_signal.cutoff);
}

PhotocountDistribution loss_channel(const PhotocountDistribution& p,
                                    Efficiency eta) {
  if (eta.value == 1.0) return p;
  const int d = static_cast<int>(p.p.size());
  const double le = std::log(eta.value);
  const double l1e = std::log1p(-eta.value);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
  for (int n = 0; n < d; ++n) {
    const double pn = p.p(n);
    if (pn == 0.0) continue;
    for (int k = 0; k <= n; ++k)
      out(k) += pn * std::exp(log_binomial(n, k) + k * le + (n - k) * l1e);
  }
  return PhotocountDistribution(std::move(out), p.cutoff);
}

double pi_expectation(const PhotocountDistribution& p) {
  double acc = 0.0;
  double sign = 1.0;
  for (int n = 0; n < p.p.size(); ++n) {
    acc += sign * p.p(n);
    sign = -sign;
  }
  return acc;
}

DensityMatrix quantum_attenuate(const DensityMatrix& rho, Transmission t) {
  if (t.value == 1.0) return rho;
  const int d = rho.dim();
  const double lt = std::log(t.value);
  const double l1t = std::log1p(-t.value);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  Eigen::VectorXd c(d);
  for (int k = 0; k < d; ++k) {
    // Kraus weight c_k(n) = sqrt(C(n,k) T^{n-k} (1-T)^k) maps |n> -> |n-k>.
    for (int n = k; n < d; ++n)
      c(n) = std::exp(0.5 * (log_binomial(n, k) + (n - k) * lt + k * l1t));
    for (int i = k; i < d; ++i)
      for (int j = k; j < d; ++j)
        out(i - k, j - k) += c(i) * c(j) * rho.m(i, j);
  }
  return DensityMatrix(std::move(out), rho.cutoff);
}

PhotocountDistribution displaced_loss_distribution(
    const DensityMatrix& rho_signal, Complex probe_alpha, Transmission t,
    Efficiency eta) {
  if (!std::isfinite(probe_alpha.real()) || !std::isfinite(probe_alpha.imag()))
    throw IntegrityError("probe amplitude must be finite");
  const double trace_before = rho_signal.trace_re();
  PhotocountDistribution q = [&] {
    if (t.value == 1.0) return number_distribution(rho_signal);
    const DensityMatrix thinned = quantum_attenuate(rho_signal, t);
    const Complex shift = -std::sqrt(1.0 - t.value) * probe_alpha;
    const DensityMatrix moved =
        conjugate_by(thinned, displacement_operator(shift, rho_signal.cutoff));
    return number_distribution(moved);
  }();
  if (trace_before - q.total() > kTruncationTol)
    throw TruncationError(
        "displaced distribution lost probability " +
        std::to_string(trace_before - q.total()) +
        " at this cutoff; enlarge it to hold the probe displacement");
  return loss_channel(q, eta);
}

}  // namespace phasescan
