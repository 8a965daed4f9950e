#pragma once

// Physical channel layer: exact two-mode beam-splitter mixing on total-photon
// blocks, photodetector loss, photocount statistics of the counted port, and
// the alternating parity expectation.

#include <vector>

#include "phasescan/fock.hpp"

namespace phasescan {

// Power transmission of the mixing beam splitter.  T = 1 is accepted only by
// the displaced-loss shortcut, where the probe decouples.
struct Transmission {
  explicit Transmission(double value_in);
  double value;
};

// Photodetector quantum efficiency.
struct Efficiency {
  explicit Efficiency(double value_in);
  double value;
};

// Pure two-mode state over a shared cutoff: amp(m, n) holds the amplitude for
// m photons in the counted output port and n in the discarded one.
struct TwoModePureState {
  TwoModePureState(Eigen::MatrixXcd amplitudes, Cutoff cutoff_in);
  int dim() const { return cutoff.dim; }
  double norm_sq() const { return amp.squaredNorm(); }

  Eigen::MatrixXcd amp;
  Cutoff cutoff;
};

// Photon-number-conserving mixer for the counted mode
// b = sqrt(T) a_S - sqrt(1-T) a_P.  Caches the orthogonal rotation acting on
// each total-photon block; blocks are built lazily per instance.
class BeamSplitter {
 public:
  explicit BeamSplitter(Transmission t);
  // (N+1)x(N+1) rotation on the block spanned by |m, N-m>, m = 0..N.
  const Eigen::MatrixXd& block(int total) const;
  double transmission() const { return t_; }

 private:
  double t_;
  double theta_;
  mutable std::vector<Eigen::MatrixXd> blocks_;
};

// Mixes two pure states through the splitter.  Throws TruncationError when
// the combined photon content above the shared cutoff carries more than
// kTruncationTol of the weight.
TwoModePureState beam_splitter_pure(const StateVector& psi_signal,
                                    const StateVector& psi_probe,
                                    Transmission t);

// Marginal photon statistics of the counted port: p_m = sum_n |amp(m, n)|^2.
PhotocountDistribution counted_mode_distribution(
    const TwoModePureState& two_mode);

// Mixes two density matrices by eigendecomposing both and combining the
// counted marginals of all pure pairs; pairs with eigenvalue weight product
// below 1e-12 are dropped.
PhotocountDistribution mixed_counted_distribution(
    const DensityMatrix& rho_signal, const DensityMatrix& rho_probe,
    Transmission t);

// Bernoulli photodetector loss:
// p'_k = sum_{n >= k} C(n, k) eta^k (1-eta)^{n-k} p_n; eta = 1 is an exact
// identity.
PhotocountDistribution loss_channel(const PhotocountDistribution& p,
                                    Efficiency eta);

// <Pi> = sum_n (-1)^n p_n.
double pi_expectation(const PhotocountDistribution& p);

// State-level attenuation (fictitious beam splitter against vacuum, Kraus
// form).  Trace preserving; diagonal action matches loss_channel.
DensityMatrix quantum_attenuate(const DensityMatrix& rho, Transmission t);

// Counted-port statistics for a coherent probe |alpha>: attenuate the signal
// by T, displace by -sqrt(1-T) alpha, count, then thin by eta.  T = 1 skips
// the probe entirely.  Throws TruncationError when the displaced distribution
// loses more than kTruncationTol of the trace at this cutoff.
PhotocountDistribution displaced_loss_distribution(
    const DensityMatrix& rho_signal, Complex probe_alpha, Transmission t,
    Efficiency eta);

}  // namespace phasescan
