// Acceptance suite for the sampling library: nine end-to-end checks covering
// the channel/quasidistribution identities, the statistical reconstruction
// pipeline, and output determinism.  Each criterion prints one line; the
// binary exits nonzero if any criterion fails or overruns its time budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "phasescan/fock.hpp"
#include "phasescan/optics.hpp"
#include "phasescan/quasi.hpp"
#include "phasescan/sampling.hpp"
#include "phasescan/scan.hpp"
#include "test_common.hpp"

using namespace phasescan;

namespace {

int failures = 0;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

void criterion(int index, const char* label, double budget_seconds,
               const std::function<bool(std::string&)>& body) {
  std::string note;
  bool ok = false;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    ok = body(note);
  } catch (const std::exception& e) {
    note = std::string("exception: ") + e.what();
    ok = false;
  }
  const double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (ok && dt > budget_seconds) {
    ok = false;
    note = "runtime budget " + sci(budget_seconds) + " s exceeded";
  }
  std::printf("[%s] criterion %d: %s (%.2f s%s%s)\n", ok ? "PASS" : "FAIL",
              index, label, dt, note.empty() ? "" : "; ", note.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// Signal set shared by the analytic identity checks.
std::vector<DensityMatrix> identity_signals(Cutoff cut) {
  std::vector<DensityMatrix> signals;
  for (int n = 0; n <= 3; ++n)
    signals.push_back(density_from_pure(fock_state(n, cut)));
  signals.push_back(thermal_state(0.5, cut));
  return signals;
}

// Fixed configuration for the single-photon reconstruction scans.
ScanConfig single_photon_scan(bool compensate) {
  ScanConfig c;
  c.signal.kind = "fock";
  c.signal.fock_n = 1;
  c.limit_mode = true;
  c.eta = 0.8;
  c.compensate = compensate;
  c.grid.type = "radial";
  c.grid.r_min = 0.0;
  c.grid.r_max = 2.5;
  c.grid.steps = 41;
  c.events = 1000;
  c.master_seed = 17;
  return c;
}

bool finite_transmission_identity(std::string& note) {
  const Cutoff cut(40);
  const std::vector<DensityMatrix> signals = identity_signals(cut);
  const Complex alphas[] = {{0.0, 0.0}, {0.7, 0.0}, {1.0, 1.0}};
  double worst = 0.0;
  for (const DensityMatrix& rho : signals)
    for (const Complex alpha : alphas)
      for (const double t : {0.3, 0.5, 0.9}) {
        const double lhs = pi_expectation(displaced_loss_distribution(
            rho, alpha, Transmission(t), Efficiency(1.0)));
        const Complex beta = std::sqrt((1.0 - t) / t) * alpha;
        const double rhs = std::numbers::pi / (2.0 * t) *
                           quasi_s(rho, beta, -(1.0 - t) / t);
        worst = std::max(worst, std::abs(lhs - rhs));
      }
  note = "max deviation " + sci(worst);
  return worst <= 1e-8;
}

bool overlap_matches_counted_parity(std::string& note) {
  const Cutoff mix_cut(40);
  // The quadrature side uses per-state natural cutoffs; the channel side
  // shares one two-mode cutoff large enough for every kept eigenvector pair.
  struct Pair {
    DensityMatrix mix;
    DensityMatrix wig;
  };
  std::vector<Pair> signals;
  for (int n = 0; n <= 3; ++n)
    signals.push_back({density_from_pure(fock_state(n, mix_cut)),
                       density_from_pure(fock_state(n, Cutoff(n + 1)))});
  signals.push_back({thermal_state(0.5, mix_cut), thermal_state(0.5, Cutoff(26))});
  std::vector<Pair> probes;
  probes.push_back({density_from_pure(fock_state(0, mix_cut)),
                    density_from_pure(fock_state(0, Cutoff(1)))});
  probes.push_back({density_from_pure(coherent_state(1.0, mix_cut)),
                    density_from_pure(coherent_state(1.0, Cutoff(18)))});
  probes.push_back({thermal_state(0.3, mix_cut), thermal_state(0.3, Cutoff(20))});

  const PhaseGrid grid(Complex(0.0, 0.0), 4.5, 201);
  double worst = 0.0;
  for (const Pair& s : signals)
    for (const Pair& p : probes)
      for (const double t : {0.3, 0.5, 0.9}) {
        const double channel = pi_expectation(
            mixed_counted_distribution(s.mix, p.mix, Transmission(t)));
        const double quadrature = overlap_pi(s.wig, p.wig, t, grid);
        worst = std::max(worst, std::abs(channel - quadrature));
      }
  note = "max deviation " + sci(worst);
  return worst < 1e-5;
}

bool origin_parity_anchor(std::string& note) {
  for (int n = 0; n <= 5; ++n) {
    const double target = n % 2 ? -1.0 : 1.0;
    const double closed =
        std::numbers::pi / 2.0 * wigner_fock(n, Complex(0.0, 0.0));
    if (closed != target) {
      note = "closed form not exact at n = " + std::to_string(n);
      return false;
    }
    const DensityMatrix rho = density_from_pure(fock_state(n, Cutoff(n + 3)));
    const double series =
        std::numbers::pi / 2.0 * quasi_s(rho, Complex(0.0, 0.0), 0.0);
    if (std::abs(series - target) > 1e-10) {
      note = "series off by " + sci(std::abs(series - target)) +
             " at n = " + std::to_string(n);
      return false;
    }
  }
  return true;
}

bool attenuated_single_photon_line(std::string& note) {
  const Cutoff cut(12);
  const StateVector one = fock_state(1, cut);
  const StateVector vac = fock_state(0, cut);
  const DensityMatrix rho = density_from_pure(one);
  double worst = 0.0;
  for (const double t : {0.25, 0.5, 0.75, 0.9}) {
    const double expected = 1.0 - 2.0 * t;
    const double via_two_mode = pi_expectation(
        counted_mode_distribution(beam_splitter_pure(one, vac, Transmission(t))));
    const double via_shortcut = pi_expectation(displaced_loss_distribution(
        rho, Complex(0.0, 0.0), Transmission(t), Efficiency(1.0)));
    worst = std::max({worst, std::abs(via_two_mode - expected),
                      std::abs(via_shortcut - expected)});
  }
  note = "max deviation " + sci(worst);
  return worst <= 1e-10;
}

bool uncompensated_scan_statistics(std::string& note) {
  const ScanResult r = run_scan(single_photon_scan(false));
  if (r.rows.size() != 41) {
    note = "unexpected row count";
    return false;
  }
  int within = 0;
  for (const ScanRow& row : r.rows) {
    const double bound = 4.0 * row.analytic_sigma / std::sqrt(1000.0);
    if (std::abs(row.mc_mean - row.analytic_mean) <= bound) ++within;
  }
  note = std::to_string(within) + "/41 points within 4 sigma";
  if (std::abs(r.rows[0].analytic_mean + 0.6) > 1e-12) {
    note += "; origin mean " + sci(r.rows[0].analytic_mean);
    return false;
  }
  return within >= 39;
}

bool compensated_scan_explosion(std::string& note) {
  const ScanResult comp = run_scan(single_photon_scan(true));
  const ScanResult plain = run_scan(single_photon_scan(false));
  const ScanRow& origin = comp.rows[0];
  if (std::abs(origin.analytic_mean + 1.0) > 1e-12 ||
      std::abs(origin.analytic_sigma - 1.0) > 1e-12) {
    note = "origin moments off: mean " + sci(origin.analytic_mean) +
           ", sigma " + sci(origin.analytic_sigma);
    return false;
  }
  if (origin.mc_stderr < 0.025 || origin.mc_stderr > 0.040) {
    note = "origin stderr " + sci(origin.mc_stderr) + " not near 3.16e-02";
    return false;
  }
  double max_ratio = 0.0;
  for (std::size_t i = 0; i < comp.rows.size(); ++i) {
    if (i > 0 &&
        !(comp.rows[i].analytic_sigma > comp.rows[i - 1].analytic_sigma)) {
      note = "sigma not strictly increasing at point " + std::to_string(i);
      return false;
    }
    if (plain.rows[i].analytic_sigma > 0.0)
      max_ratio = std::max(max_ratio, comp.rows[i].analytic_sigma /
                                          plain.rows[i].analytic_sigma);
  }
  note = "max sigma ratio " + sci(max_ratio);
  return max_ratio > 10.0;
}

bool compensation_base_oracle(std::string& note) {
  double worst = 0.0;
  for (unsigned seed = 1; seed <= 20; ++seed) {
    const PhotocountDistribution p(testutil::random_distribution(13, seed),
                                   Cutoff(13));
    const double ideal = pi_expectation(p);
    for (const double eta : {0.5, 0.8, 0.95}) {
      const PhotocountDistribution thinned =
          loss_channel(p, Efficiency(eta));
      const double compensated =
          analytic_moments(thinned, compensation_base(Efficiency(eta))).mean;
      worst = std::max(worst, std::abs(compensated - ideal));
    }
  }
  note = "max deviation " + sci(worst);
  return worst <= 1e-10;
}

bool deterministic_csv(std::string& note) {
  ScanConfig c = single_photon_scan(false);
  const auto render = [](const ScanConfig& cfg) {
    std::ostringstream out;
    emit_csv(run_scan(cfg), out);
    return out.str();
  };
  const std::string first = render(c);
  const std::string second = render(c);
  c.threads = 3;
  const std::string threaded = render(c);
  if (first.empty() || first != second) {
    note = "rerun differs";
    return false;
  }
  if (first != threaded) {
    note = "thread count changed output";
    return false;
  }
  note = std::to_string(first.size()) + " bytes stable";
  return true;
}

bool quadrature_normalization(std::string& note) {
  std::vector<DensityMatrix> states;
  for (int n = 0; n <= 2; ++n)
    states.push_back(density_from_pure(fock_state(n, Cutoff(n + 1))));
  for (const Complex a : {Complex(0.7, 0.0), Complex(1.2, 0.9), Complex(2.0, 0.0)})
    states.push_back(density_from_pure(
        coherent_state(a, Cutoff(cutoff_for_amplitude(std::abs(a))))));
  states.push_back(thermal_state(0.3, Cutoff(25)));
  states.push_back(thermal_state(1.0, Cutoff(35)));
  states.push_back(thermal_state(2.0, Cutoff(50)));
  double worst = 0.0;
  for (const DensityMatrix& rho : states) {
    const double q = wigner_quadrature(rho, default_grid(rho));
    worst = std::max(worst, std::abs(q - rho.trace_re()));
  }
  note = "max |quadrature - trace| " + sci(worst);
  return worst <= 1e-6;
}

}  // namespace

int main() {
  criterion(1, "finite-transmission sampling identity", 10.0,
            finite_transmission_identity);
  criterion(2, "phase-space overlap matches counted parity", 60.0,
            overlap_matches_counted_parity);
  criterion(3, "parity anchor at the origin", 1.0, origin_parity_anchor);
  criterion(4, "single photon against vacuum probe", 5.0,
            attenuated_single_photon_line);
  criterion(5, "uncompensated single-photon scan statistics", 10.0,
            uncompensated_scan_statistics);
  criterion(6, "compensated scan restores ideal values, error explodes", 10.0,
            compensated_scan_explosion);
  criterion(7, "compensation base undoes detector loss", 1.0,
            compensation_base_oracle);
  criterion(8, "byte-identical output across reruns and thread counts", 20.0,
            deterministic_csv);
  criterion(9, "Wigner quadrature reproduces the trace", 30.0,
            quadrature_normalization);
  return failures == 0 ? 0 : 1;
}
