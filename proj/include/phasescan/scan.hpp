#pragma once

// Scan orchestration: parse a JSON experiment description, run the per-point
// pipeline (signal -> channel -> photocount distribution -> Monte Carlo
// estimate + analytic references), and emit CSV/JSON reconstruction grids.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "phasescan/fock.hpp"

namespace phasescan {

struct SignalSpec {
  std::string kind;  // "fock" | "coherent" | "thermal"
  int fock_n = 0;
  Complex alpha = 0.0;
  double nbar = 0.0;
};

struct GridSpec {
  std::string type = "radial";  // "radial" | "cartesian"
  // Radial sweep: points r_min..r_max (inclusive) along phase (radians).
  double phase = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  int steps = 1;
  // Cartesian grid, inclusive bounds, row-major with the real axis innermost.
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;
  int re_steps = 1;
  int im_steps = 1;

  int point_count() const {
    return type == "radial" ? steps : re_steps * im_steps;
  }
  Complex point(int index) const;
};

struct ScanConfig {
  SignalSpec signal;
  // limit_mode selects the unit-transmission shortcut; grid coordinates are
  // then the rescaled abscissa itself.  Otherwise grid coordinates are probe
  // amplitudes and transmission must lie strictly inside (0, 1).
  bool limit_mode = false;
  double transmission = 0.0;
  double eta = 1.0;
  bool compensate = false;
  GridSpec grid;
  std::int64_t events = 0;  // 0 = analytic-only rows
  std::uint64_t master_seed = 0;
  int cutoff = 0;  // 0 = auto
  int threads = 1;
};

struct ScanRow {
  Complex target;     // rescaled abscissa sqrt((1-T)/T) * alpha
  Complex raw_alpha;  // probe amplitude (equals target in limit mode)
  bool has_mc = false;
  double mc_mean = 0.0;
  double mc_stderr = 0.0;
  double analytic_mean = 0.0;
  double analytic_sigma = 0.0;  // per-event standard deviation
  double exact_quasi = 0.0;     // ideal unit-efficiency parity
  std::int64_t events = 0;
  double base = 0.0;
};

struct ScanResult {
  ScanConfig config;
  int resolved_cutoff = 0;
  std::vector<ScanRow> rows;
};

// Parse and validate a JSON config document.  Throws ConfigError on malformed
// input, unknown keys, or out-of-range values.
ScanConfig parse_config(const std::string& json_text);

// Read the file and parse it; missing/unreadable files throw IoError.
ScanConfig load_config(const std::string& path);

// Execute the scan.  Deterministic for a fixed config and master seed,
// independent of the thread count.
ScanResult run_scan(const ScanConfig& config);

void emit_csv(const ScanResult& result, std::ostream& out);
void emit_csv_file(const ScanResult& result, const std::string& path);
void emit_json(const ScanResult& result, std::ostream& out);
void emit_json_file(const ScanResult& result, const std::string& path);

// Full command-line entry point; returns the process exit code
// (0 ok, 2 config error, 3 truncation/integrity error, 4 I/O error).
int cli_main(int argc, char** argv);

}  // namespace phasescan
