#include "phasescan/scan.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phasescan/errors.hpp"
#include "phasescan/optics.hpp"
#include "phasescan/quasi.hpp"
#include "phasescan/sampling.hpp"

namespace phasescan {

namespace {

using nlohmann::ordered_json;

double require_number(const ordered_json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("missing field \"" + key + "\"");
  if (!j[key].is_number())
    throw ConfigError("field \"" + key + "\" must be a number");
  return j[key].get<double>();
}

int require_int(const ordered_json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("missing field \"" + key + "\"");
  if (!j[key].is_number_integer())
    throw ConfigError("field \"" + key + "\" must be an integer");
  return j[key].get<int>();
}

void reject_unknown_keys(const ordered_json& j,
                         const std::vector<std::string>& known,
                         const std::string& context) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const auto& k : known)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError("unknown field \"" + item.key() + "\" in " + context);
  }
}

Complex parse_amplitude(const ordered_json& j, const std::string& key) {
  const auto& v = j[key];
  if (v.is_number()) return Complex(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return Complex(v[0].get<double>(), v[1].get<double>());
  throw ConfigError("field \"" + key +
                    "\" must be a number or a [re, im] pair");
}

SignalSpec parse_signal(const ordered_json& j) {
  if (!j.is_object()) throw ConfigError("\"signal\" must be an object");
  SignalSpec s;
  if (!j.contains("kind") || !j["kind"].is_string())
    throw ConfigError("signal needs a string \"kind\"");
  s.kind = j["kind"].get<std::string>();
  if (s.kind == "fock") {
    reject_unknown_keys(j, {"kind", "n"}, "signal");
    s.fock_n = require_int(j, "n");
    if (s.fock_n < 0) throw ConfigError("fock level must be >= 0");
  } else if (s.kind == "coherent") {
    reject_unknown_keys(j, {"kind", "alpha"}, "signal");
    if (!j.contains("alpha")) throw ConfigError("missing field \"alpha\"");
    s.alpha = parse_amplitude(j, "alpha");
    if (!std::isfinite(s.alpha.real()) || !std::isfinite(s.alpha.imag()))
      throw ConfigError("signal amplitude must be finite");
  } else if (s.kind == "thermal") {
    reject_unknown_keys(j, {"kind", "nbar"}, "signal");
    s.nbar = require_number(j, "nbar");
    if (!(s.nbar >= 0.0) || !std::isfinite(s.nbar))
      throw ConfigError("thermal nbar must be finite and >= 0");
  } else {
    throw ConfigError("signal kind must be fock, coherent or thermal");
  }
  return s;
}

GridSpec parse_grid(const ordered_json& j) {
  if (!j.is_object()) throw ConfigError("\"grid\" must be an object");
  GridSpec g;
  if (!j.contains("type") || !j["type"].is_string())
    throw ConfigError("grid needs a string \"type\"");
  g.type = j["type"].get<std::string>();
  if (g.type == "radial") {
    reject_unknown_keys(j, {"type", "phase", "r_min", "r_max", "steps"},
                        "grid");
    g.phase = j.contains("phase") ? require_number(j, "phase") : 0.0;
    g.r_min = require_number(j, "r_min");
    g.r_max = require_number(j, "r_max");
    g.steps = require_int(j, "steps");
    if (g.steps < 1) throw ConfigError("grid steps must be >= 1");
    if (!(g.r_min <= g.r_max))
      throw ConfigError("grid needs r_min <= r_max");
  } else if (g.type == "cartesian") {
    reject_unknown_keys(j,
                        {"type", "re_min", "re_max", "im_min", "im_max",
                         "re_steps", "im_steps"},
                        "grid");
    g.re_min = require_number(j, "re_min");
    g.re_max = require_number(j, "re_max");
    g.im_min = require_number(j, "im_min");
    g.im_max = require_number(j, "im_max");
    g.re_steps = require_int(j, "re_steps");
    g.im_steps = require_int(j, "im_steps");
    if (g.re_steps < 1 || g.im_steps < 1)
      throw ConfigError("grid steps must be >= 1");
    if (!(g.re_min <= g.re_max) || !(g.im_min <= g.im_max))
      throw ConfigError("grid bounds must be ordered");
  } else {
    throw ConfigError("grid type must be radial or cartesian");
  }
  return g;
}

double linear(double lo, double hi, int index, int count) {
  if (count == 1) return lo;
  return lo + (hi - lo) * static_cast<double>(index) /
                  static_cast<double>(count - 1);
}

// Maximum |coordinate| over the grid; extremes sit on the boundary for both
// grid kinds.
double max_coordinate(const GridSpec& g) {
  if (g.type == "radial")
    return std::max(std::abs(g.r_min), std::abs(g.r_max));
  double m = 0.0;
  for (double re : {g.re_min, g.re_max})
    for (double im : {g.im_min, g.im_max})
      m = std::max(m, std::abs(Complex(re, im)));
  return m;
}

// Fock levels needed to hold a thermal tail below the truncation tolerance.
int thermal_levels(double nbar) {
  if (nbar <= 0.0) return 1;
  const double ratio = nbar / (1.0 + nbar);
  return static_cast<int>(
             std::ceil(std::log(kTruncationTol) / std::log(ratio))) +
         1;
}

DensityMatrix build_signal(const SignalSpec& s, Cutoff c) {
  if (s.kind == "fock") return density_from_pure(fock_state(s.fock_n, c));
  if (s.kind == "coherent")
    return density_from_pure(coherent_state(s.alpha, c));
  return thermal_state(s.nbar, c);
}

int resolve_cutoff(const ScanConfig& config) {
  if (config.cutoff > 0) return config.cutoff;
  double signal_amp = 0.0;
  int extra = 0;
  if (config.signal.kind == "fock") {
    signal_amp = std::sqrt(static_cast<double>(config.signal.fock_n));
  } else if (config.signal.kind == "coherent") {
    signal_amp = std::abs(config.signal.alpha);
  } else {
    signal_amp = std::sqrt(config.signal.nbar);
    extra = std::max(0, thermal_levels(config.signal.nbar) -
                            cutoff_for_amplitude(signal_amp));
  }
  const double coord = max_coordinate(config.grid);
  const double shift = config.limit_mode
                           ? coord
                           : std::sqrt(1.0 - config.transmission) * coord;
  return cutoff_for_amplitude(signal_amp + shift) + extra + 8;
}

ScanRow compute_row(const ScanConfig& config, const DensityMatrix& signal,
                    int index, double base) {
  const Complex coord = config.grid.point(index);
  ScanRow row;
  row.events = config.events;
  row.base = base;

  PhotocountDistribution counts = [&] {
    if (config.limit_mode) {
      row.target = coord;
      row.raw_alpha = coord;
      const DensityMatrix moved = conjugate_by(
          signal, displacement_operator(-coord, signal.cutoff));
      PhotocountDistribution q = number_distribution(moved);
      if (signal.trace_re() - q.total() > kTruncationTol)
        throw TruncationError("displaced distribution lost probability " +
                              std::to_string(signal.trace_re() - q.total()));
      return loss_channel(q, Efficiency(config.eta));
    }
    const double t = config.transmission;
    row.raw_alpha = coord;
    row.target = std::sqrt((1.0 - t) / t) * coord;
    return displaced_loss_distribution(signal, coord, Transmission(t),
                                       Efficiency(config.eta));
  }();

  const AnalyticMoments moments = analytic_moments(counts, base);
  row.analytic_mean = moments.mean;
  row.analytic_sigma = std::sqrt(moments.variance);

  if (config.limit_mode) {
    row.exact_quasi =
        std::numbers::pi / 2.0 * wigner(signal, row.target);
  } else {
    const double t = config.transmission;
    row.exact_quasi = std::numbers::pi / (2.0 * t) *
                      quasi_s_closed(signal, row.target, -(1.0 - t) / t);
  }

  if (config.events > 0) {
    const SeedSpec seed{config.master_seed,
                        static_cast<std::uint64_t>(index)};
    const auto draws = sample_photocounts(counts, config.events, seed);
    const EstimatorResult est = weighted_series_estimate(draws, base);
    row.has_mc = true;
    row.mc_mean = est.mean;
    row.mc_stderr = est.std_error;
  }
  return row;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json config_json(const ScanConfig& config, int resolved_cutoff) {
  ordered_json sig;
  sig["kind"] = config.signal.kind;
  if (config.signal.kind == "fock") sig["n"] = config.signal.fock_n;
  if (config.signal.kind == "coherent")
    sig["alpha"] = {config.signal.alpha.real(), config.signal.alpha.imag()};
  if (config.signal.kind == "thermal") sig["nbar"] = config.signal.nbar;

  ordered_json grid;
  grid["type"] = config.grid.type;
  if (config.grid.type == "radial") {
    grid["phase"] = config.grid.phase;
    grid["r_min"] = config.grid.r_min;
    grid["r_max"] = config.grid.r_max;
    grid["steps"] = config.grid.steps;
  } else {
    grid["re_min"] = config.grid.re_min;
    grid["re_max"] = config.grid.re_max;
    grid["im_min"] = config.grid.im_min;
    grid["im_max"] = config.grid.im_max;
    grid["re_steps"] = config.grid.re_steps;
    grid["im_steps"] = config.grid.im_steps;
  }

  ordered_json out;
  out["signal"] = std::move(sig);
  if (config.limit_mode)
    out["transmission"] = "limit";
  else
    out["transmission"] = config.transmission;
  out["eta"] = config.eta;
  out["compensate"] = config.compensate;
  out["grid"] = std::move(grid);
  out["events"] = config.events;
  out["master_seed"] = config.master_seed;
  out["cutoff"] = resolved_cutoff;
  out["cutoff_requested"] =
      config.cutoff > 0 ? ordered_json(config.cutoff) : ordered_json("auto");
  out["threads"] = config.threads;
  out["rng"] = kRngAlgorithm;
  return out;
}

}  // namespace

Complex GridSpec::point(int index) const {
  if (type == "radial") {
    const double r = linear(r_min, r_max, index, steps);
    return Complex(r * std::cos(phase), r * std::sin(phase));
  }
  const int ix = index % re_steps;
  const int iy = index / re_steps;
  return Complex(linear(re_min, re_max, ix, re_steps),
                 linear(im_min, im_max, iy, im_steps));
}

ScanConfig parse_config(const std::string& json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown_keys(doc,
                      {"signal", "transmission", "eta", "compensate", "grid",
                       "events", "master_seed", "cutoff", "threads"},
                      "config");

  ScanConfig config;
  if (!doc.contains("signal")) throw ConfigError("missing field \"signal\"");
  config.signal = parse_signal(doc["signal"]);

  if (!doc.contains("transmission"))
    throw ConfigError("missing field \"transmission\"");
  if (doc["transmission"].is_string()) {
    if (doc["transmission"].get<std::string>() != "limit")
      throw ConfigError("transmission must be a number in (0, 1) or \"limit\"");
    config.limit_mode = true;
  } else if (doc["transmission"].is_number()) {
    config.transmission = doc["transmission"].get<double>();
    if (!std::isfinite(config.transmission) ||
        !(config.transmission > 0.0) || !(config.transmission < 1.0))
      throw ConfigError(
          "transmission must lie strictly inside (0, 1); use \"limit\" for "
          "the unit-transmission shortcut");
  } else {
    throw ConfigError("transmission must be a number or \"limit\"");
  }

  if (doc.contains("eta")) {
    config.eta = require_number(doc, "eta");
    if (!std::isfinite(config.eta) || !(config.eta > 0.0) || config.eta > 1.0)
      throw ConfigError("eta must lie in (0, 1]");
  }
  if (doc.contains("compensate")) {
    if (!doc["compensate"].is_boolean())
      throw ConfigError("compensate must be a boolean");
    config.compensate = doc["compensate"].get<bool>();
  }

  if (!doc.contains("grid")) throw ConfigError("missing field \"grid\"");
  config.grid = parse_grid(doc["grid"]);

  if (doc.contains("events")) {
    if (!doc["events"].is_number_integer())
      throw ConfigError("events must be an integer");
    config.events = doc["events"].get<std::int64_t>();
    if (config.events < 0) throw ConfigError("events must be >= 0");
  }
  if (doc.contains("master_seed")) {
    if (!doc["master_seed"].is_number_integer() ||
        (doc["master_seed"].is_number_integer() &&
         doc["master_seed"].is_number_unsigned() == false &&
         doc["master_seed"].get<std::int64_t>() < 0))
      throw ConfigError("master_seed must be a nonnegative integer");
    config.master_seed = doc["master_seed"].get<std::uint64_t>();
  }
  if (doc.contains("cutoff")) {
    if (doc["cutoff"].is_string()) {
      if (doc["cutoff"].get<std::string>() != "auto")
        throw ConfigError("cutoff must be a positive integer or \"auto\"");
      config.cutoff = 0;
    } else {
      config.cutoff = require_int(doc, "cutoff");
      if (config.cutoff < 1)
        throw ConfigError("cutoff must be a positive integer or \"auto\"");
    }
  }
  if (doc.contains("threads")) {
    config.threads = require_int(doc, "threads");
    if (config.threads < 1) throw ConfigError("threads must be >= 1");
  }
  return config;
}

ScanConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("cannot read config file " + path);
  return parse_config(text.str());
}

ScanResult run_scan(const ScanConfig& config) {
  ScanResult result;
  result.config = config;
  result.resolved_cutoff = resolve_cutoff(config);
  const Cutoff cutoff(result.resolved_cutoff);
  const DensityMatrix signal = build_signal(config.signal, cutoff);
  const double base = config.compensate
                          ? compensation_base(Efficiency(config.eta))
                          : -1.0;

  const int points = config.grid.point_count();
  result.rows.resize(points);
  const int workers = std::min(config.threads, std::max(points, 1));

  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto work = [&](int worker) {
    for (int i = worker; i < points; i += workers) {
      try {
        result.rows[i] = compute_row(config, signal, i, base);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) {
          try {
            throw;
          } catch (const TruncationError& e) {
            const Complex c = config.grid.point(i);
            first_error = std::make_exception_ptr(TruncationError(
                "point " + std::to_string(i) + " at (" + fmt17(c.real()) +
                ", " + fmt17(c.imag()) + "): " + e.what()));
          } catch (...) {
            first_error = std::current_exception();
          }
        }
      }
    }
  };

  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return result;
}

void emit_csv(const ScanResult& result, std::ostream& out) {
  out << "target_re,target_im,alpha_re,alpha_im,mc_mean,mc_stderr,"
         "analytic_mean,analytic_sigma,exact_quasi,events,base\n";
  for (const ScanRow& row : result.rows) {
    out << fmt17(row.target.real()) << ',' << fmt17(row.target.imag()) << ','
        << fmt17(row.raw_alpha.real()) << ',' << fmt17(row.raw_alpha.imag())
        << ',';
    if (row.has_mc)
      out << fmt17(row.mc_mean) << ',' << fmt17(row.mc_stderr);
    else
      out << ',';
    out << ',' << fmt17(row.analytic_mean) << ',' << fmt17(row.analytic_sigma)
        << ',' << fmt17(row.exact_quasi) << ',' << row.events << ','
        << fmt17(row.base) << '\n';
  }
}

void emit_csv_file(const ScanResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file " + path);
  emit_csv(result, out);
  out.flush();
  if (!out) throw IoError("failed writing output file " + path);
}

void emit_json(const ScanResult& result, std::ostream& out) {
  ordered_json doc;
  doc["config"] = config_json(result.config, result.resolved_cutoff);
  ordered_json rows = ordered_json::array();
  for (const ScanRow& row : result.rows) {
    ordered_json r;
    r["target"] = {row.target.real(), row.target.imag()};
    r["alpha"] = {row.raw_alpha.real(), row.raw_alpha.imag()};
    if (row.has_mc) {
      r["mc_mean"] = row.mc_mean;
      r["mc_stderr"] = row.mc_stderr;
    }
    r["analytic_mean"] = row.analytic_mean;
    r["analytic_sigma"] = row.analytic_sigma;
    r["exact_quasi"] = row.exact_quasi;
    r["events"] = row.events;
    r["base"] = row.base;
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  out << doc.dump(2) << '\n';
}

void emit_json_file(const ScanResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file " + path);
  emit_json(result, out);
  out.flush();
  if (!out) throw IoError("failed writing output file " + path);
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Phase-space reconstruction by photon counting"};
  std::string config_path;
  app.add_option("--config", config_path, "JSON scan configuration")
      ->required();
  std::optional<std::int64_t> events;
  app.add_option("--events", events, "override events per point");
  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "override master_seed");
  std::optional<bool> compensate;
  app.add_option("--compensate", compensate,
                 "override compensation (true|false)");
  std::string out_csv;
  app.add_option("--out-csv", out_csv, "write rows as CSV");
  std::string out_json;
  app.add_option("--out-json", out_json, "write rows plus config as JSON");
  bool analytic_only = false;
  app.add_flag("--analytic-only", analytic_only,
               "skip Monte Carlo sampling (events = 0)");
  std::optional<int> threads;
  app.add_option("--threads", threads, "override worker thread count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }

  try {
    ScanConfig config = load_config(config_path);
    if (events) {
      if (*events < 0) throw ConfigError("events must be >= 0");
      config.events = *events;
    }
    if (seed) config.master_seed = *seed;
    if (compensate) config.compensate = *compensate;
    if (threads) {
      if (*threads < 1) throw ConfigError("threads must be >= 1");
      config.threads = *threads;
    }
    if (analytic_only) config.events = 0;

    const ScanResult result = run_scan(config);
    if (!out_csv.empty()) emit_csv_file(result, out_csv);
    if (!out_json.empty()) emit_json_file(result, out_json);
    if (out_csv.empty() && out_json.empty()) emit_csv(result, std::cout);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const TruncationError& e) {
    std::cerr << "truncation error: " << e.what() << '\n';
    return 3;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << '\n';
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace phasescan
