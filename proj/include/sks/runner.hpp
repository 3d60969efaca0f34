// Ensemble orchestration and reporting: dispatches paths to the worker
// pool, writes the SKS1 dumps and the CSV reports.  All numeric output goes
// through one fixed "%.17g" formatter and all aggregation runs in path-index
// order, so outputs are byte-identical for any seed-fixed rerun and any
// SKS_THREADS value.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "sks/config.hpp"
#include "sks/diagnostics.hpp"
#include "sks/reference.hpp"

namespace sks {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBlowup = 3;
inline constexpr int kExitIo = 4;

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CsvWriter {
  explicit CsvWriter(const std::string& path) : out(path, std::ios::binary) {
    if (!out) throw std::runtime_error("cannot open for write: " + path);
  }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
    if (!out) throw std::runtime_error("csv write failed");
  }
  std::ofstream out;
};

struct Welford {
  // Plain two-pass mean/se accumulated in index order for determinism.
  std::vector<double> vals;
  void add(double v) { vals.push_back(v); }
  double mean() const {
    double s = 0.0;
    for (double v : vals) s += v;
    return vals.empty() ? 0.0 : s / vals.size();
  }
  double std_error() const {
    if (vals.size() < 2) return 0.0;
    const double m = mean();
    double var = 0.0;
    for (double v : vals) var += (v - m) * (v - m);
    var /= (vals.size() - 1.0);
    return std::sqrt(var / vals.size());
  }
};

}  // namespace detail

inline int run_simulate(const RunConfig& cfg, const Domain& dom, const Field& rho0,
                        const std::filesystem::path& out) {
  std::vector<PathSample> paths(cfg.ensemble);
  parallel_for(cfg.ensemble, [&](int i) {
    const std::uint64_t seed = GaussianStream::derive(cfg.master_seed, static_cast<std::uint64_t>(i));
    paths[i] = integrate_path(dom, rho0, cfg.model, cfg.integ, seed);
  });

  int blown = 0;
  for (int i = 0; i < cfg.ensemble; ++i) {
    write_path_dump(paths[i], (out / ("path_" + std::to_string(i) + ".sks")).string());
    blown += paths[i].blown ? 1 : 0;
  }

  detail::CsvWriter energy((out / "energy.csv").string());
  energy.row({"path_id", "sup_h1", "int_lm1", "sup_lm1", "int_gradm", "r1_composite",
              "r2_composite", "blown", "t_blow", "min_value", "mass_drift"});
  std::vector<detail::Welford> agg(8);
  for (int i = 0; i < cfg.ensemble; ++i) {
    const EnergyReport er = energy_report(dom, paths[i], cfg.model.m);
    energy.row({std::to_string(i), detail::fmt(er.sup_h1_sq), detail::fmt(er.int_lm1),
                detail::fmt(er.sup_lm1), detail::fmt(er.int_gradm), detail::fmt(er.r1_composite),
                detail::fmt(er.r2_composite), paths[i].blown ? "1" : "0",
                paths[i].blown ? detail::fmt(paths[i].blowup_time) : "",
                detail::fmt(er.min_value), detail::fmt(er.mass_drift)});
    if (!paths[i].blown) {
      const double vals[8] = {er.sup_h1_sq, er.int_lm1,    er.sup_lm1,  er.int_gradm,
                              er.r1_composite, er.r2_composite, er.min_value, er.mass_drift};
      for (int c = 0; c < 8; ++c) agg[c].add(vals[c]);
    }
  }

  detail::CsvWriter report((out / "report.csv").string());
  report.row({"quantity", "mean", "std_error"});
  const char* names[8] = {"sup_h1", "int_lm1", "sup_lm1", "int_gradm",
                          "r1_composite", "r2_composite", "min_value", "mass_drift"};
  for (int c = 0; c < 8; ++c)
    report.row({names[c], detail::fmt(agg[c].mean()), detail::fmt(agg[c].std_error())});
  report.row({"paths", std::to_string(cfg.ensemble), ""});
  report.row({"blown_paths", std::to_string(blown), ""});

  if (blown == cfg.ensemble) {
    std::cerr << "sks: every path blew up\n";
    return kExitBlowup;
  }
  return kExitOk;
}

inline int run_picard(const RunConfig& cfg, const Domain& dom, const Field& rho0,
                      const std::filesystem::path& out) {
  const PicardReport rep =
      picard_iterate(dom, rho0, cfg.model, cfg.integ, cfg.ensemble, 12, 1e-6, cfg.master_seed);
  detail::CsvWriter csv((out / "picard.csv").string());
  csv.row({"j", "d_j"});
  for (size_t j = 0; j < rep.distances.size(); ++j)
    csv.row({std::to_string(j + 1), detail::fmt(rep.distances[j])});
  csv.row({"contraction_ratio", detail::fmt(rep.contraction_ratio)});
  csv.row({"converged", rep.converged ? "1" : "0"});
  if (rep.failed) {
    std::cerr << "sks: picard iteration lost every ensemble member\n";
    return kExitBlowup;
  }
  return kExitOk;
}

inline int run_probe_holder(const RunConfig& cfg, const Domain& dom, const Field& rho0,
                            const std::filesystem::path& out) {
  const std::vector<double> eps = {0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
  const HolderReport rep =
      holder_probe(dom, rho0, cfg.model, cfg.integ, eps, cfg.ensemble, cfg.master_seed);
  detail::CsvWriter csv((out / "probe.csv").string());
  csv.row({"x", "y", "delta_hat", "r_squared"});
  if (rep.degenerate) {
    csv.row({"degenerate", "1", "", ""});
    return kExitOk;
  }
  for (size_t i = 0; i < rep.xs.size(); ++i)
    csv.row({detail::fmt(rep.xs[i]), detail::fmt(rep.ys[i]), detail::fmt(rep.delta_hat),
             detail::fmt(rep.fit_quality)});
  return kExitOk;
}

inline int run_probe_equicontinuity(const RunConfig& cfg, const Domain& dom, const Field& rho0,
                                    const std::filesystem::path& out) {
  IntegratorConfig ic = cfg.integ;
  if (ic.effective_save_every() > std::max(1, ic.steps() / 16))
    ic.save_every = std::max(1, ic.steps() / 16);  // probe needs a dense save grid
  const std::vector<PathSample> xi(cfg.ensemble, constant_trajectory(dom, rho0, ic));
  const EquicontinuityReport rep =
      equicontinuity_probe(dom, xi, rho0, cfg.model, ic, cfg.master_seed);
  detail::CsvWriter csv((out / "probe.csv").string());
  csv.row({"c_hat", "worst_t1", "worst_t2"});
  csv.row({detail::fmt(rep.c_hat), detail::fmt(rep.worst_pair.first),
           detail::fmt(rep.worst_pair.second)});
  return kExitOk;
}

inline int run_validate(const std::filesystem::path& out) {
  const std::vector<ValidationResult> results = run_validation_suite();
  detail::CsvWriter csv((out / "validate.csv").string());
  csv.row({"check", "passed", "measured", "detail"});
  bool all = true;
  for (const auto& r : results) {
    csv.row({r.name, r.passed ? "1" : "0", detail::fmt(r.measured), r.detail});
    all = all && r.passed;
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
  }
  return all ? kExitOk : 1;
}

inline int run(const RunConfig& cfg) {
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "sks: config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (cfg.regime_warning)
    std::cerr << "sks: warning: m = " << cfg.model.m
              << " is below the m >= 3 regime of the existence result\n";
  try {
    std::filesystem::path out(cfg.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) {
      std::cerr << "sks: cannot create output directory " << out << "\n";
      return kExitIo;
    }
    const Domain dom(cfg.domain);
    const Field rho0 = initial_field(dom, cfg.init);
    switch (cfg.mode) {
      case RunMode::simulate:
        return run_simulate(cfg, dom, rho0, out);
      case RunMode::picard:
        return run_picard(cfg, dom, rho0, out);
      case RunMode::probe_holder:
        return run_probe_holder(cfg, dom, rho0, out);
      case RunMode::probe_equicontinuity:
        return run_probe_equicontinuity(cfg, dom, rho0, out);
      case RunMode::validate:
        return run_validate(out);
    }
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "sks: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "sks: i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    const std::string what = e.what();
    if (what.find("write") != std::string::npos || what.find("open") != std::string::npos) {
      std::cerr << "sks: i/o error: " << what << "\n";
      return kExitIo;
    }
    std::cerr << "sks: error: " << what << "\n";
    return 1;
  }
}

}  // namespace sks
