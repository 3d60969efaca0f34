// Run configuration: flat `key = value` text with dotted sections, hard
// errors on unknown keys.  Defaults give the d=1 benchmark setup.
#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sks/integrator.hpp"

namespace sks {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RunMode { simulate, picard, probe_holder, probe_equicontinuity, validate };

enum class InitKind { eigenmode, bump, file };

struct InitialData {
  InitKind kind = InitKind::bump;
  int mode = 1;            // eigenmode: 1-based flat index into the basis
  double amplitude = 1.0;
  double center = -1.0;    // bump: < 0 means L/2
  double width = -1.0;     // bump: < 0 means L/8
  std::string file;        // file: raw little-endian f64 spectral coefficients
};

struct RunConfig {
  DomainSpec domain{1, kPi, 128, 127};
  ModelParams model;       // m=3, chi=0.5, bessel resolvent
  IntegratorConfig integ;  // dt=1e-4, horizon=0.25
  InitialData init;
  int ensemble = 16;
  std::uint64_t master_seed = 1;
  std::string out_dir = ".";
  RunMode mode = RunMode::simulate;
  bool regime_warning = false;  // set when m < 3

  void validate() const {
    domain.validate();
    model.validate(domain.dim);
    integ.validate();
    if (ensemble < 1) throw ConfigError("run.ensemble: must be >= 1");
    if (init.kind == InitKind::eigenmode && (init.mode < 1 || init.mode > domain.trunc_k * (domain.dim == 2 ? domain.trunc_k : 1)))
      throw ConfigError("init.mode: eigenmode index out of range");
    if (init.kind == InitKind::file && init.file.empty())
      throw ConfigError("init.file: path required");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

struct KvParser {
  std::map<std::string, std::string> kv;

  double num(const std::string& key, const std::string& raw) const {
    try {
      size_t pos = 0;
      const double v = std::stod(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (...) {
      throw ConfigError(key + ": not a number: '" + raw + "'");
    }
  }

  long integer(const std::string& key, const std::string& raw) const {
    try {
      size_t pos = 0;
      const long v = std::stol(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (...) {
      throw ConfigError(key + ": not an integer: '" + raw + "'");
    }
  }

  bool flag(const std::string& key, const std::string& raw) const {
    if (raw == "on" || raw == "true" || raw == "1") return true;
    if (raw == "off" || raw == "false" || raw == "0") return false;
    throw ConfigError(key + ": expected on/off, got '" + raw + "'");
  }
};

}  // namespace detail

inline RunConfig parse_config(std::istream& in, const std::string& origin) {
  detail::KvParser p;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
    if (p.kv.count(key)) throw ConfigError(key + ": duplicate key");
    p.kv[key] = val;
  }

  RunConfig cfg;
  auto take = [&](const std::string& key) {
    auto it = p.kv.find(key);
    if (it == p.kv.end()) return std::string();
    std::string v = it->second;
    p.kv.erase(it);
    return v;
  };

  if (auto v = take("domain.dim"); !v.empty()) cfg.domain.dim = static_cast<int>(p.integer("domain.dim", v));
  if (auto v = take("domain.length"); !v.empty()) cfg.domain.length = p.num("domain.length", v);
  if (auto v = take("domain.grid"); !v.empty()) cfg.domain.grid_n = static_cast<int>(p.integer("domain.grid", v));
  if (auto v = take("domain.modes"); !v.empty()) cfg.domain.trunc_k = static_cast<int>(p.integer("domain.modes", v));
  else cfg.domain.trunc_k = cfg.domain.grid_n - 1;

  if (auto v = take("model.m"); !v.empty()) cfg.model.m = p.num("model.m", v);
  if (auto v = take("model.chi"); !v.empty()) cfg.model.chi = p.num("model.chi", v);
  if (auto v = take("model.porous"); !v.empty()) cfg.model.porous_enabled = p.flag("model.porous", v);
  if (auto v = take("model.kernel"); !v.empty()) {
    if (v == "newtonian") cfg.model.kernel.kind = KernelKind::newtonian;
    else if (v == "bessel") cfg.model.kernel.kind = KernelKind::bessel;
    else throw ConfigError("model.kernel: expected newtonian|bessel, got '" + v + "'");
  }
  if (auto v = take("model.kernel_mode"); !v.empty()) {
    if (v == "resolvent") cfg.model.kernel.mode = KernelMode::resolvent;
    else if (v == "direct") cfg.model.kernel.mode = KernelMode::direct_quadrature;
    else throw ConfigError("model.kernel_mode: expected resolvent|direct, got '" + v + "'");
  }

  if (auto v = take("noise.sigma"); !v.empty()) cfg.model.noise.sigma = p.num("noise.sigma", v);
  if (auto v = take("noise.decay"); !v.empty()) cfg.model.noise.decay_a = p.num("noise.decay", v);
  if (auto v = take("noise.modes"); !v.empty()) cfg.model.noise.modes = static_cast<int>(p.integer("noise.modes", v));

  if (auto v = take("integ.dt"); !v.empty()) cfg.integ.dt = p.num("integ.dt", v);
  if (auto v = take("integ.horizon"); !v.empty()) cfg.integ.horizon = p.num("integ.horizon", v);
  if (auto v = take("integ.save_every"); !v.empty()) cfg.integ.save_every = static_cast<int>(p.integer("integ.save_every", v));
  if (auto v = take("integ.taming"); !v.empty()) cfg.integ.taming = p.flag("integ.taming", v);
  if (auto v = take("integ.cfl_safety"); !v.empty()) cfg.integ.cfl_safety = p.num("integ.cfl_safety", v);

  if (auto v = take("init.kind"); !v.empty()) {
    if (v == "eigenmode") cfg.init.kind = InitKind::eigenmode;
    else if (v == "bump") cfg.init.kind = InitKind::bump;
    else if (v == "file") cfg.init.kind = InitKind::file;
    else throw ConfigError("init.kind: expected eigenmode|bump|file, got '" + v + "'");
  }
  if (auto v = take("init.mode"); !v.empty()) cfg.init.mode = static_cast<int>(p.integer("init.mode", v));
  if (auto v = take("init.amplitude"); !v.empty()) cfg.init.amplitude = p.num("init.amplitude", v);
  if (auto v = take("init.center"); !v.empty()) cfg.init.center = p.num("init.center", v);
  if (auto v = take("init.width"); !v.empty()) cfg.init.width = p.num("init.width", v);
  if (auto v = take("init.file"); !v.empty()) cfg.init.file = v;

  if (auto v = take("run.ensemble"); !v.empty()) cfg.ensemble = static_cast<int>(p.integer("run.ensemble", v));
  if (auto v = take("run.seed"); !v.empty()) cfg.master_seed = static_cast<std::uint64_t>(p.integer("run.seed", v));
  if (auto v = take("run.out"); !v.empty()) cfg.out_dir = v;

  if (!p.kv.empty()) throw ConfigError("unknown key: '" + p.kv.begin()->first + "'");

  cfg.regime_warning = cfg.model.below_theorem_regime();
  try {
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in, path);
}

// Materializes the configured initial density (bump samples are clipped to
// be nonnegative before projection).
inline Field initial_field(const Domain& dom, const InitialData& init) {
  switch (init.kind) {
    case InitKind::eigenmode:
      return dom.eigenmode(init.mode - 1, init.amplitude);
    case InitKind::bump: {
      const double L = dom.length();
      const double c = init.center < 0.0 ? 0.5 * L : init.center;
      const double w = init.width < 0.0 ? L / 8.0 : init.width;
      const double a = init.amplitude;
      if (dom.dim() == 1)
        return dom.from_function([=](double x) {
          return std::max(0.0, a * std::exp(-0.5 * (x - c) * (x - c) / (w * w)));
        });
      return dom.from_function([=](double x, double y) {
        const double r2 = (x - c) * (x - c) + (y - c) * (y - c);
        return std::max(0.0, a * std::exp(-0.5 * r2 / (w * w)));
      });
    }
    case InitKind::file: {
      std::ifstream in(init.file, std::ios::binary);
      if (!in) throw ConfigError("init.file: cannot open " + init.file);
      std::vector<double> coeffs(dom.spec_size());
      in.read(reinterpret_cast<char*>(coeffs.data()), static_cast<std::streamsize>(coeffs.size() * 8));
      if (!in || in.gcount() != static_cast<std::streamsize>(coeffs.size() * 8))
        throw ConfigError("init.file: expected " + std::to_string(coeffs.size()) + " coefficients");
      return dom.from_coeffs(std::move(coeffs));
    }
  }
  throw ConfigError("init.kind: invalid");
}

}  // namespace sks
