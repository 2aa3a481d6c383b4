#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hart/errors.hpp"
#include "hart/sim.hpp"

namespace hart_cli {

/// Parses the flat key=value experiment description:
///
///   [model]
///   pi = 0.1
///   effect = point            # point | two-point | gaussian-mixture | zero
///   mu = 2.0                  # point mass location
///   scale = uniform           # uniform | two-values | fixed
///   sigma-lo = 0
///   sigma-hi = 4
///   noise = gaussian          # gaussian | student-t5
///   null-scale = 1.0
///
///   [run]
///   m = 5000
///   alpha = 0.1
///   reps = 20
///   seed = 1
///   procedures = hart,bh,az
///   dependence = independent  # independent | banded | ar1
///   replicates = 1
///   sigma-known = true
///   null = theoretical        # theoretical | empirical
///   coverage = 0.99
///   lambda = 0.5
///   jackknife = on
///   sigma-cap =               # optional positive cap
///
/// Unknown keys or sections raise hart::config_error naming the offender.
class SimConfigParser {
 public:
  hart::ScenarioConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw hart::config_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
  }

  hart::ScenarioConfig parse_text(const std::string& text, const std::string& name) {
    collect(text, name);
    hart::ScenarioConfig cfg;
    cfg.model = build_model();
    apply_run(cfg);
    return cfg;
  }

 private:
  struct Entry {
    std::string value;
    std::size_t line;
    bool used = false;
  };
  std::map<std::string, Entry> entries_; // key "section.key"
  std::string source_;

  static std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw hart::config_error(source_ + ": " + msg);
  }

  void collect(const std::string& text, const std::string& name) {
    source_ = name;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          fail("line " + std::to_string(lineno) + ": malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        if (section != "model" && section != "run")
          fail("unknown section [" + section + "]");
        continue;
      }
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        fail("line " + std::to_string(lineno) + ": expected key = value");
      if (section.empty())
        fail("line " + std::to_string(lineno) + ": key outside a section");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        fail("line " + std::to_string(lineno) + ": empty key");
      const std::string full = section + "." + key;
      if (entries_.count(full))
        fail("duplicate key '" + key + "' in [" + section + "]");
      entries_[full] = Entry{value, lineno, false};
    }
  }

  std::optional<std::string> take(const std::string& full) {
    auto it = entries_.find(full);
    if (it == entries_.end()) return std::nullopt;
    it->second.used = true;
    if (it->second.value.empty()) return std::nullopt;
    return it->second.value;
  }

  double take_real(const std::string& full, double fallback) {
    auto v = take(full);
    if (!v) return fallback;
    try {
      std::size_t pos = 0;
      const double r = std::stod(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument("trailing");
      return r;
    } catch (...) {
      fail("key '" + full + "': cannot parse real value '" + *v + "'");
    }
  }

  std::size_t take_count(const std::string& full, std::size_t fallback) {
    auto v = take(full);
    if (!v) return fallback;
    try {
      std::size_t pos = 0;
      const long long r = std::stoll(*v, &pos);
      if (pos != v->size() || r < 0) throw std::invalid_argument("bad");
      return static_cast<std::size_t>(r);
    } catch (...) {
      fail("key '" + full + "': cannot parse count '" + *v + "'");
    }
  }

  bool take_bool(const std::string& full, bool fallback) {
    auto v = take(full);
    if (!v) return fallback;
    if (*v == "true" || *v == "on" || *v == "1") return true;
    if (*v == "false" || *v == "off" || *v == "0") return false;
    fail("key '" + full + "': expected a boolean, got '" + *v + "'");
  }

  hart::MixtureModel build_model() {
    hart::MixtureModel model;
    model.pi = take_real("model.pi", model.pi);

    const std::string effect = take("model.effect").value_or("point");
    if (effect == "point") {
      model.effect = hart::PointMass{take_real("model.mu", 2.0)};
    } else if (effect == "two-point") {
      hart::TwoPointMass tp;
      tp.mu1 = take_real("model.mu1", 2.0);
      tp.mu2 = take_real("model.mu2", -2.0);
      tp.w1 = take_real("model.w1", 0.5);
      model.effect = tp;
    } else if (effect == "gaussian-mixture") {
      model.effect = parse_mixture(take("model.components"));
    } else if (effect == "zero") {
      model.effect = hart::ZeroEffect{};
    } else {
      fail("key 'model.effect': unknown effect law '" + effect + "'");
    }

    const std::string scale = take("model.scale").value_or("uniform");
    if (scale == "uniform") {
      hart::UniformScale u;
      u.lo = take_real("model.sigma-lo", 0.0);
      u.hi = take_real("model.sigma-hi", 4.0);
      model.scale = u;
    } else if (scale == "two-values") {
      hart::TwoValuesScale tv;
      tv.a = take_real("model.sigma-a", 1.0);
      tv.b = take_real("model.sigma-b", 3.0);
      model.scale = tv;
    } else if (scale == "fixed") {
      model.scale = hart::FixedScale{take_real("model.sigma-value", 1.0)};
    } else {
      fail("key 'model.scale': unknown scale law '" + scale + "'");
    }

    const std::string noise = take("model.noise").value_or("gaussian");
    if (noise == "gaussian") {
      model.noise = hart::NoiseKind::gaussian;
    } else if (noise == "student-t5") {
      model.noise = hart::NoiseKind::student_t5;
    } else {
      fail("key 'model.noise': unknown noise kind '" + noise + "'");
    }

    model.null_scale = take_real("model.null-scale", 1.0);
    return model;
  }

  hart::GaussianMixture parse_mixture(const std::optional<std::string>& spec) {
    if (!spec) fail("effect 'gaussian-mixture' requires model.components");
    hart::GaussianMixture gm;
    std::istringstream in(*spec);
    std::string part;
    while (std::getline(in, part, ';')) {
      part = trim(part);
      if (part.empty()) continue;
      std::istringstream ps(part);
      std::string w, mean, sd;
      if (!std::getline(ps, w, ':') || !std::getline(ps, mean, ':') ||
          !std::getline(ps, sd, ':'))
        fail("key 'model.components': expected weight:mean:sd entries");
      try {
        gm.components.push_back(
            {std::stod(trim(w)), std::stod(trim(mean)), std::stod(trim(sd))});
      } catch (...) {
        fail("key 'model.components': cannot parse entry '" + part + "'");
      }
    }
    if (gm.components.empty())
      fail("key 'model.components': no components given");
    return gm;
  }

  void apply_run(hart::ScenarioConfig& cfg) {
    cfg.m = take_count("run.m", cfg.m);
    cfg.alpha = take_real("run.alpha", cfg.alpha);
    cfg.reps = take_count("run.reps", cfg.reps);
    cfg.seed = take_count("run.seed", cfg.seed);

    if (auto procs = take("run.procedures")) {
      cfg.procedures.clear();
      std::istringstream in(*procs);
      std::string name;
      while (std::getline(in, name, ',')) {
        name = trim(name);
        if (name == "hart") cfg.procedures.push_back(hart::Procedure::HART);
        else if (name == "bh") cfg.procedures.push_back(hart::Procedure::BH);
        else if (name == "az") cfg.procedures.push_back(hart::Procedure::AZ);
        else if (name == "or-full") cfg.procedures.push_back(hart::Procedure::OR_FULL);
        else if (name == "or-z") cfg.procedures.push_back(hart::Procedure::OR_Z);
        else if (name == "or-p") cfg.procedures.push_back(hart::Procedure::OR_P);
        else fail("key 'run.procedures': unknown procedure '" + name + "'");
      }
    }

    const std::string dep = take("run.dependence").value_or("independent");
    if (dep == "independent") cfg.dependence = hart::Dependence::independent;
    else if (dep == "banded") cfg.dependence = hart::Dependence::banded_block;
    else if (dep == "ar1") cfg.dependence = hart::Dependence::ar1_block;
    else fail("key 'run.dependence': unknown kind '" + dep + "'");

    cfg.replicates_per_unit = take_count("run.replicates", cfg.replicates_per_unit);
    cfg.sigma_known = take_bool("run.sigma-known", cfg.sigma_known);

    const std::string null_mode = take("run.null").value_or("theoretical");
    if (null_mode == "theoretical") cfg.null_mode = hart::NullMode::theoretical;
    else if (null_mode == "empirical") cfg.null_mode = hart::NullMode::empirical;
    else fail("key 'run.null': unknown mode '" + null_mode + "'");

    cfg.coverage = take_real("run.coverage", cfg.coverage);
    cfg.lambda = take_real("run.lambda", cfg.lambda);
    cfg.jackknife = take_bool("run.jackknife", cfg.jackknife);
    const double cap = take_real("run.sigma-cap", -1.0);
    if (cap > 0.0) cfg.sigma_filter = cap;

    for (const auto& [key, entry] : entries_) {
      if (!entry.used)
        fail("unknown key '" + key + "' (line " + std::to_string(entry.line) + ")");
    }
  }
};

} // namespace hart_cli
