#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>

#include "jumpact/common.hpp"
#include "jumpact/simulator.hpp"

namespace jumpact {

/// Plain-text simulation configuration: one `key = value` per line, `#`
/// comments. Unknown keys are rejected so typos fail loudly. Keys mirror the
/// SimulationConfig fields; `jumps.tail_prob` asks for the stable scale to be
/// calibrated to that per-interval jump tail probability instead of giving
/// theta directly, and `delta_seconds` is the sampling interval in seconds.
inline SimulationConfig parse_simulation_config(std::istream& in,
                                                SimulationConfig base = SimulationConfig{}) {
  SimulationConfig cfg = base;
  double tail_prob = -1.0;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw DataError("config: expected 'key = value' at line " + std::to_string(line_no));
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    const auto num = [&]() {
      try {
        std::size_t pos = 0;
        const double x = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return x;
      } catch (const std::exception&) {
        throw DataError("config: bad numeric value for '" + key + "' at line " +
                        std::to_string(line_no));
      }
    };

    if (key == "sv.eta") cfg.sv.eta = num();
    else if (key == "sv.chi") cfg.sv.chi = num();
    else if (key == "sv.xi") cfg.sv.xi = num();
    else if (key == "sv.rho_bar") cfg.sv.rho_bar = num();
    else if (key == "sv.v0") cfg.sv.v0 = num();
    else if (key == "sv.variance_jump_rate") cfg.sv.variance_jump_rate = num();
    else if (key == "sv.variance_jump_low") cfg.sv.variance_jump_low = num();
    else if (key == "sv.variance_jump_high") cfg.sv.variance_jump_high = num();
    else if (key == "jumps.kind") {
      if (value == "none") cfg.jumps.kind = JumpComponentSpec::Kind::none;
      else if (value == "stable") cfg.jumps.kind = JumpComponentSpec::Kind::stable;
      else if (value == "compound_poisson") {
        cfg.jumps.kind = JumpComponentSpec::Kind::compound_poisson;
      } else {
        throw DataError("config: jumps.kind must be none|stable|compound_poisson (line " +
                        std::to_string(line_no) + ")");
      }
    } else if (key == "jumps.beta") cfg.jumps.beta = num();
    else if (key == "jumps.theta") cfg.jumps.theta = num();
    else if (key == "jumps.tail_prob") tail_prob = num();
    else if (key == "jumps.lambda_per_day") cfg.jumps.lambda_per_day = num();
    else if (key == "jumps.size_sd") cfg.jumps.size_sd = num();
    else if (key == "jumps.size_min_abs") cfg.jumps.size_min_abs = num();
    else if (key == "noise.kind") {
      if (value == "none") cfg.noise.kind = NoiseSpec::Kind::none;
      else if (value == "additive") cfg.noise.kind = NoiseSpec::Kind::additive;
      else if (value == "rounding") cfg.noise.kind = NoiseSpec::Kind::rounding;
      else {
        throw DataError("config: noise.kind must be none|additive|rounding (line " +
                        std::to_string(line_no) + ")");
      }
    } else if (key == "noise.additive_sd") cfg.noise.additive_sd = num();
    else if (key == "noise.tick") cfg.noise.tick = num();
    else if (key == "noise.price_scale") cfg.noise.price_scale = num();
    else if (key == "delta_seconds") cfg.delta = seconds_to_years(num());
    else if (key == "horizon_days") cfg.horizon_days = static_cast<int>(num());
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(num());
    else {
      throw DataError("config: unknown key '" + key + "' at line " + std::to_string(line_no));
    }
  }
  if (tail_prob > 0.0) {
    cfg.jumps.theta = calibrate_theta(tail_prob, cfg.jumps.beta, cfg.delta, cfg.sv.eta);
  }
  cfg.validate();
  return cfg;
}

inline SimulationConfig parse_simulation_config_file(const std::string& path,
                                                     SimulationConfig base = SimulationConfig{}) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  return parse_simulation_config(in, base);
}

inline std::string serialize_simulation_config(const SimulationConfig& cfg) {
  std::ostringstream os;
  const auto kind = [&]() {
    switch (cfg.jumps.kind) {
      case JumpComponentSpec::Kind::none: return "none";
      case JumpComponentSpec::Kind::stable: return "stable";
      case JumpComponentSpec::Kind::compound_poisson: return "compound_poisson";
    }
    return "none";
  };
  const auto noise = [&]() {
    switch (cfg.noise.kind) {
      case NoiseSpec::Kind::none: return "none";
      case NoiseSpec::Kind::additive: return "additive";
      case NoiseSpec::Kind::rounding: return "rounding";
    }
    return "none";
  };
  os << "sv.eta = " << format_g17(cfg.sv.eta) << '\n'
     << "sv.chi = " << format_g17(cfg.sv.chi) << '\n'
     << "sv.xi = " << format_g17(cfg.sv.xi) << '\n'
     << "sv.rho_bar = " << format_g17(cfg.sv.rho_bar) << '\n'
     << "sv.v0 = " << format_g17(cfg.sv.v0) << '\n'
     << "sv.variance_jump_rate = " << format_g17(cfg.sv.variance_jump_rate) << '\n'
     << "sv.variance_jump_low = " << format_g17(cfg.sv.variance_jump_low) << '\n'
     << "sv.variance_jump_high = " << format_g17(cfg.sv.variance_jump_high) << '\n'
     << "jumps.kind = " << kind() << '\n'
     << "jumps.beta = " << format_g17(cfg.jumps.beta) << '\n'
     << "jumps.theta = " << format_g17(cfg.jumps.theta) << '\n'
     << "jumps.lambda_per_day = " << format_g17(cfg.jumps.lambda_per_day) << '\n'
     << "jumps.size_sd = " << format_g17(cfg.jumps.size_sd) << '\n'
     << "jumps.size_min_abs = " << format_g17(cfg.jumps.size_min_abs) << '\n'
     << "noise.kind = " << noise() << '\n'
     << "noise.additive_sd = " << format_g17(cfg.noise.additive_sd) << '\n'
     << "noise.tick = " << format_g17(cfg.noise.tick) << '\n'
     << "noise.price_scale = " << format_g17(cfg.noise.price_scale) << '\n'
     << "delta_seconds = " << format_g17(years_to_seconds(cfg.delta)) << '\n'
     << "horizon_days = " << cfg.horizon_days << '\n'
     << "seed = " << cfg.seed << '\n';
  return os.str();
}

}  // namespace jumpact
