#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qconn/fields.hpp"
#include "qconn/group.hpp"
#include "qconn/lattice.hpp"

namespace qconn {

struct MetricSpec {
  enum class Kind { Flat, Diagonal, Seeded };
  Kind kind = Kind::Flat;
  std::array<double, 3> diagonal{1.0, 1.0, 1.0};
  std::uint64_t seed = 7;
  int bandlimit = 1;
  double amplitude = 0.3;
};

/// Run parameters shared by every CLI command; validated against the
/// preconditions of the modules it drives.
struct RunConfig {
  LatticeShape manifold{3, {4, 4, 4}, {1.0, 1.0, 1.0}};
  MetricSpec metric;
  GroupSpec group;
  std::uint64_t seed = 20260801;
  int bandlimit = 1;
  double connection_amplitude = 1.0;
  double gauge_amplitude = 0.75;
  std::vector<double> hbars{0.25, 0.125, 0.0625};
  int transport_steps = 16;
  int norm_iterations = 400;
  bool corrupt_kernel = false;  // fault-injection hook for the check suite

  void validate() const {
    manifold.validate();
    if (group.dim < 1 || group.dim > 8)
      throw std::invalid_argument("config: group N must lie in [1, 8]");
    if (bandlimit < 0) throw std::invalid_argument("config: bandlimit must be >= 0");
    for (int j = 0; j < manifold.dim; ++j)
      if (2 * bandlimit >= manifold.n[j])
        throw std::invalid_argument("config: bandlimit must be < n_j / 2");
    if (metric.kind == MetricSpec::Kind::Seeded)
      for (int j = 0; j < manifold.dim; ++j)
        if (2 * metric.bandlimit >= manifold.n[j])
          throw std::invalid_argument("config: metric bandlimit must be < n_j / 2");
    if (hbars.empty()) throw std::invalid_argument("config: hbar list must not be empty");
    for (double h : hbars)
      if (!(h > 0.0 && h <= 1.0))
        throw std::invalid_argument("config: hbar values must lie in (0, 1]");
    if (transport_steps < 1)
      throw std::invalid_argument("config: transport steps must be >= 1");
    if (norm_iterations < 1)
      throw std::invalid_argument("config: norm iterations must be >= 1");
  }
};

inline LatticeManifold build_manifold(const RunConfig& cfg) {
  switch (cfg.metric.kind) {
    case MetricSpec::Kind::Flat:
      return LatticeManifold::flat(cfg.manifold);
    case MetricSpec::Kind::Diagonal:
      return LatticeManifold::diagonal(
          cfg.manifold,
          Vector3d(cfg.metric.diagonal[0], cfg.metric.diagonal[1], cfg.metric.diagonal[2]));
    case MetricSpec::Kind::Seeded:
      return random_spd_manifold(cfg.manifold, cfg.metric.seed, cfg.metric.bandlimit,
                                 cfg.metric.amplitude);
  }
  throw std::logic_error("config: unknown metric kind");
}

inline RunConfig parse_config(const nlohmann::json& j) {
  RunConfig cfg;
  if (j.contains("manifold")) {
    const auto& m = j.at("manifold");
    cfg.manifold.dim = m.value("d", cfg.manifold.dim);
    cfg.manifold.n = {1, 1, 1};
    cfg.manifold.length = {1.0, 1.0, 1.0};
    if (m.contains("n")) {
      auto n = m.at("n").get<std::vector<int>>();
      if (static_cast<int>(n.size()) != cfg.manifold.dim)
        throw std::invalid_argument("config: manifold.n must list d entries");
      for (int i = 0; i < cfg.manifold.dim; ++i) cfg.manifold.n[i] = n[i];
    }
    if (m.contains("L")) {
      auto l = m.at("L").get<std::vector<double>>();
      if (static_cast<int>(l.size()) != cfg.manifold.dim)
        throw std::invalid_argument("config: manifold.L must list d entries");
      for (int i = 0; i < cfg.manifold.dim; ++i) cfg.manifold.length[i] = l[i];
    }
    if (m.contains("metric")) {
      const auto& q = m.at("metric");
      std::string kind = q.value("kind", "flat");
      if (kind == "flat") {
        cfg.metric.kind = MetricSpec::Kind::Flat;
      } else if (kind == "diagonal") {
        cfg.metric.kind = MetricSpec::Kind::Diagonal;
        auto d = q.at("values").get<std::vector<double>>();
        if (static_cast<int>(d.size()) != cfg.manifold.dim)
          throw std::invalid_argument("config: metric.values must list d entries");
        for (int i = 0; i < cfg.manifold.dim; ++i) cfg.metric.diagonal[i] = d[i];
      } else if (kind == "seeded") {
        cfg.metric.kind = MetricSpec::Kind::Seeded;
        cfg.metric.seed = q.value("seed", cfg.metric.seed);
        cfg.metric.bandlimit = q.value("bandlimit", cfg.metric.bandlimit);
        cfg.metric.amplitude = q.value("amplitude", cfg.metric.amplitude);
      } else {
        throw std::invalid_argument("config: metric.kind must be flat, diagonal or seeded");
      }
    }
  }
  if (j.contains("group")) {
    const auto& g = j.at("group");
    std::string kind = g.value("kind", "su");
    if (kind == "su")
      cfg.group.kind = GroupKind::SU;
    else if (kind == "u")
      cfg.group.kind = GroupKind::U;
    else
      throw std::invalid_argument("config: group.kind must be su or u");
    cfg.group.dim = g.value("N", cfg.group.dim);
  }
  cfg.seed = j.value("seed", cfg.seed);
  cfg.bandlimit = j.value("bandlimit", cfg.bandlimit);
  cfg.connection_amplitude = j.value("connection_amplitude", cfg.connection_amplitude);
  cfg.gauge_amplitude = j.value("gauge_amplitude", cfg.gauge_amplitude);
  if (j.contains("hbars")) cfg.hbars = j.at("hbars").get<std::vector<double>>();
  cfg.transport_steps = j.value("transport_steps", cfg.transport_steps);
  cfg.norm_iterations = j.value("norm_iterations", cfg.norm_iterations);
  if (j.contains("fault_injection"))
    cfg.corrupt_kernel = j.at("fault_injection").value("corrupt_kernel", false);
  cfg.validate();
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace qconn
