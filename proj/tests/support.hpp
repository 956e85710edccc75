#pragma once

// Scenario and curve builders shared by the solver, runner and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ilac/radio.hpp"
#include "ilac/rng.hpp"
#include "ilac/solver.hpp"
#include "ilac/sysmodel.hpp"

namespace ilac::testing {

// Tasks with the given class counts, clients placed uniformly over a 100 m square.
inline sysmodel::Scenario make_scenario(const std::vector<std::size_t>& classes, std::size_t clients,
                                        std::uint64_t seed, double b_max_hz, double t_max_s = 0.5,
                                        unsigned bits_per_dim = 16) {
  sysmodel::Scenario s;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    taskdata::TaskSpec t;
    t.task_id = static_cast<int>(i);
    t.classes = classes[i];
    s.tasks.push_back(t);
  }
  sysmodel::Layout layout;
  layout.clients = clients;
  sysmodel::place_clients(s, layout, seed);
  s.b_max_hz = b_max_hz;
  s.t_max_s = t_max_s;
  s.bits_per_dim = bits_per_dim;
  return s;
}

// Clients with explicit linear gains (no geometry).
inline sysmodel::Scenario make_gain_scenario(const std::vector<std::size_t>& classes,
                                             const std::vector<double>& gains, double b_max_hz,
                                             double t_max_s = 0.5) {
  sysmodel::Scenario s;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    taskdata::TaskSpec t;
    t.task_id = static_cast<int>(i);
    t.classes = classes[i];
    s.tasks.push_back(t);
  }
  for (std::size_t j = 0; j < gains.size(); ++j) {
    s.clients.push_back({});
    s.channel.push_back(radio::ChannelState::from_gain(j, gains[j]));
  }
  s.b_max_hz = b_max_hz;
  s.t_max_s = t_max_s;
  return s;
}

inline const std::vector<double>& wide_grid() {
  static const std::vector<double> g{1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0};
  return g;
}

// Smooth decreasing curves: task i loses `slope_i` accuracy per doubling of the ratio.
inline solver::CurveSet synthetic_curves(std::size_t tasks, const std::vector<double>& grid,
                                         std::uint64_t seed = 0) {
  solver::CurveSet out;
  for (std::size_t i = 0; i < tasks; ++i) {
    CounterRng rng(derive_key(seed, "test-curve", i));
    const double top = 0.9 + 0.09 * rng.uniform();
    const double slope = 0.005 + 0.03 * rng.uniform();
    sysmodel::AccuracyCurve c;
    c.task_id = static_cast<int>(i);
    for (double r : grid) {
      c.ratios.push_back(r);
      c.accuracy.push_back(std::max(0.3, top - slope * std::log2(r)));
    }
    out.push_back(c);
  }
  return out;
}

inline solver::CurveSet flat_curves(std::size_t tasks, const std::vector<double>& grid, double acc) {
  solver::CurveSet out;
  for (std::size_t i = 0; i < tasks; ++i) {
    sysmodel::AccuracyCurve c;
    c.task_id = static_cast<int>(i);
    c.ratios = grid;
    c.accuracy.assign(grid.size(), acc);
    out.push_back(c);
  }
  return out;
}

}  // namespace ilac::testing
