#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swstab/system.hpp"

namespace swstab {

/// Closed-loop run of length K: K+1 states, K inputs and modes.
struct Trajectory {
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> inputs;
  std::vector<std::size_t> modes;
  std::optional<std::vector<double>> v_values;
  std::optional<std::vector<Eigen::VectorXd>> disturbances;

  std::size_t horizon() const { return modes.size(); }

  /// Length consistency; throws ValidationError otherwise.
  void check_lengths() const;
};

/// Largest relative defect of x(k+1) = A x(k) + B u(k) (+ w(k) when recorded).
double recursion_defect(const Trajectory& traj, const SwitchedSystem& system);

/// Header `k,mode,x0..x{n-1},u0..u{m-1},V`, one row per k = 0..K; mode and
/// inputs are empty on the final row, V is empty when no values were
/// recorded. Numbers use the shortest round-trip decimal form.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
std::string trajectory_csv(const Trajectory& traj);

/// Shortest decimal representation that round-trips, locale independent.
std::string format_double(double v);

}  // namespace swstab
