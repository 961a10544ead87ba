#include "swstab/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "swstab/errors.hpp"

namespace swstab {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void Trajectory::check_lengths() const {
  const std::size_t K = modes.size();
  if (states.size() != K + 1 || inputs.size() != K) {
    throw ValidationError("trajectory: inconsistent lengths");
  }
  if (v_values && v_values->size() != K + 1) throw ValidationError("trajectory: v_values length");
  if (disturbances && disturbances->size() != K) throw ValidationError("trajectory: disturbances length");
}

double recursion_defect(const Trajectory& traj, const SwitchedSystem& system) {
  traj.check_lengths();
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.horizon(); ++k) {
    const std::size_t i = traj.modes[k];
    Eigen::VectorXd expected = system.step(i, traj.states[k], traj.inputs[k]);
    // Scale by the size of the summands so cancellation (deadbeat) is not
    // measured against a zero denominator.
    double scale = (system.A(i) * traj.states[k]).norm();
    if (system.m() > 0) scale += (system.B(i) * traj.inputs[k]).norm();
    if (traj.disturbances) {
      expected += (*traj.disturbances)[k];
      scale += (*traj.disturbances)[k].norm();
    }
    scale = std::max(scale, 1e-300);
    worst = std::max(worst, (traj.states[k + 1] - expected).norm() / scale);
  }
  return worst;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  traj.check_lengths();
  const Eigen::Index n = traj.states.front().size();
  const Eigen::Index m = traj.inputs.empty() ? 0 : traj.inputs.front().size();
  out << "k,mode";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x" << i;
  for (Eigen::Index i = 0; i < m; ++i) out << ",u" << i;
  out << ",V\n";
  const std::size_t K = traj.horizon();
  for (std::size_t k = 0; k <= K; ++k) {
    out << k << ',';
    if (k < K) out << traj.modes[k];
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(traj.states[k][i]);
    for (Eigen::Index i = 0; i < m; ++i) {
      out << ',';
      if (k < K) out << format_double(traj.inputs[k][i]);
    }
    out << ',';
    if (traj.v_values) out << format_double((*traj.v_values)[k]);
    out << '\n';
  }
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  return os.str();
}

}  // namespace swstab
