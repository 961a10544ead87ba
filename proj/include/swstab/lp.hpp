#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace swstab {

/// Dense linear program
///
///   minimize    c . z
///   subject to  G z <= h,   E z = f
///
/// Variables are free unless flagged in `nonnegative` (an empty flag vector
/// means every variable is free). Either constraint block may have zero rows.
struct LinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  Eigen::MatrixXd E;
  Eigen::VectorXd f;
  std::vector<bool> nonnegative;

  Eigen::Index num_variables() const { return c.size(); }
};

enum class LpStatus { Optimal, Unbounded, Infeasible };

const char* to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd z;   // optimizer, set when Optimal
  double value = 0.0;  // c . z of the primary objective, set when Optimal
};

// Fixed solver tolerances.
inline constexpr double kLpFeasibilityTol = 1e-9;
inline constexpr double kLpOptimalityTol = 1e-9;

/// Two-phase revised simplex. Largest-coefficient pricing switches to Bland's
/// rule after a bounded number of pivots (or a run of degenerate pivots), so
/// the method always terminates. Output is a deterministic function of the
/// input bytes.
///
/// Throws ValidationError on inconsistent dimensions or non-finite data and
/// NumericalError when the basis becomes ill-conditioned (reciprocal condition
/// estimate below 1e-14) or the final residual check fails.
LpResult solve_lp(const LinearProgram& lp);

/// Lexicographic minimization: optimize `lp.c`, then each entry of
/// `tie_breakers` in turn over the optimal face of the previous objectives.
/// The returned `value` is the primary objective `lp.c . z`.
LpResult solve_lp_lexicographic(const LinearProgram& lp,
                                std::span<const Eigen::VectorXd> tie_breakers);

}  // namespace swstab
