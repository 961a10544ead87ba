#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swstab/polytope_norm.hpp"
#include "swstab/system.hpp"

namespace swstab {

struct SynthesisConfig {
  int directions = 360;  // total grid directions on the sphere (antipodes included), even
  double tol = 1e-6;     // relative change at grid directions that counts as converged
  int max_iters = 500;
  double v_max = 1e6;  // any grid value above this is reported as Diverged
  bool mode_dependent = false;

  /// Throws ValidationError unless directions is even and >= 2n, tol > 0,
  /// v_max > 1 and max_iters >= 1.
  void validate(Eigen::Index n) const;
};

enum class SynthesisStatus { Converged, Diverged, MaxItersReached };

const char* to_string(SynthesisStatus status);
SynthesisStatus synthesis_status_from_string(const std::string& s);

/// Output of value iteration: the polyhedral value function V^ and the
/// constants that make it a checkable Lyapunov certificate.
struct Certificate {
  std::string system_hash;
  bool mode_dependent = false;
  BalancedPolytopeNorm norm;
  int iterations = 0;
  SynthesisStatus status = SynthesisStatus::MaxItersReached;
  std::optional<double> rho;  // worst one-step ratio of V^ in closed loop (Converged only)
  std::optional<double> c2;   // max of V^ on the unit sphere (Converged only)
  int directions = 0;
  double tol = 0.0;
  bool sampled = false;  // n >= 3: direction grid is a sample, not a sound certificate

  bool converged() const { return status == SynthesisStatus::Converged; }

  /// 1 - 1/c2. Throws InvariantError when c2 is absent.
  double gamma_bound() const;
};

struct BellmanResult {
  double value = 0.0;    // ||x||_2 + min_u max_i V(A_i x + B_i u)
  Eigen::VectorXd u_star;
};

struct BellmanDependentResult {
  double value = 0.0;  // ||x||_2 + max_i min_u V(A_i x + B_i u)
  std::vector<Eigen::VectorXd> u_star_per_mode;
  std::vector<double> mode_values;  // min_u V(A_i x + B_i u) per mode
};

/// Whether the minimizer is tie-broken over the optimal face (minimum
/// l1-norm input, one extra lexicographic stage) or left as the first
/// optimal vertex found.
enum class InputSelection { MinNorm, AnyOptimal };

/// One mode-independent Bellman step at x, solved as a single joint LP over
/// (u, t, lambda_i). The LP is solved at the canonical representative of x's
/// ray (unit length, first nonzero coordinate positive) and rescaled, so the
/// returned minimizer is exactly odd and positively homogeneous in x.
///
/// Throws ValidationError on dimension mismatch and NumericalError when the
/// inner minimization is reported unbounded.
BellmanResult bellman_independent(const BalancedPolytopeNorm& norm, const SwitchedSystem& system,
                                  const Eigen::VectorXd& x,
                                  InputSelection selection = InputSelection::MinNorm);

/// Mode-dependent Bellman step: one LP per mode, value uses the worst mode.
BellmanDependentResult bellman_dependent(const BalancedPolytopeNorm& norm, const SwitchedSystem& system,
                                         const Eigen::VectorXd& x,
                                         InputSelection selection = InputSelection::MinNorm);

/// min_u V(A_i x + B_i u) for a single mode, with its minimizer (no ||x||
/// term).
BellmanResult bellman_mode(const BalancedPolytopeNorm& norm, const SwitchedSystem& system, std::size_t mode,
                           const Eigen::VectorXd& x, InputSelection selection = InputSelection::MinNorm);

/// Canonical representatives of `count` directions on the unit sphere
/// (count/2 vectors; their antipodes are implied).
///   n = 1: {1}.
///   n = 2: angles 2 pi j / count for j < count/2.
///   n >= 3: coordinate axes followed by a fixed-seed Gaussian sample; a
///           larger count extends a smaller one.
std::vector<Eigen::VectorXd> direction_grid(Eigen::Index n, int count);

/// max over directions d of max_i V(A_i d + B_i u_i(d)) / V(d), with u the
/// min-norm Bellman minimizer (per mode when mode_dependent).
double contraction_factor(const BalancedPolytopeNorm& norm, const SwitchedSystem& system, bool mode_dependent,
                          std::span<const Eigen::VectorXd> directions);

/// Upper norm constant c2 = max_{|d|=1} V(d): exact from the facets for a
/// convex polygon and for n = 1, sampled over `directions` otherwise.
double norm_upper_constant(const BalancedPolytopeNorm& norm, std::span<const Eigen::VectorXd> directions);

/// Called after every value-iteration sweep with the new grid values.
using IterationObserver = std::function<void(int iteration, const std::vector<double>& grid_values)>;

/// Value iteration V_{k+1} = rebuild_norm({d / T V_k(d)}) from V_0 = the
/// polygon inscribed in the Euclidean ball at the grid directions.
/// On Converged, rho is evaluated on the 2x finer test grid and c2 via
/// norm_upper_constant.
Certificate value_iteration(const SwitchedSystem& system, const SynthesisConfig& config,
                            const IterationObserver& observer = {});

// Certificate file (JSON).
std::string certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(std::string_view text);
Certificate load_certificate_file(const std::string& path);

}  // namespace swstab
