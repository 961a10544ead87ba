#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "swstab/bellman.hpp"
#include "swstab/switching_signal.hpp"
#include "swstab/system.hpp"

namespace swstab {

/// Phi(x): the min-norm minimizer of max_i V^(A_i x + B_i u). Requires a
/// converged mode-independent certificate.
Eigen::VectorXd extract_feedback(const Certificate& cert, const SwitchedSystem& system, const Eigen::VectorXd& x);

/// Phi_d(i, x): the min-norm minimizer of V^(A_i x + B_i u). Requires a
/// converged mode-dependent certificate.
Eigen::VectorXd extract_feedback_dependent(const Certificate& cert, const SwitchedSystem& system, std::size_t mode,
                                           const Eigen::VectorXd& x);

/// Piecewise-linear planar feedback interpolating Phi between adjacent
/// vertices of the certificate ball. On the cone spanned by q_j and q_{j+1}
/// (consecutive vertices of the full polygon), x = a q_j + b q_{j+1} with
/// a, b >= 0 and the input is a u_j + b u_{j+1}; u at -p_j is -u_j.
/// For mode-dependent certificates there is one gain table per mode.
class SectorLinearController2D {
 public:
  SectorLinearController2D(std::vector<Eigen::Vector2d> polygon, std::vector<std::vector<Eigen::VectorXd>> gains,
                           bool mode_dependent);

  bool mode_dependent() const { return mode_dependent_; }

  /// Full polygon q_0..q_{2k-1} in counter-clockwise order.
  const std::vector<Eigen::Vector2d>& polygon() const { return polygon_; }

  /// Gain at polygon vertex j for `mode` (mode ignored when independent).
  const Eigen::VectorXd& gain(std::size_t mode, std::size_t j) const;

  /// Index j of the sector [q_j, q_{j+1}] containing x and its conic
  /// coordinates (a, b). Throws InvariantError if no decomposition with
  /// a, b >= 0 exists; x = 0 is not a valid query.
  std::size_t locate(const Eigen::Vector2d& x, double& a, double& b) const;

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
  Eigen::VectorXd operator()(std::size_t mode, const Eigen::VectorXd& x) const;

 private:
  std::vector<Eigen::Vector2d> polygon_;
  std::vector<double> angles_;
  std::vector<std::vector<Eigen::VectorXd>> gains_;
  bool mode_dependent_;
};

/// u_j = extract_feedback(cert, p_j) (per mode for mode-dependent
/// certificates) at every ball vertex. Requires n = 2 and a converged
/// certificate whose ball is a convex polygon.
SectorLinearController2D build_sector_controller_2d(const Certificate& cert, const SwitchedSystem& system);

enum class FeedbackStrategy { OnlineLP, SectorLinear2D };

/// Static state feedback Phi: R^n -> R^m.
class MemorylessController {
 public:
  MemorylessController(std::shared_ptr<const Certificate> cert, std::shared_ptr<const SwitchedSystem> system,
                       FeedbackStrategy strategy = FeedbackStrategy::OnlineLP);

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;

  const Certificate& certificate() const { return *cert_; }
  const SwitchedSystem& system() const { return *system_; }
  FeedbackStrategy strategy() const { return strategy_; }

 private:
  std::shared_ptr<const Certificate> cert_;
  std::shared_ptr<const SwitchedSystem> system_;
  FeedbackStrategy strategy_;
  std::shared_ptr<const SectorLinearController2D> sector_;
};

/// Static mode-dependent state feedback Phi_d: Sigma x R^n -> R^m.
class ModeDependentController {
 public:
  ModeDependentController(std::shared_ptr<const Certificate> cert, std::shared_ptr<const SwitchedSystem> system,
                          FeedbackStrategy strategy = FeedbackStrategy::OnlineLP);

  Eigen::VectorXd operator()(std::size_t mode, const Eigen::VectorXd& x) const;

  const Certificate& certificate() const { return *cert_; }
  const SwitchedSystem& system() const { return *system_; }

 private:
  std::shared_ptr<const Certificate> cert_;
  std::shared_ptr<const SwitchedSystem> system_;
  FeedbackStrategy strategy_;
  std::shared_ptr<const SectorLinearController2D> sector_;
};

/// Feedback with access to the state history and the mode history.
///
/// States are passed oldest first, x_0..x_k. A CurrentModeIndependent
/// controller sees modes i_0..i_{k-1}; a CurrentModeDependent one also sees
/// the current mode, i_0..i_k.
///
/// Instances may carry internal state (see sum_controller); such instances
/// belong to one simulation run at a time.
class MemoryController {
 public:
  virtual ~MemoryController() = default;

  virtual ControllerKind kind() const = 0;

  /// Checks the history lengths against kind() and forwards to the
  /// implementation. Throws ValidationError on a mismatch.
  Eigen::VectorXd evaluate(std::span<const Eigen::VectorXd> states, std::span<const std::size_t> modes);

 protected:
  virtual Eigen::VectorXd evaluate_history(std::span<const Eigen::VectorXd> states,
                                           std::span<const std::size_t> modes) = 0;
};

using MemoryControllerPtr = std::shared_ptr<MemoryController>;
using HistoryFeedback =
    std::function<Eigen::VectorXd(std::span<const Eigen::VectorXd>, std::span<const std::size_t>)>;

/// Memory controller from an arbitrary history map.
MemoryControllerPtr make_memory_controller(ControllerKind kind, HistoryFeedback feedback);

/// Static feedback seen as a memory controller that only reads the current
/// state (and the current mode for the mode-dependent kind).
MemoryControllerPtr lift_memoryless(const MemorylessController& controller);
MemoryControllerPtr lift_memoryless(const ModeDependentController& controller);

/// Psi'(y_0..y_k; modes) = lambda Psi(y_0/lambda..y_k/lambda; modes), so that
/// the run from lambda x0 under Psi' is lambda times the run from x0 under
/// Psi. Throws ValidationError for lambda = 0.
MemoryControllerPtr scale_controller(MemoryControllerPtr psi, double lambda);

/// Superposition controller: replays psi1 along the virtual run from z1 and
/// psi2 along the virtual run from z2, driven only by the observed mode
/// history, and applies the sum of both inputs. Started from z1 + z2 the
/// closed loop equals the sum of the two virtual runs. Both controllers must
/// have the same kind. The result is stateful: queries must not go back in
/// time, and the mode history must stay consistent (InvariantError
/// otherwise).
MemoryControllerPtr sum_controller(MemoryControllerPtr psi1, Eigen::VectorXd z1, MemoryControllerPtr psi2,
                                   Eigen::VectorXd z2, std::shared_ptr<const SwitchedSystem> system);

}  // namespace swstab
