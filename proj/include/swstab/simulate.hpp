#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "swstab/bellman.hpp"
#include "swstab/controllers.hpp"
#include "swstab/switching_signal.hpp"
#include "swstab/trajectory.hpp"

namespace swstab {

struct SimulationSpec {
  Eigen::VectorXd x0;
  std::size_t horizon = 1;
  SwitchingSignal signal = SwitchingSignal::periodic({0});
  double disturbance_bound = 0.0;  // radius of the Euclidean ball w(k) is drawn from
  std::uint64_t disturbance_seed = 0;
};

/// Runs x(k+1) = A_s x(k) + B_s u(k) + w(k), s = sigma(k), for k < horizon.
///
/// The mode is revealed according to the controller kind: a
/// CurrentModeIndependent controller commits u(k) before sigma(k) is drawn
/// (an adversary sees u(k)); a CurrentModeDependent controller is evaluated
/// after, and an adversary may probe it per candidate mode.
/// v_values are filled when `norm` is given.
///
/// Throws ValidationError for an invalid spec or an adversarial signal built
/// for the other controller kind, and SimulationError (with the step index)
/// when a state becomes non-finite.
Trajectory simulate(const SwitchedSystem& system, MemoryController& controller, const SimulationSpec& spec,
                    const BalancedPolytopeNorm* norm = nullptr);

Trajectory simulate(const SwitchedSystem& system, const MemorylessController& controller,
                    const SimulationSpec& spec, const BalancedPolytopeNorm* norm = nullptr);

Trajectory simulate(const SwitchedSystem& system, const ModeDependentController& controller,
                    const SimulationSpec& spec, const BalancedPolytopeNorm* norm = nullptr);

/// Greedy adversary for a converged certificate: at every step it picks the
/// mode maximizing V^ of the successor state (lowest index on ties).
SwitchingSignal adversarial_signal(std::shared_ptr<const Certificate> cert,
                                   std::shared_ptr<const SwitchedSystem> system, ControllerKind kind);

struct UesEstimate {
  double gamma_hat = 0.0;  // max per-step ratio V^(x(k+1)) / V^(x(k))
  double M_hat = 0.0;      // c2 (the lower norm constant is 1)
  std::size_t bound_violations = 0;
};

/// Empirical uniform-exponential-stability constants from nominal runs
/// carrying v_values of the certificate norm. Steps with V^(x(k)) < 1e-12
/// are skipped for gamma_hat. Violations count steps with
/// |x(k)| > M_hat gamma_hat^k |x0| (1 + 1e-6).
/// Throws ValidationError on an empty batch or missing v_values.
UesEstimate estimate_ues(std::span<const Trajectory> batch, const Certificate& cert);

}  // namespace swstab
