#include "swstab/simulate.hpp"

#include <cmath>
#include <random>
#include <string>

#include "random_util.hpp"
#include "swstab/errors.hpp"

namespace swstab {

Trajectory simulate(const SwitchedSystem& system, MemoryController& controller, const SimulationSpec& spec,
                    const BalancedPolytopeNorm* norm) {
  if (spec.horizon < 1) throw ValidationError("simulate: horizon must be at least 1");
  if (spec.x0.size() != system.n()) throw ValidationError("simulate: x0 has wrong dimension");
  if (!spec.x0.allFinite()) throw ValidationError("simulate: x0 is not finite");
  if (!(spec.disturbance_bound >= 0.0)) throw ValidationError("simulate: disturbance bound must be >= 0");
  if (norm && norm->dim() != system.n()) throw ValidationError("simulate: norm dimension mismatch");

  const ControllerKind kind = controller.kind();
  if (const auto* adv = std::get_if<AdversarialSignal>(&spec.signal.kind()); adv && adv->kind != kind) {
    throw ValidationError(std::string("simulate: adversarial signal built for ") + to_string(adv->kind) +
                          " but controller is " + to_string(kind));
  }

  const std::size_t K = spec.horizon;
  Trajectory traj;
  traj.states.reserve(K + 1);
  traj.inputs.reserve(K);
  traj.modes.reserve(K + 1);
  traj.states.push_back(spec.x0);

  const bool disturbed = spec.disturbance_bound > 0.0;
  std::mt19937_64 rng(spec.disturbance_seed);
  if (disturbed) traj.disturbances.emplace();

  for (std::size_t k = 0; k < K; ++k) {
    const Eigen::VectorXd& x = traj.states.back();
    StepQuery query;
    query.k = k;
    query.state = &x;
    std::size_t mode = 0;
    Eigen::VectorXd u;
    if (kind == ControllerKind::CurrentModeIndependent) {
      u = controller.evaluate(traj.states, traj.modes);
      query.proposed_input = &u;
      mode = spec.signal.mode_at(query, system.num_modes());
      traj.modes.push_back(mode);
    } else {
      query.input_for_mode = [&](std::size_t i) {
        traj.modes.push_back(i);
        Eigen::VectorXd probe = controller.evaluate(traj.states, traj.modes);
        traj.modes.pop_back();
        return probe;
      };
      mode = spec.signal.mode_at(query, system.num_modes());
      traj.modes.push_back(mode);
      u = controller.evaluate(traj.states, traj.modes);
    }
    if (u.size() != system.m()) {
      throw SimulationError("simulate: controller returned an input of wrong dimension at step " +
                            std::to_string(k));
    }

    Eigen::VectorXd next = system.step(mode, x, u);
    if (disturbed) {
      Eigen::VectorXd w = detail::uniform_in_ball(rng, system.n(), spec.disturbance_bound);
      next += w;
      traj.disturbances->push_back(std::move(w));
    }
    if (!next.allFinite() || !u.allFinite()) {
      throw SimulationError("simulate: non-finite state at step " + std::to_string(k + 1));
    }
    traj.inputs.push_back(std::move(u));
    traj.states.push_back(std::move(next));
  }

  if (norm) {
    std::vector<double> v;
    v.reserve(traj.states.size());
    for (const auto& x : traj.states) v.push_back((*norm)(x));
    traj.v_values = std::move(v);
  }
  return traj;
}

Trajectory simulate(const SwitchedSystem& system, const MemorylessController& controller,
                    const SimulationSpec& spec, const BalancedPolytopeNorm* norm) {
  MemoryControllerPtr lifted = lift_memoryless(controller);
  return simulate(system, *lifted, spec, norm);
}

Trajectory simulate(const SwitchedSystem& system, const ModeDependentController& controller,
                    const SimulationSpec& spec, const BalancedPolytopeNorm* norm) {
  MemoryControllerPtr lifted = lift_memoryless(controller);
  return simulate(system, *lifted, spec, norm);
}

SwitchingSignal adversarial_signal(std::shared_ptr<const Certificate> cert,
                                   std::shared_ptr<const SwitchedSystem> system, ControllerKind kind) {
  if (!cert || !system) throw ValidationError("adversarial_signal: null certificate or system");
  if (!cert->converged()) throw ValidationError("adversarial_signal: certificate not converged");
  if (cert->norm.dim() != system->n()) throw ValidationError("adversarial_signal: dimension mismatch");
  auto norm = std::shared_ptr<const BalancedPolytopeNorm>(cert, &cert->norm);
  return SwitchingSignal(AdversarialSignal{std::move(norm), std::move(system), kind});
}

UesEstimate estimate_ues(std::span<const Trajectory> batch, const Certificate& cert) {
  if (batch.empty()) throw ValidationError("estimate_ues: empty batch");
  if (!cert.c2) throw ValidationError("estimate_ues: certificate has no c2");
  UesEstimate est;
  est.M_hat = *cert.c2;
  for (const auto& traj : batch) {
    if (!traj.v_values) throw ValidationError("estimate_ues: trajectory without v_values");
    const auto& v = *traj.v_values;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      if (v[k] < 1e-12) continue;
      est.gamma_hat = std::max(est.gamma_hat, v[k + 1] / v[k]);
    }
  }
  for (const auto& traj : batch) {
    const double x0 = traj.states.front().norm();
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      const double bound = est.M_hat * std::pow(est.gamma_hat, static_cast<double>(k)) * x0 * (1.0 + 1e-6);
      if (traj.states[k].norm() > bound) ++est.bound_violations;
    }
  }
  return est;
}

}  // namespace swstab
