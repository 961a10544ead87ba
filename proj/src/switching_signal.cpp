#include "swstab/switching_signal.hpp"

#include <string>

#include "swstab/errors.hpp"

namespace swstab {

const char* to_string(ControllerKind kind) {
  return kind == ControllerKind::CurrentModeIndependent ? "CurrentModeIndependent" : "CurrentModeDependent";
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SwitchingSignal::SwitchingSignal(Variant v) : v_(std::move(v)) {
  if (const auto* p = std::get_if<PeriodicSignal>(&v_); p && p->pattern.empty()) {
    throw ValidationError("periodic signal: empty pattern");
  }
  if (const auto* a = std::get_if<AdversarialSignal>(&v_); a && (!a->norm || !a->system)) {
    throw ValidationError("adversarial signal: missing norm or system");
  }
}

SwitchingSignal SwitchingSignal::explicit_modes(std::vector<std::size_t> modes) {
  return SwitchingSignal(ExplicitSignal{std::move(modes)});
}

SwitchingSignal SwitchingSignal::random(std::uint64_t seed) { return SwitchingSignal(RandomSeededSignal{seed}); }

SwitchingSignal SwitchingSignal::periodic(std::vector<std::size_t> pattern) {
  return SwitchingSignal(PeriodicSignal{std::move(pattern)});
}

namespace {

std::size_t adversarial_choice(const AdversarialSignal& adv, const StepQuery& q) {
  const SwitchedSystem& sys = *adv.system;
  if (q.state == nullptr) throw ValidationError("adversarial signal: state not provided");
  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t i = 0; i < sys.num_modes(); ++i) {
    Eigen::VectorXd u;
    if (adv.kind == ControllerKind::CurrentModeIndependent) {
      if (q.proposed_input == nullptr) {
        throw ValidationError("adversarial signal: mode-independent adversary needs the proposed input");
      }
      u = *q.proposed_input;
    } else {
      if (!q.input_for_mode) {
        throw ValidationError("adversarial signal: mode-dependent adversary needs per-mode inputs");
      }
      u = q.input_for_mode(i);
    }
    const double v = (*adv.norm)(sys.step(i, *q.state, u));
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  return best;
}

}  // namespace

std::size_t SwitchingSignal::mode_at(const StepQuery& q, std::size_t num_modes) const {
  std::size_t mode = 0;
  if (const auto* e = std::get_if<ExplicitSignal>(&v_)) {
    if (q.k >= e->modes.size()) {
      throw ValidationError("explicit signal: undefined at k = " + std::to_string(q.k));
    }
    mode = e->modes[q.k];
  } else if (const auto* r = std::get_if<RandomSeededSignal>(&v_)) {
    mode = static_cast<std::size_t>(splitmix64(r->seed ^ splitmix64(q.k)) % num_modes);
  } else if (const auto* p = std::get_if<PeriodicSignal>(&v_)) {
    mode = p->pattern[q.k % p->pattern.size()];
  } else {
    mode = adversarial_choice(std::get<AdversarialSignal>(v_), q);
  }
  if (mode >= num_modes) {
    throw ValidationError("switching signal: mode index " + std::to_string(mode) + " out of range at k = " +
                          std::to_string(q.k));
  }
  return mode;
}

}  // namespace swstab
