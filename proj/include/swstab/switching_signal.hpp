#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "swstab/polytope_norm.hpp"
#include "swstab/system.hpp"

namespace swstab {

/// Information pattern of a controller: whether the mode active at step k is
/// revealed before the input u(k) is chosen.
enum class ControllerKind { CurrentModeIndependent, CurrentModeDependent };

const char* to_string(ControllerKind kind);

/// What a switching signal may observe when choosing sigma(k).
struct StepQuery {
  std::size_t k = 0;
  const Eigen::VectorXd* state = nullptr;
  // Set for current-mode-independent controllers: u(k) is committed first.
  const Eigen::VectorXd* proposed_input = nullptr;
  // Set for current-mode-dependent controllers: the input the controller
  // would apply if mode i were selected.
  std::function<Eigen::VectorXd(std::size_t)> input_for_mode;
};

struct ExplicitSignal {
  std::vector<std::size_t> modes;
};

struct RandomSeededSignal {
  std::uint64_t seed = 0;
};

struct PeriodicSignal {
  std::vector<std::size_t> pattern;
};

/// Greedy one-step adversary: picks the mode maximizing the next value of
/// `norm`; ties go to the lowest index.
struct AdversarialSignal {
  std::shared_ptr<const BalancedPolytopeNorm> norm;
  std::shared_ptr<const SwitchedSystem> system;
  ControllerKind kind = ControllerKind::CurrentModeIndependent;
};

class SwitchingSignal {
 public:
  using Variant = std::variant<ExplicitSignal, RandomSeededSignal, PeriodicSignal, AdversarialSignal>;

  /// Throws ValidationError for an empty periodic pattern or an adversary
  /// without norm/system.
  explicit SwitchingSignal(Variant v);

  static SwitchingSignal explicit_modes(std::vector<std::size_t> modes);
  static SwitchingSignal random(std::uint64_t seed);
  static SwitchingSignal periodic(std::vector<std::size_t> pattern);

  /// sigma(k) in [0, num_modes). Throws ValidationError when an explicit
  /// signal is queried past its end, when an adversary lacks the input it
  /// needs, or when the produced index is out of range.
  std::size_t mode_at(const StepQuery& query, std::size_t num_modes) const;

  const Variant& kind() const { return v_; }
  bool is_adversarial() const { return std::holds_alternative<AdversarialSignal>(v_); }

 private:
  Variant v_;
};

/// SplitMix64 finalizer, used for counter-based reproducible randomness.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace swstab
