#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rrcov/distributions.hpp"
#include "rrcov/matrix.hpp"
#include "rrcov/rng.hpp"

namespace rrcov {

// Highest total order of any joint moment the asymptotic constants use.
inline constexpr int kMaxJointOrder = 4;

struct Component {
  std::string name;
  Primitive distribution;

  bool operator==(const Component&) const = default;
};

/// constant + sum_k coefficients[k] * component_k. coefficients is aligned
/// with the owning CycleSpec's component list.
struct AffineForm {
  double constant = 0.0;
  std::vector<double> coefficients;

  bool operator==(const AffineForm&) const = default;
};

/// One cycle vector (T, X_1, ..., X_L) built from independent components.
struct CycleSpec {
  std::vector<Component> components;
  AffineForm time;
  std::vector<AffineForm> rewards;

  std::size_t dimension() const noexcept { return rewards.size(); }

  bool operator==(const CycleSpec&) const = default;
};

enum class DelayMode {
  Ordinary,     // T0 = 0, X0 = 0
  SameAsCycle,  // (T0, X0) is an independent copy of a regular cycle
  Custom,       // (T0, X0) has its own component set
};

struct ModelSpec {
  CycleSpec cycle;
  std::vector<std::string> reward_names;
  DelayMode delay_mode = DelayMode::Ordinary;
  std::optional<CycleSpec> delay;  // set iff delay_mode == Custom
  bool lattice = false;
  std::vector<std::string> notes;

  std::size_t dimension() const noexcept { return cycle.dimension(); }

  bool operator==(const ModelSpec&) const = default;
};

/// Throws ValidationError describing the first violated constraint.
void validate(const ModelSpec& spec);

/// E[T^time_power * prod_c X_c^reward_powers[c]] for one cycle description,
/// exact to rounding. Total order above kMaxJointOrder is rejected.
double joint_moment(const CycleSpec& cycle, int time_power,
                    std::span<const int> reward_powers);

inline double joint_moment(const ModelSpec& spec, int time_power,
                           std::span<const int> reward_powers) {
  return joint_moment(spec.cycle, time_power, reward_powers);
}

/// Moments of a regular cycle plus the delay cycle, for L reward coordinates.
struct CycleMoments {
  std::size_t dim = 0;

  double mu1 = 0.0;  // E T
  double mu2 = 0.0;  // E T^2
  double mu3 = 0.0;  // E T^3

  std::vector<double> lambda1;  // E X_i
  std::vector<double> lambda2;  // E X_i^2
  std::vector<double> m11;      // E T X_i
  std::vector<double> m21;      // E T^2 X_i
  std::vector<double> m12;      // E T X_i^2
  Matrix p011;                  // E X_i X_j
  Matrix p111;                  // E T X_i X_j

  double delay_t = 0.0;          // E T0
  double delay_t2 = 0.0;         // E T0^2
  std::vector<double> delay_x;   // E X0_i
  std::vector<double> delay_tx;  // E T0 X0_i
  Matrix delay_xx;               // E X0_i X0_j
};

CycleMoments cycle_moments(const ModelSpec& spec);

/// Draws one cycle: returns T and writes the L rewards. Components are drawn
/// once each and shared by every coordinate that references them.
double sample_cycle(const CycleSpec& cycle, RngStream& rng,
                    std::span<double> component_scratch,
                    std::span<double> rewards_out);

struct CycleDraw {
  double time;
  std::vector<double> rewards;
};

CycleDraw sample_cycle(const CycleSpec& cycle, RngStream& rng);

/// The description the delay cycle is drawn from, or nullptr when ordinary.
const CycleSpec* delay_cycle(const ModelSpec& spec) noexcept;

}  // namespace rrcov
