#pragma once

#include <string>
#include <variant>

#include "rrcov/rng.hpp"

namespace rrcov {

// Highest raw moment order the primitives will report.
inline constexpr int kMaxMomentOrder = 12;

struct Exponential {
  double mean;

  bool operator==(const Exponential&) const = default;
};

struct Gamma {
  double shape;
  double scale;

  bool operator==(const Gamma&) const = default;
};

struct Uniform {
  double lo;
  double hi;

  bool operator==(const Uniform&) const = default;
};

struct Deterministic {
  double value;

  bool operator==(const Deterministic&) const = default;
};

/// A scalar random variable with every moment finite and an exact sampler.
/// Parameters are checked once, at construction; a Primitive is immutable.
class Primitive {
 public:
  using Params = std::variant<Exponential, Gamma, Uniform, Deterministic>;

  static Primitive exponential(double mean);
  static Primitive gamma(double shape, double scale);
  static Primitive uniform(double lo, double hi);
  static Primitive deterministic(double value);

  const Params& params() const noexcept { return params_; }

  // "exponential", "gamma", "uniform" or "deterministic".
  std::string kind_name() const;

  // True when the support lies in [0, inf).
  bool nonnegative() const noexcept;

  // True for a point mass.
  bool degenerate() const noexcept;

  bool operator==(const Primitive&) const = default;

 private:
  explicit Primitive(Params params) : params_(params) {}

  Params params_;
};

/// Exact E[U^k] for 0 <= k <= kMaxMomentOrder. Throws
/// Error(UnsupportedOrder) outside that range.
double raw_moment(const Primitive& p, int k);

/// One exact variate.
double sample(const Primitive& p, RngStream& rng);

}  // namespace rrcov

