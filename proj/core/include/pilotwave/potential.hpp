#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pilotwave/grid.hpp"

namespace pilotwave {

struct ConstantPotential {
  double value = 0.0;
};

/// V(x) = slope * x.
struct LinearPotential {
  double slope = 0.0;
};

/// V(x) = stiffness/2 * (x - center)^2.
struct HarmonicPotential {
  double stiffness = 0.0;
  double center = 0.0;
};

/// Electrostatic energy of a charge in a homogeneous field: V(x) = -charge * field * x.
struct UniformFieldPotential {
  double field_strength = 0.0;
  double charge = 1.0;
};

/// Samples on a grid; linear interpolation between nodes, clamped outside.
struct TabulatedPotential {
  Grid1D grid;
  std::vector<double> values;
};

/// Pair-interaction descriptor. Carried for configuration completeness only;
/// none of the propagators consume it.
struct PairInteraction {
  enum class Kind { Contact, SoftCoulomb };
  Kind kind = Kind::SoftCoulomb;
  double strength = 0.0;
  double softening = 1.0;
};

class PotentialSpec {
 public:
  using Variant = std::variant<ConstantPotential, LinearPotential, HarmonicPotential,
                               UniformFieldPotential, TabulatedPotential>;

  PotentialSpec() : PotentialSpec(ConstantPotential{}) {}
  explicit PotentialSpec(Variant external, std::optional<PairInteraction> interaction = std::nullopt);

  static PotentialSpec constant(double v0) { return PotentialSpec(ConstantPotential{v0}); }
  static PotentialSpec linear(double slope) { return PotentialSpec(LinearPotential{slope}); }
  static PotentialSpec harmonic(double k, double center = 0.0) {
    return PotentialSpec(HarmonicPotential{k, center});
  }
  static PotentialSpec uniform_field(double field, double charge) {
    return PotentialSpec(UniformFieldPotential{field, charge});
  }
  static PotentialSpec tabulated(Grid1D grid, std::vector<double> values) {
    return PotentialSpec(TabulatedPotential{std::move(grid), std::move(values)});
  }

  double value(double x) const;
  double gradient(double x) const;

  /// The same potential multiplied by a constant (used for V_cm = N * V_ext).
  PotentialSpec scaled(double factor) const;

  std::vector<double> sample(const Grid1D& grid) const;
  double max_abs(const Grid1D& grid) const;

  const Variant& external() const noexcept { return external_; }
  const std::optional<PairInteraction>& interaction() const noexcept { return interaction_; }
  std::string describe() const;

 private:
  Variant external_;
  std::optional<PairInteraction> interaction_;
};

}  // namespace pilotwave
