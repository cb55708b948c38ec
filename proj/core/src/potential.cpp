#include "pilotwave/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pilotwave/error.hpp"

namespace pilotwave {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double table_value(const TabulatedPotential& t, double x) {
  const auto& g = t.grid;
  if (x <= g.x_min()) return t.values.front();
  if (x >= g.x_max()) return t.values.back();
  const std::size_t i = g.cell_of(x);
  const double s = (x - g.x(i)) / g.dx();
  return (1.0 - s) * t.values[i] + s * t.values[i + 1];
}

double table_gradient(const TabulatedPotential& t, double x) {
  const auto& g = t.grid;
  const std::size_t n = g.size();
  // Central differences at nodes, interpolated linearly in between.
  auto node_grad = [&](std::size_t i) {
    if (i == 0) return (t.values[1] - t.values[0]) / g.dx();
    if (i == n - 1) return (t.values[n - 1] - t.values[n - 2]) / g.dx();
    return (t.values[i + 1] - t.values[i - 1]) / (2.0 * g.dx());
  };
  if (x <= g.x_min()) return node_grad(0);
  if (x >= g.x_max()) return node_grad(n - 1);
  const std::size_t i = g.cell_of(x);
  const double s = (x - g.x(i)) / g.dx();
  return (1.0 - s) * node_grad(i) + s * node_grad(i + 1);
}

}  // namespace

PotentialSpec::PotentialSpec(Variant external, std::optional<PairInteraction> interaction)
    : external_(std::move(external)), interaction_(interaction) {
  if (const auto* h = std::get_if<HarmonicPotential>(&external_)) {
    require(h->stiffness >= 0.0, ErrorKind::InvalidArgument, "harmonic stiffness must be >= 0");
  }
  if (const auto* t = std::get_if<TabulatedPotential>(&external_)) {
    require(t->values.size() == t->grid.size(), ErrorKind::InvalidArgument,
            "tabulated potential size does not match its grid");
    require(std::all_of(t->values.begin(), t->values.end(), [](double v) { return std::isfinite(v); }),
            ErrorKind::InvalidArgument, "tabulated potential has non-finite values");
  }
}

double PotentialSpec::value(double x) const {
  return std::visit(Overloaded{
                        [](const ConstantPotential& p) { return p.value; },
                        [x](const LinearPotential& p) { return p.slope * x; },
                        [x](const HarmonicPotential& p) {
                          const double d = x - p.center;
                          return 0.5 * p.stiffness * d * d;
                        },
                        [x](const UniformFieldPotential& p) { return -p.charge * p.field_strength * x; },
                        [x](const TabulatedPotential& p) { return table_value(p, x); },
                    },
                    external_);
}

double PotentialSpec::gradient(double x) const {
  return std::visit(Overloaded{
                        [](const ConstantPotential&) { return 0.0; },
                        [](const LinearPotential& p) { return p.slope; },
                        [x](const HarmonicPotential& p) { return p.stiffness * (x - p.center); },
                        [](const UniformFieldPotential& p) { return -p.charge * p.field_strength; },
                        [x](const TabulatedPotential& p) { return table_gradient(p, x); },
                    },
                    external_);
}

PotentialSpec PotentialSpec::scaled(double factor) const {
  Variant v = std::visit(Overloaded{
                             [&](ConstantPotential p) -> Variant { return ConstantPotential{p.value * factor}; },
                             [&](LinearPotential p) -> Variant { return LinearPotential{p.slope * factor}; },
                             [&](HarmonicPotential p) -> Variant {
                               return HarmonicPotential{p.stiffness * factor, p.center};
                             },
                             [&](UniformFieldPotential p) -> Variant {
                               return UniformFieldPotential{p.field_strength * factor, p.charge};
                             },
                             [&](TabulatedPotential p) -> Variant {
                               for (auto& v : p.values) v *= factor;
                               return p;
                             },
                         },
                         external_);
  return PotentialSpec(std::move(v), interaction_);
}

std::vector<double> PotentialSpec::sample(const Grid1D& grid) const {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = value(grid.x(i));
  return v;
}

double PotentialSpec::max_abs(const Grid1D& grid) const {
  double m = 0.0;
  for (double v : sample(grid)) m = std::max(m, std::abs(v));
  return m;
}

std::string PotentialSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const ConstantPotential& p) { os << "constant(" << p.value << ")"; },
                 [&](const LinearPotential& p) { os << "linear(slope=" << p.slope << ")"; },
                 [&](const HarmonicPotential& p) {
                   os << "harmonic(k=" << p.stiffness << ", center=" << p.center << ")";
                 },
                 [&](const UniformFieldPotential& p) {
                   os << "uniform_field(E=" << p.field_strength << ", q=" << p.charge << ")";
                 },
                 [&](const TabulatedPotential& p) { os << "tabulated(" << p.values.size() << " points)"; },
             },
             external_);
  return os.str();
}

}  // namespace pilotwave
