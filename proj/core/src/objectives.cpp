#include "pgpe/objectives.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "pgpe/csv.hpp"

namespace pgpe {

std::string_view to_string(ObjectiveKind kind) noexcept {
  switch (kind) {
    case ObjectiveKind::sphere:
      return "sphere";
    case ObjectiveKind::rastrigin:
      return "rastrigin";
  }
  return "unknown";
}

ObjectiveKind parse_objective_kind(std::string_view name) {
  if (name == "sphere") return ObjectiveKind::sphere;
  if (name == "rastrigin") return ObjectiveKind::rastrigin;
  throw std::invalid_argument("unknown objective '" + std::string(name) + "'");
}

double sphere_eval(std::span<const double> theta) noexcept {
  double sum = 0.0;
  for (const double t : theta) sum += t * t;
  return sum;
}

double rastrigin_eval(std::span<const double> theta) noexcept {
  constexpr double kAmplitude = 10.0;
  double sum = kAmplitude * static_cast<double>(theta.size());
  for (const double t : theta) {
    sum += t * t - kAmplitude * std::cos(2.0 * std::numbers::pi * t);
  }
  return sum;
}

double objective_value(ObjectiveKind kind, std::span<const double> theta) noexcept {
  return kind == ObjectiveKind::sphere ? sphere_eval(theta) : rastrigin_eval(theta);
}

Objective::Objective(ObjectiveKind kind, std::size_t dim) : kind_(kind), dim_(dim) {
  if (dim == 0) throw std::invalid_argument("objective dimension must be at least 1");
}

double Objective::evaluate(std::span<const double> theta) {
  if (theta.size() != dim_) {
    throw std::invalid_argument("objective evaluated at a point of wrong dimension");
  }
  ++evaluations_;
  return objective_value(kind_, theta);
}

std::vector<SurfacePoint> emit_surface_grid(ObjectiveKind kind, std::size_t dim, double range,
                                            std::size_t resolution) {
  if (dim != 2) throw std::invalid_argument("surface grid is only supported for dim = 2");
  if (resolution < 2) throw std::invalid_argument("surface resolution must be at least 2");
  if (!(range >= 0.0) || !std::isfinite(range)) {
    throw std::invalid_argument("surface range must be finite and non-negative");
  }
  const double step = 2.0 * range / static_cast<double>(resolution - 1);
  std::vector<SurfacePoint> grid;
  grid.reserve(resolution * resolution);
  for (std::size_t row = 0; row < resolution; ++row) {
    const double y = -range + step * static_cast<double>(row);
    for (std::size_t col = 0; col < resolution; ++col) {
      const double x = -range + step * static_cast<double>(col);
      const double point[2] = {x, y};
      grid.push_back({x, y, objective_value(kind, point)});
    }
  }
  return grid;
}

void write_surface_csv(std::ostream& out, std::span<const SurfacePoint> grid) {
  out << "x,y,f\n";
  for (const auto& p : grid) {
    out << csv::num(p.x) << ',' << csv::num(p.y) << ',' << csv::num(p.f) << '\n';
  }
}

}  // namespace pgpe
