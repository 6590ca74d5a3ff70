#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pgpe {

enum class ObjectiveKind { sphere, rastrigin };

[[nodiscard]] std::string_view to_string(ObjectiveKind kind) noexcept;
/// Throws std::invalid_argument for an unknown name.
[[nodiscard]] ObjectiveKind parse_objective_kind(std::string_view name);

/// sum_i theta_i^2
[[nodiscard]] double sphere_eval(std::span<const double> theta) noexcept;

/// 10 d + sum_i (theta_i^2 - 10 cos(2 pi theta_i))
[[nodiscard]] double rastrigin_eval(std::span<const double> theta) noexcept;

[[nodiscard]] double objective_value(ObjectiveKind kind, std::span<const double> theta) noexcept;

/// A minimization benchmark seen as a reward source (reward = -f) that counts
/// every point it evaluates.
class Objective {
 public:
  /// Throws std::invalid_argument if dim == 0.
  Objective(ObjectiveKind kind, std::size_t dim);

  [[nodiscard]] ObjectiveKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::uint64_t evaluations() const noexcept { return evaluations_; }

  /// f(theta); increments the evaluation counter. Throws on length mismatch.
  double evaluate(std::span<const double> theta);
  /// -f(theta); increments the evaluation counter.
  double reward(std::span<const double> theta) { return -evaluate(theta); }

 private:
  ObjectiveKind kind_;
  std::size_t dim_;
  std::uint64_t evaluations_ = 0;
};

struct SurfacePoint {
  double x;
  double y;
  double f;
};

/// Row-major grid of f over [-range, range]^2: rows step through y, columns
/// through x, both from -range to +range in `resolution` nodes.
/// Throws std::invalid_argument if dim != 2, resolution < 2 or range < 0.
[[nodiscard]] std::vector<SurfacePoint> emit_surface_grid(ObjectiveKind kind, std::size_t dim,
                                                          double range, std::size_t resolution);

/// CSV with header `x,y,f`, 17 significant digits, LF line endings.
void write_surface_csv(std::ostream& out, std::span<const SurfacePoint> grid);

}  // namespace pgpe
