#pragma once

// Gaussian perturbation sampling for parameter-exploring policy gradients.
//
// The search distribution is an axis-aligned Gaussian stored as mean and
// standard deviation. The median deviation phi = 0.67449 * sigma is derived on
// demand; it is the scale across which `mirror` reflects a perturbation.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pgpe/random.hpp"

namespace pgpe {

using Vector = std::vector<double>;

/// Ratio between the median absolute deviation and the standard deviation of a Gaussian.
inline constexpr double kMedianDeviationRatio = 0.67449;

/// Constants of the piecewise-exponential mirror approximation.
inline constexpr double kMirrorC1 = -0.06655;
inline constexpr double kMirrorC2 = -0.9706;
inline constexpr double kMirrorC3 = 0.124;

/// Perturbation magnitudes below this fraction of phi are lifted to it before mirroring.
inline constexpr double kMirrorMinRatio = 1e-12;

/// Search distribution: independent N(mu_i, sigma_i^2) per parameter.
struct Hypothesis {
  Vector mu;
  Vector sigma;

  [[nodiscard]] std::size_t dim() const noexcept { return mu.size(); }

  /// mu and sigma of equal length d >= 1, every sigma_i finite and >= 0.
  /// Throws std::invalid_argument otherwise.
  void validate() const;

  [[nodiscard]] static Hypothesis isotropic(Vector mu, double sigma0);
};

struct Perturbation {
  Vector eps;
};

/// Four evaluation points built from one perturbation and its mirror:
/// mu + eps, mu - eps, mu + eps*, mu - eps*.
struct SampleQuad {
  Vector eps;
  Vector eps_star;
  Vector theta_pp;
  Vector theta_mp;
  Vector theta_pm;
  Vector theta_mm;
  std::optional<double> r_pp;
  std::optional<double> r_mp;
  std::optional<double> r_pm;
  std::optional<double> r_mm;

  [[nodiscard]] bool evaluated() const noexcept { return r_pp && r_mp && r_pm && r_mm; }
};

/// phi = 0.67449 * sigma. Throws std::domain_error for negative sigma.
[[nodiscard]] double median_from_std(double sigma);
/// sigma = phi / 0.67449. Throws std::domain_error for negative phi.
[[nodiscard]] double std_from_median(double phi);

/// eps_i = sigma_i * z_i with z_i standard normal, one draw per component.
[[nodiscard]] Perturbation draw_perturbation(Rng& rng, const Hypothesis& hypothesis);

/// Quasi-reflection of a perturbation component across the median deviation.
///
/// With a = (phi - |eps|) / phi the result is
///
///   sign(eps) * phi * exp(c1 * (|a|^3 - |a|) / log|a| + c2 * |a|)   for a <= 0
///   sign(eps) * phi * exp(a) / (1 - a^3)^(c3 * a)                   for a > 0
///
/// The removable singularities at a = 0 and |a| = 1 take their limit values
/// (0 and 2 for the log ratio). |eps| is lifted to at least 1e-12 * phi so
/// that a < 1, and sign(0) is +1. Throws std::domain_error unless phi > 0.
[[nodiscard]] double mirror(double eps, double phi);

/// Draws eps, mirrors it component-wise and fills the four evaluation points.
/// Components with sigma_i = 0 get eps_i = eps*_i = 0. Rewards are left unset.
[[nodiscard]] SampleQuad make_quad(Rng& rng, const Hypothesis& hypothesis);

/// Builds the quad for a given perturbation without drawing.
[[nodiscard]] SampleQuad make_quad(const Hypothesis& hypothesis, Perturbation perturbation);

/// mu + sign * eps, component-wise.
[[nodiscard]] Vector offset(std::span<const double> mu, std::span<const double> eps, double sign);

}  // namespace pgpe
