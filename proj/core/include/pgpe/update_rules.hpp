#pragma once

// Gradient estimators and state transitions for the PGPE family.
//
// Every update is gradient ascent on expected reward. Step sizes multiply raw
// reward differences; nothing here normalizes rewards.
//
//   PGPE      one sample, both mu and sigma compared to a baseline
//   SyS       mu +/- eps; mu from the reward difference, sigma vs. baseline
//   SupSyS    mu +/- eps and mu +/- eps*; no baseline at all
//   PGPE4smp  two independent SyS pairs averaged
//   SupIf     escalates single -> SyS -> SupSyS while rewards stay below baseline

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "pgpe/baseline.hpp"
#include "pgpe/random.hpp"
#include "pgpe/sampling.hpp"

namespace pgpe {

enum class Variant { pgpe, sys, supsys, pgpe4smp, supif };

/// Canonical names: PGPE, SyS, SupSyS, PGPE4smp, SupIf.
[[nodiscard]] std::string_view to_string(Variant variant) noexcept;
/// Exact (case-sensitive) match against the canonical names.
[[nodiscard]] std::optional<Variant> parse_variant(std::string_view name) noexcept;

/// Evaluations consumed by one step; the SupIf figure is its worst case.
[[nodiscard]] int max_evaluations_per_step(Variant variant) noexcept;

inline constexpr double kDefaultSigmaFloor = 1e-10;

/// Eligibility used by the SupSyS sigma update.
///   original:    (eps_i^2 - sigma_i^2) / sigma_i
///   symmetrized: (eps_i^2 - eps*_i^2) / (2 sigma_i)
enum class SupSysSigmaForm { original, symmetrized };

[[nodiscard]] std::string_view to_string(SupSysSigmaForm form) noexcept;
[[nodiscard]] std::optional<SupSysSigmaForm> parse_supsys_sigma_form(std::string_view name) noexcept;

struct MetaParams {
  double alpha_mu = 0.1;
  double alpha_sigma = 0.1;
  Variant variant = Variant::sys;
  double sigma_floor = kDefaultSigmaFloor;
  SupSysSigmaForm supsys_sigma = SupSysSigmaForm::original;

  /// Throws std::invalid_argument unless all three reals are strictly positive.
  void validate() const;

  bool operator==(const MetaParams&) const = default;
};

enum class Branch { single, sys, supsys };

[[nodiscard]] std::string_view to_string(Branch branch) noexcept;

struct UpdateReport {
  Vector delta_mu;
  Vector delta_sigma;
  int evaluations_used = 0;
  std::vector<double> rewards_seen;
  std::optional<Branch> branch;  ///< set by supif_step only
};

struct Eligibility {
  double grad_mu;
  double grad_sigma;
};

/// Gradient of log N(theta; mu, sigma^2) with respect to mu and sigma:
///   ((theta - mu) / sigma^2, ((theta - mu)^2 - sigma^2) / sigma^3)
/// Throws std::domain_error unless sigma > 0.
[[nodiscard]] Eligibility eligibility(double theta, double mu, double sigma);

/// Squared norm of the full log-density gradient at theta.
[[nodiscard]] double eligibility_sq_norm(const Hypothesis& hyp, std::span<const double> theta);

/// Squared norm of the sigma part of the log-density gradient at mu + eps.
[[nodiscard]] double sigma_eligibility_sq_norm(const Hypothesis& hyp, std::span<const double> eps);

/// Single-sample update with baseline b:
///   dmu_i    = alpha_mu    (r - b) (theta_i - mu_i)
///   dsigma_i = alpha_sigma (r - b) ((theta_i - mu_i)^2 - sigma_i^2) / sigma_i
/// An uninitialized baseline is first set to r, so the first update is zero.
/// The baseline then observes r.
[[nodiscard]] UpdateReport pgpe_update(const Hypothesis& hyp, std::span<const double> theta,
                                       double r, BaselineState& baseline, const MetaParams& meta);

/// Symmetric-pair update for rewards r_plus at mu + eps and r_minus at mu - eps:
///   dmu_i    = alpha_mu    eps_i (r+ - r-) / 2
///   dsigma_i = alpha_sigma ((r+ + r-) / 2 - b) (eps_i^2 - sigma_i^2) / sigma_i
/// The baseline is used first and then observes (r+ + r-) / 2.
[[nodiscard]] UpdateReport sys_update(const Hypothesis& hyp, const Perturbation& eps,
                                      double r_plus, double r_minus, BaselineState& baseline,
                                      const MetaParams& meta);

/// Baseline-free update from an evaluated quad. With r++ = (r_pp + r_mp) / 2
/// and r-- = (r_pm + r_mm) / 2:
///   dmu_i    = alpha_mu (eps_i (r_pp - r_mp) + eps*_i (r_pm - r_mm)) / 2
///   dsigma_i = alpha_sigma ((eps_i^2 - sigma_i^2) / sigma_i) (r++ - r--) / 2
/// Throws std::invalid_argument if any of the four rewards is unset.
[[nodiscard]] UpdateReport supsys_update(const Hypothesis& hyp, const SampleQuad& quad,
                                         const MetaParams& meta);

struct SymmetricPair {
  Perturbation eps;
  double r_plus;
  double r_minus;
};

/// Mean of the two SyS updates, both taken against the same baseline value,
/// which then observes the mean of all four rewards once.
[[nodiscard]] UpdateReport pgpe4smp_update(const Hypothesis& hyp, const SymmetricPair& first,
                                           const SymmetricPair& second, BaselineState& baseline,
                                           const MetaParams& meta);

/// Reward of a parameter vector. Called once per evaluated point.
using RewardFn = std::function<double(std::span<const double>)>;

/// Conditional super-symmetric step.
///
/// Draws eps and evaluates r1 at mu + eps. If r1 > b a single-sample update is
/// made. Otherwise r2 at mu - eps is evaluated and, if (r1 + r2) / 2 > b, a SyS
/// update is made. Otherwise the mirrored pair is evaluated and a SupSyS
/// update is made. The baseline observes the mean of all rewards seen in the
/// step. With an uninitialized baseline the step only sets b = r1 and returns
/// a zero single-branch update.
[[nodiscard]] UpdateReport supif_step(const Hypothesis& hyp, Rng& rng, const RewardFn& reward,
                                      BaselineState& baseline, const MetaParams& meta);

/// mu + dmu, max(sigma + dsigma, sigma_floor). Throws std::invalid_argument on
/// a dimension mismatch.
[[nodiscard]] Hypothesis apply_update(const Hypothesis& hyp, const UpdateReport& report,
                                      const MetaParams& meta);

/// One full step of `meta.variant`: sample, evaluate through `reward`, estimate.
[[nodiscard]] UpdateReport variant_step(const Hypothesis& hyp, Rng& rng, const RewardFn& reward,
                                        BaselineState& baseline, const MetaParams& meta);

}  // namespace pgpe
