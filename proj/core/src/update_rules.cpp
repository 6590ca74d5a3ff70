#include "pgpe/update_rules.hpp"

#include <cmath>
#include <stdexcept>

namespace pgpe {

namespace {

void require_same_dim(const Hypothesis& hyp, std::size_t n, const char* what) {
  if (n != hyp.dim()) {
    throw std::invalid_argument(std::string(what) + ": dimension does not match hypothesis");
  }
}

// Shared SyS arithmetic against a fixed baseline value; used by SyS, PGPE4smp and SupIf.
UpdateReport sys_deltas(const Hypothesis& hyp, std::span<const double> eps, double r_plus,
                        double r_minus, double b, const MetaParams& meta) {
  const std::size_t d = hyp.dim();
  UpdateReport rep;
  rep.delta_mu.resize(d);
  rep.delta_sigma.resize(d);
  const double diff = r_plus - r_minus;
  const double advantage = 0.5 * (r_plus + r_minus) - b;
  for (std::size_t i = 0; i < d; ++i) {
    const double s = hyp.sigma[i];
    rep.delta_mu[i] = meta.alpha_mu * eps[i] * diff / 2.0;
    rep.delta_sigma[i] = meta.alpha_sigma * advantage * (eps[i] * eps[i] - s * s) / s;
  }
  rep.evaluations_used = 2;
  rep.rewards_seen = {r_plus, r_minus};
  return rep;
}

UpdateReport single_deltas(const Hypothesis& hyp, std::span<const double> theta, double r,
                           double b, const MetaParams& meta) {
  const std::size_t d = hyp.dim();
  UpdateReport rep;
  rep.delta_mu.resize(d);
  rep.delta_sigma.resize(d);
  const double advantage = r - b;
  for (std::size_t i = 0; i < d; ++i) {
    const double s = hyp.sigma[i];
    const double dev = theta[i] - hyp.mu[i];
    rep.delta_mu[i] = meta.alpha_mu * advantage * dev;
    rep.delta_sigma[i] = meta.alpha_sigma * advantage * (dev * dev - s * s) / s;
  }
  rep.evaluations_used = 1;
  rep.rewards_seen = {r};
  return rep;
}

double mean(std::span<const double> xs) {
  double sum = 0.0;
  for (const double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

}  // namespace

std::string_view to_string(Variant variant) noexcept {
  switch (variant) {
    case Variant::pgpe:
      return "PGPE";
    case Variant::sys:
      return "SyS";
    case Variant::supsys:
      return "SupSyS";
    case Variant::pgpe4smp:
      return "PGPE4smp";
    case Variant::supif:
      return "SupIf";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) noexcept {
  for (const Variant v :
       {Variant::pgpe, Variant::sys, Variant::supsys, Variant::pgpe4smp, Variant::supif}) {
    if (name == to_string(v)) return v;
  }
  return std::nullopt;
}

int max_evaluations_per_step(Variant variant) noexcept {
  switch (variant) {
    case Variant::pgpe:
      return 1;
    case Variant::sys:
      return 2;
    case Variant::supsys:
    case Variant::pgpe4smp:
    case Variant::supif:
      return 4;
  }
  return 4;
}

std::string_view to_string(Branch branch) noexcept {
  switch (branch) {
    case Branch::single:
      return "single";
    case Branch::sys:
      return "sys";
    case Branch::supsys:
      return "supsys";
  }
  return "unknown";
}

std::string_view to_string(SupSysSigmaForm form) noexcept {
  return form == SupSysSigmaForm::original ? "original" : "symmetrized";
}

std::optional<SupSysSigmaForm> parse_supsys_sigma_form(std::string_view name) noexcept {
  if (name == "original") return SupSysSigmaForm::original;
  if (name == "symmetrized") return SupSysSigmaForm::symmetrized;
  return std::nullopt;
}

void MetaParams::validate() const {
  if (!(alpha_mu > 0.0)) throw std::invalid_argument("alpha_mu must be positive");
  if (!(alpha_sigma > 0.0)) throw std::invalid_argument("alpha_sigma must be positive");
  if (!(sigma_floor > 0.0)) throw std::invalid_argument("sigma_floor must be positive");
}

Eligibility eligibility(double theta, double mu, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("eligibility: sigma must be positive");
  const double dev = theta - mu;
  const double s2 = sigma * sigma;
  return {dev / s2, (dev * dev - s2) / (s2 * sigma)};
}

double eligibility_sq_norm(const Hypothesis& hyp, std::span<const double> theta) {
  double sum = 0.0;
  for (std::size_t i = 0; i < hyp.dim(); ++i) {
    const auto [gm, gs] = eligibility(theta[i], hyp.mu[i], hyp.sigma[i]);
    sum += gm * gm + gs * gs;
  }
  return sum;
}

double sigma_eligibility_sq_norm(const Hypothesis& hyp, std::span<const double> eps) {
  double sum = 0.0;
  for (std::size_t i = 0; i < hyp.dim(); ++i) {
    const double gs = eligibility(hyp.mu[i] + eps[i], hyp.mu[i], hyp.sigma[i]).grad_sigma;
    sum += gs * gs;
  }
  return sum;
}

UpdateReport pgpe_update(const Hypothesis& hyp, std::span<const double> theta, double r,
                         BaselineState& baseline, const MetaParams& meta) {
  require_same_dim(hyp, theta.size(), "pgpe_update");
  const double elig = eligibility_sq_norm(hyp, theta);
  const double b = baseline.initialized() ? baseline.value() : r;
  UpdateReport rep = single_deltas(hyp, theta, r, b, meta);
  baseline.observe(r, elig);
  return rep;
}

UpdateReport sys_update(const Hypothesis& hyp, const Perturbation& eps, double r_plus,
                        double r_minus, BaselineState& baseline, const MetaParams& meta) {
  require_same_dim(hyp, eps.eps.size(), "sys_update");
  const double signal = 0.5 * (r_plus + r_minus);
  const double elig = sigma_eligibility_sq_norm(hyp, eps.eps);
  const double b = baseline.initialized() ? baseline.value() : signal;
  UpdateReport rep = sys_deltas(hyp, eps.eps, r_plus, r_minus, b, meta);
  baseline.observe(signal, elig);
  return rep;
}

UpdateReport supsys_update(const Hypothesis& hyp, const SampleQuad& quad, const MetaParams& meta) {
  if (!quad.evaluated()) {
    throw std::invalid_argument("supsys_update: all four quad rewards must be set");
  }
  require_same_dim(hyp, quad.eps.size(), "supsys_update");
  require_same_dim(hyp, quad.eps_star.size(), "supsys_update");
  const double r_pp = *quad.r_pp;
  const double r_mp = *quad.r_mp;
  const double r_pm = *quad.r_pm;
  const double r_mm = *quad.r_mm;
  const double diff_orig = r_pp - r_mp;
  const double diff_mirr = r_pm - r_mm;
  const double pair_gap = 0.5 * (r_pp + r_mp) - 0.5 * (r_pm + r_mm);

  const std::size_t d = hyp.dim();
  UpdateReport rep;
  rep.delta_mu.resize(d);
  rep.delta_sigma.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double s = hyp.sigma[i];
    const double e = quad.eps[i];
    rep.delta_mu[i] = meta.alpha_mu * (e * diff_orig + quad.eps_star[i] * diff_mirr) / 2.0;
    const double elig = meta.supsys_sigma == SupSysSigmaForm::original
                            ? (e * e - s * s) / s
                            : (e * e - quad.eps_star[i] * quad.eps_star[i]) / (2.0 * s);
    rep.delta_sigma[i] = meta.alpha_sigma * elig * pair_gap / 2.0;
  }
  rep.evaluations_used = 4;
  rep.rewards_seen = {r_pp, r_mp, r_pm, r_mm};
  return rep;
}

UpdateReport pgpe4smp_update(const Hypothesis& hyp, const SymmetricPair& first,
                             const SymmetricPair& second, BaselineState& baseline,
                             const MetaParams& meta) {
  require_same_dim(hyp, first.eps.eps.size(), "pgpe4smp_update");
  require_same_dim(hyp, second.eps.eps.size(), "pgpe4smp_update");
  const double signal = 0.25 * (first.r_plus + first.r_minus + second.r_plus + second.r_minus);
  const double elig = 0.5 * (sigma_eligibility_sq_norm(hyp, first.eps.eps) +
                             sigma_eligibility_sq_norm(hyp, second.eps.eps));
  const double b = baseline.initialized() ? baseline.value() : signal;
  const UpdateReport a = sys_deltas(hyp, first.eps.eps, first.r_plus, first.r_minus, b, meta);
  const UpdateReport c = sys_deltas(hyp, second.eps.eps, second.r_plus, second.r_minus, b, meta);
  baseline.observe(signal, elig);

  UpdateReport rep;
  rep.delta_mu.resize(hyp.dim());
  rep.delta_sigma.resize(hyp.dim());
  for (std::size_t i = 0; i < hyp.dim(); ++i) {
    rep.delta_mu[i] = (a.delta_mu[i] + c.delta_mu[i]) / 2.0;
    rep.delta_sigma[i] = (a.delta_sigma[i] + c.delta_sigma[i]) / 2.0;
  }
  rep.evaluations_used = 4;
  rep.rewards_seen = {first.r_plus, first.r_minus, second.r_plus, second.r_minus};
  return rep;
}

UpdateReport supif_step(const Hypothesis& hyp, Rng& rng, const RewardFn& reward,
                        BaselineState& baseline, const MetaParams& meta) {
  Perturbation p = draw_perturbation(rng, hyp);
  const Vector theta_plus = offset(hyp.mu, p.eps, +1.0);
  const double r1 = reward(theta_plus);

  if (!baseline.initialized()) {
    baseline.observe(r1, eligibility_sq_norm(hyp, theta_plus));
    UpdateReport rep;
    rep.delta_mu.assign(hyp.dim(), 0.0);
    rep.delta_sigma.assign(hyp.dim(), 0.0);
    rep.evaluations_used = 1;
    rep.rewards_seen = {r1};
    rep.branch = Branch::single;
    return rep;
  }

  const double b = baseline.value();
  if (r1 > b) {
    UpdateReport rep = single_deltas(hyp, theta_plus, r1, b, meta);
    baseline.observe(r1, eligibility_sq_norm(hyp, theta_plus));
    rep.branch = Branch::single;
    return rep;
  }

  const double r2 = reward(offset(hyp.mu, p.eps, -1.0));
  if (0.5 * (r1 + r2) > b) {
    UpdateReport rep = sys_deltas(hyp, p.eps, r1, r2, b, meta);
    baseline.observe(0.5 * (r1 + r2), sigma_eligibility_sq_norm(hyp, p.eps));
    rep.branch = Branch::sys;
    return rep;
  }

  const double elig = sigma_eligibility_sq_norm(hyp, p.eps);
  SampleQuad quad = make_quad(hyp, std::move(p));
  quad.r_pp = r1;
  quad.r_mp = r2;
  quad.r_pm = reward(quad.theta_pm);
  quad.r_mm = reward(quad.theta_mm);
  UpdateReport rep = supsys_update(hyp, quad, meta);
  baseline.observe(mean(rep.rewards_seen), elig);
  rep.branch = Branch::supsys;
  return rep;
}

Hypothesis apply_update(const Hypothesis& hyp, const UpdateReport& report, const MetaParams& meta) {
  require_same_dim(hyp, report.delta_mu.size(), "apply_update");
  require_same_dim(hyp, report.delta_sigma.size(), "apply_update");
  Hypothesis next = hyp;
  for (std::size_t i = 0; i < hyp.dim(); ++i) {
    next.mu[i] += report.delta_mu[i];
    // fmax drops a NaN operand, so the floor holds even after a diverged step.
    next.sigma[i] = std::fmax(hyp.sigma[i] + report.delta_sigma[i], meta.sigma_floor);
  }
  return next;
}

UpdateReport variant_step(const Hypothesis& hyp, Rng& rng, const RewardFn& reward,
                          BaselineState& baseline, const MetaParams& meta) {
  switch (meta.variant) {
    case Variant::pgpe: {
      const Perturbation p = draw_perturbation(rng, hyp);
      const Vector theta = offset(hyp.mu, p.eps, +1.0);
      return pgpe_update(hyp, theta, reward(theta), baseline, meta);
    }
    case Variant::sys: {
      const Perturbation p = draw_perturbation(rng, hyp);
      const double r_plus = reward(offset(hyp.mu, p.eps, +1.0));
      const double r_minus = reward(offset(hyp.mu, p.eps, -1.0));
      return sys_update(hyp, p, r_plus, r_minus, baseline, meta);
    }
    case Variant::supsys: {
      SampleQuad q = make_quad(rng, hyp);
      q.r_pp = reward(q.theta_pp);
      q.r_mp = reward(q.theta_mp);
      q.r_pm = reward(q.theta_pm);
      q.r_mm = reward(q.theta_mm);
      return supsys_update(hyp, q, meta);
    }
    case Variant::pgpe4smp: {
      SymmetricPair first{draw_perturbation(rng, hyp), 0.0, 0.0};
      SymmetricPair second{draw_perturbation(rng, hyp), 0.0, 0.0};
      first.r_plus = reward(offset(hyp.mu, first.eps.eps, +1.0));
      first.r_minus = reward(offset(hyp.mu, first.eps.eps, -1.0));
      second.r_plus = reward(offset(hyp.mu, second.eps.eps, +1.0));
      second.r_minus = reward(offset(hyp.mu, second.eps.eps, -1.0));
      return pgpe4smp_update(hyp, first, second, baseline, meta);
    }
    case Variant::supif:
      return supif_step(hyp, rng, reward, baseline, meta);
  }
  throw std::logic_error("variant_step: unhandled variant");
}

}  // namespace pgpe
