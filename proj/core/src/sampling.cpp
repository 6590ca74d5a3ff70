#include "pgpe/sampling.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace pgpe {

namespace {

// (t^3 - t) / log t for t > 0, with the limits at t -> 0 and t = 1.
double log_ratio(double t) {
  if (t == 0.0) return 0.0;
  if (t == 1.0) return 2.0;
  return t * (t - 1.0) * (t + 1.0) / std::log(t);
}

}  // namespace

void Hypothesis::validate() const {
  if (mu.empty()) throw std::invalid_argument("hypothesis dimension must be at least 1");
  if (mu.size() != sigma.size()) {
    throw std::invalid_argument("hypothesis mu and sigma lengths differ (" +
                                std::to_string(mu.size()) + " vs " +
                                std::to_string(sigma.size()) + ")");
  }
  for (const double s : sigma) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("hypothesis sigma must be finite and non-negative");
    }
  }
}

Hypothesis Hypothesis::isotropic(Vector mu, double sigma0) {
  Hypothesis h;
  h.sigma.assign(mu.size(), sigma0);
  h.mu = std::move(mu);
  h.validate();
  return h;
}

double median_from_std(double sigma) {
  if (sigma < 0.0) throw std::domain_error("median_from_std: negative standard deviation");
  return kMedianDeviationRatio * sigma;
}

double std_from_median(double phi) {
  if (phi < 0.0) throw std::domain_error("std_from_median: negative median deviation");
  return phi / kMedianDeviationRatio;
}

Perturbation draw_perturbation(Rng& rng, const Hypothesis& hypothesis) {
  Perturbation p;
  p.eps.resize(hypothesis.dim());
  for (std::size_t i = 0; i < p.eps.size(); ++i) {
    p.eps[i] = hypothesis.sigma[i] * rng.gaussian();
  }
  return p;
}

double mirror(double eps, double phi) {
  if (!(phi > 0.0)) throw std::domain_error("mirror: median deviation must be positive");
  const double sign = eps < 0.0 ? -1.0 : 1.0;
  const double magnitude = std::max(std::abs(eps), kMirrorMinRatio * phi);
  const double a = (phi - magnitude) / phi;

  double factor = 0.0;
  if (a > 0.0) {
    factor = std::exp(a) / std::pow(1.0 - a * a * a, kMirrorC3 * a);
  } else {
    const double t = -a;
    factor = std::exp(kMirrorC1 * log_ratio(t) + kMirrorC2 * t);
  }
  return sign * phi * factor;
}

Vector offset(std::span<const double> mu, std::span<const double> eps, double sign) {
  Vector out(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) out[i] = mu[i] + sign * eps[i];
  return out;
}

SampleQuad make_quad(const Hypothesis& hypothesis, Perturbation perturbation) {
  if (perturbation.eps.size() != hypothesis.dim()) {
    throw std::invalid_argument("make_quad: perturbation length does not match hypothesis");
  }
  SampleQuad q;
  q.eps = std::move(perturbation.eps);
  q.eps_star.resize(q.eps.size());
  for (std::size_t i = 0; i < q.eps.size(); ++i) {
    const double phi = median_from_std(hypothesis.sigma[i]);
    if (phi > 0.0) {
      q.eps_star[i] = mirror(q.eps[i], phi);
    } else {
      q.eps[i] = 0.0;
      q.eps_star[i] = 0.0;
    }
  }
  q.theta_pp = offset(hypothesis.mu, q.eps, +1.0);
  q.theta_mp = offset(hypothesis.mu, q.eps, -1.0);
  q.theta_pm = offset(hypothesis.mu, q.eps_star, +1.0);
  q.theta_mm = offset(hypothesis.mu, q.eps_star, -1.0);
  return q;
}

SampleQuad make_quad(Rng& rng, const Hypothesis& hypothesis) {
  return make_quad(hypothesis, draw_perturbation(rng, hypothesis));
}

}  // namespace pgpe
