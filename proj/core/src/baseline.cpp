#include "pgpe/baseline.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace pgpe {

std::string_view to_string(BaselineKind kind) noexcept {
  switch (kind) {
    case BaselineKind::decaying:
      return "decaying";
    case BaselineKind::moving:
      return "moving";
    case BaselineKind::optimal:
      return "optimal";
  }
  return "unknown";
}

BaselineKind parse_baseline_kind(std::string_view name) {
  if (name == "decaying") return BaselineKind::decaying;
  if (name == "moving") return BaselineKind::moving;
  if (name == "optimal") return BaselineKind::optimal;
  throw std::invalid_argument("unknown baseline kind '" + std::string(name) + "'");
}

void BaselineConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("baseline gamma must lie in (0, 1]");
  }
  if (window == 0) throw std::invalid_argument("baseline window must be at least 1");
}

BaselineState::BaselineState(BaselineConfig config) : config_(config) { config_.validate(); }

BaselineState::BaselineState(BaselineConfig config, double initial_value)
    : config_(config), value_(initial_value) {
  config_.validate();
}

double BaselineState::value() const {
  if (!value_) throw std::logic_error("baseline read before it was initialized");
  return *value_;
}

void BaselineState::observe(double reward, double eligibility_sq_norm) {
  reward_sum_ += reward;
  ++reward_count_;
  switch (config_.kind) {
    case BaselineKind::decaying:
      value_ = value_ ? config_.gamma * reward + (1.0 - config_.gamma) * *value_ : reward;
      break;
    case BaselineKind::moving:
      history_.push_back(reward);
      while (history_.size() > config_.window) history_.pop_front();
      value_ = std::accumulate(history_.begin(), history_.end(), 0.0) /
               static_cast<double>(history_.size());
      break;
    case BaselineKind::optimal:
      accum_num_ += reward * eligibility_sq_norm;
      accum_den_ += eligibility_sq_norm;
      if (accum_den_ > 0.0) {
        value_ = accum_num_ / accum_den_;
        fell_back_ = false;
      } else {
        value_ = reward_sum_ / static_cast<double>(reward_count_);
        fell_back_ = true;
      }
      break;
  }
}

BaselineState baseline_step(BaselineState state, double reward, double eligibility_sq_norm) {
  state.observe(reward, eligibility_sq_norm);
  return state;
}

}  // namespace pgpe
