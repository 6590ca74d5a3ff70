#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <string_view>

namespace pgpe {

enum class BaselineKind { decaying, moving, optimal };

[[nodiscard]] std::string_view to_string(BaselineKind kind) noexcept;
[[nodiscard]] BaselineKind parse_baseline_kind(std::string_view name);

struct BaselineConfig {
  BaselineKind kind = BaselineKind::decaying;
  double gamma = 0.1;       ///< decaying rate, in (0, 1]
  std::size_t window = 10;  ///< moving-average length m

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;

  bool operator==(const BaselineConfig&) const = default;
};

/// Reference reward subtracted from sampled rewards.
///
///   decaying: b <- gamma * r + (1 - gamma) * b
///   moving:   b <- mean of the last `window` rewards
///   optimal:  b <- sum(r * |g|^2) / sum(|g|^2), g the log-density gradient
///
/// An uninitialized baseline takes the first observed reward as its value.
/// The optimal kind falls back to the plain running mean of all rewards while
/// the accumulated |g|^2 is zero, and reports that through `fell_back()`.
class BaselineState {
 public:
  BaselineState() = default;
  explicit BaselineState(BaselineConfig config);
  /// Starts from a fixed value b instead of waiting for the first reward.
  BaselineState(BaselineConfig config, double initial_value);

  [[nodiscard]] const BaselineConfig& config() const noexcept { return config_; }
  [[nodiscard]] bool initialized() const noexcept { return value_.has_value(); }
  /// Throws std::logic_error if not initialized.
  [[nodiscard]] double value() const;
  [[nodiscard]] bool fell_back() const noexcept { return fell_back_; }
  [[nodiscard]] std::size_t history_size() const noexcept { return history_.size(); }

  /// Folds one reward in. `eligibility_sq_norm` is only read by the optimal kind.
  void observe(double reward, double eligibility_sq_norm = 0.0);

 private:
  BaselineConfig config_{};
  std::optional<double> value_;
  std::deque<double> history_;
  double accum_num_ = 0.0;
  double accum_den_ = 0.0;
  double reward_sum_ = 0.0;
  std::size_t reward_count_ = 0;
  bool fell_back_ = false;
};

/// Value-semantics form of BaselineState::observe.
[[nodiscard]] BaselineState baseline_step(BaselineState state, double reward,
                                          double eligibility_sq_norm);

}  // namespace pgpe
