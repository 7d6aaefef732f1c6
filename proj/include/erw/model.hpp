#pragma once
// Domain types shared by every module: memory schedules, step-size laws,
// walk configuration and regime arithmetic.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "erw/rng.hpp"

namespace erw {

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Drift coefficient of the conditional step mean, (2dp - 1) / (2d - 1).
double rho_from_p(double p, std::size_t d);

/// Memory parameter separating the diffusive and superdiffusive regimes,
/// (2d + 1) / (4d).
double critical_p(std::size_t d);

struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / den; }
};

/// Per-step memory parameters p_i (i >= 2 matters; the first step is
/// uniform) together with their limit p.
class MemorySchedule {
 public:
  struct Constant {
    double p;
    std::optional<Ratio> exact;
  };
  struct Tabulated {
    std::vector<double> values;  // values[i - 1] = p_i
    double limit;
  };
  struct Rule {
    std::function<double(std::uint64_t)> fn;
    double limit;
    double decay;  // nominal epsilon_0 in |avg - p| = O(n^-decay)
  };

  static MemorySchedule constant(double p);
  static MemorySchedule constant(Ratio p);
  /// Entries past the end of the table fall back to the limit.
  static MemorySchedule tabulated(std::vector<double> values, double limit);
  static MemorySchedule rule(std::function<double(std::uint64_t)> fn,
                             double limit, double decay);

  double p_at(std::uint64_t i) const;
  double limit() const;
  bool is_constant() const;
  std::optional<Ratio> exact_limit() const;
  double rho_at(std::uint64_t i, std::size_t d) const {
    return rho_from_p(p_at(i), d);
  }
  double rho(std::size_t d) const { return rho_from_p(limit(), d); }

  /// |(1/n) sum_{i<=n} p_i - p| at log-spaced n up to `horizon`, plus the
  /// fitted power-law decay exponent (NaN when the deviation is zero).
  struct AverageDecay {
    std::vector<std::uint64_t> n;
    std::vector<double> deviation;
    double fitted_exponent;
  };
  AverageDecay average_decay(std::uint64_t horizon) const;

  std::string describe() const;

 private:
  std::variant<Constant, Tabulated, Rule> kind_;
  explicit MemorySchedule(std::variant<Constant, Tabulated, Rule> k)
      : kind_(std::move(k)) {}
};

/// Law of the i.i.d. step sizes Z_i.
class StepSizeModel {
 public:
  struct Constant {
    double c;
  };
  struct TwoPoint {
    double a, b, q;  // Z = a with probability q, b otherwise
  };
  struct Gaussian {
    double mean, variance;
  };
  struct Uniform {
    double a, b;
  };

  static StepSizeModel constant(double c);
  static StepSizeModel two_point(double a, double b, double q);
  static StepSizeModel gaussian(double mean, double variance);
  static StepSizeModel uniform(double a, double b);
  /// Parses "constant:1", "two-point:0,2,0.5", "gaussian:1,0.25",
  /// "uniform:0,2".
  static StepSizeModel parse(const std::string& text);

  double mean() const { return mean_; }
  double variance() const { return variance_; }
  double second_moment() const { return variance_ + mean_ * mean_; }
  /// All supported laws have moments of every order.
  bool has_higher_moment() const { return true; }
  bool is_constant() const {
    return std::holds_alternative<Constant>(law_);
  }

  /// Constant laws consume no draws.
  double sample(Engine& e) const;

  std::string describe() const;

 private:
  std::variant<Constant, TwoPoint, Gaussian, Uniform> law_;
  double mean_ = 0.0;
  double variance_ = 0.0;
  explicit StepSizeModel(std::variant<Constant, TwoPoint, Gaussian, Uniform> law);
};

struct WalkConfig {
  std::size_t d = 1;
  MemorySchedule schedule = MemorySchedule::constant(0.5);
  StepSizeModel steps = StepSizeModel::constant(1.0);
  std::uint64_t horizon = 0;
  std::vector<std::uint64_t> checkpoints;
  std::uint64_t seed = 0;
  std::uint64_t replicates = 1;
  /// d = 1 only: when set, the first step is +1 with this probability
  /// instead of uniform over the two directions.
  std::optional<double> first_step_plus;

  /// Throws ModelError describing the first violated invariant.
  void validate() const;
};

/// Log-spaced checkpoints floor(n^{k/K}), k = 0..K, deduplicated.
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t horizon,
                                                 std::size_t per_decade = 10);

enum class Regime { diffusive, critical, superdiffusive };
enum class Normalization { sqrt_n, sqrt_n_log_n, n_pow_rho };

std::string to_string(Regime r);
std::string to_string(Normalization n);

struct RegimeReport {
  double rho;
  Regime regime;
  double critical_p;
  Normalization normalization;
};

/// Classification uses the limit p. A rational limit is tested exactly;
/// otherwise |rho - 1/2| <= 1e-12 counts as critical.
RegimeReport regime_classify(const MemorySchedule& schedule, std::size_t d);

}  // namespace erw
