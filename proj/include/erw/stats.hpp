#pragma once
// Estimators and verification statistics.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "erw/model.hpp"
#include "erw/rng.hpp"
#include "erw/walkers.hpp"

namespace erw {

/// Streaming mean and centred second-moment matrix (Welford updates, Chan
/// merges).
class MomentAccumulator {
 public:
  explicit MomentAccumulator(std::size_t dim = 1);

  void add(std::span<const double> x);
  void add(double x) { add(std::span<const double>(&x, 1)); }
  void merge(const MomentAccumulator& other);

  std::size_t dim() const { return dim_; }
  std::uint64_t count() const { return n_; }
  const std::vector<double>& mean() const { return mean_; }

  struct Moments {
    std::vector<double> mean;
    std::vector<double> cov;  // dim x dim row-major, divided by count - 1
  };
  /// Throws ModelError when count < 2.
  Moments finalize() const;

 private:
  std::size_t dim_;
  std::uint64_t n_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
  std::vector<double> scratch_;
};

/// Standard normal CDF.
double normal_cdf(double x);

struct KsResult {
  double D;
  double p_value;
};

/// One-sample Kolmogorov-Smirnov test against N(0, variance); the p-value
/// is the asymptotic Kolmogorov tail at sqrt(n) D.
KsResult ks_normal(std::span<const double> samples, double variance);

/// Kolmogorov tail probability P(K > lambda).
double kolmogorov_tail(double lambda);

/// Adds independent U(-h, h) noise, turning a lattice of spacing 2h into a
/// continuous law with the same limit.
void lattice_jitter(std::span<double> values, double half_width, Engine& e);

enum class XiNormalization { n_pow_rho, gamma_product };

struct XiEstimate {
  std::uint64_t n;
  std::size_t d;
  std::vector<double> samples;       // per path, d per path
  std::vector<double> mean;          // per coordinate
  std::vector<double> mean_se;       // standard error of the mean
  std::vector<double> second_moment;
  std::vector<double> second_moment_se;
  double C0;        // lim gamma_{2,n-1} / n^rho used to rescale eta_n
  double gamma_2n;  // gamma_{2,n-1}
  double rate;      // n^{1/2 - rho} + |tail of (rho_i - rho) / i|
};

/// xi estimates from checkpoint `cp` of a batch. With gamma_product the
/// estimate is C0 S_n / gamma_{2,n-1}; with n_pow_rho it is S_n / n^rho.
/// When use_T is set, T_n replaces S_n (its limit is mu_Z xi). Throws for
/// non-superdiffusive schedules.
XiEstimate estimate_xi(const WalkBatch& batch, std::size_t cp,
                       const MemorySchedule& schedule, XiNormalization norm,
                       bool use_T = false);

struct AsCltResult {
  double value;             // (1 / log n) sum_k f(x_k) / k
  double harmonic_value;    // same sum divided by the harmonic weight total
  double weight_total;      // sum of the weights
  std::uint64_t n;
  std::uint64_t substituted;  // times evaluated at a nearby checkpoint
  bool critical;
};

/// Logarithmic average of f((T_k, C_k) / sqrt(k)) along one path, k = 1..n.
/// The critical variant uses weights 1 / (k log k), normalization
/// sqrt(k log k) and divides by log log n, summing over k >= 3. Times
/// without a checkpoint use the latest earlier checkpoint.
AsCltResult as_clt_log_average(
    const WalkPath& path,
    const std::function<double(std::span<const double>)>& f,
    bool critical = false);

/// f(x) = cos(<x, u>).
std::function<double(std::span<const double>)> cosine_test_function(
    std::vector<double> u);
/// f(x) = clamp(x_i, -bound, bound).
std::function<double(std::span<const double>)> clamped_coordinate(
    std::size_t i, double bound);

enum class LilQuantity { S, T, C };

struct LilTrack {
  std::vector<double> per_path_max;  // max_k ||x_k|| / (a_k constant)
  double median_ratio;
  double mean_ratio;
  double max_ratio;
  std::size_t checkpoints_used;
  bool flag_high;  // median above 1.5
  bool flag_low;   // median below 0.3
};

/// Running maxima of ||x_n|| / (constant a_n) over checkpoints n >= 100,
/// with a_n = sqrt(2 n log log n) or, when critical, sqrt(2 n log n log log
/// log n). `centre` (optional, per path and coordinate) is multiplied by
/// n^rho and subtracted, for the superdiffusive T - mu_Z n^rho xi.
LilTrack lil_track(const WalkBatch& batch, LilQuantity q, double constant,
                   bool critical,
                   std::optional<std::span<const double>> centre = std::nullopt,
                   double rho = 0.0);

}  // namespace erw
