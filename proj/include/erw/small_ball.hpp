#pragma once
// Monte Carlo small-ball probabilities P(sup_{t <= 1} ||X_t|| < eps) and the
// fit of their exponential rate.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace erw {

enum class SbProcess { BM, I, integrated_BM, integrated_I };

std::string to_string(SbProcess p);

struct SmallBallSpec {
  SbProcess process = SbProcess::BM;
  double rho1 = 0.0, rho2 = 0.0;
  double sigma1 = 1.0, sigma2 = 0.0;
  std::size_t d = 1;
  std::size_t grid = 4096;  // points on (0, 1]
  /// Weight t^{-alpha} applied to integrated processes.
  double alpha = 0.0;
  /// Brownian-bridge correction between grid points (d = 1, non-integrated).
  bool bridge = false;

  void validate() const;
};

struct SmallBallPoint {
  double eps = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;         // grid sup below eps
  std::uint64_t coarse_hits = 0;  // same paths, every other grid point
  double prob = 0.0;
  double log_prob = 0.0;
  /// Standard error of log_prob; infinite when there are no hits.
  double se_log = 0.0;
  /// Set when no path stayed inside; log_prob then holds log(3 / trials).
  bool upper_bound = false;
  std::size_t grid = 0;
  bool bridge = false;
};

/// Single-epsilon estimate.
SmallBallPoint small_ball_log_prob(const SmallBallSpec& spec, double eps,
                                   std::uint64_t trials, std::uint64_t seed,
                                   unsigned workers);

/// Estimates for several eps from shared paths: each trial's supremum is
/// compared against every eps, and a path is abandoned once it leaves the
/// largest ball.
std::vector<SmallBallPoint> small_ball_curve(const SmallBallSpec& spec,
                                             std::span<const double> eps,
                                             std::uint64_t trials,
                                             std::uint64_t seed,
                                             unsigned workers);

/// P(sup_{t <= 1} |B_t| < eps) for standard Brownian motion, by the
/// eigenfunction series (4/pi) sum (-1)^k / (2k+1) exp(-(2k+1)^2 pi^2 / (8
/// eps^2)).
double bm_small_ball_series(double eps);

struct SmallBallFit {
  double constant = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // weighted RMS of the fit residuals
  std::size_t points_used = 0;
  bool narrow_design_warning = false;  // eps span below a factor of 2
};

/// Weighted least squares of log P on -eps^{-exponent} (plus an intercept
/// when requested). Weights are 1 / se_log^2; points with zero standard
/// error are weighted equally, and upper-bound points are dropped. Throws
/// when fewer than three usable points remain or the design is singular.
SmallBallFit fit_small_ball_constant(std::span<const SmallBallPoint> points,
                                     double exponent, bool intercept = true);

}  // namespace erw
