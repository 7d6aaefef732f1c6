#pragma once
// Closed-form limit constants.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "erw/model.hpp"
#include "erw/walkers.hpp"

namespace erw {

using Mat2 = std::array<std::array<double, 2>, 2>;

/// Covariance of a pair of d-vectors stored as base (x) I_d / d.
struct BlockCovariance {
  Mat2 base{};
  std::size_t d = 1;

  /// Entry (i, j) of the full 2d x 2d matrix; block index i / d, coordinate
  /// i % d.
  double full(std::size_t i, std::size_t j) const;
  /// Smallest eigenvalue of the base.
  double min_eigenvalue() const;
  bool symmetric() const { return base[0][1] == base[1][0]; }
};

/// Limit covariance of (S_n, T_n) under the regime normalization. Throws at
/// rho = 1/2; use cov_TS_critical there.
BlockCovariance cov_TS(double rho, double mu_Z, double sigma_Z, std::size_t d);
BlockCovariance cov_TS_critical(double mu_Z, std::size_t d);

/// Limit covariance of (T_n, C_n) / sqrt(n); in the superdiffusive regime T
/// is centred by mu_Z n^rho xi. Throws at rho = 1/2.
BlockCovariance cov_TC(double rho, double mu_Z, double sigma_Z, std::size_t d);
BlockCovariance cov_TC_critical(double mu_Z, std::size_t d);

struct LilConstants {
  double lil_T;
  double lil_C;
  Regime regime;
};

/// limsup constants for ||T_n|| and ||C_n||. The critical branch is taken
/// when rho is within 1e-12 of 1/2.
LilConstants lil_constants(double rho, double mu_Z, double sigma_Z,
                           std::size_t d);

/// J_nu(x) by the ascending series in extended precision.
double bessel_j(double nu, double x);

/// Smallest positive zero of J_nu for nu in [-1/2, 20], to 1e-12.
double bessel_smallest_zero(double nu);

struct ChungConstants {
  double nu;
  double j_nu;
  double kappa_lo;
  double kappa_hi;
  double EZ2;
  double chung_T;
  double chung_C_lo;
  double chung_C_hi;
  bool kappa_is_interval;
};

/// Without a kappa estimate the proven bracket is used: [3/8, (2 pi)^{2/3}
/// 3/8] for d = 1, with the upper end multiplied by d^{4/3} for d >= 2.
ChungConstants chung_constants(std::size_t d, double EZ2,
                               std::optional<double> kappa = std::nullopt);

/// prod_{i=m}^{n} (1 + rho_{i+1} / i); equals 1 when n = m - 1. Switches to
/// log-space summation for n > 1e4.
double gamma_product(std::uint64_t m, std::uint64_t n,
                     const MemorySchedule& schedule, std::size_t d);
double gamma_product_direct(std::uint64_t m, std::uint64_t n,
                            const MemorySchedule& schedule, std::size_t d);
double gamma_product_log(std::uint64_t m, std::uint64_t n,
                         const MemorySchedule& schedule, std::size_t d);

/// lim gamma_{2,n-1} / n^rho for a constant schedule, 1 / Gamma(2 + rho).
double gamma_product_limit_constant(double rho);

/// Per-coordinate E[xi_k^2] = 1 / (d (2 rho - 1) Gamma(2 rho)). E[xi] = 0.
double xi_second_moment(double rho, std::size_t d);

struct TruncatedConstant {
  double value;
  double truncation_error;
  std::uint64_t terms;
};

/// Trace constant C = E||xi||^2 for a general schedule, from the exact
/// recursion e_{n+1} = (1 + 2 rho_{n+1} / n) e_n + 1, e_1 = 1, as
/// (e_N - N / (1 - 2 rho)) / N^{2 rho}. The error is |C(N) - C(N/2)|.
TruncatedConstant xi_trace_constant(const MemorySchedule& schedule,
                                    std::size_t d, std::uint64_t N);

/// Rate n^{1/2 - rho} + |sum_{i >= n} (rho_i - rho) / i|, the tail summed
/// numerically up to a cutoff.
double xi_rate(std::uint64_t n, const MemorySchedule& schedule, std::size_t d);

/// E W_1 for the urn.
double rpw_first_mean(const RpwConfig& c);
/// E W_n from the product formula (recursion when q_A + q_B = 0).
double rpw_mean(std::uint64_t n, const RpwConfig& c);
/// E W_0 .. E W_N by the conditional-mean recursion.
std::vector<double> rpw_mean_series(std::uint64_t N, const RpwConfig& c);

struct RpwClt {
  Regime regime;
  std::optional<double> variance;  // absent in the superdiffusive regime
};

/// Limit variance of (W_n - n v) / sqrt(n), or / sqrt(n log n) at
/// p_A + p_B = 3/2.
RpwClt rpw_clt_variance(double pA, double pB);

}  // namespace erw
