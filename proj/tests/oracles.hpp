#pragma once
// Reference computations that share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

inline double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// P(sup_{t <= 1} |B_t| < a) by the method of images:
/// sum_k (-1)^k [Phi((2k+1)a) - Phi((2k-1)a)].
inline double bm_small_ball_images(double a) {
  double s = 0.0;
  for (int k = -60; k <= 60; ++k) {
    const double term = Phi((2 * k + 1) * a) - Phi((2 * k - 1) * a);
    s += (k % 2 == 0 ? 1.0 : -1.0) * term;
  }
  return s;
}

/// Exact law of S_n for the one-dimensional walk with memory p, first step
/// +1 with probability q: P(X_{n+1} = +1 | S_n = s) = (1 + (2p - 1) s / n) / 2.
/// Returns a map s -> probability.
inline std::map<long, double> erw_law(int n, double p, double q = 0.5) {
  std::map<long, double> law{{1, q}, {-1, 1.0 - q}};
  for (int k = 1; k < n; ++k) {
    std::map<long, double> next;
    for (const auto& [s, pr] : law) {
      const double up = 0.5 * (1.0 + (2.0 * p - 1.0) * static_cast<double>(s) / k);
      next[s + 1] += pr * up;
      next[s - 1] += pr * (1.0 - up);
    }
    law = std::move(next);
  }
  return law;
}

inline double moment(const std::map<long, double>& law, int power) {
  double m = 0.0;
  for (const auto& [s, pr] : law) m += pr * std::pow(static_cast<double>(s), power);
  return m;
}

/// Exact law of the white-ball count of the play-the-winner urn after n
/// draws, by dynamic programming over the ball counts.
inline std::map<long, double> urn_law(int n, double pA, double pB, long W0,
                                      long B0, double p0 = 1.0) {
  std::map<long, double> law{{W0, 1.0}};
  for (int k = 0; k < n; ++k) {
    const long total = W0 + B0 + k;
    std::map<long, double> next;
    for (const auto& [w, pr] : law) {
      const double white = total == 0 ? p0 : static_cast<double>(w) / total;
      const double add_white = white * pA + (1.0 - white) * (1.0 - pB);
      next[w + 1] += pr * add_white;
      next[w] += pr * (1.0 - add_white);
    }
    law = std::move(next);
  }
  return law;
}

/// prod_{i=m}^{n} (1 + rho / i) via log-Gamma.
inline double gamma_ratio(std::uint64_t m, std::uint64_t n, double rho) {
  const double a = static_cast<double>(n) + 1.0, b = static_cast<double>(m);
  return std::exp(std::lgamma(a + rho) - std::lgamma(a) + std::lgamma(b) -
                  std::lgamma(b + rho));
}

/// Kolmogorov-Smirnov statistic by brute force over all jump points.
inline double ks_brute(std::vector<double> x, double variance) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double D = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = Phi(x[i] / std::sqrt(variance));
    D = std::max(D, std::abs(static_cast<double>(i + 1) / n - F));
    D = std::max(D, std::abs(static_cast<double>(i) / n - F));
  }
  return D;
}

}  // namespace oracle
