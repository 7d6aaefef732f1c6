#include "erw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "erw/theory.hpp"

namespace erw {

MomentAccumulator::MomentAccumulator(std::size_t dim)
    : dim_(dim), mean_(dim, 0.0), m2_(dim * dim, 0.0), scratch_(dim, 0.0) {
  if (dim == 0) throw ModelError("accumulator dimension must be >= 1");
}

void MomentAccumulator::add(std::span<const double> x) {
  if (x.size() != dim_) throw ModelError("sample has the wrong dimension");
  ++n_;
  const double inv = 1.0 / static_cast<double>(n_);
  std::vector<double>& dl = scratch_;
  for (std::size_t i = 0; i < dim_; ++i) {
    dl[i] = x[i] - mean_[i];
    mean_[i] += dl[i] * inv;
  }
  for (std::size_t i = 0; i < dim_; ++i) {
    const double after = x[i] - mean_[i];
    for (std::size_t j = 0; j < dim_; ++j) m2_[j * dim_ + i] += dl[j] * after;
  }
}

void MomentAccumulator::merge(const MomentAccumulator& o) {
  if (o.dim_ != dim_) throw ModelError("cannot merge accumulators of different dimension");
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double n = na + nb;
  std::vector<double> delta(dim_);
  for (std::size_t i = 0; i < dim_; ++i) delta[i] = o.mean_[i] - mean_[i];
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j)
      m2_[i * dim_ + j] += o.m2_[i * dim_ + j] + delta[i] * delta[j] * na * nb / n;
  for (std::size_t i = 0; i < dim_; ++i) mean_[i] += delta[i] * nb / n;
  n_ += o.n_;
}

MomentAccumulator::Moments MomentAccumulator::finalize() const {
  if (n_ < 2) throw ModelError("finalize needs at least two samples");
  Moments m;
  m.mean = mean_;
  m.cov = m2_;
  const double inv = 1.0 / static_cast<double>(n_ - 1);
  for (double& v : m.cov) v *= inv;
  return m;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.3) {
    // Dual series, accurate for small arguments.
    const double c = std::sqrt(2.0 * std::numbers::pi) / lambda;
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double a = (2 * k - 1) * std::numbers::pi / lambda;
      s += std::exp(-a * a / 8.0);
    }
    return std::clamp(1.0 - c * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_normal(std::span<const double> samples, double variance) {
  if (samples.empty()) throw ModelError("KS test needs samples");
  if (!(variance > 0.0)) throw ModelError("KS test needs variance > 0");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double sd = std::sqrt(variance);
  const double n = static_cast<double>(x.size());
  double D = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = normal_cdf(x[i] / sd);
    D = std::max({D, (static_cast<double>(i) + 1.0) / n - F,
                  F - static_cast<double>(i) / n});
  }
  return {D, kolmogorov_tail(std::sqrt(n) * D)};
}

void lattice_jitter(std::span<double> values, double half_width, Engine& e) {
  for (double& v : values) v += half_width * (2.0 * uniform01(e) - 1.0);
}

XiEstimate estimate_xi(const WalkBatch& b, std::size_t cp,
                       const MemorySchedule& schedule, XiNormalization norm,
                       bool use_T) {
  const RegimeReport rr = regime_classify(schedule, b.d);
  if (rr.regime != Regime::superdiffusive)
    throw ModelError("xi estimation needs the superdiffusive regime, got " +
                     to_string(rr.regime));
  if (cp >= b.checkpoints.size()) throw ModelError("checkpoint index out of range");
  const std::uint64_t n = b.checkpoints[cp];
  if (n < 2) throw ModelError("xi estimation needs n >= 2");
  const double rho = rr.rho;
  XiEstimate out;
  out.n = n;
  out.d = b.d;
  out.gamma_2n = gamma_product(2, n - 1, schedule, b.d);
  if (schedule.is_constant()) {
    out.C0 = gamma_product_limit_constant(rho);
  } else {
    const std::uint64_t N = std::max<std::uint64_t>(1000000, 100 * n);
    out.C0 = gamma_product(2, N - 1, schedule, b.d) /
             std::pow(static_cast<double>(N), rho);
  }
  const double scale = norm == XiNormalization::gamma_product
                           ? out.C0 / out.gamma_2n
                           : std::pow(static_cast<double>(n), -rho);
  out.rate = xi_rate(n, schedule, b.d);
  const std::size_t d = b.d;
  out.samples.resize(b.replicates * d);
  MomentAccumulator first(d), second(d);
  std::vector<double> x(d), x2(d);
  for (std::uint64_t r = 0; r < b.replicates; ++r) {
    for (std::size_t k = 0; k < d; ++k) {
      const double v = use_T ? b.T[b.at(r, cp, k)]
                             : static_cast<double>(b.S[b.at(r, cp, k)]);
      x[k] = v * scale;
      x2[k] = x[k] * x[k];
      out.samples[r * d + k] = x[k];
    }
    first.add(x);
    second.add(x2);
  }
  const auto m1 = first.finalize();
  const auto m2 = second.finalize();
  const double N = static_cast<double>(b.replicates);
  for (std::size_t k = 0; k < d; ++k) {
    out.mean.push_back(m1.mean[k]);
    out.mean_se.push_back(std::sqrt(m1.cov[k * d + k] / N));
    out.second_moment.push_back(m2.mean[k]);
    out.second_moment_se.push_back(std::sqrt(m2.cov[k * d + k] / N));
  }
  return out;
}

AsCltResult as_clt_log_average(
    const WalkPath& path,
    const std::function<double(std::span<const double>)>& f, bool critical) {
  if (path.checkpoints.empty()) throw ModelError("path has no checkpoints");
  const std::size_t d = path.d;
  const std::uint64_t n = path.checkpoints.back();
  if (n < (critical ? 16u : 2u))
    throw ModelError("log average needs a longer path");
  std::vector<double> x(2 * d);
  double sum = 0.0, wsum = 0.0;
  std::uint64_t substituted = 0;
  std::size_t j = 0;
  const std::uint64_t k0 = critical ? 3 : 1;
  for (std::uint64_t k = k0; k <= n; ++k) {
    while (j + 1 < path.checkpoints.size() && path.checkpoints[j + 1] <= k) ++j;
    if (path.checkpoints[j] != k) ++substituted;
    const double kk = static_cast<double>(k);
    const double norm = critical ? std::sqrt(kk * std::log(kk)) : std::sqrt(kk);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = path.T[j * d + i] / norm;
      x[d + i] = path.C[j * d + i] / norm;
    }
    const double w = critical ? 1.0 / (kk * std::log(kk)) : 1.0 / kk;
    const double v = f(x);
    if (!std::isfinite(v)) throw ModelError("test function returned a non-finite value");
    sum += w * v;
    wsum += w;
  }
  AsCltResult r;
  const double nn = static_cast<double>(n);
  r.value = sum / (critical ? std::log(std::log(nn)) : std::log(nn));
  r.harmonic_value = sum / wsum;
  r.weight_total = wsum;
  r.n = n;
  r.substituted = substituted;
  r.critical = critical;
  return r;
}

std::function<double(std::span<const double>)> cosine_test_function(
    std::vector<double> u) {
  return [u = std::move(u)](std::span<const double> x) {
    if (x.size() != u.size()) throw ModelError("test vector has the wrong dimension");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * x[i];
    return std::cos(s);
  };
}

std::function<double(std::span<const double>)> clamped_coordinate(
    std::size_t i, double bound) {
  if (!(bound > 0.0)) throw ModelError("clamp bound must be > 0");
  return [i, bound](std::span<const double> x) {
    return std::clamp(x[i], -bound, bound);
  };
}

LilTrack lil_track(const WalkBatch& b, LilQuantity q, double constant,
                   bool critical, std::optional<std::span<const double>> centre,
                   double rho) {
  if (!(constant > 0.0)) throw ModelError("LIL constant must be > 0");
  std::vector<std::size_t> use;
  for (std::size_t j = 0; j < b.checkpoints.size(); ++j)
    if (b.checkpoints[j] >= 100) use.push_back(j);
  if (use.size() < 10)
    throw ModelError("LIL tracking needs >= 10 checkpoints past n = 100");
  const std::size_t d = b.d;
  if (centre && centre->size() != b.replicates * d)
    throw ModelError("centre has the wrong size");
  LilTrack out;
  out.checkpoints_used = use.size();
  out.per_path_max.assign(b.replicates, 0.0);
  for (std::uint64_t r = 0; r < b.replicates; ++r) {
    double best = 0.0;
    for (std::size_t j : use) {
      const double n = static_cast<double>(b.checkpoints[j]);
      double norm2 = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const std::size_t idx = b.at(r, j, k);
        double v = q == LilQuantity::S ? static_cast<double>(b.S[idx])
                   : q == LilQuantity::T ? b.T[idx]
                                         : b.C[idx];
        if (centre) v -= (*centre)[r * d + k] * std::pow(n, rho);
        norm2 += v * v;
      }
      const double a =
          critical ? std::sqrt(2.0 * n * std::log(n) *
                               std::log(std::log(std::log(n))))
                   : std::sqrt(2.0 * n * std::log(std::log(n)));
      best = std::max(best, std::sqrt(norm2) / (a * constant));
    }
    out.per_path_max[r] = best;
  }
  std::vector<double> sorted = out.per_path_max;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  out.median_ratio = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  double s = 0.0;
  for (double v : sorted) s += v;
  out.mean_ratio = s / static_cast<double>(m);
  out.max_ratio = sorted.back();
  out.flag_high = out.median_ratio > 1.5;
  out.flag_low = out.median_ratio < 0.3;
  return out;
}

}  // namespace erw
