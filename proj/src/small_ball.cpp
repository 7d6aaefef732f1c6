#include "erw/small_ball.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "erw/model.hpp"
#include "erw/parallel.hpp"
#include "erw/rng.hpp"

namespace erw {

namespace {

constexpr std::uint64_t kBlock = 4096;

struct BlockTally {
  std::vector<std::uint64_t> hits, coarse;
  std::vector<double> sw, sw2;
};

struct Kernel {
  SmallBallSpec spec;
  std::size_t n;
  double dt;
  std::vector<double> c1, s1, c2, s2;  // diffusive recursion coefficients
  std::vector<double> weight;          // t^{-alpha}
  double kappa;                        // local variance rate

  explicit Kernel(const SmallBallSpec& s) : spec(s), n(s.grid) {
    dt = 1.0 / static_cast<double>(n);
    c1.resize(n);
    s1.resize(n);
    c2.resize(n);
    s2.resize(n);
    weight.resize(n);
    auto fill = [&](double rho, std::vector<double>& c, std::vector<double>& sd) {
      const double a = 1.0 - 2.0 * rho;
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i + 1) * dt;
        if (i == 0) {
          c[i] = 0.0;
          sd[i] = std::sqrt(t / a);
        } else {
          const double tp = static_cast<double>(i) * dt;
          c[i] = std::pow(t / tp, rho);
          sd[i] = std::sqrt(std::pow(t, 2.0 * rho) * (std::pow(t, a) - std::pow(tp, a)) / a);
        }
      }
    };
    fill(s.rho1, c1, s1);
    fill(s.rho2, c2, s2);
    for (std::size_t i = 0; i < n; ++i)
      weight[i] = std::pow(static_cast<double>(i + 1) * dt, -s.alpha);
    kappa = s.process == SbProcess::BM ? 1.0
                                       : s.sigma1 * s.sigma1 + s.sigma2 * s.sigma2;
  }

  // Squared sup over the full grid and over odd indices (times 2/n, 4/n,
  // ...). Stops once the coarse sup reaches stop2; `path` receives the
  // values when non-null (d = 1).
  void trial(Engine& e, NormalSource& normal, double stop2, double& fine,
             double& coarse, std::vector<double>& st, double* path) const {
    const std::size_t d = spec.d;
    std::fill(st.begin(), st.end(), 0.0);
    double* g1 = st.data();
    double* g2 = g1 + d;
    double* x = g2 + d;
    fine = 0.0;
    coarse = 0.0;
    const double sdt = std::sqrt(dt);
    const double dt32 = dt * sdt;
    const double inv2r3 = 0.5 / std::sqrt(3.0);
    for (std::size_t i = 0; i < n; ++i) {
      double norm2 = 0.0, v = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        switch (spec.process) {
          case SbProcess::BM:
            g1[k] += sdt * normal(e);
            v = g1[k];
            break;
          case SbProcess::I: {
            g1[k] = c1[i] * g1[k] + s1[i] * normal(e);
            g2[k] = c2[i] * g2[k] + s2[i] * normal(e);
            v = spec.sigma1 * g1[k] + spec.sigma2 * g2[k];
            break;
          }
          case SbProcess::integrated_BM: {
            const double z1 = normal(e), z2 = normal(e);
            x[k] += g1[k] * dt + dt32 * (0.5 * z1 + inv2r3 * z2);
            g1[k] += sdt * z1;
            v = x[k] * weight[i];
            break;
          }
          case SbProcess::integrated_I: {
            const double before = spec.sigma1 * g1[k] + spec.sigma2 * g2[k];
            g1[k] = c1[i] * g1[k] + s1[i] * normal(e);
            g2[k] = c2[i] * g2[k] + s2[i] * normal(e);
            const double after = spec.sigma1 * g1[k] + spec.sigma2 * g2[k];
            x[k] += 0.5 * dt * (before + after);
            v = x[k] * weight[i];
            break;
          }
        }
        norm2 += v * v;
      }
      if (path) path[i] = v;
      fine = std::max(fine, norm2);
      if (i & 1) coarse = std::max(coarse, norm2);
      if (coarse >= stop2) return;
    }
  }

  double bridge_weight(const double* path, double eps) const {
    double w = 1.0, prev = 0.0;
    const double denom = kappa * dt;
    for (std::size_t i = 0; i < n; ++i) {
      const double y = path[i];
      const double up = std::exp(-2.0 * (eps - prev) * (eps - y) / denom);
      const double down = std::exp(-2.0 * (eps + prev) * (eps + y) / denom);
      w *= std::clamp(1.0 - up - down, 0.0, 1.0);
      prev = y;
    }
    return w;
  }
};

}  // namespace

std::string to_string(SbProcess p) {
  switch (p) {
    case SbProcess::BM:
      return "BM";
    case SbProcess::I:
      return "I";
    case SbProcess::integrated_BM:
      return "integrated_BM";
    default:
      return "integrated_I";
  }
}

void SmallBallSpec::validate() const {
  if (d == 0) throw ModelError("dimension d must be >= 1");
  if (grid < 2) throw ModelError("small-ball grid needs at least 2 points");
  if (process == SbProcess::I || process == SbProcess::integrated_I) {
    if (!(rho1 < 0.5) || !(rho2 < 0.5))
      throw ModelError("I(t) needs both exponents < 1/2");
  }
  if (!(alpha >= 0.0)) throw ModelError("alpha must be >= 0");
  const bool integrated =
      process == SbProcess::integrated_BM || process == SbProcess::integrated_I;
  if (alpha > 0.0 && !integrated)
    throw ModelError("the t^-alpha weight applies to integrated processes only");
  if (integrated && !(alpha < 1.5))
    throw ModelError("alpha must be < 3/2 for integrated processes");
  if (bridge && (integrated || d != 1))
    throw ModelError("bridge correction needs d = 1 and a non-integrated process");
}

std::vector<SmallBallPoint> small_ball_curve(const SmallBallSpec& spec,
                                             std::span<const double> eps,
                                             std::uint64_t trials,
                                             std::uint64_t seed,
                                             unsigned workers) {
  spec.validate();
  if (eps.empty()) throw ModelError("eps list must be nonempty");
  if (trials == 0) throw ModelError("trials must be >= 1");
  for (double x : eps)
    if (!(x > 0.0) || !std::isfinite(x)) throw ModelError("eps must be positive");
  const std::size_t m = eps.size();
  const double emax = *std::max_element(eps.begin(), eps.end());
  const double stop2 = emax * emax;
  const Kernel kernel(spec);
  const std::uint64_t blocks = (trials + kBlock - 1) / kBlock;
  std::vector<BlockTally> tally(blocks);
  parallel_chunks(blocks, workers, [&](std::uint64_t b0, std::uint64_t b1) {
    std::vector<double> st(3 * spec.d);
    std::vector<double> path(spec.bridge ? kernel.n : 0);
    for (std::uint64_t b = b0; b < b1; ++b) {
      BlockTally& t = tally[b];
      t.hits.assign(m, 0);
      t.coarse.assign(m, 0);
      t.sw.assign(m, 0.0);
      t.sw2.assign(m, 0.0);
      Engine e = make_stream(seed, b, Substream::small_ball);
      NormalSource normal;
      const std::uint64_t end = std::min(trials, (b + 1) * kBlock);
      for (std::uint64_t i = b * kBlock; i < end; ++i) {
        double fine, coarse;
        kernel.trial(e, normal, stop2, fine, coarse, st,
                     spec.bridge ? path.data() : nullptr);
        for (std::size_t j = 0; j < m; ++j) {
          const double e2 = eps[j] * eps[j];
          if (coarse < e2) ++t.coarse[j];
          if (fine < e2) {
            ++t.hits[j];
            const double w = spec.bridge ? kernel.bridge_weight(path.data(), eps[j]) : 1.0;
            t.sw[j] += w;
            t.sw2[j] += w * w;
          }
        }
      }
    }
  });
  std::vector<SmallBallPoint> out(m);
  const double N = static_cast<double>(trials);
  for (std::size_t j = 0; j < m; ++j) {
    SmallBallPoint& p = out[j];
    double sw = 0.0, sw2 = 0.0;
    for (const BlockTally& t : tally) {
      p.hits += t.hits[j];
      p.coarse_hits += t.coarse[j];
      sw += t.sw[j];
      sw2 += t.sw2[j];
    }
    p.eps = eps[j];
    p.trials = trials;
    p.grid = spec.grid;
    p.bridge = spec.bridge;
    p.prob = sw / N;
    if (p.hits == 0 || !(p.prob > 0.0)) {
      p.upper_bound = true;
      p.log_prob = std::log(3.0 / N);
      p.se_log = std::numeric_limits<double>::infinity();
      continue;
    }
    p.log_prob = std::log(p.prob);
    const double var = std::max(0.0, sw2 / N - p.prob * p.prob);
    p.se_log = std::sqrt(var / N) / p.prob;
  }
  return out;
}

SmallBallPoint small_ball_log_prob(const SmallBallSpec& spec, double eps,
                                   std::uint64_t trials, std::uint64_t seed,
                                   unsigned workers) {
  const double e[1] = {eps};
  return small_ball_curve(spec, e, trials, seed, workers).front();
}

double bm_small_ball_series(double eps) {
  if (!(eps > 0.0)) throw ModelError("eps must be positive");
  const double pi = std::numbers::pi;
  double s = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double a = 2.0 * k + 1.0;
    const double term = std::exp(-a * a * pi * pi / (8.0 * eps * eps)) / a;
    s += (k % 2 ? -term : term);
    if (term < 1e-18 * std::abs(s)) break;
  }
  return std::clamp(4.0 / pi * s, 0.0, 1.0);
}

SmallBallFit fit_small_ball_constant(std::span<const SmallBallPoint> points,
                                     double exponent, bool intercept) {
  if (!(exponent > 0.0)) throw ModelError("fit exponent must be > 0");
  std::vector<double> x, y, se;
  for (const SmallBallPoint& p : points) {
    if (p.upper_bound || !std::isfinite(p.log_prob)) continue;
    x.push_back(-std::pow(p.eps, -exponent));
    y.push_back(p.log_prob);
    se.push_back(p.se_log);
  }
  if (x.size() < 3)
    throw ModelError("small-ball fit needs at least three usable eps values");
  const bool equal = std::any_of(se.begin(), se.end(),
                                 [](double s) { return !(s > 0.0) || !std::isfinite(s); });
  std::vector<double> w(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) w[i] = equal ? 1.0 : 1.0 / (se[i] * se[i]);
  double Sw = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    Sw += w[i];
    Sx += w[i] * x[i];
    Sy += w[i] * y[i];
    Sxx += w[i] * x[i] * x[i];
    Sxy += w[i] * x[i] * y[i];
  }
  SmallBallFit f;
  if (intercept) {
    const double det = Sw * Sxx - Sx * Sx;
    if (!(std::abs(det) > 1e-12 * Sw * Sxx))
      throw ModelError("degenerate small-ball design: eps values coincide");
    f.constant = (Sw * Sxy - Sx * Sy) / det;
    f.intercept = (Sy - f.constant * Sx) / Sw;
  } else {
    if (!(Sxx > 0.0)) throw ModelError("degenerate small-ball design");
    f.constant = Sxy / Sxx;
  }
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.constant * x[i];
    r2 += w[i] * r * r;
  }
  f.residual = std::sqrt(r2 / Sw);
  f.points_used = x.size();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const SmallBallPoint& p : points) {
    if (p.upper_bound) continue;
    lo = std::min(lo, p.eps);
    hi = std::max(hi, p.eps);
  }
  f.narrow_design_warning = hi < 2.0 * lo;
  return f;
}

}  // namespace erw
