#include "erw/sa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace erw {

namespace {

std::string divergence_message(std::uint64_t step,
                               const std::vector<double>& theta) {
  std::ostringstream os;
  os.precision(17);
  os << "non-finite iterate at step " << step << "; last theta = (";
  for (std::size_t i = 0; i < theta.size(); ++i)
    os << (i ? ", " : "") << theta[i];
  os << ")";
  return os.str();
}

class ErwNoise final : public NoiseSource {
 public:
  ErwNoise(const WalkConfig& c, std::uint64_t seed, std::uint64_t replicate)
      : cfg_(c), state_(WalkState::seeded(c.d, seed, replicate)) {}

  void draw(std::uint64_t n, std::span<const double> theta,
            std::span<double> out) override {
    const std::size_t d = cfg_.d;
    const double mu = cfg_.steps.mean();
    const double p = cfg_.schedule.p_at(n);
    const double rho_n = rho_from_p(p, d);
    std::vector<double> mean(d, 0.0);
    if (state_.n == 0) {
      if (cfg_.first_step_plus) mean[0] = 2.0 * *cfg_.first_step_plus - 1.0;
    } else {
      for (std::size_t k = 0; k < d; ++k) mean[k] = rho_n * theta[k];
    }
    const StepOutcome o = erw_step(state_, p, cfg_.steps, cfg_.first_step_plus);
    for (std::size_t k = 0; k < d; ++k) {
      const double s = axis_of(o.direction) == k ? sign_of(o.direction) : 0.0;
      out[k] = s - mean[k];
      out[d + k] = s * (o.z - mu) + mu * out[k];
    }
  }

 private:
  WalkConfig cfg_;
  WalkState state_;
};

class RpwNoise final : public NoiseSource {
 public:
  RpwNoise(const RpwConfig& c, std::uint64_t seed, std::uint64_t replicate)
      : cfg_(c),
        rng_(make_stream(seed, replicate, Substream::urn)),
        white_(c.W0),
        black_(c.B0) {}

  void draw(std::uint64_t, std::span<const double>,
            std::span<double> out) override {
    const std::uint64_t total = white_ + black_;
    const double mean =
        total == 0 ? cfg_.p0 * cfg_.pA + (1.0 - cfg_.p0) * cfg_.qB()
                   : (cfg_.pA * static_cast<double>(white_) +
                      cfg_.qB() * static_cast<double>(black_)) /
                         static_cast<double>(total);
    const bool draw_white = total == 0 ? uniform01(rng_) < cfg_.p0
                                       : uniform_below(rng_, total) < white_;
    const std::uint64_t before = white_;
    if (draw_white) {
      if (uniform01(rng_) < cfg_.pA) ++white_; else ++black_;
    } else {
      if (uniform01(rng_) < cfg_.pB) ++black_; else ++white_;
    }
    out[0] = static_cast<double>(white_ - before) - mean;
  }

 private:
  RpwConfig cfg_;
  Engine rng_;
  std::uint64_t white_;
  std::uint64_t black_;
};

}  // namespace

SaDivergence::SaDivergence(std::uint64_t step, std::vector<double> last)
    : std::runtime_error(divergence_message(step, last)),
      step_(step),
      last_(std::move(last)) {}

void SaSpec::validate() const {
  if (dim == 0) throw ModelError("SA dimension must be >= 1");
  if (theta0.size() != dim) throw ModelError("theta0 has the wrong dimension");
  if (!h) throw ModelError("SA spec needs a regression function h");
  if (!gamma) throw ModelError("SA spec needs a step sequence");
  if (gradient && gradient->size() != dim * dim)
    throw ModelError("gradient matrix has the wrong size");
}

SaTrajectory run_sa(const SaSpec& spec,
                    std::span<const std::uint64_t> checkpoints,
                    std::uint64_t seed, std::uint64_t replicate) {
  spec.validate();
  if (checkpoints.empty()) throw ModelError("checkpoints must be nonempty");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] <= spec.n0 || (i > 0 && checkpoints[i] <= checkpoints[i - 1]))
      throw ModelError("checkpoints must be strictly increasing and > n0");
  }
  const std::size_t m = spec.dim;
  SaTrajectory out;
  out.dim = m;
  out.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  std::vector<double> theta = spec.theta0, next(m), hv(m), dM(m, 0.0),
                      r(m, 0.0), Mcum(m, 0.0);
  double rabs = 0.0;
  std::unique_ptr<NoiseSource> noise;
  if (spec.noise) noise = spec.noise(seed, replicate);
  std::size_t cp = 0;
  std::uint64_t n = spec.n0;
  double prev_gamma = std::numeric_limits<double>::infinity();
  while (cp < checkpoints.size()) {
    const double g = spec.gamma(n + 1);
    if (!(g > 0.0) || g > prev_gamma * (1.0 + 1e-15))
      throw ModelError("step sequence must be positive and nonincreasing");
    prev_gamma = g;
    spec.h(theta, hv);
    if (noise) noise->draw(n + 1, theta, dM);
    if (spec.residual) spec.residual(n + 1, theta, r);
    for (std::size_t i = 0; i < m; ++i)
      next[i] = theta[i] - g * hv[i] + g * (dM[i] + r[i]);
    for (std::size_t i = 0; i < m; ++i) {
      if (!std::isfinite(next[i])) throw SaDivergence(n + 1, theta);
      const double resid = next[i] - theta[i] + g * hv[i] - g * (dM[i] + r[i]);
      out.max_reconstruction_error =
          std::max(out.max_reconstruction_error, std::abs(resid));
      Mcum[i] += dM[i];
      rabs += std::abs(r[i]);
    }
    theta.swap(next);
    ++n;
    if (n == checkpoints[cp]) {
      out.theta.insert(out.theta.end(), theta.begin(), theta.end());
      out.M.insert(out.M.end(), Mcum.begin(), Mcum.end());
      out.residual_abs.push_back(rabs);
      ++cp;
    }
  }
  return out;
}

SaSpec erw_sa_spec(const WalkConfig& config) {
  config.validate();
  const std::size_t d = config.d;
  const double rho = config.schedule.rho(d);
  const double mu = config.steps.mean();
  SaSpec s;
  s.dim = 2 * d;
  s.theta0.assign(2 * d, 0.0);
  s.n0 = 0;
  s.h = [d, rho, mu](std::span<const double> th, std::span<double> out) {
    for (std::size_t k = 0; k < d; ++k) {
      out[k] = (1.0 - rho) * th[k];
      out[d + k] = th[d + k] - rho * mu * th[k];
    }
  };
  std::vector<double> H(4 * d * d, 0.0);
  const std::size_t w = 2 * d;
  for (std::size_t k = 0; k < d; ++k) {
    H[k * w + k] = 1.0 - rho;
    H[k * w + d + k] = -rho * mu;
    H[(d + k) * w + d + k] = 1.0;
  }
  s.gradient = std::move(H);
  s.gamma = [](std::uint64_t n) { return 1.0 / static_cast<double>(n); };
  s.noise = [config](std::uint64_t seed, std::uint64_t rep) {
    return std::make_unique<ErwNoise>(config, seed, rep);
  };
  const auto schedule = config.schedule;
  const auto first = config.first_step_plus;
  s.residual = [d, rho, mu, schedule, first](std::uint64_t n,
                                              std::span<const double> th,
                                              std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    if (n == 1) {
      if (first) {
        out[0] = 2.0 * *first - 1.0;
        out[d] = mu * out[0];
      }
      return;
    }
    const double drho = schedule.rho_at(n, d) - rho;
    for (std::size_t k = 0; k < d; ++k) {
      out[k] = drho * th[k];
      out[d + k] = mu * drho * th[k];
    }
  };
  return s;
}

SaSpec rpw_sa_spec(const RpwConfig& config) {
  config.validate();
  if (config.qA() * config.qB() == 0.0)
    throw ModelError("the urn SA form needs q_A q_B != 0");
  const double rho = config.rho();
  const double a0 = static_cast<double>(config.alpha0());
  SaSpec s;
  s.dim = 1;
  s.theta0 = {0.0};
  s.n0 = 0;
  s.h = [rho](std::span<const double> th, std::span<double> out) {
    out[0] = (1.0 - rho) * th[0];
  };
  s.gradient = std::vector<double>{1.0 - rho};
  s.gamma = [](std::uint64_t n) { return 1.0 / static_cast<double>(n); };
  s.noise = [config](std::uint64_t seed, std::uint64_t rep) {
    return std::make_unique<RpwNoise>(config, seed, rep);
  };
  s.residual = [rho, a0](std::uint64_t n, std::span<const double> th,
                         std::span<double> out) {
    out[0] = a0 == 0.0 ? 0.0
                       : -rho * a0 * th[0] / (a0 + static_cast<double>(n - 1));
  };
  return s;
}

}  // namespace erw
