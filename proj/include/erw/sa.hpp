#pragma once
// Recursive stochastic approximation
//   theta_{n+1} = theta_n - g_{n+1} h(theta_n) + g_{n+1} (dM_{n+1} + r_{n+1})
// and its elephant-walk and urn instances.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "erw/model.hpp"
#include "erw/walkers.hpp"

namespace erw {

class SaDivergence : public std::runtime_error {
 public:
  SaDivergence(std::uint64_t step, std::vector<double> last_theta);
  std::uint64_t step() const { return step_; }
  const std::vector<double>& last_theta() const { return last_; }

 private:
  std::uint64_t step_;
  std::vector<double> last_;
};

/// Stateful source of martingale increments. draw(n, theta, out) writes
/// dM_n given theta_{n-1}.
class NoiseSource {
 public:
  virtual ~NoiseSource() = default;
  virtual void draw(std::uint64_t n, std::span<const double> theta,
                    std::span<double> out) = 0;
};

using VectorField =
    std::function<void(std::span<const double>, std::span<double>)>;

struct SaSpec {
  std::size_t dim = 1;
  std::vector<double> theta0;
  std::uint64_t n0 = 0;
  VectorField h;
  /// Dh in the row-vector convention h(theta) = theta H, row-major dim x dim.
  std::optional<std::vector<double>> gradient;
  std::function<double(std::uint64_t)> gamma;
  /// Builds the noise for a (seed, replicate); an empty factory means zero
  /// noise.
  std::function<std::unique_ptr<NoiseSource>(std::uint64_t, std::uint64_t)>
      noise;
  /// residual(n, theta_{n-1}, out) writes r_n; empty means zero.
  std::function<void(std::uint64_t, std::span<const double>, std::span<double>)>
      residual;

  void validate() const;
};

struct SaTrajectory {
  std::size_t dim = 1;
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> theta;         // checkpoint-major, dim per checkpoint
  std::vector<double> M;             // cumulative sum of dM
  std::vector<double> residual_abs;  // cumulative sum of |r|, one per checkpoint
  double max_reconstruction_error = 0.0;
};

/// Runs from n0 to the last checkpoint. Throws SaDivergence on a
/// non-finite iterate.
SaTrajectory run_sa(const SaSpec& spec, std::span<const std::uint64_t> checkpoints,
                    std::uint64_t seed, std::uint64_t replicate = 0);

/// theta = (S_n / n, T_n / n) in R^{2d}, theta_0 = 0, g_n = 1/n,
///   h(x, y) = ((1 - rho) x, y - rho mu_Z x),
///   dM = (s - rho_{n} x, s (Z - mu_Z) + mu_Z (s - rho_{n} x)),
///   r  = ((rho_{n} - rho) x, mu_Z (rho_{n} - rho) x),
/// where s is the new step. The noise replays simulate_walk's draws.
SaSpec erw_sa_spec(const WalkConfig& config);

/// theta_n = (W_n - E W_n) / n, theta_0 = 0, g_n = 1/n, h(x) = (1 - rho) x,
/// r_n = -rho alpha_0 theta_{n-1} / (alpha_0 + n - 1). The noise replays
/// simulate_rpw's draws. E W_n for comparisons comes from rpw_mean.
SaSpec rpw_sa_spec(const RpwConfig& config);

}  // namespace erw
