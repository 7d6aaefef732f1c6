#pragma once
// Exact samplers for the Gaussian limit processes and path integration.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "erw/rng.hpp"

namespace erw {

enum class ProcessTag { G_diffusive, G_hat, G_super, I, BM, integrated };

std::string to_string(ProcessTag tag);

struct GaussianGrid {
  ProcessTag tag = ProcessTag::BM;
  ProcessTag inner = ProcessTag::BM;  // meaningful when tag == integrated
  double rho1 = 0.0, rho2 = 0.0, sigma1 = 1.0, sigma2 = 0.0;
  std::size_t d = 1;
  std::vector<double> times;
  std::vector<double> values;  // time-major, d per time
  /// For integrated grids, max over segments of dt^2 (the trapezoid error
  /// order); zero otherwise.
  double discretization_order = 0.0;

  double at(std::size_t i, std::size_t k = 0) const { return values[i * d + k]; }
};

/// One-coordinate Markov stepper for G_t = t^rho int_0^t s^{-rho} dB(s),
/// rho < 1/2. The first advance draws the exact marginal.
class DiffusiveStepper {
 public:
  explicit DiffusiveStepper(double rho);
  /// Moves to time t_next > current time using one standard normal z.
  double advance(double t_next, double z);
  double value() const { return g_; }
  double time() const { return t_; }

 private:
  double rho_;
  double t_ = 0.0;
  double g_ = 0.0;
};

/// Diffusive G. Exact recursion G_{t'} = (t'/t)^rho G_t + e with
/// Var e = t'^{2 rho} (t'^{1-2rho} - t^{1-2rho}) / (1 - 2 rho).
GaussianGrid sample_G_diffusive(double rho, std::span<const double> times,
                                std::size_t d, Engine& e);

/// Critical G_hat_t = sqrt(t) B(log t) on times >= 1; G_hat_1 = 0.
GaussianGrid sample_G_hat(std::span<const double> times, std::size_t d,
                          Engine& e);

/// Superdiffusive G_t = t^{1-rho} / sqrt(2 rho - 1) B(t^{2 rho - 1}).
GaussianGrid sample_G_super(double rho, std::span<const double> times,
                            std::size_t d, Engine& e);

/// I(t) = sigma1 G^{(rho1)}(t) + sigma2 G^{(rho2)}(t) with independent
/// driving motions.
GaussianGrid sample_I(double rho1, double rho2, double sigma1, double sigma2,
                      std::span<const double> times, std::size_t d, Engine& e);

/// Standard Brownian motion on the grid.
GaussianGrid sample_BM(std::span<const double> times, std::size_t d,
                       Engine& e);

/// Cumulative trapezoid integral. Processes that vanish at 0 get the first
/// segment from (0, 0); G_hat starts at its first time.
GaussianGrid integrate_path(const GaussianGrid& grid);

/// Uniform grid {T/n, 2T/n, ..., T}.
std::vector<double> uniform_grid(std::size_t n, double T = 1.0);

/// CSV with columns time, v_1..v_d.
void write_grid_csv(std::ostream& out, const GaussianGrid& grid);

}  // namespace erw
