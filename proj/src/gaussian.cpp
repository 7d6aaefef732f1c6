#include "erw/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "erw/model.hpp"

namespace erw {

namespace {

void check_times(std::span<const double> times, double lower, bool inclusive) {
  if (times.empty()) throw ModelError("time grid must be nonempty");
  for (std::size_t i = 0; i < times.size(); ++i) {
    const bool ok = inclusive ? times[i] >= lower : times[i] > lower;
    if (!ok || !std::isfinite(times[i]))
      throw ModelError("time grid contains an out-of-range time");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw ModelError("time grid must be strictly increasing");
  }
}

GaussianGrid blank(ProcessTag tag, std::span<const double> times,
                   std::size_t d) {
  if (d == 0) throw ModelError("dimension d must be >= 1");
  GaussianGrid g;
  g.tag = tag;
  g.d = d;
  g.times.assign(times.begin(), times.end());
  g.values.assign(times.size() * d, 0.0);
  return g;
}

// Brownian motion at increasing clock values u (u_0 > 0), one coordinate.
void brownian_at(std::span<const double> u, std::size_t d, std::size_t k,
                 std::vector<double>& out, Engine& e) {
  NormalSource normal;
  double prev_u = 0.0, b = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    b += std::sqrt(u[i] - prev_u) * normal(e);
    prev_u = u[i];
    out[i * d + k] = b;
  }
}

}  // namespace

std::string to_string(ProcessTag tag) {
  switch (tag) {
    case ProcessTag::G_diffusive:
      return "G_diffusive";
    case ProcessTag::G_hat:
      return "G_hat";
    case ProcessTag::G_super:
      return "G_super";
    case ProcessTag::I:
      return "I";
    case ProcessTag::BM:
      return "BM";
    default:
      return "integrated";
  }
}

DiffusiveStepper::DiffusiveStepper(double rho) : rho_(rho) {
  if (!(rho < 0.5)) throw ModelError("diffusive G needs rho < 1/2");
}

double DiffusiveStepper::advance(double t_next, double z) {
  const double a = 1.0 - 2.0 * rho_;
  if (t_ == 0.0) {
    g_ = std::sqrt(t_next / a) * z;
  } else {
    const double coef = std::pow(t_next / t_, rho_);
    const double var = std::pow(t_next, 2.0 * rho_) *
                       (std::pow(t_next, a) - std::pow(t_, a)) / a;
    g_ = coef * g_ + std::sqrt(var) * z;
  }
  t_ = t_next;
  return g_;
}

GaussianGrid sample_G_diffusive(double rho, std::span<const double> times,
                                std::size_t d, Engine& e) {
  if (!(rho < 0.5)) throw ModelError("diffusive G needs rho < 1/2");
  check_times(times, 0.0, false);
  GaussianGrid g = blank(rho == 0.0 ? ProcessTag::BM : ProcessTag::G_diffusive,
                         times, d);
  g.rho1 = rho;
  NormalSource normal;
  for (std::size_t k = 0; k < d; ++k) {
    DiffusiveStepper st(rho);
    for (std::size_t i = 0; i < times.size(); ++i)
      g.values[i * d + k] = st.advance(times[i], normal(e));
  }
  return g;
}

GaussianGrid sample_G_hat(std::span<const double> times, std::size_t d,
                          Engine& e) {
  check_times(times, 1.0, true);
  GaussianGrid g = blank(ProcessTag::G_hat, times, d);
  g.rho1 = 0.5;
  std::vector<double> u(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) u[i] = std::log(times[i]);
  NormalSource normal;
  for (std::size_t k = 0; k < d; ++k) {
    double prev = 0.0, b = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (u[i] > prev) b += std::sqrt(u[i] - prev) * normal(e);
      prev = u[i];
      g.values[i * d + k] = std::sqrt(times[i]) * b;
    }
  }
  return g;
}

GaussianGrid sample_G_super(double rho, std::span<const double> times,
                            std::size_t d, Engine& e) {
  if (!(rho > 0.5)) throw ModelError("superdiffusive G needs rho > 1/2");
  check_times(times, 0.0, false);
  GaussianGrid g = blank(ProcessTag::G_super, times, d);
  g.rho1 = rho;
  std::vector<double> u(times.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    u[i] = std::pow(times[i], 2.0 * rho - 1.0);
  for (std::size_t k = 0; k < d; ++k) brownian_at(u, d, k, g.values, e);
  const double s = 1.0 / std::sqrt(2.0 * rho - 1.0);
  for (std::size_t i = 0; i < times.size(); ++i)
    for (std::size_t k = 0; k < d; ++k)
      g.values[i * d + k] *= s * std::pow(times[i], 1.0 - rho);
  return g;
}

GaussianGrid sample_I(double rho1, double rho2, double sigma1, double sigma2,
                      std::span<const double> times, std::size_t d, Engine& e) {
  if (!(rho1 < 0.5) || !(rho2 < 0.5))
    throw ModelError("I(t) needs both exponents < 1/2");
  const GaussianGrid a = sample_G_diffusive(rho1, times, d, e);
  const GaussianGrid b = sample_G_diffusive(rho2, times, d, e);
  GaussianGrid g = blank(ProcessTag::I, times, d);
  g.rho1 = rho1;
  g.rho2 = rho2;
  g.sigma1 = sigma1;
  g.sigma2 = sigma2;
  for (std::size_t i = 0; i < g.values.size(); ++i)
    g.values[i] = sigma1 * a.values[i] + sigma2 * b.values[i];
  return g;
}

GaussianGrid sample_BM(std::span<const double> times, std::size_t d,
                       Engine& e) {
  return sample_G_diffusive(0.0, times, d, e);
}

GaussianGrid integrate_path(const GaussianGrid& grid) {
  if (grid.times.size() < 2)
    throw ModelError("integration needs at least two grid points");
  GaussianGrid out = grid;
  out.inner = grid.tag;
  out.tag = ProcessTag::integrated;
  const std::size_t d = grid.d;
  const bool from_origin = grid.tag != ProcessTag::G_hat;
  double max_dt = 0.0;
  std::vector<double> acc(d, 0.0);
  for (std::size_t i = 0; i < grid.times.size(); ++i) {
    if (i == 0) {
      const double dt = from_origin ? grid.times[0] : 0.0;
      max_dt = dt;
      for (std::size_t k = 0; k < d; ++k) acc[k] = 0.5 * dt * grid.at(0, k);
    } else {
      const double dt = grid.times[i] - grid.times[i - 1];
      max_dt = std::max(max_dt, dt);
      for (std::size_t k = 0; k < d; ++k)
        acc[k] += 0.5 * dt * (grid.at(i - 1, k) + grid.at(i, k));
    }
    for (std::size_t k = 0; k < d; ++k) out.values[i * d + k] = acc[k];
  }
  out.discretization_order = max_dt * max_dt;
  return out;
}

std::vector<double> uniform_grid(std::size_t n, double T) {
  if (n == 0 || !(T > 0.0)) throw ModelError("uniform grid needs n >= 1, T > 0");
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i)
    t[i] = T * static_cast<double>(i + 1) / static_cast<double>(n);
  return t;
}

void write_grid_csv(std::ostream& out, const GaussianGrid& g) {
  out << "time";
  for (std::size_t k = 1; k <= g.d; ++k) out << ",v_" << k;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < g.times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", g.times[i]);
    out << buf;
    for (std::size_t k = 0; k < g.d; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", g.at(i, k));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace erw
