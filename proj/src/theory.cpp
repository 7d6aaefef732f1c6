#include "erw/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace erw {

namespace {

constexpr double kCriticalTol = 1e-12;

bool near_half(double rho) { return std::abs(rho - 0.5) <= kCriticalTol; }

void reject_critical(double rho, const char* critical_fn) {
  if (near_half(rho)) {
    std::ostringstream os;
    os << "rho = 1/2 is the critical regime; call " << critical_fn
       << " instead";
    throw ModelError(os.str());
  }
}

void require_dimension(std::size_t d) {
  if (d == 0) throw ModelError("dimension d must be >= 1");
}

BlockCovariance make(double a, double b, double c, std::size_t d) {
  BlockCovariance out;
  out.base = {{{a, b}, {b, c}}};
  out.d = d;
  return out;
}

}  // namespace

double BlockCovariance::full(std::size_t i, std::size_t j) const {
  if (i % d != j % d) return 0.0;
  return base[i / d][j / d] / static_cast<double>(d);
}

double BlockCovariance::min_eigenvalue() const {
  const double tr = base[0][0] + base[1][1];
  const double det = base[0][0] * base[1][1] - base[0][1] * base[1][0];
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  return tr / 2.0 - disc;
}

BlockCovariance cov_TS(double rho, double mu, double sigma, std::size_t d) {
  require_dimension(d);
  reject_critical(rho, "cov_TS_critical");
  const double a = std::abs(1.0 - 2.0 * rho);
  return make(1.0 / a, mu / a, sigma * sigma + mu * mu / a, d);
}

BlockCovariance cov_TS_critical(double mu, std::size_t d) {
  require_dimension(d);
  return make(1.0, mu, mu * mu, d);
}

BlockCovariance cov_TC(double rho, double mu, double sigma, std::size_t d) {
  require_dimension(d);
  reject_critical(rho, "cov_TC_critical");
  const double a = std::abs(1.0 - 2.0 * rho);
  const double b = rho < 0.5 ? 2.0 - rho : 1.0 + rho;
  const double s2 = sigma * sigma;
  const double m2 = mu * mu;
  return make(s2 + m2 / a, s2 / 2.0 + m2 / (a * b),
              s2 / 3.0 + 2.0 * m2 / (3.0 * a * b), d);
}

BlockCovariance cov_TC_critical(double mu, std::size_t d) {
  require_dimension(d);
  const double m2 = mu * mu;
  return make(m2, m2 * 2.0 / 3.0, m2 * 4.0 / 9.0, d);
}

LilConstants lil_constants(double rho, double mu, double sigma,
                           std::size_t d) {
  const bool crit = near_half(rho);
  const BlockCovariance tc =
      crit ? cov_TC_critical(mu, d) : cov_TC(rho, mu, sigma, d);
  const double dd = static_cast<double>(d);
  LilConstants out;
  out.lil_T = std::sqrt(tc.base[0][0] / dd);
  out.lil_C = std::sqrt(tc.base[1][1] / dd);
  out.regime = crit ? Regime::critical
                    : (rho < 0.5 ? Regime::diffusive : Regime::superdiffusive);
  return out;
}

double bessel_j(double nu, double x) {
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  const long double h = static_cast<long double>(x) / 2.0L;
  const long double h2 = h * h;
  long double term =
      std::exp(static_cast<long double>(nu) * std::log(h) -
               std::lgamma(static_cast<long double>(nu) + 1.0L));
  long double sum = term;
  for (int k = 1; k < 400; ++k) {
    term *= -h2 / (static_cast<long double>(k) *
                   (static_cast<long double>(k) + nu));
    sum += term;
    if (std::abs(term) < 1e-22L * std::abs(sum) && k > h) break;
  }
  return static_cast<double>(sum);
}

double bessel_smallest_zero(double nu) {
  if (!(nu >= -0.5 && nu <= 20.0))
    throw ModelError("Bessel order must lie in [-1/2, 20]");
  if (nu == -0.5) return std::numbers::pi / 2.0;
  if (nu == 0.5) return std::numbers::pi;
  const double hi_end =
      std::max(12.0, nu + 3.0 * std::cbrt(std::max(nu, 0.0)) + 4.0);
  const double step = 0.05;
  double a = step;
  double fa = bessel_j(nu, a);
  for (double b = a + step; b <= hi_end + step; b += step) {
    const double fb = bessel_j(nu, b);
    if ((fa > 0.0) != (fb > 0.0)) {
      double lo = a, hi = b, flo = fa;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = bessel_j(nu, mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    a = b;
    fa = fb;
  }
  throw std::logic_error("no sign change of J_nu found in the scan range");
}

ChungConstants chung_constants(std::size_t d, double EZ2,
                               std::optional<double> kappa) {
  require_dimension(d);
  if (!(EZ2 > 0.0)) throw ModelError("E[Z^2] must be > 0");
  const double dd = static_cast<double>(d);
  ChungConstants c;
  c.nu = (dd - 2.0) / 2.0;
  c.j_nu = bessel_smallest_zero(c.nu);
  c.EZ2 = EZ2;
  c.chung_T = c.j_nu * std::sqrt(EZ2 / (2.0 * dd));
  if (kappa) {
    if (!(*kappa > 0.0)) throw ModelError("kappa must be > 0");
    c.kappa_lo = c.kappa_hi = *kappa;
    c.kappa_is_interval = false;
  } else {
    c.kappa_lo = 3.0 / 8.0;
    c.kappa_hi = std::pow(2.0 * std::numbers::pi, 2.0 / 3.0) * 3.0 / 8.0;
    if (d >= 2) c.kappa_hi *= std::pow(dd, 4.0 / 3.0);
    c.kappa_is_interval = true;
  }
  const double scale = std::sqrt(EZ2 / dd);
  c.chung_C_lo = std::pow(3.0 * c.kappa_lo, 1.5) * scale;
  c.chung_C_hi = std::pow(3.0 * c.kappa_hi, 1.5) * scale;
  return c;
}

double gamma_product_direct(std::uint64_t m, std::uint64_t n,
                            const MemorySchedule& s, std::size_t d) {
  if (m == 0) throw ModelError("gamma_product needs m >= 1");
  if (n + 1 < m) throw ModelError("gamma_product needs m <= n + 1");
  double prod = 1.0;
  for (std::uint64_t i = m; i <= n; ++i)
    prod *= 1.0 + s.rho_at(i + 1, d) / static_cast<double>(i);
  return prod;
}

double gamma_product_log(std::uint64_t m, std::uint64_t n,
                         const MemorySchedule& s, std::size_t d) {
  if (m == 0) throw ModelError("gamma_product needs m >= 1");
  if (n + 1 < m) throw ModelError("gamma_product needs m <= n + 1");
  // Kahan-compensated sum of log1p terms.
  double sum = 0.0, comp = 0.0;
  for (std::uint64_t i = m; i <= n; ++i) {
    const double y = std::log1p(s.rho_at(i + 1, d) / static_cast<double>(i)) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return std::exp(sum);
}

double gamma_product(std::uint64_t m, std::uint64_t n,
                     const MemorySchedule& s, std::size_t d) {
  return n > 10000 ? gamma_product_log(m, n, s, d)
                   : gamma_product_direct(m, n, s, d);
}

double gamma_product_limit_constant(double rho) {
  return 1.0 / std::tgamma(2.0 + rho);
}

double xi_second_moment(double rho, std::size_t d) {
  require_dimension(d);
  if (!(rho > 0.5))
    throw ModelError("xi exists only in the superdiffusive regime rho > 1/2");
  return 1.0 / (static_cast<double>(d) * (2.0 * rho - 1.0) *
                std::tgamma(2.0 * rho));
}

TruncatedConstant xi_trace_constant(const MemorySchedule& s, std::size_t d,
                                    std::uint64_t N) {
  const double rho = s.rho(d);
  if (!(rho > 0.5))
    throw ModelError("xi exists only in the superdiffusive regime rho > 1/2");
  if (N < 4) throw ModelError("truncation N must be >= 4");
  auto estimate = [&](std::uint64_t n, double e) {
    const double nn = static_cast<double>(n);
    return (e - nn / (1.0 - 2.0 * rho)) / std::pow(nn, 2.0 * rho);
  };
  double e = 1.0;  // E||S_1||^2
  double half = 0.0;
  for (std::uint64_t n = 1; n < N; ++n) {
    e = (1.0 + 2.0 * s.rho_at(n + 1, d) / static_cast<double>(n)) * e + 1.0;
    if (n + 1 == N / 2) half = estimate(n + 1, e);
  }
  TruncatedConstant out;
  out.value = estimate(N, e);
  out.truncation_error = std::abs(out.value - half);
  out.terms = N;
  return out;
}

double xi_rate(std::uint64_t n, const MemorySchedule& s, std::size_t d) {
  if (n == 0) throw ModelError("xi_rate needs n >= 1");
  const double rho = s.rho(d);
  double tail = 0.0;
  if (!s.is_constant()) {
    const std::uint64_t cutoff =
        std::min<std::uint64_t>(std::max<std::uint64_t>(n * 1000, 100000), 20000000);
    for (std::uint64_t i = n; i <= cutoff; ++i)
      tail += (s.rho_at(i, d) - rho) / static_cast<double>(i);
  }
  return std::pow(static_cast<double>(n), 0.5 - rho) + std::abs(tail);
}

double rpw_first_mean(const RpwConfig& c) {
  const double a0 = static_cast<double>(c.alpha0());
  if (c.alpha0() == 0) return c.p0 * c.pA + (1.0 - c.p0) * c.qB();
  const double w = static_cast<double>(c.W0), b = static_cast<double>(c.B0);
  return w + (w / a0) * c.pA + (b / a0) * c.qB();
}

double rpw_mean(std::uint64_t n, const RpwConfig& c) {
  if (n == 0) return static_cast<double>(c.W0);
  const double q = c.qA() + c.qB();
  if (q == 0.0) return rpw_mean_series(n, c).back();
  const double v = c.v();
  const double rho = c.rho();
  const double a0 = static_cast<double>(c.alpha0());
  double prod = 1.0;
  for (std::uint64_t k = 1; k < n; ++k) prod *= 1.0 + rho / (a0 + static_cast<double>(k));
  return (a0 + static_cast<double>(n)) * v +
         prod * (rpw_first_mean(c) - (a0 + 1.0) * v);
}

std::vector<double> rpw_mean_series(std::uint64_t N, const RpwConfig& c) {
  std::vector<double> out;
  out.reserve(N + 1);
  out.push_back(static_cast<double>(c.W0));
  if (N == 0) return out;
  out.push_back(rpw_first_mean(c));
  const double rho = c.rho();
  const double a0 = static_cast<double>(c.alpha0());
  for (std::uint64_t n = 2; n <= N; ++n) {
    const double prev = out.back();
    out.push_back(prev + rho * prev / (a0 + static_cast<double>(n - 1)) + c.qB());
  }
  return out;
}

RpwClt rpw_clt_variance(double pA, double pB) {
  const double qA = 1.0 - pA, qB = 1.0 - pB;
  if (qA * qB == 0.0) throw ModelError("rpw_clt_variance needs q_A q_B != 0");
  const double q = qA + qB;
  const double rho = pA + pB - 1.0;
  RpwClt out;
  if (near_half(rho)) {
    out.regime = Regime::critical;
    out.variance = qA * qB / (q * q);
  } else if (rho < 0.5) {
    out.regime = Regime::diffusive;
    out.variance = qA * qB / (q * q * (2.0 * q - 1.0));
  } else {
    out.regime = Regime::superdiffusive;
  }
  return out;
}

}  // namespace erw
