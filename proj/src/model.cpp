#include "erw/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace erw {

namespace {

void require_dimension(std::size_t d) {
  if (d == 0) throw ModelError("dimension d must be >= 1");
}

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << what << " = " << p << " is outside [0, 1]";
    throw ModelError(os.str());
  }
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double critical_p(std::size_t d) {
  require_dimension(d);
  const double dd = static_cast<double>(d);
  return (2.0 * dd + 1.0) / (4.0 * dd);
}

double rho_from_p(double p, std::size_t d) {
  require_dimension(d);
  require_probability(p, "memory parameter p");
  // The critical value is rounded on input, so it is recognized bitwise.
  if (p == critical_p(d)) return 0.5;
  const double two_d = 2.0 * static_cast<double>(d);
  return std::fma(two_d, p, -1.0) / (two_d - 1.0);
}

MemorySchedule MemorySchedule::constant(double p) {
  require_probability(p, "memory parameter p");
  return MemorySchedule(Constant{p, std::nullopt});
}

MemorySchedule MemorySchedule::constant(Ratio p) {
  if (p.den <= 0 || p.num < 0 || p.num > p.den)
    throw ModelError("rational memory parameter must satisfy 0 <= num <= den");
  return MemorySchedule(Constant{p.value(), p});
}

MemorySchedule MemorySchedule::tabulated(std::vector<double> values,
                                         double limit) {
  require_probability(limit, "schedule limit p");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0 && values[i] <= 1.0)) {
      std::ostringstream os;
      os << "tabulated p_" << (i + 1) << " = " << values[i]
         << " is outside [0, 1]";
      throw ModelError(os.str());
    }
  }
  return MemorySchedule(Tabulated{std::move(values), limit});
}

MemorySchedule MemorySchedule::rule(std::function<double(std::uint64_t)> fn,
                                    double limit, double decay) {
  require_probability(limit, "schedule limit p");
  if (!fn) throw ModelError("rule schedule needs a callable");
  if (!(decay > 0.0)) throw ModelError("rule decay exponent must be > 0");
  return MemorySchedule(Rule{std::move(fn), limit, decay});
}

double MemorySchedule::p_at(std::uint64_t i) const {
  return std::visit(
      overloaded{
          [](const Constant& c) { return c.p; },
          [i](const Tabulated& t) {
            return (i >= 1 && i - 1 < t.values.size()) ? t.values[i - 1]
                                                       : t.limit;
          },
          [i](const Rule& r) { return std::clamp(r.fn(i), 0.0, 1.0); }},
      kind_);
}

double MemorySchedule::limit() const {
  return std::visit(overloaded{[](const Constant& c) { return c.p; },
                               [](const Tabulated& t) { return t.limit; },
                               [](const Rule& r) { return r.limit; }},
                    kind_);
}

bool MemorySchedule::is_constant() const {
  return std::holds_alternative<Constant>(kind_);
}

std::optional<Ratio> MemorySchedule::exact_limit() const {
  if (const auto* c = std::get_if<Constant>(&kind_)) return c->exact;
  return std::nullopt;
}

MemorySchedule::AverageDecay MemorySchedule::average_decay(
    std::uint64_t horizon) const {
  AverageDecay out;
  const double p = limit();
  double sum = 0.0;
  std::uint64_t next = 1;
  for (std::uint64_t i = 1; i <= horizon; ++i) {
    sum += p_at(i);
    if (i == next || i == horizon) {
      out.n.push_back(i);
      out.deviation.push_back(std::abs(sum / static_cast<double>(i) - p));
      next = std::max<std::uint64_t>(next + 1,
                                     static_cast<std::uint64_t>(next * 1.5));
    }
  }
  // Least-squares slope of log deviation on log n over n >= 10.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t k = 0;
  for (std::size_t j = 0; j < out.n.size(); ++j) {
    if (out.n[j] < 10 || !(out.deviation[j] > 0.0)) continue;
    const double x = std::log(static_cast<double>(out.n[j]));
    const double y = std::log(out.deviation[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  const double den = k * sxx - sx * sx;
  out.fitted_exponent = (k >= 2 && den > 0.0)
                            ? -(k * sxy - sx * sy) / den
                            : std::nan("");
  return out;
}

std::string MemorySchedule::describe() const {
  std::ostringstream os;
  std::visit(overloaded{[&](const Constant& c) {
                          os << "constant(p=" << c.p;
                          if (c.exact) os << "=" << c.exact->num << "/"
                                          << c.exact->den;
                          os << ")";
                        },
                        [&](const Tabulated& t) {
                          os << "tabulated(" << t.values.size()
                             << " entries, limit=" << t.limit << ")";
                        },
                        [&](const Rule& r) {
                          os << "rule(limit=" << r.limit
                             << ", decay=" << r.decay << ")";
                        }},
             kind_);
  return os.str();
}

StepSizeModel::StepSizeModel(
    std::variant<Constant, TwoPoint, Gaussian, Uniform> law)
    : law_(law) {
  std::visit(overloaded{[&](const Constant& c) {
                          mean_ = c.c;
                          variance_ = 0.0;
                        },
                        [&](const TwoPoint& t) {
                          mean_ = t.q * t.a + (1.0 - t.q) * t.b;
                          variance_ = t.q * (1.0 - t.q) * (t.a - t.b) *
                                      (t.a - t.b);
                        },
                        [&](const Gaussian& g) {
                          mean_ = g.mean;
                          variance_ = g.variance;
                        },
                        [&](const Uniform& u) {
                          mean_ = 0.5 * (u.a + u.b);
                          variance_ = (u.b - u.a) * (u.b - u.a) / 12.0;
                        }},
             law_);
}

StepSizeModel StepSizeModel::constant(double c) {
  if (!std::isfinite(c)) throw ModelError("constant step size must be finite");
  return StepSizeModel(Constant{c});
}

StepSizeModel StepSizeModel::two_point(double a, double b, double q) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw ModelError("two-point values must be finite");
  require_probability(q, "two-point weight q");
  return StepSizeModel(TwoPoint{a, b, q});
}

StepSizeModel StepSizeModel::gaussian(double mean, double variance) {
  if (!std::isfinite(mean) || !(variance >= 0.0) || !std::isfinite(variance))
    throw ModelError("gaussian step law needs finite mean and variance >= 0");
  return StepSizeModel(Gaussian{mean, variance});
}

StepSizeModel StepSizeModel::uniform(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw ModelError("uniform step law needs finite a < b");
  return StepSizeModel(Uniform{a, b});
}

StepSizeModel StepSizeModel::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string law = text.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        args.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ModelError("step law '" + text + "': bad number '" + item + "'");
      }
    }
  }
  auto need = [&](std::size_t k) {
    if (args.size() != k) {
      std::ostringstream os;
      os << "step law '" << law << "' takes " << k << " parameter(s), got "
         << args.size();
      throw ModelError(os.str());
    }
  };
  if (law == "constant") {
    need(1);
    return constant(args[0]);
  }
  if (law == "two-point") {
    need(3);
    return two_point(args[0], args[1], args[2]);
  }
  if (law == "gaussian") {
    need(2);
    return gaussian(args[0], args[1]);
  }
  if (law == "uniform") {
    need(2);
    return uniform(args[0], args[1]);
  }
  throw ModelError("unknown step law '" + law +
                   "' (expected constant, two-point, gaussian, uniform)");
}

double StepSizeModel::sample(Engine& e) const {
  switch (law_.index()) {
    case 0:
      return std::get<Constant>(law_).c;
    case 1: {
      const auto& t = std::get<TwoPoint>(law_);
      return uniform01(e) < t.q ? t.a : t.b;
    }
    case 2: {
      const auto& g = std::get<Gaussian>(law_);
      NormalSource normal;
      return g.mean + std::sqrt(g.variance) * normal(e);
    }
    default: {
      const auto& u = std::get<Uniform>(law_);
      return u.a + (u.b - u.a) * uniform01(e);
    }
  }
}

std::string StepSizeModel::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{[&](const Constant& c) { os << "constant:" << c.c; },
                        [&](const TwoPoint& t) {
                          os << "two-point:" << t.a << "," << t.b << ","
                             << t.q;
                        },
                        [&](const Gaussian& g) {
                          os << "gaussian:" << g.mean << "," << g.variance;
                        },
                        [&](const Uniform& u) {
                          os << "uniform:" << u.a << "," << u.b;
                        }},
             law_);
  return os.str();
}

void WalkConfig::validate() const {
  require_dimension(d);
  if (horizon == 0) throw ModelError("horizon must be >= 1");
  if (replicates == 0) throw ModelError("replicates must be >= 1");
  if (checkpoints.empty()) throw ModelError("checkpoints must be nonempty");
  if (checkpoints.front() == 0)
    throw ModelError("checkpoints must be positive times");
  for (std::size_t i = 1; i < checkpoints.size(); ++i)
    if (checkpoints[i] <= checkpoints[i - 1])
      throw ModelError("checkpoints must be strictly increasing");
  if (checkpoints.back() > horizon)
    throw ModelError("last checkpoint exceeds the horizon");
  require_probability(schedule.limit(), "schedule limit p");
  if (first_step_plus) {
    if (d != 1)
      throw ModelError("first_step_plus_probability requires d = 1");
    require_probability(*first_step_plus, "first_step_plus_probability");
  }
}

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t horizon,
                                                 std::size_t per_decade) {
  if (horizon == 0) throw ModelError("horizon must be >= 1");
  const double decades = std::log10(static_cast<double>(horizon));
  const auto K = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(decades * per_decade)));
  std::vector<std::uint64_t> out;
  for (std::size_t k = 0; k <= K; ++k) {
    auto t = static_cast<std::uint64_t>(
        std::floor(std::pow(static_cast<double>(horizon),
                            static_cast<double>(k) / K) + 1e-9));
    t = std::clamp<std::uint64_t>(t, 1, horizon);
    if (out.empty() || t > out.back()) out.push_back(t);
  }
  if (out.back() != horizon) out.push_back(horizon);
  return out;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::diffusive:
      return "diffusive";
    case Regime::critical:
      return "critical";
    default:
      return "superdiffusive";
  }
}

std::string to_string(Normalization n) {
  switch (n) {
    case Normalization::sqrt_n:
      return "sqrt(n)";
    case Normalization::sqrt_n_log_n:
      return "sqrt(n log n)";
    default:
      return "n^rho";
  }
}

RegimeReport regime_classify(const MemorySchedule& schedule, std::size_t d) {
  RegimeReport r;
  r.critical_p = critical_p(d);
  r.rho = schedule.rho(d);
  bool critical;
  if (auto q = schedule.exact_limit()) {
    const auto dd = static_cast<std::int64_t>(d);
    critical = 4 * dd * q->num == (2 * dd + 1) * q->den;
    if (critical) r.rho = 0.5;
  } else {
    critical = std::abs(r.rho - 0.5) <= 1e-12;
  }
  if (critical) {
    r.regime = Regime::critical;
    r.normalization = Normalization::sqrt_n_log_n;
  } else if (r.rho < 0.5) {
    r.regime = Regime::diffusive;
    r.normalization = Normalization::sqrt_n;
  } else {
    r.regime = Regime::superdiffusive;
    r.normalization = Normalization::n_pow_rho;
  }
  return r;
}

}  // namespace erw
