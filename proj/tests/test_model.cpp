#include <doctest.h>

#include <cmath>

#include "erw/model.hpp"

using namespace erw;
using doctest::Approx;

TEST_CASE("rho from p") {
  CHECK(rho_from_p(0.75, 1) == 0.5);
  CHECK(rho_from_p(0.25, 2) == Approx(0.0).epsilon(1e-15));
  CHECK(rho_from_p(1.0 / 6.0, 3) == Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(rho_from_p(1.0, 2) == Approx(1.0));
  CHECK(rho_from_p(0.6, 1) == Approx(0.2));
  CHECK(rho_from_p(0.5, 2) == Approx(1.0 / 3.0));
  CHECK_THROWS_AS(rho_from_p(1.1, 1), ModelError);
  CHECK_THROWS_AS(rho_from_p(-0.1, 1), ModelError);
  CHECK_THROWS_AS(rho_from_p(0.5, 0), ModelError);
}

TEST_CASE("critical p") {
  CHECK(critical_p(1) == 0.75);
  CHECK(critical_p(2) == 0.625);
  for (std::size_t d = 1; d <= 8; ++d) CHECK(rho_from_p(critical_p(d), d) == 0.5);
}

TEST_CASE("rho is affine and increasing in p") {
  for (std::size_t d = 1; d <= 4; ++d) {
    double prev = -2.0;
    for (int i = 0; i <= 20; ++i) {
      const double p = i / 20.0;
      const double r = rho_from_p(p, d);
      CHECK(r > prev);
      CHECK(r <= 1.0 + 1e-15);
      CHECK(r >= -1.0 / (2.0 * d - 1.0) - 1e-15);
      prev = r;
    }
  }
}

TEST_CASE("regime classification") {
  auto r = regime_classify(MemorySchedule::constant(0.6), 1);
  CHECK(r.regime == Regime::diffusive);
  CHECK(r.normalization == Normalization::sqrt_n);
  r = regime_classify(MemorySchedule::constant(0.75), 1);
  CHECK(r.regime == Regime::critical);
  CHECK(r.normalization == Normalization::sqrt_n_log_n);
  r = regime_classify(MemorySchedule::constant(0.9), 1);
  CHECK(r.regime == Regime::superdiffusive);
  CHECK(r.normalization == Normalization::n_pow_rho);
  CHECK(r.rho == Approx(0.8));
  // Rational inputs are classified exactly.
  r = regime_classify(MemorySchedule::constant(Ratio{5, 8}), 2);
  CHECK(r.regime == Regime::critical);
  r = regime_classify(MemorySchedule::constant(Ratio{7, 12}), 3);
  CHECK(r.regime == Regime::critical);
  r = regime_classify(MemorySchedule::constant(Ratio{1, 2}), 2);
  CHECK(r.regime == Regime::diffusive);
}

TEST_CASE("schedules") {
  const auto t = MemorySchedule::tabulated({0.2, 0.4, 0.6}, 0.9);
  CHECK(t.p_at(1) == 0.2);
  CHECK(t.p_at(3) == 0.6);
  CHECK(t.p_at(4) == 0.9);
  CHECK(t.p_at(1000) == 0.9);
  CHECK_FALSE(t.is_constant());
  CHECK(t.rho(1) == Approx(0.8));
  CHECK(t.rho_at(1, 1) == Approx(-0.6));

  const auto r = MemorySchedule::rule(
      [](std::uint64_t i) { return 0.6 + 0.5 / std::sqrt(static_cast<double>(i)); }, 0.6, 0.5);
  CHECK(r.p_at(1) == 1.0);  // clamped
  CHECK(r.p_at(100) == Approx(0.65));
  const auto dec = r.average_decay(100000);
  CHECK(dec.fitted_exponent == Approx(0.5).epsilon(0.05));

  CHECK_THROWS_AS(MemorySchedule::tabulated({0.5, 1.5}, 0.5), ModelError);
  CHECK_THROWS_AS(MemorySchedule::constant(Ratio{3, 2}), ModelError);
  CHECK_THROWS_AS(MemorySchedule::rule(nullptr, 0.5, 1.0), ModelError);
}

TEST_CASE("step-size laws") {
  const auto c = StepSizeModel::parse("constant:1");
  CHECK(c.is_constant());
  CHECK(c.mean() == 1.0);
  CHECK(c.variance() == 0.0);
  const auto tp = StepSizeModel::parse("two-point:0,2,0.5");
  CHECK(tp.mean() == Approx(1.0));
  CHECK(tp.variance() == Approx(1.0));
  CHECK(tp.second_moment() == Approx(2.0));
  const auto g = StepSizeModel::parse("gaussian:1,4");
  CHECK(g.mean() == 1.0);
  CHECK(g.variance() == 4.0);
  const auto u = StepSizeModel::parse("uniform:0,1");
  CHECK(u.variance() == Approx(1.0 / 12.0));
  CHECK_THROWS_AS(StepSizeModel::parse("cauchy:1"), ModelError);
  CHECK_THROWS_AS(StepSizeModel::parse("constant:x"), ModelError);
  CHECK_THROWS_AS(StepSizeModel::parse("two-point:1,2"), ModelError);
  CHECK_THROWS_AS(StepSizeModel::parse("uniform:2,1"), ModelError);

  // Sample moments match the declared ones.
  Engine e = make_stream(3, 0, Substream::step_sizes);
  for (const auto& law : {tp, g, u}) {
    double s = 0, s2 = 0;
    const int N = 200000;
    for (int i = 0; i < N; ++i) {
      const double z = law.sample(e);
      s += z;
      s2 += z * z;
    }
    const double m = s / N, v = s2 / N - m * m;
    CHECK(m == Approx(law.mean()).epsilon(0.02));
    CHECK(v == Approx(law.variance()).epsilon(0.03));
  }
  // A constant law consumes no draws.
  Engine a = make_stream(1, 0, Substream::step_sizes), b = a;
  c.sample(a);
  CHECK(a == b);
}

TEST_CASE("walk config validation") {
  WalkConfig w;
  w.horizon = 100;
  w.checkpoints = {10, 100};
  CHECK_NOTHROW(w.validate());
  w.checkpoints = {10, 10};
  CHECK_THROWS_AS(w.validate(), ModelError);
  w.checkpoints = {10, 200};
  CHECK_THROWS_AS(w.validate(), ModelError);
  w.checkpoints = {100};
  w.d = 2;
  w.first_step_plus = 0.7;
  CHECK_THROWS_AS(w.validate(), ModelError);
  w.d = 0;
  w.first_step_plus.reset();
  CHECK_THROWS_AS(w.validate(), ModelError);
}

TEST_CASE("geometric checkpoints") {
  const auto c = geometric_checkpoints(1000000, 10);
  CHECK(c.front() == 1);
  CHECK(c.back() == 1000000);
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i] > c[i - 1]);
  CHECK(c.size() <= 61);
  CHECK(geometric_checkpoints(1).size() == 1);
}
