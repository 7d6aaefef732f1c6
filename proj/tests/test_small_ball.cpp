#include <doctest.h>

#include <cmath>
#include <numbers>

#include "erw/model.hpp"
#include "erw/small_ball.hpp"
#include "oracles.hpp"

using namespace erw;
using doctest::Approx;

TEST_CASE("Brownian small-ball series matches the images series") {
  for (double a : {0.3, 0.5, 0.8, 1.0, 1.5, 2.5, 4.0})
    CHECK(bm_small_ball_series(a) == Approx(oracle::bm_small_ball_images(a)).epsilon(1e-10));
  CHECK(bm_small_ball_series(1.0) == Approx(0.37083).epsilon(1e-4));
  CHECK(bm_small_ball_series(50.0) == Approx(1.0));
}

TEST_CASE("Monte Carlo Brownian sup against the exact law") {
  SmallBallSpec s;
  s.grid = 1024;
  s.bridge = true;
  const SmallBallPoint p = small_ball_log_prob(s, 1.0, 100000, 3, 0);
  const double exact = bm_small_ball_series(1.0);
  CHECK(std::abs(p.prob - exact) < 4.0 * std::sqrt(exact * (1 - exact) / 1e5));
  CHECK(p.trials == 100000);
  CHECK(p.log_prob == Approx(std::log(p.prob)));
  CHECK(p.se_log == Approx(std::sqrt((1 - p.prob) / (p.prob * 1e5))).epsilon(0.1));

  // Without the bridge weight the discrete sup misses excursions.
  SmallBallSpec raw = s;
  raw.bridge = false;
  const SmallBallPoint q = small_ball_log_prob(raw, 1.0, 100000, 3, 0);
  CHECK(q.prob > exact);
  CHECK(q.coarse_hits >= q.hits);

  // I with rho1 = rho2 = 0 and sigma1^2 + sigma2^2 = 1 is a Brownian motion.
  SmallBallSpec i = s;
  i.process = SbProcess::I;
  i.sigma1 = i.sigma2 = std::sqrt(0.5);
  const SmallBallPoint r = small_ball_log_prob(i, 1.0, 100000, 4, 0);
  CHECK(std::abs(r.prob - exact) < 4.0 * std::sqrt(exact * (1 - exact) / 1e5));

  SmallBallSpec wide = raw;
  wide.grid = 64;
  CHECK(small_ball_log_prob(wide, 20.0, 2000, 1, 0).prob == 1.0);
}

TEST_CASE("curves are monotone and worker invariant") {
  SmallBallSpec s;
  s.process = SbProcess::integrated_BM;
  s.grid = 256;
  const std::vector<double> eps{0.05, 0.1, 0.2, 0.4};
  const auto a = small_ball_curve(s, eps, 20000, 9, 1);
  const auto b = small_ball_curve(s, eps, 20000, 9, 3);
  REQUIRE(a.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(a[k].hits == b[k].hits);
    CHECK(a[k].coarse_hits == b[k].coarse_hits);
    CHECK(a[k].coarse_hits >= a[k].hits);
    if (k > 0) CHECK(a[k].hits >= a[k - 1].hits);
  }
  // Early exit changes the draw sequence, so a single-eps run only agrees in law.
  const SmallBallPoint one = small_ball_log_prob(s, 0.1, 20000, 9, 2);
  const double pr = a[1].prob;
  CHECK(std::abs(one.prob - pr) < 6.0 * std::sqrt(pr * (1 - pr) / 20000.0));

  const auto none = small_ball_curve(s, std::vector<double>{1e-4}, 1000, 1, 0);
  CHECK(none[0].hits == 0);
  CHECK(none[0].upper_bound);
  CHECK(none[0].log_prob == Approx(std::log(3.0 / 1000.0)));
  CHECK(std::isinf(none[0].se_log));
}

TEST_CASE("rate fit") {
  // Exact synthetic data is recovered.
  std::vector<SmallBallPoint> pts;
  for (double e : {0.02, 0.03, 0.05, 0.08}) {
    SmallBallPoint p;
    p.eps = e;
    p.log_prob = 0.4 - 0.9 * std::pow(e, -2.0 / 3.0);
    p.se_log = 0.1 * e;
    pts.push_back(p);
  }
  SmallBallFit f = fit_small_ball_constant(pts, 2.0 / 3.0);
  CHECK(f.constant == Approx(0.9).epsilon(1e-10));
  CHECK(f.intercept == Approx(0.4).epsilon(1e-10));
  CHECK(f.residual < 1e-10);
  CHECK(f.points_used == 4);
  CHECK_FALSE(f.narrow_design_warning);

  // Exact Brownian probabilities give pi^2 / 8.
  std::vector<SmallBallPoint> bm;
  for (double e : {0.3, 0.4, 0.5}) {
    SmallBallPoint p;
    p.eps = e;
    p.log_prob = std::log(bm_small_ball_series(e));
    bm.push_back(p);
  }
  f = fit_small_ball_constant(bm, 2.0);
  CHECK(f.constant == Approx(std::numbers::pi * std::numbers::pi / 8.0).epsilon(0.02));
  CHECK(f.narrow_design_warning);

  bm.push_back(bm.back());
  bm.back().upper_bound = true;
  bm.back().log_prob = -50.0;
  CHECK(fit_small_ball_constant(bm, 2.0).points_used == 3);
  bm.resize(2);
  CHECK_THROWS_AS(fit_small_ball_constant(bm, 2.0), ModelError);
  std::vector<SmallBallPoint> same(3, pts[0]);
  CHECK_THROWS_AS(fit_small_ball_constant(same, 2.0), ModelError);
}

TEST_CASE("spec validation") {
  SmallBallSpec s;
  CHECK_NOTHROW(s.validate());
  s.process = SbProcess::I;
  s.rho2 = 0.5;
  CHECK_THROWS_AS(s.validate(), ModelError);
  s.rho2 = 0.2;
  s.alpha = 0.5;
  CHECK_THROWS_AS(s.validate(), ModelError);
  s.process = SbProcess::integrated_I;
  CHECK_NOTHROW(s.validate());
  s.alpha = 1.6;
  CHECK_THROWS_AS(s.validate(), ModelError);
  s.alpha = 0.0;
  s.bridge = true;
  CHECK_THROWS_AS(s.validate(), ModelError);
  SmallBallSpec g;
  g.grid = 1;
  CHECK_THROWS_AS(g.validate(), ModelError);
}
