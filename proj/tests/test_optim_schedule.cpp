#include <doctest.h>

#include <cmath>
#include <limits>

#include "sarv/errors.hpp"
#include "sarv/train/optim.hpp"
#include "sarv/train/schedule.hpp"

using namespace sarv;
using namespace sarv::train;

TEST_CASE("exponential decay values") {
  CHECK(lr_exp_decay(0) == doctest::Approx(0.0031).epsilon(1e-12));
  CHECK(lr_exp_decay(2000) == doctest::Approx(0.0001 + 0.003 / std::exp(1.0)).epsilon(1e-12));
  CHECK(lr_exp_decay(1000000) == doctest::Approx(0.0001).epsilon(1e-9));
  double prev = lr_exp_decay(0);
  for (std::size_t s = 1; s < 20000; s += 97) {
    const double lr = lr_exp_decay(s);
    CHECK(lr < prev);
    CHECK(lr > 0.0001);
    prev = lr;
  }
}

TEST_CASE("plateau decays after the patience window") {
  PlateauSchedule s(1.0, 0.9, 3);
  CHECK(s.observe(0.5) == 1.0);
  CHECK(s.observe(0.5) == 1.0);
  CHECK(s.observe(0.4) == 1.0);
  CHECK(s.observe(0.5) == doctest::Approx(0.9));
  CHECK(s.epochs_since_best() == 0);
  CHECK(s.observe(0.6) == doctest::Approx(0.9));
  CHECK(s.observe(0.6) == doctest::Approx(0.9));
}

TEST_CASE("plateau with 27 stale epochs decays exactly once") {
  std::vector<double> hist(28, 0.5);
  CHECK(lr_plateau(hist, 0.001) == doctest::Approx(0.0009));
  hist.resize(27);
  CHECK(lr_plateau(hist, 0.001) == 0.001);
  std::vector<double> improving(100);
  for (std::size_t i = 0; i < improving.size(); ++i) improving[i] = static_cast<double>(i);
  CHECK(lr_plateau(improving, 0.001) == 0.001);
}

TEST_CASE("plateau start-epoch reading") {
  PlateauSchedule s(1.0, 0.5, 0, 3);
  CHECK(s.observe(0.9) == 1.0);
  CHECK(s.observe(0.1) == 1.0);
  CHECK(s.observe(0.1) == 0.5);
  CHECK(s.observe(0.1) == 0.25);
  CHECK(s.observe(0.95) == 0.25);
}

TEST_CASE("plateau rejects bad settings") {
  CHECK_THROWS_AS(PlateauSchedule(1.0, 1.0, 3), ConfigError);
  CHECK_THROWS_AS(PlateauSchedule(1.0, 0.9, 0), ConfigError);
}

TEST_CASE("sgd step") {
  nn::Parameter<double> p("p", {2});
  p.value[0] = 1.0;
  p.grad[0] = 2.0;
  p.grad[1] = -1.0;
  sgd_step<double>({&p}, 0.1);
  CHECK(p.value[0] == doctest::Approx(0.8));
  CHECK(p.value[1] == doctest::Approx(0.1));
  p.grad[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(sgd_step<double>({&p}, 0.1), NumericError);
}

TEST_CASE("adam first step moves each coordinate by lr") {
  nn::Parameter<float> p("p", {3});
  p.grad[0] = 5.0F;
  p.grad[1] = -0.01F;
  AdamState st;
  adam_step<float>({&p}, 0.01, st);
  CHECK(st.t == 1);
  CHECK(p.value[0] == doctest::Approx(-0.01).epsilon(1e-4));
  CHECK(p.value[1] == doctest::Approx(0.01).epsilon(1e-4));
  CHECK(p.value[2] == 0.0F);
}

TEST_CASE("adam minimizes a quadratic") {
  nn::Parameter<double> p("p", {1});
  p.value[0] = 3.0;
  AdamState st;
  for (int i = 0; i < 2000; ++i) {
    p.grad[0] = 2.0 * (p.value[0] - 1.0);
    adam_step<double>({&p}, 0.01, st);
  }
  CHECK(p.value[0] == doctest::Approx(1.0).epsilon(1e-3));
}
