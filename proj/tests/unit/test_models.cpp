#include <cmath>
#include <numbers>

#include "doctest.h"
#include "setsens/models.hpp"
#include "setsens/rng.hpp"

using namespace setsens;

TEST_CASE("toy constraint hand values") {
  const double u0[] = {0.0, 0.0, 0.0};
  const double origin[] = {0.0, 0.0}, up1[] = {0.0, 1.0}, up5[] = {0.0, 5.0};
  CHECK(toy_constraint(origin, u0) == -1.0);
  CHECK(toy_constraint(up1, u0) == 4.0);
  CHECK(toy_constraint(up5, u0) == 24.0);
  const double u[] = {1.0, 2.0, 0.0}, x[] = {3.0, -1.0};
  CHECK(toy_constraint(x, u) == -9.0 - 5.0 - 1.0 + 4.0 - 1.0);

  const auto region = toy_excursion();
  CHECK(region.membership(origin, u0));
  CHECK_FALSE(region.membership(up1, u0));
}

TEST_CASE("toy membership ignores the dummy input") {
  const auto region = toy_excursion();
  Rng rng(21);
  for (int t = 0; t < 500; ++t) {
    const double x[] = {rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const double a = rng.uniform(-5, 5), b = rng.uniform(-5, 5);
    const double u[] = {a, b, rng.uniform(-5, 5)}, v[] = {a, b, rng.uniform(-5, 5)};
    CHECK(region.membership(x, u) == region.membership(x, v));
  }
}

TEST_CASE("forcing parser") {
  CHECK(parse_forcing("step").amplitude == 10.0);
  CHECK(parse_forcing("step:1")(3.0) == 1.0);
  const auto s = parse_forcing("sine:2:3");
  CHECK(s.kind == Forcing::Kind::sine);
  CHECK(s(std::numbers::pi / 4) == doctest::Approx(3.0));
  CHECK(parse_forcing("sine:0.5").amplitude == 10.0);
  CHECK_THROWS(parse_forcing("ramp"));
  CHECK_THROWS(parse_forcing("step:x"));
}

TEST_CASE("oscillator at rest stays at rest") {
  const Forcing none{Forcing::Kind::step, 0.0, 1.0};
  const auto e = oscillator_trajectory(2.0, 0.5, 30.0, none, 10.0, 0.01);
  CHECK(e.max_velocity == 0.0);
  CHECK(e.max_acceleration == 0.0);
  CHECK(e.final_position == 0.0);
}

TEST_CASE("free undamped oscillator follows cos t") {
  const Forcing none{Forcing::Kind::step, 0.0, 1.0};
  // Y = cos t: Y' = -sin t peaks at 3pi/2, Y'' = -cos t peaks at pi
  const auto e = oscillator_trajectory(1.0, 0.0, 1.0, none, 2 * std::numbers::pi, 1e-3, {1.0, 0.0});
  CHECK(std::abs(e.max_velocity - 1.0) < 1e-6);
  CHECK(std::abs(e.max_acceleration - 1.0) < 1e-6);

  // on [0, pi] the velocity never rises above its initial value of zero
  const auto half = oscillator_trajectory(1.0, 0.0, 1.0, none, std::numbers::pi, std::numbers::pi / 3000, {1.0, 0.0});
  CHECK(std::abs(half.max_velocity) < 1e-12);
}

TEST_CASE("RK4 error shrinks sixteenfold when dt halves") {
  const Forcing none{Forcing::Kind::step, 0.0, 1.0};
  // m = 1, c = 0.4, k = 4, Y(0) = 1: underdamped closed form
  const double c = 0.4, k = 4.0, T = 10.0;
  const double zeta_w = c / 2, w = std::sqrt(k - zeta_w * zeta_w);
  const double exact = std::exp(-zeta_w * T) * (std::cos(w * T) + zeta_w / w * std::sin(w * T));
  const auto coarse = oscillator_trajectory(1.0, c, k, none, T, 0.02, {1.0, 0.0});
  const auto fine = oscillator_trajectory(1.0, c, k, none, T, 0.01, {1.0, 0.0});
  const double ratio = std::abs(coarse.final_position - exact) / std::abs(fine.final_position - exact);
  CHECK(ratio > 14.0);
  CHECK(ratio < 18.0);
}

TEST_CASE("nonphysical parameters are rejected") {
  const Forcing f;
  CHECK_THROWS_WITH(oscillator_trajectory(0.0, 1.0, 1.0, f, 1.0, 0.01), "nonphysical mass");
  CHECK_THROWS(oscillator_trajectory(1.0, 1.0, 1.0, f, 1.0, 0.0));
}

TEST_CASE("oscillator excursion sets") {
  auto cache = std::make_shared<TrajectoryCache>(OscillatorSettings{});
  const auto g1 = oscillator_excursions(cache, OscillatorOutput::g1);
  const auto g2 = oscillator_excursions(cache, OscillatorOutput::g2);
  const auto inter = oscillator_excursions(cache, OscillatorOutput::intersection);
  REQUIRE(g1.size() == 1);
  REQUIRE(oscillator_excursions(cache, OscillatorOutput::pair).size() == 2);

  Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    const double x[] = {rng.uniform(1, 5), rng.uniform(20, 50)};
    const double huge_neg[] = {0.1, -0.5, 1.0, -1e6, 2.5, 15.0};
    CHECK(g1[0].membership(x, huge_neg));
    const double u[] = {rng.uniform(-0.3, 0.3), rng.uniform(-1, 1), rng.uniform(0.5, 1.5),
                        1.0 + 0.1 * (rng.uniform() - 0.5), 2.5, 15.0};
    CHECK(inter[0].membership(x, u) == (g1[0].membership(x, u) && g2[0].membership(x, u)));
  }
}

TEST_CASE("trajectory cache solves each input once") {
  auto cache = std::make_shared<TrajectoryCache>(OscillatorSettings{});
  const double x[] = {2.0, 30.0};
  const double u[] = {0.1, 0.2, 1.0, 1.0, 2.5, 15.0};
  const double u_other_threshold[] = {0.1, 0.2, 1.0, 0.7, 2.0, 11.0};
  const auto a = cache->get(x, u);
  const auto b = cache->get(x, u_other_threshold);
  CHECK(cache->solves() == 1);
  CHECK(a.max_velocity == b.max_velocity);
  const auto direct = oscillator_trajectory(2.1, 1.0, 30.2, Forcing{}, 10.0, 0.01);
  CHECK(a.max_velocity == direct.max_velocity);
  CHECK(a.max_acceleration == direct.max_acceleration);
}

TEST_CASE("model registry") {
  for (auto name : kModelNames) {
    const auto m = make_model(name);
    CHECK(m.marginals.size() == m.input_names.size());
    CHECK_FALSE(m.components.empty());
  }
  CHECK(make_model("oscillator_pair").product_output);
  CHECK(make_model("toy").domain.volume() == 100.0);
  CHECK_THROWS(make_model("beam"));
}
