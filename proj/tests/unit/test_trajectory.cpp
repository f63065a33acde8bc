#include "doctest.h"

#include <cmath>

#include "wqed/dynamics.hpp"
#include "wqed/error.hpp"
#include "wqed/trajectory.hpp"

using namespace wqed;

TEST_CASE("displaced unraveling generates the same Liouvillian") {
  for (double n : {0.1, 2.0}) {
    const auto m = build_model(EmitterParams{}, {0.3, n});
    const auto u = displaced_unraveling(m);
    CHECK(u.channels.front().label == "forward");
    CHECK((liouvillian(u.hamiltonian, u.channels) - liouvillian(m)).norm() < 1e-12);
  }
}

TEST_CASE("trajectory oracle reproduces transmission and g2") {
  const EmitterParams e{2.5, 0.6, 0.79 * 2.5};
  const DriveSpec d{0.0, 0.5};
  const auto m = build_model(e, d);
  TrajectoryOptions o;
  o.duration = 8000.0;
  o.seed = 42;
  const auto r = trajectory_oracle(m, d, o);
  const double t = transmission(m, d).total;
  CHECK(std::abs(r.transmission - t) < 4.0 * r.transmission_se);
  const double g = regression_bin_average(m, r.bin_width);
  CHECK(std::abs(r.g2_zero - g) < 4.0 * r.g2_zero_se);
  CHECK(r.g2_histogram.tau.size() == r.g2_histogram.values.size());
}

TEST_CASE("fixed seed gives identical results regardless of threads") {
  const auto m = build_model(EmitterParams{}, {0.0, 1.0});
  TrajectoryOptions o;
  o.duration = 400.0;
  o.seed = 9;
  o.threads = 1;
  const auto a = trajectory_oracle(m, {0.0, 1.0}, o);
  o.threads = 3;
  const auto b = trajectory_oracle(m, {0.0, 1.0}, o);
  CHECK(a.transmission == b.transmission);
  CHECK(a.forward_clicks == b.forward_clicks);
  CHECK(a.g2_histogram.values == b.g2_histogram.values);
}

TEST_CASE("oracle input validation") {
  const auto m = build_model(EmitterParams{}, {0.0, 1.0});
  TrajectoryOptions o;
  CHECK_THROWS_AS(trajectory_oracle(m, {0.0, 1.0}, o), Error);
  o.duration = 10.0;
  o.batches = 1;
  CHECK_THROWS_AS(trajectory_oracle(m, {0.0, 1.0}, o), Error);
}
