#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "pgpe/objectives.hpp"
#include "pgpe/random.hpp"

using namespace pgpe;

TEST_CASE("sphere values") {
  CHECK(sphere_eval(std::vector<double>(7, 0.0)) == 0.0);
  CHECK(sphere_eval(std::vector<double>{3.0, 4.0}) == 25.0);
  CHECK(sphere_eval(std::vector<double>(100, 1.0)) == 100.0);
}

TEST_CASE("rastrigin values") {
  CHECK(rastrigin_eval(std::vector<double>(10, 0.0)) == doctest::Approx(0.0));
  CHECK(rastrigin_eval(std::vector<double>(10, 1.0)) == doctest::Approx(10.0).epsilon(1e-12));
  // 20 + 0.25 - 10 cos(pi) - 10 cos(0)
  const double brute = 20.0 + 0.25 - 10.0 * std::cos(std::numbers::pi) - 10.0 * std::cos(0.0);
  CHECK(brute == 20.25);
  CHECK(rastrigin_eval(std::vector<double>{0.5, 0.0}) == doctest::Approx(20.25).epsilon(1e-14));
}

TEST_CASE("objective properties on random points") {
  Rng rng(11);
  for (int n = 0; n < 500; ++n) {
    const std::size_t d = 1 + rng.next_u64() % 12;
    std::vector<double> x(d);
    std::vector<double> neg(d);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = rng.uniform(-6.0, 6.0);
      neg[i] = -x[i];
    }
    CHECK(sphere_eval(x) == sphere_eval(neg));
    CHECK(rastrigin_eval(x) == doctest::Approx(rastrigin_eval(neg)).epsilon(1e-14));
    CHECK(rastrigin_eval(x) >= 0.0);
    CHECK(std::abs(rastrigin_eval(x) - sphere_eval(x)) <= 20.0 * static_cast<double>(d));
  }
}

TEST_CASE("rastrigin is positive away from the origin on a grid") {
  for (int i = -20; i <= 20; ++i) {
    for (int j = -20; j <= 20; ++j) {
      const std::vector<double> p{0.25 * i, 0.25 * j};
      if (i == 0 && j == 0) {
        CHECK(rastrigin_eval(p) == doctest::Approx(0.0));
      } else {
        CHECK(rastrigin_eval(p) > 0.0);
      }
    }
  }
}

TEST_CASE("Objective counts evaluations") {
  Objective obj(ObjectiveKind::rastrigin, 3);
  const std::vector<double> p{1.0, 1.0, 1.0};
  CHECK(obj.evaluations() == 0);
  CHECK(obj.reward(p) == doctest::Approx(-3.0));
  CHECK(obj.evaluate(p) == doctest::Approx(3.0));
  CHECK(obj.evaluations() == 2);
  CHECK_THROWS_AS((void)obj.evaluate(std::vector<double>{1.0}), std::invalid_argument);
  CHECK(obj.evaluations() == 2);
  CHECK_THROWS_AS(Objective(ObjectiveKind::sphere, 0), std::invalid_argument);
}

TEST_CASE("objective names") {
  CHECK(parse_objective_kind("sphere") == ObjectiveKind::sphere);
  CHECK(parse_objective_kind(to_string(ObjectiveKind::rastrigin)) == ObjectiveKind::rastrigin);
  CHECK_THROWS_AS((void)parse_objective_kind("Sphere"), std::invalid_argument);
}

TEST_CASE("surface grid") {
  SUBCASE("degenerate range") {
    for (const auto& p : emit_surface_grid(ObjectiveKind::rastrigin, 2, 0.0, 4)) {
      CHECK(p.f == doctest::Approx(0.0));
    }
  }
  SUBCASE("sphere corner") {
    const auto g = emit_surface_grid(ObjectiveKind::sphere, 2, 1.0, 3);
    REQUIRE(g.size() == 9);
    CHECK(g.front().x == -1.0);
    CHECK(g.front().y == -1.0);
    CHECK(g.back().x == 1.0);
    CHECK(g.back().y == 1.0);
    CHECK(g.back().f == 2.0);
    CHECK(g[4].f == 0.0);
    // row-major: x varies fastest
    CHECK(g[1].x == 0.0);
    CHECK(g[1].y == -1.0);
  }
  SUBCASE("rastrigin corner") {
    const auto g = emit_surface_grid(ObjectiveKind::rastrigin, 2, 1.0, 3);
    CHECK(g.back().f == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS((void)emit_surface_grid(ObjectiveKind::sphere, 3, 1.0, 3), std::invalid_argument);
    CHECK_THROWS_AS((void)emit_surface_grid(ObjectiveKind::sphere, 2, 1.0, 1), std::invalid_argument);
  }
  SUBCASE("csv") {
    std::ostringstream out;
    write_surface_csv(out, emit_surface_grid(ObjectiveKind::sphere, 2, 1.0, 3));
    const std::string s = out.str();
    CHECK(s.rfind("x,y,f\n", 0) == 0);
    CHECK(s.find("1,1,2\n") != std::string::npos);
    CHECK(std::count(s.begin(), s.end(), '\n') == 10);
  }
}
