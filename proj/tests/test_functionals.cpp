#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <rwre/functionals.hpp>
#include <rwre/grid_path.hpp>
#include <rwre/rng.hpp>

#include <cmath>
#include <vector>

using namespace rwre;

namespace {

GridPath make_path(std::vector<double> verts) { return GridPath(std::move(verts)); }

// Same polyline with every segment split at its midpoint.
std::vector<double> refine(const std::vector<double>& verts) {
  std::vector<double> out;
  out.reserve(verts.size() * 2 - 1);
  for (std::size_t k = 0; k + 1 < verts.size(); ++k) {
    out.push_back(verts[k]);
    out.push_back(0.5 * (verts[k] + verts[k + 1]));
  }
  out.push_back(verts.back());
  return out;
}

}  // namespace

TEST_CASE("catalog values on hand-computed paths") {
  const auto endpoint5 = PathFunctional::clipped_endpoint(5.0);
  CHECK(endpoint5(make_path({0.0, 0.7, 0.3})) == 0.3);

  const auto absmax1 = PathFunctional::clipped_abs_max(1.0);
  CHECK(absmax1(make_path({0.0, 2.0, -3.0})) == 1.0);

  const auto integral = PathFunctional::clipped_integral(1.0);
  CHECK(integral(make_path({0.0, 0.0, 0.0, 0.0})) == 0.0);
  // Straight line 0 -> 1 has integral 1/2 (trapezoid is exact).
  CHECK(integral(make_path({0.0, 0.5, 1.0})) == doctest::Approx(0.5).epsilon(1e-15));

  const auto runmax = PathFunctional::clipped_running_max(10.0);
  CHECK(runmax(make_path({0.0, 2.0, -3.0})) == 2.0);
  CHECK(runmax(make_path({0.0, -1.0, -0.5})) == 0.0);  // max at the start

  const auto soft = PathFunctional::soft_barrier(-1.0, 1.0, 0.5);
  CHECK(soft(make_path({0.0, 0.5})) == 1.0);                    // inside
  CHECK(soft(make_path({0.0, 1.2})) == doctest::Approx(0.6));   // ramp
  CHECK(soft(make_path({0.0, 1.6})) == 0.0);                    // beyond width
  CHECK(soft(make_path({0.0, -1.3})) == doctest::Approx(0.4));  // lower side

  const auto ind = PathFunctional::barrier_indicator(-1.0, 1.0);
  CHECK(ind(make_path({0.0, 0.9, -0.9})) == 1.0);
  CHECK(ind(make_path({0.0, 1.1, 0.0})) == 0.0);
  CHECK(ind(make_path({0.0, -1.0, 1.0})) == 1.0);  // boundary included
}

TEST_CASE("clipping idempotence: larger clip does not change unclipped values") {
  const std::vector<double> verts{0.0, 0.4, -0.6, 0.2};
  const GridPath p = make_path(verts);
  for (auto make : {&PathFunctional::clipped_endpoint,
                    &PathFunctional::clipped_running_max,
                    &PathFunctional::clipped_abs_max,
                    &PathFunctional::clipped_integral}) {
    const double at1 = (*make)(1.0)(p);
    const double at100 = (*make)(100.0)(p);
    CHECK(at1 == at100);  // path range is inside [-1, 1]
  }
}

TEST_CASE("vertex refinement leaves every functional unchanged") {
  RandomEngine eng(SeedSpec{5, 0}.child("refine"));
  const std::vector<PathFunctional> fs = {
      PathFunctional::clipped_endpoint(1.0),
      PathFunctional::clipped_running_max(1.0),
      PathFunctional::clipped_abs_max(1.0),
      PathFunctional::clipped_integral(1.0),
      PathFunctional::soft_barrier(-1.0, 1.5, 0.25),
  };
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> verts(9, 0.0);
    for (std::size_t k = 1; k < verts.size(); ++k) {
      verts[k] = verts[k - 1] + 0.4 * eng.next_gaussian();
    }
    const auto fine = refine(refine(verts));
    for (const auto& f : fs) {
      CHECK(f(make_path(verts)) ==
            doctest::Approx(f(make_path(fine))).epsilon(1e-12));
    }
  }
}

TEST_CASE("declared constants and the Lipschitz self-check") {
  const SeedSpec seed{314, 0};

  const auto endpoint = PathFunctional::clipped_endpoint(2.0);
  CHECK(endpoint.lipschitz_constant() == 1.0);
  CHECK(endpoint.bound() == 2.0);
  const auto rep1 = lipschitz_selfcheck(endpoint, 400, seed);
  CHECK(rep1.max_ratio <= 1.0 + 1e-9);
  CHECK(rep1.max_abs_value <= 2.0);

  const auto soft = PathFunctional::soft_barrier(-1.0, 1.0, 0.25);
  CHECK(soft.lipschitz_constant() == 4.0);
  const auto rep2 = lipschitz_selfcheck(soft, 400, seed);
  CHECK(rep2.max_ratio <= 4.0 * (1.0 + 1e-9));
  CHECK(rep2.max_abs_value <= 1.0);

  for (auto make : {&PathFunctional::clipped_running_max,
                    &PathFunctional::clipped_abs_max,
                    &PathFunctional::clipped_integral}) {
    const auto rep = lipschitz_selfcheck((*make)(1.0), 300, seed);
    CHECK(rep.max_ratio <= 1.0 + 1e-9);
    CHECK(rep.max_abs_value <= 1.0);
  }

  CHECK_THROWS_WITH_AS(
      lipschitz_selfcheck(PathFunctional::barrier_indicator(-1.0, 1.0), 10, seed),
      "non-Lipschitz kind: barrier_indicator", std::invalid_argument);
  CHECK_THROWS_AS(PathFunctional::barrier_indicator(-1.0, 1.0).lipschitz_constant(),
                  std::invalid_argument);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(PathFunctional::clipped_endpoint(0.0), std::invalid_argument);
  CHECK_THROWS_AS(PathFunctional::clipped_endpoint(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(PathFunctional::soft_barrier(0.5, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(PathFunctional::soft_barrier(-1.0, -0.5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(PathFunctional::soft_barrier(-1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(PathFunctional::barrier_indicator(1.0, 2.0), std::invalid_argument);
}

TEST_CASE("json round-trip") {
  const std::vector<PathFunctional> fs = {
      PathFunctional::clipped_endpoint(1.5),
      PathFunctional::clipped_running_max(1.0),
      PathFunctional::clipped_abs_max(2.0),
      PathFunctional::clipped_integral(1.0),
      PathFunctional::soft_barrier(-0.5, 1.25, 0.125),
      PathFunctional::barrier_indicator(-1.0, 1.0),
  };
  for (const auto& f : fs) {
    const nlohmann::json j = f.to_json();
    const PathFunctional g = PathFunctional::from_json(j);
    CHECK(g.kind() == f.kind());
    CHECK(g.bound() == f.bound());
    CHECK(g.to_json() == j);
  }
  // Declared constants appear in the serialized form.
  const auto j = PathFunctional::soft_barrier(-1.0, 1.0, 0.25).to_json();
  CHECK(j.at("K").get<double>() == 4.0);
  CHECK(j.at("L").get<double>() == 1.0);
  const auto ji = PathFunctional::barrier_indicator(-1.0, 1.0).to_json();
  CHECK(ji.at("K").is_null());

  CHECK_THROWS_AS(functional_kind_from_string("no_such_kind"), std::invalid_argument);
}
