#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <rwre/grid_path.hpp>
#include <rwre/rng.hpp>

#include <cmath>
#include <vector>

using namespace rwre;

TEST_CASE("construction requires at least one segment") {
  CHECK_THROWS_AS(GridPath(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(GridPath(std::vector<double>{1.0}), std::invalid_argument);
  CHECK(GridPath(std::vector<double>{0.0, 1.0}).mesh() == 1);
}

TEST_CASE("vertex identity: eval(k/m) returns stored vertices exactly") {
  RandomEngine eng(SeedSpec{11, 0}.child("grid"));
  for (std::size_t m : {1u, 2u, 3u, 7u, 64u, 1000u, 4096u}) {
    std::vector<double> verts(m + 1);
    for (auto& v : verts) v = eng.next_gaussian();
    GridPath p(verts);
    for (std::size_t k = 0; k <= m; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(m);
      // Exact equality is the contract: t*m rounding is snapped away.
      CHECK(p.eval(t) == verts[k]);
    }
  }
}

TEST_CASE("linear interpolation between vertices") {
  GridPath p(std::vector<double>{0.0, 1.0, -1.0});
  CHECK(p.eval(0.25) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p.eval(0.75) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p.eval(0.0) == 0.0);
  CHECK(p.eval(1.0) == -1.0);
  // Out-of-range times clamp to the endpoints.
  CHECK(p.eval(-0.5) == 0.0);
  CHECK(p.eval(1.5) == -1.0);
}

TEST_CASE("sup norm equals the vertex maximum") {
  GridPath p(std::vector<double>{0.0, 2.0, -3.0, 1.0});
  CHECK(p.sup_norm() == 3.0);
  CHECK(p.max_vertex() == 2.0);

  // Dense evaluation never exceeds the vertex scan (piecewise linearity).
  RandomEngine eng(SeedSpec{12, 0}.child("grid"));
  std::vector<double> verts(17);
  for (auto& v : verts) v = eng.next_gaussian();
  GridPath q(verts);
  double dense = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    dense = std::max(dense, std::abs(q.eval(i / 10000.0)));
  }
  CHECK(dense <= q.sup_norm() + 1e-12);
  CHECK(dense == doctest::Approx(q.sup_norm()).epsilon(1e-9));
}
