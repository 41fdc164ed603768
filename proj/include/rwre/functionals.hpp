#pragma once

// Catalog of path functionals used to probe convergence in distribution.
//
// All Lipschitz kinds are exact on piecewise-linear paths: max-type values
// are attained at vertices, the integral uses the (exact) trapezoid rule,
// and the barrier distance is convex along each segment.  The catalog is
// closed — there is no user-scripted functional.

#include <rwre/grid_path.hpp>
#include <rwre/numeric.hpp>
#include <rwre/rng.hpp>

#include <json.hpp>

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rwre {

enum class FunctionalKind {
  clipped_endpoint,     // clamp(x(1))
  clipped_running_max,  // clamp(max_t x(t))
  clipped_abs_max,      // clamp(sup_t |x(t)|)
  clipped_integral,     // clamp(int_0^1 x dt)
  soft_barrier,         // ramp on the distance to staying inside [c1, c2]
  barrier_indicator,    // 1{all vertices in [c1, c2]}; not Lipschitz
};

std::string to_string(FunctionalKind kind);
FunctionalKind functional_kind_from_string(const std::string& name);

class PathFunctional {
 public:
  // clip > 0 is both the clamp level and the uniform bound for the four
  // clipped kinds (Lipschitz constant 1).
  static PathFunctional clipped_endpoint(double clip);
  static PathFunctional clipped_running_max(double clip);
  static PathFunctional clipped_abs_max(double clip);
  static PathFunctional clipped_integral(double clip);
  // Smoothed barrier: f = max(0, 1 - v/width) where v is the largest
  // distance from the path to [c1, c2].  Lipschitz constant 1/width,
  // bound 1.  Requires c1 < 0 < c2, width > 0.
  static PathFunctional soft_barrier(double c1, double c2, double width);
  // Sharp barrier event at the path's grid points (c1 < 0 < c2); bounded by
  // 1 but not Lipschitz, so it is excluded from lipschitz_selfcheck.
  static PathFunctional barrier_indicator(double c1, double c2);

  FunctionalKind kind() const { return kind_; }
  bool is_lipschitz() const { return kind_ != FunctionalKind::barrier_indicator; }
  // Declared Lipschitz constant; throws for barrier_indicator.
  double lipschitz_constant() const;
  // Declared uniform bound L (|f| <= L always holds by construction).
  double bound() const { return bound_; }

  double operator()(const GridPath& path) const {
    return evaluate_vertices(path.vertices());
  }
  // Hot-path entry: evaluate directly on a vertex array (the caller's
  // scratch buffer), skipping GridPath construction.
  double evaluate_vertices(std::span<const double> verts) const;

  nlohmann::json to_json() const;
  static PathFunctional from_json(const nlohmann::json& j);

  // Parameter accessors (meaningful subset depends on kind).
  double clip() const { return clip_; }
  double barrier_lo() const { return c1_; }
  double barrier_hi() const { return c2_; }
  double barrier_width() const { return width_; }

 private:
  PathFunctional() = default;

  FunctionalKind kind_ = FunctionalKind::clipped_endpoint;
  double bound_ = 1.0;
  double clip_ = 1.0;                    // clipped kinds
  double c1_ = -1.0, c2_ = 1.0;          // barrier kinds
  double width_ = 0.25;                  // soft_barrier
};

// Result of probing the declared (K, L) constants with random path pairs.
struct LipschitzReport {
  double max_ratio = 0.0;      // max |f(x)-f(y)| / sup|x-y| observed
  double max_abs_value = 0.0;  // max |f| observed
  double declared_k = 0.0;
  double declared_bound = 0.0;
  int trials = 0;
};

// Thrown when a random pair witnesses |f(x)-f(y)| > K sup|x-y| or |f| > L.
class LipschitzViolation : public std::runtime_error {
 public:
  LipschitzViolation(std::string message, std::vector<double> x,
                     std::vector<double> y)
      : std::runtime_error(std::move(message)),
        witness_x(std::move(x)),
        witness_y(std::move(y)) {}
  std::vector<double> witness_x, witness_y;
};

// Evaluates f on `trials` random path pairs (varying mesh, correlated and
// independent pairs) and checks the declared constants.  Throws
// std::invalid_argument for barrier_indicator and LipschitzViolation on a
// counterexample.
LipschitzReport lipschitz_selfcheck(const PathFunctional& f, int trials,
                                    const SeedSpec& seed);

struct EnvRealization;  // env_models.hpp

// Monte Carlo estimate of the probability that the rescaled walk stays in
// [c1, c2] at every grid point, under the fixed environment.  Thin wrapper
// over quenched_expectation with barrier_indicator.
Estimate barrier_probability(const EnvRealization& env, double c1, double c2,
                             int inner, const SeedSpec& seed);

}  // namespace rwre
