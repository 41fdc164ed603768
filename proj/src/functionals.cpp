#include <rwre/functionals.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace rwre {

namespace {

double clamp_sym(double v, double level) {
  return std::clamp(v, -level, level);
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

std::string to_string(FunctionalKind kind) {
  switch (kind) {
    case FunctionalKind::clipped_endpoint: return "clipped_endpoint";
    case FunctionalKind::clipped_running_max: return "clipped_running_max";
    case FunctionalKind::clipped_abs_max: return "clipped_abs_max";
    case FunctionalKind::clipped_integral: return "clipped_integral";
    case FunctionalKind::soft_barrier: return "soft_barrier";
    case FunctionalKind::barrier_indicator: return "barrier_indicator";
  }
  throw std::logic_error("unreachable functional kind");
}

FunctionalKind functional_kind_from_string(const std::string& name) {
  static const std::map<std::string, FunctionalKind> table = {
      {"clipped_endpoint", FunctionalKind::clipped_endpoint},
      {"clipped_running_max", FunctionalKind::clipped_running_max},
      {"clipped_abs_max", FunctionalKind::clipped_abs_max},
      {"clipped_integral", FunctionalKind::clipped_integral},
      {"soft_barrier", FunctionalKind::soft_barrier},
      {"barrier_indicator", FunctionalKind::barrier_indicator},
  };
  const auto it = table.find(name);
  if (it == table.end()) {
    throw std::invalid_argument("unknown functional kind: " + name);
  }
  return it->second;
}

PathFunctional PathFunctional::clipped_endpoint(double clip) {
  require(clip > 0.0, "clipped_endpoint: clip must be > 0");
  PathFunctional f;
  f.kind_ = FunctionalKind::clipped_endpoint;
  f.clip_ = f.bound_ = clip;
  return f;
}

PathFunctional PathFunctional::clipped_running_max(double clip) {
  require(clip > 0.0, "clipped_running_max: clip must be > 0");
  PathFunctional f;
  f.kind_ = FunctionalKind::clipped_running_max;
  f.clip_ = f.bound_ = clip;
  return f;
}

PathFunctional PathFunctional::clipped_abs_max(double clip) {
  require(clip > 0.0, "clipped_abs_max: clip must be > 0");
  PathFunctional f;
  f.kind_ = FunctionalKind::clipped_abs_max;
  f.clip_ = f.bound_ = clip;
  return f;
}

PathFunctional PathFunctional::clipped_integral(double clip) {
  require(clip > 0.0, "clipped_integral: clip must be > 0");
  PathFunctional f;
  f.kind_ = FunctionalKind::clipped_integral;
  f.clip_ = f.bound_ = clip;
  return f;
}

PathFunctional PathFunctional::soft_barrier(double c1, double c2, double width) {
  require(c1 < 0.0, "soft_barrier: c1 must be < 0");
  require(c2 > 0.0, "soft_barrier: c2 must be > 0");
  require(width > 0.0, "soft_barrier: width must be > 0");
  PathFunctional f;
  f.kind_ = FunctionalKind::soft_barrier;
  f.c1_ = c1;
  f.c2_ = c2;
  f.width_ = width;
  f.bound_ = 1.0;
  return f;
}

PathFunctional PathFunctional::barrier_indicator(double c1, double c2) {
  require(c1 < 0.0, "barrier_indicator: c1 must be < 0");
  require(c2 > 0.0, "barrier_indicator: c2 must be > 0");
  PathFunctional f;
  f.kind_ = FunctionalKind::barrier_indicator;
  f.c1_ = c1;
  f.c2_ = c2;
  f.bound_ = 1.0;
  return f;
}

double PathFunctional::lipschitz_constant() const {
  switch (kind_) {
    case FunctionalKind::clipped_endpoint:
    case FunctionalKind::clipped_running_max:
    case FunctionalKind::clipped_abs_max:
    case FunctionalKind::clipped_integral:
      return 1.0;
    case FunctionalKind::soft_barrier:
      return 1.0 / width_;
    case FunctionalKind::barrier_indicator:
      throw std::invalid_argument("non-Lipschitz kind: barrier_indicator");
  }
  throw std::logic_error("unreachable functional kind");
}

double PathFunctional::evaluate_vertices(std::span<const double> verts) const {
  switch (kind_) {
    case FunctionalKind::clipped_endpoint:
      return clamp_sym(verts.back(), clip_);
    case FunctionalKind::clipped_running_max: {
      double m = verts.front();
      for (double v : verts) m = std::max(m, v);
      return clamp_sym(m, clip_);
    }
    case FunctionalKind::clipped_abs_max: {
      double m = 0.0;
      for (double v : verts) m = std::max(m, std::abs(v));
      return clamp_sym(m, clip_);
    }
    case FunctionalKind::clipped_integral: {
      // Trapezoid rule on the uniform mesh: exact for the interpolant.
      NeumaierSum s;
      s.add(0.5 * verts.front());
      for (std::size_t k = 1; k + 1 < verts.size(); ++k) s.add(verts[k]);
      s.add(0.5 * verts.back());
      const double dt = 1.0 / static_cast<double>(verts.size() - 1);
      return clamp_sym(s.value() * dt, clip_);
    }
    case FunctionalKind::soft_barrier: {
      // Distance from a point to [c1, c2] is convex, so along each linear
      // segment the max sits at an endpoint: the vertex scan is exact for
      // the whole path, not just the grid times.
      double worst = 0.0;
      for (double v : verts) {
        worst = std::max(worst, std::max(c1_ - v, v - c2_));
      }
      return std::max(0.0, 1.0 - std::max(0.0, worst) / width_);
    }
    case FunctionalKind::barrier_indicator: {
      for (double v : verts) {
        if (v < c1_ || v > c2_) return 0.0;
      }
      return 1.0;
    }
  }
  throw std::logic_error("unreachable functional kind");
}

nlohmann::json PathFunctional::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind_);
  if (is_lipschitz()) {
    j["K"] = lipschitz_constant();
  } else {
    j["K"] = nullptr;
  }
  j["L"] = bound_;
  nlohmann::json params = nlohmann::json::object();
  switch (kind_) {
    case FunctionalKind::clipped_endpoint:
    case FunctionalKind::clipped_running_max:
    case FunctionalKind::clipped_abs_max:
    case FunctionalKind::clipped_integral:
      params["clip"] = clip_;
      break;
    case FunctionalKind::soft_barrier:
      params["c1"] = c1_;
      params["c2"] = c2_;
      params["width"] = width_;
      break;
    case FunctionalKind::barrier_indicator:
      params["c1"] = c1_;
      params["c2"] = c2_;
      break;
  }
  j["params"] = params;
  return j;
}

PathFunctional PathFunctional::from_json(const nlohmann::json& j) {
  const auto kind = functional_kind_from_string(j.at("kind").get<std::string>());
  const auto& params = j.at("params");
  switch (kind) {
    case FunctionalKind::clipped_endpoint:
      return clipped_endpoint(params.at("clip").get<double>());
    case FunctionalKind::clipped_running_max:
      return clipped_running_max(params.at("clip").get<double>());
    case FunctionalKind::clipped_abs_max:
      return clipped_abs_max(params.at("clip").get<double>());
    case FunctionalKind::clipped_integral:
      return clipped_integral(params.at("clip").get<double>());
    case FunctionalKind::soft_barrier:
      return soft_barrier(params.at("c1").get<double>(),
                          params.at("c2").get<double>(),
                          params.at("width").get<double>());
    case FunctionalKind::barrier_indicator:
      return barrier_indicator(params.at("c1").get<double>(),
                               params.at("c2").get<double>());
  }
  throw std::logic_error("unreachable functional kind");
}

LipschitzReport lipschitz_selfcheck(const PathFunctional& f, int trials,
                                    const SeedSpec& seed) {
  if (!f.is_lipschitz()) {
    throw std::invalid_argument("non-Lipschitz kind: barrier_indicator");
  }
  const double k_declared = f.lipschitz_constant();
  const double bound = f.bound();

  LipschitzReport report;
  report.declared_k = k_declared;
  report.declared_bound = bound;
  report.trials = trials;

  for (int trial = 0; trial < trials; ++trial) {
    RandomEngine eng(seed.child("lipschitz").child(static_cast<std::uint64_t>(trial)));
    const std::size_t mesh = 1 + (eng.next_u32() % 64);
    const double step_sd = 1.0 / std::sqrt(static_cast<double>(mesh));

    std::vector<double> x(mesh + 1), y(mesh + 1);
    x[0] = 0.0;
    for (std::size_t k = 1; k <= mesh; ++k) {
      x[k] = x[k - 1] + step_sd * eng.next_gaussian();
    }
    // Alternate between a small perturbation of x (probes the local slope,
    // where the ratio approaches K) and an independent second path.
    if (trial % 2 == 0) {
      const double amp = 0.05 * std::pow(2.0, -(trial % 10));
      for (std::size_t k = 0; k <= mesh; ++k) {
        y[k] = x[k] + amp * (2.0 * eng.next_double() - 1.0);
      }
    } else {
      y[0] = 0.0;
      for (std::size_t k = 1; k <= mesh; ++k) {
        y[k] = y[k - 1] + step_sd * eng.next_gaussian();
      }
    }

    double sup_diff = 0.0;
    for (std::size_t k = 0; k <= mesh; ++k) {
      sup_diff = std::max(sup_diff, std::abs(x[k] - y[k]));
    }
    const double fx = f.evaluate_vertices(x);
    const double fy = f.evaluate_vertices(y);
    report.max_abs_value =
        std::max(report.max_abs_value, std::max(std::abs(fx), std::abs(fy)));

    if (std::max(std::abs(fx), std::abs(fy)) > bound) {
      std::ostringstream msg;
      msg << "bound violation at trial " << trial << ": |f| = "
          << std::max(std::abs(fx), std::abs(fy)) << " > L = " << bound;
      throw LipschitzViolation(msg.str(), std::move(x), std::move(y));
    }
    if (sup_diff > 0.0) {
      const double ratio = std::abs(fx - fy) / sup_diff;
      report.max_ratio = std::max(report.max_ratio, ratio);
      // Tiny slack for the division; the functionals themselves are exact.
      if (ratio > k_declared * (1.0 + 1e-9)) {
        std::ostringstream msg;
        msg << "Lipschitz violation at trial " << trial << ": ratio = " << ratio
            << " > K = " << k_declared;
        throw LipschitzViolation(msg.str(), std::move(x), std::move(y));
      }
    }
  }
  return report;
}

}  // namespace rwre
