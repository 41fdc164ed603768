#include <rwre/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rwre {

namespace {

void require_nonempty(const EmpiricalDist& d, const char* who) {
  if (d.values.empty()) {
    throw std::invalid_argument(std::string(who) + ": empty distribution");
  }
}

// count of values <= x in a sorted vector.
std::size_t count_leq(const std::vector<double>& v, double x) {
  return static_cast<std::size_t>(
      std::upper_bound(v.begin(), v.end(), x) - v.begin());
}

// One-sided Lévy feasibility: F_A(x) <= F_B(x+eps)+eps for all x.  Both
// CDFs are right-continuous steps, so it is enough to test x at A's jump
// points (F_A constant, F_B(x+eps) minimal at the interval's left end).
bool levy_one_side_ok(const std::vector<double>& a, const std::vector<double>& b,
                      double eps) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t jb = 0;  // count of b-values <= current a-value + eps
  for (std::size_t ia = 0; ia < a.size();) {
    const double x = a[ia];
    while (ia < a.size() && a[ia] == x) ++ia;  // F_A(x) = ia/na after this
    const double target = x + eps;
    while (jb < b.size() && b[jb] <= target) ++jb;
    if (static_cast<double>(ia) / na >
        static_cast<double>(jb) / nb + eps + 1e-15) {
      return false;
    }
  }
  return true;
}

bool levy_feasible(const std::vector<double>& p, const std::vector<double>& q,
                   double eps) {
  return levy_one_side_ok(q, p, eps) && levy_one_side_ok(p, q, eps);
}

}  // namespace

double ecdf_eval(const EmpiricalDist& dist, double x) {
  require_nonempty(dist, "ecdf_eval");
  return static_cast<double>(count_leq(dist.values, x)) /
         static_cast<double>(dist.values.size());
}

double ks_distance(const EmpiricalDist& p, const EmpiricalDist& q) {
  require_nonempty(p, "ks_distance");
  require_nonempty(q, "ks_distance");
  const auto& a = p.values;
  const auto& b = q.values;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());

  // Merged walk over jump points.  Between jumps both ECDFs are constant,
  // so the post-jump differences cover the sup including left limits.
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < a.size() || j < b.size()) {
    double v;
    if (j >= b.size()) {
      v = a[i];
    } else if (i >= a.size()) {
      v = b[j];
    } else {
      v = std::min(a[i], b[j]);
    }
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na -
                                   static_cast<double>(j) / nb));
  }
  return best;
}

double levy_distance(const EmpiricalDist& p, const EmpiricalDist& q) {
  require_nonempty(p, "levy_distance");
  require_nonempty(q, "levy_distance");
  if (levy_feasible(p.values, q.values, 0.0)) return 0.0;
  double lo = 0.0;  // infeasible
  double hi = 1.0;  // always feasible: F <= 1 <= anything + 1
  while (hi - lo > kLevyAccuracy * 0.25) {
    const double mid = 0.5 * (lo + hi);
    if (levy_feasible(p.values, q.values, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;  // feasible and within the declared accuracy of the infimum
}

ProkhorovBounds prokhorov_bounds(const EmpiricalDist& p, const EmpiricalDist& q) {
  require_nonempty(p, "prokhorov_bounds");
  require_nonempty(q, "prokhorov_bounds");

  // Reduce to equal sizes with the deterministic stride rule: element i of
  // the reduced sample is the floor((i+1/2)·M/N)-th order statistic.
  const std::vector<double>* a = &p.values;
  const std::vector<double>* b = &q.values;
  std::vector<double> reduced;
  if (a->size() != b->size()) {
    const bool a_is_larger = a->size() > b->size();
    const std::vector<double>& big = a_is_larger ? *a : *b;
    const std::size_t n = std::min(a->size(), b->size());
    const std::size_t m = big.size();
    reduced.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      reduced[i] = big[(2 * i + 1) * m / (2 * n)];
    }
    (a_is_larger ? a : b) = &reduced;
  }

  const std::size_t n = a->size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = std::abs((*a)[i] - (*b)[i]);
  std::sort(d.begin(), d.end());

  // Ky Fan value of this coupling: smallest eps with #{d_i > eps}/n <= eps.
  // On the interval [v_j, v_{j+1}) of candidate eps values the violation
  // fraction is constant, so the scan below is exact.
  const double dn = static_cast<double>(n);
  double upper = d.back();  // fallback: eps = max distance always works
  {
    double v = 0.0;
    std::size_t i = 0;
    while (true) {
      // i = count of d <= v; fraction of larger distances:
      const double frac = (dn - static_cast<double>(i)) / dn;
      const double next = i < n ? d[i] : std::numeric_limits<double>::infinity();
      if (frac <= v) {
        upper = v;
        break;
      }
      if (frac < next) {
        upper = frac;
        break;
      }
      v = next;
      while (i < n && d[i] == v) ++i;
    }
  }

  ProkhorovBounds out;
  out.lower = levy_distance(p, q);
  out.upper = upper;
  // The sandwich holds mathematically; rounding in the Lévy bisection can
  // nudge the lower bound a hair above a coinciding upper bound.
  if (out.lower > out.upper) out.lower = out.upper;
  return out;
}

double dkw_band(std::size_t n, double delta) {
  if (n < 1) throw std::invalid_argument("dkw_band: n must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("dkw_band: delta must be in (0, 1)");
  }
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

}  // namespace rwre
