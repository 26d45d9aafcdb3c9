#include "sfrl/numopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sfrl/error.hpp"

namespace sfrl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

// --- capacity --------------------------------------------------------------

CapacitySolution blahut_arimoto_capacity(const Kernel& channel, double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw ValidationError("blahut_arimoto_capacity: tol must be positive");
  const std::size_t nx = channel.input_size();
  const std::size_t ny = channel.output_size();
  std::vector<double> p(nx, 1.0 / static_cast<double>(nx));
  std::vector<double> q(ny);
  std::vector<double> div(nx);
  double lower = 0.0;
  double gap = kInf;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < ny; ++y) q[y] += p[x] * channel.row(x)[y];
    }
    double upper = 0.0;
    lower = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      double dx = 0.0;
      for (std::size_t y = 0; y < ny; ++y) {
        double w = channel.row(x)[y];
        if (w > 0.0) dx += w * std::log2(w / q[y]);
      }
      div[x] = std::max(dx, 0.0);
      lower += p[x] * div[x];
      upper = std::max(upper, div[x]);
    }
    gap = upper - lower;
    if (gap <= tol) {
      Distribution input = Distribution::from_weights(p);
      Distribution output = channel.output_marginal(input);
      return {lower, std::move(input), std::move(output), it, gap};
    }
    // Shift exponents by the maximum for stability.
    double total = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      p[x] *= std::exp2(div[x] - upper);
      total += p[x];
    }
    for (double& v : p) v /= total;
  }
  throw ConvergenceError("blahut_arimoto_capacity: no convergence within max_iter", lower, gap);
}

// --- rate-distortion -------------------------------------------------------

double min_distortion(const Distribution& source, const DistortionMatrix& d) {
  if (d.rows() != source.size()) throw ShapeError("distortion rows must match source alphabet");
  double total = 0.0;
  for (std::size_t x = 0; x < source.size(); ++x) {
    if (source[x] == 0.0) continue;
    double best = kInf;
    for (std::size_t y = 0; y < d.cols(); ++y) best = std::min(best, d(x, y));
    total += source[x] * best;
  }
  return total;
}

double zero_rate_distortion(const Distribution& source, const DistortionMatrix& d) {
  if (d.rows() != source.size()) throw ShapeError("distortion rows must match source alphabet");
  double best = kInf;
  for (std::size_t y = 0; y < d.cols(); ++y) {
    double e = 0.0;
    for (std::size_t x = 0; x < source.size(); ++x) {
      if (source[x] > 0.0) e += source[x] * d(x, y);
    }
    best = std::min(best, e);
  }
  return best;
}

namespace {

double expected_distortion(const Distribution& source, const DistortionMatrix& d,
                           const Kernel& k) {
  double e = 0.0;
  for (std::size_t x = 0; x < source.size(); ++x) {
    if (source[x] == 0.0) continue;
    for (std::size_t y = 0; y < d.cols(); ++y) {
      double w = k.row(x)[y];
      if (w > 0.0) e += source[x] * w * d(x, y);
    }
  }
  return e;
}

struct FixedSlopeResult {
  Kernel kernel;
  double rate;
  double distortion;
  double gap;  // bits
  std::size_t iterations;
};

// Blahut-Arimoto at a fixed slope. `weight(x, y)` is exp(-slope*(d - min_y d))
// (or the argmin indicator at infinite slope); kernel rows are q(y)*weight
// renormalized. The certificate max_y c(y) - 1 bounds the excess of
// I + slope*E d over its minimum.
FixedSlopeResult solve_fixed_slope(const Distribution& source, const DistortionMatrix& d,
                                   const std::vector<double>& weight, double tol,
                                   std::size_t max_iter, bool throw_on_budget = true) {
  const std::size_t nx = source.size();
  const std::size_t ny = d.cols();
  std::vector<double> q(ny, 1.0 / static_cast<double>(ny));
  std::vector<double> c(ny);
  std::vector<double> norm(nx);
  double gap = kInf;
  std::size_t it = 0;
  for (it = 1; it <= max_iter; ++it) {
    std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
      if (source[x] == 0.0) continue;
      double s = 0.0;
      for (std::size_t y = 0; y < ny; ++y) s += q[y] * weight[x * ny + y];
      norm[x] = s;
      for (std::size_t y = 0; y < ny; ++y) c[y] += source[x] * weight[x * ny + y] / s;
    }
    double cmax = *std::max_element(c.begin(), c.end());
    gap = (cmax - 1.0) / std::numbers::ln2;
    if (gap <= tol) break;
    double total = 0.0;
    for (std::size_t y = 0; y < ny; ++y) {
      q[y] *= c[y];
      total += q[y];
    }
    for (double& v : q) v /= total;
  }
  if (it > max_iter && throw_on_budget) {
    throw ConvergenceError("blahut_arimoto_rate_distortion: no convergence within max_iter", 0.0,
                           gap);
  }
  it = std::min(it, max_iter);
  std::vector<Distribution> rows;
  rows.reserve(nx);
  for (std::size_t x = 0; x < nx; ++x) {
    std::vector<double> row(ny);
    double s = 0.0;
    for (std::size_t y = 0; y < ny; ++y) {
      row[y] = q[y] * weight[x * ny + y];
      s += row[y];
    }
    if (!(s > 0.0)) {
      // Zero-probability input whose admissible outputs all lost their mass.
      std::fill(row.begin(), row.end(), 0.0);
      for (std::size_t y = 0; y < ny; ++y) {
        if (weight[x * ny + y] > 0.0) row[y] = 1.0;
      }
    }
    rows.push_back(Distribution::from_weights(std::move(row)));
  }
  Kernel kernel(std::move(rows));
  double rate = mutual_information(kernel.joint(source));
  double dist = expected_distortion(source, d, kernel);
  return {std::move(kernel), rate, dist, std::max(gap, 0.0), it};
}

std::vector<double> slope_weights(const Distribution& source, const DistortionMatrix& d,
                                  double slope) {
  const std::size_t nx = source.size();
  const std::size_t ny = d.cols();
  std::vector<double> w(nx * ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    double dmin = kInf;
    for (std::size_t y = 0; y < ny; ++y) dmin = std::min(dmin, d(x, y));
    for (std::size_t y = 0; y < ny; ++y) {
      double v = d(x, y);
      if (std::isinf(v) || std::isinf(dmin)) continue;
      if (std::isinf(slope)) {
        w[x * ny + y] = (v == dmin) ? 1.0 : 0.0;
      } else {
        w[x * ny + y] = std::exp(-slope * (v - dmin));
      }
    }
    if (std::isinf(dmin)) {
      // Only reachable for zero-probability inputs; keep the row well defined.
      for (std::size_t y = 0; y < ny; ++y) w[x * ny + y] = 1.0;
    }
  }
  return w;
}

}  // namespace

RdSolution blahut_arimoto_rate_distortion(const Distribution& source, const DistortionMatrix& d,
                                          double target, double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw ValidationError("blahut_arimoto_rate_distortion: tol must be positive");
  if (std::isnan(target)) throw ValidationError("blahut_arimoto_rate_distortion: D is NaN");
  const double dmin = min_distortion(source, d);
  if (std::isinf(dmin)) {
    throw InfeasibleError("rate-distortion: some source symbol has only infinite distortions");
  }
  if (target < dmin - 1e-12) {
    throw InfeasibleError("rate-distortion: D = " + std::to_string(target) +
                          " is below the minimum achievable distortion " + std::to_string(dmin));
  }
  const std::size_t ny = d.cols();
  const double dmax = zero_rate_distortion(source, d);
  if (target >= dmax) {
    std::size_t best = 0;
    double best_e = kInf;
    for (std::size_t y = 0; y < ny; ++y) {
      double e = 0.0;
      for (std::size_t x = 0; x < source.size(); ++x) {
        if (source[x] > 0.0) e += source[x] * d(x, y);
      }
      if (e < best_e) {
        best_e = e;
        best = y;
      }
    }
    Kernel k = Kernel::constant(source.size(), Distribution::point_mass(ny, best));
    return {std::move(k), 0.0, best_e, 0, 0.0, 0.0};
  }

  std::size_t total_iter = 0;
  // Unconverged solves still yield valid kernels and valid certificates, so
  // the bisection keeps them and the final gap accounts for them.
  auto solve = [&](double slope) {
    auto r = solve_fixed_slope(source, d, slope_weights(source, d, slope), tol / 2, max_iter, false);
    total_iter += r.iterations;
    return r;
  };
  // Duality: R(target) >= I_s + s (D_s - target) - gap_s for any slope s.
  auto lower_bound = [&](const FixedSlopeResult& r, double slope) {
    return r.rate + slope * (r.distortion - target) / std::numbers::ln2 - r.gap;
  };
  // Kernels mixed to meet the target exactly; I is convex in the kernel, so
  // the mixture's rate is at most the chord.
  auto mix = [&](const FixedSlopeResult& a, double slope_a, const FixedSlopeResult& b,
                 double slope_b) {
    const double w = (target - b.distortion) / (a.distortion - b.distortion);
    std::vector<Distribution> rows;
    rows.reserve(source.size());
    for (std::size_t x = 0; x < source.size(); ++x) {
      std::vector<double> row(ny);
      for (std::size_t y = 0; y < ny; ++y) row[y] = w * a.kernel.row(x)[y] + (1.0 - w) * b.kernel.row(x)[y];
      rows.push_back(Distribution::from_weights(std::move(row)));
    }
    Kernel k(std::move(rows));
    const double rate = mutual_information(k.joint(source));
    const double dist = expected_distortion(source, d, k);
    const double gap = rate - std::max({lower_bound(a, slope_a), lower_bound(b, slope_b), 0.0});
    return RdSolution{std::move(k), rate, dist, total_iter, std::max(gap, 0.0), slope_b};
  };
  auto finish = [&](FixedSlopeResult r, double slope) {
    double extra = std::isinf(slope) ? 0.0
                                     : slope * std::max(target - r.distortion, 0.0) /
                                           std::numbers::ln2;
    return RdSolution{std::move(r.kernel), r.rate, r.distortion, total_iter, r.gap + extra, slope};
  };

  if (target <= dmin + 1e-12) return finish(solve(kInf), kInf);

  // Bracket the slope whose distortion meets the target: D(slope) decreases.
  constexpr double kMaxSlope = 1e7;
  double hi = 1.0;
  FixedSlopeResult hi_sol = solve(hi);
  while (hi_sol.distortion > target) {
    hi *= 2.0;
    if (hi > kMaxSlope) return finish(solve(kInf), kInf);
    hi_sol = solve(hi);
  }
  double lo = hi / 2.0;
  if (hi == 1.0) {
    lo = 0.5;
    while (solve(lo).distortion <= target) {
      hi = lo;
      lo /= 2.0;
      if (lo < 1e-12) {
        hi_sol = solve(hi);
        return finish(std::move(hi_sol), hi);
      }
    }
    hi_sol = solve(hi);
  }
  FixedSlopeResult lo_sol = solve(lo);
  for (int step = 0; step < 200; ++step) {
    double gap_bits = hi * (target - hi_sol.distortion) / std::numbers::ln2;
    if (gap_bits <= tol / 2 && hi_sol.gap <= tol / 2) break;
    if (lo_sol.distortion > target) {
      RdSolution m = mix(lo_sol, lo, hi_sol, hi);
      if (m.gap <= tol || hi - lo <= 1e-15 * hi) return m;
    }
    if (hi - lo <= 1e-15 * hi) break;
    double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) mid = 0.5 * (lo + hi);
    auto mid_sol = solve(mid);
    if (mid_sol.distortion <= target) {
      hi = mid;
      hi_sol = std::move(mid_sol);
    } else {
      lo = mid;
      lo_sol = std::move(mid_sol);
    }
  }
  RdSolution out = finish(std::move(hi_sol), hi);
  if (out.gap > tol) {
    throw ConvergenceError("blahut_arimoto_rate_distortion: gap above tol", out.rate, out.gap);
  }
  return out;
}

// --- convex mixing ---------------------------------------------------------

namespace {

constexpr double kPivotEps = 1e-11;

// Dense simplex tableau over the mixture weights:
//   sum_j P[j][c] w_j + s_c = b_c  for each constrained coordinate c
//   sum_j w_j = 1,  w, s >= 0,
// with one artificial variable per row for phase one. Bland's rule throughout.
class MixLp {
 public:
  MixLp(const std::vector<std::vector<double>>& points, const std::vector<std::size_t>& coords,
        const std::vector<double>& bound)
      : n_(points.size()), m_(coords.size()), rows_(m_ + 1), cols_(n_ + m_ + rows_) {
    t_.assign(rows_ * (cols_ + 1), 0.0);
    basis_.resize(rows_);
    for (std::size_t i = 0; i < m_; ++i) {
      double sign = bound[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) at(i, j) = sign * points[j][coords[i]];
      at(i, n_ + i) = sign;
      rhs(i) = sign * bound[i];
    }
    for (std::size_t j = 0; j < n_; ++j) at(m_, j) = 1.0;
    rhs(m_) = 1.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      at(i, artificial(i)) = 1.0;
      basis_[i] = artificial(i);
    }
  }

  // Returns the minimal total artificial mass (zero when feasible).
  double phase_one() {
    std::vector<double> cost(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) cost[artificial(i)] = 1.0;
    run(cost, /*allow_artificial=*/true);
    double infeas = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (is_artificial(basis_[i])) infeas += rhs(i);
    }
    return infeas;
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < rows_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (std::abs(at(i, j)) > 1e-9) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  void phase_two(const std::vector<double>& weight_cost) {
    std::vector<double> cost(cols_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost[j] = weight_cost[j];
    run(cost, /*allow_artificial=*/false);
  }

  std::vector<double> weights() const {
    std::vector<double> w(n_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < n_) w[basis_[i]] = std::max(rhs(i), 0.0);
    }
    return w;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return t_[i * (cols_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * (cols_ + 1) + j]; }
  double& rhs(std::size_t i) { return t_[i * (cols_ + 1) + cols_]; }
  double rhs(std::size_t i) const { return t_[i * (cols_ + 1) + cols_]; }
  std::size_t artificial(std::size_t i) const { return n_ + m_ + i; }
  bool is_artificial(std::size_t j) const { return j >= n_ + m_; }

  void pivot(std::size_t r, std::size_t c) {
    const double pv = at(r, c);
    for (std::size_t j = 0; j <= cols_; ++j) t_[r * (cols_ + 1) + j] /= pv;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) {
        t_[i * (cols_ + 1) + j] -= f * t_[r * (cols_ + 1) + j];
      }
    }
    basis_[r] = c;
  }

  void run(const std::vector<double>& cost, bool allow_artificial) {
    const std::size_t limit = 50 * (cols_ + rows_) + 1000;
    std::vector<bool> in_basis(cols_, false);
    for (std::size_t step = 0; step < limit; ++step) {
      std::fill(in_basis.begin(), in_basis.end(), false);
      for (auto b : basis_) in_basis[b] = true;
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (in_basis[j] || (!allow_artificial && is_artificial(j))) continue;
        double reduced = cost[j];
        for (std::size_t i = 0; i < rows_; ++i) reduced -= cost[basis_[i]] * at(i, j);
        if (reduced < -kPivotEps) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return;
      std::size_t leave = rows_;
      double best_ratio = kInf;
      for (std::size_t i = 0; i < rows_; ++i) {
        const double a = at(i, enter);
        if (a <= kPivotEps) continue;
        const double ratio = rhs(i) / a;
        if (ratio < best_ratio - 1e-15 ||
            (ratio <= best_ratio + 1e-15 && leave < rows_ && basis_[i] < basis_[leave])) {
          best_ratio = std::min(ratio, best_ratio);
          leave = i;
        }
      }
      if (leave == rows_) return;  // unbounded direction; cannot happen on the simplex
      pivot(leave, enter);
    }
    throw ConvergenceError("mixing LP: pivot limit reached", 0.0, 0.0);
  }

  std::size_t n_, m_, rows_, cols_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

void check_points(const std::vector<std::vector<double>>& points, const std::vector<double>& target) {
  if (points.empty()) throw ValidationError("mixing: no candidate points");
  for (const auto& p : points) {
    if (p.size() != target.size()) throw ShapeError("mixing: point dimension mismatch");
    for (double v : p) {
      if (!std::isfinite(v)) throw ValidationError("mixing: non-finite coordinate");
    }
  }
  for (double v : target) {
    if (std::isnan(v)) throw ValidationError("mixing: NaN target");
  }
}

MixtureSolution extract(const std::vector<std::vector<double>>& points, std::vector<double> w) {
  double total = 0.0;
  for (double v : w) total += v;
  MixtureSolution sol;
  sol.achieved.assign(points.front().size(), 0.0);
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] <= 0.0) continue;
    sol.support.push_back(j);
    sol.weights.push_back(w[j] / total);
  }
  for (std::size_t s = 0; s < sol.support.size(); ++s) {
    for (std::size_t c = 0; c < sol.achieved.size(); ++c) {
      sol.achieved[c] += sol.weights[s] * points[sol.support[s]][c];
    }
  }
  return sol;
}

std::ptrdiff_t worst_coordinate(const std::vector<std::vector<double>>& points,
                                const std::vector<std::size_t>& coords,
                                const std::vector<double>& bound, const std::vector<double>& w) {
  // A coordinate no single point can meet is reported first.
  for (std::size_t i = 0; i < coords.size(); ++i) {
    double lowest = kInf;
    for (const auto& p : points) lowest = std::min(lowest, p[coords[i]]);
    if (lowest > bound[i]) return static_cast<std::ptrdiff_t>(coords[i]);
  }
  double total = 0.0;
  for (double v : w) total += v;
  std::ptrdiff_t worst = coords.empty() ? -1 : static_cast<std::ptrdiff_t>(coords.front());
  double worst_excess = -kInf;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    double mixed = 0.0;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (total > 0.0) mixed += w[j] / total * points[j][coords[i]];
    }
    if (mixed - bound[i] > worst_excess) {
      worst_excess = mixed - bound[i];
      worst = static_cast<std::ptrdiff_t>(coords[i]);
    }
  }
  return worst;
}

MixtureSolution solve_mix(const std::vector<std::vector<double>>& points,
                          const std::vector<double>& target, std::optional<std::size_t> objective,
                          double tol) {
  check_points(points, target);
  if (!(tol >= 0.0)) throw ValidationError("mixing: tol must be nonnegative");
  std::vector<std::size_t> coords;
  std::vector<double> bound;
  for (std::size_t c = 0; c < target.size(); ++c) {
    if (objective && *objective == c) continue;
    coords.push_back(c);
    bound.push_back(target[c] + tol / 2);
  }
  MixLp lp(points, coords, bound);
  double infeas = lp.phase_one();
  if (infeas > 1e-9) {
    auto coord = worst_coordinate(points, coords, bound, lp.weights());
    throw InfeasibleError("mixing: no convex combination meets the target (coordinate " +
                              std::to_string(coord) + " violated)",
                          coord);
  }
  lp.drive_out_artificials();
  if (objective) {
    std::vector<double> cost(points.size());
    for (std::size_t j = 0; j < points.size(); ++j) cost[j] = points[j][*objective];
    lp.phase_two(cost);
  }
  MixtureSolution sol = extract(points, lp.weights());
  const double slack = tol > 0.0 ? tol : 1e-12;
  for (std::size_t c = 0; c < target.size(); ++c) {
    if (sol.achieved[c] > target[c] + slack * std::max(1.0, tol > 0.0 ? 1.0 : std::abs(target[c]))) {
      throw InfeasibleError("mixing: coordinate " + std::to_string(c) + " exceeds its target by " +
                                std::to_string(sol.achieved[c] - target[c]),
                            static_cast<std::ptrdiff_t>(c));
    }
  }
  return sol;
}

}  // namespace

MixtureSolution caratheodory_mix(const std::vector<std::vector<double>>& points,
                                 const std::vector<double>& target, double tol) {
  return solve_mix(points, target, std::nullopt, tol);
}

MixtureSolution minimizing_mix(const std::vector<std::vector<double>>& points,
                               const std::vector<double>& target, std::size_t objective,
                               double tol) {
  if (objective >= target.size()) throw ShapeError("minimizing_mix: objective out of range");
  return solve_mix(points, target, objective, tol);
}

}  // namespace sfrl
