#include "sfrl/pfr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sfrl/error.hpp"
#include "sfrl/rng.hpp"

namespace sfrl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative margin on the stopping test. Scores and the ratio bound are
// rounded separately; the margin absorbs the few ulps between them.
constexpr double kStopMargin = 1e-9;

}  // namespace

PfrCodebook::PfrCodebook(std::uint64_t seed, std::uint64_t substream, std::size_t cap)
    : seed_(seed), substream_(substream), cap_(cap) {
  if (cap == 0) throw ValidationError("PfrCodebook: cap must be positive");
}

void PfrCodebook::extend(std::size_t n) {
  n = std::min(n, cap_);
  if (n <= points_.size()) return;
  CounterRng rng(seed_, substream_);
  points_.reserve(n);
  double t = points_.empty() ? 0.0 : points_.back().time;
  while (points_.size() < n) {
    double next = t;
    while (next <= t) next = t - std::log(rng.uniform_open(counter_++));
    const double mark = rng.uniform(counter_++);
    points_.push_back({mark, next});
    t = next;
  }
}

const PoissonPoint& PfrCodebook::point(std::size_t i) {
  if (i == 0) throw ValidationError("PfrCodebook: indices are 1-based");
  if (i > cap_) {
    throw BudgetError("PfrCodebook: index " + std::to_string(i) + " exceeds the cap of " +
                      std::to_string(cap_) + " points");
  }
  if (i > points_.size()) extend(std::max(i, 2 * points_.size()));
  return points_[i - 1];
}

PfrCodebook build_codebook(std::uint64_t seed, std::uint64_t substream, std::size_t initial_points,
                           std::size_t cap) {
  if (initial_points == 0) throw ValidationError("build_codebook: initial_points must be >= 1");
  PfrCodebook cb(seed, substream, cap);
  cb.extend(initial_points);
  return cb;
}

DiscretePrior::DiscretePrior(Distribution pmf) : pmf_(std::move(pmf)) {
  cdf_.resize(pmf_.size());
  double acc = 0.0;
  for (std::size_t y = 0; y < pmf_.size(); ++y) {
    acc += pmf_[y];
    cdf_[y] = acc;
    if (pmf_[y] > 0.0) last_positive_ = y;
  }
}

std::size_t DiscretePrior::symbol_for(double mark) const {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), mark);
  if (it == cdf_.end()) return last_positive_;
  return static_cast<std::size_t>(it - cdf_.begin());
}

double check_density(const ContinuousPrior& prior, std::size_t intervals) {
  if (!prior.quantile || !prior.density) throw ValidationError("continuous prior is incomplete");
  if (!(prior.ratio_bound >= 1.0) || std::isinf(prior.ratio_bound)) {
    throw ValidationError("continuous prior: ratio bound must be finite and >= 1");
  }
  if (intervals % 2 == 1) ++intervals;
  const double a = prior.quantile(0.0);
  const double b = prior.quantile(std::nextafter(1.0, 0.0));
  if (!std::isfinite(a) || !std::isfinite(b) || !(b > a)) {
    throw ValidationError("continuous prior: quantile range must be finite and nondegenerate");
  }
  // Composite Simpson rule.
  const double h = (b - a) / static_cast<double>(intervals);
  double sum = prior.density(a) + prior.density(b);
  for (std::size_t i = 1; i < intervals; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * prior.density(a + h * static_cast<double>(i));
  }
  const double mass = sum * h / 3.0;
  if (std::abs(mass - 1.0) > 1e-6) {
    throw ValidationError("continuous prior: density integrates to " + std::to_string(mass));
  }
  return mass;
}

SelectionOutcome select(PfrCodebook& cb, const Distribution& conditional, const DiscretePrior& prior) {
  if (conditional.size() != prior.size()) {
    throw ShapeError("select: conditional and prior alphabets differ");
  }
  double r_min = kInf;
  for (std::size_t y = 0; y < prior.size(); ++y) {
    if (conditional[y] == 0.0) continue;
    if (prior[y] == 0.0) {
      throw PreconditionError("select: conditional puts mass on symbol " + std::to_string(y) +
                              " which has zero prior mass");
    }
    r_min = std::min(r_min, prior[y] / conditional[y]);
  }
  SelectionOutcome out;
  double best = kInf;
  for (std::size_t i = 1;; ++i) {
    const PoissonPoint& p = cb.point(i);
    if (p.time * r_min > best * (1.0 + kStopMargin)) break;
    out.points_examined = i;
    const std::size_t y = prior.symbol_for(p.mark);
    if (conditional[y] == 0.0) continue;
    const double score = (p.time * prior[y]) / conditional[y];
    if (score < best) {
      best = score;
      out.k = i;
      out.y = y;
      out.score = score;
    }
  }
  return out;
}

ContinuousOutcome select_continuous(PfrCodebook& cb,
                                    const std::function<double(double)>& conditional_density,
                                    const ContinuousPrior& prior) {
  if (!(prior.ratio_bound >= 1.0) || std::isinf(prior.ratio_bound)) {
    throw PreconditionError("select_continuous: ratio bound must be finite and >= 1");
  }
  ContinuousOutcome out;
  double best = kInf;
  for (std::size_t i = 1;; ++i) {
    const PoissonPoint& p = cb.point(i);
    if (p.time / prior.ratio_bound > best * (1.0 + kStopMargin)) break;
    out.points_examined = i;
    const double y = prior.quantile(p.mark);
    const double c = conditional_density(y);
    if (!(c > 0.0)) continue;
    const double score = (p.time * prior.density(y)) / c;
    if (score < best) {
      best = score;
      out.k = i;
      out.y = y;
      out.score = score;
    }
  }
  return out;
}

std::vector<double> collapse_exponentials(PfrCodebook& cb, const DiscretePrior& prior) {
  std::vector<double> z(prior.size(), kInf);
  std::size_t missing = 0;
  for (std::size_t y = 0; y < prior.size(); ++y) {
    if (prior[y] > 0.0) ++missing;
  }
  for (std::size_t i = 1; missing > 0; ++i) {
    const PoissonPoint& p = cb.point(i);
    const std::size_t y = prior.symbol_for(p.mark);
    if (std::isinf(z[y])) {
      z[y] = p.time * prior[y];
      --missing;
    }
  }
  return z;
}

InducedFunction induced_function(PfrCodebook& cb, const Kernel& kernel, const DiscretePrior& prior) {
  InducedFunction f;
  f.table.reserve(kernel.input_size());
  for (std::size_t x = 0; x < kernel.input_size(); ++x) {
    f.table.push_back(select(cb, kernel.row(x), prior).y);
  }
  return f;
}

SelectionOutcome conditional_select(PfrCodebook& cb, std::size_t u, const Distribution& conditional,
                                    const std::vector<DiscretePrior>& prior_given_u) {
  if (u >= prior_given_u.size()) throw ShapeError("conditional_select: u out of range");
  return select(cb, conditional, prior_given_u[u]);
}

}  // namespace sfrl
