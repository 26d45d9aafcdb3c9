#include "sfrl/efi.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "sfrl/error.hpp"
#include "sfrl/pfr.hpp"
#include "sfrl/rng.hpp"

namespace sfrl {

namespace {

constexpr std::uint64_t kEfiDomain = 0x45464931ULL;
constexpr std::uint64_t kEfiPairDomain = 0x45464932ULL;
constexpr std::uint64_t kSweepDomain = 0x54484554ULL;

void require_pair(const JointDistribution& joint) {
  if (joint.rank() != 2) throw ShapeError("expected a joint over (x, y)");
}

struct Representation {
  Distribution px;
  DiscretePrior prior;
  std::vector<std::optional<Distribution>> rows;
  std::size_t ny;
};

Representation representation(const JointDistribution& joint) {
  require_pair(joint);
  return Representation{joint.marginal(0), DiscretePrior(joint.marginal(1)), conditionals(joint, 1, {0}),
                        joint.shape()[1]};
}

// Law of g(X, z) for one codebook.
std::vector<double> induced_law(const Representation& r, PfrCodebook& cb) {
  std::vector<double> law(r.ny, 0.0);
  for (std::size_t x = 0; x < r.px.size(); ++x) {
    if (r.px[x] == 0.0) continue;
    law[select(cb, *r.rows[x], r.prior).y] += r.px[x];
  }
  return law;
}

PsiEstimate summarize(double sum, double sum_sq, std::size_t n, double info) {
  const double dn = static_cast<double>(n);
  const double mean = sum / dn;
  const double var = n > 1 ? std::max(0.0, (sum_sq - dn * mean * mean) / (dn - 1.0)) : 0.0;
  return PsiEstimate{mean - info, std::sqrt(var / dn), n};
}

}  // namespace

double phi_entropy_integral(const std::vector<double>& values, const std::vector<double>& weights) {
  if (values.size() != weights.size()) throw ShapeError("values and weights differ in length");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  // Phi(t) is the mass of values >= t: constant on (next, v] below each
  // distinct value v.
  double total = 0.0, cumulative = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double v = values[order[i]];
    if (v <= 0.0) break;
    while (i < order.size() && values[order[i]] == v) cumulative += weights[order[i++]];
    const double next = i < order.size() ? std::max(0.0, values[order[i]]) : 0.0;
    if (cumulative > 0.0 && cumulative < 1.0) total -= (v - next) * cumulative * std::log2(cumulative);
  }
  return total;
}

double psi_lower_bound(const JointDistribution& joint) {
  require_pair(joint);
  const Distribution px = joint.marginal(0);
  const auto rows = conditionals(joint, 1, {0});
  const std::size_t ny = joint.shape()[1];
  std::vector<double> weights;
  std::vector<std::size_t> xs;
  for (std::size_t x = 0; x < px.size(); ++x) {
    if (px[x] > 0.0) {
      xs.push_back(x);
      weights.push_back(px[x]);
    }
  }
  double integral = 0.0;
  std::vector<double> values(xs.size());
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t i = 0; i < xs.size(); ++i) values[i] = (*rows[xs[i]])[y];
    integral += phi_entropy_integral(values, weights);
  }
  return integral - mutual_information(joint);
}

PsiEstimate psi_upper_estimate(const JointDistribution& joint, std::size_t trials, std::uint64_t seed) {
  if (trials < 2) throw ValidationError("psi_upper_estimate: at least two trials required");
  const Representation r = representation(joint);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    PfrCodebook cb(seed, derive_stream(kEfiDomain, t));
    const double h = entropy_of(induced_law(r, cb));
    sum += h;
    sum_sq += h * h;
  }
  return summarize(sum, sum_sq, trials, mutual_information(joint));
}

PsiEstimate psi_upper_estimate_product(const JointDistribution& first, const JointDistribution& second,
                                       std::size_t trials, std::uint64_t seed) {
  if (trials < 2) throw ValidationError("psi_upper_estimate_product: at least two trials required");
  const Representation r1 = representation(first);
  const Representation r2 = representation(second);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    PfrCodebook cb1(seed, derive_stream(kEfiPairDomain, 2 * t));
    PfrCodebook cb2(seed, derive_stream(kEfiPairDomain, 2 * t + 1));
    const std::vector<double> a = induced_law(r1, cb1);
    const std::vector<double> b = induced_law(r2, cb2);
    std::vector<double> law;
    law.reserve(a.size() * b.size());
    for (double pa : a) {
      for (double pb : b) law.push_back(pa * pb);
    }
    const double h = entropy_of(law);
    sum += h;
    sum_sq += h * h;
  }
  return summarize(sum, sum_sq, trials, mutual_information(first) + mutual_information(second));
}

EfiReport efi_evaluate(const JointDistribution& joint, std::size_t trials, std::uint64_t seed) {
  EfiReport rep;
  rep.lower_bound = psi_lower_bound(joint);
  const PsiEstimate ub = psi_upper_estimate(joint, trials, seed);
  rep.upper_estimate = ub.value;
  rep.upper_se = ub.se;
  rep.i_xy = mutual_information(joint);
  rep.sfrl_bound = std::log2(rep.i_xy + 1.0) + 4.0;
  rep.equality_case = joint.shape()[1] == 2;
  rep.trials = trials;
  rep.seed = seed;
  const double slack = 3.0 * ub.se + 1e-12;
  rep.sandwich_pass = rep.lower_bound <= rep.upper_estimate + slack &&
                      rep.upper_estimate <= rep.sfrl_bound + slack;
  rep.equality_pass = !rep.equality_case || std::abs(rep.upper_estimate - rep.lower_bound) <= slack;
  rep.pass = rep.sandwich_pass && rep.equality_pass;
  return rep;
}

LbExampleFamily lb_example_build(unsigned k) {
  if (k > kLbExampleMaxK) throw ValidationError("lb_example_build: k must be at most 20");
  LbExampleFamily f;
  f.k = k;
  f.gamma = std::ldexp(static_cast<double>(k) + 2.0, static_cast<int>(k) - 1);
  const std::size_t n = std::size_t{1} << k;
  // Weights 2^(k - ceil(log2(v+1))) are exact integers summing to gamma.
  std::vector<double> w(n);
  for (std::size_t v = 0; v < n; ++v) {
    w[v] = std::ldexp(1.0, static_cast<int>(k) - static_cast<int>(std::bit_width(v)));
  }
  const double mass = std::accumulate(w.begin(), w.end(), 0.0);
  if (mass != f.gamma) throw Error("lb_example_build: normalization does not match gamma");
  f.p_v = Distribution::from_weights(w);

  const double kd = static_cast<double>(k);
  if (k == 0) {
    // A single symbol: H(V) = 0 without relying on the closed form.
    f.h_v = 0.0;
    f.h_v_closed = 0.0;
  } else {
    f.h_v = entropy(f.p_v);
    f.h_v_closed = kd / 2.0 + std::log2(kd + 2.0) - 1.5 + 1.0 / (kd + 2.0);
  }
  f.i_xy = kd - f.h_v;
  f.i_closed = kd - f.h_v_closed;
  f.closed_forms_agree = std::abs(f.h_v - f.h_v_closed) <= 1e-9 && std::abs(f.i_xy - f.i_closed) <= 1e-9;

  // Every column of p(y|x) = p_V(y - x) holds the same multiset of values,
  // so the lower bound is 2^k copies of one column integral.
  std::vector<double> px(n, 1.0 / static_cast<double>(n));
  const std::vector<double> values(f.p_v.probs().begin(), f.p_v.probs().end());
  const double column = phi_entropy_integral(values, px);
  f.psi_lb = static_cast<double>(n) * column - f.i_xy;

  if (k <= kLbExampleJointMaxK) {
    std::vector<double> jw(n * n);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) jw[x * n + y] = f.p_v[(y + n - x) % n] / static_cast<double>(n);
    }
    f.joint = JointDistribution::from_weights({n, n}, std::move(jw));
  }
  f.tightness_floor = std::log2(f.i_xy + 1.0) - 1.0;
  f.pass = f.closed_forms_agree && f.psi_lb >= f.tightness_floor;
  return f;
}

double entropy_bound(double mean_log) {
  if (!std::isfinite(mean_log) || mean_log < 0.0) {
    throw ValidationError("entropy_bound: mean log must be finite and nonnegative");
  }
  return mean_log + std::log2(mean_log + 1.0) + 1.0;
}

EntropyBoundSweep entropy_bound_sweep(std::size_t pmfs, std::size_t support, std::uint64_t seed) {
  if (support < 1) throw ValidationError("entropy_bound_sweep: support must be positive");
  EntropyBoundSweep s;
  s.min_margin = INFINITY;
  for (std::size_t i = 0; i < pmfs; ++i) {
    RngStream rng(seed, derive_stream(kSweepDomain, i));
    std::vector<double> w(support, 0.0);
    switch (i % 3) {
      case 0:  // flat Dirichlet
        for (auto& v : w) v = rng.next_exponential();
        break;
      case 1: {  // sparse: each symbol kept with probability 1/4
        for (auto& v : w) v = rng.next_uniform() < 0.25 ? rng.next_exponential() : 0.0;
        w[rng.next_bits() % support] += rng.next_exponential();
        break;
      }
      default: {  // power law theta^-alpha with alpha in [0, 4)
        const double alpha = 4.0 * rng.next_uniform();
        for (std::size_t t = 0; t < support; ++t) w[t] = std::pow(static_cast<double>(t + 1), -alpha);
        break;
      }
    }
    const Distribution p = Distribution::from_weights(std::move(w));
    double mean_log = 0.0;
    for (std::size_t t = 0; t < support; ++t) mean_log += p[t] * std::log2(static_cast<double>(t + 1));
    const double margin = entropy_bound(mean_log) - entropy(p);
    s.min_margin = std::min(s.min_margin, margin);
    if (margin < -1e-12) ++s.violations;
    ++s.pmfs;
  }
  return s;
}

}  // namespace sfrl
