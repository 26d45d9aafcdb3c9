#include "sfrl/gp.hpp"

#include <cmath>
#include <map>

#include "sfrl/error.hpp"
#include "sfrl/pfr.hpp"
#include "sfrl/rng.hpp"

namespace sfrl {

namespace {

constexpr std::uint64_t kGpCodebookDomain = 0x47504342ULL;
constexpr std::uint64_t kGpSampleDomain = 0x47505341ULL;

double mean_se(double sum, double sum_sq, double n, double& se) {
  const double mean = sum / n;
  se = std::sqrt(std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) / n);
  return mean;
}

double plugin_conditional_entropy(const std::map<std::pair<std::size_t, std::size_t>, double>& counts,
                                  double n) {
  std::map<std::size_t, double> given;
  for (const auto& [key, c] : counts) given[key.first] += c;
  double h = 0.0;
  for (const auto& [key, c] : counts) h -= c / n * std::log2(c / given[key.first]);
  return h;
}

}  // namespace

void validate(const GpSetup& setup) {
  const std::size_t ns = setup.p_s.size();
  const std::size_t nu = setup.u_given_s.output_size();
  if (setup.u_given_s.input_size() != ns) throw ShapeError("P(U|S) must have one row per state");
  if (setup.x_map.size() != nu * ns) throw ShapeError("x_map must have |U|*|S| entries");
  for (std::size_t x : setup.x_map) {
    if (x >= setup.x_size) throw ShapeError("x_map entry outside the input alphabet");
  }
  if (setup.y_given_xs.input_size() != setup.x_size * ns) {
    throw ShapeError("P(Y|X,S) must have |X|*|S| rows");
  }
}

JointDistribution gp_joint(const GpSetup& setup) {
  validate(setup);
  const std::size_t ns = setup.p_s.size();
  const std::size_t nu = setup.u_given_s.output_size();
  const std::size_t ny = setup.y_given_xs.output_size();
  std::vector<double> w(ns * nu * ny, 0.0);
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t u = 0; u < nu; ++u) {
      const double p = setup.p_s[s] * setup.u_given_s.row(s)[u];
      const Distribution& out = setup.y_given_xs.row(setup.x_map[u * ns + s] * ns + s);
      for (std::size_t y = 0; y < ny; ++y) w[(s * nu + u) * ny + y] = p * out[y];
    }
  }
  return JointDistribution::from_weights({ns, nu, ny}, std::move(w));
}

double gp_rate_gap(const GpSetup& setup) {
  const JointDistribution j = gp_joint(setup);
  const double i_uy = mutual_information(j, {1}, {2});
  const double i_us = mutual_information(j, {1}, {0});
  return i_uy - i_us - std::log2(i_us + 1.0) - 4.0;
}

GpReport gp_reduce(const GpSetup& setup, std::size_t trials, std::uint64_t seed) {
  if (trials < 10000) throw ValidationError("gp_reduce: at least 10^4 trials required");
  const JointDistribution j = gp_joint(setup);
  const std::size_t ns = setup.p_s.size();
  const std::size_t nu = setup.u_given_s.output_size();
  const std::size_t ny = setup.y_given_xs.output_size();
  if (std::pow(static_cast<double>(nu), static_cast<double>(ns)) > kGpMaxTables) {
    throw ShapeError("gp_reduce: more than 10^6 possible function tables; use smaller |S| or |U|");
  }

  // Rows of states that never occur are replaced by the U marginal so every
  // row stays inside the prior's support.
  const Distribution pu = j.marginal(1);
  std::vector<Distribution> rows = setup.u_given_s.rows();
  for (std::size_t s = 0; s < ns; ++s) {
    if (setup.p_s[s] == 0.0) rows[s] = pu;
  }
  const Kernel kernel(std::move(rows));
  const DiscretePrior prior(pu);

  GpReport rep;
  rep.i_uy = mutual_information(j, {1}, {2});
  rep.i_us = mutual_information(j, {1}, {0});
  rep.h_y = entropy(j.marginal(2));
  rep.reduction_bound = rep.i_uy - rep.i_us - std::log2(rep.i_us + 1.0) - 4.0;
  rep.h_bound = rep.i_us + std::log2(rep.i_us + 1.0) + 4.0;
  rep.trials = trials;
  rep.seed = seed;

  std::map<std::vector<std::size_t>, std::size_t> table_ids;
  std::map<std::pair<std::size_t, std::size_t>, double> vu_counts, vy_counts;
  std::vector<double> y_counts(ny, 0.0);
  double hu = 0.0, hu2 = 0.0, hy = 0.0, hy2 = 0.0;
  std::vector<double> law_u(nu), law_y(ny);
  for (std::size_t t = 0; t < trials; ++t) {
    PfrCodebook cb(seed, derive_stream(kGpCodebookDomain, t));
    const InducedFunction v = induced_function(cb, kernel, prior);
    const std::size_t id = table_ids.emplace(v.table, table_ids.size()).first->second;

    std::fill(law_u.begin(), law_u.end(), 0.0);
    std::fill(law_y.begin(), law_y.end(), 0.0);
    for (std::size_t s = 0; s < ns; ++s) {
      const double p = setup.p_s[s];
      if (p == 0.0) continue;
      const std::size_t u = v.table[s];
      law_u[u] += p;
      const Distribution& out = setup.y_given_xs.row(setup.x_map[u * ns + s] * ns + s);
      for (std::size_t y = 0; y < ny; ++y) law_y[y] += p * out[y];
    }
    const double h_u = entropy_of(law_u);
    const double h_y = entropy_of(law_y);
    hu += h_u;
    hu2 += h_u * h_u;
    hy += h_y;
    hy2 += h_y * h_y;

    RngStream rng(seed, derive_stream(kGpSampleDomain, t));
    const auto s_probs = setup.p_s.probs();
    const std::size_t s = rng.next_categorical(s_probs.data(), ns);
    const std::size_t u = v.table[s];
    const auto y_probs = setup.y_given_xs.row(setup.x_map[u * ns + s] * ns + s).probs();
    const std::size_t y = rng.next_categorical(y_probs.data(), ny);
    vu_counts[{id, u}] += 1.0;
    vy_counts[{id, y}] += 1.0;
    y_counts[y] += 1.0;
  }
  const double n = static_cast<double>(trials);
  rep.h_u_given_v = mean_se(hu, hu2, n, rep.h_u_given_v_se);
  double h_y_given_v_se = 0.0;
  const double h_y_given_v = mean_se(hy, hy2, n, h_y_given_v_se);
  rep.i_vy = rep.h_y - h_y_given_v;
  rep.i_vy_se = h_y_given_v_se;
  rep.distinct_tables = table_ids.size();

  rep.h_u_given_v_plugin = plugin_conditional_entropy(vu_counts, n);
  rep.i_vy_plugin = entropy_of(Distribution::from_weights(y_counts).probs()) -
                    plugin_conditional_entropy(vy_counts, n);

  rep.chain_pass = rep.i_vy >= rep.i_uy - rep.h_u_given_v - 3.0 * (rep.i_vy_se + rep.h_u_given_v_se) - 1e-12;
  rep.bound_pass = rep.h_u_given_v <= rep.h_bound + 3.0 * rep.h_u_given_v_se + 1e-12;
  rep.pass = rep.chain_pass && rep.bound_pass;
  return rep;
}

}  // namespace sfrl
