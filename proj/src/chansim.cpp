#include "sfrl/chansim.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "sfrl/error.hpp"
#include "sfrl/numopt.hpp"

namespace sfrl {

std::string to_string(SimMode mode) {
  return mode == SimMode::kSourceCoupled ? "source-coupled" : "fixed-input";
}

ChannelSimScheme make_source_coupled_scheme(const Distribution& source, const Kernel& kernel,
                                            std::uint64_t master_seed) {
  if (source.size() != kernel.input_size()) throw ShapeError("source and kernel input sizes differ");
  const double info = mutual_information(kernel.joint(source));
  return ChannelSimScheme{kernel,
                          DiscretePrior(kernel.output_marginal(source)),
                          master_seed,
                          info,
                          zipf_build(zipf_params(info)),
                          SimMode::kSourceCoupled,
                          source};
}

ChannelSimScheme make_fixed_input_scheme(const Kernel& kernel, std::uint64_t master_seed,
                                         double capacity_tol) {
  CapacitySolution cap = blahut_arimoto_capacity(kernel, capacity_tol);
  // Every row must be absolutely continuous w.r.t. the prior; the capacity
  // output marginal charges every symbol some row can produce.
  return ChannelSimScheme{kernel,
                          DiscretePrior(cap.output),
                          master_seed,
                          cap.capacity,
                          zipf_build(zipf_params(cap.capacity)),
                          SimMode::kFixedInput,
                          std::nullopt};
}

SelectionOutcome sim_select(const ChannelSimScheme& scheme, std::size_t x, std::uint64_t session) {
  if (x >= scheme.kernel.input_size()) throw DomainError("sim_encode: input symbol out of range");
  PfrCodebook cb(scheme.master_seed, session);
  return select(cb, scheme.kernel.row(x), scheme.prior);
}

void sim_encode_to(const ChannelSimScheme& scheme, std::size_t x, std::uint64_t session,
                   BitString& out) {
  scheme.zipf.encode_to(sim_select(scheme, x, session).k, out);
}

BitString sim_encode(const ChannelSimScheme& scheme, std::size_t x, std::uint64_t session) {
  BitString b;
  sim_encode_to(scheme, x, session, b);
  return b;
}

std::size_t sim_decode(const ChannelSimScheme& scheme, BitReader& in, std::uint64_t session) {
  const std::uint64_t k = scheme.zipf.decode(in);
  PfrCodebook cb(scheme.master_seed, session);
  return scheme.prior.symbol_for(cb.point(k).mark);
}

std::size_t sim_decode(const ChannelSimScheme& scheme, const BitString& bits, std::uint64_t session) {
  BitReader in(bits);
  return sim_decode(scheme, in, session);
}

namespace {

struct Moments {
  double sum = 0.0;
  double sumsq = 0.0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    sumsq += v * v;
    ++n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  double se() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = std::max(0.0, (sumsq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1));
    return std::sqrt(var / static_cast<double>(n));
  }
};

}  // namespace

SimReport evaluate_scheme(const ChannelSimScheme& scheme, std::size_t trials,
                          std::uint64_t first_session) {
  if (trials < 1000) throw PreconditionError("evaluate_scheme: at least 1000 trials required");
  const std::size_t nx = scheme.kernel.input_size();
  const std::size_t ny = scheme.kernel.output_size();
  const bool coupled = scheme.mode == SimMode::kSourceCoupled;

  SimReport r;
  r.mode = scheme.mode;
  r.trials = trials;
  r.info_bits = scheme.info_bits;
  r.length_bound = scheme.info_bits + std::log2(scheme.info_bits + 1.0) + 5.0;
  r.entropy_k_bound = scheme.info_bits + std::log2(scheme.info_bits + 1.0) + 4.0;

  std::vector<Moments> len_x(nx), logk_x(nx);
  Moments len_avg, logk_avg;
  std::vector<std::vector<std::uint64_t>> counts(nx, std::vector<std::uint64_t>(ny, 0));
  std::unordered_map<std::uint64_t, double> k_mass;

  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t session = first_session + t;
    PfrCodebook cb(scheme.master_seed, session);
    double len_mix = 0.0;
    double logk_mix = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      const SelectionOutcome sel = select(cb, scheme.kernel.row(x), scheme.prior);
      BitString bits;
      scheme.zipf.encode_to(sel.k, bits);
      const std::size_t y = sim_decode(scheme, bits, session);
      if (y != sel.y) ++r.decode_mismatches;
      ++counts[x][y];
      const double len = static_cast<double>(bits.size());
      const double logk = std::log2(static_cast<double>(sel.k));
      len_x[x].add(len);
      logk_x[x].add(logk);
      if (coupled) {
        const double px = (*scheme.source)[x];
        len_mix += px * len;
        logk_mix += px * logk;
        if (px > 0.0) k_mass[sel.k] += px;
      }
    }
    if (coupled) {
      len_avg.add(len_mix);
      logk_avg.add(logk_mix);
    }
  }

  const double n = static_cast<double>(trials);
  r.tv_threshold = std::max(0.01, 3.0 * std::sqrt(static_cast<double>(ny) / n));
  r.tv_pass = true;
  r.index_pass = true;
  r.length_pass = true;
  for (std::size_t x = 0; x < nx; ++x) {
    const double tv = total_variation(empirical(counts[x]), scheme.kernel.row(x));
    r.tv_per_input.push_back(tv);
    r.tv_pass = r.tv_pass && tv <= r.tv_threshold;
    r.length_per_input.push_back(len_x[x].mean());
    r.length_se_per_input.push_back(len_x[x].se());
    r.mean_log2_k.push_back(logk_x[x].mean());
    r.mean_log2_k_se.push_back(logk_x[x].se());
    const double kl = kl_divergence(scheme.kernel.row(x), scheme.prior.pmf());
    r.kl_per_input.push_back(kl);
    const bool relevant = !coupled || (*scheme.source)[x] > 0.0;
    if (relevant) {
      r.index_pass = r.index_pass &&
                     logk_x[x].mean() <= kl + kIndexBoundConstant + 3.0 * logk_x[x].se();
    }
    if (!coupled) {
      r.length_pass = r.length_pass && len_x[x].mean() <= r.length_bound + 3.0 * len_x[x].se();
    }
  }

  if (coupled) {
    r.expected_length = len_avg.mean();
    r.expected_length_se = len_avg.se();
    r.length_pass = r.expected_length <= r.length_bound + 3.0 * r.expected_length_se;
    r.mean_log2_k_avg = logk_avg.mean();
    r.mean_log2_k_avg_se = logk_avg.se();
    r.index_pass = r.index_pass && r.mean_log2_k_avg <= scheme.info_bits + kIndexBoundConstant +
                                                         3.0 * r.mean_log2_k_avg_se;
    std::vector<double> pk;
    pk.reserve(k_mass.size());
    for (const auto& [k, m] : k_mass) pk.push_back(m / n);
    std::sort(pk.begin(), pk.end());  // fixed summation order
    r.entropy_k = entropy_of(pk);
    r.entropy_pass = *r.entropy_k <= r.entropy_k_bound + 0.1;
  } else {
    std::size_t worst = 0;
    for (std::size_t x = 1; x < nx; ++x) {
      if (len_x[x].mean() > len_x[worst].mean()) worst = x;
    }
    r.expected_length = len_x[worst].mean();
    r.expected_length_se = len_x[worst].se();
    double worst_logk = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      if (logk_x[x].mean() >= worst_logk) {
        worst_logk = logk_x[x].mean();
        r.mean_log2_k_avg = worst_logk;
        r.mean_log2_k_avg_se = logk_x[x].se();
      }
    }
    r.entropy_pass = true;
  }
  r.pass = r.length_pass && r.tv_pass && r.index_pass && r.entropy_pass && r.decode_mismatches == 0;
  return r;
}

}  // namespace sfrl
