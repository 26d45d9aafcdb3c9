#include <map>
#include <string>

#include "multiterminal_common.hpp"
#include "sfrl/error.hpp"
#include "sfrl/multiterminal.hpp"
#include "sfrl/numopt.hpp"
#include "sfrl/pfr.hpp"
#include "sfrl/rng.hpp"

namespace sfrl {

namespace {

constexpr std::uint64_t kGwDomainU = 0x4757555fULL;
constexpr std::uint64_t kGwDomainY1 = 0x47575931ULL;
constexpr std::uint64_t kGwDomainY2 = 0x47575932ULL;

struct GwShape {
  std::size_t n1, n2, nu, ny1, ny2;
};

GwShape shape_of(const GrayWynerInstance& inst) {
  const auto& s = inst.source.shape();
  if (s.size() != 2) throw ShapeError("Gray-Wyner source must be a two-axis joint");
  GwShape g{s[0], s[1], inst.u_given_x1x2.output_size(), inst.y1_given_x1u.output_size(),
            inst.y2_given_x2u.output_size()};
  if (inst.u_given_x1x2.input_size() != g.n1 * g.n2) throw ShapeError("P(U|X1,X2) has wrong row count");
  if (inst.y1_given_x1u.input_size() != g.n1 * g.nu) throw ShapeError("P(Y1|X1,U) has wrong row count");
  if (inst.y2_given_x2u.input_size() != g.n2 * g.nu) throw ShapeError("P(Y2|X2,U) has wrong row count");
  if (inst.d1.rows() != g.n1 || inst.d1.cols() != g.ny1) throw ShapeError("d1 has wrong shape");
  if (inst.d2.rows() != g.n2 || inst.d2.cols() != g.ny2) throw ShapeError("d2 has wrong shape");
  return g;
}

// Stage data derived once from the full joint.
struct GwStages {
  GwShape g;
  std::vector<std::optional<Distribution>> u_cond;   // x1 * n2 + x2
  DiscretePrior u_prior;
  std::vector<std::optional<Distribution>> y1_cond;  // x1 * nu + u
  std::vector<DiscretePrior> y1_prior;               // u
  std::vector<std::optional<Distribution>> y2_cond;  // x2 * nu + u
  std::vector<DiscretePrior> y2_prior;
};

GwStages stages_of(const GrayWynerInstance& inst) {
  const GwShape g = shape_of(inst);
  const JointDistribution j = gw_full_joint(inst);
  return GwStages{g,
                  conditionals(j, 2, {0, 1}),
                  DiscretePrior(j.marginal(std::size_t{2})),
                  conditionals(j, 3, {0, 2}),
                  detail::conditional_priors(j, 3, {2}),
                  conditionals(j, 4, {1, 2}),
                  detail::conditional_priors(j, 4, {2})};
}

struct GwCandidate {
  std::vector<std::size_t> u_table, y1_table, y2_table;
  std::vector<double> coords;
  std::vector<double> p_u, p_uy1, p_uy2;
};

GwCandidate realize(const GrayWynerInstance& inst, const GwStages& st, std::uint64_t seed,
                    std::uint64_t j) {
  const GwShape& g = st.g;
  PfrCodebook cb_u(seed, derive_stream(kGwDomainU, j));
  PfrCodebook cb_1(seed, derive_stream(kGwDomainY1, j));
  PfrCodebook cb_2(seed, derive_stream(kGwDomainY2, j));
  GwCandidate c;
  c.u_table.assign(g.n1 * g.n2, 0);
  c.y1_table.assign(g.n1 * g.nu, 0);
  c.y2_table.assign(g.n2 * g.nu, 0);
  for (std::size_t i = 0; i < c.u_table.size(); ++i) {
    if (st.u_cond[i]) c.u_table[i] = select(cb_u, *st.u_cond[i], st.u_prior).y;
  }
  for (std::size_t x1 = 0; x1 < g.n1; ++x1) {
    for (std::size_t u = 0; u < g.nu; ++u) {
      const std::size_t cell = x1 * g.nu + u;
      if (st.y1_cond[cell]) c.y1_table[cell] = conditional_select(cb_1, u, *st.y1_cond[cell], st.y1_prior).y;
    }
  }
  for (std::size_t x2 = 0; x2 < g.n2; ++x2) {
    for (std::size_t u = 0; u < g.nu; ++u) {
      const std::size_t cell = x2 * g.nu + u;
      if (st.y2_cond[cell]) c.y2_table[cell] = conditional_select(cb_2, u, *st.y2_cond[cell], st.y2_prior).y;
    }
  }
  c.p_u.assign(g.nu, 0.0);
  c.p_uy1.assign(g.nu * g.ny1, 0.0);
  c.p_uy2.assign(g.nu * g.ny2, 0.0);
  double ed1 = 0.0, ed2 = 0.0;
  for (std::size_t x1 = 0; x1 < g.n1; ++x1) {
    for (std::size_t x2 = 0; x2 < g.n2; ++x2) {
      const double p = inst.source(x1, x2);
      if (p == 0.0) continue;
      const std::size_t u = c.u_table[x1 * g.n2 + x2];
      const std::size_t y1 = c.y1_table[x1 * g.nu + u];
      const std::size_t y2 = c.y2_table[x2 * g.nu + u];
      c.p_u[u] += p;
      c.p_uy1[u * g.ny1 + y1] += p;
      c.p_uy2[u * g.ny2 + y2] += p;
      ed1 += p * inst.d1(x1, y1);
      ed2 += p * inst.d2(x2, y2);
    }
  }
  c.coords = {entropy_of(c.p_u), detail::row_conditional_entropy(c.p_uy1, g.ny1),
              detail::row_conditional_entropy(c.p_uy2, g.ny2), ed1, ed2};
  return c;
}

}  // namespace

JointDistribution gw_full_joint(const GrayWynerInstance& inst) {
  const GwShape g = shape_of(inst);
  std::vector<double> w(g.n1 * g.n2 * g.nu * g.ny1 * g.ny2, 0.0);
  std::size_t idx = 0;
  for (std::size_t x1 = 0; x1 < g.n1; ++x1) {
    for (std::size_t x2 = 0; x2 < g.n2; ++x2) {
      const double p = inst.source(x1, x2);
      const Distribution& pu = inst.u_given_x1x2.row(x1 * g.n2 + x2);
      for (std::size_t u = 0; u < g.nu; ++u) {
        const Distribution& py1 = inst.y1_given_x1u.row(x1 * g.nu + u);
        const Distribution& py2 = inst.y2_given_x2u.row(x2 * g.nu + u);
        for (std::size_t y1 = 0; y1 < g.ny1; ++y1) {
          for (std::size_t y2 = 0; y2 < g.ny2; ++y2) w[idx++] = p * pu[u] * py1[y1] * py2[y2];
        }
      }
    }
  }
  return JointDistribution::from_weights({g.n1, g.n2, g.nu, g.ny1, g.ny2}, std::move(w));
}

GwTargets gw_targets(const GrayWynerInstance& inst) {
  const GwShape g = shape_of(inst);
  const JointDistribution j = gw_full_joint(inst);
  GwTargets t{};
  t.i_u = mutual_information(j, {0, 1}, {2});
  t.i_1 = mutual_information(j, {0}, {3}, {2});
  t.i_2 = mutual_information(j, {1}, {4}, {2});
  t.r0 = t.i_u + detail::log_term(t.i_u) + 8.0;
  t.r1 = t.i_1 + detail::log_term(t.i_1) + 5.0;
  t.r2 = t.i_2 + detail::log_term(t.i_2) + 5.0;
  const JointDistribution j1 = j.marginal(std::vector<std::size_t>{0, 3});
  const JointDistribution j2 = j.marginal(std::vector<std::size_t>{1, 4});
  for (std::size_t x = 0; x < g.n1; ++x) {
    for (std::size_t y = 0; y < g.ny1; ++y) {
      if (j1(x, y) > 0.0) t.d1 += j1(x, y) * inst.d1(x, y);
    }
  }
  for (std::size_t x = 0; x < g.n2; ++x) {
    for (std::size_t y = 0; y < g.ny2; ++y) {
      if (j2(x, y) > 0.0) t.d2 += j2(x, y) * inst.d2(x, y);
    }
  }
  return t;
}

GwCode gw_design(const GrayWynerInstance& inst, std::uint64_t seed, std::size_t candidates,
                 double slack) {
  if (candidates < 1) throw ValidationError("gw_design: at least one candidate required");
  const GwStages st = stages_of(inst);
  const GwTargets t = gw_targets(inst);
  const GwShape& g = st.g;

  std::map<std::vector<std::size_t>, bool> seen;
  std::vector<GwCandidate> pool;
  std::vector<std::uint64_t> ids;
  for (std::uint64_t j = 0; j < candidates; ++j) {
    GwCandidate c = realize(inst, st, seed, j);
    std::vector<std::size_t> key = c.u_table;
    key.insert(key.end(), c.y1_table.begin(), c.y1_table.end());
    key.insert(key.end(), c.y2_table.begin(), c.y2_table.end());
    if (!seen.emplace(std::move(key), true).second) continue;
    pool.push_back(std::move(c));
    ids.push_back(j);
  }
  std::vector<std::vector<double>> points;
  for (const auto& c : pool) points.push_back(c.coords);
  const std::vector<double> target = {t.i_u + detail::log_term(t.i_u) + 4.0 + slack,
                                      t.i_1 + detail::log_term(t.i_1) + 4.0 + slack,
                                      t.i_2 + detail::log_term(t.i_2) + 4.0 + slack, t.d1, t.d2};
  MixtureSolution mix;
  try {
    mix = minimizing_mix(points, target, 0, 1e-9);
  } catch (const InfeasibleError& e) {
    throw DesignError("gw_design: candidate mixture infeasible; increase the candidate count (" +
                      std::string(e.what()) + ")");
  }

  GwCode code{inst, seed, candidates, pool.size(), slack, t, {}};
  for (std::size_t s = 0; s < mix.support.size(); ++s) {
    GwCandidate& c = pool[mix.support[s]];
    code.branches.push_back(GwBranch{mix.weights[s], ids[mix.support[s]], c.u_table, c.y1_table,
                                     c.y2_table, c.coords,
                                     HuffmanCode(Distribution::from_weights(c.p_u)),
                                     detail::row_codes(c.p_uy1, g.ny1),
                                     detail::row_codes(c.p_uy2, g.ny2)});
  }
  return code;
}

GwDescriptions gw_encode(const GwCode& code, std::size_t x1, std::size_t x2, double coin) {
  const auto& s = code.instance.source.shape();
  if (x1 >= s[0] || x2 >= s[1] || code.instance.source(x1, x2) == 0.0) {
    throw DomainError("gw_encode: source pair outside the support");
  }
  std::vector<double> w;
  for (const auto& b : code.branches) w.push_back(b.weight);
  GwDescriptions d{};
  d.q = detail::branch_from_coin(w, coin);
  const GwBranch& b = code.branches[d.q];
  const std::size_t nu = code.instance.u_given_x1x2.output_size();
  d.u = b.u_table[x1 * s[1] + x2];
  d.y1 = b.y1_table[x1 * nu + d.u];
  d.y2 = b.y2_table[x2 * nu + d.u];
  d.m0.append(d.q, kBranchHeaderBits);
  b.u_code.encode_to(d.u, d.m0);
  detail::code_for(b.y1_codes, d.u).encode_to(d.y1, d.m1);
  detail::code_for(b.y2_codes, d.u).encode_to(d.y2, d.m2);
  return d;
}

namespace {

std::pair<std::size_t, std::size_t> read_common(const GwCode& code, const BitString& m0) {
  BitReader in(m0);
  const std::size_t q = in.read_bits(kBranchHeaderBits);
  if (q >= code.branches.size()) throw FramingError("branch index out of range", 0);
  const std::size_t u = code.branches[q].u_code.decode(in);
  return {q, u};
}

}  // namespace

GwDecoded gw_decode1(const GwCode& code, const BitString& m0, const BitString& m1) {
  auto [q, u] = read_common(code, m0);
  BitReader in(m1);
  return {q, u, detail::code_for(code.branches[q].y1_codes, u).decode(in)};
}

GwDecoded gw_decode2(const GwCode& code, const BitString& m0, const BitString& m2) {
  auto [q, u] = read_common(code, m0);
  BitReader in(m2);
  return {q, u, detail::code_for(code.branches[q].y2_codes, u).decode(in)};
}

RateReport gw_evaluate(const GwCode& code) {
  const auto& inst = code.instance;
  const auto& s = inst.source.shape();
  const std::size_t nu = inst.u_given_x1x2.output_size();
  double l0 = 0.0, l1 = 0.0, l2 = 0.0, ed1 = 0.0, ed2 = 0.0;
  for (const auto& b : code.branches) {
    for (std::size_t x1 = 0; x1 < s[0]; ++x1) {
      for (std::size_t x2 = 0; x2 < s[1]; ++x2) {
        const double p = b.weight * inst.source(x1, x2);
        if (p == 0.0) continue;
        const std::size_t u = b.u_table[x1 * s[1] + x2];
        const std::size_t y1 = b.y1_table[x1 * nu + u];
        const std::size_t y2 = b.y2_table[x2 * nu + u];
        l0 += p * (kBranchHeaderBits + b.u_code.length_of(u));
        l1 += p * detail::code_for(b.y1_codes, u).length_of(y1);
        l2 += p * detail::code_for(b.y2_codes, u).length_of(y2);
        ed1 += p * inst.d1(x1, y1);
        ed2 += p * inst.d2(x2, y2);
      }
    }
  }
  const GwTargets& t = code.targets;
  RateReport r;
  r.scheme = "gray-wyner";
  r.slack = code.slack;
  r.support = code.branches.size();
  r.lines = {{"R0", l0, t.r0, l0 <= t.r0},
             {"R1", l1, t.r1, l1 <= t.r1},
             {"R2", l2, t.r2, l2 <= t.r2},
             {"D1", ed1, t.d1, ed1 <= t.d1 + 1e-9},
             {"D2", ed2, t.d2, ed2 <= t.d2 + 1e-9},
             {"support", static_cast<double>(r.support), 5.0, r.support <= 5}};
  r.pass = true;
  for (const auto& line : r.lines) r.pass = r.pass && line.pass;
  return r;
}

}  // namespace sfrl
