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

constexpr std::uint64_t kMdDomainU = 0x4d44555fULL;
constexpr std::uint64_t kMdDomainY1 = 0x4d445931ULL;
constexpr std::uint64_t kMdDomainY2 = 0x4d445932ULL;
constexpr std::uint64_t kMdDomainY0 = 0x4d445930ULL;

// Axes of the joint.
constexpr std::size_t kX = 0, kU = 1, kY0 = 2, kY1 = 3, kY2 = 4;

struct MdShape {
  std::size_t nx, nu, ny0, ny1, ny2;
};

MdShape shape_of(const MdcInstance& inst) {
  const auto& s = inst.joint.shape();
  if (s.size() != 5) throw ShapeError("MDC joint must have axes (x, u, y0, y1, y2)");
  MdShape m{s[0], s[1], s[2], s[3], s[4]};
  if (inst.d0.rows() != m.nx || inst.d0.cols() != m.ny0) throw ShapeError("d0 has wrong shape");
  if (inst.d1.rows() != m.nx || inst.d1.cols() != m.ny1) throw ShapeError("d1 has wrong shape");
  if (inst.d2.rows() != m.nx || inst.d2.cols() != m.ny2) throw ShapeError("d2 has wrong shape");
  return m;
}

double expected_distortion(const JointDistribution& j, std::size_t axis, const DistortionMatrix& d) {
  const JointDistribution m = j.marginal(std::vector<std::size_t>{kX, axis});
  double e = 0.0;
  for (std::size_t x = 0; x < d.rows(); ++x) {
    for (std::size_t y = 0; y < d.cols(); ++y) {
      if (m(x, y) > 0.0) e += m(x, y) * d(x, y);
    }
  }
  return e;
}

struct MdStages {
  MdShape m;
  std::vector<std::optional<Distribution>> u_cond;  // x
  DiscretePrior u_prior;
  std::vector<std::optional<Distribution>> y1_cond;  // x*nu + u
  std::vector<DiscretePrior> y1_prior;               // u
  std::vector<std::optional<Distribution>> y2_cond;  // (x*nu + u)*ny1 + y1
  std::vector<DiscretePrior> y2_prior;               // u
  std::vector<std::optional<Distribution>> y0_cond;  // ((x*nu + u)*ny1 + y1)*ny2 + y2
  std::vector<DiscretePrior> y0_prior;               // (u*ny1 + y1)*ny2 + y2
};

MdStages stages_of(const MdcInstance& inst) {
  const JointDistribution& j = inst.joint;
  return MdStages{shape_of(inst),
                  conditionals(j, kU, {kX}),
                  DiscretePrior(j.marginal(kU)),
                  conditionals(j, kY1, {kX, kU}),
                  detail::conditional_priors(j, kY1, {kU}),
                  conditionals(j, kY2, {kX, kU, kY1}),
                  detail::conditional_priors(j, kY2, {kU}),
                  conditionals(j, kY0, {kX, kU, kY1, kY2}),
                  detail::conditional_priors(j, kY0, {kU, kY1, kY2})};
}

struct MdCandidate {
  std::vector<std::size_t> u_table, y1_table, y2_table, y0_table;
  std::vector<double> coords;
  std::vector<double> p_u, p_uy1, p_uy2, p_full;  // p_full indexed ((u*ny1+y1)*ny2+y2)*ny0+y0
};

MdCandidate realize(const MdcInstance& inst, const MdStages& st, std::uint64_t seed, std::uint64_t j) {
  const MdShape& m = st.m;
  PfrCodebook cb_u(seed, derive_stream(kMdDomainU, j));
  PfrCodebook cb_1(seed, derive_stream(kMdDomainY1, j));
  PfrCodebook cb_2(seed, derive_stream(kMdDomainY2, j));
  PfrCodebook cb_0(seed, derive_stream(kMdDomainY0, j));
  MdCandidate c;
  c.u_table.assign(m.nx, 0);
  c.y1_table.assign(m.nx * m.nu, 0);
  c.y2_table.assign(m.nx * m.nu * m.ny1, 0);
  c.y0_table.assign(m.nx * m.nu * m.ny1 * m.ny2, 0);
  c.p_u.assign(m.nu, 0.0);
  c.p_uy1.assign(m.nu * m.ny1, 0.0);
  c.p_uy2.assign(m.nu * m.ny2, 0.0);
  c.p_full.assign(m.nu * m.ny1 * m.ny2 * m.ny0, 0.0);
  const Distribution px = inst.joint.marginal(kX);
  double ed0 = 0.0, ed1 = 0.0, ed2 = 0.0;
  // Only cells reached by some source symbol are realized; the selection
  // keeps every reached cell inside the support of the joint.
  for (std::size_t x = 0; x < m.nx; ++x) {
    if (px[x] == 0.0) continue;
    const std::size_t u = select(cb_u, *st.u_cond[x], st.u_prior).y;
    c.u_table[x] = u;
    const std::size_t c1 = x * m.nu + u;
    const std::size_t y1 = conditional_select(cb_1, u, *st.y1_cond[c1], st.y1_prior).y;
    c.y1_table[c1] = y1;
    const std::size_t c2 = c1 * m.ny1 + y1;
    const std::size_t y2 = conditional_select(cb_2, u, *st.y2_cond[c2], st.y2_prior).y;
    c.y2_table[c2] = y2;
    const std::size_t c0 = c2 * m.ny2 + y2;
    const std::size_t prior0 = (u * m.ny1 + y1) * m.ny2 + y2;
    const std::size_t y0 = conditional_select(cb_0, prior0, *st.y0_cond[c0], st.y0_prior).y;
    c.y0_table[c0] = y0;
    const double p = px[x];
    c.p_u[u] += p;
    c.p_uy1[u * m.ny1 + y1] += p;
    c.p_uy2[u * m.ny2 + y2] += p;
    c.p_full[prior0 * m.ny0 + y0] += p;
    ed0 += p * inst.d0(x, y0);
    ed1 += p * inst.d1(x, y1);
    ed2 += p * inst.d2(x, y2);
  }
  c.coords = {entropy_of(c.p_u),
              detail::row_conditional_entropy(c.p_uy1, m.ny1),
              detail::row_conditional_entropy(c.p_uy2, m.ny2),
              detail::row_conditional_entropy(c.p_full, m.ny0),
              ed0,
              ed1,
              ed2};
  return c;
}

struct WorkingVars {
  std::size_t q, u, y1, y2, y0;
};

WorkingVars working_vars(const MdcCode& code, std::size_t x, double coin) {
  std::vector<double> w;
  for (const auto& b : code.branches) w.push_back(b.weight);
  const MdShape m = shape_of(code.instance);
  WorkingVars v{};
  v.q = detail::branch_from_coin(w, coin);
  const MdcBranch& b = code.branches[v.q];
  // In the working orientation Y1 and Y2 carry the swapped alphabets.
  const std::size_t ny1 = code.swapped ? m.ny2 : m.ny1;
  const std::size_t ny2 = code.swapped ? m.ny1 : m.ny2;
  v.u = b.u_table[x];
  const std::size_t c1 = x * m.nu + v.u;
  v.y1 = b.y1_table[c1];
  const std::size_t c2 = c1 * ny1 + v.y1;
  v.y2 = b.y2_table[c2];
  v.y0 = b.y0_table[c2 * ny2 + v.y2];
  return v;
}

std::size_t working_ny1(const MdcCode& code) {
  const auto& s = code.instance.joint.shape();
  return code.swapped ? s[kY2] : s[kY1];
}

std::size_t working_ny2(const MdcCode& code) {
  const auto& s = code.instance.joint.shape();
  return code.swapped ? s[kY1] : s[kY2];
}

std::size_t read_header(const MdcCode& code, BitReader& in) {
  if (code.flag) {
    const bool corner = in.read_bit();
    if (corner != code.swapped) throw FramingError("description belongs to the other corner point", 0);
  }
  const std::size_t q = in.read_bits(kBranchHeaderBits);
  if (q >= code.branches.size()) throw FramingError("branch index out of range", in.position());
  return q;
}

// First working description: header, U, Y1.
MdcDecoded decode_working_first(const MdcCode& code, const BitString& m) {
  BitReader in(m);
  MdcDecoded d{};
  d.q = read_header(code, in);
  const MdcBranch& b = code.branches[d.q];
  d.u = b.u_code.decode(in);
  d.y1 = detail::code_for(b.y1_codes, d.u).decode(in);
  return d;
}

// Second working description: header, U, Y2, then Y0 when Y1 is known.
MdcDecoded decode_working_second(const MdcCode& code, const BitString& m,
                                 std::optional<std::size_t> y1) {
  BitReader in(m);
  MdcDecoded d{};
  d.q = read_header(code, in);
  const MdcBranch& b = code.branches[d.q];
  d.u = b.u_code.decode(in);
  d.y2 = detail::code_for(b.y2_codes, d.u).decode(in);
  if (y1) {
    const std::size_t cell = (d.u * working_ny1(code) + *y1) * working_ny2(code) + *d.y2;
    d.y1 = y1;
    d.y0 = detail::code_for(b.y0_codes, cell).decode(in);
  }
  return d;
}

MdcDecoded to_actual(const MdcCode& code, MdcDecoded d) {
  if (code.swapped) std::swap(d.y1, d.y2);
  return d;
}

}  // namespace

MdcInstance mdc_instance(const Distribution& px, const Kernel& u_given_x, const Kernel& y1_given_xu,
                         const Kernel& y2_given_xuy1, const Kernel& y0_given_xuy1y2,
                         DistortionMatrix d0, DistortionMatrix d1, DistortionMatrix d2) {
  const std::size_t nx = px.size();
  const std::size_t nu = u_given_x.output_size();
  const std::size_t ny1 = y1_given_xu.output_size();
  const std::size_t ny2 = y2_given_xuy1.output_size();
  const std::size_t ny0 = y0_given_xuy1y2.output_size();
  if (u_given_x.input_size() != nx) throw ShapeError("P(U|X) has wrong row count");
  if (y1_given_xu.input_size() != nx * nu) throw ShapeError("P(Y1|X,U) has wrong row count");
  if (y2_given_xuy1.input_size() != nx * nu * ny1) throw ShapeError("P(Y2|X,U,Y1) has wrong row count");
  if (y0_given_xuy1y2.input_size() != nx * nu * ny1 * ny2) {
    throw ShapeError("P(Y0|X,U,Y1,Y2) has wrong row count");
  }
  std::vector<double> w(nx * nu * ny0 * ny1 * ny2, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t u = 0; u < nu; ++u) {
      const double pxu = px[x] * u_given_x.row(x)[u];
      for (std::size_t y1 = 0; y1 < ny1; ++y1) {
        const double p1 = pxu * y1_given_xu.row(x * nu + u)[y1];
        for (std::size_t y2 = 0; y2 < ny2; ++y2) {
          const double p2 = p1 * y2_given_xuy1.row((x * nu + u) * ny1 + y1)[y2];
          const Distribution& r0 = y0_given_xuy1y2.row(((x * nu + u) * ny1 + y1) * ny2 + y2);
          for (std::size_t y0 = 0; y0 < ny0; ++y0) {
            w[(((x * nu + u) * ny0 + y0) * ny1 + y1) * ny2 + y2] = p2 * r0[y0];
          }
        }
      }
    }
  }
  MdcInstance inst{JointDistribution::from_weights({nx, nu, ny0, ny1, ny2}, std::move(w)),
                   std::move(d0), std::move(d1), std::move(d2)};
  shape_of(inst);
  return inst;
}

MdcInstance mdc_swap_roles(const MdcInstance& inst) {
  return MdcInstance{inst.joint.marginal(std::vector<std::size_t>{kX, kU, kY0, kY2, kY1}), inst.d0,
                     inst.d2, inst.d1};
}

MdcRegion mdc_region(const MdcInstance& inst) {
  shape_of(inst);
  const JointDistribution& j = inst.joint;
  MdcRegion r{};
  r.i_xu = mutual_information(j, {kX}, {kU});
  r.i_x_y1_u = mutual_information(j, {kX}, {kY1}, {kU});
  r.i_xy1_y2_u = mutual_information(j, {kX, kY1}, {kY2}, {kU});
  r.i_x_y0_y1y2u = mutual_information(j, {kX}, {kY0}, {kY1, kY2, kU});
  r.i_y1_y2_u = mutual_information(j, {kY1}, {kY2}, {kU});
  r.i_x_all = mutual_information(j, {kX}, {kU, kY0, kY1, kY2});
  r.eta = std::log2(r.i_x_all + r.i_y1_y2_u + 1.0) + 7.0;
  const double eta = r.eta;
  r.corner_r1 = r.i_x_y1_u + r.i_xu + 2 * eta - 1;
  r.corner_r2 = r.i_xy1_y2_u + r.i_x_y0_y1y2u + r.i_xu + 3 * eta - 1;
  const double i_x_y2_u = mutual_information(j, {kX}, {kY2}, {kU});
  const double i_xy2_y1_u = mutual_information(j, {kX, kY2}, {kY1}, {kU});
  r.swapped_r2 = i_x_y2_u + r.i_xu + 2 * eta - 1;
  r.swapped_r1 = i_xy2_y1_u + r.i_x_y0_y1y2u + r.i_xu + 3 * eta - 1;
  r.r1_min = mutual_information(j, {kX}, {kY1, kU}) + 2 * eta;
  r.r2_min = mutual_information(j, {kX}, {kY2, kU}) + 2 * eta;
  r.sum_min = mutual_information(j, {kX}, {kY0, kY1, kY2}, {kU}) + 2 * r.i_xu + r.i_y1_y2_u + 5 * eta;
  r.d0 = expected_distortion(j, kY0, inst.d0);
  r.d1 = expected_distortion(j, kY1, inst.d1);
  r.d2 = expected_distortion(j, kY2, inst.d2);
  r.stage_info = {r.i_xu, r.i_x_y1_u, r.i_xy1_y2_u, r.i_x_y0_y1y2u};
  for (double i : r.stage_info) r.stage_absorbed.push_back(detail::log_term(i) + 4.0 <= eta - 3.0 + 1e-12);
  return r;
}

std::pair<double, double> mdc_time_sharing_rates(const MdcRegion& region, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("time-sharing weight must be in [0, 1]");
  return {alpha * region.corner_r1 + (1 - alpha) * region.swapped_r1 + 1.0,
          alpha * region.corner_r2 + (1 - alpha) * region.swapped_r2 + 1.0};
}

bool mdc_region_contains(const MdcRegion& region, double r1, double r2, double tol) {
  return r1 >= region.r1_min - tol && r2 >= region.r2_min - tol && r1 + r2 >= region.sum_min - tol;
}

MdcCode mdc_design(const MdcInstance& inst, std::uint64_t seed, std::size_t candidates, bool swapped,
                   bool flag, double slack) {
  if (candidates < 1) throw ValidationError("mdc_design: at least one candidate required");
  const MdcInstance working = swapped ? mdc_swap_roles(inst) : inst;
  const MdStages st = stages_of(working);
  const MdcRegion wr = mdc_region(working);
  const MdShape& m = st.m;

  std::map<std::vector<std::size_t>, bool> seen;
  std::vector<MdCandidate> pool;
  std::vector<std::uint64_t> ids;
  for (std::uint64_t j = 0; j < candidates; ++j) {
    MdCandidate c = realize(working, st, seed, j);
    std::vector<std::size_t> key = c.u_table;
    for (const auto* t : {&c.y1_table, &c.y2_table, &c.y0_table}) key.insert(key.end(), t->begin(), t->end());
    if (!seen.emplace(std::move(key), true).second) continue;
    pool.push_back(std::move(c));
    ids.push_back(j);
  }
  std::vector<std::vector<double>> points;
  for (const auto& c : pool) points.push_back(c.coords);
  std::vector<double> target;
  for (double i : wr.stage_info) target.push_back(i + wr.eta - 3.0 + slack);
  target.insert(target.end(), {wr.d0, wr.d1, wr.d2});
  MixtureSolution mix;
  try {
    mix = minimizing_mix(points, target, 0, 1e-9);
  } catch (const InfeasibleError& e) {
    throw DesignError("mdc_design: candidate mixture infeasible; increase the candidate count (" +
                      std::string(e.what()) + ")");
  }

  MdcCode code{inst, swapped, flag, seed, candidates, pool.size(), slack, mdc_region(inst), wr,
               target, {}};
  for (std::size_t s = 0; s < mix.support.size(); ++s) {
    MdCandidate& c = pool[mix.support[s]];
    code.branches.push_back(MdcBranch{mix.weights[s], ids[mix.support[s]], c.u_table, c.y1_table,
                                      c.y2_table, c.y0_table, c.coords,
                                      HuffmanCode(Distribution::from_weights(c.p_u)),
                                      detail::row_codes(c.p_uy1, m.ny1),
                                      detail::row_codes(c.p_uy2, m.ny2),
                                      detail::row_codes(c.p_full, m.ny0)});
  }
  return code;
}

MdcDescriptions mdc_encode(const MdcCode& code, std::size_t x, double coin) {
  const Distribution px = code.instance.joint.marginal(kX);
  if (x >= px.size() || px[x] == 0.0) throw DomainError("mdc_encode: source symbol outside the support");
  const WorkingVars v = working_vars(code, x, coin);
  const MdcBranch& b = code.branches[v.q];
  BitString first, second;
  for (BitString* m : {&first, &second}) {
    if (code.flag) m->push_back(code.swapped);
    m->append(v.q, kBranchHeaderBits);
    b.u_code.encode_to(v.u, *m);
  }
  detail::code_for(b.y1_codes, v.u).encode_to(v.y1, first);
  detail::code_for(b.y2_codes, v.u).encode_to(v.y2, second);
  const std::size_t cell = (v.u * working_ny1(code) + v.y1) * working_ny2(code) + v.y2;
  detail::code_for(b.y0_codes, cell).encode_to(v.y0, second);

  MdcDescriptions d{v.q, v.u, v.y0, v.y1, v.y2, std::move(first), std::move(second)};
  if (code.swapped) {
    std::swap(d.y1, d.y2);
    std::swap(d.m1, d.m2);
  }
  return d;
}

MdcDecoded mdc_decode1(const MdcCode& code, const BitString& m1) {
  if (!code.swapped) return decode_working_first(code, m1);
  return to_actual(code, decode_working_second(code, m1, std::nullopt));
}

MdcDecoded mdc_decode2(const MdcCode& code, const BitString& m2) {
  if (!code.swapped) return decode_working_second(code, m2, std::nullopt);
  return to_actual(code, decode_working_first(code, m2));
}

MdcDecoded mdc_decode0(const MdcCode& code, const BitString& m1, const BitString& m2) {
  const BitString& first = code.swapped ? m2 : m1;
  const BitString& second = code.swapped ? m1 : m2;
  const MdcDecoded a = decode_working_first(code, first);
  MdcDecoded b = decode_working_second(code, second, a.y1);
  if (a.q != b.q || a.u != b.u) throw FramingError("descriptions disagree on the common part", 0);
  return to_actual(code, b);
}

RateReport mdc_evaluate(const MdcCode& code) {
  const Distribution px = code.instance.joint.marginal(kX);
  double l1 = 0.0, l2 = 0.0, ed0 = 0.0, ed1 = 0.0, ed2 = 0.0;
  for (std::size_t q = 0; q < code.branches.size(); ++q) {
    // Branch q is selected by any coin inside its CDF interval; use its midpoint.
    double lo = 0.0;
    for (std::size_t r = 0; r < q; ++r) lo += code.branches[r].weight;
    const double coin = lo + code.branches[q].weight / 2;
    for (std::size_t x = 0; x < px.size(); ++x) {
      const double p = code.branches[q].weight * px[x];
      if (p == 0.0) continue;
      const MdcDescriptions d = mdc_encode(code, x, coin);
      l1 += p * static_cast<double>(d.m1.size());
      l2 += p * static_cast<double>(d.m2.size());
      ed0 += p * code.instance.d0(x, d.y0);
      ed1 += p * code.instance.d1(x, d.y1);
      ed2 += p * code.instance.d2(x, d.y2);
    }
  }
  const MdcRegion& r = code.region;
  const double penalty = code.flag ? 1.0 : 0.0;
  const double b1 = (code.swapped ? r.swapped_r1 : r.corner_r1) + penalty;
  const double b2 = (code.swapped ? r.swapped_r2 : r.corner_r2) + penalty;
  RateReport rep;
  rep.scheme = "multiple-descriptions";
  rep.slack = code.slack;
  rep.support = code.branches.size();
  rep.lines = {{"R1", l1, b1, l1 <= b1},
               {"R2", l2, b2, l2 <= b2},
               {"D0", ed0, r.d0, ed0 <= r.d0 + 1e-9},
               {"D1", ed1, r.d1, ed1 <= r.d1 + 1e-9},
               {"D2", ed2, r.d2, ed2 <= r.d2 + 1e-9},
               {"support", static_cast<double>(rep.support), 7.0, rep.support <= 7}};
  static const char* kStage[] = {"stage_U", "stage_Y1", "stage_Y2", "stage_Y0"};
  for (std::size_t s = 0; s < 4; ++s) {
    const double lhs = detail::log_term(code.working_region.stage_info[s]) + 4.0;
    rep.lines.push_back({kStage[s], lhs, code.working_region.eta - 3.0,
                         code.working_region.stage_absorbed[s]});
  }
  rep.pass = true;
  for (const auto& line : rep.lines) rep.pass = rep.pass && line.pass;
  return rep;
}

}  // namespace sfrl
