#include <cmath>
#include <functional>
#include <string>

#include "cli_internal.hpp"
#include "sfrl/rng.hpp"

namespace sfrl::cli {

namespace {

constexpr std::uint64_t kCoinDomain = 0x434f494eULL;

double coin_for(std::uint64_t seed, std::uint64_t session) {
  RngStream rng(seed, derive_stream(kCoinDomain, session));
  return rng.next_uniform();
}

// Midpoint of each branch's coin interval, so enumerations visit every branch.
std::vector<double> branch_coins(const std::vector<double>& weights) {
  std::vector<double> coins;
  double lo = 0.0;
  for (double w : weights) {
    coins.push_back(lo + w / 2);
    lo += w;
  }
  return coins;
}

std::size_t size_field(const json& cfg, const char* key, std::size_t fallback) {
  return cfg.contains(key) ? cfg.at(key).get<std::size_t>() : fallback;
}

ChannelSimScheme scheme_from(const json& cfg, std::uint64_t seed) {
  const Kernel k = parse_kernel(cfg.at("kernel"));
  const bool fixed = cfg.value("mode", cfg.contains("source") ? "coupled" : "fixed") == "fixed";
  if (fixed) return make_fixed_input_scheme(k, seed);
  if (!cfg.contains("source")) throw ConfigError("source-coupled mode needs a source distribution");
  return make_source_coupled_scheme(parse_distribution(cfg.at("source")), k, seed);
}

// 1 - h2(D) style closed forms for binary sources under Hamming distortion.
std::optional<double> binary_hamming_rd(const Distribution& src, const json& d, double target) {
  if (src.size() != 2 || !d.is_string()) return std::nullopt;
  const double p = std::min(src[0], src[1]);
  if (target >= p) return 0.0;
  return binary_entropy(p) - binary_entropy(target);
}

std::vector<std::size_t> decode_all(const std::vector<std::uint8_t>& container,
                                    const std::function<std::size_t(BitReader&, std::size_t)>& step) {
  const BitString bits = from_container(container);
  BitReader in(bits);
  std::vector<std::size_t> out;
  while (!in.at_end()) out.push_back(step(in, out.size()));
  return out;
}

Artifact base(std::string name, std::string command, json cfg, const RunOptions& o) {
  Artifact a;
  a.name = std::move(name);
  a.command = std::move(command);
  a.config = std::move(cfg);
  a.seed = o.seed;
  return a;
}

}  // namespace

Artifact run_capacity(const json& cfg, const RunOptions& o) {
  Artifact a = base("capacity", "capacity", cfg, o);
  a.payload = to_json(blahut_arimoto_capacity(parse_kernel(cfg.at("kernel"))));
  return a;
}

Artifact run_rd(const json& cfg, const RunOptions& o) {
  Artifact a = base("rd", "rd", cfg, o);
  const Distribution src = parse_distribution(cfg.at("source"));
  const json& dj = cfg.at("distortion");
  const DistortionMatrix d = parse_distortion(dj, src.size(), dj.is_string() ? src.size() : dj.at(0).size());
  const double target = cfg.at("D").get<double>();
  const RdSolution rd = blahut_arimoto_rate_distortion(src, d, target);
  a.payload = to_json(rd);
  if (auto closed = binary_hamming_rd(src, dj, target)) {
    a.payload["closed_form_rate"] = *closed;
    a.payload["closed_form_error"] = std::abs(rd.rate - *closed);
    a.pass = std::abs(rd.rate - *closed) <= 1e-3;
  }
  return a;
}

Artifact run_chansim_eval(const json& cfg, const RunOptions& o, std::uint64_t first_session) {
  Artifact a = base("chansim_eval", "chansim eval", cfg, o);
  const ChannelSimScheme s = scheme_from(cfg, o.seed);
  const std::size_t trials = o.trials.value_or(10000);
  const SimReport r = evaluate_scheme(s, trials, first_session);
  a.substreams.push_back({"chansim.eval", o.seed, first_session, first_session + trials, true,
                          config_digest(cfg)});
  a.payload = to_json(r);
  a.pass = r.pass;
  return a;
}

Artifact run_chansim_encode(const json& cfg, const RunOptions& o, const std::vector<std::size_t>& xs,
                            std::uint64_t session) {
  Artifact a = base("chansim_encode", "chansim encode", cfg, o);
  const ChannelSimScheme s = scheme_from(cfg, o.seed);
  BitString bits;
  json ks = json::array(), ys = json::array(), lengths = json::array();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const SelectionOutcome sel = sim_select(s, xs[i], session + i);
    const std::size_t before = bits.size();
    sim_encode_to(s, xs[i], session + i, bits);
    ks.push_back(sel.k);
    ys.push_back(sel.y);
    lengths.push_back(bits.size() - before);
  }
  a.substreams.push_back({"chansim.session", o.seed, session, session + xs.size(), false, config_digest(cfg)});
  a.payload = json{{"first_session", session}, {"inputs", xs}, {"indices", ks},
                   {"outputs", ys},            {"lengths", lengths}, {"total_bits", bits.size()}};
  a.binaries.emplace_back("chansim_encode.sfrl", to_container(bits));
  return a;
}

Artifact run_chansim_decode(const json& cfg, const RunOptions& o, const std::vector<std::uint8_t>& container,
                            std::uint64_t session) {
  Artifact a = base("chansim_decode", "chansim decode", cfg, o);
  const ChannelSimScheme s = scheme_from(cfg, o.seed);
  const auto ys = decode_all(container, [&](BitReader& in, std::size_t i) { return sim_decode(s, in, session + i); });
  a.payload = json{{"first_session", session}, {"outputs", ys}};
  return a;
}

namespace {

MixtureLossyCode mixture_from(const json& cfg, std::uint64_t seed) {
  const Distribution src = parse_distribution(cfg.at("source"));
  const json& dj = cfg.at("distortion");
  const DistortionMatrix d = parse_distortion(dj, src.size(), dj.is_string() ? src.size() : dj.at(0).size());
  return design_mixture(src, d, cfg.at("D").get<double>(), seed, size_field(cfg, "candidates", 64),
                        cfg.value("slack", kMixtureSlack));
}

}  // namespace

Artifact run_lossy_design(const json& cfg, const RunOptions& o) {
  Artifact a = base("lossy_design", "lossy design", cfg, o);
  const MixtureLossyCode c = mixture_from(cfg, o.seed);
  json branches = json::array();
  for (const auto& b : c.branches) {
    branches.push_back(json{{"codebook_stream", b.codebook_stream}, {"table", b.function.table},
                            {"reconstruction", to_json(b.reconstruction)}, {"entropy", b.entropy},
                            {"distortion", b.distortion}, {"huffman_lengths", b.huffman.lengths()}});
  }
  a.payload = json{{"rd", to_json(c.rd)},
                   {"eta", c.eta},
                   {"slack", c.slack},
                   {"candidates", c.candidates},
                   {"distinct_candidates", c.distinct_candidates},
                   {"lambda_mix", c.lambda_mix},
                   {"branches", branches},
                   {"design_length", c.design_length},
                   {"design_distortion", c.design_distortion},
                   {"design_entropy", c.design_entropy}};
  return a;
}

Artifact run_lossy_encode(const json& cfg, const RunOptions& o, const std::vector<std::size_t>& xs,
                          std::uint64_t session) {
  Artifact a = base("lossy_encode", "lossy encode", cfg, o);
  const MixtureLossyCode c = mixture_from(cfg, o.seed);
  BitString bits;
  for (std::size_t i = 0; i < xs.size(); ++i) bits.append(mixture_encode(c, xs[i], coin_for(o.seed, session + i)));
  a.substreams.push_back({"lossy.session", o.seed, session, session + xs.size(), false, config_digest(cfg)});
  a.payload = json{{"first_session", session}, {"inputs", xs}, {"total_bits", bits.size()}};
  a.binaries.emplace_back("lossy_encode.sfrl", to_container(bits));
  return a;
}

Artifact run_lossy_decode(const json& cfg, const RunOptions& o, const std::vector<std::uint8_t>& container) {
  Artifact a = base("lossy_decode", "lossy decode", cfg, o);
  const MixtureLossyCode c = mixture_from(cfg, o.seed);
  const auto ys = decode_all(container, [&](BitReader& in, std::size_t) { return mixture_decode(c, in); });
  a.payload = json{{"reconstructions", ys}};
  return a;
}

Artifact run_lossy_eval(const json& cfg, const RunOptions& o, bool soft) {
  Artifact a = base(soft ? "lossy_eval_soft" : "lossy_eval", "lossy eval", cfg, o);
  const Distribution src = parse_distribution(cfg.at("source"));
  const json& dj = cfg.at("distortion");
  const double target = cfg.at("D").get<double>();
  LossyReport r;
  if (soft) {
    const DistortionMatrix d = parse_distortion(dj, src.size(), dj.is_string() ? src.size() : dj.at(0).size());
    const std::size_t codebooks = o.trials.value_or(1000);
    r = evaluate_soft(design_soft(src, d, target, o.seed), codebooks);
    a.substreams.push_back({"lossy.soft", o.seed, 0, codebooks, true, config_digest(cfg)});
  } else {
    r = evaluate_mixture(mixture_from(cfg, o.seed));
  }
  a.payload = to_json(r);
  a.pass = r.pass;
  if (auto closed = binary_hamming_rd(src, dj, target)) {
    a.payload["closed_form_rate"] = *closed;
    a.payload["closed_form_error"] = std::abs(r.rate - *closed);
    a.pass = a.pass && std::abs(r.rate - *closed) <= 1e-3;
  }
  return a;
}

Artifact run_gw(const json& cfg, const RunOptions& o) {
  Artifact a = base("gw", "gw", cfg, o);
  const GrayWynerInstance inst = parse_gray_wyner(cfg);
  const GwCode code = gw_design(inst, o.seed, size_field(cfg, "candidates", 256), cfg.value("slack", 0.05));
  const RateReport r = gw_evaluate(code);

  // Golden descriptions for every branch and reachable source pair.
  std::vector<double> weights;
  json branches = json::array();
  for (const auto& b : code.branches) {
    weights.push_back(b.weight);
    branches.push_back(json{{"weight", b.weight}, {"candidate", b.candidate}, {"coords", b.coords}});
  }
  BitString fixture;
  std::size_t mismatches = 0;
  const auto& s = inst.source.shape();
  for (double coin : branch_coins(weights)) {
    for (std::size_t x1 = 0; x1 < s[0]; ++x1) {
      for (std::size_t x2 = 0; x2 < s[1]; ++x2) {
        if (inst.source(x1, x2) == 0.0) continue;
        const GwDescriptions d = gw_encode(code, x1, x2, coin);
        if (gw_decode1(code, d.m0, d.m1).y != d.y1 || gw_decode2(code, d.m0, d.m2).y != d.y2) ++mismatches;
        fixture.append(d.m0);
        fixture.append(d.m1);
        fixture.append(d.m2);
      }
    }
  }
  a.payload = json{{"targets", to_json(code.targets)},
                   {"report", to_json(r)},
                   {"branches", branches},
                   {"distinct_candidates", code.distinct_candidates},
                   {"decode_mismatches", mismatches}};
  a.pass = r.pass && mismatches == 0;
  a.binaries.emplace_back("gw_descriptions.sfrl", to_container(fixture));
  return a;
}

Artifact run_mdc(const json& cfg, const RunOptions& o, int corner, bool flag, double alpha) {
  if (corner != 1 && corner != 2) throw ConfigError("corner must be 1 or 2");
  Artifact a = base("mdc_corner" + std::to_string(corner), "mdc", cfg, o);
  const MdcInstance inst = parse_mdc(cfg);
  const MdcCode code = mdc_design(inst, o.seed, size_field(cfg, "candidates", 256), corner == 2, flag,
                                  cfg.value("slack", 0.05));
  const RateReport r = mdc_evaluate(code);
  const auto [ts1, ts2] = mdc_time_sharing_rates(code.region, alpha);
  const bool ts_inside = mdc_region_contains(code.region, ts1, ts2);

  std::vector<double> weights;
  json branches = json::array();
  for (const auto& b : code.branches) {
    weights.push_back(b.weight);
    branches.push_back(json{{"weight", b.weight}, {"candidate", b.candidate}, {"coords", b.coords}});
  }
  const Distribution px = inst.joint.marginal(0);
  BitString fixture;
  std::size_t mismatches = 0;
  for (double coin : branch_coins(weights)) {
    for (std::size_t x = 0; x < px.size(); ++x) {
      if (px[x] == 0.0) continue;
      const MdcDescriptions d = mdc_encode(code, x, coin);
      const MdcDecoded joint = mdc_decode0(code, d.m1, d.m2);
      if (mdc_decode1(code, d.m1).y1 != d.y1 || mdc_decode2(code, d.m2).y2 != d.y2 || joint.y0 != d.y0) {
        ++mismatches;
      }
      fixture.append(d.m1);
      fixture.append(d.m2);
    }
  }
  a.payload = json{{"corner", corner},
                   {"flag", flag},
                   {"region", to_json(code.region)},
                   {"report", to_json(r)},
                   {"branches", branches},
                   {"distinct_candidates", code.distinct_candidates},
                   {"time_sharing", json{{"alpha", alpha}, {"r1", ts1}, {"r2", ts2}, {"inside_region", ts_inside}}},
                   {"decode_mismatches", mismatches}};
  a.pass = r.pass && mismatches == 0 && ts_inside;
  a.binaries.emplace_back("mdc_corner" + std::to_string(corner) + ".sfrl", to_container(fixture));
  return a;
}

Artifact run_efi_lb(const json& cfg, const RunOptions& o) {
  Artifact a = base("efi_lb", "efi lb", cfg, o);
  const JointDistribution j = parse_joint(cfg.at("joint"));
  const double info = mutual_information(j);
  a.payload = json{{"lower_bound", psi_lower_bound(j)}, {"i_xy", info},
                   {"sfrl_bound", std::log2(info + 1.0) + 4.0}};
  return a;
}

Artifact run_efi_ub(const json& cfg, const RunOptions& o) {
  Artifact a = base("efi_ub", "efi ub", cfg, o);
  const std::size_t trials = o.trials.value_or(10000);
  const EfiReport r = efi_evaluate(parse_joint(cfg.at("joint")), trials, o.seed);
  a.substreams.push_back({"efi.codebooks", o.seed, 0, trials, true, config_digest(cfg)});
  a.payload = to_json(r);
  a.pass = r.pass;
  return a;
}

Artifact run_efi_example(unsigned k_lo, unsigned k_hi, const RunOptions& o) {
  if (k_lo > k_hi) throw ConfigError("empty k range");
  Artifact a = base(k_lo == k_hi ? "efi_example_k" + std::to_string(k_lo) : "efi_example_sweep", "efi example",
                    json{{"k_lo", k_lo}, {"k_hi", k_hi}}, o);
  json rows = json::array();
  std::string csv = "k,i_xy,log2_i_plus_1_minus_1,psi_lb,h_v,h_v_closed\n";
  for (unsigned k = k_lo; k <= k_hi; ++k) {
    const LbExampleFamily f = lb_example_build(k);
    rows.push_back(to_json(f));
    a.pass = a.pass && f.pass;
    json line = json::array({f.k, f.i_xy, f.tightness_floor, f.psi_lb, f.h_v, f.h_v_closed});
    std::string text;
    for (std::size_t i = 0; i < line.size(); ++i) text += (i ? "," : "") + line[i].dump();
    csv += text + "\n";
  }
  a.payload = k_lo == k_hi ? rows[0] : json{{"examples", rows}};
  a.csv = csv;
  return a;
}

Artifact run_gp(const json& cfg, const RunOptions& o) {
  Artifact a = base("gp", "gp", cfg, o);
  const GpSetup setup = parse_gp(cfg.at("setup"));
  const std::size_t trials = o.trials.value_or(10000);
  const GpReport r = gp_reduce(setup, trials, o.seed);
  a.substreams.push_back({"gp.codebooks", o.seed, 0, trials, true, config_digest(cfg)});
  a.payload = to_json(r);
  a.payload["rate_gap"] = gp_rate_gap(setup);
  a.pass = r.pass;
  return a;
}

}  // namespace sfrl::cli
