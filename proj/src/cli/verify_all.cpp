#include <ostream>

#include "cli_internal.hpp"
#include "sfrl/integer_codes.hpp"

namespace sfrl::cli {

namespace fs = std::filesystem;

namespace {

json bsc_joint() { return json{{"source", {0.5, 0.5}}, {"kernel", {{"bsc", 0.11}}}}; }

json gray_wyner_config() {
  return json{{"source", {{0.4, 0.1}, {0.1, 0.4}}},
              {"u_given_x1x2", {{0.9, 0.1}, {0.5, 0.5}, {0.5, 0.5}, {0.1, 0.9}}},
              {"y1_given_x1u", {{0.8, 0.2}, {0.6, 0.4}, {0.4, 0.6}, {0.2, 0.8}}},
              {"y2_given_x2u", {{0.8, 0.2}, {0.6, 0.4}, {0.4, 0.6}, {0.2, 0.8}}},
              {"d1", "hamming"},
              {"d2", "hamming"},
              {"candidates", 256}};
}

json mdc_config() {
  json y1 = json::array(), y2 = json::array(), y0 = json::array();
  for (int x = 0; x < 2; ++x) {
    for (int r = 0; r < 2; ++r) y1.push_back(x == 0 ? json{0.85, 0.15} : json{0.15, 0.85});
    for (int r = 0; r < 4; ++r) y2.push_back(x == 0 ? json{0.8, 0.2} : json{0.2, 0.8});
    for (int r = 0; r < 8; ++r) y0.push_back(x == 0 ? json{0.95, 0.05} : json{0.05, 0.95});
  }
  return json{{"px", {0.5, 0.5}}, {"u_given_x", {{"bsc", 0.2}}}, {"y1_given_xu", y1}, {"y2_given_xuy1", y2},
              {"y0_given_xuy1y2", y0}, {"d0", "hamming"}, {"d1", "hamming"}, {"d2", "hamming"},
              {"candidates", 256}};
}

std::vector<json> gp_setups() {
  return {
      // State-independent auxiliary.
      json{{"p_s", {0.5, 0.5}}, {"u_given_s", {{0.5, 0.5}, {0.5, 0.5}}}, {"x_map", {{0, 0}, {1, 1}}},
           {"x_size", 2}, {"y_given_xs", {{0.9, 0.1}, {0.9, 0.1}, {0.1, 0.9}, {0.1, 0.9}}}},
      // U = S on a clean channel Y = X = U.
      json{{"p_s", {0.5, 0.5}}, {"u_given_s", {{"identity", 2}}}, {"x_map", {{0, 0}, {1, 1}}},
           {"x_size", 2}, {"y_given_xs", {{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}}}},
      // X = U xor S into Y = X xor S xor noise.
      json{{"p_s", {0.5, 0.5}}, {"u_given_s", {{"bsc", 0.2}}}, {"x_map", {{0, 1}, {1, 0}}},
           {"x_size", 2}, {"y_given_xs", {{0.9, 0.1}, {0.1, 0.9}, {0.1, 0.9}, {0.9, 0.1}}}},
  };
}

Artifact entropy_bound_checks(const RunOptions& o) {
  Artifact a;
  a.name = "entropy_bound";
  a.command = "verify-all";
  a.config = json{{"pmfs", 1000}, {"support", 64}, {"zipf_info_bits", {0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0}}};
  a.seed = o.seed;
  const EntropyBoundSweep sweep = entropy_bound_sweep(1000, 64, o.seed);
  json kraft = json::array();
  bool kraft_ok = true;
  for (double info : a.config["zipf_info_bits"]) {
    const ZipfCode z = zipf_build(zipf_params(info));
    const double k = z.kraft_upper_bound();
    kraft_ok = kraft_ok && k <= 1.0;
    kraft.push_back(json{{"info_bits", info}, {"lambda", z.lambda()}, {"kraft_upper_bound", k}});
  }
  a.payload = json{{"pmfs", sweep.pmfs}, {"violations", sweep.violations}, {"min_margin", sweep.min_margin},
                   {"zipf_kraft", kraft}};
  a.pass = sweep.violations == 0 && kraft_ok;
  return a;
}

}  // namespace

int verify_all(const fs::path& out_dir, const RunOptions& o, std::ostream& log) {
  std::vector<Artifact> items;
  auto named = [](Artifact a, const std::string& name) {
    a.name = name;
    return a;
  };

  const json bsc_kernel = json{{"kernel", {{"bsc", 0.11}}}};
  items.push_back(named(run_capacity(bsc_kernel, o), "capacity_bsc"));
  items.push_back(named(run_rd(json{{"source", {0.8, 0.2}}, {"distortion", "hamming"}, {"D", 0.11}}, o), "rd_bern02"));

  const json bsc_coupled = json{{"kernel", {{"bsc", 0.11}}}, {"source", {0.5, 0.5}}};
  const json z_fixed = json{{"kernel", {{"z", 0.3}}}, {"mode", "fixed"}};
  const json k4 = json{{"kernel", {{0.7, 0.1, 0.1, 0.1}, {0.1, 0.6, 0.2, 0.1}, {0.05, 0.15, 0.5, 0.3},
                                   {0.25, 0.25, 0.25, 0.25}}},
                       {"source", {0.4, 0.3, 0.2, 0.1}}};
  items.push_back(named(run_chansim_eval(bsc_coupled, o, 0), "chansim_eval_bsc"));
  items.push_back(named(run_chansim_eval(z_fixed, o, 0), "chansim_eval_z_fixed"));
  items.push_back(named(run_chansim_eval(k4, o, 0), "chansim_eval_4ary"));

  std::vector<std::size_t> xs;
  for (std::size_t i = 0; i < 64; ++i) xs.push_back((i * 7 + i / 3) % 2);
  const std::uint64_t first = 1u << 20;
  Artifact enc = run_chansim_encode(bsc_coupled, o, xs, first);
  Artifact dec = run_chansim_decode(bsc_coupled, o, enc.binaries.front().second, first);
  dec.pass = dec.payload["outputs"] == enc.payload["outputs"];
  items.push_back(std::move(enc));
  items.push_back(std::move(dec));

  const std::vector<std::pair<std::string, json>> lossy = {
      {"lossy_bern02_d005", json{{"source", {0.8, 0.2}}, {"distortion", "hamming"}, {"D", 0.05}}},
      {"lossy_bern02_d011", json{{"source", {0.8, 0.2}}, {"distortion", "hamming"}, {"D", 0.11}}},
      {"lossy_bern05_d005", json{{"source", {0.5, 0.5}}, {"distortion", "hamming"}, {"D", 0.05}}},
      {"lossy_bern05_d011", json{{"source", {0.5, 0.5}}, {"distortion", "hamming"}, {"D", 0.11}}},
      {"lossy_4ary_d02", json{{"source", {0.4, 0.3, 0.2, 0.1}}, {"distortion", "hamming"}, {"D", 0.2}}},
  };
  for (const auto& [name, cfg] : lossy) items.push_back(named(run_lossy_eval(cfg, o, false), name));
  Artifact lenc = run_lossy_encode(lossy[0].second, o, xs, first);
  Artifact ldec = run_lossy_decode(lossy[0].second, o, lenc.binaries.front().second);
  ldec.pass = ldec.payload["reconstructions"].size() == xs.size();
  items.push_back(std::move(lenc));
  items.push_back(std::move(ldec));

  items.push_back(run_gw(gray_wyner_config(), o));
  items.push_back(run_mdc(mdc_config(), o, 1, true, 1.0));
  items.push_back(run_mdc(mdc_config(), o, 2, true, 0.0));

  const json tri = json{{"matrix", {{0.15, 0.09, 0.06}, {0.03, 0.18, 0.09}, {0.08, 0.08, 0.24}}}};
  items.push_back(named(run_efi_ub(json{{"joint", bsc_joint()}}, o), "efi_bsc"));
  items.push_back(named(run_efi_ub(json{{"joint", tri}}, o), "efi_ternary"));
  items.push_back(run_efi_example(1, 12, o));
  items.push_back(entropy_bound_checks(o));

  const auto setups = gp_setups();
  for (std::size_t i = 0; i < setups.size(); ++i) {
    items.push_back(named(run_gp(json{{"setup", setups[i]}}, o), "gp_setup" + std::to_string(i + 1)));
  }

  // One ledger for the whole run: no substream range may be used twice.
  SessionLedger ledger;
  json summary = json::array();
  bool all = true;
  for (const auto& a : items) {
    for (const auto& c : a.substreams) {
      SubstreamClaim scoped = c;
      scoped.domain = a.name + "/" + c.domain;
      ledger.claim(scoped);
    }
    write_atomic(out_dir / "configs" / (a.name + ".json"), a.config.dump(2) + "\n");
    persist(out_dir, a, "json");
    summary.push_back(json{{"name", a.name}, {"command", a.command}, {"pass", a.pass}});
    log << (a.pass ? "PASS " : "FAIL ") << a.name << "\n";
    all = all && a.pass;
  }
  ledger.save(out_dir / "session_ledger.json");
  write_atomic(out_dir / "reports" / "summary.json",
               json{{"seed", o.seed}, {"items", summary}, {"pass", all}}.dump(2) + "\n");
  return all ? 0 : 1;
}

}  // namespace sfrl::cli
