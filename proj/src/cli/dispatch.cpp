#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cli_internal.hpp"
#include "sfrl/cli.hpp"

namespace sfrl::cli {

namespace fs = std::filesystem;

namespace {

std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t value) {
  if (flag->count() > 0) return value;
  if (const char* env = std::getenv("SFRL_SEED")) {
    std::size_t used = 0;
    std::uint64_t s = 0;
    try {
      s = std::stoull(env, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || env[used] != '\0') throw ConfigError(std::string("SFRL_SEED is not an integer: ") + env);
    return s;
  }
  return 1;
}

std::pair<unsigned, unsigned> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const unsigned k = static_cast<unsigned>(std::stoul(text));
      return {k, k};
    }
    return {static_cast<unsigned>(std::stoul(text.substr(0, dots))),
            static_cast<unsigned>(std::stoul(text.substr(dots + 2)))};
  } catch (const std::exception&) {
    throw ConfigError("range must look like 1..12: " + text);
  }
}

json with_optional(json cfg, const char* key, const std::string& path) {
  if (!path.empty()) cfg[key] = load_json(path);
  return cfg;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Strong functional representation toolkit: channel simulation, lossy and multiuser coding"};
  app.name("sfrl");
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed_value = 0;
  std::size_t trials = 0;
  std::string out_dir, format = "json";
  CLI::Option* seed_opt = app.add_option("--seed", seed_value, "Master seed (falls back to SFRL_SEED, then 1)");
  CLI::Option* trials_opt = app.add_option("--trials", trials, "Monte Carlo sessions, codebooks or trials");
  app.add_option("--out", out_dir, "Directory for reports, records, fixtures and tables");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  std::string kernel_path, source_path, config_path, joint_path, setup_path, bits_path, mode;
  std::vector<std::size_t> xs;
  std::uint64_t session = 0;
  bool soft = false, flag = false, emit_csv = false;
  int corner = 1;
  double alpha = 1.0;
  std::string k_text, sweep_text;

  auto* capacity = app.add_subcommand("capacity", "Channel capacity by Blahut-Arimoto");
  capacity->add_option("--kernel", kernel_path, "Kernel JSON")->required();

  auto* rd = app.add_subcommand("rd", "Rate-distortion function by Blahut-Arimoto");
  rd->add_option("--config", config_path, "JSON with source, distortion, D")->required();

  auto* chansim = app.add_subcommand("chansim", "Channel simulation with common randomness");
  chansim->require_subcommand(1);
  auto add_scheme_opts = [&](CLI::App* c) {
    c->add_option("--kernel", kernel_path, "Kernel JSON")->required();
    c->add_option("--source", source_path, "Source distribution JSON (source-coupled mode)");
    c->add_option("--mode", mode, "coupled or fixed")->check(CLI::IsMember({"coupled", "fixed"}));
    c->add_option("--session", session, "First session index");
  };
  auto* cs_encode = chansim->add_subcommand("encode", "Encode inputs, one session each");
  add_scheme_opts(cs_encode);
  cs_encode->add_option("--x", xs, "Input symbols")->required();
  cs_encode->add_option("--bits", bits_path, "Output container file");
  auto* cs_decode = chansim->add_subcommand("decode", "Decode a container of descriptions");
  add_scheme_opts(cs_decode);
  cs_decode->add_option("--bits", bits_path, "Input container file")->required();
  auto* cs_eval = chansim->add_subcommand("eval", "Evaluate exactness, index and length bounds");
  add_scheme_opts(cs_eval);

  auto* lossy = app.add_subcommand("lossy", "Lossy compression by mixed functional representations");
  lossy->require_subcommand(1);
  auto* ly_design = lossy->add_subcommand("design", "Design the two-branch mixture code");
  auto* ly_encode = lossy->add_subcommand("encode", "Encode source symbols");
  auto* ly_decode = lossy->add_subcommand("decode", "Decode a container");
  auto* ly_eval = lossy->add_subcommand("eval", "Check length and distortion bounds");
  for (auto* c : {ly_design, ly_encode, ly_decode, ly_eval}) {
    c->add_option("--config", config_path, "JSON with source, distortion, D")->required();
  }
  ly_encode->add_option("--x", xs, "Source symbols")->required();
  ly_encode->add_option("--session", session, "First session index");
  ly_encode->add_option("--bits", bits_path, "Output container file");
  ly_decode->add_option("--bits", bits_path, "Input container file")->required();
  ly_eval->add_flag("--soft", soft, "Evaluate the single soft codebook instead of the mixture");

  auto* gw = app.add_subcommand("gw", "Gray-Wyner code design and evaluation");
  gw->add_option("--config", config_path, "Gray-Wyner instance JSON")->required();

  auto* mdc = app.add_subcommand("mdc", "Multiple-description code design and evaluation");
  mdc->add_option("--config", config_path, "Multiple-description instance JSON")->required();
  mdc->add_option("--corner", corner, "Corner point 1 or 2")->check(CLI::IsMember({1, 2}));
  mdc->add_flag("--flag", flag, "Prepend the 1-bit corner flag");
  mdc->add_option("--alpha", alpha, "Time-sharing weight of the first corner")->check(CLI::Range(0.0, 1.0));

  auto* efi = app.add_subcommand("efi", "Excess functional information");
  efi->require_subcommand(1);
  auto* efi_lb = efi->add_subcommand("lb", "Exact lower bound");
  efi_lb->add_option("--joint", joint_path, "Joint JSON")->required();
  auto* efi_ub = efi->add_subcommand("ub", "Monte Carlo upper estimate and sandwich check");
  efi_ub->add_option("--joint", joint_path, "Joint JSON")->required();
  auto* efi_ex = efi->add_subcommand("example", "Tightness family Y = X + V mod 2^k");
  auto* k_opt = efi_ex->add_option("--k", k_text, "Single k");
  auto* sweep_opt = efi_ex->add_option("--sweep", sweep_text, "Range such as 1..12");
  k_opt->excludes(sweep_opt);
  efi_ex->add_flag("--emit-csv", emit_csv, "Print the sweep table as CSV");

  auto* gp = app.add_subcommand("gp", "State-channel reduction check");
  gp->add_option("--setup", setup_path, "Setup JSON")->required();

  auto* verify = app.add_subcommand("verify-all", "Run the built-in verification suite");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    RunOptions o;
    o.seed = resolve_seed(seed_opt, seed_value);
    if (trials_opt->count() > 0) o.trials = trials;

    if (verify->parsed()) return verify_all(out_dir.empty() ? fs::path("sfrl-verify") : fs::path(out_dir), o, err);

    json scheme_cfg = with_optional(with_optional(json::object(), "kernel", kernel_path), "source", source_path);
    if (!mode.empty()) scheme_cfg["mode"] = mode;

    Artifact a;
    if (capacity->parsed()) {
      a = run_capacity(with_optional(json::object(), "kernel", kernel_path), o);
    } else if (rd->parsed()) {
      a = run_rd(load_json(config_path), o);
    } else if (cs_eval->parsed()) {
      a = run_chansim_eval(scheme_cfg, o, session);
    } else if (cs_encode->parsed()) {
      a = run_chansim_encode(scheme_cfg, o, xs, session);
    } else if (cs_decode->parsed()) {
      a = run_chansim_decode(scheme_cfg, o, load_bytes(bits_path), session);
    } else if (ly_design->parsed()) {
      a = run_lossy_design(load_json(config_path), o);
    } else if (ly_encode->parsed()) {
      a = run_lossy_encode(load_json(config_path), o, xs, session);
    } else if (ly_decode->parsed()) {
      a = run_lossy_decode(load_json(config_path), o, load_bytes(bits_path));
    } else if (ly_eval->parsed()) {
      a = run_lossy_eval(load_json(config_path), o, soft);
    } else if (gw->parsed()) {
      a = run_gw(load_json(config_path), o);
    } else if (mdc->parsed()) {
      a = run_mdc(load_json(config_path), o, corner, flag, alpha);
    } else if (efi_lb->parsed()) {
      a = run_efi_lb(with_optional(json::object(), "joint", joint_path), o);
    } else if (efi_ub->parsed()) {
      a = run_efi_ub(with_optional(json::object(), "joint", joint_path), o);
    } else if (efi_ex->parsed()) {
      if (k_text.empty() && sweep_text.empty()) throw ConfigError("efi example needs --k or --sweep");
      const auto [lo, hi] = parse_range(k_text.empty() ? sweep_text : k_text);
      a = run_efi_example(lo, hi, o);
    } else if (gp->parsed()) {
      a = run_gp(json{{"setup", load_json(setup_path)}}, o);
    } else {
      err << app.help();
      return 2;
    }

    if (!bits_path.empty() && !a.binaries.empty()) {
      const auto& bytes = a.binaries.front().second;
      write_atomic(bits_path, std::string(bytes.begin(), bytes.end()));
    }
    if (!out_dir.empty()) {
      SessionLedger ledger = SessionLedger::load(fs::path(out_dir) / "session_ledger.json");
      for (const auto& c : a.substreams) ledger.claim(c);
      if (auto stale = persist(out_dir, a, format)) {
        err << "warning: replaced report with stale config digest " << *stale << "\n";
      }
      ledger.save(fs::path(out_dir) / "session_ledger.json");
    }
    const json doc = report_document(a);
    if (emit_csv && a.csv) {
      out << *a.csv;
    } else if (format == "csv") {
      out << to_csv(doc);
    } else {
      out << doc.dump(2) << "\n";
    }
    return a.pass ? 0 : 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    err << "error: malformed configuration: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace sfrl::cli
