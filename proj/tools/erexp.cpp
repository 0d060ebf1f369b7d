#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "erexp/bsc.hpp"
#include "erexp/channel_io.hpp"
#include "erexp/ensemble.hpp"
#include "erexp/exponents.hpp"
#include "erexp/forney.hpp"
#include "erexp/moments.hpp"
#include "erexp/report.hpp"
#include "erexp/simulator.hpp"
#include "erexp/type_oracle.hpp"

// Command-line front end.  Everything is deterministic: identical invocations
// produce byte-identical data files.  Each --out file gets a sibling
// <out>.manifest.json recording the command line, resolved configuration,
// seeds, tool version, and wall time (the sidecar is the only place wall time
// appears, keeping the data files reproducible).

namespace {

constexpr double kLn2 = 0.6931471805599453;

struct out_sink {
  std::string path;  // empty = stdout
};

class command_context {
 public:
  command_context(std::vector<std::string> argv) : argv_(std::move(argv)) {
    start_ = std::chrono::steady_clock::now();
  }

  void emit(const out_sink& sink, const std::string& content, nlohmann::json config,
            std::vector<std::uint64_t> seeds = {}) const {
    if (sink.path.empty()) {
      std::cout << content;
      return;
    }
    erexp::io::write_text_file(sink.path, content);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const nlohmann::json manifest =
        erexp::io::make_manifest(argv_, std::move(config), seeds, wall);
    erexp::io::write_text_file(sink.path + ".manifest.json", manifest.dump(2) + "\n");
  }

 private:
  std::vector<std::string> argv_;
  std::chrono::steady_clock::time_point start_;
};

// "lo:hi:count" (inclusive ends) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  auto parse_one = [&](const std::string& tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw erexp::domain_error(flag + ": cannot parse '" + tok + "'");
    }
    if (used != tok.size()) throw erexp::domain_error(flag + ": cannot parse '" + tok + "'");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
      const std::size_t next = text.find(':', pos);
      parts.push_back(text.substr(pos, next - pos));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    if (parts.size() != 3) throw erexp::domain_error(flag + ": range syntax is lo:hi:count");
    const double lo = parse_one(parts[0]);
    const double hi = parse_one(parts[1]);
    const long count = std::lround(parse_one(parts[2]));
    if (count < 1) throw erexp::domain_error(flag + ": count must be at least 1");
    if (count == 1) return {lo};
    for (long i = 0; i < count; ++i) {
      values.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return values;
  }
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = text.find(',', pos);
    values.push_back(parse_one(text.substr(pos, next - pos)));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return values;
}

std::optional<double> bsc_crossover(const std::string& spec) {
  if (spec.rfind("bsc:", 0) != 0) return std::nullopt;
  const std::string num = spec.substr(4);
  std::size_t used = 0;
  double p = 0.0;
  try {
    p = std::stod(num, &used);
  } catch (const std::exception&) {
    throw erexp::invalid_ensemble("cannot parse crossover probability '" + num + "'");
  }
  if (used != num.size()) {
    throw erexp::invalid_ensemble("cannot parse crossover probability '" + num + "'");
  }
  return p;
}

void scale_in_place(std::vector<double>& v, double factor) {
  for (double& x : v) x *= factor;
}

struct common_flags {
  std::string channel;
  bool bits = false;
  std::string out_path;

  double to_nats(double v) const { return bits ? v * kLn2 : v; }
  erexp::io::unit out_unit() const { return {bits ? 1.0 / kLn2 : 1.0}; }
  out_sink sink() const { return {out_path}; }
};

void add_common(CLI::App* cmd, common_flags& flags, bool needs_channel = true) {
  auto* ch = cmd->add_option("--channel", flags.channel,
                             "channel spec: bsc:<p> or a JSON file path");
  if (needs_channel) ch->required();
  cmd->add_flag("--bits", flags.bits, "rates/thresholds/exponents in bits instead of nats");
  cmd->add_option("--out", flags.out_path, "output file (default stdout)");
}

int dispatch(CLI::App& app, int argc, char** argv);

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"erasure/list-decoding error-exponent toolkit"};
  app.require_subcommand(1);
  try {
    return dispatch(app, argc, argv);
  } catch (const erexp::io::file_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

namespace {

int dispatch(CLI::App& app, int argc, char** argv) {
  command_context ctx(std::vector<std::string>(argv, argv + argc));

  // ---- bound ----------------------------------------------------------
  auto* bound = app.add_subcommand("bound", "exponent bounds");
  bound->require_subcommand(1);

  auto* bnew = bound->add_subcommand("new", "single-parameter bound at one (R, T)");
  common_flags bnew_flags;
  double bnew_rate = 0.0;
  double bnew_threshold = 0.0;
  double bnew_smax = 1.0;
  double bnew_tol = 1e-9;
  add_common(bnew, bnew_flags);
  bnew->add_option("--rate", bnew_rate, "code rate")->required();
  bnew->add_option("--threshold", bnew_threshold, "decision threshold T");
  bnew->add_option("--s-max", bnew_smax, "upper end of the s search interval");
  bnew->add_option("--tol", bnew_tol, "search bracket tolerance");
  bnew->callback([&] {
    const double rate = bnew_flags.to_nats(bnew_rate);
    const double threshold = bnew_flags.to_nats(bnew_threshold);
    const auto p = bsc_crossover(bnew_flags.channel);
    erexp::exponent_result res;
    const char* method;
    if (p.has_value()) {
      erexp::bsc::require_crossover(*p);
      res = erexp::bsc::e1_star_bsc(*p, rate, threshold);
      method = "closed_form";
    } else {
      const erexp::ensemble ens = erexp::io::load_channel(bnew_flags.channel);
      res = erexp::e1_star(ens, rate, threshold, {bnew_smax, bnew_tol});
      method = "search";
    }
    nlohmann::json doc = erexp::io::exponent_json(rate, threshold, res, bnew_flags.out_unit());
    doc["method"] = method;
    nlohmann::json config = {{"channel", bnew_flags.channel}, {"rate", rate},
                             {"threshold", threshold},        {"s_max", bnew_smax},
                             {"tol", bnew_tol},               {"bits", bnew_flags.bits}};
    ctx.emit(bnew_flags.sink(), doc.dump(2) + "\n", std::move(config));
  });

  auto* bforney = bound->add_subcommand("forney", "two-parameter reference bound at one (R, T)");
  common_flags bforney_flags;
  double bf_rate = 0.0;
  double bf_threshold = 0.0;
  erexp::forney_options bf_opts;
  add_common(bforney, bforney_flags);
  bforney->add_option("--rate", bf_rate, "code rate")->required();
  bforney->add_option("--threshold", bf_threshold, "decision threshold T");
  bforney->add_option("--grid", bf_opts.grid, "coarse grid points per axis");
  bforney->add_option("--rounds", bf_opts.rounds, "refinement rounds");
  bforney->callback([&] {
    const double rate = bforney_flags.to_nats(bf_rate);
    const double threshold = bforney_flags.to_nats(bf_threshold);
    const erexp::ensemble ens = erexp::io::load_channel(bforney_flags.channel);
    const erexp::forney_result res = erexp::e1_forney(ens, rate, threshold, bf_opts);
    nlohmann::json config = {{"channel", bforney_flags.channel},
                             {"rate", rate},
                             {"threshold", threshold},
                             {"grid", bf_opts.grid},
                             {"rounds", bf_opts.rounds},
                             {"bits", bforney_flags.bits}};
    ctx.emit(bforney_flags.sink(),
             erexp::io::forney_json(rate, threshold, res, bforney_flags.out_unit()).dump(2) + "\n",
             std::move(config));
  });

  auto run_sweep = [&ctx](const common_flags& flags, const std::string& rates_text,
                          const std::string& thresholds_text, bool with_forney) {
    std::vector<double> rates = parse_grid(rates_text, "--rates");
    std::vector<double> thresholds = parse_grid(thresholds_text, "--thresholds");
    if (flags.bits) {
      scale_in_place(rates, kLn2);
      scale_in_place(thresholds, kLn2);
    }
    const erexp::ensemble ens = erexp::io::load_channel(flags.channel);
    erexp::sweep_options opts;
    opts.with_forney = with_forney;
    const auto rows = erexp::sweep(ens, rates, thresholds, opts);
    nlohmann::json config = {{"channel", flags.channel},
                             {"rates", rates},
                             {"thresholds", thresholds},
                             {"with_forney", with_forney},
                             {"bits", flags.bits}};
    ctx.emit(flags.sink(), erexp::io::sweep_csv(rows, with_forney, flags.out_unit()),
             std::move(config));
  };

  auto* bcompare = bound->add_subcommand("compare", "sweep with the reference bound and gap");
  common_flags bcompare_flags;
  std::string bc_rates;
  std::string bc_thresholds = "0";
  add_common(bcompare, bcompare_flags);
  bcompare->add_option("--rates", bc_rates, "rate list or lo:hi:count")->required();
  bcompare->add_option("--thresholds", bc_thresholds, "threshold list or lo:hi:count");
  bcompare->callback([&] { run_sweep(bcompare_flags, bc_rates, bc_thresholds, true); });

  auto* bsweep = bound->add_subcommand("sweep", "sweep the single-parameter bound");
  common_flags bsweep_flags;
  std::string bs_rates;
  std::string bs_thresholds = "0";
  bool bs_with_forney = false;
  add_common(bsweep, bsweep_flags);
  bsweep->add_option("--rates", bs_rates, "rate list or lo:hi:count")->required();
  bsweep->add_option("--thresholds", bs_thresholds, "threshold list or lo:hi:count");
  bsweep->add_flag("--with-forney", bs_with_forney, "add reference-bound columns");
  bsweep->callback([&] { run_sweep(bsweep_flags, bs_rates, bs_thresholds, bs_with_forney); });

  // ---- check symmetry --------------------------------------------------
  auto* check = app.add_subcommand("check", "structural checks");
  check->require_subcommand(1);
  auto* csym = check->add_subcommand("symmetry", "probe the output-symmetry property");
  common_flags csym_flags;
  int cs_points = 21;
  double cs_tol = erexp::ensemble::kDefaultSymmetryTol;
  add_common(csym, csym_flags);
  csym->add_option("--points", cs_points, "s-grid points on [0,1]")->check(CLI::Range(2, 100000));
  csym->add_option("--tol", cs_tol, "deviation tolerance");
  csym->callback([&] {
    const erexp::ensemble ens = erexp::io::load_channel(csym_flags.channel);
    std::vector<double> grid(cs_points);
    for (int i = 0; i < cs_points; ++i) grid[i] = static_cast<double>(i) / (cs_points - 1);
    const erexp::symmetry_report rep = erexp::check_symmetry(ens, grid, cs_tol);
    nlohmann::json config = {{"channel", csym_flags.channel},
                             {"points", cs_points},
                             {"tol", cs_tol}};
    ctx.emit(csym_flags.sink(), erexp::io::symmetry_json(rep).dump(2) + "\n", std::move(config));
  });

  // ---- moments verify ---------------------------------------------------
  auto* moments_cmd = app.add_subcommand("moments", "distance-enumerator moments");
  moments_cmd->require_subcommand(1);
  auto* mverify = moments_cmd->add_subcommand("verify", "exact oracle vs asymptotic prediction");
  common_flags mv_flags;
  std::vector<int> mv_n{48, 96, 192};
  double mv_rate = 0.2;
  std::string mv_s = "0.5";
  std::string mv_deltas = "0.05,0.5";
  double mv_tail = 1e-15;
  add_common(mverify, mv_flags, /*needs_channel=*/false);
  mverify->add_option("--n", mv_n, "block lengths")
      ->delimiter(',')
      ->check(CLI::Range(1, 4096));
  mverify->add_option("--rate", mv_rate, "code rate");
  mverify->add_option("--s", mv_s, "moment orders, list or lo:hi:count");
  mverify->add_option("--deltas", mv_deltas, "normalized distances, list or lo:hi:count");
  mverify->add_option("--tail-tol", mv_tail, "binomial mass left outside the window");
  mverify->callback([&] {
    const double rate = mv_flags.to_nats(mv_rate);
    const std::vector<double> s_values = parse_grid(mv_s, "--s");
    const std::vector<double> deltas = parse_grid(mv_deltas, "--deltas");
    std::vector<erexp::moments::moment_report> rows;
    for (int n : mv_n) {
      for (double s : s_values) {
        for (double delta : deltas) {
          rows.push_back(erexp::moments::verify_moment(n, rate, s, delta, mv_tail));
        }
      }
    }
    nlohmann::json config = {{"n", mv_n},         {"rate", rate},
                             {"s", s_values},     {"deltas", deltas},
                             {"tail_tol", mv_tail}, {"bits", mv_flags.bits}};
    ctx.emit(mv_flags.sink(), erexp::io::moments_csv(rows, mv_flags.out_unit()),
             std::move(config));
  });

  // ---- oracle types -----------------------------------------------------
  auto* oracle_cmd = app.add_subcommand("oracle", "type-based re-derivations");
  oracle_cmd->require_subcommand(1);
  auto* otypes = oracle_cmd->add_subcommand("types", "grid oracle vs closed-form exponent");
  common_flags ot_flags;
  std::string ot_rates = "0.2";
  std::string ot_s = "0.2,0.5,0.8";
  double ot_grid = 0.0;
  add_common(otypes, ot_flags);
  otypes->add_option("--rates", ot_rates, "rate list or lo:hi:count");
  otypes->add_option("--s", ot_s, "tilt values, list or lo:hi:count");
  otypes->add_option("--grid-res", ot_grid, "simplex grid resolution (default by |X|)");
  otypes->callback([&] {
    std::vector<double> rates = parse_grid(ot_rates, "--rates");
    const std::vector<double> s_values = parse_grid(ot_s, "--s");
    if (ot_flags.bits) scale_in_place(rates, kLn2);
    const erexp::ensemble ens = erexp::io::load_channel(ot_flags.channel);
    std::vector<erexp::io::oracle_row> rows;
    for (double rate : rates) {
      for (double s : s_values) {
        erexp::io::oracle_row row;
        row.rate = rate;
        row.s = s;
        row.s_r = erexp::solve_s_r(ens, rate);
        row.lambda_closed = erexp::lambda_exp(ens, rate, s);
        const auto oracle = erexp::types::b_exponent_oracle(ens, rate, s, ot_grid);
        row.lambda_oracle = oracle.value;
        row.on_boundary = oracle.on_boundary;
        rows.push_back(row);
      }
    }
    nlohmann::json config = {{"channel", ot_flags.channel},
                             {"rates", rates},
                             {"s", s_values},
                             {"grid_res", ot_grid},
                             {"bits", ot_flags.bits}};
    ctx.emit(ot_flags.sink(), erexp::io::oracle_csv(rows, ot_flags.out_unit()),
             std::move(config));
  });

  // ---- simulate ----------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo threshold decoding");
  common_flags sim_flags;
  int sim_n = 0;
  double sim_rate = 0.0;
  double sim_threshold = 0.0;
  std::uint64_t sim_trials = 10000;
  std::uint64_t sim_seed = 1;
  unsigned sim_codebooks = 32;
  std::string sim_format = "json";
  add_common(simulate, sim_flags);
  simulate->add_option("--n", sim_n, "block length")->required()->check(CLI::Range(1, 1 << 20));
  simulate->add_option("--rate", sim_rate, "code rate")->required();
  simulate->add_option("--threshold", sim_threshold, "decision threshold T");
  simulate->add_option("--trials", sim_trials, "number of trials")->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 40));
  simulate->add_option("--seed", sim_seed, "master seed");
  simulate->add_option("--codebooks", sim_codebooks, "fresh codebooks per run")
      ->check(CLI::Range(1u, 65536u));
  simulate->add_option("--format", sim_format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  simulate->callback([&] {
    const double rate = sim_flags.to_nats(sim_rate);
    const double threshold = sim_flags.to_nats(sim_threshold);
    const erexp::ensemble ens = erexp::io::load_channel(sim_flags.channel);
    const erexp::sim::sim_result res =
        erexp::sim::run(ens, sim_n, rate, threshold, sim_trials, sim_seed, sim_codebooks);
    nlohmann::json config = {{"channel", sim_flags.channel}, {"n", sim_n},
                             {"rate", rate},                 {"threshold", threshold},
                             {"trials", sim_trials},         {"seed", sim_seed},
                             {"codebooks", sim_codebooks},   {"format", sim_format},
                             {"bits", sim_flags.bits}};
    const std::string content = sim_format == "csv"
                                    ? erexp::io::sim_csv(res, sim_flags.out_unit())
                                    : erexp::io::sim_json(res, sim_flags.out_unit()).dump(2) + "\n";
    ctx.emit(sim_flags.sink(), content, std::move(config), {sim_seed});
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return 0;
}

}  // namespace
