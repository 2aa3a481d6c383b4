// Command-line front end: analyze a CSV of (x, sigma) pairs, run seeded
// simulation experiments, or print the closed-form oracle table.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csv_io.hpp"
#include "sim_config.hpp"

#include "hart/errors.hpp"
#include "hart/estimation.hpp"
#include "hart/oracle_calc.hpp"
#include "hart/procedures.hpp"
#include "hart/sim.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_data = 3;

struct AnalyzeArgs {
  std::string input;
  std::string output;
  double alpha = 0.1;
  std::string procedures = "hart,bh,az";
  std::string null_mode = "theoretical";
  double coverage = 0.99;
  double lambda = 0.5;
  std::string jackknife = "on";
  double sigma_cap = 0.0;
};

std::vector<hart::Procedure> parse_procedures(const std::string& list,
                                              bool allow_oracles) {
  std::vector<hart::Procedure> out;
  std::istringstream in(list);
  std::string name;
  while (std::getline(in, name, ',')) {
    if (name == "hart") out.push_back(hart::Procedure::HART);
    else if (name == "bh") out.push_back(hart::Procedure::BH);
    else if (name == "az") out.push_back(hart::Procedure::AZ);
    else if (allow_oracles && name == "or-full") out.push_back(hart::Procedure::OR_FULL);
    else if (allow_oracles && name == "or-z") out.push_back(hart::Procedure::OR_Z);
    else if (allow_oracles && name == "or-p") out.push_back(hart::Procedure::OR_P);
    else throw hart::config_error("unknown procedure '" + name + "'");
  }
  if (out.empty()) throw hart::config_error("no procedures requested");
  return out;
}

bool parse_on_off(const std::string& v, const char* flag) {
  if (v == "on") return true;
  if (v == "off") return false;
  throw hart::config_error(std::string("flag ") + flag + " expects on|off");
}

int cmd_analyze(const AnalyzeArgs& args) {
  const std::vector<hart::Procedure> procedures =
      parse_procedures(args.procedures, /*allow_oracles=*/false);
  if (!(args.alpha > 0.0 && args.alpha < 1.0))
    throw hart::config_error("--alpha must lie in (0,1)");
  const bool jackknife = parse_on_off(args.jackknife, "--jackknife");
  const bool empirical = [&] {
    if (args.null_mode == "theoretical") return false;
    if (args.null_mode == "empirical") return true;
    throw hart::config_error("--null expects theoretical|empirical");
  }();

  const hart_cli::AnalysisRows rows = hart_cli::read_analysis_csv(args.input);
  const std::size_t n = rows.x.size();
  if (n == 0) {
    std::cerr << "error: input has no data rows\n";
    return exit_data;
  }

  std::vector<hart::TestItem> items(n);
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    items[i].x = rows.x[i];
    items[i].sigma = rows.sigma[i];
    z[i] = rows.x[i] / rows.sigma[i];
  }

  double sigma0 = 1.0;
  try {
    if (empirical) sigma0 = hart::empirical_null(z, args.coverage).sigma0;
  } catch (const hart::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_data;
  }

  std::vector<double> pvals(n);
  for (std::size_t i = 0; i < n; ++i) {
    items[i].z = z[i];
    pvals[i] = hart::pvalue_from_z(z[i], sigma0);
    items[i].p = pvals[i];
  }

  std::vector<double> t_hat(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<hart::DecisionSet> decisions;
  decisions.reserve(procedures.size());
  try {
    for (hart::Procedure proc : procedures) {
      if (proc == hart::Procedure::HART) {
        hart::EstimateOptions opts;
        opts.lambda = args.lambda;
        opts.jackknife = jackknife;
        opts.null_scale = sigma0;
        if (args.sigma_cap > 0.0) opts.sigma_filter = args.sigma_cap;
        const hart::EstimateResult est = hart::estimate_tstats(items, opts);
        for (std::size_t j = 0; j < est.retained.size(); ++j)
          t_hat[est.retained[j]] = est.stats.t[j];
        hart::DecisionSet dec =
            hart::step_up(est.stats.t, args.alpha, hart::Procedure::HART);
        hart::DecisionSet full;
        full.procedure = hart::Procedure::HART;
        full.alpha = args.alpha;
        full.k = dec.k;
        full.threshold = dec.threshold;
        full.reject.assign(n, 0);
        for (std::size_t j = 0; j < est.retained.size(); ++j)
          full.reject[est.retained[j]] = dec.reject[j];
        decisions.push_back(std::move(full));
      } else if (proc == hart::Procedure::BH) {
        decisions.push_back(hart::bh(pvals, args.alpha));
      } else {
        const double pi_hat = hart::storey_pi(pvals, args.lambda);
        const double h = hart::silverman_h(z);
        decisions.push_back(hart::az(z, args.alpha, pi_hat, sigma0, h));
      }
    }
  } catch (const hart::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_data;
  } catch (const hart::estimation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_data;
  }

  hart_cli::CsvWriter out;
  std::vector<std::string> header = {"x", "sigma", "z", "p", "t_hat"};
  for (const auto& dec : decisions)
    header.push_back("reject_" + hart::procedure_name(dec.procedure));
  out.header(header);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> fields = {
        hart_cli::format_real(rows.x[i]), hart_cli::format_real(rows.sigma[i]),
        hart_cli::format_real(z[i]), hart_cli::format_real(pvals[i]),
        hart_cli::format_real(t_hat[i])};
    for (const auto& dec : decisions)
      fields.push_back(dec.reject[i] ? "1" : "0");
    out.row_strings(fields);
  }
  out.write(args.output);

  std::printf("%-10s %12s\n", "procedure", "rejections");
  for (const auto& dec : decisions)
    std::printf("%-10s %12zu\n", hart::procedure_name(dec.procedure).c_str(),
                dec.k);
  if (empirical) std::printf("empirical null sigma0 = %s\n",
                             hart_cli::format_real(sigma0).c_str());
  return exit_ok;
}

struct OracleArgs {
  double pi = 0.1;
  double mu = 2.0;
  double sigma_lo = 0.5;
  double sigma_hi = 4.0;
  double alpha = 0.1;
  std::string output;
};

int cmd_oracle(const OracleArgs& args) {
  hart::ToyModel model;
  model.pi = args.pi;
  model.mu_a = args.mu;
  model.sigma_lo = args.sigma_lo;
  model.sigma_hi = args.sigma_hi;
  model.alpha = args.alpha;
  hart::ToyOracleReport report;
  try {
    report = hart::toy_report(model);
  } catch (const hart::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  }

  const std::vector<std::pair<std::string, double>> table = {
      {"t_p", report.t_p},           {"p_cut", report.p_cut},
      {"t_z", report.t_z},           {"lfdr_cut", report.lfdr_cut_z},
      {"lambda_star", report.lambda_star},
      {"ap_p", report.ap_p},         {"ap_z", report.ap_z},
      {"ap_full", report.ap_full}};
  for (const auto& [name, value] : table)
    std::printf("%-12s %s\n", name.c_str(), hart_cli::format_real(value).c_str());

  if (!args.output.empty()) {
    hart_cli::CsvWriter out;
    std::vector<std::string> names, values;
    for (const auto& [name, value] : table) {
      names.push_back(name);
      values.push_back(hart_cli::format_real(value));
    }
    out.header(names);
    out.row_strings(values);
    out.write(args.output);
  }
  return exit_ok;
}

struct SimulateArgs {
  std::string config;
  std::string out_dir = ".";
  std::optional<std::size_t> reps;
  std::optional<std::size_t> seed;
};

int cmd_simulate(const SimulateArgs& args) {
  hart_cli::SimConfigParser parser;
  hart::ScenarioConfig cfg = parser.parse_file(args.config);
  if (args.reps) cfg.reps = *args.reps;
  if (args.seed) cfg.seed = *args.seed;

  const hart::RunSummary summary = hart::run_experiment(cfg);

  std::filesystem::create_directories(args.out_dir);
  const std::filesystem::path dir(args.out_dir);

  hart_cli::CsvWriter sm;
  sm.header({"procedure", "fdr", "fdr_se", "ap", "ap_se", "mean_rejections",
             "mfdr"});
  for (const auto& p : summary.procedures) {
    sm.row_strings({hart::procedure_name(p.procedure),
                    hart_cli::format_real(p.fdr), hart_cli::format_real(p.fdr_se),
                    hart_cli::format_real(p.ap), hart_cli::format_real(p.ap_se),
                    hart_cli::format_real(p.mean_rejections),
                    hart_cli::format_real(p.mfdr)});
  }
  sm.write((dir / "summary.csv").string());

  hart_cli::CsvWriter rp;
  rp.header({"rep", "procedure", "fdp", "ap", "rejections", "false_rejections"});
  for (const auto& r : summary.reps) {
    rp.row_strings({std::to_string(r.rep), hart::procedure_name(r.procedure),
                    hart_cli::format_real(r.fdp), hart_cli::format_real(r.ap),
                    std::to_string(r.rejections),
                    std::to_string(r.false_rejections)});
  }
  rp.write((dir / "reps.csv").string());

  std::printf("%-10s %8s %8s %8s %8s %10s %8s\n", "procedure", "fdr", "se",
              "ap", "se", "mean_rej", "mfdr");
  for (const auto& p : summary.procedures)
    std::printf("%-10s %8.4f %8.4f %8.4f %8.4f %10.1f %8.4f\n",
                hart::procedure_name(p.procedure).c_str(), p.fdr, p.fdr_se, p.ap,
                p.ap_se, p.mean_rejections, p.mfdr);
  for (const auto& d : summary.diagnostics) std::printf("note: %s\n", d.c_str());
  return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"heteroscedasticity-adjusted ranking and thresholding toolkit"};
  app.require_subcommand(1);

  AnalyzeArgs aa;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "run procedures on a CSV of x,sigma[,theta] rows");
  analyze->add_option("input", aa.input, "input CSV path")->required();
  analyze->add_option("--out", aa.output, "output CSV path")->required();
  analyze->add_option("--alpha", aa.alpha, "target FDR level");
  analyze->add_option("--procedures", aa.procedures,
                      "comma list from {hart,bh,az}");
  analyze->add_option("--null", aa.null_mode, "theoretical|empirical");
  analyze->add_option("--coverage", aa.coverage,
                      "central mass for the empirical null");
  analyze->add_option("--lambda", aa.lambda, "Storey threshold");
  analyze->add_option("--jackknife", aa.jackknife, "on|off");
  analyze->add_option("--sigma-cap", aa.sigma_cap,
                      "drop rows with sigma below this cap");

  OracleArgs oa;
  CLI::App* oracle = app.add_subcommand(
      "oracle", "closed-form oracle thresholds and powers for the toy model");
  oracle->add_option("--pi", oa.pi, "non-null proportion");
  oracle->add_option("--mu", oa.mu, "point-mass effect size");
  oracle->add_option("--sigma-lo", oa.sigma_lo, "uniform scale lower end");
  oracle->add_option("--sigma-hi", oa.sigma_hi, "uniform scale upper end");
  oracle->add_option("--alpha", oa.alpha, "target FDR level");
  oracle->add_option("--out", oa.output, "optional output CSV path");

  SimulateArgs sa;
  std::size_t reps_override = 0, seed_override = 0;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "run a seeded simulation experiment from a config file");
  simulate->add_option("config", sa.config, "experiment config path")->required();
  CLI::Option* reps_opt =
      simulate->add_option("--reps", reps_override, "override rep count");
  CLI::Option* seed_opt =
      simulate->add_option("--seed", seed_override, "override seed");
  simulate->add_option("--out", sa.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*analyze) return cmd_analyze(aa);
    if (*oracle) return cmd_oracle(oa);
    if (reps_opt->count()) sa.reps = reps_override;
    if (seed_opt->count()) sa.seed = seed_override;
    return cmd_simulate(sa);
  } catch (const hart_cli::CsvError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.exit_code;
  } catch (const hart::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const hart::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_data;
  } catch (const hart::estimation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_data;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  }
}
