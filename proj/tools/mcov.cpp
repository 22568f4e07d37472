// Command-line driver: estimation on user chains plus the VAR(1) replication
// studies (sweep, coverage, eigdist) and lag-window diagnostics.
//
// Exit codes: 0 ok, 2 config error, 3 numeric error, 4 I/O error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcov/autocov.hpp"
#include "mcov/chain.hpp"
#include "mcov/errors.hpp"
#include "mcov/experiments.hpp"
#include "mcov/inference.hpp"
#include "mcov/lag_window.hpp"
#include "mcov/linalg.hpp"
#include "mcov/msve.hpp"
#include "mcov/rng.hpp"
#include "mcov/var1.hpp"
#include "mcov/version.hpp"

namespace {

using nlohmann::json;
using namespace mcov;

ChainFormat parse_chain_format(const std::string& name) {
  if (name == "csv") return ChainFormat::kCsv;
  if (name == "raw-f64") return ChainFormat::kRawF64;
  throw ConfigError("unknown chain format '" + name + "' (expected csv or raw-f64)");
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

// Shared flags for the replication subcommands. CLI values override the
// config file when both are present.
struct ExperimentCliArgs {
  std::string config_path;
  std::optional<int> setting_id;
  std::vector<std::string> windows;
  std::vector<std::size_t> sizes;
  std::optional<std::size_t> replications;
  std::optional<double> nu;
  std::optional<double> level;
  bool independent_samples = false;
};

void add_experiment_options(CLI::App* cmd, ExperimentCliArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file mirroring the experiment fields");
  cmd->add_option("--setting", args.setting_id, "reference VAR(1) setting id (1..6)");
  cmd->add_option("--windows", args.windows,
                  "lag windows, e.g. bartlett tukey-hanning scaled-bartlett,eta=2")
      ->delimiter(';');
  cmd->add_option("--sizes", args.sizes, "Monte Carlo sample sizes (ascending)")->delimiter(',');
  cmd->add_option("--replications", args.replications, "number of independent replications");
  cmd->add_option("--nu", args.nu, "truncation exponent: b_n = floor(n^nu)");
  cmd->add_option("--level", args.level, "confidence level in (0,1)");
  cmd->add_flag("--independent-samples", args.independent_samples,
                "simulate a fresh chain per (replication, n) instead of nested prefixes");
}

ExperimentConfig build_experiment_config(const ExperimentCliArgs& args, std::uint64_t seed,
                                         int threads, const std::string& out_dir,
                                         const std::string& format, bool seed_given) {
  ExperimentConfig cfg;
  if (!args.config_path.empty()) cfg = load_experiment_config(args.config_path);
  if (args.setting_id) {
    cfg.setting_id = args.setting_id;
    cfg.custom_spec.reset();
  }
  if (!args.windows.empty()) cfg.windows = args.windows;
  if (!args.sizes.empty()) cfg.sample_sizes = args.sizes;
  if (args.replications) cfg.replications = *args.replications;
  if (args.nu) cfg.nu = *args.nu;
  if (args.level) cfg.level = *args.level;
  if (args.independent_samples) cfg.independent_samples = true;
  if (seed_given) cfg.seed = seed;
  cfg.threads = threads;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (!format.empty()) cfg.format = format;

  TruncationRule rule{cfg.nu};
  if (!rule.recommended_range())
    std::cerr << "warning: nu = " << cfg.nu
              << " is outside (0, 1/2); the consistency conditions assume 0 < nu < 1/2\n";
  validate_config(cfg);
  return cfg;
}

int run_estimate(const std::string& chain_path, const std::string& chain_format,
                 const std::string& window_spec, std::optional<double> nu_opt,
                 std::optional<long> bn_opt, double level, std::size_t skip_first,
                 const std::string& acf_pair, std::size_t max_lag, bool dump_autocov,
                 int threads, const std::string& out_dir, const std::string& format) {
  ChainMatrix chain = load_chain(chain_path, parse_chain_format(chain_format), skip_first);
  LagWindow window = LagWindow::parse(window_spec);

  long bn;
  double nu = nu_opt.value_or(1.0 / 3.0);
  if (bn_opt) {
    bn = *bn_opt;
  } else {
    TruncationRule rule{nu};
    if (!rule.recommended_range())
      std::cerr << "warning: nu = " << nu << " is outside (0, 1/2)\n";
    bn = rule.bn(chain.n());
  }

  AutocovarianceSequence acov = autocov_range(chain, bn, threads);
  SigmaEstimate est = msve_from_autocov(acov, window);
  MeanAndScatter summary = summarize(chain);

  json report;
  report["provenance"] = {{"toolkit_version", kVersion}};
  report["n"] = chain.n();
  report["p"] = chain.p();
  report["window"] = est.window;
  report["bn"] = est.bn;
  report["sigma"] = {{"matrix", matrix_to_json(est.matrix)},
                     {"is_positive_definite", est.is_positive_definite},
                     {"min_eigenvalue", est.min_eigenvalue}};
  report["eigenvalues"] = est.eigenvalues;
  report["mean"] = summary.mean;
  report["sample_cov"] = matrix_to_json(summary.sample_cov);

  int exit_code = 0;
  if (est.is_positive_definite) {
    ConfidenceReport conf = confidence_report(est, summary, chain.n(), level);
    report["ess"] = conf.ess;
    report["ess_per_n"] = conf.ess / static_cast<double>(chain.n());
    report["confidence"] = {
        {"level", conf.level},
        {"chi2_radius", conf.chi2_radius},
        {"center", conf.center},
        {"box_half_widths",
         {{"uncorrected", conf.box_half_widths.uncorrected},
          {"bonferroni", conf.box_half_widths.bonferroni}}},
        {"volume_pth_root",
         {{"ellipsoid", conf.volume_pth_root.ellipsoid},
          {"bonferroni_box", conf.volume_pth_root.bonferroni_box},
          {"uncorrected_box", conf.volume_pth_root.uncorrected_box}}}};
  } else {
    const char* marker = "sigma estimate is not positive definite";
    report["ess"] = nullptr;
    report["confidence"] = {{"error", marker}};
    exit_code = 3;
  }

  if (!acf_pair.empty()) {
    std::size_t comma = acf_pair.find(',');
    if (comma == std::string::npos)
      throw ConfigError("--acf expects i,j coordinate pair, got '" + acf_pair + "'");
    std::size_t i = std::stoul(acf_pair.substr(0, comma));
    std::size_t j = std::stoul(acf_pair.substr(comma + 1));
    report["acf"] = {{"i", i}, {"j", j}, {"values", acf_ccf(chain, i, j, max_lag)}};
  }

  std::string text = report.dump(2) + "\n";
  std::cout << text;

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    write_text_file(dir / "estimate.json", text);
    if (format == "csv") {
      std::string csv = "i,j,value\n";
      for (std::size_t i = 0; i < est.matrix.rows(); ++i)
        for (std::size_t j = 0; j < est.matrix.cols(); ++j)
          csv += std::to_string(i) + "," + std::to_string(j) + "," +
                 format_double(est.matrix(i, j)) + "\n";
      write_text_file(dir / "sigma.csv", csv);
    }
    if (dump_autocov) {
      std::string csv = "lag,i,j,value\n";
      for (long s = -(bn - 1); s <= bn - 1; ++s) {
        Matrix g = acov.lag(s);
        for (std::size_t i = 0; i < g.rows(); ++i)
          for (std::size_t j = 0; j < g.cols(); ++j)
            csv += std::to_string(s) + "," + std::to_string(i) + "," + std::to_string(j) + "," +
                   format_double(g(i, j)) + "\n";
      }
      write_text_file(dir / "autocov.csv", csv);
    }
  }
  return exit_code;
}

int run_simulate(std::optional<int> setting_id, const std::string& spec_path, std::size_t n,
                 std::uint64_t seed, std::uint64_t stream, const std::string& out_path,
                 const std::string& chain_format) {
  Var1Spec spec = [&] {
    if (setting_id) return setting(*setting_id);
    if (spec_path.empty()) throw ConfigError("simulate requires --setting or --spec");
    std::ifstream in(spec_path);
    if (!in) throw IoError("cannot open spec file: " + spec_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError(std::string("spec parse error: ") + e.what());
    }
    auto to_matrix = [](const json& m, const char* what) {
      if (m.is_object() && m.contains("diag"))
        return Matrix::diagonal(m.at("diag").get<Vector>());
      if (m.is_object() && m.contains("ar1"))
        return ar1_cov(m.at("ar1").at("p").get<std::size_t>(),
                       m.at("ar1").at("rho").get<double>());
      auto rows = m.get<std::vector<std::vector<double>>>();
      Matrix out(rows.size(), rows.empty() ? 0 : rows[0].size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != out.cols()) throw ConfigError(std::string(what) + ": ragged matrix");
        for (std::size_t k = 0; k < rows[i].size(); ++k) out(i, k) = rows[i][k];
      }
      return out;
    };
    return make_var1_spec(to_matrix(j.at("phi"), "phi"), to_matrix(j.at("w"), "w"));
  }();

  if (out_path.empty()) throw ConfigError("simulate requires --out FILE");
  RngStream rng(seed, stream);
  ChainMatrix chain = simulate(spec, n, rng);
  save_chain(chain, out_path, parse_chain_format(chain_format));
  std::cout << "wrote " << chain.n() << " x " << chain.p() << " chain to " << out_path << "\n";
  return 0;
}

int run_diagnose(const std::string& window_spec, double nu, const std::vector<std::size_t>& grid,
                 double lambda, const std::string& out_dir) {
  LagWindow window = LagWindow::parse(window_spec);
  TruncationRule rule{nu};
  if (!rule.recommended_range())
    std::cerr << "warning: nu = " << nu << " is outside (0, 1/2)\n";
  ConditionReport report = condition_diagnostics(window, rule, grid, lambda);

  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back(json{{"n", r.n},
                        {"bn", r.bn},
                        {"delta1_weighted_sum", r.delta1_weighted_sum},
                        {"delta2_abs_sum", r.delta2_abs_sum},
                        {"bn_log_ratio", r.bn_log_ratio},
                        {"psi_sq_delta2_sq", r.psi_sq_delta2_sq},
                        {"psi_sq_delta2", r.psi_sq_delta2},
                        {"psi_over_bn", r.psi_over_bn}});
  }
  json identities = json::array();
  for (const auto& r : report.rows) {
    auto idc = window_identity_check(window, r.bn);
    identities.push_back(json{{"bn", r.bn},
                              {"difference_link_pass", idc.difference_link_pass},
                              {"partial_sum_pass", idc.partial_sum_pass},
                              {"total_sum_pass", idc.total_sum_pass}});
  }
  json j{{"window", window.description()},
         {"nu", nu},
         {"lambda", report.lambda},
         {"rows", rows},
         {"summation_identities", identities},
         {"verdicts",
          {{"delta1_weighted_sum", report.delta1_trend_pass},
           {"delta2_abs_sum", report.delta2_trend_pass},
           {"bn_log_ratio", report.bn_log_trend_pass},
           {"all_pass", report.all_pass()}}}};
  std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_text_file(std::filesystem::path(out_dir) / "diagnose.json", text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo output analysis: multivariate spectral variance estimation,\n"
               "confidence regions, effective sample size, and a VAR(1) reference laboratory"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags are accepted after the subcommand name
  app.set_version_flag("--version", std::string("mcov ") + kVersion);

  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir;
  std::string format = "csv";
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (64-bit)");
  app.add_option("--threads", threads, "worker threads for replications");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "auxiliary output format")
      ->check(CLI::IsMember({"csv", "json"}));

  // estimate
  auto* est_cmd = app.add_subcommand("estimate", "estimate Sigma and confidence regions from a chain file");
  std::string chain_path, chain_format = "csv", window_spec = "bartlett", acf_pair;
  std::optional<double> est_nu;
  std::optional<long> est_bn;
  double level = 0.90;
  std::size_t skip_first = 0, max_lag = 50;
  bool dump_autocov = false;
  est_cmd->add_option("--chain", chain_path, "chain file")->required();
  est_cmd->add_option("--chain-format", chain_format, "csv or raw-f64");
  est_cmd->add_option("--window", window_spec, "lag window, e.g. blackman-tukey,a=0.25");
  est_cmd->add_option("--nu", est_nu, "truncation exponent (default 1/3)");
  est_cmd->add_option("--bn", est_bn, "explicit truncation point (overrides --nu)");
  est_cmd->add_option("--level", level, "confidence level");
  est_cmd->add_option("--skip-first", skip_first, "drop the first k rows");
  est_cmd->add_option("--acf", acf_pair, "emit lag correlations for coordinate pair i,j");
  est_cmd->add_option("--max-lag", max_lag, "number of lags for --acf");
  est_cmd->add_flag("--dump-autocov", dump_autocov, "write autocov.csv (lag,i,j,value) to --out");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "simulate a VAR(1) chain to a file");
  std::optional<int> sim_setting;
  std::string sim_spec_path, sim_out, sim_format = "csv";
  std::size_t sim_n = 10000;
  std::uint64_t sim_stream = 0;
  sim_cmd->add_option("--setting", sim_setting, "reference setting id (1..6)");
  sim_cmd->add_option("--spec", sim_spec_path, "JSON spec {phi: ..., w: ...}");
  sim_cmd->add_option("--n", sim_n, "number of rows to emit");
  sim_cmd->add_option("--stream", sim_stream, "RNG stream index");
  sim_cmd->add_option("--chain-format", sim_format, "csv or raw-f64");
  sim_cmd->add_option("--out-file", sim_out, "output chain file")->required();

  // sweep / coverage / eigdist
  auto* sweep_cmd = app.add_subcommand("sweep", "Frobenius and eigenvalue error study against the exact Sigma");
  ExperimentCliArgs sweep_args;
  add_experiment_options(sweep_cmd, sweep_args);

  auto* cover_cmd = app.add_subcommand("coverage", "coverage and volume study of the three region methods");
  ExperimentCliArgs cover_args;
  add_experiment_options(cover_cmd, cover_args);

  auto* eig_cmd = app.add_subcommand("eigdist", "raw largest-eigenvalue samples per (window, n, replication)");
  ExperimentCliArgs eig_args;
  add_experiment_options(eig_cmd, eig_args);

  // diagnose
  auto* diag_cmd = app.add_subcommand("diagnose", "lag-window growth conditions and summation identities");
  std::string diag_window = "bartlett";
  double diag_nu = 1.0 / 3.0, diag_lambda = 0.25;
  std::vector<std::size_t> diag_grid = {1000, 10000, 100000};
  diag_cmd->add_option("--window", diag_window, "lag window");
  diag_cmd->add_option("--nu", diag_nu, "truncation exponent");
  diag_cmd->add_option("--n-grid", diag_grid, "increasing n grid")->delimiter(',');
  diag_cmd->add_option("--lambda", diag_lambda, "psi(n) = n^{1/2-lambda} exponent parameter");

  try {
    app.parse(argc, argv);

    if (*est_cmd)
      return run_estimate(chain_path, chain_format, window_spec, est_nu, est_bn, level,
                          skip_first, acf_pair, max_lag, dump_autocov, threads, out_dir, format);
    if (*sim_cmd) return run_simulate(sim_setting, sim_spec_path, sim_n, seed, sim_stream,
                                      sim_out, sim_format);
    if (*sweep_cmd) {
      ExperimentConfig cfg = build_experiment_config(sweep_args, seed, threads, out_dir, format,
                                                     !seed_opt->empty());
      write_sweep(run_sweep(cfg), cfg);
      std::cout << "sweep written to " << cfg.out_dir << "\n";
      return 0;
    }
    if (*cover_cmd) {
      ExperimentConfig cfg = build_experiment_config(cover_args, seed, threads, out_dir, format,
                                                     !seed_opt->empty());
      write_coverage(run_coverage(cfg), cfg);
      std::cout << "coverage written to " << cfg.out_dir << "\n";
      return 0;
    }
    if (*eig_cmd) {
      ExperimentConfig cfg = build_experiment_config(eig_args, seed, threads, out_dir, format,
                                                     !seed_opt->empty());
      write_eigdist(run_eigdist(cfg), cfg);
      std::cout << "eigdist written to " << cfg.out_dir << "\n";
      return 0;
    }
    if (*diag_cmd) return run_diagnose(diag_window, diag_nu, diag_grid, diag_lambda, out_dir);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
