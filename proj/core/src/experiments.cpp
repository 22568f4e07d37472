#include "mcov/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "mcov/chain.hpp"
#include "mcov/errors.hpp"
#include "mcov/inference.hpp"
#include "mcov/linalg.hpp"
#include "mcov/msve.hpp"
#include "mcov/version.hpp"

namespace mcov {

namespace {

using nlohmann::json;

Matrix matrix_from_json(const json& j, const char* what) {
  if (j.is_object() && j.contains("diag")) {
    Vector d = j.at("diag").get<Vector>();
    return Matrix::diagonal(d);
  }
  if (j.is_object() && j.contains("ar1")) {
    const json& a = j.at("ar1");
    return ar1_cov(a.at("p").get<std::size_t>(), a.at("rho").get<double>());
  }
  if (!j.is_array()) throw ConfigError(std::string(what) + ": expected matrix, diag or ar1 form");
  auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) throw ConfigError(std::string(what) + ": empty matrix");
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw ConfigError(std::string(what) + ": ragged matrix");
    for (std::size_t j2 = 0; j2 < rows[i].size(); ++j2) m(i, j2) = rows[i][j2];
  }
  return m;
}

/// Dispatch replication indices to a small worker pool; the caller's results
/// vector is indexed by replication, so aggregation order never depends on
/// the schedule.
template <typename Fn>
void for_each_replication(std::size_t replications, int threads, Fn&& fn) {
  if (threads <= 1 || replications <= 1) {
    for (std::size_t r = 0; r < replications; ++r) fn(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      std::size_t r = next.fetch_add(1);
      if (r >= replications) return;
      try {
        fn(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int k = std::min<int>(threads, static_cast<int>(replications));
  pool.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(const std::vector<double>& xs) {
  MeanSe out;
  const double r = static_cast<double>(xs.size());
  for (double x : xs) out.mean += x;
  out.mean /= r;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (r - 1.0) / r);
  }
  return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write output file: " + path.string());
  return out;
}

void write_provenance_comments(std::ofstream& out, const Provenance& prov) {
  out << "# toolkit_version=" << prov.version << "\n";
  out << "# config_hash=" << prov.config_hash << "\n";
  out << "# seed=" << prov.seed << "\n";
}

json provenance_json(const Provenance& prov) {
  return json{{"toolkit_version", prov.version},
              {"config_hash", prov.config_hash},
              {"seed", prov.seed}};
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path.string() + ": " + e.what());
  }

  ExperimentConfig cfg;
  try {
    if (j.contains("setting")) cfg.setting_id = j.at("setting").get<int>();
    if (j.contains("spec")) {
      const json& s = j.at("spec");
      cfg.custom_spec = make_var1_spec(matrix_from_json(s.at("phi"), "spec.phi"),
                                       matrix_from_json(s.at("w"), "spec.w"));
    }
    if (j.contains("windows")) cfg.windows = j.at("windows").get<std::vector<std::string>>();
    if (j.contains("nu")) cfg.nu = j.at("nu").get<double>();
    if (j.contains("sample_sizes"))
      cfg.sample_sizes = j.at("sample_sizes").get<std::vector<std::size_t>>();
    if (j.contains("replications")) cfg.replications = j.at("replications").get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("level")) cfg.level = j.at("level").get<double>();
    if (j.contains("independent_samples"))
      cfg.independent_samples = j.at("independent_samples").get<bool>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
    if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError("config field error in " + path.string() + ": " + e.what());
  }
  return cfg;
}

void validate_config(const ExperimentConfig& config) {
  if (config.replications < 1) throw ConfigError("replications must be >= 1");
  if (config.sample_sizes.empty()) throw ConfigError("sample_sizes must be nonempty");
  if (config.windows.empty()) throw ConfigError("windows must be nonempty");
  if (!(config.level > 0.0 && config.level < 1.0))
    throw ConfigError("level must lie in (0,1)");
  if (config.setting_id.has_value() == config.custom_spec.has_value())
    throw ConfigError("exactly one of setting or spec must be given");
  if (config.setting_id && (*config.setting_id < 1 || *config.setting_id > 6))
    throw ConfigError("setting id must lie in 1..6");

  TruncationRule rule{config.nu};
  for (std::size_t i = 0; i < config.sample_sizes.size(); ++i) {
    std::size_t n = config.sample_sizes[i];
    if (i > 0 && n <= config.sample_sizes[i - 1])
      throw ConfigError("sample_sizes must be strictly increasing");
    long b = rule.bn(n);
    if (static_cast<long>(n) <= 2 * b)
      throw ConfigError("sample size " + std::to_string(n) + " violates n > 2 b_n (b_n = " +
                        std::to_string(b) + ")");
  }
  for (const std::string& w : config.windows) LagWindow::parse(w);
}

Var1Spec resolve_spec(const ExperimentConfig& config) {
  if (config.setting_id) return setting(*config.setting_id);
  return *config.custom_spec;
}

std::string config_hash(const ExperimentConfig& config) {
  std::string canon;
  canon += "setting=";
  canon += config.setting_id ? std::to_string(*config.setting_id) : "none";
  if (config.custom_spec) {
    canon += ";phi=";
    for (double v : std::vector<double>(config.custom_spec->phi.data(),
                                        config.custom_spec->phi.data() +
                                            config.custom_spec->p() * config.custom_spec->p()))
      canon += format_double(v) + ",";
    canon += ";w=";
    for (double v : std::vector<double>(config.custom_spec->w.data(),
                                        config.custom_spec->w.data() +
                                            config.custom_spec->p() * config.custom_spec->p()))
      canon += format_double(v) + ",";
  }
  canon += ";windows=";
  for (const auto& w : config.windows) canon += w + "|";
  canon += ";nu=" + format_double(config.nu);
  canon += ";sizes=";
  for (auto n : config.sample_sizes) canon += std::to_string(n) + ",";
  canon += ";replications=" + std::to_string(config.replications);
  canon += ";seed=" + std::to_string(config.seed);
  canon += ";level=" + format_double(config.level);
  canon += ";independent=" + std::string(config.independent_samples ? "1" : "0");

  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(canon)));
  return buf;
}

Provenance make_provenance(const ExperimentConfig& config) {
  return Provenance{config_hash(config), config.seed, kVersion};
}

namespace {

/// Per-replication estimation shared by sweep and eigdist: every window's
/// estimate at every prefix length, reusing one autocovariance pass per
/// (replication, n).
struct ReplicationEstimates {
  // indexed [window][size]
  std::vector<std::vector<SigmaEstimate>> estimates;
};

ReplicationEstimates estimate_replication(const ExperimentConfig& config, const Var1Spec& spec,
                                          const std::vector<LagWindow>& windows,
                                          std::size_t replication) {
  const TruncationRule rule{config.nu};
  const std::size_t max_n = config.sample_sizes.back();

  ReplicationEstimates out;
  out.estimates.resize(windows.size());
  for (auto& v : out.estimates) v.resize(config.sample_sizes.size());

  std::optional<ChainMatrix> full;
  if (!config.independent_samples) {
    RngStream rng(config.seed, replication);
    full = simulate(spec, max_n, rng);
  }

  for (std::size_t si = 0; si < config.sample_sizes.size(); ++si) {
    std::size_t n = config.sample_sizes[si];
    std::optional<ChainMatrix> fresh;
    if (config.independent_samples) {
      RngStream rng(config.seed,
                    replication * config.sample_sizes.size() + si);
      fresh = simulate(spec, n, rng);
    }
    const ChainMatrix chain = config.independent_samples ? std::move(*fresh) : full->prefix(n);
    AutocovarianceSequence acov = autocov_range(chain, rule.bn(n));
    for (std::size_t wi = 0; wi < windows.size(); ++wi)
      out.estimates[wi][si] = msve_from_autocov(acov, windows[wi]);
  }
  return out;
}

}  // namespace

SweepReport run_sweep(const ExperimentConfig& config) {
  validate_config(config);
  const Var1Spec spec = resolve_spec(config);
  const Var1Truth truth = var1_truth(spec);
  const double sigma_frob = truth.sigma.frobenius_norm();
  const double lambda1 = sym_eigen(truth.sigma).eigenvalues.front();

  std::vector<LagWindow> windows;
  for (const auto& w : config.windows) windows.push_back(LagWindow::parse(w));

  const std::size_t num_sizes = config.sample_sizes.size();
  const std::size_t reps = config.replications;
  // raw[window][size][replication]
  std::vector<std::vector<std::vector<double>>> frob(windows.size()),
      eig(windows.size()), lam(windows.size());
  for (std::size_t wi = 0; wi < windows.size(); ++wi) {
    frob[wi].assign(num_sizes, std::vector<double>(reps));
    eig[wi].assign(num_sizes, std::vector<double>(reps));
    lam[wi].assign(num_sizes, std::vector<double>(reps));
  }

  for_each_replication(reps, config.threads, [&](std::size_t r) {
    ReplicationEstimates est = estimate_replication(config, spec, windows, r);
    for (std::size_t wi = 0; wi < windows.size(); ++wi) {
      for (std::size_t si = 0; si < num_sizes; ++si) {
        const SigmaEstimate& s = est.estimates[wi][si];
        Matrix diff = s.matrix - truth.sigma;
        frob[wi][si][r] = diff.frobenius_norm() / sigma_frob;
        double l1 = s.eigenvalues.front();
        eig[wi][si][r] = std::abs(l1 - lambda1) / lambda1;
        lam[wi][si][r] = l1;
      }
    }
  });

  SweepReport report;
  report.true_lambda1 = lambda1;
  report.sigma_frobenius = sigma_frob;
  report.provenance = make_provenance(config);
  TruncationRule rule{config.nu};
  for (std::size_t wi = 0; wi < windows.size(); ++wi) {
    for (std::size_t si = 0; si < num_sizes; ++si) {
      SweepCell cell;
      cell.window = windows[wi].description();
      cell.n = config.sample_sizes[si];
      cell.bn = rule.bn(cell.n);
      MeanSe f = mean_and_se(frob[wi][si]);
      MeanSe e = mean_and_se(eig[wi][si]);
      cell.mean_frobenius_error = f.mean;
      cell.se_frobenius_error = f.se;
      cell.mean_eigen_error = e.mean;
      cell.se_eigen_error = e.se;
      cell.frobenius_raw = std::move(frob[wi][si]);
      cell.eigen_raw = std::move(eig[wi][si]);
      cell.lambda1_raw = std::move(lam[wi][si]);
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

void write_sweep(const SweepReport& report, const ExperimentConfig& config) {
  std::filesystem::create_directories(config.out_dir);
  const std::filesystem::path dir(config.out_dir);

  {
    auto out = open_output(dir / "sweep_summary.csv");
    write_provenance_comments(out, report.provenance);
    out << "# true_lambda1=" << format_double(report.true_lambda1) << "\n";
    out << "window,n,bn,mean_rel_frobenius_error,se_rel_frobenius_error,"
           "mean_rel_eigen_error,se_rel_eigen_error\n";
    for (const auto& c : report.cells) {
      out << c.window << ',' << c.n << ',' << c.bn << ','
          << format_double(c.mean_frobenius_error) << ',' << format_double(c.se_frobenius_error)
          << ',' << format_double(c.mean_eigen_error) << ',' << format_double(c.se_eigen_error)
          << "\n";
    }
  }
  {
    auto out = open_output(dir / "sweep_raw.csv");
    write_provenance_comments(out, report.provenance);
    out << "window,n,replication,rel_frobenius_error,rel_eigen_error,lambda1_hat\n";
    for (const auto& c : report.cells)
      for (std::size_t r = 0; r < c.frobenius_raw.size(); ++r)
        out << c.window << ',' << c.n << ',' << r << ',' << format_double(c.frobenius_raw[r])
            << ',' << format_double(c.eigen_raw[r]) << ',' << format_double(c.lambda1_raw[r])
            << "\n";
  }
  {
    json cells = json::array();
    for (const auto& c : report.cells) {
      cells.push_back(json{{"window", c.window},
                           {"n", c.n},
                           {"bn", c.bn},
                           {"mean_rel_frobenius_error", c.mean_frobenius_error},
                           {"se_rel_frobenius_error", c.se_frobenius_error},
                           {"mean_rel_eigen_error", c.mean_eigen_error},
                           {"se_rel_eigen_error", c.se_eigen_error}});
    }
    json j{{"provenance", provenance_json(report.provenance)},
           {"true_lambda1", report.true_lambda1},
           {"sigma_frobenius_norm", report.sigma_frobenius},
           {"cells", cells}};
    auto out = open_output(dir / "sweep.json");
    out << j.dump(2) << "\n";
  }
}

CoverageReport run_coverage(const ExperimentConfig& config) {
  validate_config(config);
  const Var1Spec spec = resolve_spec(config);
  const std::size_t p = spec.p();
  const LagWindow window = LagWindow::parse(config.windows.front());
  const TruncationRule rule{config.nu};
  const Vector zero(p, 0.0);

  const std::size_t num_sizes = config.sample_sizes.size();
  const std::size_t reps = config.replications;

  struct RepResult {
    std::vector<char> hit_ellipsoid, hit_bonferroni, hit_uncorrected;
    std::vector<double> vol_ellipsoid, vol_bonferroni, vol_uncorrected;
  };
  std::vector<RepResult> results(reps);

  for_each_replication(reps, config.threads, [&](std::size_t r) {
    RepResult& res = results[r];
    res.hit_ellipsoid.resize(num_sizes);
    res.hit_bonferroni.resize(num_sizes);
    res.hit_uncorrected.resize(num_sizes);
    res.vol_ellipsoid.resize(num_sizes);
    res.vol_bonferroni.resize(num_sizes);
    res.vol_uncorrected.resize(num_sizes);

    RngStream rng(config.seed, r);
    ChainMatrix full = simulate(spec, config.sample_sizes.back(), rng);
    for (std::size_t si = 0; si < num_sizes; ++si) {
      std::size_t n = config.sample_sizes[si];
      ChainMatrix chain = full.prefix(n);
      MeanAndScatter summary = summarize(chain);
      SigmaEstimate est = msve(chain, window, rule.bn(n));
      ConfidenceRegion region = ellipsoid(est, summary, n, config.level);
      BoxHalfWidths boxes = univariate_boxes(est, n, config.level);

      auto box_contains = [&](const Vector& hw) {
        for (std::size_t i = 0; i < p; ++i)
          if (std::abs(summary.mean[i]) > hw[i]) return false;
        return true;
      };
      res.hit_ellipsoid[si] = region.contains(zero) ? 1 : 0;
      res.hit_bonferroni[si] = box_contains(boxes.bonferroni) ? 1 : 0;
      res.hit_uncorrected[si] = box_contains(boxes.uncorrected) ? 1 : 0;
      res.vol_ellipsoid[si] = ellipsoid_volume_pth_root(est, n, config.level);
      res.vol_bonferroni[si] = box_volume_pth_root(boxes.bonferroni);
      res.vol_uncorrected[si] = box_volume_pth_root(boxes.uncorrected);
    }
  });

  CoverageReport report;
  report.window = window.description();
  report.provenance = make_provenance(config);

  struct Method {
    const char* name;
    std::vector<char> RepResult::* hits;
    std::vector<double> RepResult::* vols;
  };
  const Method methods[] = {
      {"ellipsoid", &RepResult::hit_ellipsoid, &RepResult::vol_ellipsoid},
      {"bonferroni-box", &RepResult::hit_bonferroni, &RepResult::vol_bonferroni},
      {"uncorrected-box", &RepResult::hit_uncorrected, &RepResult::vol_uncorrected},
  };
  for (const Method& m : methods) {
    for (std::size_t si = 0; si < num_sizes; ++si) {
      std::vector<double> vols(reps);
      double hits = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        hits += (results[r].*m.hits)[si];
        vols[r] = (results[r].*m.vols)[si];
      }
      CoverageCell cell;
      cell.method = m.name;
      cell.n = config.sample_sizes[si];
      cell.coverage = hits / static_cast<double>(reps);
      cell.coverage_se =
          std::sqrt(cell.coverage * (1.0 - cell.coverage) / static_cast<double>(reps));
      MeanSe v = mean_and_se(vols);
      cell.mean_volume_pth_root = v.mean;
      cell.volume_pth_root_se = v.se;
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

void write_coverage(const CoverageReport& report, const ExperimentConfig& config) {
  std::filesystem::create_directories(config.out_dir);
  const std::filesystem::path dir(config.out_dir);

  auto out = open_output(dir / "coverage.csv");
  write_provenance_comments(out, report.provenance);
  out << "# window=" << report.window << "\n";
  out << "method,n,coverage,coverage_se,mean_volume_pth_root,volume_pth_root_se\n";
  for (const auto& c : report.cells)
    out << c.method << ',' << c.n << ',' << format_double(c.coverage) << ','
        << format_double(c.coverage_se) << ',' << format_double(c.mean_volume_pth_root) << ','
        << format_double(c.volume_pth_root_se) << "\n";

  if (config.format == "json") {
    json cells = json::array();
    for (const auto& c : report.cells)
      cells.push_back(json{{"method", c.method},
                           {"n", c.n},
                           {"coverage", c.coverage},
                           {"coverage_se", c.coverage_se},
                           {"mean_volume_pth_root", c.mean_volume_pth_root},
                           {"volume_pth_root_se", c.volume_pth_root_se}});
    json j{{"provenance", provenance_json(report.provenance)},
           {"window", report.window},
           {"cells", cells}};
    auto jout = open_output(dir / "coverage.json");
    jout << j.dump(2) << "\n";
  }
}

EigdistReport run_eigdist(const ExperimentConfig& config) {
  validate_config(config);
  const Var1Spec spec = resolve_spec(config);
  const Var1Truth truth = var1_truth(spec);

  std::vector<LagWindow> windows;
  for (const auto& w : config.windows) windows.push_back(LagWindow::parse(w));

  const std::size_t num_sizes = config.sample_sizes.size();
  const std::size_t reps = config.replications;
  std::vector<std::vector<std::vector<double>>> lam(windows.size());
  for (auto& v : lam) v.assign(num_sizes, std::vector<double>(reps));

  for_each_replication(reps, config.threads, [&](std::size_t r) {
    ReplicationEstimates est = estimate_replication(config, spec, windows, r);
    for (std::size_t wi = 0; wi < windows.size(); ++wi)
      for (std::size_t si = 0; si < num_sizes; ++si)
        lam[wi][si][r] = est.estimates[wi][si].eigenvalues.front();
  });

  EigdistReport report;
  report.true_lambda1 = sym_eigen(truth.sigma).eigenvalues.front();
  report.provenance = make_provenance(config);
  for (std::size_t wi = 0; wi < windows.size(); ++wi)
    for (std::size_t si = 0; si < num_sizes; ++si)
      for (std::size_t r = 0; r < reps; ++r)
        report.rows.push_back(EigdistRow{windows[wi].description(), config.sample_sizes[si], r,
                                         lam[wi][si][r]});
  return report;
}

void write_eigdist(const EigdistReport& report, const ExperimentConfig& config) {
  std::filesystem::create_directories(config.out_dir);
  const std::filesystem::path dir(config.out_dir);

  auto out = open_output(dir / "eigdist.csv");
  write_provenance_comments(out, report.provenance);
  out << "# true_lambda1=" << format_double(report.true_lambda1) << "\n";
  out << "window,n,replication,lambda1_hat\n";
  for (const auto& row : report.rows)
    out << row.window << ',' << row.n << ',' << row.replication << ','
        << format_double(row.lambda1_hat) << "\n";
}

}  // namespace mcov
