#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mcov/lag_window.hpp"
#include "mcov/var1.hpp"

namespace mcov {

/// Replication study configuration. Mirrored one-to-one by the JSON config
/// file accepted by the CLI; `threads`, `out` and `format` control execution
/// and layout only and do not enter the provenance hash.
struct ExperimentConfig {
  std::optional<int> setting_id;        // 1..6
  std::optional<Var1Spec> custom_spec;  // used when setting_id is absent
  std::vector<std::string> windows = {"modified-bartlett"};
  double nu = 1.0 / 3.0;
  std::vector<std::size_t> sample_sizes;
  std::size_t replications = 100;
  std::uint64_t seed = 0;
  double level = 0.90;
  bool independent_samples = false;  // fresh stream per (replication, n)
  int threads = 1;
  std::string out_dir = ".";
  std::string format = "csv";
};

ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Throws ConfigError unless: replications >= 1, sample sizes nonempty and
/// strictly increasing, every n > 2 floor(n^nu), windows parse, and exactly
/// one of setting/spec is present.
void validate_config(const ExperimentConfig& config);

Var1Spec resolve_spec(const ExperimentConfig& config);

/// FNV-1a over the canonical serialization of the statistical fields
/// (execution fields excluded, so outputs are invariant to --threads).
std::string config_hash(const ExperimentConfig& config);

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;
};

Provenance make_provenance(const ExperimentConfig& config);

// ---- sweep: relative Frobenius / eigenvalue error against the exact Sigma --

struct SweepCell {
  std::string window;
  std::size_t n = 0;
  long bn = 0;
  double mean_frobenius_error = 0.0;
  double se_frobenius_error = 0.0;
  double mean_eigen_error = 0.0;
  double se_eigen_error = 0.0;
  std::vector<double> frobenius_raw;  // one entry per replication
  std::vector<double> eigen_raw;
  std::vector<double> lambda1_raw;
};

struct SweepReport {
  std::vector<SweepCell> cells;  // window-major, n ascending
  double true_lambda1 = 0.0;
  double sigma_frobenius = 0.0;
  Provenance provenance;
};

/// One trajectory of max(sample_sizes) per replication, estimated at each
/// requested prefix length (a single chain observed at increasing lengths);
/// --independent-samples simulates a fresh chain per (replication, n) instead.
/// All configured windows share the per-(replication, n) autocovariance pass.
SweepReport run_sweep(const ExperimentConfig& config);

void write_sweep(const SweepReport& report, const ExperimentConfig& config);

// ---- coverage: membership of the known mean (zero) -------------------------

struct CoverageCell {
  std::string method;  // ellipsoid | bonferroni-box | uncorrected-box
  std::size_t n = 0;
  double coverage = 0.0;
  double coverage_se = 0.0;  // sqrt(p(1-p)/R)
  double mean_volume_pth_root = 0.0;
  double volume_pth_root_se = 0.0;
};

struct CoverageReport {
  std::vector<CoverageCell> cells;
  std::string window;  // which estimator fed the regions
  Provenance provenance;
};

CoverageReport run_coverage(const ExperimentConfig& config);

void write_coverage(const CoverageReport& report, const ExperimentConfig& config);

// ---- eigdist: raw largest-eigenvalue samples for external density plots ----

struct EigdistRow {
  std::string window;
  std::size_t n = 0;
  std::size_t replication = 0;
  double lambda1_hat = 0.0;
};

struct EigdistReport {
  std::vector<EigdistRow> rows;
  double true_lambda1 = 0.0;
  Provenance provenance;
};

EigdistReport run_eigdist(const ExperimentConfig& config);

void write_eigdist(const EigdistReport& report, const ExperimentConfig& config);

/// Shortest round-trip decimal formatting used by every writer, so reruns
/// with identical configs produce byte-identical files.
std::string format_double(double value);

}  // namespace mcov
