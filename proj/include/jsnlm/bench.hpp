#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "jsnlm/cpw.hpp"
#include "jsnlm/image.hpp"
#include "jsnlm/metrics.hpp"
#include "jsnlm/nlm.hpp"

namespace jsnlm {

enum class HSpacing { linear, log };

/// Temperature sweep protocol: every (image, sigma, patch, scheme) cell is
/// evaluated at h_steps temperatures spanning [h_lo_frac, h_hi_frac] times
/// sigma^2 |P|.
struct SweepConfig {
  std::vector<std::filesystem::path> images;
  std::vector<double> sigmas{10.0, 20.0, 40.0};
  std::vector<int> patch_radii{2, 3};
  int search_radius = 15;
  std::vector<CpwScheme> schemes;  // empty in a default config; see default_schemes()
  int h_steps = 200;
  double h_lo_frac = 0.01;
  double h_hi_frac = 2.00;
  HSpacing spacing = HSpacing::linear;
  std::uint64_t seed = 0;
  KernelSpec kernel;
  int threads = 1;
  double trend_bound_db = 0.3;
};

/// one, zero, stein, max, heur:0.5, js, ljs (block radius = patch radius).
std::vector<CpwScheme> default_schemes();

/// A config with default_schemes() filled in.
SweepConfig default_sweep_config();

void validate(const SweepConfig& cfg);

/// Applies one `key = value` setting. Throws ConfigError naming the key.
void apply_config_entry(SweepConfig& cfg, const std::string& key, const std::string& value,
                        const std::filesystem::path& base_dir = {});

/// Reads flat `key = value` lines ('#' starts a comment) on top of `cfg`.
/// Relative image paths resolve against the config file's directory.
void load_sweep_config(const std::filesystem::path& path, SweepConfig& cfg);

/// h_i = f_i sigma^2 |P| with f_i spaced over [h_lo_frac, h_hi_frac].
std::vector<double> h_grid(double sigma, int patch_size, const SweepConfig& cfg);

struct PsnrRecord {
  std::string image_id;
  double sigma = 0.0;
  int patch_radius = 0;
  std::string scheme;
  double h = 0.0;
  double psnr_db = 0.0;
};

struct CellKey {
  std::string image_id;
  double sigma = 0.0;
  int patch_radius = 0;
  std::string scheme;

  auto operator<=>(const CellKey&) const = default;
};

struct SweepResult {
  std::vector<PsnrRecord> records;  // ordered by (image, sigma, patch, scheme, h)
  std::map<CellKey, SummaryStat> summaries;
};

struct SweepHooks {
  // Called once per aggregation with the noisy image it consumed.
  std::function<void(const std::string& image_id, double sigma, int patch_radius, double h,
                     const Image& noisy)>
      on_aggregate;
};

/// Per-(image, sigma) noise seed, independent of the other list entries.
std::uint64_t noise_seed(std::uint64_t base_seed, std::size_t image_index, double sigma);

/// Runs the sweep on in-memory clean images named by id.
SweepResult run_sweep(const SweepConfig& cfg, const std::vector<std::pair<std::string, Image>>& images,
                      const SweepHooks& hooks = {});

/// Loads cfg.images (id = file stem) and runs the sweep.
SweepResult run_sweep(const SweepConfig& cfg, const SweepHooks& hooks = {});

/// Writes `image,sigma,patch,scheme,h,psnr_db` to path and the per-cell
/// summaries to `<path>.summary.csv`.
void emit_csv(const SweepResult& result, const std::filesystem::path& path);

/// Parses a records file written by emit_csv.
std::vector<PsnrRecord> read_records_csv(const std::filesystem::path& path);

struct TrendCheck {
  enum class Status { pass, fail, skip };
  std::string name;
  Status status = Status::skip;
  std::string detail;
};

struct TrendReport {
  std::vector<TrendCheck> checks;

  bool any_failed() const;
  /// One `<name>: PASS|FAIL|SKIP (<details>)` line per check.
  std::string to_text() const;
};

/// (a) at the largest h, one/stein/max/heur agree within spread_bound_db;
/// (b) the across-scheme spread of best-over-h PSNR does not grow with sigma.
TrendReport check_trends(const SweepResult& result, double spread_bound_db = 0.3);

}  // namespace jsnlm
