#include "jsnlm/bench.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "jsnlm/denoise.hpp"
#include "jsnlm/error.hpp"
#include "jsnlm/noise.hpp"
#include "jsnlm/parallel.hpp"

namespace jsnlm {

std::vector<CpwScheme> default_schemes() {
  std::vector<CpwScheme> out;
  for (const char* name : {"one", "zero", "stein", "max", "heur:0.5", "js", "ljs"}) {
    out.push_back(parse_scheme(name));
  }
  return out;
}

SweepConfig default_sweep_config() {
  SweepConfig cfg;
  cfg.schemes = default_schemes();
  return cfg;
}

void validate(const SweepConfig& cfg) {
  if (!(cfg.h_lo_frac > 0.0) || !(cfg.h_lo_frac <= cfg.h_hi_frac)) {
    throw ConfigError("h fractions must satisfy 0 < h_lo_frac <= h_hi_frac");
  }
  if (cfg.h_steps < 1) {
    throw ConfigError("h_steps must be >= 1");
  }
  if (cfg.search_radius < 1) {
    throw ConfigError("search_radius must be >= 1");
  }
  for (double s : cfg.sigmas) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw ConfigError("sigmas must be finite and > 0");
    }
  }
  for (int p : cfg.patch_radii) {
    if (p < 1 || p > cfg.search_radius) {
      throw ConfigError("patch_radii must lie in [1, search_radius]");
    }
  }
  for (const CpwScheme& s : cfg.schemes) {
    validate(s);
  }
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  T out{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
  }
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& value) {
  std::vector<T> out;
  for (const std::string& item : split_list(value)) {
    out.push_back(parse_value<T>(key, item));
  }
  if (out.empty()) {
    throw ConfigError("config key '" + key + "': empty list");
  }
  return out;
}

}  // namespace

void apply_config_entry(SweepConfig& cfg, const std::string& key, const std::string& value,
                        const std::filesystem::path& base_dir) {
  try {
    if (key == "images") {
      cfg.images.clear();
      for (const std::string& item : split_list(value)) {
        std::filesystem::path p(item);
        cfg.images.push_back(p.is_relative() && !base_dir.empty() ? base_dir / p : p);
      }
    } else if (key == "sigmas") {
      cfg.sigmas = parse_list<double>(key, value);
    } else if (key == "patch_radii") {
      cfg.patch_radii = parse_list<int>(key, value);
    } else if (key == "search_radius") {
      cfg.search_radius = parse_value<int>(key, value);
    } else if (key == "schemes") {
      cfg.schemes.clear();
      for (const std::string& item : split_list(value)) {
        cfg.schemes.push_back(parse_scheme(item));
      }
    } else if (key == "h_steps") {
      cfg.h_steps = parse_value<int>(key, value);
    } else if (key == "h_lo_frac") {
      cfg.h_lo_frac = parse_value<double>(key, value);
    } else if (key == "h_hi_frac") {
      cfg.h_hi_frac = parse_value<double>(key, value);
    } else if (key == "h_spacing") {
      if (value == "linear") {
        cfg.spacing = HSpacing::linear;
      } else if (value == "log") {
        cfg.spacing = HSpacing::log;
      } else {
        throw ConfigError("expected linear or log");
      }
    } else if (key == "seed") {
      cfg.seed = parse_value<std::uint64_t>(key, value);
    } else if (key == "kernel") {
      cfg.kernel = parse_kernel(value);
    } else if (key == "threads") {
      cfg.threads = parse_value<int>(key, value);
    } else if (key == "trend_bound_db") {
      cfg.trend_bound_db = parse_value<double>(key, value);
    } else {
      throw ConfigError("unknown key");
    }
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.find("config key '" + key + "'") != std::string::npos) {
      throw;
    }
    throw ConfigError("config key '" + key + "': " + what);
  }
}

void load_sweep_config(const std::filesystem::path& path, SweepConfig& cfg) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config '" + path.string() + "'");
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    if (trim(line).empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)),
                       path.parent_path());
  }
}

std::vector<double> h_grid(double sigma, int patch_size, const SweepConfig& cfg) {
  const double base = sigma * sigma * patch_size;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(cfg.h_steps));
  if (cfg.h_steps == 1) {
    out.push_back(cfg.h_lo_frac * base);
    return out;
  }
  for (int i = 0; i < cfg.h_steps; ++i) {
    const double t = static_cast<double>(i) / (cfg.h_steps - 1);
    const double f = cfg.spacing == HSpacing::linear
                         ? cfg.h_lo_frac + t * (cfg.h_hi_frac - cfg.h_lo_frac)
                         : cfg.h_lo_frac * std::pow(cfg.h_hi_frac / cfg.h_lo_frac, t);
    out.push_back(f * base);
  }
  return out;
}

std::uint64_t noise_seed(std::uint64_t base_seed, std::size_t image_index, double sigma) {
  return derive_seed(derive_seed(base_seed, image_index), std::bit_cast<std::uint64_t>(sigma));
}

SweepResult run_sweep(const SweepConfig& cfg, const std::vector<std::pair<std::string, Image>>& images,
                      const SweepHooks& hooks) {
  validate(cfg);
  SweepResult result;
  std::mutex hook_mutex;

  for (std::size_t image_index = 0; image_index < images.size(); ++image_index) {
    const auto& [image_id, clean] = images[image_index];
    for (double sigma : cfg.sigmas) {
      const Image noisy =
          add_gaussian_noise(clean, NoiseSpec{sigma, noise_seed(cfg.seed, image_index, sigma)});
      for (int patch_radius : cfg.patch_radii) {
        spdlog::info("sweep {} sigma={} patch={}x{}: {} h values x {} schemes", image_id, sigma,
                     2 * patch_radius + 1, 2 * patch_radius + 1, cfg.h_steps, cfg.schemes.size());
        const std::vector<double> hs = h_grid(sigma, square_size(patch_radius), cfg);
        // psnr_by_cell[scheme][h_index]
        std::vector<std::vector<double>> psnr_by_cell(cfg.schemes.size(),
                                                      std::vector<double>(hs.size()));
        parallel_for(hs.size(), cfg.threads, [&](std::size_t hi) {
          const NlmParams params{cfg.search_radius, patch_radius, hs[hi], cfg.kernel, 1};
          const NonCenterField field = cfg.kernel.kind == KernelKind::flat
                                           ? noncenter_aggregate_fast(noisy, params)
                                           : noncenter_aggregate(noisy, params);
          if (hooks.on_aggregate) {
            std::lock_guard lock(hook_mutex);
            hooks.on_aggregate(image_id, sigma, patch_radius, hs[hi], noisy);
          }
          for (std::size_t si = 0; si < cfg.schemes.size(); ++si) {
            const CpwScheme scheme = with_default_block(cfg.schemes[si], patch_radius);
            const double value = psnr(clean, apply_scheme(noisy, field, params, scheme, sigma));
            if (std::isnan(value)) {
              throw std::runtime_error("NaN PSNR for image " + image_id + " sigma " +
                                       std::to_string(sigma) + " scheme " + to_string(scheme) +
                                       " h " + std::to_string(hs[hi]));
            }
            psnr_by_cell[si][hi] = value;
          }
        });

        for (std::size_t si = 0; si < cfg.schemes.size(); ++si) {
          const std::string label = to_string(cfg.schemes[si]);
          std::vector<double> finite;
          for (std::size_t hi = 0; hi < hs.size(); ++hi) {
            const double value = psnr_by_cell[si][hi];
            result.records.push_back(PsnrRecord{image_id, sigma, patch_radius, label, hs[hi], value});
            if (std::isfinite(value)) {
              finite.push_back(value);
            }
          }
          if (finite.size() >= 2) {
            result.summaries[CellKey{image_id, sigma, patch_radius, label}] = summarize(finite);
          }
        }
      }
    }
  }
  return result;
}

SweepResult run_sweep(const SweepConfig& cfg, const SweepHooks& hooks) {
  std::vector<std::pair<std::string, Image>> images;
  for (const auto& path : cfg.images) {
    try {
      images.emplace_back(path.stem().string(), load_pgm(path));
    } catch (const FormatError& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
  }
  return run_sweep(cfg, images, hooks);
}

namespace {

std::string fixed6(double v) {
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 6);
  return std::string(buf, ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

double parse_csv_double(const std::string& s) {
  if (s == "inf") {
    return kSaturatedPsnr;
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("CSV: bad number '" + s + "'");
  }
  return v;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out << text;
  if (!out) {
    throw IoError("write failure on '" + path.string() + "'");
  }
}

}  // namespace

void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
  std::string main = "image,sigma,patch,scheme,h,psnr_db\n";
  for (const PsnrRecord& r : result.records) {
    main += csv_field(r.image_id) + ',' + fixed6(r.sigma) + ',' + std::to_string(r.patch_radius) +
            ',' + csv_field(r.scheme) + ',' + fixed6(r.h) + ',' + fixed6(r.psnr_db) + '\n';
  }
  write_file(path, main);

  // Summaries follow record order rather than map order.
  std::string summary = "image,sigma,patch,scheme,mean_db,std_db,count\n";
  std::set<CellKey> written;
  for (const PsnrRecord& r : result.records) {
    const CellKey key{r.image_id, r.sigma, r.patch_radius, r.scheme};
    const auto it = result.summaries.find(key);
    if (it == result.summaries.end() || !written.insert(key).second) {
      continue;
    }
    summary += csv_field(r.image_id) + ',' + fixed6(r.sigma) + ',' + std::to_string(r.patch_radius) +
               ',' + csv_field(r.scheme) + ',' + fixed6(it->second.mean_db) + ',' +
               fixed6(it->second.std_db) + ',' + std::to_string(it->second.count) + '\n';
  }
  write_file(path.string() + ".summary.csv", summary);
}

std::vector<PsnrRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  std::string line;
  if (!std::getline(in, line) || line != "image,sigma,patch,scheme,h,psnr_db") {
    throw FormatError("CSV: unexpected header in '" + path.string() + "'");
  }
  std::vector<PsnrRecord> out;
  while (std::getline(in, line)) {
    const auto fields = split_csv_line(line);
    if (fields.size() != 6) {
      throw FormatError("CSV: expected 6 fields, got " + std::to_string(fields.size()));
    }
    out.push_back(PsnrRecord{fields[0], parse_csv_double(fields[1]), std::stoi(fields[2]), fields[3],
                             parse_csv_double(fields[4]), parse_csv_double(fields[5])});
  }
  return out;
}

bool TrendReport::any_failed() const {
  return std::any_of(checks.begin(), checks.end(),
                     [](const TrendCheck& c) { return c.status == TrendCheck::Status::fail; });
}

std::string TrendReport::to_text() const {
  std::string out;
  for (const TrendCheck& c : checks) {
    const char* status = c.status == TrendCheck::Status::pass   ? "PASS"
                         : c.status == TrendCheck::Status::fail ? "FAIL"
                                                                : "SKIP";
    out += c.name + ": " + status + " (" + c.detail + ")\n";
  }
  return out;
}

namespace {

std::string fixed3(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 3);
  return std::string(buf, ptr);
}

std::optional<CpwKind> kind_of(const std::string& label) {
  try {
    return parse_scheme(label).kind;
  } catch (const ConfigError&) {
    return std::nullopt;
  }
}

}  // namespace

TrendReport check_trends(const SweepResult& result, double spread_bound_db) {
  using Status = TrendCheck::Status;
  // (image, patch) -> sigma -> scheme -> list of (h, psnr)
  std::map<std::pair<std::string, int>,
           std::map<double, std::map<std::string, std::vector<std::pair<double, double>>>>>
      grouped;
  std::vector<std::pair<std::string, int>> order;
  for (const PsnrRecord& r : result.records) {
    const auto key = std::make_pair(r.image_id, r.patch_radius);
    if (!grouped.contains(key)) {
      order.push_back(key);
    }
    grouped[key][r.sigma][r.scheme].emplace_back(r.h, r.psnr_db);
  }

  TrendReport report;
  for (const auto& key : order) {
    const auto& by_sigma = grouped[key];
    const std::string where = key.first + ",patch=" + std::to_string(2 * key.second + 1);

    for (const auto& [sigma, by_scheme] : by_sigma) {
      TrendCheck check;
      check.name = "h-limit-convergence[" + where + ",sigma=" + fixed3(sigma) + "]";
      std::map<CpwKind, double> at_top;
      for (const auto& [label, points] : by_scheme) {
        const auto kind = kind_of(label);
        if (!kind || points.empty()) {
          continue;
        }
        const auto top = std::max_element(points.begin(), points.end());
        if (*kind == CpwKind::one || *kind == CpwKind::stein || *kind == CpwKind::max ||
            *kind == CpwKind::heuristic) {
          at_top[*kind] = top->second;
        }
      }
      if (at_top.size() < 4) {
        check.status = Status::skip;
        check.detail = "needs one, stein, max and heur";
      } else {
        double lo = kSaturatedPsnr;
        double hi = -kSaturatedPsnr;
        for (const auto& [kind, v] : at_top) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        const double spread = hi - lo;
        check.status = spread < spread_bound_db ? Status::pass : Status::fail;
        check.detail = "spread=" + fixed3(spread) + " dB, bound=" + fixed3(spread_bound_db) + " dB";
      }
      report.checks.push_back(std::move(check));
    }

    TrendCheck check;
    check.name = "sigma-spread-decrease[" + where + "]";
    if (by_sigma.size() < 2) {
      check.status = Status::skip;
      check.detail = "needs at least two sigma values";
    } else {
      std::vector<std::pair<double, double>> spreads;
      for (const auto& [sigma, by_scheme] : by_sigma) {
        double lo = kSaturatedPsnr;
        double hi = -kSaturatedPsnr;
        for (const auto& [label, points] : by_scheme) {
          double best = -kSaturatedPsnr;
          for (const auto& [h, v] : points) {
            best = std::max(best, v);
          }
          lo = std::min(lo, best);
          hi = std::max(hi, best);
        }
        spreads.emplace_back(sigma, by_scheme.size() < 2 ? 0.0 : hi - lo);
      }
      bool decreasing = true;
      for (std::size_t i = 1; i < spreads.size(); ++i) {
        decreasing = decreasing && spreads[i].second <= spreads[i - 1].second;
      }
      check.status = decreasing ? Status::pass : Status::fail;
      for (const auto& [sigma, spread] : spreads) {
        check.detail += (check.detail.empty() ? "" : ", ") + std::string("sigma=") + fixed3(sigma) +
                        ": " + fixed3(spread) + " dB";
      }
    }
    report.checks.push_back(std::move(check));
  }
  return report;
}

}  // namespace jsnlm
