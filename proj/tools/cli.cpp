#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include "jsnlm/bench.hpp"
#include "jsnlm/denoise.hpp"
#include "jsnlm/error.hpp"
#include "jsnlm/metrics.hpp"
#include "jsnlm/noise.hpp"

namespace jsnlm::cli {

namespace {

struct DenoiseFlags {
  std::string input;
  std::string output;
  std::string cpw = "ljs";
  std::string h = "auto";
  int patch = 3;
  int search = 15;
  std::optional<double> sigma;
  std::uint64_t seed = 0;
  bool add_noise = false;
  std::string save_noisy;
  std::string clean;
  std::string kernel = "flat";
  std::optional<int> block;
  bool reference = false;
  int threads = 0;
  double p_cap = 1.0;
};

struct NoiseFlags {
  std::string input;
  std::string output;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

struct SweepFlags {
  std::string config;
  std::string outdir;
  std::optional<int> h_steps;
  std::optional<int> threads;
  std::optional<std::string> images;
  std::optional<std::string> sigmas;
  std::optional<std::string> patch_radii;
  std::optional<int> search;
  std::optional<std::string> schemes;
  std::optional<double> h_lo;
  std::optional<double> h_hi;
  std::optional<std::string> h_spacing;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> kernel;
  std::optional<double> trend_bound;
};

std::string format_db(double v) {
  if (is_saturated(v)) {
    return "saturated";
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

int cmd_denoise(const DenoiseFlags& f, std::ostream& out) {
  Image y = load_pgm(f.input);
  if (f.add_noise) {
    if (!f.sigma) {
      throw ConfigError("--add-noise requires --sigma");
    }
    y = add_gaussian_noise(y, NoiseSpec{*f.sigma, f.seed});
    if (!f.save_noisy.empty()) {
      save_pgm(y, f.save_noisy);
    }
  }

  NlmParams params;
  params.patch_radius = f.patch;
  params.search_radius = f.search;
  params.kernel = parse_kernel(f.kernel);
  params.threads = f.threads;
  if (f.h == "auto") {
    if (!f.sigma) {
      throw ConfigError("--h auto requires --sigma");
    }
    params.h = *f.sigma * *f.sigma * square_size(f.patch);
  } else {
    try {
      std::size_t used = 0;
      params.h = std::stod(f.h, &used);
      if (used != f.h.size()) {
        throw std::invalid_argument(f.h);
      }
    } catch (const std::exception&) {
      throw ConfigError("--h expects a positive number or 'auto', got '" + f.h + "'");
    }
  }

  CpwScheme scheme = parse_scheme(f.cpw);
  if (f.block) {
    scheme.block_radius = *f.block;
  }
  scheme.clamp_upper = f.p_cap;
  scheme = with_default_block(scheme, f.patch);
  validate(scheme);
  const bool needs_sigma =
      scheme.kind == CpwKind::stein || scheme.kind == CpwKind::js || scheme.kind == CpwKind::ljs;
  if (needs_sigma && !f.sigma) {
    throw ConfigError("--cpw " + to_string(scheme) + " requires --sigma");
  }
  const double sigma = f.sigma.value_or(0.0);

  const Image x_hat = f.reference ? nlm_denoise(y, params, scheme, sigma)
                                  : nlm_denoise_fast(y, params, scheme, sigma);
  save_pgm(x_hat, f.output);
  if (!f.clean.empty()) {
    out << "PSNR " << format_db(psnr(load_pgm(f.clean), x_hat)) << " dB (cpw=" << to_string(scheme)
        << ", h=" << params.h << ")\n";
  }
  return kOk;
}

int cmd_add_noise(const NoiseFlags& f) {
  save_pgm(add_gaussian_noise(load_pgm(f.input), NoiseSpec{f.sigma, f.seed}), f.output);
  return kOk;
}

int cmd_sweep(const SweepFlags& f, std::ostream& out) {
  SweepConfig cfg = default_sweep_config();
  if (!f.config.empty()) {
    load_sweep_config(f.config, cfg);
  }
  auto set = [&cfg](const char* key, const auto& flag) {
    if (flag) {
      if constexpr (std::is_same_v<std::decay_t<decltype(*flag)>, std::string>) {
        apply_config_entry(cfg, key, *flag);
      } else {
        apply_config_entry(cfg, key, std::to_string(*flag));
      }
    }
  };
  set("images", f.images);
  set("sigmas", f.sigmas);
  set("patch_radii", f.patch_radii);
  set("search_radius", f.search);
  set("schemes", f.schemes);
  set("h_steps", f.h_steps);
  set("h_spacing", f.h_spacing);
  set("seed", f.seed);
  set("kernel", f.kernel);
  set("threads", f.threads);
  // Doubles go through the struct directly to avoid to_string rounding.
  if (f.h_lo) cfg.h_lo_frac = *f.h_lo;
  if (f.h_hi) cfg.h_hi_frac = *f.h_hi;
  if (f.trend_bound) cfg.trend_bound_db = *f.trend_bound;
  if (cfg.images.empty()) {
    throw ConfigError("sweep needs at least one image (config key 'images' or --images)");
  }

  const SweepResult result = run_sweep(cfg);
  const std::filesystem::path dir(f.outdir);
  std::filesystem::create_directories(dir);
  emit_csv(result, dir / "sweep.csv");
  const TrendReport report = check_trends(result, cfg.trend_bound_db);
  const std::string text = report.to_text();
  std::ofstream trends(dir / "trends.txt", std::ios::binary | std::ios::trunc);
  if (!trends || !(trends << text)) {
    throw IoError("cannot write '" + (dir / "trends.txt").string() + "'");
  }
  out << text;
  out << "wrote " << result.records.size() << " records to " << (dir / "sweep.csv").string() << '\n';
  return report.any_failed() ? kCheckFailed : kOk;
}

}  // namespace

int verify(const VerifyOptions& options, std::ostream& out, std::ostream& err) {
  const auto checks = run_self_check(options);
  bool ok = true;
  for (const VerifyCheck& c : checks) {
    char line[160];
    std::snprintf(line, sizeof(line), "%s: %s (max error %.3e, tolerance %.0e)\n", c.name.c_str(),
                  c.passed ? "PASS" : "FAIL", c.max_error, c.tolerance);
    out << line;
    if (!c.passed) {
      err << "verification failed: " << c.name << '\n';
      ok = false;
    }
  }
  return ok ? kOk : kCheckFailed;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Non-local means denoising with James-Stein center pixel weights", "jsnlm"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");

  DenoiseFlags df;
  auto* denoise = app.add_subcommand("denoise", "Denoise one PGM image");
  denoise->add_option("--input", df.input, "Input PGM")->required();
  denoise->add_option("--output", df.output, "Output PGM")->required();
  denoise->add_option("--cpw", df.cpw,
                      "one | zero | stein | max | heur[:tau] | js | ljs[:block_radius]")
      ->capture_default_str();
  denoise->add_option("--h", df.h, "Temperature, or 'auto' for sigma^2*|P|")->capture_default_str();
  denoise->add_option("--patch", df.patch, "Patch radius")->capture_default_str();
  denoise->add_option("--search", df.search, "Search window radius")->capture_default_str();
  denoise->add_option("--sigma", df.sigma, "Noise standard deviation");
  denoise->add_option("--seed", df.seed, "Noise seed")->capture_default_str();
  denoise->add_flag("--add-noise", df.add_noise, "Add Gaussian noise to the input first");
  denoise->add_option("--save-noisy", df.save_noisy, "Also write the noisy image");
  denoise->add_option("--clean", df.clean, "Clean reference for PSNR");
  denoise->add_option("--kernel", df.kernel, "flat | gaussian[:alpha]")->capture_default_str();
  denoise->add_option("--block", df.block, "LJS block radius (default: patch radius)");
  denoise->add_flag("--reference", df.reference, "Use the brute-force path");
  denoise->add_option("--threads", df.threads, "Worker threads, 0 = auto")->capture_default_str();
  denoise->add_option("--p-cap", df.p_cap, "Upper cap on the shrink fraction")->capture_default_str();

  NoiseFlags nf;
  auto* add_noise = app.add_subcommand("add-noise", "Add seeded Gaussian noise to a PGM image");
  add_noise->add_option("--input", nf.input)->required();
  add_noise->add_option("--output", nf.output)->required();
  add_noise->add_option("--sigma", nf.sigma)->required();
  add_noise->add_option("--seed", nf.seed)->capture_default_str();

  SweepFlags sf;
  auto* sweep = app.add_subcommand("sweep", "Run the temperature sweep benchmark");
  sweep->add_option("--config", sf.config, "key = value config file");
  sweep->add_option("--outdir", sf.outdir, "Output directory")->required();
  sweep->add_option("--h-steps", sf.h_steps);
  sweep->add_option("--threads", sf.threads);
  sweep->add_option("--images", sf.images, "Comma-separated PGM paths");
  sweep->add_option("--sigmas", sf.sigmas, "Comma-separated noise levels");
  sweep->add_option("--patch-radii", sf.patch_radii);
  sweep->add_option("--search", sf.search);
  sweep->add_option("--schemes", sf.schemes, "Comma-separated CPW schemes");
  sweep->add_option("--h-lo", sf.h_lo, "Lowest h as a fraction of sigma^2*|P|");
  sweep->add_option("--h-hi", sf.h_hi, "Highest h as a fraction of sigma^2*|P|");
  sweep->add_option("--h-spacing", sf.h_spacing, "linear | log");
  sweep->add_option("--seed", sf.seed);
  sweep->add_option("--kernel", sf.kernel);
  sweep->add_option("--trend-bound", sf.trend_bound, "dB bound for the h-limit check");

  VerifyOptions vo;
  auto* verify_cmd = app.add_subcommand("verify", "Run the built-in oracle checks");
  verify_cmd->add_option("--seed", vo.seed)->capture_default_str();
  verify_cmd->add_option("--cases", vo.cases)->capture_default_str()->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (denoise->parsed()) {
      return cmd_denoise(df, out);
    }
    if (add_noise->parsed()) {
      return cmd_add_noise(nf);
    }
    if (sweep->parsed()) {
      return cmd_sweep(sf, out);
    }
    return verify(vo, out, err);
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace jsnlm::cli
