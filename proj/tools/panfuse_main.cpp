#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <panfuse/panfuse.hpp>

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kMethodNames = {"brovey", "aw", "sw", "bw",
                                               "ihs",    "pca", "hpf"};

panfuse::Method parse_method(const std::string& name) {
  const auto m = panfuse::method_from_string(name);
  if (!m) throw panfuse::ParameterError("unknown method " + name);
  return *m;
}

panfuse::ResampleKernel parse_kernel(const std::string& name) {
  if (name == "nearest") return panfuse::ResampleKernel::Nearest;
  if (name == "bilinear") return panfuse::ResampleKernel::Bilinear;
  return panfuse::ResampleKernel::Bicubic;
}

std::optional<panfuse::PanMatch> parse_pan_match(const std::string& name) {
  if (name.empty()) return std::nullopt;
  return name == "none" ? panfuse::PanMatch::None : panfuse::PanMatch::MeanStd;
}

std::optional<int> parse_levels(const std::string& s) {
  if (s == "auto") return std::nullopt;
  return std::stoi(s);
}

std::string levels_label(const std::optional<int>& levels, const panfuse::FusionConfig& cfg) {
  if (levels) return std::to_string(*levels);
  return "auto(" + std::to_string(cfg.effective_levels()) + ")";
}

panfuse::BandStack load_stack(const fs::path& path) {
  if (path.extension() == ".pgm")
    return panfuse::BandStack({panfuse::load_pgm(path)});
  return panfuse::load_brs(path);
}

panfuse::Band load_band(const fs::path& path) {
  const panfuse::BandStack stack = load_stack(path);
  if (stack.band_count() != 1)
    throw panfuse::FormatError(path.string() + ": expected a single band, found " +
                               std::to_string(stack.band_count()));
  return stack.band(0);
}

void save_stack(const fs::path& path, const panfuse::BandStack& stack) {
  if (path.extension() == ".pgm") {
    if (stack.band_count() != 1)
      throw panfuse::ParameterError("pgm output supports a single band only");
    panfuse::save_pgm(path, stack.band(0));
    return;
  }
  panfuse::save_brs(path, stack);
}

void write_csv_file(const fs::path& path,
                    const std::vector<std::pair<std::string, panfuse::QualityReport>>& reports,
                    const std::vector<std::pair<std::string, std::string>>& metadata) {
  std::ofstream out(path);
  if (!out) throw panfuse::Error("cannot open " + path.string() + " for writing");
  panfuse::write_report_csv(out, reports, metadata);
  if (!out) throw panfuse::Error("write failure on " + path.string());
}

// CLI11 validator: "auto" or an integer >= 1
std::string check_levels(const std::string& s) {
  if (s == "auto") return {};
  try {
    if (std::stoi(s) >= 1) return {};
  } catch (...) {
  }
  return "must be 'auto' or an integer >= 1";
}

struct FuseOptions {
  std::string method, pan, ms, out;
  int ratio = 4;
  bool ratio_given = false;
  std::string levels = "auto";
  double eps = 0;
  bool eps_given = false;
  std::string pan_match;
  std::string resample = "bicubic";
};

void run_fuse(const FuseOptions& opt) {
  const panfuse::Band pan = load_band(opt.pan);
  panfuse::BandStack ms = load_stack(opt.ms);

  std::size_t factor = 1;
  if (pan.width() != ms.width() || pan.height() != ms.height()) {
    if (ms.width() == 0 || pan.width() % ms.width() != 0 ||
        pan.height() % ms.height() != 0 ||
        pan.width() / ms.width() != pan.height() / ms.height())
      throw panfuse::ShapeError("pan " + std::to_string(pan.width()) + "x" +
                                std::to_string(pan.height()) +
                                " is not an integer multiple of ms " +
                                std::to_string(ms.width()) + "x" +
                                std::to_string(ms.height()));
    factor = pan.width() / ms.width();
  }

  int ratio = opt.ratio;
  if (!opt.ratio_given && factor > 1) ratio = static_cast<int>(factor);
  if (opt.ratio_given && factor > 1 && static_cast<std::size_t>(opt.ratio) != factor)
    throw panfuse::ParameterError("--ratio " + std::to_string(opt.ratio) +
                                  " is inconsistent with the pan/ms size factor " +
                                  std::to_string(factor));
  if (factor > 1)
    ms = panfuse::upsample(ms, panfuse::ResampleSpec{factor, parse_kernel(opt.resample)});

  panfuse::FusionConfig cfg;
  cfg.method = parse_method(opt.method);
  cfg.ratio = ratio;
  cfg.levels = parse_levels(opt.levels);
  if (opt.eps_given) cfg.denom_epsilon = opt.eps;
  cfg.pan_match = parse_pan_match(opt.pan_match);

  const auto result = panfuse::fuse(pan, ms, cfg);
  save_stack(opt.out, result.fused);
  std::cout << "fused " << ms.band_count() << " bands with " << opt.method << " -> "
            << opt.out << "\n";
}

struct EvaluateOptions {
  std::string fused, reference, out;
  std::string label = "fused";
  std::size_t window = 8, stride = 1;
};

void run_evaluate(const EvaluateOptions& opt) {
  const panfuse::BandStack fused = load_stack(opt.fused);
  const panfuse::BandStack reference = load_stack(opt.reference);
  const panfuse::WindowSpec w{opt.window, opt.stride};
  const panfuse::QualityReport report = panfuse::evaluate_stack(fused, reference, w);
  write_csv_file(opt.out, {{opt.label, report}},
                 {{"window", std::to_string(opt.window)},
                  {"stride", std::to_string(opt.stride)}});
  std::cout << "wrote " << opt.out << "\n";
}

struct ExperimentOptions {
  std::string pan, reference, out;
  std::vector<std::string> methods;
  int ratio = 4;
  std::size_t window = 8, stride = 1;
  std::string levels = "auto";
  std::string pan_match;
  std::string resample = "bicubic";
  bool dump_fused = false;
};

void run_experiment_cmd(const ExperimentOptions& opt) {
  const panfuse::Band pan = load_band(opt.pan);
  const panfuse::BandStack reference = load_stack(opt.reference);

  panfuse::ExperimentSpec spec;
  for (const auto& name : opt.methods) spec.methods.push_back(parse_method(name));
  spec.ratio = opt.ratio;
  spec.window = {opt.window, opt.stride};
  spec.kernel = parse_kernel(opt.resample);
  spec.levels = parse_levels(opt.levels);
  spec.pan_match = parse_pan_match(opt.pan_match);

  const auto results = panfuse::run_experiment(pan, reference, spec);

  fs::create_directories(opt.out);
  std::vector<std::pair<std::string, panfuse::QualityReport>> labeled;
  for (const auto& [method, report] : results)
    labeled.emplace_back(panfuse::method_name(method), report);

  panfuse::FusionConfig echo;
  echo.ratio = opt.ratio;
  echo.levels = spec.levels;
  std::string method_list;
  for (const auto& name : opt.methods)
    method_list += (method_list.empty() ? "" : ",") + name;
  write_csv_file(fs::path(opt.out) / "report.csv", labeled,
                 {{"methods", method_list},
                  {"ratio", std::to_string(opt.ratio)},
                  {"window", std::to_string(opt.window)},
                  {"stride", std::to_string(opt.stride)},
                  {"resample", opt.resample},
                  {"levels", levels_label(spec.levels, echo)},
                  {"pan-match", opt.pan_match.empty() ? "default" : opt.pan_match}});

  if (opt.dump_fused) {
    const auto ms_up = panfuse::upsample(
        panfuse::degrade(reference, static_cast<std::size_t>(opt.ratio)),
        panfuse::ResampleSpec{static_cast<std::size_t>(opt.ratio), spec.kernel});
    for (const auto& name : opt.methods) {
      panfuse::FusionConfig cfg;
      cfg.method = parse_method(name);
      cfg.ratio = opt.ratio;
      cfg.levels = spec.levels;
      if (cfg.method == panfuse::Method::AW || cfg.method == panfuse::Method::SW)
        cfg.pan_match = spec.pan_match;
      save_stack(fs::path(opt.out) / ("fused_" + name + ".brs"),
                 panfuse::fuse(pan, ms_up, cfg).fused);
    }
  }
  std::cout << "wrote " << (fs::path(opt.out) / "report.csv").string() << "\n";
}

struct SynthOptions {
  std::size_t width = 128, height = 128, bands = 4, ratio = 4;
  std::uint64_t seed = 0;
  std::string out;
};

void run_synth(const SynthOptions& opt) {
  const panfuse::SyntheticScene scene =
      panfuse::generate_scene(opt.width, opt.height, opt.bands, opt.ratio, opt.seed);
  fs::create_directories(opt.out);
  panfuse::save_brs(fs::path(opt.out) / "pan.brs", panfuse::BandStack({scene.pan}));
  panfuse::save_brs(fs::path(opt.out) / "ms.brs", scene.ms);
  panfuse::save_brs(fs::path(opt.out) / "reference.brs", scene.reference);
  std::cout << "wrote pan.brs, ms.brs, reference.brs to " << opt.out << "\n";
}

struct DecomposeOptions {
  std::string in, out;
  int levels = 2;
};

void run_decompose(const DecomposeOptions& opt) {
  const panfuse::BandStack stack = load_stack(opt.in);
  fs::create_directories(opt.out);
  for (std::size_t b = 0; b < stack.band_count(); ++b) {
    const auto d = panfuse::decompose(stack.band(b), opt.levels);
    const std::string prefix = "band" + std::to_string(b + 1) + "_";
    for (std::size_t j = 0; j < d.levels(); ++j)
      panfuse::save_brs(fs::path(opt.out) / (prefix + "plane" + std::to_string(j + 1) + ".brs"),
                        panfuse::BandStack({d.planes[j]}));
    panfuse::save_brs(fs::path(opt.out) / (prefix + "residual.brs"),
                      panfuse::BandStack({d.residual}));
    std::cout << prefix << d.levels() << " planes + residual -> " << opt.out << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"panfuse: PAN/MS image fusion and evaluation toolkit"};
  app.require_subcommand(1);

  FuseOptions fuse_opt;
  auto* fuse_cmd = app.add_subcommand("fuse", "Fuse a PAN band with an MS stack");
  fuse_cmd->add_option("--method", fuse_opt.method, "Fusion method")
      ->required()
      ->check(CLI::IsMember(kMethodNames));
  fuse_cmd->add_option("--pan", fuse_opt.pan, "PAN raster (.brs or .pgm)")->required();
  fuse_cmd->add_option("--ms", fuse_opt.ms, "MS stack (.brs or .pgm)")->required();
  fuse_cmd->add_option("--out", fuse_opt.out, "Output stack (.brs, or .pgm if 1 band)")
      ->required();
  fuse_cmd->add_option("--ratio", fuse_opt.ratio, "Resolution ratio")
      ->check(CLI::Range(1, 1 << 20));
  fuse_cmd->add_option("--levels", fuse_opt.levels, "Wavelet levels or 'auto'")
      ->check(check_levels);
  fuse_cmd->add_option("--eps", fuse_opt.eps, "Brovey denominator guard")
      ->check(CLI::PositiveNumber);
  fuse_cmd->add_option("--pan-match", fuse_opt.pan_match, "PAN matching for aw/sw")
      ->check(CLI::IsMember({"none", "mean-std"}));
  fuse_cmd->add_option("--resample", fuse_opt.resample, "Upsampling kernel")
      ->check(CLI::IsMember({"nearest", "bilinear", "bicubic"}));
  fuse_cmd->callback([&] {
    fuse_opt.ratio_given = fuse_cmd->count("--ratio") > 0;
    fuse_opt.eps_given = fuse_cmd->count("--eps") > 0;
    run_fuse(fuse_opt);
  });

  EvaluateOptions eval_opt;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a fused stack against a reference");
  eval_cmd->add_option("--fused", eval_opt.fused, "Fused stack")->required();
  eval_cmd->add_option("--reference", eval_opt.reference, "Reference stack")->required();
  eval_cmd->add_option("--out", eval_opt.out, "CSV report path")->required();
  eval_cmd->add_option("--window", eval_opt.window, "Sliding window size")
      ->check(CLI::Range(2, 1 << 16));
  eval_cmd->add_option("--stride", eval_opt.stride, "Sliding window stride")
      ->check(CLI::Range(1, 1 << 16));
  eval_cmd->add_option("--label", eval_opt.label, "Method column label");
  eval_cmd->callback([&] { run_evaluate(eval_opt); });

  ExperimentOptions exp_opt;
  auto* exp_cmd = app.add_subcommand(
      "experiment", "Degrade a reference, fuse with each method, and score");
  exp_cmd->add_option("--pan", exp_opt.pan, "PAN raster")->required();
  exp_cmd->add_option("--reference", exp_opt.reference, "Reference MS stack")->required();
  exp_cmd->add_option("--methods", exp_opt.methods, "Comma-separated method list")
      ->required()
      ->delimiter(',')
      ->check(CLI::IsMember(kMethodNames));
  exp_cmd->add_option("--out", exp_opt.out, "Output directory")->required();
  exp_cmd->add_option("--ratio", exp_opt.ratio, "Degradation ratio (power of two)")
      ->check(CLI::Range(2, 1 << 20));
  exp_cmd->add_option("--window", exp_opt.window, "Sliding window size")
      ->check(CLI::Range(2, 1 << 16));
  exp_cmd->add_option("--stride", exp_opt.stride, "Sliding window stride")
      ->check(CLI::Range(1, 1 << 16));
  exp_cmd->add_option("--levels", exp_opt.levels, "Wavelet levels or 'auto'")
      ->check(check_levels);
  exp_cmd->add_option("--pan-match", exp_opt.pan_match, "PAN matching for aw/sw")
      ->check(CLI::IsMember({"none", "mean-std"}));
  exp_cmd->add_option("--resample", exp_opt.resample, "Upsampling kernel")
      ->check(CLI::IsMember({"nearest", "bilinear", "bicubic"}));
  exp_cmd->add_flag("--dump-fused", exp_opt.dump_fused, "Also write every fused stack");
  exp_cmd->callback([&] { run_experiment_cmd(exp_opt); });

  SynthOptions synth_opt;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic test scene");
  synth_cmd->add_option("--width", synth_opt.width, "Reference width")->required();
  synth_cmd->add_option("--height", synth_opt.height, "Reference height")->required();
  synth_cmd->add_option("--bands", synth_opt.bands, "Band count")
      ->check(CLI::Range(2, 1 << 10));
  synth_cmd->add_option("--ratio", synth_opt.ratio, "Resolution ratio")
      ->check(CLI::Range(1, 1 << 10));
  synth_cmd->add_option("--seed", synth_opt.seed, "RNG seed");
  synth_cmd->add_option("--out", synth_opt.out, "Output directory")->required();
  synth_cmd->callback([&] { run_synth(synth_opt); });

  DecomposeOptions dec_opt;
  auto* dec_cmd = app.add_subcommand("decompose", "Dump wavelet planes of a raster");
  dec_cmd->add_option("--in", dec_opt.in, "Input raster")->required();
  dec_cmd->add_option("--levels", dec_opt.levels, "Decomposition depth")
      ->required()
      ->check(CLI::Range(1, 64));
  dec_cmd->add_option("--out", dec_opt.out, "Output directory")->required();
  dec_cmd->callback([&] { run_decompose(dec_opt); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "panfuse: " << e.what() << "\n";
    return 2;
  } catch (const panfuse::Error& e) {
    std::cerr << "panfuse: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "panfuse: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
