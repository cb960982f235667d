// hsi: layout generation, simulation, reconstruction, evaluation and sweeps.
//
// Exit codes: 0 ok, 2 usage/configuration, 3 data (I/O, format, dimensions),
// 4 numerical failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hsi/hsi.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct Dims {
  std::size_t rows = 0, cols = 0;
};

Dims parse_dims(const std::string& s) {
  const auto x = s.find_first_of("xX");
  if (x == std::string::npos) throw hsi::ConfigError("dims must look like ROWSxCOLS, got '" + s + "'");
  try {
    std::size_t used = 0;
    const std::string r = s.substr(0, x), c = s.substr(x + 1);
    Dims d;
    d.rows = std::stoul(r, &used);
    if (used != r.size()) throw std::invalid_argument(r);
    d.cols = std::stoul(c, &used);
    if (used != c.size()) throw std::invalid_argument(c);
    if (d.rows == 0 || d.cols == 0) throw std::invalid_argument(s);
    return d;
  } catch (const std::logic_error&) {
    throw hsi::ConfigError("dims must look like ROWSxCOLS, got '" + s + "'");
  }
}

std::uint64_t env_seed() {
  const char* v = std::getenv("HSI_SEED");
  if (!v || !*v) return 0;
  try {
    std::size_t used = 0;
    const std::string s(v);
    const auto seed = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return seed;
  } catch (const std::logic_error&) {
    throw hsi::ConfigError(std::string("HSI_SEED is not an unsigned integer: '") + v + "'");
  }
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hsi::Error("cannot open config '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw hsi::ConfigError("config '" + path + "': " + e.what());
  }
}

std::size_t default_edge(std::size_t bands) {
  const auto e = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(bands))));
  return e * e == bands ? e : 0;
}

std::vector<std::size_t> one_based_bands(const std::vector<int>& in, std::size_t bands) {
  std::vector<std::size_t> out;
  for (int b : in) {
    if (b < 1 || static_cast<std::size_t>(b) > bands) {
      throw hsi::ConfigError("band " + std::to_string(b) + " outside 1.." + std::to_string(bands));
    }
    out.push_back(static_cast<std::size_t>(b - 1));
  }
  return out;
}

std::optional<double> parse_noise(const std::string& s) {
  if (s == "none" || s == "inf" || s == "clean") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw hsi::ConfigError("noise SNR must be a number or 'none', got '" + s + "'");
  }
}

// Options shared by simulate and sweep; each field is applied only when given.
struct SceneOptions {
  std::string config;
  std::string scene;
  std::string dims;
  std::size_t bands = 0;
  std::size_t edge = 0;
  std::string kind;
  std::uint64_t seed = 0;
  std::size_t blobs = 0;
  std::size_t atoms = 0;
  double smoothness = 0.0;
  double phantom_xmax = 0.0;
  int iterations = 0;
  double xmax = 0.0;
  std::string schedule;
  CLI::App* app = nullptr;

  void add(CLI::App* sub) {
    app = sub;
    sub->add_option("--config", config, "JSON config or manifest to start from");
    sub->add_option("--scene", scene, "ground-truth .hsc at FPA resolution (default: phantom)");
    sub->add_option("--dims", dims, "FPA size ROWSxCOLS (default 64x64)");
    sub->add_option("--bands", bands, "number of spectral bands L (default 16)");
    sub->add_option("--edge", edge, "mosaic macropixel edge (default sqrt(L))");
    sub->add_option("--kind", kind, "layout kind: mosaic | random (default mosaic)");
    sub->add_option("--seed", seed, "master seed (default $HSI_SEED, else 0)");
    sub->add_option("--blobs", blobs, "phantom blob count (default 24)");
    sub->add_option("--atoms", atoms, "phantom spectral DCT atoms (default 3)");
    sub->add_option("--smoothness", smoothness, "phantom blob scale, fraction of extent (default 0.05)");
    sub->add_option("--phantom-xmax", phantom_xmax, "phantom intensity ceiling (default 1)");
    sub->add_option("--iterations", iterations, "PIHT iterations S (default 200)");
    sub->add_option("--xmax", xmax, "PIHT intensity bound (default max(y))");
    sub->add_option("--schedule", schedule, "K schedule: linear | geometric (default linear)");
  }

  bool given(const char* name) const { return app->count(name) > 0; }

  hsi::ExperimentConfig build() const {
    hsi::ExperimentConfig cfg;
    cfg.seed = env_seed();
    if (given("--config")) cfg = hsi::experiment_from_json(load_json(config), cfg);
    if (given("--scene")) cfg.scene_path = scene;
    if (given("--dims")) {
      const Dims d = parse_dims(dims);
      cfg.layout.rows = d.rows;
      cfg.layout.cols = d.cols;
    }
    if (given("--bands")) {
      if (bands == 0) throw hsi::ConfigError("--bands must be >= 1");
      cfg.layout.bands = bands;
      if (!given("--edge")) cfg.layout.edge = default_edge(bands);
    }
    if (given("--edge")) cfg.layout.edge = edge;
    if (given("--kind")) cfg.layout.kind = hsi::parse_layout_kind(kind);
    if (given("--seed")) cfg.seed = seed;
    if (given("--blobs")) cfg.phantom.blobs = blobs;
    if (given("--atoms")) cfg.phantom.spectral_atoms = atoms;
    if (given("--smoothness")) cfg.phantom.smoothness = smoothness;
    if (given("--phantom-xmax")) cfg.phantom.x_max = phantom_xmax;
    if (given("--iterations")) cfg.iterations = iterations;
    if (given("--xmax")) cfg.x_max = xmax;
    if (given("--schedule")) {
      if (schedule == "linear") cfg.shape = hsi::KScheduleShape::linear;
      else if (schedule == "geometric") cfg.shape = hsi::KScheduleShape::geometric;
      else throw hsi::ConfigError("unknown K schedule '" + schedule + "'");
    }
    return cfg;
  }
};

void write_text(const fs::path& p, const std::string& s) { hsi::detail::write_file(p.string(), s); }

std::string fmt(double v) { return hsi::format_db(v); }

// ---------------------------------------------------------------- layout

struct LayoutCmd {
  std::string config, kind = "mosaic", dims = "64x64", out = "layout.msk";
  std::size_t bands = 16, edge = 0;
  std::uint64_t seed = 0;
  CLI::App* app = nullptr;

  void add(CLI::App& root) {
    app = root.add_subcommand("layout", "generate a filter layout (.msk) and print per-band counts");
    app->add_option("--config", config, "JSON layout spec {kind, rows, cols, bands, edge, seed}");
    app->add_option("--kind", kind, "mosaic | random")->capture_default_str();
    app->add_option("--dims", dims, "FPA size ROWSxCOLS")->capture_default_str();
    app->add_option("--bands", bands, "number of bands L")->capture_default_str();
    app->add_option("--edge", edge, "mosaic macropixel edge (default sqrt(L))");
    app->add_option("--seed", seed, "shuffle seed (default $HSI_SEED, else 0)");
    app->add_option("-o,--out", out, "output .msk path")->capture_default_str();
  }

  int run() const {
    hsi::LayoutSpec spec;
    spec.seed = env_seed();
    if (app->count("--config")) {
      const auto j = load_json(config);
      const auto l = j.contains("layout") ? j["layout"] : j;
      try {
        if (l.contains("kind")) spec.kind = hsi::parse_layout_kind(l["kind"].get<std::string>());
        spec.rows = l.value("rows", spec.rows);
        spec.cols = l.value("cols", spec.cols);
        spec.bands = l.value("bands", spec.bands);
        spec.edge = l.value("edge", default_edge(spec.bands));
        spec.seed = j.value("seed", l.value("seed", spec.seed));
      } catch (const nlohmann::json::exception& e) {
        throw hsi::ConfigError(std::string("layout config: ") + e.what());
      }
    }
    if (app->count("--kind") || !app->count("--config")) spec.kind = hsi::parse_layout_kind(kind);
    if (app->count("--dims") || !app->count("--config")) {
      const Dims d = parse_dims(dims);
      spec.rows = d.rows;
      spec.cols = d.cols;
    }
    if (app->count("--bands") || !app->count("--config")) {
      spec.bands = bands;
      spec.edge = default_edge(bands);
    }
    if (app->count("--edge")) spec.edge = edge;
    if (app->count("--seed")) spec.seed = seed;
    const hsi::FilterLayout layout = hsi::make_layout(spec);
    hsi::write_layout(layout, out);
    const auto counts = layout.counts();
    std::cout << "band,pixels\n";
    for (std::size_t b = 0; b < counts.size(); ++b) std::cout << b + 1 << ',' << counts[b] << '\n';
    return 0;
  }
};

// ---------------------------------------------------------------- simulate

struct SimulateCmd {
  SceneOptions scene;
  int factor = 2;
  std::string noise = "none", out = "sim";
  CLI::App* app = nullptr;

  void add(CLI::App& root) {
    app = root.add_subcommand("simulate", "simulate an FPA acquisition of a phantom or scene");
    scene.add(app);
    app->add_option("-f,--factor", factor, "upscale factor f in {1,2,4}")->capture_default_str();
    app->add_option("--noise-snr", noise, "input SNR in dB, or 'none'")->capture_default_str();
    app->add_option("-o,--out", out, "output directory")->capture_default_str();
  }

  int run() const {
    hsi::ExperimentConfig cfg = scene.build();
    if (app->count("--factor") || !app->count("--config")) cfg.factors = {factor};
    if (app->count("--noise-snr") || !app->count("--config")) cfg.noise_snr_db = {parse_noise(noise)};
    if (cfg.factors.size() != 1 || cfg.noise_snr_db.size() != 1) {
      throw hsi::ConfigError("simulate needs exactly one factor and one noise level");
    }
    cfg.output_dir = out;
    cfg.validate();
    const hsi::Instance inst = hsi::make_instance(cfg, cfg.factors[0], cfg.noise_snr_db[0]);
    fs::create_directories(out);
    hsi::VolumeHeader meta;
    meta.x_max = cfg.phantom.x_max;
    hsi::write_fpa(inst.y, (fs::path(out) / "fpa.hsc").string());
    hsi::write_cube(inst.truth, (fs::path(out) / "truth.hsc").string(), meta);
    hsi::write_layout(inst.phi.layout(), (fs::path(out) / "layout.msk").string());
    nlohmann::json manifest = hsi::to_json(cfg);
    manifest["manifest_hash"] = hsi::manifest_hash(cfg);
    manifest["command"] = "simulate";
    manifest["target"] = {{"rows", inst.truth.rows()}, {"cols", inst.truth.cols()}, {"bands", inst.truth.bands()}};
    manifest["n_over_m"] = static_cast<double>(inst.phi.input_size()) / static_cast<double>(inst.phi.output_size());
    write_text(fs::path(out) / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "fpa " << inst.y.rows() << "x" << inst.y.cols() << ", truth " << inst.truth.shape_string()
              << ", N/M = " << manifest["n_over_m"].get<double>() << '\n';
    return 0;
  }
};

// ---------------------------------------------------------------- reconstruct

struct ReconstructCmd {
  std::string fpa, layout, method = "piht", out = "recon", schedule = "linear";
  int factor = 2, iterations = 200;
  double xmax = 0.0;
  std::size_t k0 = 0, kS = 0;
  CLI::App* app = nullptr;

  void add(CLI::App& root) {
    app = root.add_subcommand("reconstruct", "reconstruct a cube from an FPA image");
    app->add_option("--fpa", fpa, "FPA image (.hsc, one band)")->required();
    app->add_option("--layout", layout, "filter layout (.msk)")->required();
    app->add_option("-m,--method", method, "naive | interp3d | piht")->capture_default_str();
    app->add_option("-f,--factor", factor, "upscale factor f in {1,2,4}")->capture_default_str();
    app->add_option("--iterations", iterations, "PIHT iterations S (>= 1)")->capture_default_str();
    app->add_option("--xmax", xmax, "PIHT intensity bound (default max(y))");
    app->add_option("--k0", k0, "initial sparsity K^0 (default: heuristic)");
    app->add_option("--kS", kS, "final sparsity K^S (default: heuristic)");
    app->add_option("--schedule", schedule, "linear | geometric")->capture_default_str();
    app->add_option("-o,--out", out, "output directory")->capture_default_str();
  }

  int run() const {
    const hsi::Method m = hsi::parse_method(method);
    if (iterations < 1) throw hsi::ConfigError("--iterations must be >= 1");
    hsi::PihtConfig pc;
    pc.iterations = iterations;
    if (app->count("--xmax")) pc.x_max = xmax;
    if (app->count("--k0")) pc.k_initial = k0;
    if (app->count("--kS")) pc.k_final = kS;
    if (schedule == "linear") pc.shape = hsi::KScheduleShape::linear;
    else if (schedule == "geometric") pc.shape = hsi::KScheduleShape::geometric;
    else throw hsi::ConfigError("unknown K schedule '" + schedule + "'");

    const hsi::FpaImage y = hsi::read_fpa(fpa);
    hsi::FilterLayout lay = hsi::read_layout(layout);
    const hsi::SensingOperator phi(std::move(lay), factor);
    const hsi::MethodResult r = hsi::run_method(m, phi, y, pc);

    fs::create_directories(out);
    hsi::write_cube(r.estimate, (fs::path(out) / "result.hsc").string());
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.1f", r.seconds);
    if (r.report) {
      std::ostringstream csv;
      csv.precision(17);
      csv << "iteration,residual,tau,k\n";
      for (std::size_t s = 0; s < r.report->residuals.size(); ++s) {
        csv << s + 1 << ',' << r.report->residuals[s] << ',' << r.report->taus[s] << ',' << r.report->ks[s] << '\n';
      }
      write_text(fs::path(out) / "report.csv", csv.str());
    }
    nlohmann::json manifest = {{"command", "reconstruct"},
                               {"fpa", fpa},
                               {"layout", layout},
                               {"method", method},
                               {"factor", factor},
                               {"iterations", iterations},
                               {"schedule", schedule},
                               {"seconds", secs}};
    if (pc.x_max) manifest["x_max"] = *pc.x_max;
    if (pc.k_initial) manifest["k0"] = *pc.k_initial;
    if (pc.k_final) manifest["kS"] = *pc.k_final;
    if (r.report) {
      manifest["executed_iterations"] = r.report->iterations;
      manifest["converged"] = r.report->converged;
    }
    write_text(fs::path(out) / "manifest.json", manifest.dump(2) + "\n");
    std::cout << method << ": " << r.estimate.shape_string() << " in " << secs << " s";
    if (r.report) std::cout << ", " << r.report->iterations << " iterations";
    std::cout << '\n';
    return 0;
  }
};

// ---------------------------------------------------------------- evaluate

struct EvaluateCmd {
  std::string truth, estimate, out = "eval";
  std::vector<int> bands, rgb;
  CLI::App* app = nullptr;

  void add(CLI::App& root) {
    app = root.add_subcommand("evaluate", "compare an estimate with the ground truth");
    app->add_option("--truth", truth, "ground-truth cube (.hsc)")->required();
    app->add_option("--estimate", estimate, "estimated cube (.hsc)")->required();
    app->add_option("--bands", bands, "one-based bands to export as PNG")->delimiter(',');
    app->add_option("--rgb", rgb, "one-based red,green,blue bands for a false-RGB PNG")
        ->delimiter(',')
        ->expected(3);
    app->add_option("-o,--out", out, "output directory")->capture_default_str();
  }

  int run() const {
    const hsi::HyperCube t = hsi::read_cube(truth);
    const hsi::HyperCube e = hsi::read_cube(estimate);
    const double overall = hsi::snr_db(t, e);
    const std::vector<double> per_band = hsi::per_band_snr_db(t, e);
    const auto png_bands = one_based_bands(bands, t.bands());
    const auto rgb_bands = one_based_bands(rgb, t.bands());

    fs::create_directories(out);
    std::ostringstream csv;
    csv << "band,snr_db\n" << "overall," << fmt(overall) << '\n';
    for (std::size_t b = 0; b < per_band.size(); ++b) csv << b + 1 << ',' << fmt(per_band[b]) << '\n';
    write_text(fs::path(out) / "metrics.csv", csv.str());
    for (std::size_t b : png_bands) {
      hsi::export_band_png(e, b, (fs::path(out) / ("band" + std::to_string(b + 1) + ".png")).string());
    }
    if (rgb_bands.size() == 3) {
      hsi::export_false_rgb(e, {rgb_bands[0], rgb_bands[1], rgb_bands[2]}, (fs::path(out) / "rgb.png").string());
    }
    std::cout << "overall SNR " << fmt(overall) << " dB\n";
    return 0;
  }
};

// ---------------------------------------------------------------- sweep

struct SweepCmd {
  SceneOptions scene;
  std::vector<int> factors;
  std::vector<std::string> noise, methods;
  int jobs = 1;
  bool no_cubes = false;
  std::string out = "sweep";
  CLI::App* app = nullptr;

  void add(CLI::App& root) {
    app = root.add_subcommand("sweep", "run the methods x factors x noise grid");
    scene.add(app);
    app->add_option("--factors", factors, "upscale factors (default 2)")->delimiter(',');
    app->add_option("--noise", noise, "input SNRs in dB, 'none' for noiseless (default none)")->delimiter(',');
    app->add_option("--methods", methods, "subset of naive,interp3d,piht (default all)")->delimiter(',');
    app->add_option("-j,--jobs", jobs, "rows run concurrently")->capture_default_str();
    app->add_flag("--no-cubes", no_cubes, "skip writing per-row cubes");
    app->add_option("-o,--out", out, "output directory")->capture_default_str();
  }

  int run() const {
    hsi::ExperimentConfig cfg = scene.build();
    if (!factors.empty()) cfg.factors = factors;
    if (!noise.empty()) {
      cfg.noise_snr_db.clear();
      for (const auto& n : noise) cfg.noise_snr_db.push_back(parse_noise(n));
    }
    if (!methods.empty()) {
      cfg.methods.clear();
      for (const auto& m : methods) cfg.methods.push_back(hsi::parse_method(m));
    }
    cfg.jobs = jobs;
    cfg.output_dir = out;
    cfg.save_cubes = !no_cubes;
    cfg.validate();
    const std::vector<hsi::SweepRow> rows = hsi::run_sweep_to_disk(cfg);
    std::cout << hsi::sweep_table_csv(cfg, rows);
    int code = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].ok) continue;
      std::cerr << "row " << i << " failed (" << rows[i].error_kind << "): " << rows[i].error << '\n';
      if (code == 0) {
        code = rows[i].error_kind == "config" ? kExitUsage
               : rows[i].error_kind == "numerical" ? kExitNumerical
                                                   : kExitData;
      }
    }
    return code;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App root{"Snapshot hyperspectral mosaic simulation and PIHT reconstruction"};
  root.require_subcommand(1);
  LayoutCmd layout;
  SimulateCmd simulate;
  ReconstructCmd reconstruct;
  EvaluateCmd evaluate;
  SweepCmd sweep;
  layout.add(root);
  simulate.add(root);
  reconstruct.add(root);
  evaluate.add(root);
  sweep.add(root);

  try {
    root.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = root.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (layout.app->parsed()) return layout.run();
    if (simulate.app->parsed()) return simulate.run();
    if (reconstruct.app->parsed()) return reconstruct.run();
    if (evaluate.app->parsed()) return evaluate.run();
    if (sweep.app->parsed()) return sweep.run();
  } catch (const hsi::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const hsi::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
