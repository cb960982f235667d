#pragma once

#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hsi/baselines.hpp"
#include "hsi/dictionary.hpp"
#include "hsi/io.hpp"
#include "hsi/metrics.hpp"
#include "hsi/piht.hpp"
#include "hsi/simulator.hpp"

namespace hsi {

enum class Method { naive, interp3d, piht };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::naive: return "naive";
    case Method::interp3d: return "interp3d";
    case Method::piht: return "piht";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "naive") return Method::naive;
  if (s == "interp3d") return Method::interp3d;
  if (s == "piht") return Method::piht;
  throw ConfigError("unknown method '" + s + "' (expected naive, interp3d or piht)");
}

/// Everything needed to replay a simulation or a sweep. The FPA grid is fixed by the
/// layout; the ground truth lives on the FPA grid divided by each upscale factor.
struct ExperimentConfig {
  std::optional<std::string> scene_path;
  PhantomSpec phantom;
  LayoutSpec layout;
  std::vector<int> factors{2};
  std::vector<std::optional<double>> noise_snr_db{std::nullopt};
  std::vector<Method> methods{Method::naive, Method::interp3d, Method::piht};
  int iterations = 200;
  std::optional<double> x_max;
  KScheduleShape shape = KScheduleShape::linear;
  std::uint64_t seed = 0;
  // Execution settings; not part of the manifest hash.
  std::string output_dir = ".";
  int jobs = 1;
  bool save_cubes = true;

  void validate() const {
    if (methods.empty()) throw ConfigError("experiment: at least one method is required");
    if (factors.empty()) throw ConfigError("experiment: at least one upscale factor is required");
    for (int f : factors) {
      if (f != 1 && f != 2 && f != 4) throw ConfigError("experiment: factor must be 1, 2 or 4");
    }
    if (noise_snr_db.empty()) throw ConfigError("experiment: noise list must not be empty (use null for noiseless)");
    if (iterations < 1) throw ConfigError("experiment: iterations must be >= 1");
    if (jobs < 1) throw ConfigError("experiment: jobs must be >= 1");
  }
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  if (c.scene_path) j["scene"] = *c.scene_path;
  j["phantom"] = {{"blobs", c.phantom.blobs},
                  {"spectral_atoms", c.phantom.spectral_atoms},
                  {"smoothness", c.phantom.smoothness},
                  {"x_max", c.phantom.x_max}};
  j["layout"] = {{"kind", to_string(c.layout.kind)},
                 {"rows", c.layout.rows},
                 {"cols", c.layout.cols},
                 {"bands", c.layout.bands},
                 {"edge", c.layout.edge}};
  j["factors"] = c.factors;
  nlohmann::json noise = nlohmann::json::array();
  for (const auto& n : c.noise_snr_db) noise.push_back(n ? nlohmann::json(*n) : nlohmann::json(nullptr));
  j["noise_snr_db"] = noise;
  nlohmann::json methods = nlohmann::json::array();
  for (Method m : c.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  j["piht"] = {{"iterations", c.iterations},
               {"schedule", c.shape == KScheduleShape::linear ? "linear" : "geometric"},
               {"x_max", c.x_max ? nlohmann::json(*c.x_max) : nlohmann::json(nullptr)}};
  j["seed"] = c.seed;
  return j;
}

/// Reads a config/manifest; absent keys keep the values already in `base`.
inline ExperimentConfig experiment_from_json(const nlohmann::json& j, ExperimentConfig base = {}) {
  try {
    if (j.contains("scene") && !j["scene"].is_null()) base.scene_path = j["scene"].get<std::string>();
    if (j.contains("phantom")) {
      const auto& p = j["phantom"];
      base.phantom.blobs = p.value("blobs", base.phantom.blobs);
      base.phantom.spectral_atoms = p.value("spectral_atoms", base.phantom.spectral_atoms);
      base.phantom.smoothness = p.value("smoothness", base.phantom.smoothness);
      base.phantom.x_max = p.value("x_max", base.phantom.x_max);
    }
    if (j.contains("layout")) {
      const auto& l = j["layout"];
      if (l.contains("kind")) base.layout.kind = parse_layout_kind(l["kind"].get<std::string>());
      base.layout.rows = l.value("rows", base.layout.rows);
      base.layout.cols = l.value("cols", base.layout.cols);
      base.layout.bands = l.value("bands", base.layout.bands);
      base.layout.edge = l.value("edge", base.layout.edge);
    }
    if (j.contains("factors")) base.factors = j["factors"].get<std::vector<int>>();
    if (j.contains("noise_snr_db")) {
      base.noise_snr_db.clear();
      for (const auto& n : j["noise_snr_db"]) {
        base.noise_snr_db.push_back(n.is_null() ? std::nullopt : std::optional<double>(n.get<double>()));
      }
    }
    if (j.contains("methods")) {
      base.methods.clear();
      for (const auto& m : j["methods"]) base.methods.push_back(parse_method(m.get<std::string>()));
    }
    if (j.contains("piht")) {
      const auto& p = j["piht"];
      base.iterations = p.value("iterations", base.iterations);
      if (p.contains("schedule")) {
        const auto s = p["schedule"].get<std::string>();
        if (s == "linear") base.shape = KScheduleShape::linear;
        else if (s == "geometric") base.shape = KScheduleShape::geometric;
        else throw ConfigError("unknown K schedule '" + s + "'");
      }
      if (p.contains("x_max")) {
        base.x_max = p["x_max"].is_null() ? std::nullopt : std::optional<double>(p["x_max"].get<double>());
      }
    }
    base.seed = j.value("seed", base.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  return base;
}

inline std::string manifest_hash(const ExperimentConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(to_json(c).dump()));
  return buf;
}

/// Ground truth, operator and measurement for one (factor, noise) cell of the grid.
struct Instance {
  HyperCube truth;
  SensingOperator phi;
  FpaImage y;
};

inline Instance make_instance(const ExperimentConfig& cfg, int factor, std::optional<double> noise_snr_db) {
  LayoutSpec ls = cfg.layout;
  ls.seed = cfg.seed;
  HyperCube truth;
  if (cfg.scene_path) {
    HyperCube scene = read_cube(*cfg.scene_path);
    ls.rows = scene.rows();
    ls.cols = scene.cols();
    ls.bands = scene.bands();
    const auto f = static_cast<std::size_t>(factor);
    if (scene.rows() % f || scene.cols() % f) {
      throw ConfigError("scene " + scene.shape_string() + " not divisible by factor " + std::to_string(factor));
    }
    const Upsampler up(UpsampleSpec{scene.rows() / f, scene.cols() / f, factor, 3});
    truth = factor == 1 ? std::move(scene) : Downsizer(up).apply(scene);
  } else {
    if (ls.rows % static_cast<std::size_t>(factor) || ls.cols % static_cast<std::size_t>(factor)) {
      throw ConfigError("FPA not divisible by factor " + std::to_string(factor));
    }
    PhantomSpec ps = cfg.phantom;
    ps.rows = ls.rows / static_cast<std::size_t>(factor);
    ps.cols = ls.cols / static_cast<std::size_t>(factor);
    ps.bands = ls.bands;
    ps.seed = cfg.seed;
    truth = make_phantom(ps);
  }
  SensingOperator phi(make_layout(ls), factor);
  FpaImage y = acquire(phi, truth, noise_snr_db, cfg.seed);
  return Instance{std::move(truth), std::move(phi), std::move(y)};
}

struct MethodResult {
  HyperCube estimate;
  std::optional<ReconstructionReport> report;
  double seconds = 0.0;
};

/// Runs one reconstruction method; every estimate is returned on the target grid.
inline MethodResult run_method(Method m, const SensingOperator& phi, const FpaImage& y, const PihtConfig& cfg = {}) {
  const auto start = std::chrono::steady_clock::now();
  MethodResult r;
  switch (m) {
    case Method::naive: {
      HyperCube full = naive_demosaic(y, phi.layout());
      r.estimate = phi.factor() == 1 ? std::move(full) : Downsizer(phi.upsampler()).apply(full);
      break;
    }
    case Method::interp3d:
      r.estimate = interp3d_init(y, phi.layout(), phi.target_rows(), phi.target_cols());
      break;
    case Method::piht: {
      const HyperCube x0 = interp3d_init(y, phi.layout(), phi.target_rows(), phi.target_cols());
      const AnalysisDictionary dict(phi.target_rows(), phi.target_cols(), phi.bands());
      r.report = piht(phi, dict, y, x0, cfg);
      r.estimate = r.report->cube;
      break;
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

struct SweepRow {
  Method method = Method::naive;
  int factor = 1;
  double n_over_m = 0.0;
  std::optional<double> noise_snr_db;
  double recon_snr_db = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  double seconds = 0.0;
  bool ok = false;
  std::string error;
  std::string error_kind;  // "config", "data" or "numerical" when !ok
  std::string cube_file;
};

inline std::string format_snr(std::optional<double> v) {
  if (!v) return "inf";
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(6);
  s << *v;
  return s.str();
}

inline std::string format_db(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return format_snr(v);
}

/// Runs the factor x noise x method grid (method varies fastest). Rows execute on up to
/// cfg.jobs threads; row order and contents do not depend on the thread count.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, std::vector<HyperCube>* estimates = nullptr) {
  cfg.validate();
  struct Cell {
    int factor;
    std::optional<double> noise;
    Method method;
  };
  std::vector<Cell> cells;
  for (int f : cfg.factors)
    for (const auto& n : cfg.noise_snr_db)
      for (Method m : cfg.methods) cells.push_back({f, n, m});

  std::vector<SweepRow> rows(cells.size());
  if (estimates) estimates->assign(cells.size(), HyperCube());
  PihtConfig pc;
  pc.iterations = cfg.iterations;
  pc.x_max = cfg.x_max;
  pc.shape = cfg.shape;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& c = cells[i];
      SweepRow& row = rows[i];
      row.method = c.method;
      row.factor = c.factor;
      row.noise_snr_db = c.noise;
      try {
        const Instance inst = make_instance(cfg, c.factor, c.noise);
        row.n_over_m = static_cast<double>(inst.phi.input_size()) / static_cast<double>(inst.phi.output_size());
        MethodResult r = run_method(c.method, inst.phi, inst.y, pc);
        row.recon_snr_db = snr_db(inst.truth, r.estimate);
        row.iterations = r.report ? r.report->iterations : 0;
        row.seconds = r.seconds;
        row.ok = true;
        if (estimates) (*estimates)[i] = std::move(r.estimate);
      } catch (const ConfigError& e) {
        row.error = e.what();
        row.error_kind = "config";
      } catch (const NumericalError& e) {
        row.error = e.what();
        row.error_kind = "numerical";
      } catch (const std::exception& e) {
        row.error = e.what();
        row.error_kind = "data";
      }
    }
  };
  const int n = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

/// Deterministic results table (no timings).
inline std::string sweep_table_csv(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows) {
  const std::string hash = manifest_hash(cfg);
  std::ostringstream out;
  out << "row,method,layout,factor,n_over_m,input_snr_db,recon_snr_db,iterations,status,manifest_hash\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& r = rows[i];
    std::ostringstream nm;
    nm.setf(std::ios::fixed);
    nm.precision(4);
    nm << r.n_over_m;
    out << i << ',' << to_string(r.method) << ',' << to_string(cfg.layout.kind) << ',' << r.factor << ','
        << nm.str() << ',' << format_snr(r.noise_snr_db) << ',' << format_db(r.recon_snr_db) << ','
        << r.iterations << ',' << (r.ok ? "ok" : "failed") << ',' << hash << '\n';
  }
  return out.str();
}

/// Wall-clock seconds per row, one decimal.
inline std::string sweep_timing_csv(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "row,method,factor,input_snr_db,seconds,manifest_hash\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    char t[32];
    std::snprintf(t, sizeof t, "%.1f", rows[i].seconds);
    out << i << ',' << to_string(rows[i].method) << ',' << rows[i].factor << ','
        << format_snr(rows[i].noise_snr_db) << ',' << t << ',' << manifest_hash(cfg) << '\n';
  }
  return out.str();
}

inline std::string cube_file_name(std::size_t index, const SweepRow& r) {
  std::string noise = r.noise_snr_db ? format_snr(r.noise_snr_db) : "clean";
  return "row" + std::to_string(index) + "_" + to_string(r.method) + "_f" + std::to_string(r.factor) + "_" +
         noise + ".hsc";
}

/// Runs the sweep and writes manifest.json, table.csv, timing.csv and (optionally) one
/// cube per row under cfg.output_dir. Returns the rows.
inline std::vector<SweepRow> run_sweep_to_disk(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  std::vector<HyperCube> cubes;
  std::vector<SweepRow> rows = run_sweep(cfg, cfg.save_cubes ? &cubes : nullptr);
  nlohmann::json manifest = to_json(cfg);
  manifest["manifest_hash"] = manifest_hash(cfg);
  {
    std::ofstream m(fs::path(cfg.output_dir) / "manifest.json");
    m << manifest.dump(2) << '\n';
  }
  detail::write_file((fs::path(cfg.output_dir) / "table.csv").string(), sweep_table_csv(cfg, rows));
  detail::write_file((fs::path(cfg.output_dir) / "timing.csv").string(), sweep_timing_csv(cfg, rows));
  if (cfg.save_cubes) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i].ok) continue;
      rows[i].cube_file = cube_file_name(i, rows[i]);
      write_cube(cubes[i], (fs::path(cfg.output_dir) / rows[i].cube_file).string());
    }
  }
  return rows;
}

}  // namespace hsi
