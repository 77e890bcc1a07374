#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "demonscatter/coupled_solver.hpp"
#include "demonscatter/demon.hpp"
#include "demonscatter/effective_kernel.hpp"
#include "demonscatter/errors.hpp"
#include "demonscatter/io.hpp"
#include "demonscatter/nonlocal_solver.hpp"
#include "demonscatter/optimizer.hpp"
#include "demonscatter/symmetry.hpp"

namespace ds = demonscatter;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitCompute = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags collected for every subcommand; only the ones given on the command
// line are merged over the config file.
struct Flags {
  std::string config;
  std::optional<std::string> model, kernel, output, report, log, target, solver, format;
  std::optional<double> velocity, energy, rel_tol, b, c, x0, w, delta, gamma;
  std::optional<std::size_t> n, channel, resolution, budget, restarts;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<double>> velocities;
  bool extrapolate = false;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file");
  sub->add_option("--model", f.model, "local potential model JSON");
  sub->add_option("--kernel", f.kernel, "kernel file (.json or .csv with x,y,re,im)");
  sub->add_option("-o,--output", f.output, "primary output path ('-' for stdout)");
  sub->add_option("--report", f.report, "report CSV path");
  sub->add_option("--log", f.log, "optimizer evaluation log CSV");
  sub->add_option("--target", f.target, "device target: half-demon, T/A, A/R");
  sub->add_option("--solver", f.solver, "coupled or nonlocal");
  sub->add_option("--format", f.format, "kernel output: polar, cartesian, json");
  sub->add_option("-v,--velocity", f.velocity, "incident velocity (v_d)");
  sub->add_option("--energy", f.energy, "total energy");
  sub->add_option("--rel-tol", f.rel_tol, "symmetry relative tolerance");
  sub->add_option("--b", f.b, "Rabi amplitude of the -i lobe (1/tau)");
  sub->add_option("--c", f.c, "Rabi amplitude of the real lobe (1/tau)");
  sub->add_option("--x0", f.x0, "lobe offset (d)");
  sub->add_option("--w", f.w, "Gaussian lobe width (d)");
  sub->add_option("--delta", f.delta, "detuning (1/tau)");
  sub->add_option("--gamma", f.gamma, "excited-state decay rate (1/tau)");
  sub->add_option("-n,--points", f.n, "grid points");
  sub->add_option("--channel", f.channel, "selected channel index");
  sub->add_option("--resolution", f.resolution, "points per axis");
  sub->add_option("--budget", f.budget, "evaluation budget");
  sub->add_option("--restarts", f.restarts, "optimizer restarts");
  sub->add_option("--seed", f.seed, "RNG seed");
  sub->add_option("--velocities", f.velocities, "velocity list");
  sub->add_flag("--extrapolate", f.extrapolate, "Richardson-extrapolate the nonlocal solve");
}

json load_config(const Flags& f) {
  json cfg = json::object();
  if (!f.config.empty()) {
    try {
      cfg = ds::io::read_json_file(f.config);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  }
  auto set = [&](const char* key, const auto& opt) {
    if (opt) cfg[key] = *opt;
  };
  auto set_nested = [&](const char* outer, const char* key, const auto& opt) {
    if (!opt) return;
    if (!cfg.contains(outer)) cfg[outer] = json::object();
    cfg[outer][key] = *opt;
  };
  set("model", f.model);
  set("kernel", f.kernel);
  set("output", f.output);
  set("report", f.report);
  set("log", f.log);
  set("target", f.target);
  set("solver", f.solver);
  set("format", f.format);
  set("velocity", f.velocity);
  set("energy", f.energy);
  set("rel_tol", f.rel_tol);
  set("channel", f.channel);
  set("resolution", f.resolution);
  set("budget", f.budget);
  set("restarts", f.restarts);
  set("seed", f.seed);
  set("velocities", f.velocities);
  if (f.extrapolate) cfg["extrapolate"] = true;
  set_nested("optical", "b", f.b);
  set_nested("optical", "c", f.c);
  set_nested("optical", "x0", f.x0);
  set_nested("optical", "w", f.w);
  set_nested("optical", "delta", f.delta);
  set_nested("optical", "gamma", f.gamma);
  set_nested("grid", "n", f.n);
  return cfg;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T value_or(const json& cfg, const char* key, T fallback) {
  if (!cfg.contains(key)) return fallback;
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

ds::Grid read_grid(const json& cfg) {
  const json g = cfg.value("grid", json::object());
  check_keys(g, {"xmin", "xmax", "n"}, "grid");
  try {
    return ds::make_grid(value_or(g, "xmin", -1.5), value_or(g, "xmax", 1.5),
                         value_or<std::size_t>(g, "n", ds::kDefaultGridPoints));
  } catch (const ds::Error& e) {
    throw ConfigError(e.what());
  }
}

// Missing optical fields fall back to the reference half-demon design point.
ds::OpticalParameters read_optical(const json& cfg, double energy) {
  const json o = cfg.value("optical", json::object());
  check_keys(o, {"b", "c", "x0", "w", "delta", "gamma"}, "optical");
  ds::OpticalParameters p;
  p.profile = ds::reference_profile();
  p.profile.b = value_or(o, "b", p.profile.b);
  p.profile.c = value_or(o, "c", p.profile.c);
  p.profile.x0 = value_or(o, "x0", p.profile.x0);
  p.profile.w = value_or(o, "w", p.profile.w);
  p.delta = value_or(o, "delta", ds::kReferenceDetuning);
  p.gamma = value_or(o, "gamma", 0.0);
  p.energy = energy;
  if (!(p.profile.w > 0)) throw ConfigError("optical.w must be positive");
  if (p.gamma < 0) throw ConfigError("optical.gamma must be non-negative");
  return p;
}

// Velocity and energy of the ground channel; velocity wins when both given.
std::pair<double, double> read_velocity(const json& cfg) {
  if (cfg.contains("velocity") && cfg.contains("energy")) throw ConfigError("give velocity or energy, not both");
  if (cfg.contains("energy")) {
    const double E = value_or(cfg, "energy", 0.0);
    if (!(E > 0)) throw ConfigError("energy must be positive");
    return {std::sqrt(2.0 * E), E};
  }
  const double v = value_or(cfg, "velocity", ds::kReferenceVelocity);
  try {
    return {v, ds::velocity_to_energy(v)};
  } catch (const ds::Error& e) {
    throw ConfigError(e.what());
  }
}

ds::LocalPotentialModel read_model_file(const std::string& path) {
  try {
    return ds::io::model_from_json(ds::io::read_json_file(path));
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

ds::NonlocalKernel read_kernel_file(const std::string& path) {
  try {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
      std::ifstream in(path);
      if (!in) throw ds::Error(ds::ErrorCode::Parse, "cannot open '" + path + "'");
      return ds::io::kernel_from_csv(in);
    }
    return ds::io::kernel_from_json(ds::io::read_json_file(path));
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  try {
    ds::io::write_text_file(path, text);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string sweep_csv(const std::vector<ds::DemonReport>& rows) {
  std::ostringstream os;
  ds::io::write_sweep_csv(os, rows);
  return os.str();
}

std::vector<double> read_velocities(const json& cfg) {
  if (!cfg.contains("velocities")) throw ConfigError("sweep needs 'velocities'");
  const json& v = cfg.at("velocities");
  std::vector<double> out;
  if (v.is_array()) {
    out = value_or<std::vector<double>>(cfg, "velocities", {});
  } else if (v.is_object()) {
    check_keys(v, {"min", "max", "count"}, "velocities");
    const double lo = value_or(v, "min", 0.0), hi = value_or(v, "max", 0.0);
    const auto count = value_or<std::size_t>(v, "count", 0);
    if (count < 1 || (count > 1 && !(hi > lo))) throw ConfigError("velocities range needs min < max and count >= 1");
    for (std::size_t i = 0; i < count; ++i)
      out.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  } else {
    throw ConfigError("velocities must be a list or {min, max, count}");
  }
  if (out.empty()) throw ConfigError("velocities is empty");
  for (double x : out)
    if (!(x > 0)) throw ConfigError("velocities must be positive");
  return out;
}

// ---- subcommands -------------------------------------------------------

int cmd_scatter(const json& cfg) {
  check_keys(cfg, {"model", "optical", "grid", "velocity", "energy", "channel", "output", "report"}, "scatter config");
  const auto [v, E] = read_velocity(cfg);
  const auto i0 = value_or<std::size_t>(cfg, "channel", 0);
  ds::LocalPotentialModel model;
  if (cfg.contains("model")) {
    if (cfg.contains("optical")) throw ConfigError("give model or optical, not both");
    model = read_model_file(value_or<std::string>(cfg, "model", ""));
  } else {
    const auto p = read_optical(cfg, E);
    model = ds::build_two_level_model(p.profile, p.delta, p.gamma, read_grid(cfg));
  }

  const ds::ScatterSolution sol = ds::solve_local(model, E);
  if (i0 >= sol.S.n_open()) throw ds::Error(ds::ErrorCode::IndexOutOfRange, "channel index is not an open channel");
  if (sol.diagnostics.resolution_warning)
    std::cerr << "warning: fewer than " << ds::kMinPointsPerWavelength << " points per wavelength\n";
  const ds::DemonReport rep = ds::make_report(ds::extract_channel(sol.S, i0), v);
  emit(value_or<std::string>(cfg, "output", "-"), dump(ds::io::to_json(sol)));
  emit(value_or<std::string>(cfg, "report", "-"), sweep_csv({rep}));
  return 0;
}

ds::NonlocalKernel kernel_from_config(const json& cfg, double E) {
  if (cfg.contains("kernel")) {
    if (cfg.contains("optical")) throw ConfigError("give kernel or optical, not both");
    return read_kernel_file(value_or<std::string>(cfg, "kernel", ""));
  }
  const auto p = read_optical(cfg, E);
  return ds::build_kernel(p, read_grid(cfg));
}

int cmd_scatter_nonlocal(const json& cfg) {
  check_keys(cfg, {"kernel", "optical", "grid", "velocity", "energy", "extrapolate", "output", "report"},
             "scatter-nonlocal config");
  const auto [v, E] = read_velocity(cfg);
  const bool extrapolate = value_or(cfg, "extrapolate", false);
  const ds::NonlocalKernel kernel = kernel_from_config(cfg, E);
  ds::ChannelAmplitudes a;
  if (extrapolate) {
    if (!kernel.descriptor) throw ConfigError("extrapolate needs an optical kernel");
    a = ds::solve_nonlocal_extrapolated([&](const ds::Grid& g) { return ds::regenerate(kernel, g); }, kernel.grid, v);
  } else {
    a = ds::solve_nonlocal(kernel, v);
  }
  const ds::DemonReport rep = ds::make_report(a, v);
  const json out = {{"velocity", v},
                    {"amplitudes",
                     {{"T", {a.T.real(), a.T.imag()}},
                      {"R", {a.R.real(), a.R.imag()}},
                      {"Tt", {a.Tt.real(), a.Tt.imag()}},
                      {"Rt", {a.Rt.real(), a.Rt.imag()}}}},
                    {"D", rep.D},
                    {"code", rep.code}};
  emit(value_or<std::string>(cfg, "output", "-"), dump(out));
  emit(value_or<std::string>(cfg, "report", "-"), sweep_csv({rep}));
  return 0;
}

int cmd_kernel(const json& cfg) {
  check_keys(cfg, {"optical", "grid", "velocity", "energy", "format", "output"}, "kernel config");
  const auto E = read_velocity(cfg).second;
  const auto format = value_or<std::string>(cfg, "format", "polar");
  if (format != "polar" && format != "cartesian" && format != "json")
    throw ConfigError("format must be polar, cartesian or json");
  const auto p = read_optical(cfg, E);
  const ds::Grid grid = read_grid(cfg);
  const ds::NonlocalKernel kernel = ds::build_kernel(p, grid);
  std::ostringstream os;
  if (format == "polar")
    ds::io::write_kernel_polar_csv(os, kernel);
  else if (format == "cartesian")
    ds::io::write_kernel_csv(os, kernel);
  else
    os << ds::io::to_json(kernel).dump() << '\n';
  emit(value_or<std::string>(cfg, "output", "-"), os.str());
  return 0;
}

int cmd_regions(const json& cfg) {
  check_keys(cfg, {"resolution", "output"}, "regions config");
  const auto res = value_or<std::size_t>(cfg, "resolution", 101);
  if (res < 2) throw ConfigError("resolution must be >= 2");
  std::ostringstream os;
  ds::io::write_regions_csv(os, res);
  emit(value_or<std::string>(cfg, "output", "-"), os.str());
  return 0;
}

int cmd_classify(const json& cfg) {
  check_keys(cfg, {"kernel", "optical", "grid", "velocity", "energy", "rel_tol", "output"}, "classify config");
  const auto [v, E] = read_velocity(cfg);
  const double tol = value_or(cfg, "rel_tol", ds::kSymmetryRelativeTolerance);
  if (!(tol > 0)) throw ConfigError("rel_tol must be positive");
  const ds::NonlocalKernel kernel = kernel_from_config(cfg, E);
  json out;
  if (cfg.contains("velocity") || cfg.contains("energy"))
    out = ds::io::to_json(ds::verify_predictions(kernel, v, tol));
  else
    out = ds::io::to_json(ds::classify(kernel, tol));
  out["summary"] = out.at("trivial_only").get<bool>() ? "Trivial only" : "nontrivial symmetry";
  emit(value_or<std::string>(cfg, "output", "-"), dump(out));
  return 0;
}

int cmd_sweep(const json& cfg) {
  check_keys(cfg, {"model", "kernel", "optical", "grid", "velocities", "solver", "channel", "output"}, "sweep config");
  const auto velocities = read_velocities(cfg);
  const auto solver = value_or<std::string>(cfg, "solver", cfg.contains("kernel") ? "nonlocal" : "coupled");
  if (solver != "coupled" && solver != "nonlocal") throw ConfigError("solver must be coupled or nonlocal");
  const auto i0 = value_or<std::size_t>(cfg, "channel", 0);
  std::vector<ds::DemonReport> rows;
  if (solver == "coupled") {
    if (cfg.contains("kernel")) throw ConfigError("the coupled solver takes a model, not a kernel");
    ds::LocalPotentialModel model;
    if (cfg.contains("model")) {
      if (cfg.contains("optical")) throw ConfigError("give model or optical, not both");
      model = read_model_file(value_or<std::string>(cfg, "model", ""));
    } else {
      const auto p = read_optical(cfg, ds::kReferenceVelocity * ds::kReferenceVelocity / 2);
      model = ds::build_two_level_model(p.profile, p.delta, p.gamma, read_grid(cfg));
    }
    rows = ds::sweep_demon(model, velocities, i0);
  } else {
    if (cfg.contains("model")) throw ConfigError("the nonlocal solver takes a kernel, not a model");
    if (i0 != 0) throw ConfigError("nonlocal kernels have a single channel");
    rows = ds::sweep_demon(kernel_from_config(cfg, velocities.front() * velocities.front() / 2), velocities);
  }
  emit(value_or<std::string>(cfg, "output", "-"), sweep_csv(rows));
  return 0;
}

ds::DesignParameters read_design(const json& j, const char* where) {
  check_keys(j, {"b", "c", "x0", "delta"}, where);
  ds::DesignParameters p;
  p.b = value_or(j, "b", 0.0);
  p.c = value_or(j, "c", 0.0);
  p.x0 = value_or(j, "x0", 0.0);
  p.delta = value_or(j, "delta", 0.0);
  return p;
}

void emit_optimization(const json& cfg, const ds::OptimizationResult& r) {
  emit(value_or<std::string>(cfg, "output", "-"), dump(ds::io::to_json(r)));
  if (cfg.contains("log")) {
    std::ostringstream os;
    ds::io::write_optimization_log_csv(os, r);
    emit(value_or<std::string>(cfg, "log", ""), os.str());
  }
}

int cmd_optimize(const json& cfg) {
  check_keys(cfg,
             {"target", "velocity", "w", "seed", "budget", "restarts", "grid", "init", "box", "step", "presample", "output", "log"},
             "optimize config");
  ds::DeviceTarget target;
  try {
    target = ds::DeviceTarget::named(value_or<std::string>(cfg, "target", "half-demon"));
  } catch (const ds::Error& e) {
    throw ConfigError(e.what());
  }
  const double v0 = value_or(cfg, "velocity", ds::kReferenceVelocity);
  if (!(v0 > 0)) throw ConfigError("velocity must be positive");
  const double w = value_or(cfg, "w", ds::reference_profile().w);
  if (!(w > 0)) throw ConfigError("w must be positive");
  ds::OptimizerOptions opt;
  opt.seed = value_or<std::uint64_t>(cfg, "seed", opt.seed);
  opt.budget = value_or<std::size_t>(cfg, "budget", opt.budget);
  opt.restarts = value_or<std::size_t>(cfg, "restarts", opt.restarts);
  opt.initial_step = value_or(cfg, "step", opt.initial_step);
  opt.presample = value_or<std::size_t>(cfg, "presample", opt.presample);
  if (cfg.contains("grid")) {
    check_keys(cfg.at("grid"), {"n"}, "grid");
    opt.grid_points = value_or<std::size_t>(cfg.at("grid"), "n", opt.grid_points);
  }
  if (cfg.contains("init")) opt.init = read_design(cfg.at("init"), "init");
  if (cfg.contains("box")) {
    const json& b = cfg.at("box");
    check_keys(b, {"lower", "upper"}, "box");
    ds::DesignParameters lo = read_design(b.value("lower", json::object()), "box.lower");
    ds::DesignParameters hi = read_design(b.value("upper", json::object()), "box.upper");
    if (b.contains("lower")) opt.box.lower = lo.as_array();
    if (b.contains("upper")) opt.box.upper = hi.as_array();
  }
  if (opt.budget < 100) throw ConfigError("budget must be >= 100");
  if (opt.restarts < 1) throw ConfigError("restarts must be >= 1");
  for (int i = 0; i < 4; ++i)
    if (!(opt.box.lower[i] < opt.box.upper[i])) throw ConfigError("box lower must be below upper");
  emit_optimization(cfg, ds::optimize(target, v0, w, opt));
  return 0;
}

int cmd_refine_reference(const json& cfg) {
  check_keys(cfg, {"velocity", "budget", "output", "log"}, "refine-paper config");
  const double v0 = value_or(cfg, "velocity", ds::kReferenceVelocity);
  if (!(v0 > 0)) throw ConfigError("velocity must be positive");
  emit_optimization(cfg, ds::refine_reference_point(v0, value_or<std::size_t>(cfg, "budget", 600)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"demonscatter: 1D multichannel scattering and asymmetric-device design"};
  app.require_subcommand(1);

  struct Entry {
    const char* name;
    const char* help;
    int (*run)(const json&);
    Flags flags;
    CLI::App* sub = nullptr;
  };
  std::vector<Entry> entries = {
      {"scatter", "coupled-channel S-matrix and demon report", cmd_scatter, {}},
      {"scatter-nonlocal", "single-channel amplitudes of a nonlocal kernel", cmd_scatter_nonlocal, {}},
      {"kernel", "export the effective optical kernel", cmd_kernel, {}},
      {"regions", "D = 0 region data over the (|T|^2, |Rt|^2) triangle", cmd_regions, {}},
      {"classify", "kernel symmetry classes and predicted relations", cmd_classify, {}},
      {"sweep", "demon reports over a velocity list", cmd_sweep, {}},
      {"optimize", "design a device by Nelder-Mead with restarts", cmd_optimize, {}},
      {"refine-paper", "polish the reference half-demon design point", cmd_refine_reference, {}},
  };
  for (auto& e : entries) {
    e.sub = app.add_subcommand(e.name, e.help);
    add_flags(e.sub, e.flags);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  for (auto& e : entries) {
    if (!e.sub->parsed()) continue;
    try {
      return e.run(load_config(e.flags));
    } catch (const ConfigError& err) {
      std::cerr << "config error: " << err.what() << '\n';
      return kExitConfig;
    } catch (const ds::Error& err) {
      std::cerr << "error: " << err.what() << '\n';
      return kExitCompute;
    } catch (const std::exception& err) {
      std::cerr << "error: " << err.what() << '\n';
      return kExitCompute;
    }
  }
  return kExitConfig;
}
