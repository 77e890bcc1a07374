#include "demonscatter/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "demonscatter/errors.hpp"

namespace demonscatter::io {

using Eigen::Index;
using Eigen::MatrixXcd;

namespace {

cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorCode::Parse, "complex values must be [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

void require_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) throw Error(ErrorCode::Parse, std::string(what) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw Error(ErrorCode::Parse, std::string("unknown key '") + key + "' in " + what);
  }
}

template <typename T>
T get_required(const json& j, const char* key, const char* what) {
  if (!j.contains(key)) throw Error(ErrorCode::Parse, std::string("missing '") + key + "' in " + what);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("bad '") + key + "' in " + what + ": " + e.what());
  }
}

json grid_to_json(const Grid& g) { return {{"xmin", g.x_min()}, {"xmax", g.x_max()}, {"n", g.size()}}; }

Grid grid_from_json(const json& j) {
  require_keys(j, {"xmin", "xmax", "n"}, "grid");
  return Grid(get_required<double>(j, "xmin", "grid"), get_required<double>(j, "xmax", "grid"),
              get_required<std::size_t>(j, "n", "grid"));
}

}  // namespace

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json complex_matrix_to_json(const MatrixXcd& m) {
  json arr = json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) arr.push_back({m(i, j).real(), m(i, j).imag()});
  return arr;
}

MatrixXcd complex_matrix_from_json(const json& j, Index rows, Index cols) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows * cols)
    throw Error(ErrorCode::Parse, "matrix has wrong number of entries");
  MatrixXcd m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index c = 0; c < cols; ++c) m(i, c) = complex_from_json(j[static_cast<std::size_t>(i * cols + c)]);
  return m;
}

json to_json(const SMatrix& S) {
  return {{"n_open", S.n_open()},
          {"blocks",
           {{"T", complex_matrix_to_json(S.T())},
            {"R", complex_matrix_to_json(S.R())},
            {"Rt", complex_matrix_to_json(S.Rt())},
            {"Tt", complex_matrix_to_json(S.Tt())}}}};
}

SMatrix smatrix_from_json(const json& j) {
  require_keys(j, {"n_open", "blocks"}, "S-matrix");
  const auto n = static_cast<Index>(get_required<std::size_t>(j, "n_open", "S-matrix"));
  if (!j.contains("blocks")) throw Error(ErrorCode::Parse, "S-matrix: missing key blocks");
  const json& b = j.at("blocks");
  require_keys(b, {"T", "R", "Rt", "Tt"}, "S-matrix blocks");
  auto block = [&](const char* name) {
    if (!b.contains(name)) throw Error(ErrorCode::Parse, std::string("missing block ") + name);
    return complex_matrix_from_json(b.at(name), n, n);
  };
  return SMatrix(block("T"), block("R"), block("Tt"), block("Rt"));
}

json to_json(const LocalPotentialModel& m) {
  json v = json::array();
  for (const auto& mat : m.V) v.push_back(complex_matrix_to_json(mat));
  json out = {{"grid", grid_to_json(m.grid)}, {"thresholds", m.channels.thresholds}, {"hermitian", m.hermitian}, {"V", v}};
  if (!m.channels.widths.empty()) out["widths"] = m.channels.widths;
  if (!m.channels.labels.empty()) out["labels"] = m.channels.labels;
  return out;
}

LocalPotentialModel model_from_json(const json& j) {
  require_keys(j, {"grid", "thresholds", "widths", "labels", "hermitian", "V"}, "model");
  LocalPotentialModel m;
  m.grid = grid_from_json(get_required<json>(j, "grid", "model"));
  m.channels.thresholds = get_required<std::vector<double>>(j, "thresholds", "model");
  if (j.contains("widths")) m.channels.widths = get_required<std::vector<double>>(j, "widths", "model");
  if (j.contains("labels")) m.channels.labels = get_required<std::vector<std::string>>(j, "labels", "model");
  const json& v = get_required<json>(j, "V", "model");
  if (!v.is_array() || v.size() != m.grid.size()) throw Error(ErrorCode::Parse, "V needs one matrix per grid point");
  const auto nc = static_cast<Index>(m.channels.size());
  for (const auto& mat : v) m.V.push_back(complex_matrix_from_json(mat, nc, nc));
  if (j.contains("hermitian")) {
    m.hermitian = get_required<bool>(j, "hermitian", "model");
  } else {
    m.hermitian = m.channels.widths.empty() || std::all_of(m.channels.widths.begin(), m.channels.widths.end(),
                                                           [](double w) { return w == 0.0; });
    for (const auto& mat : m.V) m.hermitian = m.hermitian && (mat - mat.adjoint()).cwiseAbs().maxCoeff() <= 1e-12;
  }
  m.validate();
  return m;
}

json to_json(const SolveDiagnostics& d) {
  json out = {{"unitarity_defect", d.unitarity_defect},
              {"min_points_per_wavelength", d.min_points_per_wavelength},
              {"resolution_warning", d.resolution_warning}};
  out["convergence_estimate"] = d.convergence_estimate ? json(*d.convergence_estimate) : json(nullptr);
  return out;
}

json to_json(const ScatterSolution& sol) {
  json k = json::array();
  for (const auto& kj : sol.kinematics.k) k.push_back({kj.real(), kj.imag()});
  return {{"energy", sol.kinematics.energy},
          {"k", k},
          {"open", sol.kinematics.open},
          {"S", to_json(sol.S)},
          {"diagnostics", to_json(sol.diagnostics)}};
}

json to_json(const NonlocalKernel& kernel) {
  return {{"grid", grid_to_json(kernel.grid)}, {"K", complex_matrix_to_json(kernel.K)}};
}

NonlocalKernel kernel_from_json(const json& j) {
  require_keys(j, {"grid", "K"}, "kernel");
  NonlocalKernel k;
  k.grid = grid_from_json(get_required<json>(j, "grid", "kernel"));
  const auto n = static_cast<Index>(k.grid.size());
  k.K = complex_matrix_from_json(get_required<json>(j, "K", "kernel"), n, n);
  return k;
}

void write_kernel_csv(std::ostream& os, const NonlocalKernel& kernel) {
  os << "x,y,re,im\n";
  const auto n = kernel.grid.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const cplx v = kernel.K(static_cast<Index>(i), static_cast<Index>(j));
      os << csv_number(kernel.grid.x(i)) << ',' << csv_number(kernel.grid.x(j)) << ',' << csv_number(v.real()) << ','
         << csv_number(v.imag()) << '\n';
    }
}

NonlocalKernel kernel_from_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,y,re,im", 0) != 0)
    throw Error(ErrorCode::Parse, "kernel CSV must start with header x,y,re,im");
  std::map<double, std::size_t> xs;
  struct Entry {
    double x, y;
    cplx v;
  };
  std::vector<Entry> entries;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double vals[4];
    char comma;
    for (int c = 0; c < 4; ++c) {
      if (!(ss >> vals[c])) throw Error(ErrorCode::Parse, "malformed kernel CSV row: " + line);
      if (c < 3 && !(ss >> comma && comma == ',')) throw Error(ErrorCode::Parse, "malformed kernel CSV row: " + line);
    }
    entries.push_back({vals[0], vals[1], {vals[2], vals[3]}});
    xs.emplace(vals[0], 0);
  }
  const std::size_t n = xs.size();
  if (n < 3 || entries.size() != n * n) throw Error(ErrorCode::Parse, "kernel CSV must cover a full n x n grid");
  std::size_t idx = 0;
  for (auto& [x, i] : xs) i = idx++;
  NonlocalKernel k;
  k.grid = Grid(xs.begin()->first, xs.rbegin()->first, n);
  k.K = MatrixXcd::Zero(static_cast<Index>(n), static_cast<Index>(n));
  for (const auto& e : entries) {
    const auto iy = xs.find(e.y);
    if (iy == xs.end()) throw Error(ErrorCode::Parse, "kernel CSV y value not on the x grid");
    k.K(static_cast<Index>(xs[e.x]), static_cast<Index>(iy->second)) = e.v;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(k.grid.x(i) - std::next(xs.begin(), static_cast<long>(i))->first) > 1e-9 * (1 + std::abs(k.grid.x(i))))
      throw Error(ErrorCode::Parse, "kernel CSV grid is not uniform");
  return k;
}

void write_kernel_polar_csv(std::ostream& os, const NonlocalKernel& kernel) {
  os << "x,y,abs,arg\n";
  const auto n = kernel.grid.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const cplx v = kernel.K(static_cast<Index>(i), static_cast<Index>(j));
      os << csv_number(kernel.grid.x(i)) << ',' << csv_number(kernel.grid.x(j)) << ',' << csv_number(std::abs(v))
         << ',' << csv_number(std::arg(v)) << '\n';
    }
}

void write_sweep_csv(std::ostream& os, const std::vector<DemonReport>& rows) {
  os << "v,T2,R2,Tt2,Rt2,D,code\n";
  for (const auto& r : rows)
    os << csv_number(r.velocity) << ',' << csv_number(r.probabilities.T) << ',' << csv_number(r.probabilities.R)
       << ',' << csv_number(r.probabilities.Tt) << ',' << csv_number(r.probabilities.Rt) << ',' << csv_number(r.D)
       << ',' << r.code << '\n';
}

void write_regions_csv(std::ostream& os, std::size_t resolution) {
  if (resolution < 2) throw Error(ErrorCode::InvalidRange, "region resolution must be >= 2");
  os << "t2,rt2,lower,upper,region\n";
  const double step = 1.0 / static_cast<double>(resolution - 1);
  for (std::size_t i = 0; i < resolution; ++i) {
    const double t2 = i * step;
    // integer test keeps the diagonal rt2 = 1 - t2 exact
    for (std::size_t j = 0; i + j < resolution; ++j) {
      const double rt2 = j * step;
      const DZeroBounds b = dzero_bounds(t2, std::min(rt2, 1.0 - t2));
      os << csv_number(t2) << ',' << csv_number(rt2) << ',' << csv_number(b.lower) << ',' << csv_number(b.upper)
         << ',' << to_char(b.region) << '\n';
    }
  }
}

json to_json(const SymmetryReport& report) {
  json classes = json::object();
  for (const auto& v : report.verdicts)
    classes[std::string(to_string(v.symmetry))] = {{"residual", v.residual}, {"verdict", v.holds}};
  json preds = json::array();
  for (auto r : report.predictions) preds.push_back(std::string(to_string(r)));
  json sat = json::array();
  for (auto c : report.satisfied()) sat.push_back(std::string(to_string(c)));
  return {{"class", classes}, {"predictions", preds}, {"satisfied", sat}, {"trivial_only", report.trivial_only()}};
}

json to_json(const VerificationReport& report) {
  json out = to_json(report.symmetry);
  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"relation", std::string(to_string(c.relation))}, {"deviation", c.deviation}, {"holds", c.holds}});
  const Probabilities p = probabilities(report.amplitudes);
  out["verification"] = checks;
  out["probabilities"] = {{"T2", p.T}, {"R2", p.R}, {"Tt2", p.Tt}, {"Rt2", p.Rt}};
  out["D"] = report.D;
  return out;
}

json to_json(const OptimizationResult& r) {
  return {{"parameters", {{"b", r.parameters.b}, {"c", r.parameters.c}, {"x0", r.parameters.x0}, {"delta", r.parameters.delta}}},
          {"cost", r.cost},
          {"initial_cost", r.initial_cost},
          {"achieved", {{"T2", r.achieved.T}, {"R2", r.achieved.R}, {"Tt2", r.achieved.Tt}, {"Rt2", r.achieved.Rt}}},
          {"D", r.D},
          {"max_D", r.max_D},
          {"evaluations", r.evaluations},
          {"converged", r.converged},
          {"restart_costs", r.restart_costs}};
}

void write_optimization_log_csv(std::ostream& os, const OptimizationResult& r) {
  os << "index,b,c,x0,delta,cost,D\n";
  for (const auto& e : r.log)
    os << e.index << ',' << csv_number(e.parameters.b) << ',' << csv_number(e.parameters.c) << ','
       << csv_number(e.parameters.x0) << ',' << csv_number(e.parameters.delta) << ',' << csv_number(e.cost) << ','
       << csv_number(e.D) << '\n';
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, "invalid JSON in '" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Parse, "cannot write '" + path + "'");
  out << text;
}

}  // namespace demonscatter::io
