#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "demonscatter/channels.hpp"
#include "demonscatter/coupled_solver.hpp"
#include "demonscatter/demon.hpp"
#include "demonscatter/nonlocal_solver.hpp"
#include "demonscatter/optimizer.hpp"
#include "demonscatter/symmetry.hpp"

namespace demonscatter::io {

using nlohmann::json;

/// Complex numbers travel as [re, im]; matrices as row-major arrays of those.
json complex_matrix_to_json(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd complex_matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols);

/// {n_open, blocks: {T, R, Rt, Tt}}
json to_json(const SMatrix& S);
SMatrix smatrix_from_json(const json& j);

/// {grid: {xmin, xmax, n}, thresholds, [widths], [labels], [hermitian], V}
json to_json(const LocalPotentialModel& model);
LocalPotentialModel model_from_json(const json& j);

json to_json(const SolveDiagnostics& d);
json to_json(const ScatterSolution& sol);

/// {grid: {xmin, xmax, n}, K}
json to_json(const NonlocalKernel& kernel);
NonlocalKernel kernel_from_json(const json& j);

/// Rows "x,y,re,im" over the full grid, x-major.
void write_kernel_csv(std::ostream& os, const NonlocalKernel& kernel);
NonlocalKernel kernel_from_csv(std::istream& is);
/// Rows "x,y,abs,arg" for surface plots of |K| and arg K.
void write_kernel_polar_csv(std::ostream& os, const NonlocalKernel& kernel);

void write_sweep_csv(std::ostream& os, const std::vector<DemonReport>& rows);
/// Rows "t2,rt2,lower,upper,region" over the feasible triangle rt2 <= 1 - t2.
void write_regions_csv(std::ostream& os, std::size_t resolution);

json to_json(const SymmetryReport& report);
json to_json(const VerificationReport& report);

json to_json(const OptimizationResult& result);
void write_optimization_log_csv(std::ostream& os, const OptimizationResult& result);

/// %.12g, the CSV precision.
std::string csv_number(double v);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace demonscatter::io
