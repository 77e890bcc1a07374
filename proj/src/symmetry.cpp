#include "demonscatter/symmetry.hpp"

#include <algorithm>
#include <cmath>

#include "demonscatter/demon.hpp"
#include "demonscatter/errors.hpp"

namespace demonscatter {

using Eigen::MatrixXcd;

std::string_view to_string(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::Trivial: return "Trivial";
    case SymmetryClass::Hermiticity: return "Hermiticity";
    case SymmetryClass::Parity: return "Parity";
    case SymmetryClass::ParityPseudohermiticity: return "ParityPseudohermiticity";
    case SymmetryClass::TimeReversal: return "TimeReversal";
    case SymmetryClass::TimeReversalPseudohermiticity: return "TimeReversalPseudohermiticity";
    case SymmetryClass::PT: return "PT";
    case SymmetryClass::PTPseudohermiticity: return "PTPseudohermiticity";
  }
  return "?";
}

SymmetryClass symmetry_from_string(std::string_view name) {
  for (auto c : kAllSymmetries)
    if (to_string(c) == name) return c;
  throw Error(ErrorCode::Parse, "unknown symmetry class '" + std::string(name) + "'");
}

namespace {
bool needs_parity(SymmetryClass c) {
  return c == SymmetryClass::Parity || c == SymmetryClass::ParityPseudohermiticity || c == SymmetryClass::PT ||
         c == SymmetryClass::PTPseudohermiticity;
}
}  // namespace

MatrixXcd symmetry_transform(const MatrixXcd& K, SymmetryClass c) {
  switch (c) {
    case SymmetryClass::Trivial: return K;
    case SymmetryClass::Hermiticity: return K.adjoint();
    case SymmetryClass::TimeReversal: return K.conjugate();
    case SymmetryClass::TimeReversalPseudohermiticity: return K.transpose();
    case SymmetryClass::Parity: return flip_arguments(K);
    case SymmetryClass::ParityPseudohermiticity: return flip_arguments(K).adjoint();
    case SymmetryClass::PT: return flip_arguments(K).conjugate();
    case SymmetryClass::PTPseudohermiticity: return flip_arguments(K).transpose();
  }
  return K;
}

double residual(const NonlocalKernel& kernel, SymmetryClass c) {
  if (c == SymmetryClass::Trivial) return 0.0;
  if (needs_parity(c) && !kernel.grid.symmetric_about_origin())
    throw Error(ErrorCode::AsymmetricGrid, "parity-type symmetries need a grid symmetric about 0");
  if (kernel.K.size() == 0) return 0.0;
  return (kernel.K - symmetry_transform(kernel.K, c)).cwiseAbs().maxCoeff();
}

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::EqualTransmission: return "|T|=|Tt|";
    case Relation::EqualReflection: return "|R|=|Rt|";
    case Relation::DZero: return "D=0";
    case Relation::DFromReflections: return "D=(|Rt|^2-|R|^2)/2";
    case Relation::DFromTransmissions: return "D=(|T|^2-|Tt|^2)/2";
  }
  return "?";
}

std::vector<Relation> predicted_relations(const std::vector<SymmetryClass>& classes) {
  auto has = [&](SymmetryClass c) { return std::find(classes.begin(), classes.end(), c) != classes.end(); };
  std::vector<Relation> out;
  auto add = [&](Relation r) {
    if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
  };
  if (has(SymmetryClass::Hermiticity) || has(SymmetryClass::Parity)) {
    add(Relation::EqualTransmission);
    add(Relation::EqualReflection);
    add(Relation::DZero);
  }
  if (has(SymmetryClass::TimeReversalPseudohermiticity) || has(SymmetryClass::PT)) {
    add(Relation::EqualTransmission);
    add(Relation::DFromReflections);
  }
  if (has(SymmetryClass::TimeReversal) || has(SymmetryClass::PTPseudohermiticity)) {
    add(Relation::EqualReflection);
    add(Relation::DFromTransmissions);
  }
  return out;
}

std::vector<SymmetryClass> SymmetryReport::satisfied() const {
  std::vector<SymmetryClass> out;
  for (const auto& v : verdicts)
    if (v.holds) out.push_back(v.symmetry);
  return out;
}

bool SymmetryReport::trivial_only() const {
  const auto s = satisfied();
  return s.size() == 1 && s.front() == SymmetryClass::Trivial;
}

SymmetryReport classify(const NonlocalKernel& kernel, double rel_tol) {
  const double scale = kernel.K.size() ? kernel.K.cwiseAbs().maxCoeff() : 0.0;
  const bool symmetric_grid = kernel.grid.symmetric_about_origin();
  SymmetryReport rep;
  for (auto c : kAllSymmetries) {
    if (needs_parity(c) && !symmetric_grid)
      throw Error(ErrorCode::AsymmetricGrid, "parity-type symmetries need a grid symmetric about 0");
    const double r = residual(kernel, c);
    rep.verdicts.push_back({c, r, c == SymmetryClass::Trivial || r <= rel_tol * scale});
  }
  rep.predictions = predicted_relations(rep.satisfied());
  return rep;
}

bool VerificationReport::all_hold() const {
  return std::all_of(checks.begin(), checks.end(), [](const RelationCheck& c) { return c.holds; });
}

VerificationReport verify_predictions(const NonlocalKernel& kernel, double k, double rel_tol, double relation_tol) {
  VerificationReport rep;
  rep.symmetry = classify(kernel, rel_tol);
  rep.amplitudes = solve_nonlocal(kernel, k);
  rep.D = demon_parameter(rep.amplitudes);
  const Probabilities p = probabilities(rep.amplitudes);
  for (auto rel : rep.symmetry.predictions) {
    double dev = 0.0;
    switch (rel) {
      case Relation::EqualTransmission: dev = std::abs(std::abs(rep.amplitudes.T) - std::abs(rep.amplitudes.Tt)); break;
      case Relation::EqualReflection: dev = std::abs(std::abs(rep.amplitudes.R) - std::abs(rep.amplitudes.Rt)); break;
      case Relation::DZero: dev = std::abs(rep.D); break;
      case Relation::DFromReflections: dev = std::abs(rep.D - 0.5 * (p.Rt - p.R)); break;
      case Relation::DFromTransmissions: dev = std::abs(rep.D - 0.5 * (p.T - p.Tt)); break;
    }
    rep.checks.push_back({rel, dev, dev <= relation_tol});
  }
  return rep;
}

}  // namespace demonscatter
