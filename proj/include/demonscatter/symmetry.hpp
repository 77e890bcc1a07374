#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "demonscatter/channels.hpp"
#include "demonscatter/nonlocal_solver.hpp"

namespace demonscatter {

enum class SymmetryClass {
  Trivial,
  Hermiticity,
  Parity,
  ParityPseudohermiticity,
  TimeReversal,
  TimeReversalPseudohermiticity,
  PT,
  PTPseudohermiticity,
};

inline constexpr std::array<SymmetryClass, 8> kAllSymmetries = {
    SymmetryClass::Trivial,      SymmetryClass::Hermiticity,
    SymmetryClass::Parity,       SymmetryClass::ParityPseudohermiticity,
    SymmetryClass::TimeReversal, SymmetryClass::TimeReversalPseudohermiticity,
    SymmetryClass::PT,           SymmetryClass::PTPseudohermiticity};

std::string_view to_string(SymmetryClass c);
SymmetryClass symmetry_from_string(std::string_view name);

/// Image of K under the class transform; the transforms are involutions.
Eigen::MatrixXcd symmetry_transform(const Eigen::MatrixXcd& K, SymmetryClass c);

/// max |K - transform(K)|; Trivial is 0 by definition.
double residual(const NonlocalKernel& kernel, SymmetryClass c);

enum class Relation {
  EqualTransmission,   // |T| = |Tt|
  EqualReflection,     // |R| = |Rt|
  DZero,               // D = 0
  DFromReflections,    // D = (|Rt|^2 - |R|^2) / 2
  DFromTransmissions,  // D = (|T|^2 - |Tt|^2) / 2
};

std::string_view to_string(Relation r);

std::vector<Relation> predicted_relations(const std::vector<SymmetryClass>& classes);

inline constexpr double kSymmetryRelativeTolerance = 1e-8;

struct SymmetryVerdict {
  SymmetryClass symmetry;
  double residual;
  bool holds;
};

struct SymmetryReport {
  std::vector<SymmetryVerdict> verdicts;  // all eight classes
  std::vector<Relation> predictions;

  std::vector<SymmetryClass> satisfied() const;
  bool trivial_only() const;
};

/// Verdict per class is residual <= rel_tol * max|K|.
SymmetryReport classify(const NonlocalKernel& kernel, double rel_tol = kSymmetryRelativeTolerance);

struct RelationCheck {
  Relation relation;
  double deviation;
  bool holds;
};

struct VerificationReport {
  SymmetryReport symmetry;
  ChannelAmplitudes amplitudes;
  double D = 0;
  std::vector<RelationCheck> checks;

  bool all_hold() const;
};

inline constexpr double kRelationTolerance = 1e-4;

VerificationReport verify_predictions(const NonlocalKernel& kernel, double k,
                                      double rel_tol = kSymmetryRelativeTolerance,
                                      double relation_tol = kRelationTolerance);

}  // namespace demonscatter
