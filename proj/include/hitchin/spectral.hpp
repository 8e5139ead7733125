#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hitchin/divisor.hpp"
#include "hitchin/poly.hpp"

namespace hitchin {

enum class RootClass { moving_zero, tame_center, twisted_center };

const char* root_class_name(RootClass c);

struct RamificationRoot {
  cplx value = 0.0;            // coordinate in `chart`
  Chart chart = Chart::z;      // which affine chart the value lives in
  RootClass cls = RootClass::moving_zero;
  double local_mass = 0.0;     // lambda > 0 on the regular locus
  std::optional<cplx> predicted;  // leading-order location, when available
  int pole_index = -1;         // pole whose cluster the root belongs to (-1: none)
};

struct RamificationData {
  std::vector<RamificationRoot> roots;
  std::string to_csv(double t) const;  // rows: t, re, im, chart, class, lambda, pred err
};

struct RegularReport {
  bool regular = false;
  double min_separation = 0.0;
  std::vector<std::string> violations;
};

// True iff all roots are simple at the working tolerance and none coincides
// with a pole location except the forced roots at twisted/tame centers.
// The separation tolerance is 1e-8 * max(1, |t|^{1/4}).
RegularReport classify_regular(const BasePoint& base, const std::vector<cplx>& roots,
                               double t_scale);

// Leading-order root locations for the one-parameter family with the last
// free coefficient scaled by t. Requires all poles finite and the designated
// pole at the origin (the configuration the closed-form asymptotics cover);
// throws std::invalid_argument otherwise or when the last free coefficient
// vanishes. Forced roots at twisted/tame centers are included (value = x).
std::vector<cplx> root_asymptotics(const BasePoint& base, cplx t);

// Ramification data of tilde_nu at the scaled base point: roots from both
// charts (finite roots of tilde_nu, plus forced roots at infinity reported in
// the w chart), classification, and local masses
//   moving zero:     lambda = |nu/(z - z0)|^{1/2} at z0,
//   tame center x:   lambda = |(z-x) nu|^{1/2} at x,
//   twisted center:  lambda = |(z-x)^{2m-1} nu|^{1/2} at x,
// each evaluated in the root's chart.
RamificationData local_masses(const BasePoint& base, const std::vector<cplx>& roots);

// Convenience: full pipeline roots -> snap -> classify -> masses for the
// polynomial tilde_nu(base). Throws std::runtime_error when not in the
// regular locus.
RamificationData analyze_ramification(const BasePoint& base, double t_scale);

// Local mass at a finite-chart point p for the given chart polynomial data;
// exposed for the four-dimensional case studies.
double local_mass_at(const ComplexPolynomial& tilde, const std::vector<cplx>& all_roots,
                     size_t root_index, const std::vector<std::pair<cplx, int>>& pole_factors);

}  // namespace hitchin
