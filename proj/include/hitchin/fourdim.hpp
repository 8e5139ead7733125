#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hitchin/divisor.hpp"
#include "hitchin/poly.hpp"
#include "hitchin/quad2d.hpp"

namespace hitchin {

// The nine four-dimensional (N = 4) singularity configurations.
enum class CaseId { U4, T4, U3S, T3S, U2U2, U2T2, T2T2, U2SS, T2SS };

using MuMap = std::map<std::string, cplx>;

struct SkForm {
  bool conic = true;
  double conic_exponent = 0.5;    // e in (dr^2 + r^2 dtheta^2) / r^e
  double log_coefficient = 0.0;   // 4 pi, 6 pi, ... for the log-cylindrical cases
  double cone_angle() const;      // 2 pi (1 - e/2), conic cases
};

struct ModelData {
  bool alg_star = false;
  std::string kodaira;   // "III*", "I2*", ...
  std::string dynkin;    // "A1", "D2", ...
  double beta = 0.0;     // ALG
  cplx tau_model = 0.0;  // ALG
  int istar_index = 0;   // ALG*: k in I_k*
};

struct FourDimCase {
  CaseId id;
  std::string name;
  std::string description;
  std::vector<std::string> free_mu;     // parameter names, e.g. "mu7"
  MuMap default_mu;                     // required-nonzero slots get defaults
  Chart primary_chart = Chart::z;
  double seam_radius = 1.0;             // chart split |zeta| <= R vs |1/zeta| <= 1/R
  int num_slots = 4;                    // labeled roots entering the cross-ratio
  SkForm sk_form;
  ModelData model;
};

const std::vector<FourDimCase>& case_catalog();
const FourDimCase& case_info(CaseId id);
std::optional<CaseId> case_by_name(const std::string& name);

// Fills unspecified parameters with the case defaults; rejects unknown names
// and zero values in required-nonzero slots.
MuMap resolve_mu(CaseId id, const MuMap& mus);

// The cleared spectral polynomial of the case family in its primary chart
// (forced roots at twisted centers divided out, as in the printed families).
ComplexPolynomial case_tilde(CaseId id, cplx t, const MuMap& mus);

// Divisor / base point emission through the base module; exact whenever the
// simple poles are strongly parabolic (weak-parabolic mu parameters of U3S,
// T3S, U2SS, T2SS must be zero, else this throws).
IrregularDivisor case_divisor(CaseId id, const MuMap& mus);
BasePoint case_base_point(CaseId id, const MuMap& mus, double t);

// Leading-order root predictions, ordered by the printed slot labels.
std::vector<cplx> case_root_predictions(CaseId id, cplx t, const MuMap& mus);

// Cross-ratio with optional 0/infinity entries:
// ((a-b)(c-d)) / ((c-b)(a-d)), entries being finite values or infinity.
struct CrossRatioEntry {
  bool at_infinity = false;
  cplx value = 0.0;
  static CrossRatioEntry inf() { return {true, 0.0}; }
  static CrossRatioEntry of(cplx v) { return {false, v}; }
};
cplx cross_ratio(const CrossRatioEntry& a, const CrossRatioEntry& b,
                 const CrossRatioEntry& c, const CrossRatioEntry& d);

// Matches unlabeled roots to the case's slot predictions (min-cost assignment,
// ambiguity is an error) and applies the printed slotting.
cplx fiber_cross_ratio(CaseId id, cplx t, const MuMap& mus,
                       const std::vector<cplx>& roots);

// Printed closed-form expansions of the fiber cross-ratio and modulus
// (leading plus printed subleading; see the module notes for the two
// subleading coefficients corrected against direct series expansion).
cplx cross_ratio_reference(CaseId id, cplx t, const MuMap& mus);
cplx tau_expansion_reference(CaseId id, cplx t, const MuMap& mus);

// tau(t) through roots -> cross-ratio -> lambda^{-1}, with the Gamma(2)
// representative chosen nearest to branch_hint (default: the printed
// reference at the same t).
cplx fiber_tau(CaseId id, cplx t, const MuMap& mus,
               std::optional<cplx> branch_hint = std::nullopt);

struct TauSweepPoint {
  double t = 0.0;
  cplx l = 0.0;
  cplx tau = 0.0;
  cplx tau_ref = 0.0;
};
// Processes the sweep from the most asymptotic point down, carrying the
// branch by continuity; returned in ascending t order.
std::vector<TauSweepPoint> fiber_tau_sweep(CaseId id, const std::vector<double>& ts,
                                           const MuMap& mus);

// Special Kaehler metric coefficient g_sK(nu-dot, nu-dot) at t-dot = 1,
// integrated over both charts with the i dz dz-bar measure.
struct SkValue {
  double value = 0.0;
  double error_estimate = 0.0;
};
SkValue sk_metric_numeric(CaseId id, cplx t, const MuMap& mus, double rel_tol = 1e-5);

// Fit of a sweep of (|t|, g_sK) samples against the case's asymptotic form:
// conic cases regress log g on log t, log cases regress g * t on log t.
struct SkFitReport {
  bool conic = true;
  double slope = 0.0;       // conic: d log g / d log t; log: d(g t)/d log t
  double intercept = 0.0;
  double r_squared = 0.0;
  double expected_slope = 0.0;
  double fitted_cone_angle = 0.0;  // conic cases, from slope -e
};
SkFitReport sk_leading_fit(CaseId id, const std::vector<std::pair<double, double>>& samples);

// Constant-coefficient pullback of the flat fiber metric to the reference
// torus of modulus tau_hat.
struct TorusMetric {
  double m11 = 1.0, m12 = 0.0, m22 = 1.0;
  double det() const { return m11 * m22 - m12 * m12; }
  // area of the reference torus C / c-hat (Z + tau-hat Z), c-hat^2 Im tau-hat = 4 pi^2
  double area() const;
};
TorusMetric torus_pullback_metric(cplx tau, cplx tau_hat);

// Printed algebraic relation of the case's fiber curve at (a0, c0).
bool fiber_curve_check(CaseId id, cplx t, const MuMap& mus, cplx a0, cplx c0);

// Gibbons-Hawking potential V = kappa0 + (nu/pi) log r of the ALG* model,
// with the diagonal model coefficients (V, V, V, 1/V). Throws for V <= 0.
struct GibbonsHawking {
  double V = 0.0;
  double coeff[4] = {0, 0, 0, 0};
};
GibbonsHawking gibbons_hawking_potential(double kappa0, double nu, double r);

}  // namespace hitchin
