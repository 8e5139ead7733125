#include "hitchin/fourdim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hitchin/specfun.hpp"

namespace hitchin {

namespace {

constexpr double kPi = std::numbers::pi;

cplx get(const MuMap& m, const std::string& k) { return m.at(k); }

const cplx kOmega = std::polar(1.0, 2.0 * kPi / 3.0);  // e^{2 pi i / 3}

}  // namespace

double SkForm::cone_angle() const { return 2.0 * kPi * (1.0 - conic_exponent / 2.0); }

double TorusMetric::area() const { return std::sqrt(det()) * 4.0 * kPi * kPi; }

const std::vector<FourDimCase>& case_catalog() {
  static const std::vector<FourDimCase> cases = [] {
    std::vector<FourDimCase> v;
    auto conic = [](double e) {
      SkForm f;
      f.conic = true;
      f.conic_exponent = e;
      return f;
    };
    auto logform = [](double c) {
      SkForm f;
      f.conic = false;
      f.log_coefficient = c;
      return f;
    };

    {
      FourDimCase c;
      c.id = CaseId::U4;
      c.name = "U4";
      c.description = "one untwisted order-four pole at 0";
      c.free_mu = {"mu5", "mu6", "mu7"};
      c.default_mu = {{"mu5", 0.0}, {"mu6", 0.0}, {"mu7", 0.0}};
      c.primary_chart = Chart::z;
      c.num_slots = 4;
      c.sk_form = conic(0.5);
      c.model = {false, "III*", "A1", 0.75, cplx(0.0, 1.0), 0};
      v.push_back(c);
    }
    {
      FourDimCase c;
      c.id = CaseId::T4;
      c.name = "T4";
      c.description = "one twisted order-four pole at 0";
      c.free_mu = {"mu5", "mu6"};
      c.default_mu = {{"mu5", 0.0}, {"mu6", 0.0}};
      c.primary_chart = Chart::z;
      c.num_slots = 3;
      c.sk_form = conic(1.0 / 3.0);
      c.model = {false, "II*", "A0", 5.0 / 6.0, kOmega, 0};
      v.push_back(c);
    }
    {
      FourDimCase c;
      c.id = CaseId::U3S;
      c.name = "U3S";
      c.description = "untwisted order-three pole at 0, simple pole at infinity";
      c.free_mu = {"mu2", "mu4", "mu5"};
      c.default_mu = {{"mu2", 0.0}, {"mu4", 0.0}, {"mu5", 0.0}};
      c.primary_chart = Chart::w;
      c.num_slots = 4;
      c.sk_form = conic(2.0 / 3.0);
      c.model = {false, "IV*", "A2", 2.0 / 3.0, kOmega, 0};
      v.push_back(c);
    }
    {
      FourDimCase c;
      c.id = CaseId::T3S;
      c.name = "T3S";
      c.description = "twisted order-three pole at 0, simple pole at infinity";
      c.free_mu = {"mu2", "mu4"};
      c.default_mu = {{"mu2", 0.0}, {"mu4", 0.0}};
      c.primary_chart = Chart::w;
      c.num_slots = 3;
      c.sk_form = conic(0.5);
      c.model = {false, "III*", "A1", 0.75, cplx(0.0, 1.0), 0};
      v.push_back(c);
    }
    {
      FourDimCase c;
      c.id = CaseId::U2U2;
      c.name = "U2U2";
      c.description = "two untwisted order-two poles at 0 and infinity";
      c.free_mu = {"mu0", "mu1", "mu3"};
      c.default_mu = {{"mu0", -1.0}, {"mu1", 0.0}, {"mu3", 0.0}};
      c.primary_chart = Chart::z;
      c.num_slots = 4;
      c.sk_form = logform(4.0 * kPi);
      c.model = {true, "I2*", "D2", 0, 0, 2};
      v.push_back(c);
    }
    {
      FourDimCase c;
      c.id = CaseId::U2T2;
      c.name = "U2T2";
      c.description = "untwisted order-two pole at 0, twisted order-two pole at infinity";
      c.free_mu = {"mu1", "mu3"};
      c.default_mu = {{"mu1", 1.0}, {"mu3", 0.0}};
      c.primary_chart = Chart::z;
      c.num_slots = 3;
      c.sk_form = logform(6.0 * kPi);
      c.model = {true, "I3*", "D1", 0, 0, 3};
      v.push_back(c);
    }
    {
      FourDimCase c;
      c.id = CaseId::T2T2;
      c.name = "T2T2";
      c.description = "two twisted order-two poles at 0 and infinity";
      c.free_mu = {"mu1"};
      c.default_mu = {{"mu1", 1.0}};
      c.primary_chart = Chart::z;
      c.num_slots = 2;
      c.sk_form = logform(8.0 * kPi);
      c.model = {true, "I4*", "D0", 0, 0, 4};
      v.push_back(c);
    }
    {
      FourDimCase c;
      c.id = CaseId::U2SS;
      c.name = "U2SS";
      c.description = "untwisted order-two pole at infinity, simple poles at 0 and 1";
      c.free_mu = {"mu0", "mu1", "mu3", "mu4"};
      c.default_mu = {{"mu0", 0.0}, {"mu1", 0.0}, {"mu3", 0.0}, {"mu4", -1.0}};
      c.primary_chart = Chart::z;
      c.seam_radius = 2.0;
      c.num_slots = 4;
      c.sk_form = logform(2.0 * kPi);
      c.model = {true, "I1*", "D3", 0, 0, 1};
      v.push_back(c);
    }
    {
      FourDimCase c;
      c.id = CaseId::T2SS;
      c.name = "T2SS";
      c.description = "twisted order-two pole at infinity, simple poles at 0 and 1";
      c.free_mu = {"mu0", "mu1", "mu3"};
      c.default_mu = {{"mu0", 0.0}, {"mu1", 0.0}, {"mu3", 1.0}};
      c.primary_chart = Chart::z;
      c.seam_radius = 2.0;
      c.num_slots = 3;
      c.sk_form = logform(4.0 * kPi);
      c.model = {true, "I2*", "D2", 0, 0, 2};
      v.push_back(c);
    }
    return v;
  }();
  return cases;
}

const FourDimCase& case_info(CaseId id) {
  for (const auto& c : case_catalog())
    if (c.id == id) return c;
  throw std::logic_error("case_info: unknown id");
}

std::optional<CaseId> case_by_name(const std::string& name) {
  for (const auto& c : case_catalog())
    if (c.name == name) return c.id;
  return std::nullopt;
}

MuMap resolve_mu(CaseId id, const MuMap& mus) {
  const FourDimCase& info = case_info(id);
  MuMap out = info.default_mu;
  for (const auto& [k, v] : mus) {
    if (!out.count(k))
      throw std::invalid_argument("unknown parameter '" + k + "' for case " + info.name);
    out[k] = v;
  }
  // required-nonzero slots
  auto need = [&](const char* k) {
    if (get(out, k) == cplx(0.0))
      throw std::invalid_argument(std::string("case ") + info.name + ": " + k +
                                  " must be nonzero");
  };
  switch (id) {
    case CaseId::U2U2: need("mu0"); break;
    case CaseId::U2T2: need("mu1"); break;
    case CaseId::T2T2: need("mu1"); break;
    case CaseId::U2SS: need("mu4"); break;
    case CaseId::T2SS: need("mu3"); break;
    default: break;
  }
  return out;
}

ComplexPolynomial case_tilde(CaseId id, cplx t, const MuMap& raw_mus) {
  MuMap m = resolve_mu(id, raw_mus);
  const FourDimCase& info = case_info(id);
  std::vector<cplx> c;
  switch (id) {
    case CaseId::U4:
      c = {-1.0, get(m, "mu7"), get(m, "mu6"), get(m, "mu5"), t};
      break;
    case CaseId::T4:
      c = {-1.0, get(m, "mu6"), get(m, "mu5"), t};
      break;
    case CaseId::U3S:
      c = {get(m, "mu2"), t, get(m, "mu4"), get(m, "mu5"), -1.0};
      break;
    case CaseId::T3S:
      c = {get(m, "mu2"), t, get(m, "mu4"), -1.0};
      break;
    case CaseId::U2U2:
      c = {-1.0, get(m, "mu3"), t, get(m, "mu1"), get(m, "mu0")};
      break;
    case CaseId::U2T2:
      c = {-1.0, get(m, "mu3"), t, get(m, "mu1")};
      break;
    case CaseId::T2T2:
      c = {-1.0, t, get(m, "mu1")};
      break;
    case CaseId::U2SS: {
      cplx mu0 = get(m, "mu0"), mu1 = get(m, "mu1"), mu3 = get(m, "mu3"),
           mu4 = get(m, "mu4");
      c = {mu0, -2.0 * mu0 + mu3 - t, mu0 + mu1 - 2.0 * mu3 + mu4 + t, mu3 - 2.0 * mu4,
           mu4};
      break;
    }
    case CaseId::T2SS: {
      cplx mu0 = get(m, "mu0"), mu1 = get(m, "mu1"), mu3 = get(m, "mu3");
      c = {mu0, -2.0 * mu0 + mu3 - t, mu0 + mu1 - 2.0 * mu3 + t, mu3};
      break;
    }
  }
  ComplexPolynomial p(std::move(c), info.primary_chart);
  return p;
}

IrregularDivisor case_divisor(CaseId id, const MuMap& raw_mus) {
  MuMap m = resolve_mu(id, raw_mus);
  auto weak = [&](const char* k) {
    if (get(m, k) != cplx(0.0))
      throw std::invalid_argument(
          std::string("case divisor: weakly parabolic parameter ") + k +
          " has no base-module representation; set it to zero");
  };
  IrregularDivisor d;
  auto untw = [](PoleLocation loc, int order, std::vector<cplx> mu) {
    PoleDatum p;
    p.location = loc;
    p.order = order;
    p.kind = PoleKind::untwisted;
    p.mu = std::move(mu);
    return p;
  };
  auto twis = [](PoleLocation loc, int order, std::vector<cplx> mu) {
    PoleDatum p;
    p.location = loc;
    p.order = order;
    p.kind = PoleKind::twisted;
    p.mu = std::move(mu);
    return p;
  };
  auto tame = [](PoleLocation loc) {
    PoleDatum p;
    p.location = loc;
    p.order = 1;
    p.kind = PoleKind::tame;
    return p;
  };
  const cplx zero = 0.0;
  switch (id) {
    case CaseId::U4:
      d.poles = {untw(PoleLocation::at(0.0), 4,
                      {get(m, "mu5"), get(m, "mu6"), get(m, "mu7"), -1.0})};
      break;
    case CaseId::T4:
      d.poles = {twis(PoleLocation::at(0.0), 4, {get(m, "mu5"), get(m, "mu6"), -1.0, zero})};
      break;
    case CaseId::U3S:
      weak("mu2");
      d.poles = {untw(PoleLocation::at(0.0), 3, {get(m, "mu4"), get(m, "mu5"), -1.0}),
                 tame(PoleLocation::infinity())};
      break;
    case CaseId::T3S:
      weak("mu2");
      d.poles = {twis(PoleLocation::at(0.0), 3, {get(m, "mu4"), -1.0, zero}),
                 tame(PoleLocation::infinity())};
      break;
    case CaseId::U2U2:
      d.poles = {untw(PoleLocation::at(0.0), 2, {get(m, "mu3"), -1.0}),
                 untw(PoleLocation::infinity(), 2, {get(m, "mu1"), get(m, "mu0")})};
      break;
    case CaseId::U2T2:
      d.poles = {untw(PoleLocation::at(0.0), 2, {get(m, "mu3"), -1.0}),
                 twis(PoleLocation::infinity(), 2, {get(m, "mu1"), zero})};
      break;
    case CaseId::T2T2:
      d.poles = {twis(PoleLocation::at(0.0), 2, {-1.0, zero}),
                 twis(PoleLocation::infinity(), 2, {get(m, "mu1"), zero})};
      break;
    case CaseId::U2SS:
      weak("mu0");
      weak("mu1");
      d.poles = {tame(PoleLocation::at(0.0)), tame(PoleLocation::at(1.0)),
                 untw(PoleLocation::infinity(), 2, {get(m, "mu3"), get(m, "mu4")})};
      break;
    case CaseId::T2SS:
      weak("mu0");
      weak("mu1");
      d.poles = {tame(PoleLocation::at(0.0)), tame(PoleLocation::at(1.0)),
                 twis(PoleLocation::infinity(), 2, {get(m, "mu3"), zero})};
      break;
  }
  d.validate();
  return d;
}

BasePoint case_base_point(CaseId id, const MuMap& mus, double t) {
  IrregularDivisor d = case_divisor(id, mus);
  return build_base_point(d, {1.0}, {t});
}

std::vector<cplx> case_root_predictions(CaseId id, cplx t, const MuMap& raw_mus) {
  MuMap m = resolve_mu(id, raw_mus);
  std::vector<cplx> p;
  switch (id) {
    case CaseId::U4: {
      cplx mu6 = get(m, "mu6"), mu7 = get(m, "mu7");
      cplx e = std::pow(t, -0.25);
      for (int k = 1; k <= 4; ++k) {
        cplx a = std::polar(1.0, kPi / 2.0 * (k - 1));
        double sgn = (k % 2 == 0) ? 1.0 : -1.0;
        p.push_back(e * a + e * e * sgn * mu7 / 4.0 +
                    e * e * e / a * (-mu6 / 4.0 - mu7 * mu7 / 32.0));
      }
      break;
    }
    case CaseId::T4: {
      cplx mu5 = get(m, "mu5"), mu6 = get(m, "mu6");
      cplx e = std::pow(t, -1.0 / 3.0);
      for (int k = 1; k <= 3; ++k) {
        cplx a = std::pow(kOmega, k - 1);
        p.push_back(e * a - mu6 * (a * a) * e * e / 3.0 - mu5 * e * e * e / 3.0);
      }
      break;
    }
    case CaseId::U3S: {
      cplx mu2 = get(m, "mu2"), mu5 = get(m, "mu5");
      cplx T = std::pow(t, 1.0 / 3.0);
      for (int k = 1; k <= 3; ++k) p.push_back(T * std::pow(kOmega, k - 1) + mu5 / 3.0);
      p.push_back(-mu2 / t);
      break;
    }
    case CaseId::T3S: {
      cplx mu2 = get(m, "mu2"), mu4 = get(m, "mu4");
      cplx T = std::pow(t, 0.5);
      cplx A = T + mu4 * mu4 / (8.0 * T);
      p.push_back(A + mu4 / 2.0);
      p.push_back(-A + mu4 / 2.0);
      p.push_back(-mu2 / t);
      break;
    }
    case CaseId::U2U2: {
      cplx mu0 = get(m, "mu0"), mu1 = get(m, "mu1"), mu3 = get(m, "mu3");
      cplx e = std::pow(t, -0.5);
      p.push_back(e - mu3 / (2.0 * t));
      p.push_back(-e - mu3 / (2.0 * t));
      cplx big = std::pow(-mu0, -0.5) * std::pow(t, 0.5);
      p.push_back(big - mu1 / (2.0 * mu0));
      p.push_back(-big - mu1 / (2.0 * mu0));
      break;
    }
    case CaseId::U2T2: {
      cplx mu1 = get(m, "mu1"), mu3 = get(m, "mu3");
      cplx e = std::pow(t, -0.5);
      p.push_back(e - mu3 / (2.0 * t));
      p.push_back(-e - mu3 / (2.0 * t));
      p.push_back(-t / mu1 + mu3 / t);
      break;
    }
    case CaseId::T2T2: {
      cplx mu1 = get(m, "mu1");
      p.push_back(1.0 / t - mu1 / (t * t * t));
      p.push_back(-t / mu1 - 1.0 / t);
      break;
    }
    case CaseId::U2SS: {
      cplx mu0 = get(m, "mu0"), mu1 = get(m, "mu1"), mu3 = get(m, "mu3"),
           mu4 = get(m, "mu4");
      p.push_back(mu0 / t);
      p.push_back(1.0 - mu1 / t);
      cplx big = std::pow(-mu4, -0.5) * std::pow(t, 0.5);
      cplx shift = (1.0 - mu3 / mu4) / 2.0;
      p.push_back(big + shift);
      p.push_back(-big + shift);
      break;
    }
    case CaseId::T2SS: {
      cplx mu0 = get(m, "mu0"), mu1 = get(m, "mu1"), mu3 = get(m, "mu3");
      p.push_back(mu0 / t);
      p.push_back(1.0 - mu1 / t);
      p.push_back(-t / mu3 + (1.0 - (mu0 + mu1) / mu3));
      break;
    }
  }
  return p;
}

cplx cross_ratio(const CrossRatioEntry& a, const CrossRatioEntry& b,
                 const CrossRatioEntry& c, const CrossRatioEntry& d) {
  // ((a-b)(c-d)) / ((c-b)(a-d)); infinite entries cancel in pairs
  auto diff_or_one = [](const CrossRatioEntry& x, const CrossRatioEntry& y) -> cplx {
    if (x.at_infinity || y.at_infinity) return 1.0;  // paired against the matching factor
    return x.value - y.value;
  };
  int inf_count = a.at_infinity + b.at_infinity + c.at_infinity + d.at_infinity;
  if (inf_count > 1)
    throw std::invalid_argument("cross_ratio: at most one entry may be infinite");
  cplx num = diff_or_one(a, b) * diff_or_one(c, d);
  cplx den = diff_or_one(c, b) * diff_or_one(a, d);
  if (den == cplx(0.0)) throw std::invalid_argument("cross_ratio: degenerate entries");
  return num / den;
}

namespace {

// min-cost assignment of slot predictions to computed roots (k <= 4:
// enumerate permutations); near-ties are an error, not a guess.
std::vector<int> match_slots(const std::vector<cplx>& predictions,
                             const std::vector<cplx>& roots) {
  const size_t k = predictions.size();
  if (roots.size() != k)
    throw std::invalid_argument("slot matching: root count does not match the case");
  std::vector<int> perm(k);
  for (size_t i = 0; i < k; ++i) perm[i] = static_cast<int>(i);
  std::vector<int> best;
  double best_cost = 0.0, second_cost = 0.0;
  std::vector<int> idx = perm;
  do {
    double cost = 0.0;
    for (size_t i = 0; i < k; ++i) cost += std::abs(predictions[i] - roots[idx[i]]);
    if (best.empty() || cost < best_cost) {
      second_cost = best.empty() ? 0.0 : best_cost;
      if (best.empty()) second_cost = std::numeric_limits<double>::infinity();
      best_cost = cost;
      best = idx;
    } else if (cost < second_cost) {
      second_cost = cost;
    }
  } while (std::next_permutation(idx.begin(), idx.end()));
  if (k > 1 && !(second_cost > best_cost * (1.0 + 1e-9)))
    throw std::runtime_error("slot matching: ambiguous root-to-prediction assignment");
  return best;
}

std::vector<cplx> slotted_roots(CaseId id, cplx t, const MuMap& mus,
                                const std::vector<cplx>& roots) {
  std::vector<cplx> preds = case_root_predictions(id, t, mus);
  std::vector<int> perm = match_slots(preds, roots);
  std::vector<cplx> out(preds.size());
  for (size_t i = 0; i < preds.size(); ++i) out[i] = roots[perm[i]];
  return out;
}

}  // namespace

cplx fiber_cross_ratio(CaseId id, cplx t, const MuMap& mus,
                       const std::vector<cplx>& roots) {
  std::vector<cplx> s = slotted_roots(id, t, mus, roots);
  using E = CrossRatioEntry;
  switch (id) {
    case CaseId::U4:
      return cross_ratio(E::of(s[3]), E::of(s[0]), E::of(s[2]), E::of(s[1]));
    case CaseId::T4:
      return cross_ratio(E::of(s[1]), E::of(0.0), E::of(s[2]), E::of(s[0]));
    case CaseId::U3S:
      return cross_ratio(E::of(s[0]), E::of(s[1]), E::of(s[2]), E::of(s[3]));
    case CaseId::T3S:
      return cross_ratio(E::of(s[2]), E::of(s[1]), E::of(s[0]), E::inf());
    case CaseId::U2U2:
      return cross_ratio(E::of(s[0]), E::of(s[1]), E::of(s[2]), E::of(s[3]));
    case CaseId::U2T2:
      return cross_ratio(E::of(s[0]), E::of(s[1]), E::inf(), E::of(s[2]));
    case CaseId::T2T2:
      return cross_ratio(E::of(s[0]), E::of(0.0), E::inf(), E::of(s[1]));
    case CaseId::U2SS:
      return cross_ratio(E::of(s[0]), E::of(s[1]), E::of(s[2]), E::of(s[3]));
    case CaseId::T2SS:
      return cross_ratio(E::of(s[0]), E::of(s[1]), E::inf(), E::of(s[2]));
  }
  throw std::logic_error("fiber_cross_ratio: unknown case");
}

cplx cross_ratio_reference(CaseId id, cplx t, const MuMap& raw_mus) {
  MuMap m = resolve_mu(id, raw_mus);
  switch (id) {
    case CaseId::U4: {
      cplx mu7 = get(m, "mu7");
      return 0.5 + cplx(0.0, 3.0 / 32.0) * mu7 * mu7 * std::pow(t, -0.5);
    }
    case CaseId::T4: {
      cplx mu5 = get(m, "mu5"), mu6 = get(m, "mu6");
      return std::polar(1.0, -kPi / 3.0) +
             std::polar(1.0, kPi / 6.0) / (3.0 * std::sqrt(3.0)) *
                 (3.0 * mu5 + mu6 * mu6) * std::pow(t, -2.0 / 3.0);
    }
    case CaseId::U3S: {
      // printed constant corresponds to mu5 = 3; general coefficient mu5/3
      cplx mu5 = get(m, "mu5");
      return std::polar(1.0, -kPi / 3.0) +
             std::sqrt(3.0) * cplx(0.0, 1.0) * (mu5 / 3.0) * std::pow(t, -1.0 / 3.0);
    }
    case CaseId::T3S: {
      cplx mu4 = get(m, "mu4");
      return 0.5 - mu4 / 4.0 * std::pow(t, -0.5);
    }
    case CaseId::U2U2: {
      cplx mu0 = get(m, "mu0"), mu1 = get(m, "mu1"), mu3 = get(m, "mu3");
      cplx r = std::sqrt(-mu0);
      return 4.0 * r / t +
             (8.0 * mu0 + (mu1 * mu1 - mu0 * mu3 * mu3) / (2.0 * r)) / (t * t);
    }
    case CaseId::U2T2: {
      cplx mu1 = get(m, "mu1"), mu3 = get(m, "mu3");
      return 2.0 * mu1 * std::pow(t, -1.5) +
             mu1 * mu3 * mu3 / 4.0 * std::pow(t, -2.5);
    }
    case CaseId::T2T2: {
      cplx mu1 = get(m, "mu1");
      return mu1 / (t * t) - 3.0 * mu1 * mu1 / (t * t * t * t);
    }
    case CaseId::U2SS: {
      cplx mu4 = get(m, "mu4");
      return -2.0 * std::sqrt(-mu4) * std::pow(t, -0.5) + 2.0 * mu4 / t;
    }
    case CaseId::T2SS: {
      // printed subleading corresponds to mu0 = mu1 = 0, mu3 = 1
      cplx mu0 = get(m, "mu0"), mu1 = get(m, "mu1"), mu3 = get(m, "mu3");
      return -mu3 / t + (2.0 * (mu0 + mu1) - mu3) * mu3 / (t * t);
    }
  }
  throw std::logic_error("cross_ratio_reference: unknown case");
}

cplx tau_expansion_reference(CaseId id, cplx t, const MuMap& raw_mus) {
  MuMap m = resolve_mu(id, raw_mus);
  const cplx i(0.0, 1.0);
  switch (id) {
    case CaseId::U4: {
      cplx K = elliptic_K(std::sqrt(cplx(0.5)));
      cplx mu7 = get(m, "mu7");
      return i + 3.0 * kPi * mu7 * mu7 / (32.0 * K * K) * std::pow(t, -0.5);
    }
    case CaseId::T4: {
      cplx K = elliptic_K(std::polar(1.0, -kPi / 6.0));
      cplx mu5 = get(m, "mu5"), mu6 = get(m, "mu6");
      return kOmega + std::polar(1.0, -kPi / 3.0) * kPi * (3.0 * mu5 + mu6 * mu6) /
                          (12.0 * std::sqrt(3.0) * K * K) * std::pow(t, -2.0 / 3.0);
    }
    case CaseId::U3S: {
      cplx K = elliptic_K(std::polar(1.0, -kPi / 6.0));
      cplx mu5 = get(m, "mu5");
      return kOmega + std::sqrt(3.0) * kPi / (4.0 * K * K) * (mu5 / 3.0) *
                          std::pow(t, -1.0 / 3.0);
    }
    case CaseId::T3S: {
      cplx K = elliptic_K(std::sqrt(cplx(0.5)));
      cplx mu4 = get(m, "mu4");
      return i + mu4 * kPi * i / (4.0 * K * K) * std::pow(t, -0.5);
    }
    case CaseId::U2U2: {
      cplx mu0 = get(m, "mu0"), mu1 = get(m, "mu1"), mu3 = get(m, "mu3");
      return i / kPi *
             (std::log(4.0 * std::pow(-mu0, -0.5) * t) +
              (mu1 * mu1 / mu0 - mu3 * mu3) / 8.0 / t);
    }
    case CaseId::U2T2: {
      // the printed -mu1 t^{-3/2} term cancels in the series inversion
      cplx mu1 = get(m, "mu1"), mu3 = get(m, "mu3");
      return i / kPi *
             (std::log(8.0 / mu1 * std::pow(t, 1.5)) - mu3 * mu3 / 8.0 / t);
    }
    case CaseId::T2T2: {
      cplx mu1 = get(m, "mu1");
      return i / kPi * (std::log(16.0 / mu1 * t * t) + 2.5 * mu1 / (t * t));
    }
    case CaseId::U2SS: {
      cplx mu4 = get(m, "mu4");
      return i / kPi * std::log(-8.0 * std::pow(-mu4, -0.5) * std::pow(t, 0.5));
    }
    case CaseId::T2SS: {
      cplx mu0 = get(m, "mu0"), mu1 = get(m, "mu1"), mu3 = get(m, "mu3");
      return i / kPi *
             (std::log(-16.0 / mu3 * t) + (2.0 * (mu0 + mu1) - mu3 / 2.0) / t);
    }
  }
  throw std::logic_error("tau_expansion_reference: unknown case");
}

cplx fiber_tau(CaseId id, cplx t, const MuMap& mus, std::optional<cplx> branch_hint) {
  ComplexPolynomial tilde = case_tilde(id, t, mus);
  std::vector<cplx> roots = find_roots(tilde);
  cplx l = fiber_cross_ratio(id, t, mus, roots);
  cplx tau0 = inverse_modular_lambda(l);
  cplx target = branch_hint ? *branch_hint : tau_expansion_reference(id, t, mus);
  return gamma2_nearest(tau0, target);
}

std::vector<TauSweepPoint> fiber_tau_sweep(CaseId id, const std::vector<double>& ts,
                                           const MuMap& mus) {
  std::vector<double> sorted = ts;
  std::sort(sorted.begin(), sorted.end());
  std::vector<TauSweepPoint> out(sorted.size());
  std::optional<cplx> hint;  // first processed point (largest t) uses the reference
  for (int k = static_cast<int>(sorted.size()) - 1; k >= 0; --k) {
    double t = sorted[k];
    TauSweepPoint pt;
    pt.t = t;
    ComplexPolynomial tilde = case_tilde(id, t, mus);
    pt.l = fiber_cross_ratio(id, t, mus, find_roots(tilde));
    cplx tau0 = inverse_modular_lambda(pt.l);
    cplx target = hint ? *hint : tau_expansion_reference(id, t, mus);
    pt.tau = gamma2_nearest(tau0, target);
    pt.tau_ref = tau_expansion_reference(id, t, mus);
    hint = pt.tau;
    out[k] = pt;
  }
  return out;
}

namespace {

// density polynomial: the fully cleared spectral polynomial (forced roots at
// finite twisted centers restored) in the case's primary chart; the density
// is 1/|B| in that chart and 1/|rev_4 B| in the other.
ComplexPolynomial case_density_poly(CaseId id, cplx t, const MuMap& mus) {
  ComplexPolynomial p = case_tilde(id, t, mus);
  if (id == CaseId::T4 || id == CaseId::T2T2) {
    // twisted pole at the primary-chart origin
    p.coeffs.insert(p.coeffs.begin(), cplx(0.0));
  }
  return p;
}

}  // namespace

SkValue sk_metric_numeric(CaseId id, cplx t, const MuMap& raw_mus, double rel_tol) {
  if (std::abs(t) < 10.0)
    throw std::invalid_argument("sk_metric_numeric: |t| must be at least 10");
  MuMap m = resolve_mu(id, raw_mus);
  const FourDimCase& info = case_info(id);
  ComplexPolynomial B1 = case_density_poly(id, t, m);

  double R = info.seam_radius;
  for (int attempt = 0;; ++attempt) {
    ComplexPolynomial B2 = reverse_to_degree(B1, 4);
    std::vector<cplx> r1 = find_roots(B1.normalized(1e-300));
    std::vector<cplx> r2 = find_roots(B2.normalized(1e-300));

    // regular locus: all singular points simple
    auto check_sep = [&](const std::vector<cplx>& rs) {
      for (size_t i = 0; i < rs.size(); ++i)
        for (size_t j = i + 1; j < rs.size(); ++j)
          if (std::abs(rs[i] - rs[j]) <
              1e-8 * std::max(1.0, std::pow(std::abs(t), 0.25)))
            throw std::runtime_error("sk_metric_numeric: non-regular base point");
    };
    check_sep(r1);

    bool seam_ok = true;
    for (const auto& r : r1)
      if (std::abs(std::abs(r) - R) < 0.05 * R) seam_ok = false;
    if (!seam_ok) {
      if (attempt >= 3)
        throw std::runtime_error("sk_metric_numeric: root pinned to the chart seam");
      R *= 1.6180339887;  // re-seam by radius
      continue;
    }

    auto density1 = [&](cplx z) { return 1.0 / std::abs(B1.eval(z)); };
    auto density2 = [&](cplx w) { return 1.0 / std::abs(B2.eval(w)); };
    Quad2DOptions qopts;
    qopts.rel_tol = rel_tol;
    Quad2DResult q1 = integrate_disk(density1, r1, R, qopts);
    Quad2DResult q2 = integrate_disk(density2, r2, 1.0 / R, qopts);
    SkValue v;
    v.value = q1.value + q2.value;
    v.error_estimate = q1.error_estimate + q2.error_estimate;
    return v;
  }
}

SkFitReport sk_leading_fit(CaseId id,
                           const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 5)
    throw std::invalid_argument("sk_leading_fit: need at least 5 samples");
  double span = samples.back().first / samples.front().first;
  if (span < 99.0)
    throw std::invalid_argument("sk_leading_fit: samples must span two decades of |t|");
  const FourDimCase& info = case_info(id);
  SkFitReport rep;
  rep.conic = info.sk_form.conic;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(samples.size());
  for (const auto& [t, g] : samples) {
    double x = std::log(t);
    double y = rep.conic ? std::log(g) : g * t;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double det = n * sxx - sx * sx;
  rep.slope = (n * sxy - sx * sy) / det;
  rep.intercept = (sy - rep.slope * sx) / n;
  double ybar = sy / n, ss_tot = 0, ss_res = 0;
  for (const auto& [t, g] : samples) {
    double x = std::log(t);
    double y = rep.conic ? std::log(g) : g * t;
    double pred = rep.intercept + rep.slope * x;
    ss_tot += (y - ybar) * (y - ybar);
    ss_res += (y - pred) * (y - pred);
  }
  rep.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  rep.expected_slope =
      rep.conic ? -info.sk_form.conic_exponent : info.sk_form.log_coefficient;
  if (rep.conic) rep.fitted_cone_angle = 2.0 * kPi * (1.0 + rep.slope / 2.0);
  return rep;
}

TorusMetric torus_pullback_metric(cplx tau, cplx tau_hat) {
  if (!(tau.imag() > 0.0) || !(tau_hat.imag() > 0.0))
    throw std::domain_error("torus_pullback_metric: moduli need positive imaginary part");
  double s = tau_hat.imag() / tau.imag();  // (c_t / c-hat)^2
  double a = (tau - tau_hat).real() / tau_hat.imag();
  double b = tau.imag() / tau_hat.imag();
  TorusMetric g;
  g.m11 = s;
  g.m12 = s * a;
  g.m22 = s * (a * a + b * b);
  return g;
}

bool fiber_curve_check(CaseId id, cplx t, const MuMap& raw_mus, cplx a0, cplx c0) {
  MuMap m = resolve_mu(id, raw_mus);
  ComplexPolynomial tilde = case_tilde(id, t, m);
  cplx tv = tilde.eval(-c0);
  cplx lhs, rhs;
  switch (id) {
    case CaseId::U4:
    case CaseId::T3S:
    case CaseId::U2T2:
    case CaseId::U2SS:
    case CaseId::T2SS:
      lhs = a0 * a0;
      rhs = -tv;
      break;
    case CaseId::T4:
    case CaseId::T2T2:
      lhs = a0 * a0;
      rhs = c0 * tv;
      break;
    case CaseId::U3S:
      lhs = (a0 + c0 * c0) * (a0 + c0 * c0);
      rhs = -tv;
      break;
    case CaseId::U2U2: {
      cplx r = std::sqrt(-get(m, "mu0"));
      lhs = (a0 + r * c0 * c0) * (a0 + r * c0 * c0);
      rhs = -tv;
      break;
    }
  }
  // backward-error scale: the relation can only be meaningful relative to the
  // evaluation magnitude of the polynomial data entering it
  double scale =
      std::max({std::abs(lhs), std::abs(rhs), evaluation_scale(tilde, -c0), 1e-30});
  return std::abs(lhs - rhs) <= 1e-9 * scale;
}

GibbonsHawking gibbons_hawking_potential(double kappa0, double nu, double r) {
  if (!(r > 0.0)) throw std::domain_error("gibbons_hawking_potential: r must be positive");
  double V = kappa0 + nu / kPi * std::log(r);
  if (!(V > 0.0))
    throw std::domain_error("gibbons_hawking_potential: potential not positive at r");
  GibbonsHawking g;
  g.V = V;
  g.coeff[0] = g.coeff[1] = g.coeff[2] = V;
  g.coeff[3] = 1.0 / V;
  return g;
}

}  // namespace hitchin
