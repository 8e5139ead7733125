#include "hitchin/divisor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace hitchin {

using nlohmann::json;

const char* pole_kind_name(PoleKind k) {
  switch (k) {
    case PoleKind::untwisted: return "untwisted";
    case PoleKind::twisted: return "twisted";
    case PoleKind::tame: return "tame";
  }
  return "?";
}

cplx PoleDatum::mu_at(int a) const {
  int idx = a - order - 1;
  if (idx < 0 || idx >= static_cast<int>(mu.size()))
    throw std::out_of_range("mu_at: index outside m+1..2m");
  return mu[idx];
}

int IrregularDivisor::total_order() const {
  int n = 0;
  for (const auto& p : poles) n += p.order;
  return n;
}

bool IrregularDivisor::has_tame() const {
  return std::any_of(poles.begin(), poles.end(),
                     [](const PoleDatum& p) { return p.kind == PoleKind::tame; });
}

bool IrregularDivisor::has_infinity() const {
  return std::any_of(poles.begin(), poles.end(),
                     [](const PoleDatum& p) { return p.location.at_infinity; });
}

int IrregularDivisor::designated_pole() const {
  int first_untwisted = -1, first_twisted = -1;
  for (int i = 0; i < pole_count(); ++i) {
    const auto& p = poles[i];
    if (p.kind == PoleKind::untwisted) {
      if (!p.location.at_infinity && p.location.z == cplx(0.0)) return i;
      if (first_untwisted < 0) first_untwisted = i;
    } else if (p.kind == PoleKind::twisted) {
      if (first_twisted < 0) first_twisted = i;
    }
  }
  if (first_untwisted >= 0) return first_untwisted;
  if (first_twisted >= 0) return first_twisted;
  throw std::invalid_argument("designated_pole: divisor has no irregular pole");
}

void IrregularDivisor::validate() const {
  if (poles.empty()) throw std::invalid_argument("divisor: no poles");
  int irregular = 0;
  for (size_t i = 0; i < poles.size(); ++i) {
    const auto& p = poles[i];
    std::string tag = "pole " + std::to_string(i) + ": ";
    if (p.order < 1) throw std::invalid_argument(tag + "order must be positive");
    if (p.kind == PoleKind::tame) {
      if (p.order != 1) throw std::invalid_argument(tag + "tame pole must have order 1");
      if (!p.mu.empty())
        throw std::invalid_argument(tag + "tame pole carries no mu data");
    } else {
      if (p.order < 2)
        throw std::invalid_argument(tag + "irregular pole needs order >= 2");
      ++irregular;
      if (static_cast<int>(p.mu.size()) != p.order)
        throw std::invalid_argument(tag + "mu list must have m entries (a = m+1..2m)");
      cplx top = p.mu.back();
      if (p.kind == PoleKind::untwisted) {
        if (top == cplx(0.0))
          throw std::invalid_argument(tag + "untwisted pole needs mu_{2m} != 0");
      } else {
        if (top != cplx(0.0))
          throw std::invalid_argument(tag + "twisted pole needs mu_{2m} = 0");
        if (p.order >= 2 && p.mu[p.order - 2] == cplx(0.0))
          throw std::invalid_argument(tag + "twisted pole needs mu_{2m-1} != 0");
        if (std::abs(p.weight1 - 0.25) > 1e-12 || std::abs(p.weight2 - 0.75) > 1e-12)
          throw std::invalid_argument(tag + "twisted pole weights must be (1/4, 3/4)");
      }
    }
    if (std::abs(p.weight1 + p.weight2 - 1.0) > 1e-12)
      throw std::invalid_argument(tag + "weights must sum to 1");
    if (!(p.weight2 > 0.5 && p.weight2 < 1.0))
      throw std::invalid_argument(tag + "alpha_2 must lie in (1/2, 1)");
    for (size_t j = 0; j < i; ++j)
      if (poles[j].location == p.location)
        throw std::invalid_argument(tag + "duplicate pole location");
  }
  if (irregular == 0)
    throw std::invalid_argument("divisor: at least one pole must be irregular");
  if (total_order() < 4)
    throw std::invalid_argument("divisor: N = sum m_x must be >= 4");
}

namespace {

// Deterministic order for the default y_x choice: finite poles by (re, im),
// infinity last.
bool location_less(const PoleLocation& a, const PoleLocation& b) {
  if (a.at_infinity != b.at_infinity) return !a.at_infinity;
  if (a.at_infinity) return false;
  if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
  return a.z.imag() < b.z.imag();
}

}  // namespace

BasePoint build_base_point(const IrregularDivisor& divisor,
                           const std::vector<cplx>& free_coeffs,
                           const std::vector<double>& scalings) {
  divisor.validate();
  const int N = divisor.total_order();
  if (static_cast<int>(free_coeffs.size()) != N - 3)
    throw std::invalid_argument("build_base_point: need N-3 free coefficients");
  BasePoint b;
  b.divisor = divisor;
  b.free_coeffs = free_coeffs;
  b.scalings = scalings.empty() ? std::vector<double>(free_coeffs.size(), 1.0)
                                : scalings;
  if (b.scalings.size() != free_coeffs.size())
    throw std::invalid_argument("build_base_point: scalings length mismatch");
  for (double s : b.scalings)
    if (!(s > 0.0)) throw std::invalid_argument("build_base_point: scalings must be positive");

  // f_i = o(t^{(m0+i)/(N-4+m0)}) relative to f_{N-4} = t; warn, don't reject.
  const int m0 = divisor.poles[divisor.designated_pole()].order;
  const double t = b.scalings.back();
  if (t > 1.0) {
    for (int i = 0; i + 1 < static_cast<int>(b.scalings.size()); ++i) {
      double cap = std::pow(t, static_cast<double>(m0 + i) / (N - 4 + m0));
      if (b.scalings[i] > cap) {
        std::ostringstream os;
        os << "scaling f_" << i << " = " << b.scalings[i]
           << " exceeds the growth cap t^{(m0+i)/(N-4+m0)} = " << cap;
        b.warnings.push_back(os.str());
      }
    }
  }

  for (int i = 0; i < divisor.pole_count(); ++i) {
    const auto& p = divisor.poles[i];
    if (p.order != 2 || p.kind == PoleKind::tame) continue;
    if (b.y_choices.count(i)) continue;
    const PoleLocation* best = nullptr;
    for (int j = 0; j < divisor.pole_count(); ++j) {
      if (j == i) continue;
      if (!best || location_less(divisor.poles[j].location, *best))
        best = &divisor.poles[j].location;
    }
    b.y_choices[i] = *best;  // pole count >= 2 whenever an order-two pole exists (N >= 4)
  }
  return b;
}

namespace {

// prod over finite poles (z - x)^{e_x} with per-pole exponents.
ComplexPolynomial finite_pole_product(const IrregularDivisor& d, int mult) {
  ComplexPolynomial prod = monomial(0, 1.0);
  for (const auto& p : d.poles)
    if (!p.location.at_infinity) prod = prod * linear_power(p.location.z, mult * p.order);
  return prod;
}

ComplexPolynomial finite_pole_product_excluding(const IrregularDivisor& d, int skip,
                                                int mult) {
  ComplexPolynomial prod = monomial(0, 1.0);
  for (int j = 0; j < d.pole_count(); ++j) {
    if (j == skip) continue;
    const auto& p = d.poles[j];
    if (!p.location.at_infinity) prod = prod * linear_power(p.location.z, mult * p.order);
  }
  return prod;
}

}  // namespace

ComplexPolynomial tilde_nu(const BasePoint& base) {
  const auto& d = base.divisor;
  const int N = d.total_order();
  ComplexPolynomial acc;
  acc.coeffs = {cplx(0.0)};

  for (int i = 0; i < d.pole_count(); ++i) {
    const auto& p = d.poles[i];
    if (p.kind == PoleKind::tame) continue;
    const int m = p.order;
    if (!p.location.at_infinity) {
      const cplx x = p.location.z;
      if (m >= 3) {
        for (int a = m + 1; a <= 2 * m; ++a) {
          cplx mu = p.mu_at(a);
          if (mu == cplx(0.0)) continue;
          acc += scale(linear_power(x, 2 * m - a) *
                           finite_pole_product_excluding(d, i, 2),
                       mu);
        }
      } else {  // order two: mu_4 slot plus the y_x cross term for mu_3
        cplx mu4 = p.mu_at(4);
        if (mu4 != cplx(0.0))
          acc += scale(finite_pole_product_excluding(d, i, 2), mu4);
        cplx mu3 = p.mu_at(3);
        if (mu3 != cplx(0.0)) {
          PoleLocation y = base.y_choices.at(i);
          if (y.at_infinity) {
            // lim_{y->inf} (x-y)/(z-y) = 1: plain mu_3/(z-x)^3 term
            acc += scale(linear_power(x, 1) * finite_pole_product_excluding(d, i, 2),
                         mu3);
          } else {
            // mu_3 (x-y)/((z-x)^3 (z-y)): one factor of (z-y) cancels
            ComplexPolynomial rest = monomial(0, 1.0);
            for (int j = 0; j < d.pole_count(); ++j) {
              if (j == i) continue;
              const auto& q = d.poles[j];
              if (q.location.at_infinity) continue;
              int e = 2 * q.order - (q.location == y ? 1 : 0);
              rest = rest * linear_power(q.location.z, e);
            }
            acc += scale(linear_power(x, 1) * rest, mu3 * (x - y.z));
          }
        }
      }
    } else {
      // Pole at infinity: principal part mu_a / w^a maps to mu_a z^{a-4}
      // against the dz^2 chart factor; a >= 4 terms are monomials, the a = 3
      // order-two cross term with finite partner y becomes mu_3/(z - y).
      for (int a = m + 1; a <= 2 * m; ++a) {
        cplx mu = p.mu_at(a);
        if (mu == cplx(0.0)) continue;
        if (m == 2 && a == 3) {
          PoleLocation y = base.y_choices.at(i);  // finite: infinity is this pole
          ComplexPolynomial rest = monomial(0, 1.0);
          for (int j = 0; j < d.pole_count(); ++j) {
            const auto& q = d.poles[j];
            if (q.location.at_infinity) continue;
            int e = 2 * q.order - (q.location == y ? 1 : 0);
            rest = rest * linear_power(q.location.z, e);
          }
          acc += scale(rest, mu);
        } else {
          if (a < 4)
            throw std::invalid_argument(
                "tilde_nu: unsupported principal term at infinity (a < 4)");
          acc += scale(monomial(a - 4, 1.0) * finite_pole_product(d, 2), mu);
        }
      }
    }
  }

  // Free part (sum_b nu_b z^b) / prod (z-x)^{m_x} over finite poles.
  ComplexPolynomial freepoly;
  freepoly.coeffs.assign(base.free_coeffs.size(), cplx(0.0));
  for (size_t bidx = 0; bidx < base.free_coeffs.size(); ++bidx)
    freepoly.coeffs[bidx] = base.scaled_coeff(static_cast<int>(bidx));
  acc += freepoly * finite_pole_product(d, 1);

  acc = acc.normalized(0.0);
  acc.chart = Chart::z;
  if (acc.degree() > 2 * N - 4)
    throw std::logic_error("tilde_nu: degree exceeds 2N-4");
  return acc;
}

ComplexPolynomial tilde_nu_reduced(const BasePoint& base) {
  ComplexPolynomial p = tilde_nu(base);
  for (const auto& pole : base.divisor.poles) {
    if (pole.kind != PoleKind::twisted || pole.location.at_infinity) continue;
    // synthetic division by (z - x); remainder is zero by construction
    const cplx x = pole.location.z;
    std::vector<cplx> q(p.coeffs.size() - 1, cplx(0.0));
    cplx carry = 0.0;
    for (int k = static_cast<int>(p.coeffs.size()) - 1; k >= 1; --k) {
      carry = p.coeffs[k] + carry * x;
      q[k - 1] = carry;
    }
    cplx rem = p.coeffs[0] + carry * x;
    if (std::abs(rem) > 1e-9 * (1.0 + evaluation_scale(p, x)))
      throw std::logic_error("tilde_nu_reduced: twisted center is not a root");
    p.coeffs = std::move(q);
  }
  return p;
}

ComplexPolynomial tilde_nu_w_chart(const BasePoint& base) {
  const int N = base.divisor.total_order();
  return reverse_to_degree(tilde_nu(base), 2 * N - 4);
}

cplx eval_nu(const BasePoint& base, cplx z) {
  ComplexPolynomial tn = tilde_nu(base);
  cplx denom = 1.0;
  for (const auto& p : base.divisor.poles)
    if (!p.location.at_infinity)
      for (int k = 0; k < 2 * p.order; ++k) denom *= (z - p.location.z);
  return tn.eval(z) / denom;
}

namespace {
void sigma_min(Sigma& s, long long num, long long den) {
  if (static_cast<__int128>(num) * s.den < static_cast<__int128>(s.num) * den) {
    long long g = std::gcd(num, den);
    s.num = num / g;
    s.den = den / g;
  }
}
}  // namespace

Sigma compute_sigma(const IrregularDivisor& divisor) {
  divisor.validate();
  const int N = divisor.total_order();
  const int d0 = divisor.designated_pole();
  const int m0 = divisor.poles[d0].order;
  Sigma s;
  s.num = m0 - 1;
  s.den = m0 + N - 4;
  {
    long long g = std::gcd(s.num, s.den);
    s.num /= g;
    s.den /= g;
  }
  for (int i = 0; i < divisor.pole_count(); ++i) {
    const auto& p = divisor.poles[i];
    if (p.kind == PoleKind::untwisted && i != d0) sigma_min(s, p.order - 1, p.order);
    if (p.kind == PoleKind::twisted) sigma_min(s, 2 * p.order - 3, 2 * (p.order - 1));
  }
  if (divisor.has_tame()) sigma_min(s, 1, 2);  // delta = 1; else the delta = 2 branch is 1
  else sigma_min(s, 1, 1);
  return s;
}

std::vector<cplx> local_diagonal_data(const IrregularDivisor& divisor, int pole_index) {
  if (pole_index < 0 || pole_index >= divisor.pole_count())
    throw std::out_of_range("local_diagonal_data: pole index");
  const auto& p = divisor.poles[pole_index];
  if (p.kind != PoleKind::untwisted)
    throw std::invalid_argument("local_diagonal_data: pole must be untwisted");
  const cplx mu_top = p.mu.back();
  if (mu_top == cplx(0.0))
    throw std::invalid_argument("local_diagonal_data: mu_{2m} must be nonzero");
  const cplx rho_m = std::sqrt(-mu_top);
  std::vector<cplx> rho = diag_rho_from_leading(rho_m, p.mu);
  // determinant check: -(sum rho_j z^-j)^2 must reproduce the principal part
  std::vector<cplx> pp = diag_principal_part(rho);
  double scale = 0.0;
  for (const auto& m : p.mu) scale = std::max(scale, std::abs(m));
  for (size_t i = 0; i < pp.size(); ++i)
    if (std::abs(pp[i] - p.mu[i]) > 1e-10 * std::max(1.0, scale))
      throw std::logic_error("local_diagonal_data: determinant verification failed");
  // returned with the leading coefficient first: rho_m ... rho_1
  std::reverse(rho.begin(), rho.end());
  return rho;
}

int stratum_dimension(const IrregularDivisor& divisor, int m) {
  divisor.validate();
  const int N = divisor.total_order();
  const int S = divisor.pole_count();
  const int lo = -(S / 2);  // ceil(-S/2) for S >= 0
  const int hi = (N - 2 - S) >= 0 ? (N - 2 - S) / 2 : -((S + 2 - N + 1) / 2);
  if (m < lo || m > hi)
    throw std::out_of_range("stratum_dimension: m outside the stratification range");
  if (2 * m == -S) return N - 3;
  return -2 * m - S + N - 2;
}

int spectral_line_degree(const IrregularDivisor& divisor, int degE) {
  return degE + divisor.total_order() - 2;
}

namespace {

json cplx_to_json(const cplx& c) { return json::array({c.real(), c.imag()}); }
cplx cplx_from_json(const json& j) { return cplx(j.at(0).get<double>(), j.at(1).get<double>()); }

json location_to_json(const PoleLocation& loc) {
  if (loc.at_infinity) return json("inf");
  return cplx_to_json(loc.z);
}

PoleLocation location_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return PoleLocation::infinity();
  return PoleLocation::at(cplx_from_json(j));
}

}  // namespace

std::string divisor_to_json(const IrregularDivisor& d) {
  json poles = json::array();
  for (const auto& p : d.poles) {
    json mu = json::array();
    for (const auto& m : p.mu) mu.push_back(cplx_to_json(m));
    poles.push_back(json{{"location", location_to_json(p.location)},
                         {"order", p.order},
                         {"kind", pole_kind_name(p.kind)},
                         {"mu", mu},
                         {"weights", json::array({p.weight1, p.weight2})}});
  }
  return json{{"poles", poles}}.dump(2);
}

IrregularDivisor divisor_from_json(const std::string& text) {
  json j = json::parse(text);
  IrregularDivisor d;
  for (const auto& pj : j.at("poles")) {
    PoleDatum p;
    p.location = location_from_json(pj.at("location"));
    p.order = pj.at("order").get<int>();
    std::string kind = pj.at("kind").get<std::string>();
    if (kind == "untwisted") p.kind = PoleKind::untwisted;
    else if (kind == "twisted") p.kind = PoleKind::twisted;
    else if (kind == "tame") p.kind = PoleKind::tame;
    else throw std::invalid_argument("divisor_from_json: unknown kind " + kind);
    for (const auto& mj : pj.at("mu")) p.mu.push_back(cplx_from_json(mj));
    p.weight1 = pj.at("weights").at(0).get<double>();
    p.weight2 = pj.at("weights").at(1).get<double>();
    d.poles.push_back(std::move(p));
  }
  d.validate();
  return d;
}

std::string base_point_to_json(const BasePoint& b) {
  json fc = json::array();
  for (const auto& c : b.free_coeffs) fc.push_back(cplx_to_json(c));
  json yc = json::object();
  for (const auto& [idx, loc] : b.y_choices) yc[std::to_string(idx)] = location_to_json(loc);
  return json{{"divisor", json::parse(divisor_to_json(b.divisor))},
              {"free_coeffs", fc},
              {"scalings", b.scalings},
              {"y_choices", yc}}
      .dump(2);
}

BasePoint base_point_from_json(const std::string& text) {
  json j = json::parse(text);
  IrregularDivisor d = divisor_from_json(j.at("divisor").dump());
  std::vector<cplx> fc;
  for (const auto& c : j.at("free_coeffs")) fc.push_back(cplx_from_json(c));
  std::vector<double> sc;
  if (j.contains("scalings")) sc = j.at("scalings").get<std::vector<double>>();
  BasePoint b = build_base_point(d, fc, sc);
  if (j.contains("y_choices"))
    for (auto it = j.at("y_choices").begin(); it != j.at("y_choices").end(); ++it)
      b.y_choices[std::stoi(it.key())] = location_from_json(it.value());
  return b;
}

}  // namespace hitchin
