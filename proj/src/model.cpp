#include "sigmak/model.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

namespace sigmak {

namespace {

void check_indices(int n, int i) {
  if (n < 2 || n > 33) {
    throw DomainError("n must satisfy 2 <= n <= 33, got " + std::to_string(n));
  }
  if (i < 1 || i > 2 * n - 1) {
    throw DomainError("i must satisfy 1 <= i <= 2n-1, got i=" + std::to_string(i) +
                      " for n=" + std::to_string(n));
  }
}

bool close_rel(double x, double y, double tol) {
  return std::abs(x - y) <= tol * std::max(1.0, std::abs(y));
}

// Root of a monotone f on [lo, hi] with f(lo), f(hi) of opposite signs.
template <class F>
double bisect(F f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// k * l(k), finite at k = 0 whenever i <= 2.
double k_times_l(const SigmaParams& p, double k) {
  if (p.c() == 0.0) return -p.b() * k * k;
  return p.sigma_tilde() * ipow(k, 2 - p.i()) - p.b() * k * k;
}

}  // namespace

std::uint64_t binomial(unsigned m, unsigned j) {
  if (m > 64 || j > m) {
    throw DomainError("binomial(" + std::to_string(m) + ", " + std::to_string(j) +
                      ") requires j <= m <= 64");
  }
  j = std::min(j, m - j);
  __extension__ unsigned __int128 acc = 1;
  for (unsigned t = 0; t < j; ++t) {
    acc = acc * (m - t) / (t + 1);
  }
  return static_cast<std::uint64_t>(acc);
}

double ipow(double k, int e) {
  if (e < 0) return 1.0 / ipow(k, -e);
  double result = 1.0;
  double base = k;
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

SigmaParams::SigmaParams(int n, int i, double c) : n_(n), i_(i), c_(c) {
  check_indices(n, i);
  if (!std::isfinite(c)) throw DomainError("c must be finite");
  weight_l_ = static_cast<double>(binomial(2 * n - 2, i - 1));
  weight_k_ = i <= 2 * n - 2 ? static_cast<double>(binomial(2 * n - 2, i)) : 0.0;
  sigma_tilde_ = c / weight_l_;
  a_ = static_cast<double>(2 * n + i - 1) / i;
  b_ = static_cast<double>(2 * n - i - 1) / i;
}

bool PhasePoint::finite() const { return std::isfinite(alpha) && std::isfinite(k); }

std::string_view to_string(RegionLabel label) {
  switch (label) {
    case RegionLabel::StationaryOrigin: return "StationaryOrigin";
    case RegionLabel::StationaryKc1: return "StationaryKc1";
    case RegionLabel::ConstantKLine: return "ConstantKLine";
    case RegionLabel::BandAboveKc1: return "BandAboveKc1";
    case RegionLabel::BandKc2ToKc1: return "BandKc2ToKc1";
    case RegionLabel::BandZeroToKc2: return "BandZeroToKc2";
    case RegionLabel::LowerHalf: return "LowerHalf";
    case RegionLabel::MirrorOfAbove: return "MirrorOfAbove";
  }
  return "?";
}

double l_of_k(const SigmaParams& params, double k) {
  if (params.c() == 0.0) return -params.b() * k;
  if (params.i() == 1) return params.sigma_tilde() - params.b() * k;
  if (k == 0.0) throw SingularityError("l(k) has a pole at k = 0 for i >= 2, c != 0");
  return params.sigma_tilde() / ipow(k, params.i() - 1) - params.b() * k;
}

double dl_dk(const SigmaParams& params, double k) {
  if (params.c() == 0.0 || params.i() == 1) return -params.b();
  if (k == 0.0) throw SingularityError("dl/dk has a pole at k = 0 for i >= 2, c != 0");
  return -(params.i() - 1) * params.sigma_tilde() / ipow(k, params.i()) - params.b();
}

double sigma_of(int n, int i, double l, double k) {
  check_indices(n, i);
  if (i == 2 * n - 1) return l * ipow(k, 2 * n - 2);
  const double wl = static_cast<double>(binomial(2 * n - 2, i - 1));
  const double wk = static_cast<double>(binomial(2 * n - 2, i));
  return wl * l * ipow(k, i - 1) + wk * ipow(k, i);
}

CriticalValues critical_k(const SigmaParams& params) {
  CriticalValues cv;
  const double c = params.c();
  if (c == 0.0) return cv;
  if (c < 0.0 && !params.odd_i()) return cv;  // k(k - l) > 0 everywhere

  const double inv_i = 1.0 / params.i();
  const double st = std::abs(params.sigma_tilde());
  // k^i = sigma_tilde / a  and  k^i = sigma_tilde / (1 + b)
  const double c2 = std::pow(st / params.a(), inv_i);
  const double c1 = std::pow(st / (1.0 + params.b()), inv_i);
  if (c > 0.0) {
    cv.k_c2_pos = c2;
    cv.k_c1_pos = c1;
    if (!params.odd_i()) {
      cv.k_c2_neg = -c2;
      cv.k_c1_neg = -c1;
    }
  } else {
    // odd i, c < 0: the only real roots are negative
    cv.k_c2_neg = -c2;
    cv.k_c1_neg = -c1;
  }
  assert(critical_k_bisection_discrepancy(params) < 1e-12);
  return cv;
}

double critical_k_bisection_discrepancy(const SigmaParams& params) {
  CriticalValues cv;
  {
    // Re-derive without the assertion to avoid recursion.
    const double c = params.c();
    if (c == 0.0 || (c < 0.0 && !params.odd_i())) return 0.0;
    const double inv_i = 1.0 / params.i();
    const double st = std::abs(params.sigma_tilde());
    const double c2 = std::pow(st / params.a(), inv_i);
    const double c1 = std::pow(st / (1.0 + params.b()), inv_i);
    if (c > 0.0) {
      cv.k_c2_pos = c2;
      cv.k_c1_pos = c1;
      if (!params.odd_i()) {
        cv.k_c2_neg = -c2;
        cv.k_c1_neg = -c1;
      }
    } else {
      cv.k_c2_neg = -c2;
      cv.k_c1_neg = -c1;
    }
  }
  auto l_minus_2k = [&](double k) { return l_of_k(params, k) - 2.0 * k; };
  auto l_minus_k = [&](double k) { return l_of_k(params, k) - k; };
  double worst = 0.0;
  auto probe = [&](const std::optional<double>& root, auto f) {
    if (!root) return;
    const double r = *root;
    const double found = r > 0 ? bisect(f, 0.5 * r, 2.0 * r) : bisect(f, 2.0 * r, 0.5 * r);
    worst = std::max(worst, std::abs(found - r) / std::abs(r));
  };
  probe(cv.k_c2_pos, l_minus_2k);
  probe(cv.k_c2_neg, l_minus_2k);
  probe(cv.k_c1_pos, l_minus_k);
  probe(cv.k_c1_neg, l_minus_k);
  return worst;
}

PhaseVelocity vector_field(const SigmaParams& params, PhasePoint p) {
  const double l = l_of_k(params, p.k);
  return {(l - 2.0 * p.k) * p.alpha, p.k * p.k - p.alpha * p.alpha - p.k * l};
}

DesingularizedVelocity desingularized_field(const SigmaParams& params, PhasePoint p) {
  const int i = params.i();
  const double st = params.sigma_tilde();
  const double k = p.k;
  const double a = p.alpha;
  const double ki = ipow(k, i);
  const double km1 = ipow(k, i - 1);
  DesingularizedVelocity v;
  v.dk = (st - params.a() * ki) * a;
  v.dalpha = params.nullcline_slope_sq() * ki * k - a * a * km1 - st * k;
  v.ds = km1;
  return v;
}

std::optional<double> nullcline_alpha(const SigmaParams& params, double k) {
  if (params.singular_at_zero() && k == 0.0) {
    throw SingularityError("nullcline undefined at k = 0 for i >= 2, c != 0");
  }
  // k^2 - k l = ((2n-1)/i) k^2 - sigma_tilde k^{2-i}
  const double t1 = params.nullcline_slope_sq() * k * k;
  const double t2 = params.c() == 0.0 ? 0.0 : params.sigma_tilde() * ipow(k, 2 - params.i());
  double radicand = t1 - t2;
  if (radicand < 0.0) {
    if (radicand >= -1e-14 * (std::abs(t1) + std::abs(t2))) {
      radicand = 0.0;
    } else {
      return std::nullopt;
    }
  }
  return std::sqrt(radicand);
}

double main_term_pi(const SigmaParams& params, PhasePoint p) {
  if (params.singular_at_zero() && p.k == 0.0) {
    throw SingularityError("main term undefined at k = 0 for i >= 2, c != 0");
  }
  const int n = params.n();
  const int i = params.i();
  const double di = i;
  const double st = params.sigma_tilde();
  const double k = p.k;
  const double a2 = p.alpha * p.alpha;

  const double coef_a = (2.0 * n - 1.0) * (2.0 * n + 3.0 * i - 1.0) / (di * di);
  const double coef_b = (-4.0 * n + di * di - 3.0 * di + 2.0) / di;

  double bracket_k = coef_a * k * k;
  double bracket_a = params.b();
  if (st != 0.0) {
    bracket_k += coef_b * st * ipow(k, 2 - i) + st * st * ipow(k, 2 - 2 * i);
    if (i > 1) bracket_a += (i - 1) * st * ipow(k, -i);
  }
  const double alpha_prime = k * k - a2 - k_times_l(params, k);
  return a2 * bracket_k + a2 * a2 * bracket_a + alpha_prime * alpha_prime;
}

double d2alpha_dk2(const SigmaParams& params, PhasePoint p) {
  if (p.alpha == 0.0) throw UndefinedCurvatureError("d2alpha/dk2 undefined at alpha = 0");
  const double l = l_of_k(params, p.k);
  const double gap = 2.0 * p.k - l;
  if (std::abs(gap) <= 1e-13 * (std::abs(p.k) + std::abs(l))) {
    throw UndefinedCurvatureError("d2alpha/dk2 undefined on the invariant line 2k = l");
  }
  const double a3 = p.alpha * p.alpha * p.alpha;
  return -main_term_pi(params, p) / (gap * gap * a3);
}

RegionLabel classify_region(const SigmaParams& params, PhasePoint p) {
  if (params.c() < 0.0 && params.odd_i()) {
    return classify_region(params.with_c(-params.c()), {p.alpha, -p.k});
  }
  const CriticalValues cv = critical_k(params);
  const double kc1 = cv.k_c1_pos.value_or(0.0);
  const double kc2 = cv.k_c2_pos.value_or(0.0);
  const bool mirror = params.has_k_mirror();
  constexpr double tol = 1e-12;

  if (p.alpha == 0.0 && p.k == 0.0 && !(params.c() < 0.0)) return RegionLabel::StationaryOrigin;
  if (cv.k_c2_pos) {
    if (p.alpha == 0.0 &&
        (close_rel(p.k, kc1, tol) || (mirror && close_rel(p.k, -kc1, tol)))) {
      return RegionLabel::StationaryKc1;
    }
    if (close_rel(p.k, kc2, tol) || (mirror && close_rel(p.k, -kc2, tol))) {
      return RegionLabel::ConstantKLine;
    }
  }
  if (params.c() == 0.0 && p.k == 0.0) return RegionLabel::ConstantKLine;
  if (p.k < 0.0) return mirror ? RegionLabel::MirrorOfAbove : RegionLabel::LowerHalf;
  if (!cv.k_c2_pos) return RegionLabel::BandAboveKc1;
  if (p.k >= kc1) return RegionLabel::BandAboveKc1;
  if (p.k >= kc2) return RegionLabel::BandKc2ToKc1;
  return RegionLabel::BandZeroToKc2;
}

}  // namespace sigmak
