#include "sigmak/conserved.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

namespace sigmak {

namespace {

double q_of(const SigmaParams& params) { return params.sigma_tilde() / params.a(); }

double g_exponent(const SigmaParams& params) {
  return -2.0 / static_cast<double>(2 * params.n() + params.i() - 1);
}

}  // namespace

double g_of_k(const SigmaParams& params, double k) {
  const double ki = ipow(k, params.i());
  const double q = q_of(params);
  const double diff = ki - q;
  if (diff == 0.0 || std::abs(diff) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                           std::max(std::abs(ki), std::abs(q))) {
    throw SingularityError(fmt::format("g(k) is singular at k = {} (k^i = q)", k));
  }
  return std::pow(std::abs(diff), g_exponent(params));
}

double potential_integrand(const SigmaParams& params, double k) {
  const int n = params.n();
  const int i = params.i();
  const double ki = ipow(k, i);
  const double num = k * ((2.0 * n - 1.0) * ki - i * params.sigma_tilde());
  const double den = (2.0 * n + i - 1.0) * (ki - q_of(params));
  return g_of_k(params, k) * num / den;
}

std::vector<double> region_boundaries(const SigmaParams& params) {
  std::vector<double> cuts;
  if (params.c() == 0.0 || params.singular_at_zero()) cuts.push_back(0.0);
  const double q = q_of(params);
  const double inv_i = 1.0 / params.i();
  if (q > 0.0) {
    const double r = std::pow(q, inv_i);
    cuts.push_back(r);
    if (!params.odd_i()) cuts.push_back(-r);
  } else if (q < 0.0 && params.odd_i()) {
    cuts.push_back(-std::pow(-q, inv_i));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

FirstIntegral::FirstIntegral(const SigmaParams& params, double k_ref)
    : params_(params), k_ref_(k_ref), cache_(std::make_shared<AnchorCache>()) {
  if (!std::isfinite(k_ref)) throw DomainError("k_ref must be finite");
  constexpr double inf = std::numeric_limits<double>::infinity();
  region_ = {-inf, inf};
  for (double cut : region_boundaries(params)) {
    if (std::abs(cut - k_ref) <= kMargin) {
      throw RegionError(fmt::format("k_ref = {} lies within {} of the region boundary {}", k_ref,
                                    kMargin, cut));
    }
    if (cut < k_ref) region_.lo = cut;
    if (cut > k_ref && region_.hi == inf) region_.hi = cut;
  }
}

std::string FirstIntegral::region_id() const {
  return fmt::format("({:.17g}, {:.17g})", region_.lo, region_.hi);
}

void FirstIntegral::check(double k) const {
  if (!region_.contains(k, kMargin)) {
    throw RegionError(
        fmt::format("k = {} is outside the first-integral region {}", k, region_id()));
  }
}

double FirstIntegral::integral(double k0, double k1) const {
  check(k0);
  check(k1);
  if (k0 == k1) return 0.0;
  const double lo = std::min(k0, k1);
  const double hi = std::max(k0, k1);
  auto f = [this](double k) { return potential_integrand(params_, k); };
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 12, 1e-13, &error);
  return k0 < k1 ? value : -value;
}

double FirstIntegral::anchor_value(long j) const {
  if (j == 0) return 0.0;
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto& values = cache_->values;
  if (auto it = values.find(j); it != values.end()) return it->second;
  const long step = j > 0 ? 1 : -1;
  long m = j;
  while (m != 0 && values.find(m) == values.end()) m -= step;
  double v = m == 0 ? 0.0 : values.at(m);
  for (long p = m + step;; p += step) {
    v += integral(node(p - step), node(p));
    values[p] = v;
    if (p == j) break;
  }
  return v;
}

double FirstIntegral::potential(double k) const {
  check(k);
  const long j = static_cast<long>(std::trunc((k - k_ref_) / kSpacing));
  return anchor_value(j) + integral(node(j), k);
}

double FirstIntegral::energy(PhasePoint p) const {
  return potential(p.k) + 0.5 * p.alpha * p.alpha * g_of_k(params_, p.k);
}

std::optional<double> FirstIntegral::alpha_from_k(double k, double E) const {
  const double v = potential(k);
  double radicand = 2.0 * (E - v) / g_of_k(params_, k);
  if (radicand < 0.0) {
    if (E - v >= -1e-14 * std::max({1.0, std::abs(E), std::abs(v)})) {
      radicand = 0.0;
    } else {
      return std::nullopt;
    }
  }
  return std::sqrt(radicand);
}

}  // namespace sigmak
