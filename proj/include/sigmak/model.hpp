#pragma once

// Algebra of the constrained (alpha, k) system for umbilic hypersurfaces of
// constant sigma_{i,n} = c in the Heisenberg group H_n.
//
// With the binomial weights C1 = C(2n-2, i-1), C0 = C(2n-2, i) the curvature
// constraint determines the characteristic eigenvalue
//
//   l(k) = c / (C1 k^{i-1}) - ((2n-i-1)/i) k,
//
// and the phase flow is
//
//   k'     = (l - 2k) alpha,
//   alpha' = k^2 - alpha^2 - k l.
//
// Everything here is a pure function of its arguments.

#include <cstdint>
#include <optional>
#include <string_view>

#include "sigmak/error.hpp"

namespace sigmak {

/// C(m, j) in exact integer arithmetic, 0 <= j <= m <= 64.
std::uint64_t binomial(unsigned m, unsigned j);

/// k^e for integer e (negative allowed), by repeated multiplication so the
/// sign of odd powers of negative k is exact.
double ipow(double k, int e);

/// The triple (n, i, c) fixing sigma_{i,n} = c.
class SigmaParams {
 public:
  /// Throws DomainError unless 2 <= n <= 33, 1 <= i <= 2n-1 and c is finite.
  SigmaParams(int n, int i, double c);

  int n() const { return n_; }
  int i() const { return i_; }
  double c() const { return c_; }

  /// C(2n-2, i-1).
  double weight_l() const { return weight_l_; }
  /// C(2n-2, i); zero when i = 2n-1.
  double weight_k() const { return weight_k_; }
  /// c / C(2n-2, i-1).
  double sigma_tilde() const { return sigma_tilde_; }
  /// (2n+i-1)/i, the slope in l - 2k = sigma_tilde k^{1-i} - a k.
  double a() const { return a_; }
  /// (2n-i-1)/i, the slope in l = sigma_tilde k^{1-i} - b k.
  double b() const { return b_; }
  /// (2n-1)/i.
  double nullcline_slope_sq() const { return static_cast<double>(2 * n_ - 1) / i_; }

  bool odd_i() const { return i_ % 2 != 0; }
  /// True when l(k) has a pole at k = 0 (i >= 2 and c != 0).
  bool singular_at_zero() const { return i_ >= 2 && c_ != 0.0; }
  /// True when (alpha, k) -> (alpha, -k) maps orbits onto orbits up to
  /// reversal: even i, or c = 0 where l is odd in k for every i.
  bool has_k_mirror() const { return i_ % 2 == 0 || c_ == 0.0; }

  SigmaParams with_c(double c) const { return {n_, i_, c}; }

  friend bool operator==(const SigmaParams&, const SigmaParams&) = default;

 private:
  int n_;
  int i_;
  double c_;
  double weight_l_;
  double weight_k_;
  double sigma_tilde_;
  double a_;
  double b_;
};

/// A point of the (alpha, k) phase plane.
struct PhasePoint {
  double alpha = 0.0;
  double k = 0.0;

  bool finite() const;
  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

struct PhaseVelocity {
  double dk = 0.0;
  double dalpha = 0.0;
};

/// Roots of l = 2k (invariant lines, "c2") and l = k (stationary points on
/// the k-axis, "c1").
struct CriticalValues {
  std::optional<double> k_c1_pos;
  std::optional<double> k_c1_neg;
  std::optional<double> k_c2_pos;
  std::optional<double> k_c2_neg;

  bool empty() const { return !k_c2_pos && !k_c2_neg; }
};

enum class RegionLabel {
  StationaryOrigin,
  StationaryKc1,
  ConstantKLine,
  BandAboveKc1,
  BandKc2ToKc1,
  BandZeroToKc2,
  LowerHalf,
  MirrorOfAbove,
};

std::string_view to_string(RegionLabel label);

double l_of_k(const SigmaParams& params, double k);
double dl_dk(const SigmaParams& params, double k);

/// sigma_{i,n} of an umbilic point with eigenvalues (l, k, ..., k).
double sigma_of(int n, int i, double l, double k);
inline double sigma_of(const SigmaParams& params, double l, double k) {
  return sigma_of(params.n(), params.i(), l, k);
}

CriticalValues critical_k(const SigmaParams& params);

/// Largest disagreement between the closed-form critical values and roots
/// found by bisection on l - 2k and l - k. Used as an internal consistency
/// check; a healthy build returns something near machine precision.
double critical_k_bisection_discrepancy(const SigmaParams& params);

PhaseVelocity vector_field(const SigmaParams& params, PhasePoint p);

/// The flow multiplied by k^{i-1} (time tau with ds = k^{i-1} dtau). Both
/// components are polynomial in (alpha, k) and stay finite through k = 0.
struct DesingularizedVelocity {
  double dk = 0.0;
  double dalpha = 0.0;
  double ds = 0.0;
};
DesingularizedVelocity desingularized_field(const SigmaParams& params, PhasePoint p);

/// Nonnegative alpha on the curve k^2 - alpha^2 - k l = 0, if real.
std::optional<double> nullcline_alpha(const SigmaParams& params, double k);

/// The main term Pi of k''alpha' - alpha''k' = -(2k - l) Pi.
double main_term_pi(const SigmaParams& params, PhasePoint p);

/// Second derivative of an orbit viewed as a graph alpha(k).
double d2alpha_dk2(const SigmaParams& params, PhasePoint p);

/// Region of the phase portrait containing p. Labels are defined for c > 0;
/// c = 0 uses k_c1 = k_c2 = 0, c < 0 with even i has no critical values, and
/// c < 0 with odd i is labelled through the conjugacy (alpha, k, c) ->
/// (alpha, -k, -c). Boundaries go to the band above them.
RegionLabel classify_region(const SigmaParams& params, PhasePoint p);

}  // namespace sigmak
