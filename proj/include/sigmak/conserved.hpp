#pragma once

// The first integral E = V(k) + alpha^2 g(k) / 2 built from the integrating
// factor g(k) = |k^i - q|^{-2/(2n+i-1)}, q = i c / ((2n+i-1) C(2n-2, i-1)).
//
// E is only defined on a k-interval free of the poles of g/(2k-l) and of l,
// so every FirstIntegral is tied to the interval containing its base point.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sigmak/model.hpp"

namespace sigmak {

/// g(k); throws SingularityError on the locus k^i = q.
double g_of_k(const SigmaParams& params, double k);

/// g(k) (k^2 - k l) / (2k - l), written without l so it is finite wherever g is.
double potential_integrand(const SigmaParams& params, double k);

/// Sorted k-values that cut the line into first-integral regions.
std::vector<double> region_boundaries(const SigmaParams& params);

struct KInterval {
  double lo;
  double hi;

  bool contains(double k, double margin) const { return k > lo + margin && k < hi - margin; }
};

class FirstIntegral {
 public:
  static constexpr double kMargin = 1e-6;

  /// Throws RegionError when k_ref is within kMargin of a region boundary.
  FirstIntegral(const SigmaParams& params, double k_ref);

  const SigmaParams& params() const { return params_; }
  double k_ref() const { return k_ref_; }
  const KInterval& region() const { return region_; }
  std::string region_id() const;

  /// Integral of potential_integrand from k0 to k1 (both inside the region).
  double integral(double k0, double k1) const;

  /// V(k) = integral from k_ref to k.
  double potential(double k) const;

  double energy(PhasePoint p) const;

  /// |alpha| on the level set E at k, if real.
  std::optional<double> alpha_from_k(double k, double E) const;

 private:
  struct AnchorCache {
    std::mutex mutex;
    std::map<long, double> values;
  };

  void check(double k) const;
  double anchor_value(long j) const;
  double node(long j) const { return k_ref_ + kSpacing * static_cast<double>(j); }

  static constexpr double kSpacing = 0.125;

  SigmaParams params_;
  double k_ref_;
  KInterval region_;
  std::shared_ptr<AnchorCache> cache_;
};

}  // namespace sigmak
