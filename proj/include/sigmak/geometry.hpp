#pragma once

// Rotationally invariant profiles rebuilt from phase orbits.
//
// A point (alpha, k) of an orbit is a leaf of radius r = 1/sqrt(alpha^2+k^2)
// whose height moves by dt/ds = -k / (alpha^2 + k^2). Along the orbit
// dr/ds = alpha r, so the profile as a graph satisfies dt/dr = -k r / alpha.

#include <array>
#include <cstddef>
#include <vector>

#include "sigmak/flow.hpp"

namespace sigmak {

/// Upper Pansu graph f(z) = (lambda z sqrt(1 - lambda^2 z^2) + acos(lambda z)) / (2 lambda^2).
double pansu_profile(double lambda, double z_abs);

/// f'(z) = -lambda z^2 / sqrt(1 - lambda^2 z^2).
double pansu_slope(double lambda, double z_abs);

double leaf_radius(PhasePoint p);

struct ProfileSample {
  double s = 0.0;
  double r = 0.0;
  double t = 0.0;
  double alpha = 0.0;
  double k = 0.0;
};

/// Samples in increasing s; t = 0 at the start sample.
struct ProfileCurve {
  std::vector<ProfileSample> samples;
  std::size_t start_index = 0;
};

/// Integrates both directions from start and joins the traces.
ProfileCurve reconstruct_profile(const SigmaParams& params, PhasePoint start,
                                 const IntegratorConfig& cfg);

/// Builds a profile from an already integrated trace (heights from the trace).
ProfileCurve profile_from_trace(const OrbitTrace& trace);

struct CenterPoint {
  double s = 0.0;
  double t_center = 0.0;
};

/// Height of the leaf centers along a trace, by quadrature over the samples,
/// gauged to 0 at the trace start.
std::vector<CenterPoint> center_track(const SigmaParams& params, const OrbitTrace& trace);

enum class ProfileEnd { Auto, Front, Back };

struct CapReport {
  double g1_limit = 0.0;
  double g2_ratio_limit = 0.0;
  double r_min = 0.0;
};

/// Limits of g'(r) and g'(r)/r as r -> 0 at one end of the profile.
/// Auto picks the end with the smaller radius. Throws InapplicableError when
/// that end does not come within 0.05 max r of the axis.
CapReport cap_smoothness_report(const ProfileCurve& profile, ProfileEnd end = ProfileEnd::Auto);

struct SurfaceMesh {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<std::size_t, 3>> faces;
};

/// Revolves (r, t) about the t-axis. Rings with r < 1e-9 collapse to one
/// vertex.
SurfaceMesh surface_of_revolution(const ProfileCurve& profile, int segments);

}  // namespace sigmak
