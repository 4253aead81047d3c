#include "sigmak/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace sigmak {

namespace {

void check_pansu_args(double lambda, double z_abs) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError(fmt::format("lambda must be positive, got {}", lambda));
  }
  if (!(z_abs >= 0.0) || z_abs > 1.0 / lambda) {
    throw DomainError(fmt::format("|z| = {} is outside [0, 1/lambda]", z_abs));
  }
}

ProfileSample to_profile(const TraceSample& s) {
  return {s.s, leaf_radius({s.alpha, s.k}), s.t, s.alpha, s.k};
}

double neville_at_zero(const std::array<double, 3>& x, const std::array<double, 3>& y) {
  double sum = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    double w = 1.0;
    for (std::size_t m = 0; m < 3; ++m) {
      if (m != j) w *= -x[m] / (x[j] - x[m]);
    }
    sum += w * y[j];
  }
  return sum;
}

}  // namespace

double pansu_profile(double lambda, double z_abs) {
  check_pansu_args(lambda, z_abs);
  const double x = std::min(lambda * z_abs, 1.0);
  return (x * std::sqrt(1.0 - x * x) + std::acos(x)) / (2.0 * lambda * lambda);
}

double pansu_slope(double lambda, double z_abs) {
  check_pansu_args(lambda, z_abs);
  const double x = std::min(lambda * z_abs, 1.0);
  return -lambda * z_abs * z_abs / std::sqrt(1.0 - x * x);
}

double leaf_radius(PhasePoint p) {
  const double rho = p.alpha * p.alpha + p.k * p.k;
  if (rho == 0.0) {
    throw DegenerateError("alpha = k = 0: the hypersurface is part of the plane E x R");
  }
  return 1.0 / std::sqrt(rho);
}

ProfileCurve profile_from_trace(const OrbitTrace& trace) {
  ProfileCurve out;
  out.samples.reserve(trace.samples.size());
  for (const TraceSample& s : trace.samples) out.samples.push_back(to_profile(s));
  out.start_index = trace.direction == Direction::Forward ? 0 : out.samples.size() - 1;
  return out;
}

ProfileCurve reconstruct_profile(const SigmaParams& params, PhasePoint start,
                                 const IntegratorConfig& cfg) {
  leaf_radius(start);
  const OrbitTrace bwd = integrate(params, start, cfg, Direction::Backward);
  const OrbitTrace fwd = integrate(params, start, cfg, Direction::Forward);
  ProfileCurve out;
  out.samples.reserve(bwd.samples.size() + fwd.samples.size());
  for (const TraceSample& s : bwd.samples) out.samples.push_back(to_profile(s));
  out.start_index = out.samples.size() - 1;
  for (std::size_t j = 1; j < fwd.samples.size(); ++j) {
    out.samples.push_back(to_profile(fwd.samples[j]));
  }
  return out;
}

std::vector<CenterPoint> center_track(const SigmaParams& params, const OrbitTrace& trace) {
  const auto& v = trace.samples;
  std::vector<double> f(v.size());
  std::vector<double> df(v.size());
  std::vector<bool> smooth(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double a = v[j].alpha;
    const double k = v[j].k;
    const double rho = a * a + k * k;
    if (rho == 0.0) throw DegenerateError("center track undefined at alpha = k = 0");
    f[j] = -k / rho;
    try {
      const PhaseVelocity w = vector_field(params, {a, k});
      df[j] = -w.dk / rho + 2.0 * k * (a * w.dalpha + k * w.dk) / (rho * rho);
      smooth[j] = std::isfinite(df[j]) && std::hypot(w.dk, w.dalpha) < 1e4;
    } catch (const SingularityError&) {
      smooth[j] = false;
    }
  }
  std::vector<CenterPoint> out(v.size());
  double acc = 0.0;
  if (!v.empty()) out[0] = {v[0].s, 0.0};
  for (std::size_t j = 1; j < v.size(); ++j) {
    const double h = v[j].s - v[j - 1].s;
    double piece = 0.5 * h * (f[j - 1] + f[j]);
    if (smooth[j - 1] && smooth[j]) piece += h * h / 12.0 * (df[j - 1] - df[j]);
    acc += piece;
    out[j] = {v[j].s, acc};
  }
  const std::size_t origin = trace.direction == Direction::Forward ? 0 : v.size() - 1;
  const double gauge = v.empty() ? 0.0 : out[origin].t_center;
  for (CenterPoint& c : out) c.t_center -= gauge;
  return out;
}

CapReport cap_smoothness_report(const ProfileCurve& profile, ProfileEnd end) {
  const auto& v = profile.samples;
  if (v.size() < 4) throw InapplicableError("profile has too few samples");
  double r_max = 0.0;
  for (const ProfileSample& s : v) r_max = std::max(r_max, s.r);
  if (end == ProfileEnd::Auto) end = v.front().r <= v.back().r ? ProfileEnd::Front : ProfileEnd::Back;

  // Walk inward from the chosen end while r keeps growing.
  std::vector<ProfileSample> walk;
  if (end == ProfileEnd::Front) {
    walk.push_back(v.front());
    for (std::size_t j = 1; j < v.size() && v[j].r >= walk.back().r; ++j) walk.push_back(v[j]);
  } else {
    walk.push_back(v.back());
    for (std::size_t j = v.size() - 1; j-- > 0 && v[j].r >= walk.back().r;) walk.push_back(v[j]);
  }
  const double r0 = walk.front().r;
  if (r0 > 0.05 * r_max) {
    throw InapplicableError(
        fmt::format("profile end stays away from the axis: end r = {:.6g}, largest r = {:.6g}", r0, r_max));
  }
  if (walk.size() < 2) throw InapplicableError("profile end is not monotone in r");
  // An exact pole sample has no scale of its own; use its neighbour.
  const double base = r0 > 0.0 ? r0 : walk[1].r;

  auto t_at = [&](double r) {
    for (std::size_t j = 1; j < walk.size(); ++j) {
      if (walk[j].r >= r) {
        const double w = (r - walk[j - 1].r) / (walk[j].r - walk[j - 1].r);
        return walk[j - 1].t + w * (walk[j].t - walk[j - 1].t);
      }
    }
    throw InapplicableError("profile does not extend far enough from the axis end");
  };

  std::array<double, 4> radii{r0, 2.0 * base, 4.0 * base, 8.0 * base};
  if (r0 == 0.0) radii = {0.0, base, 2.0 * base, 4.0 * base};
  std::array<double, 4> heights{};
  heights[0] = walk.front().t;
  for (std::size_t j = 1; j < 4; ++j) heights[j] = t_at(radii[j]);

  std::array<double, 3> mid{};
  std::array<double, 3> slope{};
  std::array<double, 3> ratio{};
  for (std::size_t j = 0; j < 3; ++j) {
    mid[j] = 0.5 * (radii[j] + radii[j + 1]);
    slope[j] = (heights[j + 1] - heights[j]) / (radii[j + 1] - radii[j]);
    ratio[j] = slope[j] / mid[j];
  }
  return {neville_at_zero(mid, slope), neville_at_zero(mid, ratio), r0};
}

SurfaceMesh surface_of_revolution(const ProfileCurve& profile, int segments) {
  if (segments < 3) throw DomainError("segments must be at least 3");
  const auto& v = profile.samples;
  if (v.size() < 2) throw DegenerateError("a surface of revolution needs at least 2 samples");
  constexpr double pole_radius = 1e-9;
  if (std::all_of(v.begin(), v.end(), [](const ProfileSample& s) { return s.r < pole_radius; })) {
    throw DegenerateError("every profile sample lies on the axis");
  }

  SurfaceMesh mesh;
  const auto seg = static_cast<std::size_t>(segments);
  std::vector<std::size_t> first(v.size());
  std::vector<bool> pole(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    first[j] = mesh.vertices.size();
    pole[j] = v[j].r < pole_radius;
    if (pole[j]) {
      mesh.vertices.push_back({0.0, 0.0, v[j].t});
      continue;
    }
    for (std::size_t q = 0; q < seg; ++q) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(q) / segments;
      mesh.vertices.push_back({v[j].r * std::cos(theta), v[j].r * std::sin(theta), v[j].t});
    }
  }
  auto at = [&](std::size_t j, std::size_t q) { return pole[j] ? first[j] : first[j] + q % seg; };
  for (std::size_t j = 0; j + 1 < v.size(); ++j) {
    if (pole[j] && pole[j + 1]) continue;
    for (std::size_t q = 0; q < seg; ++q) {
      const std::size_t a0 = at(j, q), a1 = at(j, q + 1);
      const std::size_t b0 = at(j + 1, q), b1 = at(j + 1, q + 1);
      if (!pole[j]) mesh.faces.push_back({a0, b1, a1});
      if (!pole[j + 1]) mesh.faces.push_back({a0, b0, b1});
    }
  }
  return mesh;
}

}  // namespace sigmak
