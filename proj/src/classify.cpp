#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sigmak/flow.hpp"

namespace sigmak {

namespace {

bool close_rel(double x, double y, double tol) {
  return std::abs(x - y) <= tol * std::max(1.0, std::abs(y));
}

struct SectionPoint {
  double s;
  double k;
};

double alpha_at(const OrbitTrace& trace, double s) {
  const auto& v = trace.samples;
  auto it = std::lower_bound(v.begin(), v.end(), s,
                             [](const TraceSample& a, double x) { return a.s < x; });
  if (it == v.begin()) return v.front().alpha;
  if (it == v.end()) return v.back().alpha;
  const TraceSample& hi = *it;
  const TraceSample& lo = *(it - 1);
  const double w = (s - lo.s) / (hi.s - lo.s);
  return lo.alpha + w * (hi.alpha - lo.alpha);
}

// Aitken extrapolation of alpha(s) from s_end/4, s_end/2, s_end.
double aitken_limit(const OrbitTrace& trace) {
  const double s_end = trace.end().s;
  const double x0 = alpha_at(trace, 0.25 * s_end);
  const double x1 = alpha_at(trace, 0.5 * s_end);
  const double x2 = alpha_at(trace, s_end);
  const double d1 = x2 - x1;
  const double d0 = x1 - x0;
  if (d1 - d0 == 0.0) return x2;
  return x2 - d1 * d1 / (d1 - d0);
}

// Approach to (alpha_2, 0) from k < 0 with alpha settling down.
bool settles_on_axis(const SigmaParams& params, const OrbitTrace& trace) {
  if (trace.stop != StopReason::SMax) return false;
  const TraceSample& end = trace.end();
  if (!(end.k < 0.0)) return false;
  const double k_mid = trace.samples[trace.samples.size() / 2].k;
  if (!(std::abs(end.k) < std::abs(k_mid))) return false;
  const PhaseVelocity v = vector_field(params, {end.alpha, end.k});
  return std::abs(v.dalpha) < 1e-8;
}

bool contracts_to_origin(const OrbitTrace& trace, PhasePoint start) {
  if (trace.stop != StopReason::SMax) return false;
  const double r0 = std::hypot(start.alpha, start.k);
  const TraceSample& end = trace.end();
  const TraceSample& mid = trace.samples[trace.samples.size() / 2];
  const double r_end = std::hypot(end.alpha, end.k);
  const double r_mid = std::hypot(mid.alpha, mid.k);
  return r_end < 0.1 * r0 && r_end < r_mid;
}

std::string describe(const OrbitTrace& trace) {
  return fmt::format("{} ({})", to_string(trace.stop), trace.direction == Direction::Forward
                                                            ? "forward"
                                                            : "backward");
}

}  // namespace

std::string_view class_name(const OrbitClass& cls) {
  struct Visitor {
    std::string_view operator()(const orbit::Stationary&) const { return "Stationary"; }
    std::string_view operator()(const orbit::ConstantKLine&) const { return "ConstantKLine"; }
    std::string_view operator()(const orbit::Periodic&) const { return "Periodic"; }
    std::string_view operator()(const orbit::ArcToAlphaAxis&) const { return "ArcToAlphaAxis"; }
    std::string_view operator()(const orbit::ArcBiInfinite&) const { return "ArcBiInfinite"; }
    std::string_view operator()(const orbit::HomoclinicToOrigin&) const {
      return "HomoclinicToOrigin";
    }
    std::string_view operator()(const orbit::Truncated&) const { return "Truncated"; }
  };
  return std::visit(Visitor{}, cls);
}

OrbitClass classify_orbit(const SigmaParams& params, PhasePoint start,
                          const IntegratorConfig& cfg) {
  cfg.validate();
  if (!start.finite()) throw DomainError("start point must be finite");
  const CriticalValues cv = critical_k(params);

  if (start.alpha == 0.0) {
    if (start.k == 0.0 && !params.singular_at_zero()) return orbit::Stationary{{0.0, 0.0}};
    for (const auto& root : {cv.k_c1_pos, cv.k_c1_neg}) {
      if (root && close_rel(start.k, *root, 1e-12)) return orbit::Stationary{{0.0, *root}};
    }
  }
  if (const auto line = invariant_line_k(params, start.k)) return orbit::ConstantKLine{*line};
  if (params.c() == 0.0 && start.k == 0.0) return orbit::ConstantKLine{0.0};
  if (params.singular_at_zero() && start.k == 0.0) {
    throw SingularityError("start lies on k = 0 where l(k) has a pole");
  }

  const bool on_section = start.alpha == 0.0;
  const int needed = on_section ? 2 : 3;
  const OrbitTrace fwd = integrate(params, start, cfg, Direction::Forward, {needed});

  if (fwd.stop == StopReason::SectionLimit) {
    std::vector<SectionPoint> pts;
    if (on_section) pts.push_back({0.0, start.k});
    for (const TraceEvent& e : fwd.events_of(EventKind::AlphaAxis)) pts.push_back({e.s, e.k});
    const SectionPoint& p1 = pts[0];
    const SectionPoint& p2 = pts[1];
    const SectionPoint& p3 = pts[2];
    const double mismatch = std::abs(p3.k - p1.k);
    if (mismatch < 10.0 * cfg.section_tol * std::max(1.0, std::abs(p1.k))) {
      return orbit::Periodic{2.0 * std::abs(p2.s - p1.s), std::min(p1.k, p2.k),
                             std::max(p1.k, p2.k)};
    }
    return orbit::Truncated{fmt::format("section return mismatch {:.3g} at k = {:.6g}", mismatch, p1.k)};
  }

  const OrbitTrace bwd = integrate(params, start, cfg, Direction::Backward, {3});

  if (fwd.stop == StopReason::AxisReached) {
    if (bwd.stop != StopReason::AxisReached) {
      return orbit::Truncated{"backward end: " + describe(bwd)};
    }
    const TraceEvent plus = fwd.events_of(EventKind::KAxis).back();
    const TraceEvent minus = bwd.events_of(EventKind::KAxis).back();
    if (plus.alpha * minus.alpha >= 0.0) {
      return orbit::Truncated{"both ends reach the alpha-axis on the same side"};
    }
    return orbit::ArcToAlphaAxis{minus.s, plus.s, minus.alpha, plus.alpha,
                                 0.5 * (std::abs(plus.alpha) + std::abs(minus.alpha))};
  }

  if (params.c() == 0.0) {
    if (contracts_to_origin(fwd, start) && contracts_to_origin(bwd, start)) {
      return orbit::HomoclinicToOrigin{};
    }
    return orbit::Truncated{"c = 0 orbit not contracting: " + describe(fwd)};
  }

  if (params.c() > 0.0 && params.odd_i() && start.k < 0.0 && settles_on_axis(params, fwd) &&
      settles_on_axis(params, bwd)) {
    const double a_plus = aitken_limit(fwd);
    const double a_minus = aitken_limit(bwd);
    return orbit::ArcBiInfinite{0.5 * (std::abs(a_plus) + std::abs(a_minus))};
  }

  return orbit::Truncated{"forward end: " + describe(fwd) + ", backward end: " + describe(bwd)};
}

double half_period(const SigmaParams& params, double k0, const IntegratorConfig& cfg) {
  const CriticalValues cv = critical_k(params);
  const bool upper = cv.k_c2_pos && k0 > *cv.k_c2_pos;
  const bool lower = cv.k_c2_neg && k0 < *cv.k_c2_neg;
  if (!upper && !lower) {
    throw ClassificationError(fmt::format("k0 = {} is outside the periodic band", k0));
  }
  for (const auto& root : {cv.k_c1_pos, cv.k_c1_neg}) {
    if (root && close_rel(k0, *root, 1e-12)) {
      throw ClassificationError("k0 is the stationary point k_c1");
    }
  }
  const OrbitTrace trace = integrate(params, {0.0, k0}, cfg, Direction::Forward, {1});
  if (trace.stop != StopReason::SectionLimit) {
    throw ClassificationError("orbit did not return to alpha = 0: " + describe(trace));
  }
  return trace.samples.back().s;
}

}  // namespace sigmak
