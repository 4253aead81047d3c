#pragma once

// Adaptive integration of the (alpha, k) flow and qualitative orbit
// classification.
//
// The integrator is a Dormand-Prince 5(4) pair written out by hand so that
// chart switching and event location can re-step from a known state. Near the
// alpha-axis, when l(k) has a pole at k = 0, it runs in the desingularized
// time tau (ds = |k|^{i-1} dtau) and keeps s as a co-integrated coordinate.

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sigmak/model.hpp"

namespace sigmak {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.01;
  double s_max = 200.0;
  double box_bound = 1e6;
  double blowup_threshold = 1e8;
  double section_tol = 1e-9;

  /// Throws DomainError if any field is non-positive or rel_tol < 1e-14.
  void validate() const;
};

enum class Direction { Forward, Backward };

/// One accepted state. t is the co-integrated vertical drift
/// dt/ds = -k / (alpha^2 + k^2) with t = 0 at the start.
struct TraceSample {
  double s = 0.0;
  double alpha = 0.0;
  double k = 0.0;
  double t = 0.0;
};

enum class EventKind { AlphaAxis, KAxis, Nullcline, Truncation };

enum class StopReason { SMax, BoxEscape, BlowUp, AxisReached, SectionLimit };

std::string_view to_string(EventKind kind);
std::string_view to_string(StopReason reason);

struct TraceEvent {
  EventKind kind = EventKind::AlphaAxis;
  double s = 0.0;
  double alpha = 0.0;
  double k = 0.0;
  std::string note;
};

/// Samples are ordered by increasing s whatever the direction, so a backward
/// trace ends at its start point. Events are kept in the order they happened.
struct OrbitTrace {
  Direction direction = Direction::Forward;
  std::vector<TraceSample> samples;
  std::vector<TraceEvent> events;
  StopReason stop = StopReason::SMax;

  const TraceSample& start() const;
  const TraceSample& end() const;
  std::vector<TraceEvent> events_of(EventKind kind) const;
};

struct IntegrateOptions {
  /// Stop at the n-th alpha = 0 crossing (0 means never).
  int stop_after_sections = 0;
};

/// Non-finite state or step-size underflow. Carries the last good sample.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, TraceSample last_good)
      : Error(what), last_good_(last_good) {}
  const TraceSample& last_good() const { return last_good_; }

 private:
  TraceSample last_good_;
};

/// Radius around k = 0 inside which the desingularized chart is used.
double chart_switch_radius(const SigmaParams& params);

/// The critical k whose invariant line contains k, if any.
std::optional<double> invariant_line_k(const SigmaParams& params, double k);

OrbitTrace integrate(const SigmaParams& params, PhasePoint start, const IntegratorConfig& cfg,
                     Direction direction, IntegrateOptions options = {});

namespace orbit {
struct Stationary {
  PhasePoint point;
};
struct ConstantKLine {
  double k = 0.0;
};
struct Periodic {
  double period = 0.0;
  double k_min = 0.0;
  double k_max = 0.0;
};
struct ArcToAlphaAxis {
  double s_minus = 0.0;
  double s_plus = 0.0;
  double alpha_minus = 0.0;
  double alpha_plus = 0.0;
  double alpha_end = 0.0;
};
struct ArcBiInfinite {
  double alpha_limit = 0.0;
};
struct HomoclinicToOrigin {};
struct Truncated {
  std::string reason;
};
}  // namespace orbit

using OrbitClass =
    std::variant<orbit::Stationary, orbit::ConstantKLine, orbit::Periodic, orbit::ArcToAlphaAxis,
                 orbit::ArcBiInfinite, orbit::HomoclinicToOrigin, orbit::Truncated>;

std::string_view class_name(const OrbitClass& cls);

OrbitClass classify_orbit(const SigmaParams& params, PhasePoint start,
                          const IntegratorConfig& cfg);

/// s-length from (0, k0) to the next alpha = 0 crossing.
double half_period(const SigmaParams& params, double k0, const IntegratorConfig& cfg);

/// Exact solution on the invariant line k = k_c2 (positive root).
PhasePoint closed_form_line(const SigmaParams& params, double s0, double alpha0, double s);

/// Exact solution alpha = 1/(s + 1/alpha0), k = 0 of the c = 0 system.
PhasePoint closed_form_c0(double alpha0, double s);

}  // namespace sigmak
