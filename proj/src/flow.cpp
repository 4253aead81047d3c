#include "sigmak/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace sigmak {

void IntegratorConfig::validate() const {
  const std::array<std::pair<const char*, double>, 7> fields{{{"rel_tol", rel_tol},
                                                              {"abs_tol", abs_tol},
                                                              {"max_step", max_step},
                                                              {"s_max", s_max},
                                                              {"box_bound", box_bound},
                                                              {"blowup_threshold", blowup_threshold},
                                                              {"section_tol", section_tol}}};
  for (const auto& [name, value] : fields) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw DomainError(fmt::format("integrator config: {} must be positive, got {}", name, value));
    }
  }
  if (rel_tol < 1e-14) throw DomainError("integrator config: rel_tol must be >= 1e-14");
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::AlphaAxis: return "alpha-axis";
    case EventKind::KAxis: return "k-axis";
    case EventKind::Nullcline: return "nullcline";
    case EventKind::Truncation: return "truncation";
  }
  return "?";
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::SMax: return "s_max";
    case StopReason::BoxEscape: return "box_escape";
    case StopReason::BlowUp: return "blow_up";
    case StopReason::AxisReached: return "axis_reached";
    case StopReason::SectionLimit: return "section_limit";
  }
  return "?";
}

const TraceSample& OrbitTrace::start() const {
  return direction == Direction::Forward ? samples.front() : samples.back();
}

const TraceSample& OrbitTrace::end() const {
  return direction == Direction::Forward ? samples.back() : samples.front();
}

std::vector<TraceEvent> OrbitTrace::events_of(EventKind kind) const {
  std::vector<TraceEvent> out;
  std::copy_if(events.begin(), events.end(), std::back_inserter(out),
               [kind](const TraceEvent& e) { return e.kind == kind; });
  return out;
}

double chart_switch_radius(const SigmaParams& params) {
  const CriticalValues cv = critical_k(params);
  const auto root = cv.k_c2_pos ? cv.k_c2_pos : cv.k_c2_neg;
  if (root) return std::max(0.05 * std::abs(*root), 1e-3);
  return 1e-3;
}

std::optional<double> invariant_line_k(const SigmaParams& params, double k) {
  const CriticalValues cv = critical_k(params);
  for (const auto& root : {cv.k_c2_pos, cv.k_c2_neg}) {
    if (root && std::abs(k - *root) <= 1e-12 * std::max(1.0, std::abs(*root))) return *root;
  }
  return std::nullopt;
}

namespace {

using State = std::array<double, 4>;  // alpha, k, s, t

enum class Chart { S, Tau };

bool finite(const State& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

TraceSample to_sample(const State& y) { return {y[2], y[0], y[1], y[3]}; }

struct Rhs {
  const SigmaParams* params;
  double dir = 1.0;
  Chart chart = Chart::S;
  double tau_sign = 1.0;
  bool line_mode = false;

  State operator()(const State& y) const {
    const double a = y[0];
    const double k = y[1];
    const double rho = a * a + k * k;
    State d{};
    if (line_mode) {
      d = {-rho, 0.0, 1.0, rho > 0.0 ? -k / rho : 0.0};
    } else if (chart == Chart::S) {
      const double l = l_of_k(*params, k);
      d = {k * k - a * a - k * l, (l - 2.0 * k) * a, 1.0, rho > 0.0 ? -k / rho : 0.0};
    } else {
      const DesingularizedVelocity v = desingularized_field(*params, {a, k});
      d = {v.dalpha, v.dk, v.ds, rho > 0.0 ? -k * v.ds / rho : 0.0};
      for (double& x : d) x *= tau_sign;
    }
    for (double& x : d) x *= dir;
    return d;
  }
};

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Step {
  State y{};
  double err = 0.0;
};

Step dp_step(const Rhs& f, const State& y, double h, const IntegratorConfig& cfg) {
  auto axpy = [&](std::initializer_list<std::pair<double, const State*>> terms) {
    State out = y;
    for (std::size_t j = 0; j < out.size(); ++j) {
      double acc = 0.0;
      for (const auto& [c, k] : terms) acc += c * (*k)[j];
      out[j] += h * acc;
    }
    return out;
  };
  Step r;
  try {
    const State k1 = f(y);
    const State k2 = f(axpy({{a21, &k1}}));
    const State k3 = f(axpy({{a31, &k1}, {a32, &k2}}));
    const State k4 = f(axpy({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = f(axpy({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 = f(axpy({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    r.y = axpy({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State k7 = f(r.y);
    double sum = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
      const double e = h * (e1 * k1[j] + e3 * k3[j] + e4 * k4[j] + e5 * k5[j] + e6 * k6[j] +
                            e7 * k7[j]);
      const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[j]), std::abs(r.y[j]));
      sum += (e / sc) * (e / sc);
    }
    r.err = std::sqrt(sum / static_cast<double>(y.size()));
  } catch (const SingularityError&) {
    r.err = std::numeric_limits<double>::infinity();
  }
  if (!finite(r.y) || !std::isfinite(r.err)) r.err = std::numeric_limits<double>::infinity();
  return r;
}

struct Located {
  double h_lo = 0.0;
  double h_hi = 0.0;
  State y_lo{};
  State y_hi{};
};

// Bisection on the step length for a sign change of g across [0, h].
template <class G>
Located locate(const Rhs& f, const State& y0, const State& y1, double h, G g,
               const IntegratorConfig& cfg) {
  Located loc{0.0, h, y0, y1};
  const bool positive_lo = g(y0) > 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (loc.h_lo + loc.h_hi);
    if (mid <= loc.h_lo || mid >= loc.h_hi) break;
    const State ym = dp_step(f, y0, mid, cfg).y;
    const double gm = g(ym);
    if (gm == 0.0) {
      loc.h_lo = loc.h_hi = mid;
      loc.y_lo = loc.y_hi = ym;
      break;
    }
    if ((gm > 0.0) == positive_lo) {
      loc.h_lo = mid;
      loc.y_lo = ym;
    } else {
      loc.h_hi = mid;
      loc.y_hi = ym;
    }
  }
  return loc;
}

bool crosses(double g0, double g1) { return (g0 > 0.0 && g1 <= 0.0) || (g0 < 0.0 && g1 >= 0.0); }

class Integrator {
 public:
  Integrator(const SigmaParams& params, PhasePoint start, const IntegratorConfig& cfg,
             Direction direction, IntegrateOptions options)
      : params_(params), cfg_(cfg), options_(options) {
    trace_.direction = direction;
    rhs_.params = &params_;
    rhs_.dir = direction == Direction::Forward ? 1.0 : -1.0;
    singular_ = params.singular_at_zero();
    k_switch_ = chart_switch_radius(params);
    y_ = {start.alpha, start.k, 0.0, 0.0};
    if (const auto line = invariant_line_k(params, start.k)) {
      y_[1] = *line;
      rhs_.line_mode = true;
    }
  }

  OrbitTrace run() {
    trace_.samples.push_back(to_sample(y_));
    h_ = std::min(cfg_.max_step, 1e-3);
    while (!done_) {
      if (s_abs(y_) >= cfg_.s_max) {
        finish(StopReason::SMax, "s reached s_max");
        break;
      }
      update_chart();
      advance();
    }
    if (trace_.direction == Direction::Backward) {
      std::reverse(trace_.samples.begin(), trace_.samples.end());
    }
    return std::move(trace_);
  }

 private:
  double s_abs(const State& y) const { return rhs_.dir * y[2]; }

  double field_magnitude(const State& y) const {
    const double l = l_of_k(params_, y[1]);
    return std::hypot((l - 2.0 * y[1]) * y[0], y[1] * y[1] - y[0] * y[0] - y[1] * l);
  }

  double km1(double k) const { return std::pow(std::abs(k), params_.i() - 1); }

  void enter_tau(double exit_radius) {
    rhs_.chart = Chart::Tau;
    const bool flip = (params_.i() - 1) % 2 != 0 && y_[1] < 0.0;
    rhs_.tau_sign = flip ? -1.0 : 1.0;
    tau_exit_ = exit_radius;
    tau_hmax_ = cfg_.max_step / std::pow(tau_exit_ / 1.5, params_.i() - 1);
    h_ = std::min(h_ / std::max(km1(y_[1]), 1e-300), tau_hmax_);
  }

  void enter_s() {
    rhs_.chart = Chart::S;
    h_ = std::min(h_ * km1(y_[1]), cfg_.max_step);
  }

  void update_chart() {
    if (!singular_ || rhs_.line_mode) return;
    if (rhs_.chart == Chart::S && std::abs(y_[1]) < k_switch_) {
      enter_tau(1.5 * k_switch_);
    } else if (rhs_.chart == Chart::Tau && std::abs(y_[1]) > tau_exit_ &&
               field_magnitude(y_) < 0.1 * cfg_.blowup_threshold) {
      enter_s();
    }
  }

  double max_h() const {
    const double remaining = cfg_.s_max - s_abs(y_);
    if (rhs_.chart == Chart::S) return std::min(cfg_.max_step, remaining);
    return std::min(tau_hmax_, remaining / std::max(km1(y_[1]), 1e-300));
  }

  void advance() {
    h_ = std::min(h_, max_h());
    const double floor = 1e-13 * std::max({1.0, std::abs(y_[0]), std::abs(y_[1])});
    Step step;
    for (;;) {
      step = dp_step(rhs_, y_, h_, cfg_);
      if (step.err <= 1.0) break;
      const double fac = std::isfinite(step.err) ? std::max(0.2, 0.9 * std::pow(step.err, -0.2)) : 0.2;
      h_ *= fac;
      if (h_ < floor) {
        throw IntegrationError(
            fmt::format("step size underflow at s={:.17g}, alpha={:.17g}, k={:.17g}", y_[2], y_[0],
                        y_[1]),
            trace_.samples.back());
      }
    }
    const double h_taken = h_;
    const double fac = step.err > 0.0 ? std::clamp(0.9 * std::pow(step.err, -0.2), 0.2, 5.0) : 5.0;
    h_ *= fac;

    if (handle_events(step.y, h_taken)) return;

    y_ = step.y;
    push(y_);
    post_step_checks();
  }

  void push(const State& y) {
    if (!finite(y)) {
      throw IntegrationError("non-finite state", trace_.samples.back());
    }
    const double last = trace_.samples.back().s;
    if (rhs_.dir * (y[2] - last) > 0.0) trace_.samples.push_back(to_sample(y));
  }

  void post_step_checks() {
    if (std::abs(y_[0]) > cfg_.box_bound || std::abs(y_[1]) > cfg_.box_bound) {
      finish(StopReason::BoxEscape, "left the bounding box");
      return;
    }
    if (rhs_.chart != Chart::S) return;
    if (rhs_.line_mode) {
      if (y_[0] * y_[0] + y_[1] * y_[1] > cfg_.blowup_threshold) {
        finish(StopReason::BlowUp, "field magnitude exceeded blowup_threshold");
      }
      return;
    }
    const double mag = field_magnitude(y_);
    if (mag > cfg_.blowup_threshold) {
      if (singular_ && std::abs(y_[1]) < 1.0) {
        enter_tau(1.5 * std::max(k_switch_, std::abs(y_[1])));
      } else {
        finish(StopReason::BlowUp, "field magnitude exceeded blowup_threshold");
      }
    }
  }

  struct Candidate {
    EventKind kind;
    Located loc;
    bool terminal;
  };

  // Returns true when the step ended the integration.
  bool handle_events(const State& y1, double h) {
    std::vector<Candidate> found;
    const State& y0 = y_;

    auto g_alpha = [](const State& y) { return y[0]; };
    auto g_k = [](const State& y) { return y[1]; };
    const double smax = cfg_.s_max;
    const double dir = rhs_.dir;
    auto g_s = [smax, dir](const State& y) { return smax - dir * y[2]; };

    if (crosses(y0[0], y1[0])) {
      found.push_back({EventKind::AlphaAxis, locate(rhs_, y0, y1, h, g_alpha, cfg_), false});
    }
    if (crosses(y0[1], y1[1])) {
      found.push_back({EventKind::KAxis, locate(rhs_, y0, y1, h, g_k, cfg_), singular_});
    }
    if (rhs_.chart == Chart::S && !rhs_.line_mode) {
      auto g_null = [this](const State& y) {
        return y[1] * y[1] - y[0] * y[0] - y[1] * l_of_k(params_, y[1]);
      };
      try {
        if (crosses(g_null(y0), g_null(y1))) {
          found.push_back({EventKind::Nullcline, locate(rhs_, y0, y1, h, g_null, cfg_), false});
        }
      } catch (const SingularityError&) {
      }
    }
    if (rhs_.chart == Chart::Tau && g_s(y1) < 0.0) {
      found.push_back({EventKind::Truncation, locate(rhs_, y0, y1, h, g_s, cfg_), true});
    }
    if (found.empty()) return false;

    std::stable_sort(found.begin(), found.end(),
                     [](const Candidate& a, const Candidate& b) { return a.loc.h_lo < b.loc.h_lo; });

    for (const Candidate& c : found) {
      const State& best = pick(c);
      if (c.kind == EventKind::AlphaAxis) {
        ++sections_;
        trace_.events.push_back({c.kind, best[2], best[0], best[1], {}});
        if (options_.stop_after_sections > 0 && sections_ >= options_.stop_after_sections) {
          y_ = best;
          push(y_);
          done_ = true;
          trace_.stop = StopReason::SectionLimit;
          return true;
        }
      } else if (c.kind == EventKind::KAxis && c.terminal) {
        // Keep the last state on the starting side as the final sample; l is
        // undefined on the axis itself.
        y_ = c.loc.y_lo;
        if (c.loc.h_lo > 0.0) push(y_);
        trace_.events.push_back({EventKind::KAxis, c.loc.y_hi[2], c.loc.y_hi[0], 0.0, "terminal"});
        done_ = true;
        trace_.stop = StopReason::AxisReached;
        return true;
      } else if (c.kind == EventKind::Truncation) {
        y_ = c.loc.y_hi;
        push(y_);
        finish(StopReason::SMax, "s reached s_max");
        return true;
      } else {
        trace_.events.push_back({c.kind, best[2], best[0], best[1], {}});
      }
    }
    return false;
  }

  const State& pick(const Candidate& c) const {
    auto g = [&](const State& y) {
      switch (c.kind) {
        case EventKind::AlphaAxis: return std::abs(y[0]);
        case EventKind::KAxis: return std::abs(y[1]);
        default: return 0.0;
      }
    };
    if (c.loc.h_lo == 0.0) return c.loc.y_hi;
    return g(c.loc.y_lo) < g(c.loc.y_hi) ? c.loc.y_lo : c.loc.y_hi;
  }

  void finish(StopReason reason, const std::string& note) {
    done_ = true;
    trace_.stop = reason;
    trace_.events.push_back({EventKind::Truncation, y_[2], y_[0], y_[1], note});
  }

  SigmaParams params_;
  IntegratorConfig cfg_;
  IntegrateOptions options_;
  Rhs rhs_;
  OrbitTrace trace_;
  State y_{};
  double h_ = 0.0;
  bool singular_ = false;
  double k_switch_ = 1e-3;
  double tau_exit_ = 0.0;
  double tau_hmax_ = 0.0;
  int sections_ = 0;
  bool done_ = false;
};

}  // namespace

OrbitTrace integrate(const SigmaParams& params, PhasePoint start, const IntegratorConfig& cfg,
                     Direction direction, IntegrateOptions options) {
  cfg.validate();
  if (!start.finite()) throw DomainError("start point must be finite");
  if (params.singular_at_zero() && start.k == 0.0) {
    throw SingularityError("start lies on k = 0 where l(k) has a pole");
  }
  return Integrator(params, start, cfg, direction, options).run();
}

PhasePoint closed_form_line(const SigmaParams& params, double s0, double alpha0, double s) {
  const CriticalValues cv = critical_k(params);
  if (!cv.k_c2_pos) throw DomainError("closed_form_line needs c > 0");
  const double kc = *cv.k_c2_pos;
  const double phase = std::atan(alpha0 / kc) + kc * (s0 - s);
  if (std::abs(phase) >= 0.5 * std::numbers::pi) {
    throw PoleError(fmt::format("s = {} is outside the tangent branch through s0 = {}", s, s0));
  }
  return {kc * std::tan(phase), kc};
}

PhasePoint closed_form_c0(double alpha0, double s) {
  if (alpha0 == 0.0 || !std::isfinite(alpha0)) throw DomainError("alpha0 must be finite and nonzero");
  const double denom = s + 1.0 / alpha0;
  if (denom == 0.0 || (denom > 0.0) != (alpha0 > 0.0)) {
    throw PoleError(fmt::format("s = {} is at or beyond the pole s = {}", s, -1.0 / alpha0));
  }
  return {1.0 / denom, 0.0};
}

}  // namespace sigmak
