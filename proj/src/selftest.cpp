#include "sigmak/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "sigmak/conserved.hpp"
#include "sigmak/flow.hpp"
#include "sigmak/geometry.hpp"

namespace sigmak {

namespace {

class Tally {
 public:
  explicit Tally(std::string name) : name_(std::move(name)) {}

  void expect(bool ok, const std::function<std::string()>& what) {
    ++checked_;
    if (ok) return;
    if (failures_ == 0) first_ = what();
    ++failures_;
  }

  CheckResult result() const {
    if (failures_ == 0) return {name_, true, fmt::format("{} checks", checked_)};
    return {name_, false, fmt::format("{} of {} failed; first: {}", failures_, checked_, first_)};
  }

 private:
  std::string name_;
  long checked_ = 0;
  long failures_ = 0;
  std::string first_;
};

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  SigmaParams params() {
    const int n = integer(2, 5);
    const int i = integer(1, 2 * n - 1);
    const double c = integer(0, 9) == 0 ? 0.0 : uniform(-5.0, 5.0);
    return {n, i, c};
  }

  double nonzero_k() {
    const double mag = uniform(0.05, 4.0);
    return integer(0, 1) ? mag : -mag;
  }

 private:
  std::mt19937_64 rng_;
};

bool close(double x, double y, double tol) { return std::abs(x - y) <= tol * std::max(1.0, std::abs(y)); }

std::string at(const SigmaParams& p, double alpha, double k) {
  return fmt::format("(n={}, i={}, c={}) at (alpha={}, k={})", p.n(), p.i(), p.c(), alpha, k);
}

CheckResult constraint_closure(const SelftestOptions& o) {
  Tally t("model.constraint_closure");
  Sampler rnd(o.seed);
  for (int j = 0; j < o.samples; ++j) {
    const SigmaParams p = rnd.params();
    const double k = rnd.nonzero_k();
    const double l = l_of_k(p, k);
    const double scale = std::abs(p.weight_l() * l * ipow(k, p.i() - 1)) +
                         std::abs(p.weight_k() * ipow(k, p.i())) + std::abs(p.c());
    const double sigma = sigma_of(p, l, k);
    t.expect(std::abs(sigma - p.c()) <= 1e-12 * std::max(scale, 1e-300),
             [&] { return fmt::format("sigma = {} for c = {} {}", sigma, p.c(), at(p, 0, k)); });
  }
  return t.result();
}

CheckResult derivative_consistency(const SelftestOptions& o) {
  Tally t("model.dl_dk_consistency");
  Sampler rnd(o.seed + 1);
  for (int j = 0; j < o.samples; ++j) {
    const SigmaParams p = rnd.params();
    const double k = rnd.nonzero_k();
    const double h = 1e-6 * std::abs(k);
    const double fd = (l_of_k(p, k + h) - l_of_k(p, k - h)) / (2.0 * h);
    const double exact = dl_dk(p, k);
    t.expect(std::abs(fd - exact) <= 1e-5 * std::max(1.0, std::abs(exact)),
             [&] { return fmt::format("fd {} vs {} {}", fd, exact, at(p, 0, k)); });
  }
  return t.result();
}

CheckResult symmetry_suite(const SelftestOptions& o) {
  Tally t("model.symmetries");
  Sampler rnd(o.seed + 2);
  for (int j = 0; j < o.samples; ++j) {
    const SigmaParams p = rnd.params();
    const double k = rnd.nonzero_k();
    const double a = rnd.uniform(-4.0, 4.0);
    const PhaseVelocity v = vector_field(p, {a, k});

    const PhaseVelocity rev = vector_field(p, {-a, k});
    t.expect(rev.dk == -v.dk && rev.dalpha == v.dalpha,
             [&] { return "k-axis reversibility " + at(p, a, k); });

    if (p.has_k_mirror()) {
      const PhaseVelocity m = vector_field(p, {a, -k});
      t.expect(close(m.dk, -v.dk, 1e-14) && close(m.dalpha, v.dalpha, 1e-14),
               [&] { return "alpha-axis mirror " + at(p, a, k); });
    }

    const double l = rnd.uniform(-4.0, 4.0);
    const double s = sigma_of(p, l, k);
    const double sm = sigma_of(p, -l, -k);
    const double sign = p.odd_i() ? -1.0 : 1.0;
    t.expect(close(sm, sign * s, 1e-14),
             [&] { return fmt::format("sign law: {} vs {} (l = {}) {}", sm, sign * s, l, at(p, a, k)); });

    if (p.odd_i()) {
      const PhaseVelocity f = vector_field(p.with_c(-p.c()), {a, -k});
      t.expect(close(f.dk, -v.dk, 1e-14) && close(f.dalpha, v.dalpha, 1e-14),
               [&] { return "odd-i c flip " + at(p, a, k); });
    }
  }
  return t.result();
}

CheckResult l_minus_2k_identity(const SelftestOptions& o) {
  Tally t("model.l_minus_2k_identity");
  Sampler rnd(o.seed + 3);
  for (int j = 0; j < o.samples; ++j) {
    const SigmaParams p = rnd.params();
    const double k = rnd.nonzero_k();
    const double lhs = l_of_k(p, k) - 2.0 * k;
    const double rhs = p.sigma_tilde() * ipow(k, 1 - p.i()) - p.a() * k;
    const double scale = std::abs(p.sigma_tilde() * ipow(k, 1 - p.i())) + std::abs(p.a() * k);
    t.expect(std::abs(lhs - rhs) <= 1e-12 * scale,
             [&] { return fmt::format("{} vs {} {}", lhs, rhs, at(p, 0, k)); });
  }
  return t.result();
}

CheckResult critical_values(const SelftestOptions& o) {
  Tally t("model.critical_values");
  Sampler rnd(o.seed + 4);
  for (int j = 0; j < std::max(1, o.samples / 10); ++j) {
    const SigmaParams p = rnd.params();
    const CriticalValues cv = critical_k(p);
    for (const auto& r : {cv.k_c2_pos, cv.k_c2_neg}) {
      if (r) {
        t.expect(std::abs(l_of_k(p, *r) - 2.0 * *r) < 1e-10, [&] { return "k_c2 residual " + at(p, 0, *r); });
      }
    }
    for (const auto& r : {cv.k_c1_pos, cv.k_c1_neg}) {
      if (r) {
        t.expect(std::abs(l_of_k(p, *r) - *r) < 1e-10, [&] { return "k_c1 residual " + at(p, 0, *r); });
      }
    }
    if (cv.k_c2_pos && cv.k_c1_pos) {
      t.expect(0.0 < *cv.k_c2_pos && *cv.k_c2_pos < *cv.k_c1_pos, [&] { return "root order " + at(p, 0, 0); });
    }
    t.expect(critical_k_bisection_discrepancy(p) < 1e-12, [&] { return "bisection " + at(p, 0, 0); });
  }
  return t.result();
}

CheckResult nullcline_shape(const SelftestOptions& o) {
  Tally t("model.nullcline_shape");
  Sampler rnd(o.seed + 5);
  for (int j = 0; j < std::max(1, o.samples / 100); ++j) {
    SigmaParams p = rnd.params();
    if (!(p.c() > 0.0)) p = p.with_c(std::abs(p.c()) + 0.5);
    const double kc1 = *critical_k(p).k_c1_pos;
    const double h = 1e-2 * kc1;
    for (double k = kc1 * 1.05; k < kc1 * 4.0; k *= 1.07) {
      const double d2 = *nullcline_alpha(p, k + h) - 2.0 * *nullcline_alpha(p, k) + *nullcline_alpha(p, k - h);
      t.expect(d2 < 0.0, [&] { return fmt::format("second difference {} {}", d2, at(p, 0, k)); });
      const double a = *nullcline_alpha(p, k);
      const PhaseVelocity v = vector_field(p, {a, k});
      t.expect(std::abs(v.dalpha) < 1e-9 * (1.0 + k * k),
               [&] { return fmt::format("dalpha {} on nullcline {}", v.dalpha, at(p, a, k)); });
    }
    const double big = 1e6 * kc1;
    const double ratio = *nullcline_alpha(p, big) / big;
    t.expect(close(ratio, std::sqrt(p.nullcline_slope_sq()), 1e-6),
             [&] { return fmt::format("asymptotic slope {} {}", ratio, at(p, 0, big)); });
  }
  return t.result();
}

IntegratorConfig quick_cfg(double s_max) {
  IntegratorConfig cfg;
  cfg.s_max = s_max;
  return cfg;
}

CheckResult k_axis_mirror(const SelftestOptions&) {
  Tally t("flow.k_axis_mirror");
  const SigmaParams p{2, 1, 4};
  for (double k0 : {1.5, 2.5, 3.0}) {
    const OrbitTrace f = integrate(p, {0.0, k0}, quick_cfg(50), Direction::Forward, {1});
    const OrbitTrace b = integrate(p, {0.0, k0}, quick_cfg(50), Direction::Backward, {1});
    t.expect(f.samples.size() == b.samples.size(), [&] { return "sample counts differ"; });
    const std::size_t n = std::min(f.samples.size(), b.samples.size());
    for (std::size_t j = 0; j < n; ++j) {
      const TraceSample& x = f.samples[j];
      const TraceSample& y = b.samples[b.samples.size() - 1 - j];
      t.expect(std::abs(x.s + y.s) < 1e-7 && std::abs(x.alpha + y.alpha) < 1e-7 && std::abs(x.k - y.k) < 1e-7,
               [&] { return fmt::format("mismatch at s = {}", x.s); });
    }
  }
  return t.result();
}

CheckResult invariant_sets(const SelftestOptions&) {
  Tally t("flow.invariant_sets");
  for (const SigmaParams& p : {SigmaParams{2, 1, 4}, SigmaParams{2, 2, 6}, SigmaParams{2, 3, 1},
                               SigmaParams{2, 3, -1}}) {
    const CriticalValues cv = critical_k(p);
    for (const auto& r : {cv.k_c2_pos, cv.k_c2_neg}) {
      if (!r) continue;
      for (double a0 : {-1.0, 0.0, 0.5}) {
        const OrbitTrace tr = integrate(p, {a0, *r}, quick_cfg(50), Direction::Forward);
        for (const TraceSample& s : tr.samples) {
          t.expect(std::abs(s.k - *r) < 1e-9, [&] { return "left the line " + at(p, s.alpha, s.k); });
        }
      }
    }
    for (const auto& r : {cv.k_c1_pos, cv.k_c1_neg}) {
      if (!r) continue;
      const OrbitTrace tr = integrate(p, {0.0, *r}, quick_cfg(5), Direction::Forward);
      for (const TraceSample& s : tr.samples) {
        t.expect(std::abs(s.alpha) < 1e-12 && std::abs(s.k - *r) < 1e-12, [&] { return "stationary point moved " + at(p, s.alpha, s.k); });
      }
    }
  }
  return t.result();
}

CheckResult monotone_band(const SelftestOptions& o) {
  Tally t("flow.monotone_band_signs");
  Sampler rnd(o.seed + 6);
  const SigmaParams p{2, 1, 4};
  const double kc1 = *critical_k(p).k_c1_pos;
  for (int j = 0; j < o.samples; ++j) {
    const double k = rnd.uniform(kc1 * 1.0001, 6.0);
    const double a = rnd.uniform(1e-6, 1.0) * *nullcline_alpha(p, k);
    const PhaseVelocity v = vector_field(p, {a, k});
    t.expect(v.dk < 0.0 && v.dalpha > 0.0, [&] { return "sign " + at(p, a, k); });
  }
  const OrbitTrace tr = integrate(p, {0.0, 3.0}, quick_cfg(10), Direction::Backward, {1});
  for (const TraceSample& s : tr.samples) {
    if (!(s.alpha > 0.0 && s.k > kc1)) continue;
    const auto na = nullcline_alpha(p, s.k);
    if (!na || s.alpha >= *na) continue;
    const PhaseVelocity v = vector_field(p, {s.alpha, s.k});
    t.expect(v.dk < 0.0 && v.dalpha > 0.0, [&] { return "trace sign " + at(p, s.alpha, s.k); });
  }
  return t.result();
}

CheckResult trace_convexity(const SelftestOptions&) {
  Tally t("flow.trace_convexity");
  for (const auto& [p, start] : {std::pair{SigmaParams{2, 2, 6}, PhasePoint{0.0, 2.0}},
                                 std::pair{SigmaParams{2, 3, 1}, PhasePoint{0.0, 2.0}},
                                 std::pair{SigmaParams{2, 1, 4}, PhasePoint{0.0, 2.5}}}) {
    const OrbitTrace tr = integrate(p, start, quick_cfg(50), Direction::Forward, {2});
    const auto& v = tr.samples;
    for (std::size_t j = 1; j + 1 < v.size(); ++j) {
      const TraceSample &x0 = v[j - 1], &x1 = v[j], &x2 = v[j + 1];
      if (std::min({std::abs(x0.alpha), std::abs(x1.alpha), std::abs(x2.alpha)}) < 1e-2) continue;
      if (!((x0.k < x1.k && x1.k < x2.k) || (x0.k > x1.k && x1.k > x2.k))) continue;
      if (std::abs(x2.k - x0.k) < 1e-4) continue;
      const double dd = 2.0 * ((x2.alpha - x1.alpha) / (x2.k - x1.k) - (x1.alpha - x0.alpha) / (x1.k - x0.k)) /
                        (x2.k - x0.k);
      const double model = d2alpha_dk2(p, {x1.alpha, x1.k});
      if (std::abs(model) < 1e-2) continue;
      t.expect((dd > 0.0) == (model > 0.0),
               [&] { return fmt::format("discrete {} vs model {} {}", dd, model, at(p, x1.alpha, x1.k)); });
    }
  }
  return t.result();
}

CheckResult blowup_law(const SelftestOptions&) {
  Tally t("flow.blowup_law");
  const SigmaParams p{2, 3, 1};
  const double kc2 = *critical_k(p).k_c2_pos;
  for (const PhasePoint start : {PhasePoint{0.5, 0.5}, PhasePoint{0.1, 0.3}, PhasePoint{-0.4, 0.6}}) {
    const OrbitTrace tr = integrate(p, start, IntegratorConfig{}, Direction::Forward);
    t.expect(tr.stop == StopReason::AxisReached, [&] { return "no finite-s arrival " + at(p, start.alpha, start.k); });
    if (tr.stop != StopReason::AxisReached) continue;
    const TraceSample& last = tr.samples.back();
    const DesingularizedVelocity dv = desingularized_field(p, {last.alpha, last.k});
    const double dkds = dv.ds == 0.0 ? HUGE_VAL : std::abs(dv.dk / dv.ds);
    t.expect(dkds > 1e6, [&] { return fmt::format("terminal |dk/ds| = {}", dkds); });
    std::vector<std::pair<double, double>> pts;
    for (auto it = tr.samples.rbegin(); it != tr.samples.rend() && std::abs(it->k) < 0.05 * kc2; ++it) {
      pts.emplace_back(it->s, ipow(it->k, p.i()));
    }
    t.expect(pts.size() >= 3, [&] { return "too few samples near the axis"; });
    if (pts.size() < 3) continue;
    double ms = 0, my = 0;
    for (auto [s, y] : pts) ms += s, my += y;
    ms /= pts.size();
    my /= pts.size();
    double sxy = 0, sxx = 0;
    for (auto [s, y] : pts) sxy += (s - ms) * (y - my), sxx += (s - ms) * (s - ms);
    const double slope = sxy / sxx;
    double worst = 0;
    for (auto [s, y] : pts) worst = std::max(worst, std::abs(y - (my + slope * (s - ms))));
    t.expect(worst < 1e-6, [&] { return fmt::format("k^i fit residual {}", worst); });
  }
  return t.result();
}

CheckResult determinism(const SelftestOptions&) {
  Tally t("flow.determinism");
  const SigmaParams p{2, 3, 1};
  for (const PhasePoint start : {PhasePoint{0.5, 0.5}, PhasePoint{0.3, 2.0}}) {
    const OrbitTrace a = integrate(p, start, quick_cfg(20), Direction::Forward);
    const OrbitTrace b = integrate(p, start, quick_cfg(20), Direction::Forward);
    bool same = a.samples.size() == b.samples.size();
    for (std::size_t j = 0; same && j < a.samples.size(); ++j) {
      same = a.samples[j].s == b.samples[j].s && a.samples[j].alpha == b.samples[j].alpha &&
             a.samples[j].k == b.samples[j].k && a.samples[j].t == b.samples[j].t;
    }
    t.expect(same, [&] { return "repeat integration differs " + at(p, start.alpha, start.k); });
  }
  return t.result();
}

CheckResult energy_drift(const SelftestOptions&) {
  Tally t("conserved.energy_drift");
  const SigmaParams p{2, 1, 4};
  const FirstIntegral fi(p, *critical_k(p).k_c1_pos);
  for (double k0 : {1.5, 2.0, 3.0}) {
    const OrbitTrace tr = integrate(p, {0.0, k0}, IntegratorConfig{}, Direction::Forward, {2});
    const double e0 = fi.energy({0.0, k0});
    double worst = 0;
    for (const TraceSample& s : tr.samples) worst = std::max(worst, std::abs(fi.energy({s.alpha, s.k}) - e0));
    t.expect(worst / std::abs(e0) < 1e-8, [&] { return fmt::format("relative drift {} from k0 = {}", worst / std::abs(e0), k0); });
  }
  return t.result();
}

CheckResult integrating_factor(const SelftestOptions& o) {
  Tally t("conserved.integrating_factor");
  Sampler rnd(o.seed + 7);
  for (int j = 0; j < o.samples; ++j) {
    const SigmaParams p = rnd.params();
    const double k = rnd.nonzero_k();
    double g;
    try {
      g = g_of_k(p, k);
    } catch (const SingularityError&) {
      continue;
    }
    const double gap = 2.0 * k - l_of_k(p, k);
    // keep clear of the k_c2 locus so the difference quotient is meaningful
    if (std::abs(gap) < 1e-2 * (std::abs(k) + 1.0)) continue;
    t.expect(g > 0.0, [&] { return "g not positive " + at(p, 0, k); });
    const double h = 1e-6 * std::abs(k);
    const double fd = (g_of_k(p, k + h) - g_of_k(p, k - h)) / (2.0 * h);
    const double expected = -2.0 * g / gap;
    t.expect(std::abs(fd - expected) <= 1e-6 * std::max(1.0, std::abs(expected)) + 1e-8 * g,
             [&] { return fmt::format("dg/dk {} vs {} {}", fd, expected, at(p, 0, k)); });
  }
  return t.result();
}

CheckResult exact_differential(const SelftestOptions& o) {
  Tally t("conserved.exact_differential");
  Sampler rnd(o.seed + 8);
  const SigmaParams p{2, 1, 4};
  const FirstIntegral fi(p, 2.0);
  auto omega = [&](double a, double k, double da, double dk) {
    const double g = g_of_k(p, k);
    const double l = l_of_k(p, k);
    return g * (k * k - k * l - a * a) / (2.0 * k - l) * dk + g * a * da;
  };
  for (int j = 0; j < std::max(1, o.samples / 100); ++j) {
    const PhasePoint p0{rnd.uniform(-2.0, 2.0), rnd.uniform(1.2, 4.0)};
    const PhasePoint p1{rnd.uniform(-2.0, 2.0), rnd.uniform(1.2, 4.0)};
    auto f = [&](double u) {
      return omega(p0.alpha + u * (p1.alpha - p0.alpha), p0.k + u * (p1.k - p0.k), p1.alpha - p0.alpha,
                   p1.k - p0.k);
    };
    const double line = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 10, 1e-14);
    const double diff = fi.energy(p1) - fi.energy(p0);
    t.expect(std::abs(line - diff) < 1e-9 * std::max(1.0, std::abs(diff)),
             [&] { return fmt::format("line integral {} vs energy difference {}", line, diff); });
  }
  return t.result();
}

CheckResult level_set(const SelftestOptions&) {
  Tally t("conserved.level_set");
  const SigmaParams p{2, 1, 4};
  const FirstIntegral fi(p, 2.0);
  const OrbitTrace tr = integrate(p, {0.0, 3.0}, IntegratorConfig{}, Direction::Forward, {2});
  const double e0 = fi.energy({0.0, 3.0});
  for (const TraceSample& s : tr.samples) {
    const auto a = fi.alpha_from_k(s.k, e0);
    // compared in alpha^2 so the turning points are not ill-conditioned
    const double d = a ? std::abs(s.alpha * s.alpha - *a * *a) : s.alpha * s.alpha;
    t.expect(d < 1e-8 * std::max(1.0, s.alpha * s.alpha),
             [&] { return fmt::format("alpha^2 mismatch {} at k = {}", d, s.k); });
  }
  return t.result();
}

CheckResult radius_law(const SelftestOptions&) {
  Tally t("geometry.radius_law");
  const SigmaParams p{2, 1, 4};
  for (const PhasePoint start : {PhasePoint{0.0, 1.0}, PhasePoint{0.5, 2.0}}) {
    const ProfileCurve pc = reconstruct_profile(p, start, quick_cfg(5));
    for (const ProfileSample& s : pc.samples) {
      t.expect(std::abs(s.r * std::sqrt(s.alpha * s.alpha + s.k * s.k) - 1.0) < 1e-12,
               [&] { return "radius law " + at(p, s.alpha, s.k); });
    }
  }
  return t.result();
}

CheckResult graph_slope(const SelftestOptions&) {
  Tally t("geometry.graph_slope");
  const SigmaParams p{2, 1, 4};
  for (const PhasePoint start : {PhasePoint{0.0, 1.0}, PhasePoint{0.5, 2.0}}) {
    const ProfileCurve pc = reconstruct_profile(p, start, quick_cfg(5));
    const auto& v = pc.samples;
    auto d5 = [&](std::size_t j, auto field) {
      const double h = v[j + 1].s - v[j].s;
      return (-field(v[j + 2]) + 8.0 * field(v[j + 1]) - 8.0 * field(v[j - 1]) + field(v[j - 2])) / (12.0 * h);
    };
    for (std::size_t j = 2; j + 2 < v.size(); ++j) {
      if (std::abs(v[j].alpha) <= 1e-3) continue;
      const double h = v[j + 1].s - v[j].s;
      bool uniform = true;
      for (std::size_t m = j - 2; m < j + 2; ++m) uniform = uniform && std::abs(v[m + 1].s - v[m].s - h) < 1e-12;
      if (!uniform) continue;
      const double slope = d5(j, [](const ProfileSample& x) { return x.t; }) /
                           d5(j, [](const ProfileSample& x) { return x.r; });
      const double lhs = slope * slope + v[j].r * v[j].r;
      const double rhs = 1.0 / (v[j].alpha * v[j].alpha);
      t.expect(std::abs(lhs - rhs) < 1e-6 * std::max(1.0, rhs),
               [&] { return fmt::format("residual {} at r = {}", lhs - rhs, v[j].r); });
    }
  }
  return t.result();
}

CheckResult pansu_consistency(const SelftestOptions&) {
  Tally t("geometry.pansu_consistency");
  for (const auto& [n, c] : {std::pair{2, 4.0}, std::pair{3, 3.0}, std::pair{2, 1.0}}) {
    const SigmaParams p{n, 1, c};
    const double lambda = c / (2.0 * n);
    const ProfileCurve pc = reconstruct_profile(p, {0.0, lambda}, IntegratorConfig{});
    for (const ProfileSample& s : pc.samples) {
      const double z = s.r;
      if (z < 1e-3 / lambda || z > (1.0 - 1e-3) / lambda) continue;
      const double expected = (s.alpha > 0.0 ? 1.0 : -1.0) * pansu_profile(lambda, z);
      t.expect(std::abs(s.t - expected) < 1e-6,
               [&] { return fmt::format("t = {} vs {} at r = {} (lambda = {})", s.t, expected, z, lambda); });
    }
  }
  return t.result();
}

CheckResult profile_mirror(const SelftestOptions&) {
  Tally t("geometry.mirror");
  const SigmaParams p{2, 1, 4};
  const ProfileCurve a = reconstruct_profile(p, {0.7, 2.0}, quick_cfg(5));
  const ProfileCurve b = reconstruct_profile(p, {-0.7, 2.0}, quick_cfg(5));
  t.expect(a.samples.size() == b.samples.size(), [&] { return "sample counts differ"; });
  const std::size_t n = std::min(a.samples.size(), b.samples.size());
  for (std::size_t j = 0; j < n; ++j) {
    const ProfileSample& x = a.samples[j];
    const ProfileSample& y = b.samples[n - 1 - j];
    t.expect(std::abs(x.s + y.s) < 1e-12 && std::abs(x.r - y.r) < 1e-12 && std::abs(x.t + y.t) < 1e-10 &&
                 std::abs(x.alpha + y.alpha) < 1e-12,
             [&] { return fmt::format("mirror mismatch at s = {}", x.s); });
  }
  return t.result();
}

CheckResult equator_regularity(const SelftestOptions&) {
  Tally t("geometry.equator_regularity");
  const SigmaParams p{2, 1, 4};
  const OrbitTrace tr = integrate(p, {0.5, 2.0}, quick_cfg(10), Direction::Forward);
  const auto& v = tr.samples;
  for (std::size_t j = 1; j < v.size(); ++j) {
    if ((v[j - 1].alpha > 0.0) == (v[j].alpha > 0.0)) continue;
    const double fd = (v[j].t - v[j - 1].t) / (v[j].s - v[j - 1].s);
    const double mid = 0.5 * (-v[j].k / (v[j].alpha * v[j].alpha + v[j].k * v[j].k) -
                              v[j - 1].k / (v[j - 1].alpha * v[j - 1].alpha + v[j - 1].k * v[j - 1].k));
    t.expect(std::isfinite(fd) && std::abs(fd - mid) < 1e-4,
             [&] { return fmt::format("dt/ds {} vs {} across alpha = 0 at s = {}", fd, mid, v[j].s); });
  }
  return t.result();
}

CheckResult center_vs_drift(const SelftestOptions&) {
  Tally t("geometry.center_track");
  const SigmaParams p{2, 1, 4};
  for (const PhasePoint start : {PhasePoint{0.5, 2.0}, PhasePoint{0.0, 3.0}}) {
    const OrbitTrace tr = integrate(p, start, quick_cfg(10), Direction::Forward);
    const auto ct = center_track(p, tr);
    for (std::size_t j = 0; j < ct.size(); ++j) {
      t.expect(std::abs(ct[j].t_center - tr.samples[j].t) < 1e-9,
               [&] { return fmt::format("quadrature {} vs integrated {} at s = {}", ct[j].t_center, tr.samples[j].t, ct[j].s); });
    }
  }
  return t.result();
}

using CheckFn = CheckResult (*)(const SelftestOptions&);

const std::vector<std::pair<std::string, CheckFn>>& registry() {
  static const std::vector<std::pair<std::string, CheckFn>> checks{
      {"model.constraint_closure", constraint_closure},
      {"model.dl_dk_consistency", derivative_consistency},
      {"model.symmetries", symmetry_suite},
      {"model.l_minus_2k_identity", l_minus_2k_identity},
      {"model.critical_values", critical_values},
      {"model.nullcline_shape", nullcline_shape},
      {"flow.k_axis_mirror", k_axis_mirror},
      {"flow.invariant_sets", invariant_sets},
      {"flow.monotone_band_signs", monotone_band},
      {"flow.trace_convexity", trace_convexity},
      {"flow.blowup_law", blowup_law},
      {"flow.determinism", determinism},
      {"conserved.energy_drift", energy_drift},
      {"conserved.integrating_factor", integrating_factor},
      {"conserved.exact_differential", exact_differential},
      {"conserved.level_set", level_set},
      {"geometry.radius_law", radius_law},
      {"geometry.graph_slope", graph_slope},
      {"geometry.pansu_consistency", pansu_consistency},
      {"geometry.mirror", profile_mirror},
      {"geometry.equator_regularity", equator_regularity},
      {"geometry.center_track", center_vs_drift},
  };
  return checks;
}

}  // namespace

std::vector<std::string> selftest_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : registry()) out.push_back(name);
  return out;
}

CheckResult run_check(const std::string& name, const SelftestOptions& options) {
  for (const auto& [n, fn] : registry()) {
    if (n != name) continue;
    try {
      return fn(options);
    } catch (const std::exception& e) {
      return {name, false, std::string("exception: ") + e.what()};
    }
  }
  return {name, false, "unknown check"};
}

std::vector<CheckResult> run_selftest(const SelftestOptions& options) {
  std::vector<CheckResult> out;
  for (const auto& [name, fn] : registry()) out.push_back(run_check(name, options));
  return out;
}

}  // namespace sigmak
