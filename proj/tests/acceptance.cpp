// Acceptance suite. `acceptance N` runs criterion N, no argument runs all.
// Each criterion prints one line: "criterion N PASS|FAIL <title>: <detail>".

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "sigmak/conserved.hpp"
#include "sigmak/flow.hpp"
#include "sigmak/geometry.hpp"
#include "sigmak/portrait.hpp"

using namespace sigmak;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int sgn(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

Outcome pansu_oracle() {
  const SigmaParams p{2, 1, 4};
  const double lambda = p.c() / (2.0 * p.n());
  const ProfileCurve pc = reconstruct_profile(p, {0.0, 1.0}, IntegratorConfig{});
  double worst = 0.0;
  long used = 0;
  for (const ProfileSample& s : pc.samples) {
    if (s.r < 1e-3 || s.r > 1.0 - 1e-3) continue;
    worst = std::max(worst, std::abs(s.t - sgn(s.alpha) * pansu_profile(lambda, s.r)));
    ++used;
  }
  const double cap_front = std::abs(pc.samples.front().t);
  const double cap_back = std::abs(pc.samples.back().t);
  const double quarter = std::numbers::pi / 4;
  const double cap_err = std::max(std::abs(cap_front - quarter), std::abs(cap_back - quarter));
  return {used > 100 && worst < 1e-6 && cap_err < 1e-6,
          fmt::format("max |dt| = {:.3g} over {} samples, cap heights {:.12f} / {:.12f} (|err| {:.3g})", worst,
                      used, cap_front, cap_back, cap_err)};
}

Outcome conservation() {
  const SigmaParams p{2, 1, 4};
  const FirstIntegral fi(p, 4.0 / 3.0);
  const OrbitTrace tr = integrate(p, {0.0, 3.0}, IntegratorConfig{}, Direction::Forward, {2});
  if (tr.stop != StopReason::SectionLimit) return {false, "orbit did not close"};
  const double e0 = fi.energy({0.0, 3.0});
  double worst = 0.0;
  for (const TraceSample& s : tr.samples) worst = std::max(worst, std::abs(fi.energy({s.alpha, s.k}) - e0));
  const double rel = worst / std::abs(e0);
  return {rel < 1e-8, fmt::format("|dE/E| = {:.3g} over one period (s = {:.6f}, {} samples)", rel,
                                  tr.samples.back().s, tr.samples.size())};
}

Outcome closed_forms() {
  double c0_err = 0.0;
  for (int i : {1, 2, 3}) {
    IntegratorConfig cfg;
    cfg.s_max = 10.0;
    const OrbitTrace tr = integrate({2, i, 0.0}, {1.0, 0.0}, cfg, Direction::Forward);
    if (tr.samples.back().s < 10.0 - 1e-12) return {false, "c = 0 trace stopped early"};
    for (const TraceSample& s : tr.samples) {
      const PhasePoint e = closed_form_c0(1.0, s.s);
      c0_err = std::max({c0_err, std::abs(s.alpha - e.alpha), std::abs(s.k - e.k)});
    }
  }
  // phase atan(alpha / k_c2) is the well-conditioned error measure up to the pole
  double line_err = 0.0, line_rel = 0.0;
  long line_samples = 0;
  for (const SigmaParams& p : {SigmaParams{2, 1, 4}, SigmaParams{2, 2, 6}, SigmaParams{3, 3, 2}}) {
    const double kc2 = *critical_k(p).k_c2_pos;
    for (Direction d : {Direction::Forward, Direction::Backward}) {
      const OrbitTrace tr = integrate(p, {0.0, kc2}, IntegratorConfig{}, d);
      for (const TraceSample& s : tr.samples) {
        const PhasePoint e = closed_form_line(p, 0.0, 0.0, s.s);
        line_err = std::max(line_err, std::abs(std::atan(s.alpha / kc2) - std::atan(e.alpha / kc2)));
        line_rel = std::max(line_rel, std::abs(s.alpha - e.alpha) / (1.0 + std::abs(e.alpha)));
        ++line_samples;
      }
    }
  }
  return {c0_err < 1e-8 && line_err < 1e-8,
          fmt::format("c = 0 max error {:.3g}; tangent branch max phase error {:.3g} (relative alpha error {:.3g}) "
                      "over {} samples",
                      c0_err, line_err, line_rel, line_samples)};
}

struct Band {
  std::string name;
  double k_lo;
  double k_hi;
  std::string expected;
};

std::vector<PhasePoint> band_seeds(const Band& b, std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(-2.0, 2.0), uk(b.k_lo, b.k_hi);
  std::vector<PhasePoint> out;
  while (static_cast<int>(out.size()) < count) {
    const PhasePoint q{ua(rng), uk(rng)};
    if (std::abs(q.alpha) < 1e-3 && std::abs(q.k - b.k_lo) < 1e-3) continue;
    out.push_back(q);
  }
  return out;
}

std::vector<Band> sweep_bands(const SigmaParams& p) {
  const double kc2 = *critical_k(p).k_c2_pos;
  return {{"k > k_c2", kc2 + 0.05, 3.0, "Periodic"},
          {"0 < k < k_c2", 0.02, kc2 - 0.05, "ArcToAlphaAxis"},
          {"k < 0", -3.0, -0.05, "ArcBiInfinite"}};
}

Outcome classification_sweep() {
  const SigmaParams p{2, 3, 1};
  const double kc1 = *critical_k(p).k_c1_pos;
  std::uint64_t seed = 31;
  bool ok = true;
  std::string detail;
  for (const Band& b : sweep_bands(p)) {
    std::map<std::string, int> counts;
    int wrong = 0, asym = 0;
    for (const PhasePoint& q : band_seeds(b, seed++, 100)) {
      if (std::abs(q.alpha) < 1e-6 && std::abs(q.k - kc1) < 1e-6) continue;
      OrbitClass c;
      try {
        c = classify_orbit(p, q, IntegratorConfig{});
      } catch (const Error& e) {
        c = orbit::Truncated{e.what()};
      }
      const std::string name(class_name(c));
      ++counts[name];
      if (name != b.expected) {
        ++wrong;
      } else if (const auto* arc = std::get_if<orbit::ArcToAlphaAxis>(&c)) {
        if (std::abs(arc->alpha_plus + arc->alpha_minus) >= 1e-5) ++asym;
      }
    }
    ok = ok && wrong == 0 && asym == 0;
    std::string tally;
    for (const auto& [name, n] : counts) tally += fmt::format("{}{}={}", tally.empty() ? "" : " ", name, n);
    detail += fmt::format("{}[{}: expect {}, got {}; asymmetric {}]", detail.empty() ? "" : " ", b.name,
                          b.expected, tally, asym);
  }
  return {ok, detail};
}

struct FitResult {
  bool ok = false;
  double dkds = 0.0;
  double residual = 0.0;
  std::size_t points = 0;
};

// Terminal slope and affine fit of k^i against s over the samples with |k| < band.
FitResult endpoint_fit(const SigmaParams& p, const OrbitTrace& tr, double band) {
  FitResult r;
  const TraceSample& last = tr.direction == Direction::Forward ? tr.samples.back() : tr.samples.front();
  const DesingularizedVelocity dv = desingularized_field(p, {last.alpha, last.k});
  r.dkds = dv.ds == 0.0 ? HUGE_VAL : std::abs(dv.dk / dv.ds);
  // only the run of samples adjacent to the terminal end
  std::vector<std::pair<double, double>> pts;
  auto take = [&](const TraceSample& s) {
    if (std::abs(s.k) >= band) return false;
    pts.emplace_back(s.s, ipow(s.k, p.i()));
    return true;
  };
  if (tr.direction == Direction::Forward) {
    for (auto it = tr.samples.rbegin(); it != tr.samples.rend() && take(*it); ++it) {
    }
  } else {
    for (auto it = tr.samples.begin(); it != tr.samples.end() && take(*it); ++it) {
    }
  }
  r.points = pts.size();
  if (pts.size() < 3) return r;
  double ms = 0.0, my = 0.0;
  for (auto [s, y] : pts) ms += s, my += y;
  ms /= pts.size();
  my /= pts.size();
  double sxy = 0.0, sxx = 0.0;
  for (auto [s, y] : pts) sxy += (s - ms) * (y - my), sxx += (s - ms) * (s - ms);
  const double slope = sxy / sxx;
  for (auto [s, y] : pts) r.residual = std::max(r.residual, std::abs(y - (my + slope * (s - ms))));
  r.ok = r.dkds > 1e6 && r.residual < 1e-6;
  return r;
}

Outcome blowup_law() {
  const SigmaParams p{2, 3, 1};
  const double kc2 = *critical_k(p).k_c2_pos;
  const Band arcs = sweep_bands(p)[1];
  int ends = 0, bad = 0;
  double min_slope = HUGE_VAL, max_res = 0.0;
  std::size_t min_points = SIZE_MAX;
  for (const PhasePoint& q : band_seeds(arcs, 32, 100)) {
    for (Direction d : {Direction::Forward, Direction::Backward}) {
      const OrbitTrace tr = integrate(p, q, IntegratorConfig{}, d);
      if (tr.stop != StopReason::AxisReached) {
        ++bad;
        continue;
      }
      const FitResult f = endpoint_fit(p, tr, 0.05 * kc2);
      ++ends;
      bad += !f.ok;
      min_slope = std::min(min_slope, f.dkds);
      max_res = std::max(max_res, f.residual);
      min_points = std::min(min_points, f.points);
    }
  }
  return {bad == 0 && ends == 200,
          fmt::format("{} arc ends, {} failing; min terminal |dk/ds| = {:.3g}, max k^i fit residual = {:.3g}, "
                      "min fit points = {}",
                      ends, bad, min_slope, max_res, min_points)};
}

Outcome convexity() {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> ua(1e-3, 3.0), uk(-3.0, 3.0);
  auto valid = [](const SigmaParams& p, PhasePoint q) {
    if (std::abs(q.k) < 1e-6) return false;
    return std::abs(2.0 * q.k - l_of_k(p, q.k)) > 1e-6;
  };
  const SigmaParams even{2, 2, 6};
  int even_bad = 0, n_even = 0;
  while (n_even < 1000) {
    const PhasePoint q{ua(rng), uk(rng)};
    if (!valid(even, q)) continue;
    ++n_even;
    even_bad += !(d2alpha_dk2(even, q) < 0.0);
  }
  const SigmaParams odd{2, 3, 1};
  std::uniform_real_distribution<double> upper(1e-3, 3.0);
  int odd_bad = 0, n_odd = 0;
  while (n_odd < 1000) {
    const PhasePoint q{ua(rng), upper(rng)};
    if (!valid(odd, q)) continue;
    ++n_odd;
    odd_bad += !(d2alpha_dk2(odd, q) < 0.0);
    odd_bad += !(d2alpha_dk2(odd, {-q.alpha, q.k}) > 0.0);
  }
  return {even_bad == 0 && odd_bad == 0,
          fmt::format("even i: {} violations in {}; odd i: {} violations in {} mirrored pairs", even_bad, n_even,
                      odd_bad, n_odd)};
}

Outcome stationary_sets() {
  double worst_field = 0.0, worst_drift = 0.0;
  int points = 0, lines = 0;
  for (const SigmaParams& p : {SigmaParams{2, 1, 4}, SigmaParams{2, 2, 6}, SigmaParams{2, 3, 1},
                               SigmaParams{3, 2, 5}, SigmaParams{3, 5, 2}, SigmaParams{2, 3, -1}}) {
    const CriticalValues cv = critical_k(p);
    auto field = [&](PhasePoint q) {
      if (p.singular_at_zero() && q.k == 0.0) {
        const DesingularizedVelocity v = desingularized_field(p, q);
        return std::hypot(v.dk, v.dalpha);
      }
      const PhaseVelocity v = vector_field(p, q);
      return std::hypot(v.dk, v.dalpha);
    };
    worst_field = std::max(worst_field, field({0.0, 0.0}));
    ++points;
    for (const auto& r : {cv.k_c1_pos, cv.k_c1_neg}) {
      if (!r) continue;
      worst_field = std::max(worst_field, field({0.0, *r}));
      ++points;
    }
    IntegratorConfig cfg;
    cfg.s_max = 50.0;
    for (const auto& r : {cv.k_c2_pos, cv.k_c2_neg}) {
      if (!r) continue;
      for (double a0 : {-1.0, 0.0, 0.5, 2.0}) {
        for (Direction d : {Direction::Forward, Direction::Backward}) {
          const OrbitTrace tr = integrate(p, {a0, *r}, cfg, d);
          for (const TraceSample& s : tr.samples) worst_drift = std::max(worst_drift, std::abs(s.k - *r));
          ++lines;
        }
      }
    }
  }
  return {worst_field < 1e-12 && worst_drift < 1e-9,
          fmt::format("max |field| {:.3g} at {} stationary points; max line drift {:.3g} over {} traces", worst_field,
                      points, worst_drift, lines)};
}

Outcome symmetries() {
  constexpr int kSamples = 10000;
  std::mt19937_64 rng(83);
  std::uniform_int_distribution<int> un(2, 5), coin(0, 1);
  std::uniform_real_distribution<double> uc(-5.0, 5.0), ukm(0.05, 4.0), ua(-4.0, 4.0);
  auto params = [&] {
    const int n = un(rng);
    const int i = std::uniform_int_distribution<int>(1, 2 * n - 1)(rng);
    return SigmaParams{n, i, uc(rng)};
  };
  auto k_sample = [&] { return coin(rng) ? ukm(rng) : -ukm(rng); };
  auto near = [](double x, double y) { return std::abs(x - y) <= 1e-13 * std::max(1.0, std::abs(y)); };
  int rev = 0, mirror = 0, sign = 0, conj = 0;
  for (int j = 0; j < kSamples; ++j) {
    const SigmaParams p = params();
    const PhasePoint q{ua(rng), k_sample()};
    const PhaseVelocity v = vector_field(p, q), w = vector_field(p, {-q.alpha, q.k});
    rev += !(w.dk == -v.dk && w.dalpha == v.dalpha);
  }
  for (int j = 0; j < kSamples; ++j) {
    SigmaParams p = params();
    while (p.odd_i()) p = params();
    const PhasePoint q{ua(rng), k_sample()};
    const PhaseVelocity v = vector_field(p, q), w = vector_field(p, {q.alpha, -q.k});
    mirror += !(near(w.dk, -v.dk) && near(w.dalpha, v.dalpha));
  }
  for (int j = 0; j < kSamples; ++j) {
    const SigmaParams p = params();
    const double l = ua(rng), k = k_sample();
    sign += !near(sigma_of(p, -l, -k), (p.odd_i() ? -1.0 : 1.0) * sigma_of(p, l, k));
  }
  for (int j = 0; j < kSamples; ++j) {
    SigmaParams p = params();
    while (!p.odd_i()) p = params();
    const PhasePoint q{ua(rng), k_sample()};
    const PhaseVelocity v = vector_field(p, q), w = vector_field(p.with_c(-p.c()), {q.alpha, -q.k});
    conj += !(near(w.dk, -v.dk) && near(w.dalpha, v.dalpha));
  }
  return {rev + mirror + sign + conj == 0,
          fmt::format("failures out of {} each: reversibility {}, even-i mirror {}, sign law {}, c conjugacy {}",
                      kSamples, rev, mirror, sign, conj)};
}

Outcome first_integral_endpoint() {
  const SigmaParams p{2, 3, 1};
  const Band arcs = sweep_bands(p)[1];
  double worst = 0.0;
  int used = 0, other = 0;
  for (const PhasePoint& q : band_seeds(arcs, 97, 20)) {
    const OrbitClass c = classify_orbit(p, q, IntegratorConfig{});
    const auto* arc = std::get_if<orbit::ArcToAlphaAxis>(&c);
    if (arc == nullptr) {
      ++other;
      continue;
    }
    const FirstIntegral fi(p, q.k);
    const double e = fi.energy(q);
    const double h = 2e-6;
    const auto a1 = fi.alpha_from_k(h, e), a2 = fi.alpha_from_k(2.0 * h, e);
    if (!a1 || !a2) {
      ++other;
      continue;
    }
    const double limit = 2.0 * *a1 - *a2;
    worst = std::max({worst, std::abs(std::abs(arc->alpha_plus) - limit), std::abs(std::abs(arc->alpha_minus) - limit)});
    ++used;
  }
  return {other == 0 && worst < 1e-5,
          fmt::format("max |alpha_1 flow - alpha_1 first integral| = {:.3g} over {} arcs ({} unusable)", worst,
                      used, other)};
}

Outcome cap_smoothness() {
  const auto t0 = std::chrono::steady_clock::now();
  const SigmaParams p{3, 4, -1};
  std::string detail;
  bool ok = true;
  for (const PhasePoint start : {PhasePoint{0.0, 1.0}, PhasePoint{0.0, 0.3}}) {
    const ProfileCurve pc = reconstruct_profile(p, start, IntegratorConfig{});
    for (ProfileEnd end : {ProfileEnd::Front, ProfileEnd::Back}) {
      const char* which = end == ProfileEnd::Front ? "front" : "back";
      try {
        const CapReport r = cap_smoothness_report(pc, end);
        const bool good = std::abs(r.g1_limit) < 1e-3 && std::abs(r.g2_ratio_limit) < 1e-3;
        ok = ok && good;
        detail += fmt::format("[({}, {}) {}: g' -> {:.3g}, g'/r -> {:.3g}] ", start.alpha, start.k, which,
                              r.g1_limit, r.g2_ratio_limit);
      } catch (const Error& e) {
        ok = false;
        detail += fmt::format("[({}, {}) {}: {}] ", start.alpha, start.k, which, e.what());
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {ok && secs < 60.0, detail + fmt::format("runtime {:.2f} s", secs)};
}

// Expected class of a seed for the configurations whose bands are proven.
std::optional<std::string> expected_class(const SigmaParams& p, PhasePoint q) {
  if (p.c() == 0.0) return std::string("HomoclinicToOrigin");
  const CriticalValues cv = critical_k(p);
  if (p.c() > 0.0 && !p.odd_i()) {
    return std::string(std::abs(q.k) > *cv.k_c2_pos ? "Periodic" : "ArcToAlphaAxis");
  }
  if (p.odd_i()) {
    const double k = p.c() > 0.0 ? q.k : -q.k;
    const double kc2 = p.c() > 0.0 ? *cv.k_c2_pos : -*cv.k_c2_neg;
    if (k > kc2) return std::string("Periodic");
    if (k > 0.0) return std::string("ArcToAlphaAxis");
    return std::string("ArcBiInfinite");
  }
  return std::nullopt;
}

Outcome figures() {
  struct Figure {
    const char* label;
    SigmaParams params;
  };
  const std::vector<Figure> figs{{"c>0 odd i", {2, 3, 1}},  {"c>0 even i", {2, 2, 6}},
                                 {"c=0", {2, 2, 0}},         {"c<0 i=2", {2, 2, -1}},
                                 {"c<0 even i>=4", {3, 4, -1}}, {"c<0 odd i", {2, 3, -1}}};
  bool ok = true;
  std::string detail;
  for (const Figure& f : figs) {
    PortraitSpec spec;
    spec.params = f.params;
    const Portrait a = compute_portrait(spec);
    const std::string svg = render_svg(a);
    const bool same = svg == render_svg(compute_portrait(spec));
    int wrong = 0, checked = 0;
    std::map<std::string, int> counts;
    for (const SeedResult& s : a.seeds) {
      if (s.excluded) continue;
      const std::string got(class_name(s.cls));
      ++counts[got];
      if (const auto want = expected_class(f.params, s.seed)) {
        ++checked;
        wrong += got != *want;
      }
    }
    const bool dots = svg.find("class=\"stationary\"") != std::string::npos;
    const bool dots_ok = f.params.c() < 0.0 && !f.params.odd_i() ? !dots : true;
    ok = ok && same && wrong == 0 && dots_ok;
    std::string tally;
    for (const auto& [name, n] : counts) tally += fmt::format("{}{}={}", tally.empty() ? "" : " ", name, n);
    detail += fmt::format("{}[{} ({},{},{}): {}; {} of {} off expectation; svg {}{}]", detail.empty() ? "" : " ",
                          f.label, f.params.n(), f.params.i(), f.params.c(), tally, wrong, checked,
                          same ? "stable" : "DIFFERS", dots_ok ? "" : "; stationary points drawn");
  }
  return {ok, detail};
}

struct Criterion {
  const char* title;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"Pansu oracle", pansu_oracle},
      {"energy conservation", conservation},
      {"closed-form agreement", closed_forms},
      {"classification sweep", classification_sweep},
      {"blow-up law", blowup_law},
      {"convexity", convexity},
      {"stationary and invariant sets", stationary_sets},
      {"symmetry suites", symmetries},
      {"first-integral endpoint", first_integral_endpoint},
      {"C2 cap", cap_smoothness},
      {"figure regeneration", figures},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  if (argc > 1) {
    for (int j = 1; j < argc; ++j) which.push_back(std::atoi(argv[j]));
  } else {
    for (int j = 1; j <= static_cast<int>(criteria().size()); ++j) which.push_back(j);
  }
  bool all_ok = true;
  for (int n : which) {
    if (n < 1 || n > static_cast<int>(criteria().size())) {
      std::cerr << "no criterion " << n << '\n';
      return 2;
    }
    const Criterion& c = criteria()[n - 1];
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << fmt::format("criterion {} {} {}: {}", n, o.pass ? "PASS" : "FAIL", c.title, o.detail) << std::endl;
    all_ok = all_ok && o.pass;
  }
  return all_ok ? 0 : 1;
}
