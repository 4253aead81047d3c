#include "sigmak/portrait.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

#include <fmt/format.h>

namespace sigmak {

namespace {

std::string_view class_color(const OrbitClass& cls) {
  struct Visitor {
    std::string_view operator()(const orbit::Stationary&) const { return "#000000"; }
    std::string_view operator()(const orbit::ConstantKLine&) const { return "#ff7f0e"; }
    std::string_view operator()(const orbit::Periodic&) const { return "#1f77b4"; }
    std::string_view operator()(const orbit::ArcToAlphaAxis&) const { return "#d62728"; }
    std::string_view operator()(const orbit::ArcBiInfinite&) const { return "#9467bd"; }
    std::string_view operator()(const orbit::HomoclinicToOrigin&) const { return "#2ca02c"; }
    std::string_view operator()(const orbit::Truncated&) const { return "#7f7f7f"; }
  };
  return std::visit(Visitor{}, cls);
}

SeedResult run_seed(const PortraitSpec& spec, std::size_t index, PhasePoint seed) {
  SeedResult r;
  r.index = index;
  r.seed = seed;
  r.region = classify_region(spec.params, seed);
  if (spec.params.singular_at_zero() && std::abs(seed.k) < 1e-3) {
    r.excluded = "within 1e-3 of k = 0 where l(k) has a pole";
    return r;
  }
  try {
    r.cls = classify_orbit(spec.params, seed, spec.cfg);
  } catch (const std::exception& e) {
    r.cls = orbit::Truncated{e.what()};
  }
  IntegratorConfig draw = spec.cfg;
  draw.s_max = spec.trace_s_max;
  try {
    const OrbitTrace bwd = integrate(spec.params, seed, draw, Direction::Backward, {1});
    const OrbitTrace fwd = integrate(spec.params, seed, draw, Direction::Forward, {2});
    r.samples = bwd.samples;
    r.samples.insert(r.samples.end(), fwd.samples.begin() + 1, fwd.samples.end());
  } catch (const std::exception&) {
    r.samples = {{0.0, seed.alpha, seed.k, 0.0}};
  }
  return r;
}

class Canvas {
 public:
  explicit Canvas(const PortraitSpec& spec) : spec_(spec) {}

  double x(double alpha) const {
    return (alpha - spec_.alpha_range.lo) / (spec_.alpha_range.hi - spec_.alpha_range.lo) *
           spec_.width;
  }
  double y(double k) const {
    return spec_.height -
           (k - spec_.k_range.lo) / (spec_.k_range.hi - spec_.k_range.lo) * spec_.height;
  }
  bool inside(double alpha, double k) const {
    return alpha >= spec_.alpha_range.lo && alpha <= spec_.alpha_range.hi &&
           k >= spec_.k_range.lo && k <= spec_.k_range.hi;
  }

  // Emits the in-range runs of a polyline, dropping points closer than
  // 0.75 px to the previous kept one.
  void polyline(const std::vector<PhasePoint>& pts, std::string_view style) {
    std::vector<std::pair<double, double>> run;
    auto flush = [&] {
      if (run.size() >= 2) {
        out_ += "<polyline points=\"";
        for (std::size_t j = 0; j < run.size(); ++j) {
          out_ += fmt::format("{}{:.2f},{:.2f}", j ? " " : "", run[j].first, run[j].second);
        }
        out_ += fmt::format("\" {}/>\n", style);
      }
      run.clear();
    };
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const PhasePoint& p = pts[j];
      if (!p.finite() || !inside(p.alpha, p.k)) {
        flush();
        continue;
      }
      const std::pair<double, double> q{x(p.alpha), y(p.k)};
      const bool last = j + 1 == pts.size() || !inside(pts[j + 1].alpha, pts[j + 1].k);
      if (run.empty() || last ||
          std::hypot(q.first - run.back().first, q.second - run.back().second) >= 0.75) {
        run.push_back(q);
      }
    }
    flush();
  }

  void raw(const std::string& s) { out_ += s; }
  std::string take() { return std::move(out_); }

 private:
  const PortraitSpec& spec_;
  std::string out_;
};

}  // namespace

void PortraitSpec::validate() const {
  auto check = [](Interval r, const char* name) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.hi > r.lo)) {
      throw DomainError(fmt::format("{} must be a nondegenerate interval", name));
    }
  };
  check(alpha_range, "alpha range");
  check(k_range, "k range");
  if (grid < 1) throw DomainError("grid must be at least 1");
  if (!(trace_s_max > 0.0)) throw DomainError("trace_s_max must be positive");
  if (width < 1 || height < 1) throw DomainError("SVG size must be positive");
  cfg.validate();
}

Portrait compute_portrait(const PortraitSpec& spec) {
  spec.validate();
  const auto g = static_cast<std::size_t>(spec.grid);
  const double da = (spec.alpha_range.hi - spec.alpha_range.lo) / spec.grid;
  const double dk = (spec.k_range.hi - spec.k_range.lo) / spec.grid;
  std::vector<PhasePoint> seeds;
  seeds.reserve(g * g);
  for (std::size_t row = 0; row < g; ++row) {
    for (std::size_t col = 0; col < g; ++col) {
      seeds.push_back({spec.alpha_range.lo + (static_cast<double>(col) + 0.5) * da,
                       spec.k_range.lo + (static_cast<double>(row) + 0.5) * dk});
    }
  }

  Portrait out{spec, std::vector<SeedResult>(seeds.size())};
  unsigned workers = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, seeds.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t j = next++; j < seeds.size(); j = next++) {
      out.seeds[j] = run_seed(spec, j, seeds[j]);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  return out;
}

std::string render_svg(const Portrait& portrait) {
  const PortraitSpec& spec = portrait.spec;
  const SigmaParams& p = spec.params;
  Canvas canvas(spec);
  canvas.raw(fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n",
      spec.width, spec.height));
  canvas.raw(fmt::format("<title>n={} i={} c={}</title>\n", p.n(), p.i(), p.c()));
  canvas.raw(fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n", spec.width,
                         spec.height));
  const std::string axis = "stroke=\"#bbbbbb\" stroke-width=\"1\"";
  if (spec.alpha_range.lo <= 0.0 && spec.alpha_range.hi >= 0.0) {
    canvas.raw(fmt::format("<line x1=\"{0:.2f}\" y1=\"0\" x2=\"{0:.2f}\" y2=\"{1}\" {2}/>\n",
                           canvas.x(0.0), spec.height, axis));
  }
  if (spec.k_range.lo <= 0.0 && spec.k_range.hi >= 0.0) {
    canvas.raw(fmt::format("<line x1=\"0\" y1=\"{0:.2f}\" x2=\"{1}\" y2=\"{0:.2f}\" {2}/>\n",
                           canvas.y(0.0), spec.width, axis));
  }

  const CriticalValues cv = critical_k(p);
  if (spec.include_critical_lines) {
    for (const auto& root : {cv.k_c2_pos, cv.k_c2_neg}) {
      if (!root || *root < spec.k_range.lo || *root > spec.k_range.hi) continue;
      canvas.raw(fmt::format(
          "<line x1=\"0\" y1=\"{0:.2f}\" x2=\"{1}\" y2=\"{0:.2f}\" stroke=\"#ff7f0e\" "
          "stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n",
          canvas.y(*root), spec.width));
    }
  }

  if (spec.include_nullclines) {
    constexpr int n_k = 1600;
    std::vector<PhasePoint> upper;
    std::vector<PhasePoint> lower;
    const std::string style = "fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"1.5\"";
    auto flush = [&] {
      canvas.polyline(upper, style);
      canvas.polyline(lower, style);
      upper.clear();
      lower.clear();
    };
    double prev_k = spec.k_range.lo;
    for (int j = 0; j <= n_k; ++j) {
      const double k = spec.k_range.lo + (spec.k_range.hi - spec.k_range.lo) * j / n_k;
      if ((k > 0.0) != (prev_k > 0.0)) flush();
      prev_k = k;
      std::optional<double> a;
      try {
        a = nullcline_alpha(p, k);
      } catch (const SingularityError&) {
      }
      if (!a) {
        flush();
        continue;
      }
      upper.push_back({*a, k});
      lower.push_back({-*a, k});
    }
    flush();
  }

  for (const SeedResult& s : portrait.seeds) {
    if (s.excluded) continue;
    std::vector<PhasePoint> pts;
    pts.reserve(s.samples.size());
    for (const TraceSample& t : s.samples) pts.push_back({t.alpha, t.k});
    canvas.polyline(pts, fmt::format("fill=\"none\" stroke=\"{}\" stroke-width=\"1\"",
                                     class_color(s.cls)));
  }

  if (spec.include_stationary) {
    std::vector<PhasePoint> points;
    if (!p.singular_at_zero()) points.push_back({0.0, 0.0});
    for (const auto& root : {cv.k_c1_pos, cv.k_c1_neg}) {
      if (root) points.push_back({0.0, *root});
    }
    for (const PhasePoint& q : points) {
      if (!canvas.inside(q.alpha, q.k)) continue;
      canvas.raw(fmt::format("<circle class=\"stationary\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"#000000\"/>\n",
                             canvas.x(q.alpha), canvas.y(q.k)));
    }
  }
  canvas.raw("</svg>\n");
  return canvas.take();
}

void write_portrait_csv(std::ostream& out, const Portrait& portrait) {
  const PortraitSpec& spec = portrait.spec;
  out << fmt::format("# n={} i={} c={:.17g}\n", spec.params.n(), spec.params.i(), spec.params.c());
  out << fmt::format("# alpha_range=[{:.17g},{:.17g}] k_range=[{:.17g},{:.17g}] grid={}\n",
                     spec.alpha_range.lo, spec.alpha_range.hi, spec.k_range.lo, spec.k_range.hi,
                     spec.grid);
  for (const SeedResult& s : portrait.seeds) {
    if (s.excluded) {
      out << fmt::format("# excluded seed {} ({:.17g}, {:.17g}): {}\n", s.index, s.seed.alpha,
                         s.seed.k, *s.excluded);
    }
  }
  for (const SeedResult& s : portrait.seeds) {
    if (s.excluded) continue;
    out << fmt::format("# seed {} ({:.17g}, {:.17g}) region {} class {}\n", s.index, s.seed.alpha,
                       s.seed.k, to_string(s.region), class_name(s.cls));
  }
  out << "seed,s,alpha,k\n";
  for (const SeedResult& s : portrait.seeds) {
    if (s.excluded) continue;
    for (const TraceSample& t : s.samples) {
      out << fmt::format("{},{:.17g},{:.17g},{:.17g}\n", s.index, t.s, t.alpha, t.k);
    }
  }
}

nlohmann::ordered_json portrait_summary(const Portrait& portrait) {
  std::map<std::string, int> classes;
  std::map<std::string, std::map<std::string, int>> regions;
  int excluded = 0;
  for (const SeedResult& s : portrait.seeds) {
    if (s.excluded) {
      ++excluded;
      continue;
    }
    const std::string name(class_name(s.cls));
    ++classes[name];
    ++regions[std::string(to_string(s.region))][name];
  }
  nlohmann::ordered_json j;
  const SigmaParams& p = portrait.spec.params;
  j["params"] = {{"n", p.n()}, {"i", p.i()}, {"c", p.c()}};
  j["seeds"] = portrait.seeds.size();
  j["excluded"] = excluded;
  j["classes"] = classes;
  j["regions"] = regions;
  return j;
}

}  // namespace sigmak
