#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "sigmak/conserved.hpp"
#include "sigmak/flow.hpp"
#include "sigmak/geometry.hpp"
#include "sigmak/io.hpp"
#include "sigmak/portrait.hpp"
#include "sigmak/selftest.hpp"

namespace {

using namespace sigmak;

constexpr int kUsageExit = 2;
constexpr int kNumericExit = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  int n = 2;
  int i = 1;
  double c = 4.0;
  double rtol = IntegratorConfig{}.rel_tol;
  double atol = IntegratorConfig{}.abs_tol;
  double s_max = IntegratorConfig{}.s_max;

  SigmaParams params() const {
    try {
      return {n, i, c};
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  }

  IntegratorConfig config() const {
    IntegratorConfig cfg;
    cfg.rel_tol = rtol;
    cfg.abs_tol = atol;
    cfg.s_max = s_max;
    try {
      cfg.validate();
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

void add_common(CLI::App* cmd, CommonFlags& f, bool integration) {
  cmd->add_option("--n", f.n, "half dimension, n >= 2")->required();
  cmd->add_option("--i", f.i, "curvature index, 1 <= i <= 2n-1")->required();
  cmd->add_option("--c", f.c, "value of sigma_{i,n}")->required();
  if (!integration) return;
  cmd->add_option("--rtol", f.rtol, "relative tolerance")->capture_default_str();
  cmd->add_option("--atol", f.atol, "absolute tolerance")->capture_default_str();
  cmd->add_option("--s-max", f.s_max, "arclength budget per direction")->capture_default_str();
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("sigmak");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  const char* env = std::getenv("SIGMAK_LOG");
  if (env == nullptr) return;
  const std::string level(env);
  if (level == "error") spdlog::set_level(spdlog::level::err);
  else if (level == "warn") spdlog::set_level(spdlog::level::warn);
  else if (level == "info") spdlog::set_level(spdlog::level::info);
  else if (level == "debug") spdlog::set_level(spdlog::level::debug);
  else spdlog::warn("ignoring SIGMAK_LOG={}", level);
}

void print_failure(const std::string& command, const std::exception& e) {
  nlohmann::ordered_json j;
  j["error"] = "numerical failure";
  j["command"] = command;
  j["message"] = e.what();
  if (const auto* ie = dynamic_cast<const IntegrationError*>(&e)) {
    j["last_good"] = {{"s", ie->last_good().s}, {"alpha", ie->last_good().alpha}, {"k", ie->last_good().k}};
  }
  std::cerr << j.dump() << '\n';
}

Interval parse_range(const std::string& text, const char* flag) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError(std::string(flag) + " expects lo:hi");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw UsageError(std::string(flag) + " expects lo:hi");
  }
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Umbilic sigma_k-constant hypersurfaces: phase plane, orbits and profiles"};
  app.require_subcommand(1);

  CommonFlags f;

  auto* portrait = app.add_subcommand("portrait", "phase portrait as SVG and CSV");
  add_common(portrait, f, true);
  std::string svg_out, csv_out, alpha_range = "-3:3", k_range = "-3:3";
  int grid = 12;
  double trace_s_max = PortraitSpec{}.trace_s_max;
  unsigned threads = 0;
  bool no_nullclines = false, no_critical = false, no_stationary = false;
  portrait->add_option("--out", svg_out, "SVG path")->required();
  portrait->add_option("--csv", csv_out, "CSV path for every trace sample");
  portrait->add_option("--alpha-range", alpha_range, "lo:hi")->capture_default_str();
  portrait->add_option("--k-range", k_range, "lo:hi")->capture_default_str();
  portrait->add_option("--grid", grid, "seeds per axis")->capture_default_str()->check(CLI::PositiveNumber);
  portrait->add_option("--trace-s-max", trace_s_max, "drawn trace length per direction")->capture_default_str();
  portrait->add_option("--threads", threads, "worker threads (0: all cores)");
  portrait->add_flag("--no-nullclines", no_nullclines);
  portrait->add_flag("--no-critical-lines", no_critical);
  portrait->add_flag("--no-stationary", no_stationary);

  double alpha0 = 0.0, k0 = 0.0;
  auto add_start = [&](CLI::App* cmd) {
    cmd->add_option("--alpha0", alpha0, "initial alpha")->required();
    cmd->add_option("--k0", k0, "initial k")->required();
  };

  auto* orbit_cmd = app.add_subcommand("orbit", "integrate one orbit and write its trace CSV");
  add_common(orbit_cmd, f, true);
  add_start(orbit_cmd);
  std::string orbit_out, direction = "forward";
  orbit_cmd->add_option("--out", orbit_out, "trace CSV path (stdout when absent)");
  orbit_cmd->add_option("--direction", direction, "forward or backward")
      ->check(CLI::IsMember({"forward", "backward"}))
      ->capture_default_str();

  auto* classify = app.add_subcommand("classify", "print the orbit class as JSON");
  add_common(classify, f, true);
  add_start(classify);

  auto* reconstruct = app.add_subcommand("reconstruct", "profile curve and optional surface mesh");
  add_common(reconstruct, f, true);
  add_start(reconstruct);
  std::string profile_out, mesh_out;
  int segments = 64;
  reconstruct->add_option("--out", profile_out, "profile CSV path (stdout when absent)");
  reconstruct->add_option("--mesh", mesh_out, "OBJ path");
  reconstruct->add_option("--segments", segments, "segments around the axis")
      ->capture_default_str()
      ->check(CLI::Range(3, 100000));

  auto* pansu = app.add_subcommand("pansu", "sample the Pansu profile");
  double lambda = 1.0;
  int samples = 101;
  std::string pansu_out;
  pansu->add_option("--lambda", lambda, "lambda > 0")->required();
  pansu->add_option("--samples", samples, "number of rows")->capture_default_str()->check(CLI::Range(2, 10000000));
  pansu->add_option("--out", pansu_out, "CSV path (stdout when absent)");

  auto* selftest = app.add_subcommand("selftest", "run the invariant suite");
  SelftestOptions st;
  std::string only;
  selftest->add_option("--samples", st.samples, "random samples per check")->capture_default_str();
  selftest->add_option("--seed", st.seed, "random seed")->capture_default_str();
  selftest->add_option("--check", only, "run a single named check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageExit;
  }

  auto emit = [](const std::string& path, const std::function<void(std::ostream&)>& body) {
    if (path.empty()) {
      body(std::cout);
    } else {
      write_file(path, body);
    }
  };

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "portrait") {
      PortraitSpec spec;
      spec.params = f.params();
      spec.cfg = f.config();
      spec.alpha_range = parse_range(alpha_range, "--alpha-range");
      spec.k_range = parse_range(k_range, "--k-range");
      spec.grid = grid;
      spec.trace_s_max = trace_s_max;
      spec.threads = threads;
      spec.include_nullclines = !no_nullclines;
      spec.include_critical_lines = !no_critical;
      spec.include_stationary = !no_stationary;
      try {
        spec.validate();
      } catch (const DomainError& e) {
        throw UsageError(e.what());
      }
      spdlog::info("portrait n={} i={} c={} grid={}", spec.params.n(), spec.params.i(), spec.params.c(), grid);
      const Portrait p = compute_portrait(spec);
      write_file(svg_out, [&](std::ostream& out) { out << render_svg(p); });
      if (!csv_out.empty()) write_file(csv_out, [&](std::ostream& out) { write_portrait_csv(out, p); });
      std::cout << portrait_summary(p).dump() << '\n';
    } else if (name == "orbit") {
      const OrbitTrace tr = integrate(f.params(), {alpha0, k0}, f.config(),
                                      direction == "forward" ? Direction::Forward : Direction::Backward);
      spdlog::info("orbit stopped: {} after {} samples", to_string(tr.stop), tr.samples.size());
      emit(orbit_out, [&](std::ostream& out) { write_trace_csv(out, tr); });
    } else if (name == "classify") {
      std::cout << to_json(classify_orbit(f.params(), {alpha0, k0}, f.config())).dump() << '\n';
    } else if (name == "reconstruct") {
      const ProfileCurve pc = reconstruct_profile(f.params(), {alpha0, k0}, f.config());
      emit(profile_out, [&](std::ostream& out) { write_profile_csv(out, pc); });
      if (!mesh_out.empty()) {
        const SurfaceMesh mesh = surface_of_revolution(pc, segments);
        write_file(mesh_out, [&](std::ostream& out) { write_obj(out, mesh); });
      }
    } else if (name == "pansu") {
      if (!(lambda > 0.0)) throw UsageError("--lambda must be positive");
      emit(pansu_out, [&](std::ostream& out) { write_pansu_csv(out, lambda, samples); });
    } else if (name == "selftest") {
      if (st.samples < 1) throw UsageError("--samples must be positive");
      std::vector<CheckResult> results;
      if (only.empty()) {
        results = run_selftest(st);
      } else {
        results.push_back(run_check(only, st));
      }
      bool ok = true;
      for (const CheckResult& r : results) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        ok = ok && r.passed;
      }
      return ok ? 0 : 1;
    }
  } catch (const UsageError& e) {
    std::cerr << "sigmak " << name << ": " << e.what() << '\n';
    return kUsageExit;
  } catch (const IoError& e) {
    std::cerr << "sigmak " << name << ": " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    print_failure(name, e);
    return kNumericExit;
  }
  return 0;
}
