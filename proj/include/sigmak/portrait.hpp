#pragma once

// Phase portraits: a seed grid integrated in parallel, classified orbit by
// orbit, and rendered to SVG and CSV.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigmak/flow.hpp"

namespace sigmak {

struct Interval {
  double lo;
  double hi;
};

struct PortraitSpec {
  SigmaParams params{2, 1, 4};
  Interval alpha_range{-3.0, 3.0};
  Interval k_range{-3.0, 3.0};
  int grid = 12;
  bool include_nullclines = true;
  bool include_critical_lines = true;
  bool include_stationary = true;
  IntegratorConfig cfg{};
  /// Length of the drawn traces in each direction.
  double trace_s_max = 20.0;
  int width = 800;
  int height = 800;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct SeedResult {
  std::size_t index = 0;
  PhasePoint seed;
  std::optional<std::string> excluded;
  RegionLabel region = RegionLabel::BandAboveKc1;
  OrbitClass cls = orbit::Truncated{"not computed"};
  std::vector<TraceSample> samples;
};

struct Portrait {
  PortraitSpec spec;
  std::vector<SeedResult> seeds;
};

Portrait compute_portrait(const PortraitSpec& spec);

std::string render_svg(const Portrait& portrait);
void write_portrait_csv(std::ostream& out, const Portrait& portrait);

/// Seed counts per region and class.
nlohmann::ordered_json portrait_summary(const Portrait& portrait);

}  // namespace sigmak
