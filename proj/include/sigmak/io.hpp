#pragma once

// Text serialisation: CSV traces and profiles, OBJ meshes, classification
// JSON. Numbers go out with 17 significant digits so they read back exactly.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigmak/flow.hpp"
#include "sigmak/geometry.hpp"

namespace sigmak {

std::string format_real(double x);

void write_trace_csv(std::ostream& out, const OrbitTrace& trace);
void write_profile_csv(std::ostream& out, const ProfileCurve& profile);
void write_obj(std::ostream& out, const SurfaceMesh& mesh);

/// Rows z, f(z) at `samples` equally spaced |z| in [0, 1/lambda].
void write_pansu_csv(std::ostream& out, double lambda, int samples);

/// Parses the output of write_trace_csv (s, alpha, k; t is left at 0).
std::vector<TraceSample> read_trace_csv(std::istream& in);

nlohmann::ordered_json to_json(const OrbitClass& cls);

/// Opens path for writing (binary, so LF stays LF) and hands the stream to
/// body. Throws IoError naming the path on failure.
void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body);

}  // namespace sigmak
