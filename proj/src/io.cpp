#include "sigmak/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

namespace sigmak {

std::string format_real(double x) { return fmt::format("{:.17g}", x); }

void write_trace_csv(std::ostream& out, const OrbitTrace& trace) {
  out << "s,alpha,k\n";
  for (const TraceSample& s : trace.samples) {
    out << fmt::format("{:.17g},{:.17g},{:.17g}\n", s.s, s.alpha, s.k);
  }
}

void write_profile_csv(std::ostream& out, const ProfileCurve& profile) {
  out << "s,r,t,alpha,k\n";
  for (const ProfileSample& p : profile.samples) {
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", p.s, p.r, p.t, p.alpha, p.k);
  }
}

void write_obj(std::ostream& out, const SurfaceMesh& mesh) {
  for (const auto& v : mesh.vertices) {
    out << fmt::format("v {:.17g} {:.17g} {:.17g}\n", v[0], v[1], v[2]);
  }
  for (const auto& f : mesh.faces) out << fmt::format("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1);
}

void write_pansu_csv(std::ostream& out, double lambda, int samples) {
  if (samples < 2) throw DomainError("pansu needs at least 2 samples");
  pansu_profile(lambda, 0.0);
  out << "z,f\n";
  const double z_max = 1.0 / lambda;
  for (int j = 0; j < samples; ++j) {
    const double z = j == samples - 1 ? z_max : z_max * j / (samples - 1);
    out << fmt::format("{:.17g},{:.17g}\n", z, pansu_profile(lambda, z));
  }
}

std::vector<TraceSample> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "s,alpha,k") throw IoError("missing trace CSV header");
  std::vector<TraceSample> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 3> v{};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (std::size_t j = 0; j < 3; ++j) {
      auto [next, ec] = std::from_chars(p, end, v[j]);
      if (ec != std::errc{}) throw IoError("malformed trace CSV row: " + line);
      p = next;
      if (j < 2) {
        if (p == end || *p != ',') throw IoError("malformed trace CSV row: " + line);
        ++p;
      }
    }
    out.push_back({v[0], v[1], v[2], 0.0});
  }
  return out;
}

nlohmann::ordered_json to_json(const OrbitClass& cls) {
  nlohmann::ordered_json j;
  j["class"] = std::string(class_name(cls));
  std::visit(
      [&j](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, orbit::Stationary>) {
          j["alpha"] = c.point.alpha;
          j["k"] = c.point.k;
        } else if constexpr (std::is_same_v<T, orbit::ConstantKLine>) {
          j["k"] = c.k;
        } else if constexpr (std::is_same_v<T, orbit::Periodic>) {
          j["period"] = c.period;
          j["k_extent"] = {c.k_min, c.k_max};
        } else if constexpr (std::is_same_v<T, orbit::ArcToAlphaAxis>) {
          j["alpha_end"] = c.alpha_end;
          j["alpha_minus"] = c.alpha_minus;
          j["alpha_plus"] = c.alpha_plus;
          j["s_minus"] = c.s_minus;
          j["s_plus"] = c.s_plus;
        } else if constexpr (std::is_same_v<T, orbit::ArcBiInfinite>) {
          j["alpha_end"] = c.alpha_limit;
        } else if constexpr (std::is_same_v<T, orbit::Truncated>) {
          j["reason"] = c.reason;
        }
      },
      cls);
  return j;
}

void write_file(const std::filesystem::path& path,
                const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  body(out);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace sigmak
