#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "sigmak/io.hpp"
#include "sigmak/portrait.hpp"

using namespace sigmak;

TEST_CASE("trace CSV round-trips bit for bit") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  OrbitTrace tr;
  for (int j = 0; j < 2000; ++j) tr.samples.push_back({u(rng), u(rng) * 1e-200, u(rng) * 1e200, 0.0});
  tr.samples.push_back({std::numeric_limits<double>::denorm_min(), -0.0, 1.0 / 3.0, 0.0});
  std::stringstream ss;
  write_trace_csv(ss, tr);
  const std::string text = ss.str();
  CHECK(text.rfind("s,alpha,k\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  const auto back = read_trace_csv(ss);
  REQUIRE(back.size() == tr.samples.size());
  for (std::size_t j = 0; j < back.size(); ++j) {
    CHECK(back[j].s == tr.samples[j].s);
    CHECK(back[j].alpha == tr.samples[j].alpha);
    CHECK(back[j].k == tr.samples[j].k);
  }
}

TEST_CASE("malformed trace CSV") {
  std::stringstream a("x,y\n1,2\n");
  CHECK_THROWS_AS(read_trace_csv(a), IoError);
  std::stringstream b("s,alpha,k\n1,2\n");
  CHECK_THROWS_AS(read_trace_csv(b), IoError);
}

TEST_CASE("classify JSON key order") {
  CHECK(to_json(orbit::Periodic{2.5, 1.0, 3.0}).dump() == R"({"class":"Periodic","period":2.5,"k_extent":[1.0,3.0]})");
  CHECK(to_json(orbit::HomoclinicToOrigin{}).dump() == R"({"class":"HomoclinicToOrigin"})");
  CHECK(to_json(orbit::ConstantKLine{1.0}).dump() == R"({"class":"ConstantKLine","k":1.0})");
}

TEST_CASE("OBJ format") {
  SurfaceMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  m.faces = {{0, 1, 2}};
  std::stringstream ss;
  write_obj(ss, m);
  CHECK(ss.str() == "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
}

TEST_CASE("pansu CSV") {
  std::stringstream ss;
  write_pansu_csv(ss, 1.0, 3);
  std::string header, r0, r1, r2;
  std::getline(ss, header);
  std::getline(ss, r0);
  std::getline(ss, r1);
  std::getline(ss, r2);
  CHECK(header == "z,f");
  CHECK(r0.rfind("0,0.78539816339744", 0) == 0);
  CHECK(r1.rfind("0.5,", 0) == 0);
  CHECK(r2 == "1,0");
}

TEST_CASE("unwritable path names the path") {
  const std::filesystem::path bad = "/nonexistent-dir/out.csv";
  try {
    write_file(bad, [](std::ostream& o) { o << "x"; });
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find(bad.string()) != std::string::npos);
  }
}

TEST_CASE("portrait spec validation") {
  PortraitSpec spec;
  spec.grid = 0;
  CHECK_THROWS_AS(spec.validate(), DomainError);
  spec = {};
  spec.alpha_range = {1.0, 1.0};
  CHECK_THROWS_AS(spec.validate(), DomainError);
}

TEST_CASE("portrait is deterministic and thread independent") {
  PortraitSpec spec;
  spec.params = {2, 2, 6};
  spec.grid = 6;
  spec.threads = 1;
  const std::string one = render_svg(compute_portrait(spec));
  spec.threads = 4;
  const Portrait p = compute_portrait(spec);
  CHECK(render_svg(p) == one);
  std::stringstream a, b;
  write_portrait_csv(a, p);
  write_portrait_csv(b, compute_portrait(spec));
  CHECK(a.str() == b.str());
}

TEST_CASE("even-i portrait is symmetric under k -> -k") {
  PortraitSpec spec;
  spec.params = {2, 2, 6};
  spec.grid = 6;
  const Portrait p = compute_portrait(spec);
  const int g = spec.grid;
  for (int row = 0; row < g; ++row) {
    for (int col = 0; col < g; ++col) {
      const SeedResult& a = p.seeds[row * g + col];
      const SeedResult& b = p.seeds[(g - 1 - row) * g + col];
      CHECK(a.seed.k == doctest::Approx(-b.seed.k));
      CHECK(class_name(a.cls) == class_name(b.cls));
    }
  }
}

TEST_CASE("c < 0, even i portrait has no stationary points") {
  PortraitSpec spec;
  spec.params = {2, 2, -1};
  spec.grid = 4;
  const std::string svg = render_svg(compute_portrait(spec));
  CHECK(svg.find("class=\"stationary\"") == std::string::npos);
}
