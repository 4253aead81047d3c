#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::string& args) {
  const fs::path err_file = fs::temp_directory_path() / "sigmak_cli_test.err";
  const std::string cmd = std::string(SIGMAK_BIN) + " " + args + " 2>" + err_file.string();
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err_file);
  std::stringstream ss;
  ss << in.rdbuf();
  r.err = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sigmak_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("classify prints one JSON line") {
  const Run r = run("classify --n 2 --i 1 --c 4 --alpha0 0 --k0 3");
  CHECK(r.code == 0);
  CHECK(r.out.rfind(R"({"class":"Periodic","period":)", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1);
}

TEST_CASE("pansu rows") {
  const Run r = run("pansu --lambda 1 --samples 3");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("z,f\n0,0.78539816339744", 0) == 0);
  CHECK(r.out.find("\n0.5,0.7401051265444") != std::string::npos);
  CHECK(r.out.find("\n1,0\n") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run("classify --n 1 --i 1 --c 4 --alpha0 0 --k0 3").code == 2);
  CHECK(run("classify --n 2 --i 4 --c 4 --alpha0 0 --k0 3").code == 2);
  CHECK(run("classify --n 2 --i 1 --c 4 --alpha0 0").code == 2);
  CHECK(run("classify --n 2 --i 1 --c 4 --alpha0 0 --k0 3 --bogus").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("pansu --lambda -1").code == 2);
  CHECK(run("classify --n 2 --i 1 --c 4 --alpha0 0 --k0 3 --rtol 0").code == 2);
}

TEST_CASE("numerical failure exits with 3 and JSON on stderr") {
  const Run r = run("classify --n 2 --i 2 --c 1 --alpha0 0 --k0 0");
  CHECK(r.code == 3);
  CHECK(r.err.rfind(R"({"error":"numerical failure")", 0) == 0);
}

TEST_CASE("orbit and reconstruct write files") {
  const fs::path trace = scratch("trace.csv");
  CHECK(run("orbit --n 2 --i 1 --c 4 --alpha0 0.5 --k0 2 --s-max 2 --out " + trace.string()).code == 0);
  CHECK(slurp(trace).rfind("s,alpha,k\n", 0) == 0);

  const fs::path profile = scratch("profile.csv");
  const fs::path mesh = scratch("cap.obj");
  CHECK(run("reconstruct --n 2 --i 1 --c 4 --alpha0 0 --k0 1 --out " + profile.string() + " --mesh " +
            mesh.string() + " --segments 16")
            .code == 0);
  CHECK(slurp(profile).rfind("s,r,t,alpha,k\n", 0) == 0);
  const std::string obj = slurp(mesh);
  CHECK(obj.rfind("v ", 0) == 0);
  CHECK(obj.find("\nf ") != std::string::npos);
}

TEST_CASE("portrait output is byte identical across runs") {
  const fs::path a = scratch("a.svg"), b = scratch("b.svg"), ca = scratch("a.csv"), cb = scratch("b.csv");
  const std::string base = "portrait --n 2 --i 3 --c 1 --grid 6 ";
  const Run r1 = run(base + "--out " + a.string() + " --csv " + ca.string());
  const Run r2 = run(base + "--threads 1 --out " + b.string() + " --csv " + cb.string());
  REQUIRE(r1.code == 0);
  REQUIRE(r2.code == 0);
  CHECK(r1.out == r2.out);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(ca) == slurp(cb));
  CHECK(slurp(ca).find("seed,s,alpha,k\n") != std::string::npos);
}

TEST_CASE("unwritable output names the path") {
  const Run r = run("pansu --lambda 1 --out /nonexistent-dir/p.csv");
  CHECK(r.code != 0);
  CHECK(r.err.find("/nonexistent-dir/p.csv") != std::string::npos);
}

TEST_CASE("selftest gate") {
  const Run r = run("selftest --samples 2000");
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(run("selftest --check no.such.check").code == 1);
}
