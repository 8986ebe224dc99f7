#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("heatduct_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int heatduct(const std::string& args) {
  const std::string cmd = std::string(HEATDUCT_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

const std::string kBase =
    "[geometry]\ndims = 1 1 1\ndivisions = 2 2 2\nquad_order = 4\n"
    "[material]\nnu = 1\nrho0 = 1\ncV = 1\nlambda = 1\nalpha1 = 0.5\nalpha_v = 0.1\n"
    "[certify]\nsamples = 100\n";

}  // namespace

TEST_CASE("usage and config errors exit with 2") {
  CHECK(heatduct("") == 2);
  CHECK(heatduct("frob --config x") == 2);
  CHECK(heatduct("solve") == 2);
  CHECK(heatduct("solve --config " + (scratch() / "missing.cfg").string()) == 2);
  const auto bad = write_config("bad.cfg", "[material]\nnu = -1\n");
  CHECK(heatduct("solve --config " + bad.string()) == 2);
  CHECK(heatduct("solve --config " + bad.string() + " --seed notanumber") == 2);
}

TEST_CASE("spectrum reports the anchor values") {
  const auto cfg = write_config("spec.cfg", kBase + "[forcing]\ng = constant 0 0 0\n");
  const auto out = scratch() / "spec";
  REQUIRE(heatduct("spectrum --config " + cfg.string() + " --out " + out.string()) == 0);
  const auto json = slurp(out / "spectrum.json");
  CHECK(json.find("\"z0\": 1.35231") != std::string::npos);
  CHECK(json.find("\"s0\": 3.08793") != std::string::npos);
  CHECK(json.find("\"pass\": true") != std::string::npos);
}

TEST_CASE("zero data solve converges in one iteration") {
  const auto cfg = write_config(
      "zero.cfg", kBase + "[forcing]\ng = constant 0 0 0\ntheta_D = constant 2\n");
  const auto out = scratch() / "zero";
  REQUIRE(heatduct("solve --config " + cfg.string() + " --out " + out.string()) == 0);
  const auto json = slurp(out / "solve.json");
  CHECK(json.find("\"outer_iterations\": 1,") != std::string::npos);
  CHECK(json.find("\"u_h1\": 0.0,") != std::string::npos);
  for (const char* f : {"trace.csv", "mesh.vtk", "state.vtk", "facets.vtk"})
    CHECK(fs::exists(out / f));
}

TEST_CASE("divergent data exits with 3") {
  const auto cfg = write_config("hot.cfg", kBase + "[forcing]\ng = constant 0 0 -40000\n"
                                                   "theta_D = cosine_x 0 50\n");
  CHECK(heatduct("solve --config " + cfg.string() + " --out " + (scratch() / "hot").string()) ==
        3);
}

TEST_CASE("artifacts are byte identical across runs") {
  const auto cfg = write_config("det.cfg", kBase + "[forcing]\ng = constant 2 0 -1\n"
                                                   "theta_D = cosine_x 0 0.5\n");
  for (const std::string sub : {"solve", "certify"}) {
    INFO(sub);
    const auto a = scratch() / (sub + "_a");
    const auto b = scratch() / (sub + "_b");
    const auto c = scratch() / (sub + "_c");
    const std::string base = sub + " --config " + cfg.string() + " --seed 7 --out ";
    REQUIRE(heatduct(base + a.string()) == 0);
    REQUIRE(heatduct(base + b.string()) == 0);
    int compared = 0;
    for (const auto& e : fs::directory_iterator(a)) {
      const auto name = e.path().filename();
      if (name.extension() != ".json" && name.extension() != ".csv") continue;
      CHECK(slurp(e.path()) == slurp(b / name));
      ++compared;
    }
    CHECK(compared >= 1);
    if (sub == "certify") {
      REQUIRE(heatduct(sub + " --config " + cfg.string() + " --seed 8 --out " + c.string()) == 0);
      CHECK(slurp(a / "constants.csv") != slurp(c / "constants.csv"));
    }
  }
}
