#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <rodlab/io.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = RODLAB_CLI_PATH;

fs::path work_dir() {
  fs::path d = fs::temp_directory_path() / "rodlab_cli_tests";
  fs::create_directories(d);
  return d;
}

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("fixture subcommand emits the requested curve", "[cli]") {
  fs::path out = work_dir() / "ufix.json";
  REQUIRE(run("fixture --name u_shape --gap 0.2 --out " + out.string()) == 0);
  json j = load(out);
  REQUIRE(j["breakpoints"] == json::array({0.0, 0.45, 0.55, 1.0}));
  REQUIRE(j["vertices"][0] == json::array({0.0, 1.0}));
  REQUIRE(j["vertices"][2] == json::array({0.2, 0.0}));

  REQUIRE(run("fixture --name no_such_fixture --out " +
              (work_dir() / "x.json").string()) == 1);
}

TEST_CASE("check reports injectivity, witness status and the 1-D condition",
          "[cli]") {
  fs::path out = work_dir() / "check_xc.json";
  REQUIRE(run("check --fixture x_crossing --out " + out.string()) == 0);
  json xc = load(out);
  REQUIRE(xc["injective"] == false);
  REQUIRE(xc["witness_status"] == "interpenetration_detected");
  REQUIRE(xc["cn"]["satisfied"] == true);
  REQUIRE(xc["violations"].size() == 1);
  REQUIRE(xc["violations"][0]["kind"] == "crossing");

  fs::path out2 = work_dir() / "check_fold.json";
  REQUIRE(run("check --fixture fold --out " + out2.string()) == 0);
  json fold = load(out2);
  REQUIRE(fold["injective"] == false);
  REQUIRE(fold["witness_status"] == "witness_found");
  REQUIRE(fold["cn"]["satisfied"] == false);

  fs::path out3 = work_dir() / "check_line.json";
  REQUIRE(run("check --fixture straight --out " + out3.string()) == 0);
  json line = load(out3);
  REQUIRE(line["injective"] == true);
  REQUIRE_FALSE(line.contains("witness_status"));
  REQUIRE(line["manifest"]["tool"] == "rodlab");
}

TEST_CASE("check-cn csv freezes the fold verdict", "[cli]") {
  fs::path out = work_dir() / "cn.csv";
  REQUIRE(run("check-cn --fixture fold --format csv --out " + out.string()) == 0);
  REQUIRE(slurp(out) == "lhs,rhs,satisfied\n2,1,0\n");
}

TEST_CASE("injectify writes a certified curve and respects exit codes",
          "[cli]") {
  fs::path out = work_dir() / "touch_fixed.json";
  fs::path cert = work_dir() / "touch_cert.json";
  REQUIRE(run("injectify --fixture tangential_touch --delta 0.03125 --out " +
              out.string() + " --cert " + cert.string()) == 0);
  rodlab::PolylineCurve fixed = rodlab::io::load_curve(out.string());
  REQUIRE(rodlab::self_intersections(fixed).injective);
  json c = load(cert);
  REQUIRE(c["injective"] == true);
  REQUIRE(c["delta"] == 0.03125);
  REQUIRE(c["c0_error"].get<double>() < 0.125);

  // stable crossing: precondition failure
  REQUIRE(run("injectify --fixture x_crossing --out " +
              (work_dir() / "never.json").string()) == 1);
  // no witness found within budget: construction failure
  REQUIRE(run("injectify --fixture horned_devil --delta 0.125 --out " +
              (work_dir() / "never2.json").string()) == 2);
  // missing required --out: parse failure
  REQUIRE(run("injectify --fixture fold") == 1);
}

TEST_CASE("repeated runs with a fixed seed are byte-identical", "[cli]") {
  fs::path a = work_dir() / "det_a.json";
  fs::path ac = work_dir() / "det_a_cert.json";
  fs::path b = work_dir() / "det_b.json";
  fs::path bc = work_dir() / "det_b_cert.json";
  const std::string base =
      "injectify --fixture tangential_touch --delta 0.0625 --seed 7 ";
  REQUIRE(run(base + "--out " + a.string() + " --cert " + ac.string()) == 0);
  REQUIRE(run(base + "--out " + b.string() + " --cert " + bc.string()) == 0);
  REQUIRE(slurp(a) == slurp(b));
  REQUIRE(slurp(ac) == slurp(bc));
}

TEST_CASE("render produces an svg drawing", "[cli]") {
  fs::path out = work_dir() / "zig.svg";
  REQUIRE(run("render --fixture w_zigzag --out " + out.string()) == 0);
  REQUIRE(slurp(out).rfind("<svg", 0) == 0);
}

TEST_CASE("degree emits a csv over the sampling grid", "[cli]") {
  fs::path out = work_dir() / "devil_degree.csv";
  REQUIRE(run("degree --fixture horned_devil --nx 24 --ny 18 --band 0.2 --out " +
              out.string()) == 0);
  std::istringstream lines(slurp(out));
  std::string line;
  REQUIRE(std::getline(lines, line));
  REQUIRE(line == "x,y,degree");
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    const std::string deg = line.substr(line.rfind(',') + 1);
    REQUIRE((deg == "0" || deg == "1" || deg == "NA"));
  }
  REQUIRE(rows == 24 * 18);
}

TEST_CASE("extrude certifies a strip for the u-shape", "[cli]") {
  fs::path out = work_dir() / "u_strip.json";
  fs::path svg = work_dir() / "u_strip.svg";
  REQUIRE(run("extrude --fixture u_shape --delta 0.25 --out " + out.string() +
              " --svg " + svg.string()) == 0);
  json strip = load(out);
  REQUIRE(strip["h"].get<double>() > 0.0);
  REQUIRE(strip["certificate"]["injective_protocol"] == true);
  REQUIRE(strip["director"]["kind"] == "sampled");
  REQUIRE(slurp(svg).rfind("<svg", 0) == 0);
}

TEST_CASE("relax writes the recovery ladder", "[cli]") {
  fs::path dir = work_dir() / "relax_line";
  REQUIRE(run("relax --fixture straight --k 2 --table-n 33 --table-gamma 0.1 "
              "--out " +
              dir.string()) == 0);
  REQUIRE(fs::exists(dir / "ybar_1.json"));
  REQUIRE(fs::exists(dir / "ybar_2.json"));
  REQUIRE(fs::exists(dir / "manifest.json"));
  std::istringstream lines(slurp(dir / "energies.csv"));
  std::string header;
  REQUIRE(std::getline(lines, header));
  REQUIRE(header ==
          "k,beta,n,energy_out,envelope_energy,input_energy,bound");
  std::size_t rows = 0;
  std::string row;
  while (std::getline(lines, row)) ++rows;
  REQUIRE(rows == 2);
  rodlab::PolylineCurve y1 = rodlab::io::load_curve((dir / "ybar_1.json").string());
  REQUIRE(rodlab::self_intersections(y1).injective);
}
