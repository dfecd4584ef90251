#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tropc/cli.hpp"

using namespace tropc;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path("cli_scratch") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kDataDir = TROPC_DATA_DIR;

}  // namespace

TEST_CASE("cli: no subcommand and help") {
  CHECK(run({}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("cli: loglimit artifacts are deterministic and guarded") {
  const auto dir = scratch("loglimit");
  const std::string input = std::string(kDataDir) + "/diagonal_set.json";
  std::vector<std::string> args{"loglimit", "--input", input,   "--seed", "11",
                                "--n",      "40",      "--out", dir.string()};
  auto r = run(args);
  INFO(r.err);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("status: ok") != std::string::npos);
  REQUIRE(fs::exists(dir / "directions.csv"));
  REQUIRE(fs::exists(dir / "clusters.csv"));
  const std::string first = slurp(dir / "directions.csv");
  CHECK(first.find("# config-hash:") != std::string::npos);
  CHECK(first.find("# tool: tropc") != std::string::npos);

  // refuses to overwrite without --force
  CHECK(run(args).code == 1);
  // byte-identical rerun with --force
  args.push_back("--force");
  REQUIRE(run(args).code == 0);
  CHECK(slurp(dir / "directions.csv") == first);
  CHECK(run({"loglimit", "--input", input, "--out", dir.string()}).code == 2);  // seed required
}

TEST_CASE("cli: loglimit counts the four cones of the plane example") {
  const auto dir = scratch("plane");
  const std::string input = std::string(kDataDir) + "/plane_graph_set.json";
  const auto r = run({"loglimit", "--input", input, "--seed", "2025", "--n", "500", "--out",
                      dir.string()});
  INFO(r.err);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("clusters: 4 (face-like: 4, ray-like: 0)") != std::string::npos);
}

TEST_CASE("cli: schema violations exit 2") {
  const auto dir = scratch("badschema");
  const auto bad = dir / "bad.json";
  std::ofstream(bad) << "{\"vars\": [\"x\"], \"set\": {\"xor\": []}}";
  CHECK(run({"loglimit", "--input", bad.string(), "--seed", "1", "--out",
             (dir / "o").string()}).code == 2);
  std::ofstream(dir / "nonjson.json") << "{";
  CHECK(run({"tropicalize", "--input", (dir / "nonjson.json").string(), "--out",
             (dir / "o2").string()}).code == 2);
  CHECK(run({"lengths", "--rep", "/nonexistent/rep.json", "--out",
             (dir / "o3").string()}).code == 1);  // io error
}

TEST_CASE("cli: tropicalize") {
  const auto dir = scratch("trop");
  const std::string input = std::string(kDataDir) + "/line_poly.json";
  const auto r = run({"tropicalize", "--input", input, "--grid", "360", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto csv = io::parse_csv(slurp(dir / "tropicalize.csv"));
  CHECK(csv.rows.size() == 360);
  std::size_t members = 0;
  for (const auto& row : csv.rows) members += row.at(2) == "1";
  CHECK(members > 0);
  CHECK(members < 60);  // three thin tropical directions out of 360
}

TEST_CASE("cli: compactify reports boundary directions") {
  const auto dir = scratch("compactify");
  const auto r = run({"compactify", "--family", std::string(kDataDir) + "/quad_family.json",
                      "--paths", std::string(kDataDir) + "/witness_paths.json", "--out",
                      dir.string()});
  INFO(r.err);
  REQUIRE(r.code == 0);
  const auto csv = io::parse_csv(slurp(dir / "boundary.csv"));
  REQUIRE(csv.rows.size() == 6);  // 2 paths x 3 members
  // path 0 tends to (-1, 0, -2)/sqrt(5)
  const double c0 = std::stod(csv.rows[0].at(2));
  const double c2 = std::stod(csv.rows[2].at(2));
  CHECK_THAT(c2 / c0, Catch::Matchers::WithinRel(2.0, 1e-3));

  // iterated markov-rule paths degenerate along the trace coordinates
  const auto dirm = scratch("compactify_markov");
  const auto mfam = dirm / "family.json";
  std::ofstream(mfam) << R"({"vars":["x","y","z"],"members":[
    {"name":"x","poly":{"terms":[{"exp":[1,0,0],"coef":"1"}]}},
    {"name":"y","poly":{"terms":[{"exp":[0,1,0],"coef":"1"}]}},
    {"name":"z","poly":{"terms":[{"exp":[0,0,1],"coef":"1"}]}}]})";
  const auto mpaths = dirm / "paths.json";
  std::ofstream(mpaths) << R"({"paths":[
    {"kind":"iterated","rule":"markov","triple":[3,3,3],"which":3,"steps":40}]})";
  const auto rm = run({"compactify", "--family", mfam.string(), "--paths", mpaths.string(),
                       "--escape-norm", "15", "--out", dirm.string()});
  INFO(rm.err);
  REQUIRE(rm.code == 0);
  const auto mcsv = io::parse_csv(slurp(dirm / "boundary.csv"));
  REQUIRE(mcsv.rows.size() == 3);
  // the move fixes x and grows y, z at the same rate: direction (0,1,1)/sqrt(2)
  CHECK_THAT(std::stod(mcsv.rows[0].at(2)), Catch::Matchers::WithinAbs(0.0, 1e-3));
  CHECK_THAT(std::stod(mcsv.rows[1].at(2)),
             Catch::Matchers::WithinAbs(1.0 / std::sqrt(2.0), 1e-3));
  CHECK_THAT(std::stod(mcsv.rows[2].at(2)),
             Catch::Matchers::WithinAbs(1.0 / std::sqrt(2.0), 1e-3));

  // a path that never escapes: exit 3 with diagnostics
  const auto dir2 = scratch("compactify_noescape");
  const auto paths2 = dir2 / "paths.json";
  std::ofstream(paths2) << R"({"paths":[{"kind":"explicit","points":[[1,1],[2,1],[1,2],[2,2]]}]})";
  const auto r2 = run({"compactify", "--family", std::string(kDataDir) + "/quad_family.json",
                       "--paths", paths2.string(), "--out", dir2.string()});
  CHECK(r2.code == 3);
  CHECK(fs::exists(dir2 / "diagnostics.txt"));
}

TEST_CASE("cli: lengths table") {
  const auto dir = scratch("lengths");
  const auto r = run({"lengths", "--rep", std::string(kDataDir) + "/diag_rep.json", "--words",
                      "a,aa", "--out", dir.string()});
  INFO(r.err);
  REQUIRE(r.code == 0);
  const auto csv = io::parse_csv(slurp(dir / "lengths.csv"));
  REQUIRE(csv.rows.size() == 2);
  CHECK(csv.rows[0].at(0) == "a");
  CHECK_THAT(std::stod(csv.rows[0].at(3)), Catch::Matchers::WithinRel(16.0, 1e-12));
  CHECK_THAT(std::stod(csv.rows[0].at(4)), Catch::Matchers::WithinRel(std::log(16.0), 1e-12));
  CHECK_THAT(std::stod(csv.rows[1].at(3)), Catch::Matchers::WithinRel(256.0, 1e-12));
}

TEST_CASE("cli: twist-degenerate spectrum and plots") {
  const auto dir = scratch("twist");
  const auto r = run({"twist-degenerate", "--slope", "1/2", "--curves", "0/1,1/0,1/1", "--out",
                      dir.string()});
  INFO(r.err);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("status: converged") != std::string::npos);
  const auto csv = io::parse_csv(slurp(dir / "twist_limit.csv"));
  REQUIRE(csv.rows.size() == 3);
  // spectrum proportional to (1, 2, 1)
  const double a = std::stod(csv.rows[0].at(1));
  const double b = std::stod(csv.rows[1].at(1));
  const double c = std::stod(csv.rows[2].at(1));
  CHECK_THAT(b / a, Catch::Matchers::WithinAbs(2.0, 1e-3));
  CHECK_THAT(c / a, Catch::Matchers::WithinAbs(1.0, 1e-3));

  // deterministic artifacts
  const std::string bytes = slurp(dir / "twist_lengths.csv");
  REQUIRE(run({"twist-degenerate", "--slope", "1/2", "--curves", "0/1,1/0,1/1", "--out",
               dir.string(), "--force"}).code == 0);
  CHECK(slurp(dir / "twist_lengths.csv") == bytes);

  // plots are pure views: regenerating gives identical bytes
  const auto svg = dir / "spectrum.svg";
  REQUIRE(run({"plot", "--input", (dir / "twist_limit.csv").string(), "--kind", "spectrum",
               "--out", svg.string()}).code == 0);
  const std::string svg1 = slurp(svg);
  CHECK(svg1.rfind("<svg", 0) == 0);
  REQUIRE(run({"plot", "--input", (dir / "twist_limit.csv").string(), "--kind", "spectrum",
               "--out", svg.string(), "--force"}).code == 0);
  CHECK(slurp(svg) == svg1);
}

TEST_CASE("cli: hilbert rates") {
  const auto dir = scratch("hilbert");
  const auto r = run({"hilbert", "--domain", std::string(kDataDir) + "/triangle_domain.json",
                      "--map", std::string(kDataDir) + "/simplex_map.json", "--x0", "0.3,0.4",
                      "--kmax", "50", "--out", dir.string()});
  INFO(r.err);
  REQUIRE(r.code == 0);
  REQUIRE(r.out.rfind("rate: ", 0) == 0);
  CHECK_THAT(std::stod(r.out.substr(6)), Catch::Matchers::WithinAbs(std::log(16.0), 1e-6));
  const auto csv = io::parse_csv(slurp(dir / "hilbert_orbit.csv"));
  CHECK(csv.rows.size() == 50);

  const auto svg = dir / "orbit.svg";
  REQUIRE(run({"plot", "--input", (dir / "hilbert_orbit.csv").string(), "--kind", "orbit",
               "--out", svg.string()}).code == 0);
  CHECK(slurp(svg).rfind("<svg", 0) == 0);
}

TEST_CASE("cli: directions plots") {
  const auto dir = scratch("dirplots");
  const std::string input = std::string(kDataDir) + "/plane_graph_set.json";
  REQUIRE(run({"loglimit", "--input", input, "--seed", "5", "--n", "120", "--out",
               dir.string()}).code == 0);
  REQUIRE(run({"plot", "--input", (dir / "directions.csv").string(), "--kind", "directions3d",
               "--out", (dir / "d3.svg").string()}).code == 0);
  CHECK(slurp(dir / "d3.svg").rfind("<svg", 0) == 0);

  const auto dir2 = scratch("dirplots2");
  REQUIRE(run({"loglimit", "--input", std::string(kDataDir) + "/diagonal_set.json", "--seed",
               "5", "--n", "40", "--out", dir2.string()}).code == 0);
  REQUIRE(run({"plot", "--input", (dir2 / "directions.csv").string(), "--kind", "directions2d",
               "--out", (dir2 / "d2.svg").string()}).code == 0);
  CHECK(slurp(dir2 / "d2.svg").rfind("<svg", 0) == 0);
}
