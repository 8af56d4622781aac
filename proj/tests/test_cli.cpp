#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ncet/cli.hpp"
#include "ncet/models.hpp"

using namespace ncet;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "ncet");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json parse(const std::string& s) { return nlohmann::json::parse(s); }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("ncet_cli_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST_CASE("check reports hypotheses") {
  const Run r = run({"check", "--model", "ROT", "--d", "4", "--p", "1"});
  REQUIRE(r.code == 0);
  const auto j = parse(r.out);
  CHECK(j["separating"] == true);
  CHECK(j["steps"][0]["m"] == 1);
  CHECK(j["steps"][0]["ergodic"] == true);
  CHECK(j["br1"]["equivalent"] == true);

  const Run rot6 = run({"check", "--model", "ROT", "--d", "6", "--p", "2", "--steps", "1,3"});
  REQUIRE(rot6.code == 0);
  const auto j6 = parse(rot6.out);
  CHECK(j6["steps"][0]["fixed_space_dim"] == 2);
  CHECK(j6["steps"][1]["fixed_space_dim"] == 6);

  const Run ce = run({"check", "--model", "CE", "--n", "64"});
  REQUIRE(ce.code == 0);
  CHECK(parse(ce.out)["separating"] == false);
  CHECK(parse(ce.out)["br1"].is_null());
}

TEST_CASE("system files") {
  const std::string good = temp_path("good.json");
  {
    std::ofstream f(good);
    f << R"({"label": "flip", "dim": 2, "U": [[[0,0],[1,0]],[[1,0],[0,0]]],
             "omega": [[0.7071067811865476, 0], [0.7071067811865476, 0]],
             "m_generators": [[[1,0],[0,0]]]})";
  }
  const Run r = run({"check", "--system", good});
  REQUIRE(r.code == 0);
  CHECK(parse(r.out)["system"] == "flip");
  CHECK(parse(r.out)["steps"][0]["ergodic"] == true);

  const std::string bad = temp_path("bad.json");
  {
    std::ofstream f(bad);
    f << R"({"dim": 2, "U": [[1, 0], [0]], "omega": [1, 0], "m_generators": []})";
  }
  const Run b = run({"check", "--system", bad});
  CHECK(b.code == 2);
  CHECK(b.err.find("ConfigError") != std::string::npos);

  std::ofstream(bad) << "{not json";
  CHECK(run({"check", "--system", bad}).code == 2);
  CHECK(run({"check", "--system", temp_path("missing.json")}).code == 2);

  // Parsed matrices round-trip through the writer.
  const ComplexMatrix m{{1.0, Complex(0, 2)}, {Complex(3, -1), 4.0}};
  const nlohmann::json j = nlohmann::json::parse(cli::matrix_json(m).dump());
  CHECK(cli::parse_matrix(j, 2, 2, "m") == m);
  const nlohmann::json flat = nlohmann::json::parse("[[1,0],[0,2],[3,-1],[4,0]]");
  CHECK(cli::parse_matrix(flat, 2, 2, "m") == m);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == 2);
  CHECK(run({"converge", "--model", "ROT", "--d", "4", "--k1", "1", "--k2", "1", "--N", "4"}).code == 2);
  CHECK(run({"converge", "--model", "ROT", "--d", "4", "--k1", "0", "--k2", "2", "--N", "4"}).code == 2);
  CHECK(run({"converge", "--model", "NOPE", "--d", "4", "--k1", "1", "--k2", "2", "--N", "4"}).code == 2);
  CHECK(run({"converge", "--model", "ROT", "--d", "4", "--k1", "1", "--k2", "2", "--N", "8,4"}).code == 2);
  CHECK(run({"limit", "--model", "CE", "--n", "20", "--k1", "1", "--k2", "2"}).code == 3);
  CHECK(run({"decompose", "--model", "TRACIAL", "--d", "2", "--phases", "0,0.5"}).code == 3);
  CHECK(run({"decompose", "--model", "TRACIAL", "--d", "2"}).code == 3);
  CHECK(run({"counterexample", "--n", "64", "--N", "128"}).code == 3);
  CHECK(run({"counterexample", "--n", "8"}).code == 2);
  // X outside span(M + M') on the ergodic route: M = M' = diagonals here.
  const Run off = run({"limit", "--model", "ROT", "--d", "3", "--p", "1", "--k1", "1", "--k2", "2",
                       "--X", "inline:[[0,1,0],[0,0,0],[0,0,0]]"});
  CHECK(off.code == 3);
  CHECK(off.err.find("NotInSpan") != std::string::npos);
}

TEST_CASE("converge routes") {
  const Run ergodic = run({"converge", "--model", "ROT", "--d", "4", "--p", "1", "--k1", "1", "--k2",
                           "2", "--X", "indicator:{0}", "--N", "4,400"});
  REQUIRE(ergodic.code == 0);
  CHECK(ergodic.out.rfind("N,deviation\n4,", 0) == 0);
  const auto side = parse(ergodic.err);
  CHECK(side["route"] == "ergodic");
  CHECK(side["max_deviation"].get<double>() <= 1e-10);

  const Run dec = run({"converge", "--model", "ROT", "--d", "6", "--p", "2", "--k", "1", "--l", "1",
                       "--X", "indicator:{0,3}", "--xi", "e:1", "--N", "6,60"});
  REQUIRE(dec.code == 0);
  CHECK(parse(dec.err)["route"] == "decomposition");
  CHECK(parse(dec.err)["blocks"] == 2);
  CHECK(parse(dec.err)["max_deviation"].get<double>() <= 1e-10);

  const Run compact = run({"converge", "--model", "TRACIAL", "--d", "2", "--k1", "1", "--k2", "2",
                           "--X", "gen:0", "--N", "1,10"});
  REQUIRE(compact.code == 0);
  CHECK(parse(compact.err)["route"] == "compact");

  const Run none = run({"converge", "--model", "CE", "--n", "2048", "--k1", "1", "--k2", "2", "--X",
                        "A", "--xi", "e:0", "--N", "1024,2048"});
  REQUIRE(none.code == 0);
  CHECK(none.out == "N,re,im\n1024,0.666015625,0\n2048,0.3330078125,0\n");
  CHECK(none.err.find("warning") != std::string::npos);
}

TEST_CASE("route selection is a function of the report") {
  HypothesisReport r;
  r.separating = true;
  r.ergodic_for[1] = true;
  r.commutant_fixed_in_center[1] = true;
  CHECK(cli::select_route(r, 1, 2) == cli::Route::Ergodic);
  r.ergodic_for[1] = false;
  CHECK(cli::select_route(r, 1, 2) == cli::Route::Decomposition);
  CHECK(cli::select_route(r, 2, 3) == cli::Route::Decomposition);
  r.ergodic_for[2] = false;
  r.commutant_fixed_in_center[2] = true;
  CHECK(cli::select_route(r, 1, 3) == cli::Route::Compact);  // l = 2 does not divide k1 = 1
  CHECK(cli::select_route(r, 2, 4) == cli::Route::Decomposition);
  r.separating = false;
  CHECK(cli::select_route(r, 1, 2) == cli::Route::Compact);
  r.compact = false;
  CHECK(cli::select_route(r, 1, 2) == cli::Route::None);
}

TEST_CASE("threepoint") {
  const Run rot = run({"threepoint", "--model", "ROT", "--d", "4", "--p", "1", "--k1", "1", "--k2",
                       "2", "--A0", "indicator:{0,1}", "--A1", "indicator:{1}", "--A2",
                       "indicator:{1,2}", "--N", "4,40"});
  REQUIRE(rot.code == 0);
  const auto j = parse(rot.out);
  CHECK(j["route"] == "ergodic");
  CHECK(j["limit"][0] == j["finite_means"][0][0]);
  CHECK(j["residual"].get<double>() <= 1e-12);

  const Run trivial = run({"threepoint", "--model", "ROT", "--d", "5", "--p", "2", "--k1", "1",
                           "--k2", "2", "--A0", "indicator:{0,3}", "--N", "5"});
  REQUIRE(trivial.code == 0);
  CHECK(std::abs(parse(trivial.out)["limit"][0].get<double>() - 0.4) < 1e-12);

  const Run ce = run({"threepoint", "--model", "CE", "--n", "4096", "--k1", "1", "--k2", "2", "--A0",
                      "Bdag", "--A1", "A", "--A2", "B", "--N", "1024,2048,4096"});
  REQUIRE(ce.code == 0);
  const auto jc = parse(ce.out);
  CHECK(jc["limit"] == "divergent-demo");
  CHECK(jc["spread"].get<double>() >= 0.3);
}

TEST_CASE("decompose report") {
  const Run r = run({"decompose", "--model", "ROT", "--d", "12", "--p", "2", "--l", "2"});
  REQUIRE(r.code == 0);
  const auto j = parse(r.out);
  CHECK(j["blocks"].size() == 4);
  for (const auto& b : j["blocks"]) {
    CHECK(b["dim"] == 3);
    CHECK(b["ergodic"] == true);
    CHECK(b["spectrum"].size() == 3);
  }
  CHECK(j["residuals"]["unitary"].get<double>() <= 1e-8);
  CHECK(j["split"]["consistent"] == true);
  CHECK(j["fiber_modular"]["ok"] == true);

  const Run off = run({"decompose", "--model", "TRACIAL", "--d", "2", "--phases", "0,0.5",
                       "--no-centrality"});
  REQUIRE(off.code == 0);
  CHECK(parse(off.out)["split"]["split"] == false);
  CHECK(parse(off.out)["fiber_modular"]["ok"] == false);
}

TEST_CASE("tensor-fixed") {
  const Run r = run({"tensor-fixed", "--model", "ROT", "--d", "4", "--p", "1", "--k1", "1", "--k2", "-1"});
  REQUIRE(r.code == 0);
  const auto j = parse(r.out);
  CHECK(j["rank"] == 4);
  CHECK(j["pairs"].size() == 4);
  CHECK(j["residual"].get<double>() <= 1e-8);
}

TEST_CASE("output is byte-identical across runs") {
  const std::vector<std::vector<std::string>> commands{
      {"check", "--model", "TRACIAL", "--d", "2", "--u-seed", "3"},
      {"converge", "--model", "ROT", "--d", "6", "--p", "2", "--k", "1", "--l", "1", "--X",
       "indicator:{0}", "--N", "6,60"},
      {"decompose", "--model", "ROT", "--d", "12", "--p", "2", "--l", "2", "--seed", "0"},
      {"threepoint", "--model", "ROT", "--d", "4", "--k1", "1", "--k2", "2", "--N", "4,8"},
      {"counterexample", "--n", "256", "--N", "64,128,256"},
  };
  for (const auto& cmd : commands) {
    CAPTURE(cmd[0]);
    const std::string p1 = temp_path("det1"), p2 = temp_path("det2");
    auto a = cmd, b = cmd;
    a.insert(a.end(), {"--out", p1});
    b.insert(b.end(), {"--out", p2});
    REQUIRE(run(a).code == 0);
    REQUIRE(run(b).code == 0);
    CHECK(slurp(p1) == slurp(p2));
    CHECK(!slurp(p1).empty());
    CHECK(slurp(p1 + ".json") == slurp(p2 + ".json"));
  }
}
