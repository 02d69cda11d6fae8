#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "segsolve/benchmarks.hpp"

// End-to-end checks of the command-line driver: spawn the real binary (path
// injected by the build) and inspect exit codes and artifacts.

namespace {

std::string cli() { return std::string(SEGSOLVE_CLI_PATH); }

int run(const std::string& args, const std::string& capture = "") {
  std::string cmd = "\"" + cli() + "\" " + args + " >/dev/null";
  cmd += capture.empty() ? " 2>/dev/null" : " 2>\"" + capture + "\"";
  const int raw = std::system(cmd.c_str());
  REQUIRE(raw != -1);
  return WEXITSTATUS(raw);
}

std::string fresh_dir(const std::string& tag) {
  static int counter = 0;
  const std::string dir =
      "cli_scratch/" + tag + "_" + std::to_string(counter++);
  const int rc =
      std::system(("rm -rf \"" + dir + "\" && mkdir -p \"" + dir + "\"").c_str());
  REQUIRE(rc == 0);
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool exists(const std::string& path) {
  std::ifstream in(path);
  return in.good();
}

}  // namespace

TEST_CASE("solve writes fields, report, and metadata") {
  const std::string dir = fresh_dir("solve");
  const int rc =
      run("solve --problem example2 --n 10 --iters 400 --out " + dir);
  CHECK(rc == 0);
  for (const char* name : {"u_1.csv", "u_2.csv", "u_3.csv", "w.csv",
                           "report.json", "meta.json"}) {
    CHECK(exists(dir + "/" + name));
  }
  const nlohmann::json report =
      nlohmann::json::parse(slurp(dir + "/report.json"));
  CHECK(report["problem"] == "example2");
  CHECK(report["n"] == 10);
  CHECK(report["max_iterations"] == 400);
  CHECK(report["report"]["iterations_run"] == 400);
  // Timestamps are quarantined in meta.json.
  CHECK(slurp(dir + "/report.json").find("written_at") == std::string::npos);
  CHECK(slurp(dir + "/meta.json").find("written_at") != std::string::npos);
}

TEST_CASE("solve reruns are byte-identical") {
  const std::string a = fresh_dir("rerun_a");
  const std::string b = fresh_dir("rerun_b");
  const std::string args = "solve --problem example1 --n 12 --iters 150 --out ";
  REQUIRE(run(args + a) == 0);
  REQUIRE(run(args + b) == 0);
  for (const char* name : {"u_1.csv", "u_2.csv", "w.csv", "report.json"}) {
    CHECK(slurp(a + "/" + name) == slurp(b + "/" + name));
  }
}

TEST_CASE("thread count does not change the output") {
  const std::string a = fresh_dir("thr1");
  const std::string b = fresh_dir("thr4");
  const std::string args = " solve --problem example2 --n 14 --iters 200 --out ";
  REQUIRE(std::system(("SEGSOLVE_THREADS=1 \"" + cli() + "\"" + args + a +
                       " >/dev/null 2>&1")
                          .c_str()) == 0);
  REQUIRE(std::system(("SEGSOLVE_THREADS=4 \"" + cli() + "\"" + args + b +
                       " >/dev/null 2>&1")
                          .c_str()) == 0);
  CHECK(slurp(a + "/w.csv") == slurp(b + "/w.csv"));
}

TEST_CASE("solve exit codes for defective inputs") {
  CHECK(run("solve --problem example2 --n 1 --out " + fresh_dir("n1")) == 2);
  CHECK(run("solve --problem no_such --out " + fresh_dir("unknown")) == 2);
  CHECK(run("solve --out " + fresh_dir("nosource")) == 2);
  CHECK(run("solve --config missing_file.json --out " +
            fresh_dir("missing")) == 1);
  CHECK(run("solve --problem example1 --config also.json --out " +
            fresh_dir("both")) == 2);
}

TEST_CASE("bad config is rejected naming the node") {
  const std::string dir = fresh_dir("badcfg");
  {
    nlohmann::json j;
    j["name"] = "bad";
    j["dim"] = 1;
    j["n"] = 4;
    j["m"] = 2;
    j["boundary"] = {{{"values", {1.0, 0.0}}}, {{"values", {1.0, 0.0}}}};
    j["dynamics"] = {{{"kind", "zero"}}, {{"kind", "zero"}}};
    std::ofstream(dir + "/bad.json") << j.dump(2);
  }
  const std::string err = dir + "/stderr.txt";
  CHECK(run("solve --config " + dir + "/bad.json --out " + dir, err) == 2);
  CHECK(slurp(err).find("node") != std::string::npos);
}

TEST_CASE("a registry problem round-trips through a config file") {
  const std::string dir = fresh_dir("roundtrip");
  const nlohmann::json j = segsolve::problem_to_json(segsolve::example1());
  std::ofstream(dir + "/example1.json") << j.dump(2);
  REQUIRE(run("solve --problem example1 --n 10 --iters 120 --out " + dir +
              "/by_name") == 0);
  REQUIRE(run("solve --config " + dir + "/example1.json --n 10 --iters 120 "
              "--out " + dir + "/by_config") == 0);
  CHECK(slurp(dir + "/by_name/w.csv") == slurp(dir + "/by_config/w.csv"));
}

TEST_CASE("table command") {
  const std::string dir = fresh_dir("table");
  SUBCASE("needs an exact solution") {
    CHECK(run("table --problem example1 --out " + dir) == 2);
  }
  SUBCASE("writes both renderings and hits the N=10 plateau") {
    REQUIRE(run("table --problem example2 --n-list 10,20 --out " + dir) == 0);
    const std::string text = slurp(dir + "/table.txt");
    CHECK(text.find("N=10") != std::string::npos);
    CHECK(text.find("R_{N,160N}") != std::string::npos);
    const nlohmann::json t = nlohmann::json::parse(slurp(dir + "/table.json"));
    REQUIRE(t["n_list"].size() == 2);
    // Converged rows of the first column sit on the discretization floor.
    const auto& values = t["values"];
    REQUIRE(values.size() == 6);
    for (std::size_t row = 1; row < values.size(); ++row) {
      const double r = values[row][0].get<double>();
      CHECK(std::abs(r - 2.27e-2) <= 0.15 * 2.27e-2);
    }
  }
}

TEST_CASE("validate command") {
  const std::string dir = fresh_dir("validate");
  CHECK(run("validate --out " + dir) == 0);
  const nlohmann::json v = nlohmann::json::parse(slurp(dir + "/validate.json"));
  CHECK(v["passed"] == true);
  CHECK(run("validate --inject-broken --out " + fresh_dir("broken")) == 4);
}

TEST_CASE("probe command") {
  const std::string dir = fresh_dir("probe");
  CHECK(run("probe --problem example1 --n 16 --trials 2000 --out " + dir) == 0);
  const nlohmann::json p = nlohmann::json::parse(slurp(dir + "/probe.json"));
  CHECK(p["violations"].empty());
}

TEST_CASE("refine command reports the exact-reference study") {
  const std::string dir = fresh_dir("refine");
  CHECK(run("refine --problem example2 --n-list 10,20,40 --out " + dir) == 0);
  const std::string text = slurp(dir + "/refine.txt");
  CHECK(text.find("exact") != std::string::npos);
  const nlohmann::json r = nlohmann::json::parse(slurp(dir + "/refine.json"));
  CHECK(r["rows"].size() == 3);
}
