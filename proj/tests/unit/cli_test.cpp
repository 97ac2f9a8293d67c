#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fineq/cli/command.hpp"

using namespace fineq::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run call(std::vector<std::string> args) {
  args.insert(args.begin(), "fineq");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = main_entry(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("fineq_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("exit codes") {
    CHECK(call({"certify-hi", "--potential", "1", "--R", "2.40"}).code == 0);
    CHECK(call({"certify-hi", "--potential", "1", "--R", "2.405"}).code == 1);
    CHECK(call({"certify-hi", "--potential", "pow(r,-3)"}).code == 2);
    CHECK(call({"certify-hi", "--potential", "1", "--bogus", "3"}).code == 2);
    CHECK(call({"certify-pair", "--V", "1", "--W", "-exp(r*r)", "--n", "3", "--R", "30"}).code == 3);
    CHECK(call({"--help"}).code == 0);
    CHECK(call({"nonsense"}).code == 2);
  }

  TEST_CASE("report layout") {
    Run r = call({"beta", "--potential", "1", "--R", "1"});
    REQUIRE(r.code == 0);
    Json j = Json::parse(r.out);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"schema_version", "command", "inputs", "result", "certificate",
                                           "tolerances", "runtime_ms", "artifact_version", "fingerprints"});
    CHECK(j["schema_version"] == kSchemaVersion);
    CHECK(j["result"]["value"].get<double>() == doctest::Approx(2.404825557695773 * 2.404825557695773).epsilon(1e-7));
  }

  TEST_CASE("cache hit reproduces the payload") {
    fs::path dir = scratch("cache");
    std::vector<std::string> args = {"rayleigh", "--mode", "hardy", "--n", "3", "--grid", "128", "--cache-dir",
                                     dir.string()};
    Run a = call(args), b = call(args);
    REQUIRE(a.code == 0);
    CHECK(b.code == 0);
    Json ja = Json::parse(a.out), jb = Json::parse(b.out);
    ja.erase("runtime_ms");
    jb.erase("runtime_ms");
    CHECK(ja == jb);
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir)) files += e.is_regular_file();
    CHECK(files == 1);
  }

  TEST_CASE("config file merges under flags") {
    fs::path dir = scratch("config");
    std::ofstream(dir / "run.cfg") << "# defaults\npotential = 1\nR = 2.405\n";
    CHECK(call({"certify-hi", "--config", (dir / "run.cfg").string()}).code == 1);
    CHECK(call({"certify-hi", "--config", (dir / "run.cfg").string(), "--R", "2.0"}).code == 0);
    std::ofstream(dir / "bad.cfg") << "potentail = 1\n";
    CHECK(call({"certify-hi", "--config", (dir / "bad.cfg").string()}).code == 2);
  }

  TEST_CASE("sweep over radii") {
    fs::path dir = scratch("sweep");
    const std::string csv = (dir / "rows.csv").string();
    Run r = call({"sweep", "--verb", "beta", "--param", "potential=1", "--param", "R=0.5,1,2", "--csv", csv});
    CHECK(r.code == 0);
    std::ifstream is(csv);
    std::string header, line;
    std::getline(is, header);
    std::vector<double> values;
    while (std::getline(is, line)) values.push_back(std::stod(line.substr(line.rfind(',') + 1)));
    REQUIRE(values.size() == 3);
    CHECK(values[0] > values[1]);
    CHECK(values[1] > values[2]);
    CHECK(values[0] == doctest::Approx(4 * values[1]).epsilon(1e-4));
    CHECK(call({"sweep", "--verb", "beta", "--param", "R="}).code == 0);
  }

  TEST_CASE("report replay") {
    fs::path dir = scratch("replay");
    const std::string path = (dir / "r.json").string();
    REQUIRE(call({"transport-check", "--mode", "w2", "--m1", "1", "--out", path}).code == 0);
    CHECK(call({"report", "--in", path}).code == 0);
    Json j;
    std::ifstream(path) >> j;
    j["result"]["value"] = 42.0;
    std::ofstream(path) << j.dump(2);
    CHECK(call({"report", "--in", path}).code == 1);
  }

  TEST_CASE("binary round trip") {
    fs::path dir = scratch("binary");
    const std::string cmd = std::string(FINEQ_BINARY) + " moser --mode singular --n 2 --alpha 1 --out " +
                            (dir / "s.json").string();
    CHECK(std::system(cmd.c_str()) == 0);
    Json j;
    std::ifstream(dir / "s.json") >> j;
    CHECK(j["result"]["beta_max"].get<double>() == doctest::Approx(2 * 3.141592653589793));
  }
}
