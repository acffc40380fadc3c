#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = rfim::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "rfim_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::size_t count_lines(const std::string& s, const std::string& prefix = "") {
  std::istringstream in(s);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) ++n;
  return n;
}

const std::vector<std::string> kSmallSim{"simulate", "--size", "16", "--sweeps", "200",
                                         "--burnin", "20", "--realizations", "2",
                                         "--j1", "2", "--beta", "0.3", "--theta", "0.5"};

std::vector<std::string> with(std::vector<std::string> base, std::initializer_list<std::string> more) {
  base.insert(base.end(), more);
  return base;
}

}  // namespace

TEST_CASE("help and usage errors") {
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  for (const char* cmd : {"simulate", "verify-energy", "verify-disorder", "enumerate-contours",
                          "certify-c0", "sweep", "roundtrip-test"})
    CHECK(help.out.find(cmd) != std::string::npos);

  CHECK(run({}).code == rfim::cli::kInvalid);
  CHECK(run({"frobnicate"}).code == rfim::cli::kInvalid);
  const auto unknown = run({"roundtrip-test", "--n", "4", "--bogus"});
  CHECK(unknown.code == rfim::cli::kInvalid);
  CHECK_FALSE(unknown.err.empty());
  CHECK(run({"roundtrip-test", "--format", "xml"}).code == rfim::cli::kInvalid);
  CHECK(run({"roundtrip-test", "--n", "abc"}).code == rfim::cli::kInvalid);
  CHECK(run({"simulate", "--boundary", "0"}).code == rfim::cli::kInvalid);
}

TEST_CASE("alpha outside the zeta range is rejected where zeta matters") {
  for (const char* cmd : {"verify-energy", "verify-disorder", "simulate", "sweep"}) {
    const auto r = run({cmd, "--alpha", "0.7", "--n", "4"});
    CHECK(r.code == rfim::cli::kInvalid);
    CHECK(r.err.find("alpha") != std::string::npos);
  }
  CHECK(run({"verify-energy", "--alpha", "-0.1", "--n", "4"}).code == rfim::cli::kInvalid);
  // geometry alone does not care about alpha
  CHECK(run({"roundtrip-test", "--alpha", "0.7", "--n", "6"}).code == rfim::cli::kOk);
}

TEST_CASE("validation and capacity errors exit with 1") {
  CHECK(run(with(kSmallSim, {"--beta", "0.1,0.2"})).code == rfim::cli::kInvalid);
  CHECK(run({"simulate", "--sweeps", "10", "--burnin", "10"}).code == rfim::cli::kInvalid);
  CHECK(run({"simulate", "--j1", "0.5"}).code == rfim::cli::kInvalid);
  CHECK(run({"verify-energy", "--n", "30"}).code == rfim::cli::kInvalid);
  CHECK(run({"enumerate-contours", "--mmax", "7"}).code == rfim::cli::kInvalid);
  CHECK(run({"certify-c0", "--mmax", "7"}).code == rfim::cli::kInvalid);
  CHECK(run({"certify-c0", "--gamma", "0"}).code == rfim::cli::kInvalid);
  CHECK(run({"verify-disorder", "--beta", "0"}).code == rfim::cli::kInvalid);
  CHECK(run({"verify-disorder", "--n", "14"}).code == rfim::cli::kInvalid);
  CHECK(run({"sweep", "--beta", "0.1,x"}).code == rfim::cli::kInvalid);
}

TEST_CASE("failed verification exits with 2") {
  const auto r = run({"verify-energy", "--j1", "1.5", "--n", "10", "--deterministic"});
  CHECK(r.code == rfim::cli::kFailed);
  CHECK(r.out.find(",false,") != std::string::npos);
  const auto ok = run({"verify-energy", "--n", "8", "--deterministic"});
  CHECK(ok.code == rfim::cli::kOk);
}

TEST_CASE("csv artifacts are self-describing") {
  const auto r = run({"verify-energy", "--n", "6", "--deterministic"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# schema=1\n# config={", 0) == 0);
  CHECK(r.out.find("\"command\":\"verify-energy\"") != std::string::npos);
  CHECK(r.out.find("\nalpha,j1,C,N,instance,lhs,rhs,margin,pass,check,level\n") != std::string::npos);
  CHECK(r.out.find("# timestamp=") == std::string::npos);
  CHECK(r.out.find('\r') == std::string::npos);
  CHECK(count_lines(r.out, "# schema=") == 1);

  const auto stamped = run({"verify-energy", "--n", "6"});
  CHECK(stamped.out.find("# timestamp=") != std::string::npos);
}

TEST_CASE("json artifacts have sorted keys and echo the config") {
  const auto r = run(with(kSmallSim, {"--seed", "7", "--deterministic"}));
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc["schema"] == 1);
  CHECK(doc["config"]["command"] == "simulate");
  CHECK(doc["config"]["seed"] == 7);
  CHECK(doc["config"]["size"] == 16);
  CHECK(doc["realizations"].size() == 2);
  CHECK_FALSE(doc.contains("timestamp"));
  // keys appear in lexicographic order in the text
  std::vector<std::string> keys;
  for (auto it = doc.begin(); it != doc.end(); ++it) keys.push_back(it.key());
  std::size_t last = 0;
  for (const auto& k : keys) {
    const auto pos = r.out.find("\n  \"" + k + "\":");
    REQUIRE(pos != std::string::npos);
    CHECK(pos >= last);
    last = pos;
  }
  CHECK(std::is_sorted(keys.begin(), keys.end()));

  const auto stamped = run(kSmallSim);
  CHECK(json::parse(stamped.out).contains("timestamp"));
}

TEST_CASE("config file precedence and the seed environment variable") {
  const auto cfg = scratch("settings.ini");
  {
    std::ofstream f(cfg);
    f << "alpha=0.3\nj1=7\nseed=11\n";
  }
  const auto from_file = run({"verify-energy", "--config", cfg.string(), "--n", "5",
                              "--format", "json", "--deterministic"});
  REQUIRE(from_file.code == 0);
  auto doc = json::parse(from_file.out);
  CHECK(doc["config"]["alpha"] == 0.3);
  CHECK(doc["config"]["j1"] == 7.0);

  const auto flag_wins = run({"verify-energy", "--config", cfg.string(), "--j1", "9", "--n", "5",
                              "--format", "json", "--deterministic"});
  doc = json::parse(flag_wins.out);
  CHECK(doc["config"]["alpha"] == 0.3);
  CHECK(doc["config"]["j1"] == 9.0);

  CHECK(run({"verify-energy", "--config", (cfg.string() + ".missing"), "--n", "5"}).code ==
        rfim::cli::kInvalid);

  ::setenv("RFIM_SEED", "123", 1);
  const auto env = run(with(kSmallSim, {"--deterministic"}));
  CHECK(json::parse(env.out)["config"]["seed"] == 123);
  const auto flag = run(with(kSmallSim, {"--seed", "5", "--deterministic"}));
  CHECK(json::parse(flag.out)["config"]["seed"] == 5);
  ::unsetenv("RFIM_SEED");
  const auto none = run(with(kSmallSim, {"--deterministic"}));
  CHECK(json::parse(none.out)["config"]["seed"] == 0);
}

TEST_CASE("out files and format selection") {
  const auto json_path = scratch("report.json");
  const auto r = run(with(kSmallSim, {"--out", json_path.string(), "--deterministic"}));
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  CHECK(json::parse(slurp(json_path))["config"]["command"] == "simulate");

  const auto csv_path = scratch("report.csv");
  REQUIRE(run(with(kSmallSim, {"--out", csv_path.string(), "--deterministic"})).code == 0);
  const auto text = slurp(csv_path);
  CHECK(text.rfind("# schema=1\n", 0) == 0);
  CHECK(count_lines(text, "average,") == 1);

  const auto forced = run(with(kSmallSim, {"--format", "csv", "--deterministic"}));
  CHECK(forced.out.rfind("# schema=1\n", 0) == 0);

  CHECK(run({"roundtrip-test", "--out", "/nonexistent-dir/x.csv"}).code == rfim::cli::kInvalid);
}

TEST_CASE("commands produce the documented content") {
  const auto rt = run({"roundtrip-test", "--n", "10", "--deterministic"});
  CHECK(rt.code == 0);
  CHECK(rt.out.find("\n10,1024,0,0,true\n") != std::string::npos);

  const auto en = run({"enumerate-contours", "--mmax", "3", "--deterministic"});
  CHECK(en.code == 0);
  CHECK(count_lines(en.out, "1,") == 1);
  CHECK(count_lines(en.out, "2,") == 8);
  CHECK(count_lines(en.out, "3,") == 45);
  CHECK(en.out.find("\n1,0,-1:0,1\n") != std::string::npos);

  const auto cert = run({"certify-c0", "--gamma", "0.1", "--mmax", "4", "--deterministic"});
  CHECK(cert.code == 0);
  CHECK(cert.out.find("# b_star=4\n") != std::string::npos);
  const auto cert_file = scratch("cert.json");
  const auto cj = run({"certify-c0", "--mmax", "3", "--out", cert_file.string(), "--deterministic"});
  CHECK(cj.out == "b_star=2\n");
  CHECK(json::parse(slurp(cert_file))["b_star"] == 2.0);
  const auto never = run({"certify-c0", "--gamma", "1", "--mmax", "2", "--deterministic"});
  CHECK(never.code == rfim::cli::kFailed);
  CHECK(never.out.find("# b_star=none") != std::string::npos);

  const auto vd = run({"verify-disorder", "--beta", "1", "--theta", "0.5", "--format", "json",
                       "--deterministic"});
  CHECK(vd.code == 0);
  const auto doc = json::parse(vd.out);
  CHECK(doc["partition_failures"] == 0);
  CHECK(doc["levels"].size() == 2);
  CHECK(doc["levels"][0]["theta_zero_exact"] == true);
  CHECK(doc["events"].size() == 3);
  CHECK(doc["exhaustive"] == true);

  const auto sw = run({"sweep", "--beta", "0.1,0.3", "--theta", "0.2,0.5", "--size", "16",
                       "--sweeps", "100", "--burnin", "10", "--realizations", "2", "--j1", "2",
                       "--deterministic"});
  CHECK(sw.code == 0);
  CHECK(count_lines(sw.out, "0.1,") == 2);
  CHECK(count_lines(sw.out, "0.3,") == 2);
}

TEST_CASE("deterministic runs are byte-identical") {
  const std::vector<std::vector<std::string>> commands{
      with(kSmallSim, {"--seed", "3"}),
      with(kSmallSim, {"--seed", "3", "--format", "csv"}),
      {"verify-energy", "--n", "6"},
      {"verify-disorder", "--samples", "500", "--distribution", "gaussian", "--seed", "4"},
      {"enumerate-contours", "--mmax", "2"},
      {"certify-c0", "--mmax", "3"},
      {"roundtrip-test", "--n", "6"},
      {"sweep", "--beta", "0.1,0.2", "--size", "8", "--sweeps", "60", "--burnin", "5",
       "--realizations", "2", "--j1", "2", "--seed", "9"}};
  for (const auto& cmd : commands) {
    const auto a = run(with(cmd, {"--deterministic"}));
    const auto b = run(with(cmd, {"--deterministic", "--jobs", "2"}));
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK_FALSE(a.out.empty());
  }
}
