#include <doctest.h>

#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include "oracles.hpp"

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CmdResult run(const std::string& args) {
  const std::string err_path =
      "/tmp/dske_cli_stderr." + std::to_string(::getpid());
  const std::string cmd =
      std::string(DSKE_CLI_PATH) + " " + args + " 2>" + err_path;
  CmdResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) result.out.append(buf, n);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.err = slurp(err_path);
  std::remove(err_path.c_str());
  return result;
}

const std::string kReferenceDump =
    "DSKE-BOX v1 q=29\n"
    "5 9 16 22 23 28\n"
    "2 28 25 22 19 16\n"
    "8 11 14 17 20 23\n"
    "7 12 17 22 27 3\n"
    "4 5 6 7 8 9\n"
    "13 18 23 28 4 9\n"
    "1a 2a 3a 4a 5a 6a\n"
    "2b 3b 4b 5b 6b 7b\n"
    "3c 4c 5c 6c 7c 8c\n"
    "4d 5d 6d 7d 8d 9d\n"
    "5e 6e 7e 8e 9e ae\n"
    "6f 7f 8f 9f af bf\n";

}  // namespace

TEST_CASE("genbox prints the reference dump") {
  CmdResult r = run("genbox --p 5 --q 29 --n 3");
  CHECK(r.exit_code == 0);
  CHECK(r.out == kReferenceDump);
  CHECK(r.err.empty());
}

TEST_CASE("genbox rejects a composite p with exit 2") {
  CmdResult r = run("genbox --p 4 --q 29 --n 3");
  CHECK(r.exit_code == 2);
  CHECK(r.out.empty());
  CHECK(r.err == "error: p is not prime\n");
}

TEST_CASE("genbox matches the formula oracle for other params") {
  CmdResult r = run("genbox --p 7 --q 31 --n 4");
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "DSKE-BOX v1 q=31");
  oracle::Grid expected = oracle::s1_grid(7, 31, 4);
  for (int row = 0; row < 6; ++row) {
    for (int col = 0; col < 6; ++col) {
      std::uint32_t value;
      REQUIRE(static_cast<bool>(lines >> value));
      CHECK(value == expected[row][col]);
    }
  }
}

TEST_CASE("genbox vectors format is machine readable") {
  CmdResult r = run("genbox --p 5 --q 29 --n 3 --format vectors");
  REQUIRE(r.exit_code == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["format"] == "dske-box");
  CHECK(j["q"] == 29);
  CHECK(j["s1"][0] == nlohmann::json({5, 9, 16, 22, 23, 28}));
  CHECK(j["s1"][3] == nlohmann::json({7, 12, 17, 22, 27, 3}));
  CHECK(j["s2"][5][5] == "bf");
}

TEST_CASE("inspect shows the derived selections for a nonce") {
  CmdResult r = run("inspect --p 5 --q 29 --n 3 --nonce 0 --k 3");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out == kReferenceDump + "k=3\ns1_sel=2,3\ns2_sel=3,0\n");
}

TEST_CASE("handshake self-test is deterministic") {
  const std::string cmd =
      "handshake --self-test --p 5 --q 29 --n 3 --nonce 7 --seed 9";
  CmdResult first = run(cmd);
  REQUIRE(first.exit_code == 0);
  CHECK(first.out.size() == 65);  // 8 residues * 8 hex chars + newline
  CmdResult second = run(cmd);
  CHECK(second.out == first.out);
}

// Starts a background responder on an ephemeral port and returns the port it
// reports on stderr. out_path receives the responder's stdout.
static std::uint16_t spawn_responder(const std::string& params_flags,
                                     const std::string& out_path) {
  const std::string err_path = out_path + ".err";
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  const std::string cmd = std::string(DSKE_CLI_PATH) +
                          " handshake --role resp --addr 127.0.0.1 --port 0 " +
                          params_flags + " >" + out_path + " 2>" + err_path +
                          " &";
  REQUIRE(std::system(cmd.c_str()) == 0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    const std::string err = slurp(err_path);
    const auto pos = err.find("listening ");
    if (pos != std::string::npos && err.find('\n', pos) != std::string::npos) {
      std::remove(err_path.c_str());
      return static_cast<std::uint16_t>(std::stoi(err.substr(pos + 10)));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  std::remove(err_path.c_str());
  FAIL("responder never reported its port");
  return 0;
}

TEST_CASE("handshake over tcp between two processes") {
  const std::string resp_out = "/tmp/dske_resp_out." + std::to_string(::getpid());
  const std::uint16_t port = spawn_responder("--p 5 --q 29 --n 3", resp_out);

  CmdResult init = run("handshake --role init --addr 127.0.0.1 --port " +
                       std::to_string(port) +
                       " --p 5 --q 29 --n 3 --nonce 11 --seed 4");
  REQUIRE(init.exit_code == 0);

  std::string responder_hex;
  for (int attempt = 0; attempt < 50; ++attempt) {
    responder_hex = slurp(resp_out);
    if (!responder_hex.empty()) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  std::remove(resp_out.c_str());
  CHECK(init.out == responder_hex);
}

TEST_CASE("handshake to an unreachable responder exits 3") {
  // Nothing listens on port 1; connect is refused immediately.
  CmdResult r = run("handshake --role init --addr 127.0.0.1 --port 1 "
                    "--p 5 --q 29 --n 3 --nonce 1 --seed 1");
  CHECK(r.exit_code == 3);
  CHECK(r.out.empty());
}

TEST_CASE("handshake with mismatched secrets exits 4") {
  const std::string resp_out =
      "/tmp/dske_resp_mismatch." + std::to_string(::getpid());
  const std::uint16_t port = spawn_responder("--p 5 --q 29 --n 3", resp_out);

  CmdResult init = run("handshake --role init --addr 127.0.0.1 --port " +
                       std::to_string(port) +
                       " --p 7 --q 31 --n 4 --nonce 0 --seed 1");
  std::remove(resp_out.c_str());
  CHECK(init.exit_code == 4);
  CHECK(init.out.empty());
}

TEST_CASE("attack case 1 prints the golden report") {
  CmdResult r = run("attack --case 1");
  CHECK(r.exit_code == 0);
  CHECK(r.out ==
        "case=I\n"
        "candidate_key_count=1\n"
        "current_session_unique=true\n"
        "next_session_unique_under_fresh_layers=false\n");
}

TEST_CASE("genbox reads the secret from the environment") {
  const std::string cmd = "env DSKE_P=5 DSKE_Q=29 DSKE_N=3 " +
                          std::string(DSKE_CLI_PATH) + " genbox";
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
  CHECK(WEXITSTATUS(pclose(pipe)) == 0);
  CHECK(out == kReferenceDump);
}

TEST_CASE("attack case 2 reports a measured cardinality") {
  CmdResult r = run("attack --case 2 --qmax 31");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.starts_with("case=II\ncandidate_key_count="));
  CHECK(r.out.find("current_session_unique=") != std::string::npos);
}

TEST_CASE("attack case 3 runs each layer variant") {
  CmdResult single = run("attack --case 3 --layer 1");
  REQUIRE(single.exit_code == 0);
  CHECK(single.out.starts_with("case=III_layer1\n"));

  CmdResult all = run("attack --case 3");
  REQUIRE(all.exit_code == 0);
  CHECK(all.out.find("case=III_layer1\n") != std::string::npos);
  CHECK(all.out.find("\ncase=III_layer2\n") != std::string::npos);
  CHECK(all.out.find("\ncase=III_layer3\n") != std::string::npos);
}

TEST_CASE("attack surfaces the search cap as exit 5") {
  CmdResult r = run("attack --case 3 --layer 3 --max-assignments 1");
  CHECK(r.exit_code == 5);
  CHECK(r.err.starts_with("error: "));
}

TEST_CASE("usage errors exit 2") {
  CHECK(run("frobnicate").exit_code == 2);
  CHECK(run("attack --case 4").exit_code == 2);
  CHECK(run("handshake --p 5 --q 29 --n 3").exit_code == 2);
  CHECK(run("genbox --p 5 --q 29").exit_code == 2);
  CHECK(run("attack --case 3 --layer 9").exit_code == 2);
}
