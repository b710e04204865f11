// dske - generate and inspect the boxes, run the handshake over TCP or an
// in-process loopback pair, and run the layered-compromise cases.
//
// Exit codes: 0 ok, 2 usage or parameter error, 3 transport failure,
// 4 protocol failure, 5 search cap exceeded.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <thread>

#include "dske/attack.hpp"
#include "dske/endpoint.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitTransport = 3;
constexpr int kExitProtocol = 4;
constexpr int kExitSearchCap = 5;

int exit_code_for(const dske::Error& e) {
  switch (e.code()) {
    case dske::errc::non_prime_p:
    case dske::errc::non_prime_q:
    case dske::errc::out_of_range:
    case dske::errc::out_of_bounds:
    case dske::errc::invalid_config:
    case dske::errc::bounds_required:
      return kExitUsage;
    case dske::errc::transport:
      return kExitTransport;
    case dske::errc::search_space_too_large:
      return kExitSearchCap;
    default:
      return kExitProtocol;
  }
}

std::uint64_t random_u64() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

struct ParamFlags {
  std::int64_t p = 0, q = 0, n = 0;

  void attach(CLI::App* cmd, bool required) {
    auto* po = cmd->add_option("--p", p, "prime p")->envname("DSKE_P");
    auto* qo = cmd->add_option("--q", q, "prime q, p < q < 2^31")->envname("DSKE_Q");
    auto* no = cmd->add_option("--n", n, "offset n, 1 <= n < q")->envname("DSKE_N");
    if (required) {
      po->required();
      qo->required();
      no->required();
    }
  }

  dske::SecretParams validate() const { return dske::validate_params(p, q, n); }
};

nlohmann::json boxes_as_json(const dske::SBoxS1& s1, const dske::SBoxS2& s2) {
  nlohmann::json j;
  j["format"] = "dske-box";
  j["version"] = 1;
  j["p"] = s1.params.p;
  j["q"] = s1.params.q;
  j["n"] = s1.params.n;
  auto& s1j = j["s1"] = nlohmann::json::array();
  auto& s2j = j["s2"] = nlohmann::json::array();
  for (int r = 0; r < dske::kGridSize; ++r) {
    nlohmann::json row1 = nlohmann::json::array();
    nlohmann::json row2 = nlohmann::json::array();
    for (int c = 0; c < dske::kGridSize; ++c) {
      row1.push_back(s1.cells[r][c]);
      row2.push_back(s2.cells[r][c].str());
    }
    s1j.push_back(row1);
    s2j.push_back(row2);
  }
  return j;
}

int cmd_genbox(const ParamFlags& flags, const std::string& format) {
  const dske::SecretParams params = flags.validate();
  const dske::SBoxS1 s1 = dske::generate_s1(params);
  const dske::SBoxS2 s2 = dske::generate_s2();
  if (format == "vectors")
    std::cout << boxes_as_json(s1, s2).dump() << "\n";
  else
    std::cout << dske::dump_boxes(s1, s2);
  return 0;
}

int cmd_inspect(const ParamFlags& flags, std::optional<std::uint64_t> nonce,
                std::optional<int> requested_k) {
  const dske::SecretParams params = flags.validate();
  const dske::SBoxS1 s1 = dske::generate_s1(params);
  std::cout << dske::dump_boxes(s1, dske::generate_s2());
  if (nonce) {
    const dske::DerivedSelections sel =
        dske::derive_selections(params, *nonce, requested_k);
    std::cout << "k=" << sel.k << "\n";
    std::cout << "s1_sel=" << sel.s1_sel.row << "," << sel.s1_sel.col << "\n";
    std::cout << "s2_sel=" << sel.s2_sel.row << "," << sel.s2_sel.col << "\n";
  }
  return 0;
}

struct HandshakeFlags {
  std::string role;
  std::string addr = "127.0.0.1";
  std::uint16_t port = dske::kDefaultPort;
  int key_len = dske::kDefaultKeyLen;
  std::optional<std::uint64_t> nonce;
  std::optional<std::uint64_t> seed;
  std::optional<int> requested_k;
  bool self_test = false;
};

int cmd_handshake(const ParamFlags& params_flags, const HandshakeFlags& flags) {
  const dske::SecretParams params = params_flags.validate();
  dske::SessionConfig config{params, flags.key_len, flags.requested_k};
  const std::uint64_t nonce = flags.nonce ? *flags.nonce : random_u64();
  const std::uint64_t seed = flags.seed ? *flags.seed : random_u64();

  if (flags.self_test) {
    auto [init_side, resp_side] = dske::socketpair_streams();
    dske::SessionKey responder_key;
    std::exception_ptr responder_failure;
    std::thread responder([&] {
      try {
        responder_key = dske::run_responder(resp_side, config);
      } catch (...) {
        responder_failure = std::current_exception();
      }
    });
    dske::SessionKey initiator_key;
    std::exception_ptr initiator_failure;
    try {
      initiator_key =
          dske::run_initiator(init_side, config, nonce,
                              dske::seeded_index_source(seed));
    } catch (...) {
      initiator_failure = std::current_exception();
    }
    responder.join();
    if (initiator_failure) std::rethrow_exception(initiator_failure);
    if (responder_failure) std::rethrow_exception(responder_failure);
    if (initiator_key != responder_key)
      throw dske::Error(dske::errc::confirm_mismatch,
                        "self-test keys disagree");
    std::cout << dske::to_hex(dske::derive_key_bytes(initiator_key)) << "\n";
    return 0;
  }

  dske::SessionKey key;
  if (flags.role == "init") {
    key = dske::run_initiator(flags.addr, flags.port, config, nonce,
                              dske::seeded_index_source(seed));
  } else {
    dske::TcpListener listener(flags.addr, flags.port);
    std::cerr << "listening " << listener.port() << "\n";
    dske::FdStream stream = listener.accept_one();
    key = dske::run_responder(stream, config);
  }
  std::cout << dske::to_hex(dske::derive_key_bytes(key)) << "\n";
  return 0;
}

struct AttackFlags {
  int case_number = 1;
  std::optional<int> layer;
  std::optional<std::int64_t> p, q, n;
  std::uint64_t nonce = 1;
  std::uint64_t seed = 1;
  int key_len = dske::kDefaultKeyLen;
  int requested_k = 3;
  std::int64_t p_max = 31, q_max = 31, n_max = 5;
  std::uint64_t max_assignments = 10'000'000;
  bool fresh_demo = false;
  bool no_fresh_demo = false;
};

int cmd_attack(const AttackFlags& flags) {
  dske::CaseScenario scenario;
  scenario.params = dske::validate_params(flags.p.value_or(5),
                                          flags.q.value_or(29),
                                          flags.n.value_or(3));
  scenario.nonce = flags.nonce;
  scenario.seed = flags.seed;
  scenario.key_len = flags.key_len;
  scenario.requested_k = flags.requested_k;
  scenario.bounds = dske::ParamBounds{flags.p_max, flags.q_max, flags.n_max};
  scenario.max_assignments = flags.max_assignments;

  std::vector<dske::CaseId> cases;
  switch (flags.case_number) {
    case 1: cases = {dske::CaseId::case1}; break;
    case 2: cases = {dske::CaseId::case2}; break;
    case 3:
      if (flags.layer) {
        switch (*flags.layer) {
          case 1: cases = {dske::CaseId::case3_layer1}; break;
          case 2: cases = {dske::CaseId::case3_layer2}; break;
          case 3: cases = {dske::CaseId::case3_layer3}; break;
          default:
            throw dske::Error(dske::errc::invalid_config, "layer must be 1, 2 or 3");
        }
      } else {
        cases = {dske::CaseId::case3_layer1, dske::CaseId::case3_layer2,
                 dske::CaseId::case3_layer3};
      }
      break;
    default:
      throw dske::Error(dske::errc::invalid_config, "case must be 1, 2 or 3");
  }

  const bool demo = flags.fresh_demo ||
                    (!flags.no_fresh_demo && flags.case_number == 1);
  bool first = true;
  for (dske::CaseId id : cases) {
    if (!first) std::cout << "\n";
    first = false;
    std::cout << dske::to_text(dske::case_report(id, demo, scenario));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DSKE session key exchange tool"};
  app.require_subcommand(1);

  // genbox
  auto* genbox = app.add_subcommand("genbox", "generate the S1/S2 boxes");
  ParamFlags genbox_params;
  genbox_params.attach(genbox, true);
  std::string format = "text";
  genbox->add_option("--format", format, "text or vectors")
      ->check(CLI::IsMember({"text", "vectors"}));

  // inspect
  auto* inspect = app.add_subcommand("inspect", "dump boxes and per-nonce selections");
  ParamFlags inspect_params;
  inspect_params.attach(inspect, true);
  std::optional<std::uint64_t> inspect_nonce;
  std::optional<int> inspect_k;
  inspect->add_option("--nonce", inspect_nonce, "show selections for this nonce");
  inspect->add_option("--k", inspect_k, "window size 3, 4 or 5");

  // handshake
  auto* handshake = app.add_subcommand("handshake", "run one key exchange session");
  ParamFlags handshake_params;
  handshake_params.attach(handshake, true);
  HandshakeFlags hs;
  handshake->add_option("--role", hs.role, "init or resp")
      ->check(CLI::IsMember({"init", "resp"}));
  handshake->add_option("--addr", hs.addr, "peer or bind address");
  handshake->add_option("--port", hs.port, "TCP port");
  handshake->add_option("--key-len", hs.key_len, "session key symbols, 1..64");
  handshake->add_option("--nonce", hs.nonce, "fixed session nonce");
  handshake->add_option("--seed", hs.seed, "fixed key-symbol seed");
  handshake->add_option("--k", hs.requested_k, "window size 3, 4 or 5");
  handshake->add_flag("--self-test", hs.self_test,
                      "run initiator and responder over an internal pair");

  // attack
  auto* attack = app.add_subcommand("attack", "run a layered-compromise case");
  AttackFlags at;
  attack->add_option("--case", at.case_number, "1, 2 or 3")->required();
  attack->add_option("--layer", at.layer, "single broken layer for case 3");
  attack->add_option("--p", at.p, "prime p of the scripted session")->envname("DSKE_P");
  attack->add_option("--q", at.q, "prime q of the scripted session")->envname("DSKE_Q");
  attack->add_option("--n", at.n, "offset n of the scripted session")->envname("DSKE_N");
  attack->add_option("--nonce", at.nonce, "scripted session nonce");
  attack->add_option("--seed", at.seed, "scripted session seed");
  attack->add_option("--key-len", at.key_len, "session key symbols");
  attack->add_option("--k", at.requested_k, "window size 3, 4 or 5");
  attack->add_option("--pmax", at.p_max, "parameter search bound for p");
  attack->add_option("--qmax", at.q_max, "parameter search bound for q");
  attack->add_option("--nmax", at.n_max, "parameter search bound for n");
  attack->add_option("--max-assignments", at.max_assignments,
                     "enumeration cap before SearchSpaceTooLarge");
  attack->add_flag("--fresh-demo", at.fresh_demo,
                   "also measure a fresh-nonce follow-up session");
  attack->add_flag("--no-fresh-demo", at.no_fresh_demo,
                   "skip the follow-up measurement");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (genbox->parsed()) return cmd_genbox(genbox_params, format);
    if (inspect->parsed()) return cmd_inspect(inspect_params, inspect_nonce, inspect_k);
    if (handshake->parsed()) {
      if (!hs.self_test && hs.role.empty()) {
        std::cerr << "error: --role is required unless --self-test is set\n";
        return kExitUsage;
      }
      return cmd_handshake(handshake_params, hs);
    }
    if (attack->parsed()) return cmd_attack(at);
  } catch (const dske::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
