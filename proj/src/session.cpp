#include "dske/session.hpp"

#include <algorithm>
#include <memory>
#include <random>

namespace dske {

DerivedSelections derive_selections(const SecretParams& params,
                                    std::uint64_t nonce,
                                    std::optional<int> requested_k) {
  if (requested_k && (*requested_k < kMinWindow || *requested_k > kMaxWindow))
    throw Error(errc::invalid_config, "requested window size must be 3, 4 or 5");

  const std::uint64_t exponent = nonce % (params.q - 1) + params.n;
  const std::uint32_t t = mod_pow(params.p, exponent, params.q);
  const int first_k = requested_k ? *requested_k : kMinWindow + t % 3;

  const SBoxS1 s1 = generate_s1(params);
  for (int k = first_k; k >= kMinWindow; --k) {
    const int m = kGridSize - k + 1;
    const int cells = m * m;
    try {
      DerivedSelections out;
      out.k = k;
      out.s1_sel = find_duplicate_free_selection(s1, k, static_cast<int>(t % cells));
      const int s2_index = static_cast<int>((t + params.n) % cells);
      out.s2_sel = SubBoxSelection{s2_index / m, s2_index % m, k};
      return out;
    } catch (const Error& e) {
      if (e.code() != errc::no_duplicate_free_window || k == kMinWindow) throw;
    }
  }
  throw Error(errc::no_duplicate_free_window, "no duplicate-free window");
}

std::vector<std::uint8_t> derive_key_bytes(const SessionKey& key) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(key.residues.size() * 4);
  for (std::uint32_t v : key.residues) {
    bytes.push_back(static_cast<std::uint8_t>(v >> 24));
    bytes.push_back(static_cast<std::uint8_t>(v >> 16));
    bytes.push_back(static_cast<std::uint8_t>(v >> 8));
    bytes.push_back(static_cast<std::uint8_t>(v));
  }
  return bytes;
}

IndexSource seeded_index_source(std::uint64_t seed) {
  auto engine = std::make_shared<std::mt19937_64>(seed);
  return [engine](std::size_t upper) -> std::size_t {
    return static_cast<std::size_t>((*engine)() % upper);
  };
}

static Codebook build_codebook(const SecretParams& params,
                               const DerivedSelections& sel) {
  const SBoxS1 s1 = generate_s1(params);
  const SBoxS2 s2 = generate_s2();
  return Codebook::pair(extract_window(s1, sel.s1_sel),
                        extract_window(s2, sel.s2_sel));
}

static const SessionConfig& checked_config(const SessionConfig& config) {
  if (config.key_len < 1 || config.key_len > kMaxKeyLen)
    throw Error(errc::invalid_config, "key length must be in [1, 64]");
  return config;
}

SessionState::SessionState(Role role, const SessionConfig& config,
                           std::uint64_t nonce)
    : role_(role),
      config_(checked_config(config)),
      nonce_(nonce),
      selections_(derive_selections(config.params, nonce, config.requested_k)),
      codebook_(build_codebook(config.params, selections_)) {}

std::vector<Label> SessionState::pick_key(const IndexSource& draw) {
  if (role_ != Role::initiator || phase_ != Phase::hello)
    throw Error(errc::invalid_phase, "pick_key requires an initiator in hello");
  const std::size_t cells =
      static_cast<std::size_t>(selections_.k) * selections_.k;
  std::vector<Label> labels;
  labels.reserve(static_cast<std::size_t>(config_.key_len));
  key_.residues.clear();
  for (int i = 0; i < config_.key_len; ++i) {
    const std::size_t pos = draw(cells);
    const std::uint32_t value = codebook_.s1_window().values.at(pos);
    key_.residues.push_back(value);
    labels.push_back(codebook_.s2_window().values.at(pos));
  }
  sent_labels_ = labels;
  phase_ = Phase::key_sent;
  return labels;
}

std::vector<Label> SessionState::receive(const std::vector<Label>& labels) {
  if (role_ != Role::responder || phase_ != Phase::hello)
    throw Error(errc::invalid_phase, "receive requires a responder in hello");
  if (labels.empty()) {
    phase_ = Phase::failed;
    throw Error(errc::malformed_payload, "empty label sequence");
  }
  key_.residues.clear();
  for (Label l : labels) {
    try {
      key_.residues.push_back(codebook_.decode(l));
    } catch (const Error&) {
      phase_ = Phase::failed;
      throw;
    }
  }
  std::vector<Label> confirm(labels.rbegin(), labels.rend());
  phase_ = Phase::confirmed;
  return confirm;
}

bool SessionState::verify_confirm(const std::vector<Label>& confirm) {
  if (role_ != Role::initiator || phase_ != Phase::key_sent)
    throw Error(errc::invalid_phase,
                "verify_confirm requires an initiator in key_sent");
  const bool ok =
      confirm.size() == sent_labels_.size() &&
      std::equal(confirm.begin(), confirm.end(), sent_labels_.rbegin());
  phase_ = ok ? Phase::confirmed : Phase::failed;
  return ok;
}

}  // namespace dske
