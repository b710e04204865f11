// Per-session state machine. Both sides derive the layer-2/layer-3 window
// selections deterministically from the shared secret and a public nonce, so
// no selection data ever crosses the wire. The initiator transfers the
// session key as a sequence of public labels; the responder confirms by
// echoing the label list reversed.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "dske/codebook.hpp"
#include "dske/sbox.hpp"

namespace dske {

inline constexpr int kMaxKeyLen = 64;
inline constexpr int kDefaultKeyLen = 8;

struct SessionConfig {
  SecretParams params;
  int key_len = kDefaultKeyLen;      // symbols transferred, 1..64
  std::optional<int> requested_k;    // window size; derived from t when unset
};

enum class Role { initiator, responder };
enum class Phase { hello, key_sent, confirmed, failed };

struct DerivedSelections {
  SubBoxSelection s1_sel;
  SubBoxSelection s2_sel;
  int k = kMinWindow;

  bool operator==(const DerivedSelections&) const = default;
};

// Deterministic on both sides: t = p^((nonce mod (q-1)) + n) mod q picks the
// window size (when not requested), the S1 scan start and the S2 origin. If
// no duplicate-free S1 window exists at k, retries k-1 down to 3 before
// throwing errc::no_duplicate_free_window.
DerivedSelections derive_selections(const SecretParams& params,
                                    std::uint64_t nonce,
                                    std::optional<int> requested_k = {});

struct SessionKey {
  std::vector<std::uint32_t> residues;

  bool operator==(const SessionKey&) const = default;
};

// Each residue as a 4-byte big-endian word, concatenated.
std::vector<std::uint8_t> derive_key_bytes(const SessionKey& key);

// Source of uniform indices in [0, upper); injected so tests and the CLI
// --seed flag can fix the key symbols.
using IndexSource = std::function<std::size_t(std::size_t upper)>;

IndexSource seeded_index_source(std::uint64_t seed);

class SessionState {
 public:
  SessionState(Role role, const SessionConfig& config, std::uint64_t nonce);

  // Initiator, phase hello: draws key_len window positions (with
  // replacement), returns their labels and records the residues as the key.
  // Advances to key_sent.
  std::vector<Label> pick_key(const IndexSource& draw);

  // Responder, phase hello: decodes the received labels into the key and
  // returns the confirmation (the label list reversed). Advances to
  // confirmed; a label outside the window fails the session.
  std::vector<Label> receive(const std::vector<Label>& labels);

  // Initiator, phase key_sent: true iff confirm is the sent label list
  // reversed. Advances to confirmed on success, failed otherwise.
  bool verify_confirm(const std::vector<Label>& confirm);

  Role role() const { return role_; }
  std::uint64_t nonce() const { return nonce_; }
  Phase phase() const { return phase_; }
  const DerivedSelections& selections() const { return selections_; }
  const Codebook& codebook() const { return codebook_; }
  const SessionKey& key() const { return key_; }
  int key_len() const { return config_.key_len; }
  const std::vector<Label>& sent_labels() const { return sent_labels_; }

  void fail() { phase_ = Phase::failed; }

 private:
  Role role_;
  SessionConfig config_;
  std::uint64_t nonce_;
  DerivedSelections selections_;
  Codebook codebook_;
  Phase phase_ = Phase::hello;
  std::vector<Label> sent_labels_;
  SessionKey key_;
};

}  // namespace dske
