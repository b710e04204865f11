// Shared helpers for the endpoint / acceptance suites: loopback session
// drivers and the wire-hygiene predicate.
#pragma once

#include <thread>

#include "dske/attack.hpp"
#include "dske/endpoint.hpp"

namespace harness {

struct LoopbackResult {
  dske::SessionKey initiator_key;
  dske::SessionKey responder_key;
  dske::SessionTranscript initiator_tap;
  dske::SessionTranscript responder_tap;
};

// Runs one session over an in-process socket pair.
inline LoopbackResult run_loopback(const dske::SessionConfig& config,
                                   std::uint64_t nonce, std::uint64_t seed) {
  auto [init_side, resp_side] = dske::socketpair_streams();
  LoopbackResult result;
  std::exception_ptr responder_failure;
  std::thread responder([&] {
    try {
      result.responder_key =
          dske::run_responder(resp_side, config, &result.responder_tap);
    } catch (...) {
      responder_failure = std::current_exception();
    }
  });
  std::exception_ptr initiator_failure;
  try {
    result.initiator_key =
        dske::run_initiator(init_side, config, nonce,
                            dske::seeded_index_source(seed),
                            &result.initiator_tap);
  } catch (...) {
    initiator_failure = std::current_exception();
  }
  responder.join();
  if (initiator_failure) std::rethrow_exception(initiator_failure);
  if (responder_failure) std::rethrow_exception(responder_failure);
  return result;
}

// Every payload byte of a successful session must be a nonce byte, the key
// length byte, or an ASCII byte of a standard S2 label; only Hello, Labels
// and Confirm frames may appear at all.
inline bool transcript_is_clean(const dske::SessionTranscript& transcript) {
  for (const dske::WireFrame& frame : transcript.frames) {
    switch (frame.type) {
      case dske::FrameType::hello:
        if (frame.payload.size() != 9) return false;
        break;  // eight nonce bytes plus the key length; any values
      case dske::FrameType::labels:
      case dske::FrameType::confirm: {
        if (frame.payload.size() % 2 != 0) return false;
        for (std::size_t i = 0; i < frame.payload.size(); i += 2) {
          dske::Label l{static_cast<char>(frame.payload[i]),
                        static_cast<char>(frame.payload[i + 1])};
          if (!dske::is_standard_label(l)) return false;
        }
        break;
      }
      default:
        return false;
    }
  }
  return true;
}

inline std::vector<std::uint8_t> transcript_bytes(
    const dske::SessionTranscript& transcript) {
  std::vector<std::uint8_t> out;
  for (const dske::WireFrame& frame : transcript.frames) {
    const auto encoded = dske::encode_frame(frame);
    out.insert(out.end(), encoded.begin(), encoded.end());
  }
  return out;
}

}  // namespace harness
