#pragma once

#include <stdexcept>
#include <string>

namespace dske {

// One exception type for the whole library; the code tells callers (and the
// CLI exit-code mapping) which contract was violated.
enum class errc {
  // parameter validation
  non_prime_p,
  non_prime_q,
  out_of_range,
  // boxes and windows
  out_of_bounds,
  no_duplicate_free_window,
  // codebook
  dimension_mismatch,
  duplicate_values,
  value_not_in_window,
  label_not_in_window,
  // session state machine
  invalid_phase,
  invalid_config,
  confirm_mismatch,
  // wire codec
  payload_too_large,
  malformed_payload,
  bad_magic,
  unsupported_version,
  truncated,
  unknown_type,
  // endpoints
  transport,
  peer_error,
  // attack analysis
  bounds_required,
  search_space_too_large,
  malformed_transcript,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

}  // namespace dske
