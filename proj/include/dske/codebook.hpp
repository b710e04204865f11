// Positionwise pairing of a duplicate-free S1 window with an S2 window: the
// per-session substitution table. encode maps a secret residue to the public
// label at the same window position, decode inverts it.
#pragma once

#include <cstdint>

#include "dske/sbox.hpp"

namespace dske {

class Codebook {
 public:
  // Requires equal window size and pairwise-distinct s1 values. Throws
  // errc::dimension_mismatch / errc::duplicate_values.
  static Codebook pair(const Window<std::uint32_t>& s1w,
                       const Window<Label>& s2w);

  Label encode(std::uint32_t value) const;   // errc::value_not_in_window
  std::uint32_t decode(Label label) const;   // errc::label_not_in_window

  int k() const { return s1_.k(); }
  const Window<std::uint32_t>& s1_window() const { return s1_; }
  const Window<Label>& s2_window() const { return s2_; }

 private:
  Codebook(Window<std::uint32_t> s1w, Window<Label> s2w);

  Window<std::uint32_t> s1_;
  Window<Label> s2_;
};

}  // namespace dske
