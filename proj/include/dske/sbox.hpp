// Secret S1 box, public S2 label box, and duplicate-free sub-box windows.
//
// S1 is a 6x6 grid of residues mod q generated from the long-term secret
// (p, q, n): row 0 is a modular power ladder, rows 1-5 are affine in n and p.
// S2 is a fixed 6x6 grid of two-character public labels. A session works on a
// k x k window of each (k in {3,4,5}); the S1 window must be duplicate-free
// so that value -> label substitution is a bijection.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dske/error.hpp"

namespace dske {

inline constexpr int kGridSize = 6;
inline constexpr int kMinWindow = 3;
inline constexpr int kMaxWindow = 5;

// Long-term layer-1 secret. Construct through validate_params.
struct SecretParams {
  std::uint32_t p = 0;
  std::uint32_t q = 0;
  std::uint32_t n = 0;

  bool operator==(const SecretParams&) const = default;
};

// Deterministic primality check by trial division; exact for the full
// admissible range (q < 2^31).
bool is_prime(std::int64_t x);

// Modular exponentiation, square-and-multiply. mod must be nonzero and
// < 2^32 so intermediates fit in 64 bits.
std::uint32_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint32_t mod);

// Checks p, q prime, 1 < p < q < 2^31, 1 <= n < q. Throws Error with
// errc::non_prime_p / non_prime_q / out_of_range.
SecretParams validate_params(std::int64_t p, std::int64_t q, std::int64_t n);

// Two-character public label: a digit/hex character followed by a lowercase
// letter. Holds arbitrary characters so unknown labels can travel to the
// lookup that rejects them.
struct Label {
  char first = 0;
  char second = 0;

  std::string str() const { return {first, second}; }
  auto operator<=>(const Label&) const = default;
};

Label label_from(std::string_view two_chars);  // throws on length != 2

// True iff the label is one of the 36 cells of the standard S2 box.
bool is_standard_label(Label l);

// Absolute S2 cell (row, col) of a label; nullopt if not a standard label.
// Labels are globally unique, so this is a full inverse.
std::optional<std::pair<int, int>> s2_cell_of(Label l);

// Origin and size of a k x k sub-box window.
struct SubBoxSelection {
  int row = 0;
  int col = 0;
  int k = kMinWindow;

  bool operator==(const SubBoxSelection&) const = default;
};

// k x k copy of a parent box region, row-major.
template <typename Cell>
struct Window {
  SubBoxSelection origin;
  std::vector<Cell> values;  // origin.k * origin.k entries

  int k() const { return origin.k; }
  const Cell& at(int i, int j) const { return values[i * origin.k + j]; }

  bool operator==(const Window&) const = default;
};

struct SBoxS1 {
  std::array<std::array<std::uint32_t, kGridSize>, kGridSize> cells{};
  SecretParams params;
};

struct SBoxS2 {
  std::array<std::array<Label, kGridSize>, kGridSize> cells{};
};

// Fills the 36 cells from the row formulas; every cell is the least
// non-negative residue mod q.
SBoxS1 generate_s1(const SecretParams& params);

// The fixed public label box: cell (r, c) is the character for r+c+1
// followed by the r-th letter.
SBoxS2 generate_s2();

Window<std::uint32_t> extract_window(const SBoxS1& box, SubBoxSelection sel);
Window<Label> extract_window(const SBoxS2& box, SubBoxSelection sel);

// True iff all k^2 residues are pairwise distinct.
bool is_duplicate_free(const Window<std::uint32_t>& w);

// Scans window origins in row-major order starting at start_index, wrapping
// modulo m^2 (m = 6-k+1), and returns the first duplicate-free origin.
// Throws errc::no_duplicate_free_window if every window repeats.
SubBoxSelection find_duplicate_free_selection(const SBoxS1& box, int k,
                                              int start_index);

// Text dump used by the CLI: header line "DSKE-BOX v1 q=<q>", six lines of
// residues, six lines of labels.
std::string dump_boxes(const SBoxS1& s1, const SBoxS2& s2);

}  // namespace dske
