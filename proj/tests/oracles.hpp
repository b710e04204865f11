// Test-only reference oracles. Everything in here is written straight from
// the box formulas and the attacker model, independent of the library code
// paths it is used to check: naive trial division, naive repeated-multiply
// powmod, exhaustive window scans, exhaustive candidate enumeration. Keep it
// slow and obvious.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Grid = std::array<std::array<std::uint32_t, 6>, 6>;

bool is_prime(std::int64_t x);

// p^e mod q by repeated multiplication.
std::uint32_t pow_mod(std::uint32_t p, std::uint64_t e, std::uint32_t q);

// The six row formulas evaluated cell by cell.
Grid s1_grid(std::uint32_t p, std::uint32_t q, std::uint32_t n);

// Two-character public label of the standard box at (r, c).
std::string s2_label(int r, int c);

bool window_duplicate_free(const Grid& g, int row, int col, int k);

// First duplicate-free k-window origin in rotated row-major order, or nullopt.
std::optional<std::pair<int, int>> first_duplicate_free(const Grid& g, int k,
                                                        int start_index);

// ---- attacker-model oracle ----------------------------------------------

struct AttackInstance {
  // True session facts.
  std::uint32_t p = 0, q = 0, n = 0;
  int k = 3;
  int s1_row = 0, s1_col = 0;   // S1 window origin in the true grid
  int s2_row = 0, s2_col = 0;   // S2 window origin
  std::vector<std::pair<int, int>> observed_cells;  // absolute S2 cells, in order
  // What the attacker is granted.
  bool layer1 = false, layer2 = false, layer3 = false;
  // Parameter search bounds for when layers 1 and 2 are both dark.
  std::int64_t p_max = 0, q_max = 0, n_max = 0;
};

// Exhaustively enumerate every key byte sequence consistent with the granted
// layers and the observed label cells.
std::set<std::vector<std::uint8_t>> enumerate_keys(const AttackInstance& inst);

// All (p, q, n) within bounds whose grid shows the given values at the given
// window origin. window_values is row-major, k*k long.
std::vector<std::array<std::uint32_t, 3>> consistent_params(
    const std::vector<std::uint32_t>& window_values, int k, int origin_row,
    int origin_col, std::int64_t p_max, std::int64_t q_max, std::int64_t n_max);

}  // namespace oracle
