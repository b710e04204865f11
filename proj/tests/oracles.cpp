#include "oracles.hpp"

#include <algorithm>

namespace oracle {

bool is_prime(std::int64_t x) {
  if (x < 2) return false;
  for (std::int64_t d = 2; d * d <= x; ++d) {
    if (x % d == 0) return false;
  }
  return true;
}

std::uint32_t pow_mod(std::uint32_t p, std::uint64_t e, std::uint32_t q) {
  std::uint64_t acc = 1 % q;
  for (std::uint64_t i = 0; i < e; ++i) acc = (acc * p) % q;
  return static_cast<std::uint32_t>(acc);
}

static std::uint32_t reduce(std::int64_t v, std::uint32_t q) {
  std::int64_t r = v % static_cast<std::int64_t>(q);
  if (r < 0) r += q;
  return static_cast<std::uint32_t>(r);
}

Grid s1_grid(std::uint32_t p, std::uint32_t q, std::uint32_t n) {
  Grid g{};
  for (int c = 0; c < 6; ++c) {
    std::int64_t P = p, N = n;
    g[0][c] = (c == 0) ? reduce(P, q) : pow_mod(p, n + c - 1, q);
    g[1][c] = reduce(P - (c + 1) * N, q);
    g[2][c] = reduce(P + (c + 1) * N, q);
    g[3][c] = reduce(P * (c + 2) - N, q);
    g[4][c] = reduce(P + (c + 2) - N, q);
    g[5][c] = reduce(P * (c + 2) + N, q);
  }
  return g;
}

std::string s2_label(int r, int c) {
  int v = r + c + 1;
  char d = v < 10 ? static_cast<char>('0' + v) : static_cast<char>('a' + v - 10);
  return std::string{d, static_cast<char>('a' + r)};
}

bool window_duplicate_free(const Grid& g, int row, int col, int k) {
  std::set<std::uint32_t> seen;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) seen.insert(g[row + i][col + j]);
  return static_cast<int>(seen.size()) == k * k;
}

std::optional<std::pair<int, int>> first_duplicate_free(const Grid& g, int k,
                                                        int start_index) {
  int m = 6 - k + 1;
  for (int off = 0; off < m * m; ++off) {
    int idx = (start_index + off) % (m * m);
    int r = idx / m, c = idx % m;
    if (window_duplicate_free(g, r, c, k)) return std::make_pair(r, c);
  }
  return std::nullopt;
}

// ---- attacker-model oracle ----------------------------------------------

static void append_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

// Key bytes produced by one (window values, S2 origin) hypothesis.
static std::vector<std::uint8_t> key_for(
    const std::vector<std::uint32_t>& window, int k, int orow, int ocol,
    const std::vector<std::pair<int, int>>& cells) {
  std::vector<std::uint8_t> bytes;
  for (auto [r, c] : cells) append_be32(bytes, window[(r - orow) * k + (c - ocol)]);
  return bytes;
}

static bool origin_contains_all(int orow, int ocol, int k,
                                const std::vector<std::pair<int, int>>& cells) {
  for (auto [r, c] : cells) {
    if (r < orow || r >= orow + k || c < ocol || c >= ocol + k) return false;
  }
  return true;
}

static std::vector<std::uint32_t> window_values(const Grid& g, int row, int col,
                                                int k) {
  std::vector<std::uint32_t> w;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) w.push_back(g[row + i][col + j]);
  return w;
}

std::set<std::vector<std::uint8_t>> enumerate_keys(const AttackInstance& inst) {
  const int k = inst.k;
  const int m = 6 - k + 1;

  // Candidate S2 origins.
  std::vector<std::pair<int, int>> origins;
  if (inst.layer3) {
    origins.emplace_back(inst.s2_row, inst.s2_col);
  } else {
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c)
        if (origin_contains_all(r, c, k, inst.observed_cells))
          origins.emplace_back(r, c);
  }

  // Candidate S1 window value sets.
  std::vector<std::vector<std::uint32_t>> windows;
  if (inst.layer2) {
    Grid g = s1_grid(inst.p, inst.q, inst.n);
    windows.push_back(window_values(g, inst.s1_row, inst.s1_col, k));
  } else if (inst.layer1) {
    Grid g = s1_grid(inst.p, inst.q, inst.n);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c)
        if (window_duplicate_free(g, r, c, k))
          windows.push_back(window_values(g, r, c, k));
  } else {
    for (std::int64_t q = 3; q <= inst.q_max; ++q) {
      if (!is_prime(q)) continue;
      for (std::int64_t p = 2; p < q && p <= inst.p_max; ++p) {
        if (!is_prime(p)) continue;
        for (std::int64_t n = 1; n <= inst.n_max && n < q; ++n) {
          Grid g = s1_grid(static_cast<std::uint32_t>(p),
                           static_cast<std::uint32_t>(q),
                           static_cast<std::uint32_t>(n));
          for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c)
              if (window_duplicate_free(g, r, c, k))
                windows.push_back(window_values(g, r, c, k));
        }
      }
    }
  }

  std::set<std::vector<std::uint8_t>> keys;
  for (const auto& w : windows)
    for (auto [orow, ocol] : origins)
      keys.insert(key_for(w, k, orow, ocol, inst.observed_cells));
  return keys;
}

std::vector<std::array<std::uint32_t, 3>> consistent_params(
    const std::vector<std::uint32_t>& window_vals, int k, int origin_row,
    int origin_col, std::int64_t p_max, std::int64_t q_max,
    std::int64_t n_max) {
  std::vector<std::array<std::uint32_t, 3>> out;
  for (std::int64_t q = 3; q <= q_max; ++q) {
    if (!is_prime(q)) continue;
    for (std::int64_t p = 2; p < q && p <= p_max; ++p) {
      if (!is_prime(p)) continue;
      for (std::int64_t n = 1; n <= n_max && n < q; ++n) {
        Grid g = s1_grid(static_cast<std::uint32_t>(p),
                         static_cast<std::uint32_t>(q),
                         static_cast<std::uint32_t>(n));
        if (window_values(g, origin_row, origin_col, k) == window_vals)
          out.push_back({static_cast<std::uint32_t>(p),
                         static_cast<std::uint32_t>(q),
                         static_cast<std::uint32_t>(n)});
      }
    }
  }
  return out;
}

}  // namespace oracle
