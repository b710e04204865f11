#include "dske/sbox.hpp"

#include <set>
#include <sstream>

namespace dske {

bool is_prime(std::int64_t x) {
  if (x < 2) return false;
  if (x < 4) return true;
  if (x % 2 == 0) return false;
  for (std::int64_t d = 3; d * d <= x; d += 2) {
    if (x % d == 0) return false;
  }
  return true;
}

std::uint32_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint32_t mod) {
  std::uint64_t result = 1 % mod;
  base %= mod;
  while (exp > 0) {
    if (exp & 1) result = (result * base) % mod;
    base = (base * base) % mod;
    exp >>= 1;
  }
  return static_cast<std::uint32_t>(result);
}

SecretParams validate_params(std::int64_t p, std::int64_t q, std::int64_t n) {
  if (q >= (std::int64_t{1} << 31))
    throw Error(errc::out_of_range, "q must be below 2^31");
  if (!is_prime(p)) throw Error(errc::non_prime_p, "p is not prime");
  if (!is_prime(q)) throw Error(errc::non_prime_q, "q is not prime");
  if (p >= q) throw Error(errc::out_of_range, "p must be less than q");
  if (n < 1 || n >= q)
    throw Error(errc::out_of_range, "n must satisfy 1 <= n < q");
  return SecretParams{static_cast<std::uint32_t>(p),
                      static_cast<std::uint32_t>(q),
                      static_cast<std::uint32_t>(n)};
}

Label label_from(std::string_view two_chars) {
  if (two_chars.size() != 2)
    throw Error(errc::label_not_in_window, "label must be two characters");
  return Label{two_chars[0], two_chars[1]};
}

static char digit_char(int v) {
  return v < 10 ? static_cast<char>('0' + v) : static_cast<char>('a' + v - 10);
}

bool is_standard_label(Label l) { return s2_cell_of(l).has_value(); }

std::optional<std::pair<int, int>> s2_cell_of(Label l) {
  if (l.second < 'a' || l.second > 'f') return std::nullopt;
  int r = l.second - 'a';
  int v;  // the r+c+1 value encoded by the first character
  if (l.first >= '1' && l.first <= '9')
    v = l.first - '0';
  else if (l.first == 'a' || l.first == 'b')
    v = 10 + (l.first - 'a');
  else
    return std::nullopt;
  int c = v - 1 - r;
  if (c < 0 || c >= kGridSize) return std::nullopt;
  return std::make_pair(r, c);
}

static std::uint32_t reduce(std::int64_t v, std::uint32_t q) {
  std::int64_t r = v % static_cast<std::int64_t>(q);
  if (r < 0) r += q;
  return static_cast<std::uint32_t>(r);
}

SBoxS1 generate_s1(const SecretParams& params) {
  const std::int64_t p = params.p;
  const std::int64_t n = params.n;
  const std::uint32_t q = params.q;
  SBoxS1 box;
  box.params = params;
  for (int c = 0; c < kGridSize; ++c) {
    box.cells[0][c] = (c == 0) ? reduce(p, q)
                               : mod_pow(params.p, params.n + c - 1, q);
    box.cells[1][c] = reduce(p - (c + 1) * n, q);
    box.cells[2][c] = reduce(p + (c + 1) * n, q);
    box.cells[3][c] = reduce(p * (c + 2) - n, q);
    box.cells[4][c] = reduce(p + (c + 2) - n, q);
    box.cells[5][c] = reduce(p * (c + 2) + n, q);
  }
  return box;
}

SBoxS2 generate_s2() {
  SBoxS2 box;
  for (int r = 0; r < kGridSize; ++r)
    for (int c = 0; c < kGridSize; ++c)
      box.cells[r][c] = Label{digit_char(r + c + 1),
                              static_cast<char>('a' + r)};
  return box;
}

static void check_selection(SubBoxSelection sel) {
  if (sel.k < kMinWindow || sel.k > kMaxWindow || sel.row < 0 || sel.col < 0 ||
      sel.row + sel.k > kGridSize || sel.col + sel.k > kGridSize)
    throw Error(errc::out_of_bounds, "window selection out of bounds");
}

template <typename Box, typename Cell>
static Window<Cell> extract(const Box& box, SubBoxSelection sel) {
  check_selection(sel);
  Window<Cell> w;
  w.origin = sel;
  w.values.reserve(static_cast<std::size_t>(sel.k) * sel.k);
  for (int i = 0; i < sel.k; ++i)
    for (int j = 0; j < sel.k; ++j)
      w.values.push_back(box.cells[sel.row + i][sel.col + j]);
  return w;
}

Window<std::uint32_t> extract_window(const SBoxS1& box, SubBoxSelection sel) {
  return extract<SBoxS1, std::uint32_t>(box, sel);
}

Window<Label> extract_window(const SBoxS2& box, SubBoxSelection sel) {
  return extract<SBoxS2, Label>(box, sel);
}

bool is_duplicate_free(const Window<std::uint32_t>& w) {
  std::set<std::uint32_t> seen(w.values.begin(), w.values.end());
  return seen.size() == w.values.size();
}

SubBoxSelection find_duplicate_free_selection(const SBoxS1& box, int k,
                                              int start_index) {
  if (k < kMinWindow || k > kMaxWindow)
    throw Error(errc::out_of_bounds, "window size must be 3, 4 or 5");
  const int m = kGridSize - k + 1;
  if (start_index < 0 || start_index >= m * m)
    throw Error(errc::out_of_bounds, "start index outside [0, m^2)");
  for (int off = 0; off < m * m; ++off) {
    int idx = (start_index + off) % (m * m);
    SubBoxSelection sel{idx / m, idx % m, k};
    if (is_duplicate_free(extract_window(box, sel))) return sel;
  }
  throw Error(errc::no_duplicate_free_window,
              "every " + std::to_string(k) + "x" + std::to_string(k) +
                  " window contains a repeated residue");
}

std::string dump_boxes(const SBoxS1& s1, const SBoxS2& s2) {
  std::ostringstream out;
  out << "DSKE-BOX v1 q=" << s1.params.q << "\n";
  for (int r = 0; r < kGridSize; ++r) {
    for (int c = 0; c < kGridSize; ++c)
      out << (c ? " " : "") << s1.cells[r][c];
    out << "\n";
  }
  for (int r = 0; r < kGridSize; ++r) {
    for (int c = 0; c < kGridSize; ++c)
      out << (c ? " " : "") << s2.cells[r][c].str();
    out << "\n";
  }
  return out.str();
}

}  // namespace dske
