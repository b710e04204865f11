#include "dske/codebook.hpp"

#include <algorithm>
#include <utility>

namespace dske {

Codebook::Codebook(Window<std::uint32_t> s1w, Window<Label> s2w)
    : s1_(std::move(s1w)), s2_(std::move(s2w)) {}

Codebook Codebook::pair(const Window<std::uint32_t>& s1w,
                        const Window<Label>& s2w) {
  if (s1w.k() != s2w.k())
    throw Error(errc::dimension_mismatch, "window sizes differ");
  if (!is_duplicate_free(s1w))
    throw Error(errc::duplicate_values, "s1 window has a repeated residue");
  return Codebook(s1w, s2w);
}

Label Codebook::encode(std::uint32_t value) const {
  auto it = std::find(s1_.values.begin(), s1_.values.end(), value);
  if (it == s1_.values.end())
    throw Error(errc::value_not_in_window,
                "value " + std::to_string(value) + " not in the s1 window");
  return s2_.values[static_cast<std::size_t>(it - s1_.values.begin())];
}

std::uint32_t Codebook::decode(Label label) const {
  auto it = std::find(s2_.values.begin(), s2_.values.end(), label);
  if (it == s2_.values.end())
    throw Error(errc::label_not_in_window,
                "label " + label.str() + " not in the s2 window");
  return s1_.values[static_cast<std::size_t>(it - s2_.values.begin())];
}

}  // namespace dske
