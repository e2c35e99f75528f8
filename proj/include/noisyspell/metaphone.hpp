#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace noisyspell {

inline constexpr std::size_t kDefaultMetaphoneLength = 4;

/// Primary Double Metaphone code of a Latin-script word. Non-letters are
/// ignored; the code is truncated to `max_length` characters.
std::string double_metaphone(std::string_view latin, std::size_t max_length = kDefaultMetaphoneLength);

} // namespace noisyspell
