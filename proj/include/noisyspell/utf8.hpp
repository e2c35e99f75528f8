#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace noisyspell {

/// Thrown when input bytes are not valid UTF-8. `offset()` is the byte
/// position of the first offending byte, counted from the start of the
/// decoded buffer (or stream, for streaming readers).
class Utf8Error : public std::runtime_error {
public:
    Utf8Error(std::size_t offset, const std::string& what)
        : std::runtime_error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Decodes UTF-8 into code points. `base_offset` is added to any reported
/// error position so streaming callers can report absolute offsets.
std::u32string decode_utf8(std::string_view bytes, std::size_t base_offset = 0);

std::string encode_utf8(std::u32string_view cps);
std::string encode_utf8(char32_t cp);

/// Number of code points; assumes valid input.
std::size_t utf8_length(std::string_view bytes);

} // namespace noisyspell
