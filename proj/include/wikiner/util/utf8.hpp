#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace wikiner::util {

// Splits `text` into code points, each kept as its UTF-8 byte sequence.
// Invalid lead/continuation bytes are emitted as single-byte units.
std::vector<std::string_view> utf8_chars(std::string_view text);

// Decodes %XX escapes; malformed escapes are copied literally.
std::string percent_decode(std::string_view text);

// Trims ASCII whitespace and collapses internal runs to one space.
std::string collapse_whitespace(std::string_view text);

}  // namespace wikiner::util
