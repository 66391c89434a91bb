#pragma once

#include <string>
#include <string_view>

namespace clwe {

// Unicode simple lowercase mapping applied code point by code point.
// Invalid UTF-8 bytes are copied through unchanged.
std::string utf8_lowercase(std::string_view text);

}  // namespace clwe
