#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace casekit::utf8 {

// Decodes a UTF-8 string into Unicode scalar values. Invalid bytes are
// replaced with U+FFFD, one replacement per offending byte.
std::vector<char32_t> decode(const std::string& s);

std::string encode(const std::vector<char32_t>& cps);
std::string encode_one(char32_t cp);

}  // namespace casekit::utf8
