#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sqlfix {

// FNV-1a, the fingerprint hash used for canonical SQL text and prompt
// fingerprints. Fixed constants, stable across platforms.
uint64_t fnv1a(std::string_view data, uint64_t seed = 14695981039346656037ull);
std::string fnv1a_hex(std::string_view data);

std::string base64_encode(const uint8_t* data, size_t len);
std::vector<uint8_t> base64_decode(std::string_view text);

std::string to_lower_ascii(std::string_view s);
std::string to_upper_ascii(std::string_view s);

std::string trim(std::string_view s);

// Splits on '\n'; a trailing newline does not produce an empty last element.
std::vector<std::string> split_lines(std::string_view text);

std::string read_file(const std::string& path);              // throws IoError
void write_file(const std::string& path, std::string_view s); // throws IoError
bool file_exists(const std::string& path);

// Bigram Dice similarity over character-bigram multisets:
// 2*|A and B| / (|A|+|B|). Equal strings score 1; strings too short to form
// bigrams score 0 against anything unequal.
double dice_bigram(std::string_view a, std::string_view b);

}  // namespace sqlfix
