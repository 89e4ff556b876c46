#pragma once

#include <string>
#include <string_view>
#include <vector>

// Minimal Unicode layer backing text comparison and tokenization: UTF-8
// codec, NFC/NFD normalization, full case folding, and default word
// segmentation. Tables are generated from the Unicode character database
// by tools/gen_unicode_tables.py.
namespace mcqforge::uni {

// Decodes UTF-8; malformed byte sequences become U+FFFD (one per bad byte).
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(const std::u32string& cps);

bool is_letter(char32_t cp);   // L*
bool is_mark(char32_t cp);     // M*
bool is_digit(char32_t cp);    // Nd
bool is_punct(char32_t cp);    // P*
bool is_symbol(char32_t cp);   // S*
bool is_space(char32_t cp);    // Z* plus the ASCII/Latin-1 space controls
bool is_connector(char32_t cp);  // Pc

std::uint8_t combining_class(char32_t cp);

std::string nfd(std::string_view s);
std::string nfc(std::string_view s);

// Full (multi-character) case folding, e.g. U+00DF -> "ss".
std::string casefold(std::string_view s);

// Canonical equality key used everywhere normalized comparison is called
// for: NFC, casefold, NFC again (folding may denormalize).
std::string fold_key(std::string_view s);

// Strips leading/trailing Unicode whitespace.
std::string trim(std::string_view s);

// Default word segmentation: maximal runs of letters/marks/digits joined
// across medial punctuation (apostrophe between letters, comma/period
// between digits) per the UAX #29 WB5-WB13 core rules. Returns word spans
// only; separators and punctuation never appear in the output.
std::vector<std::string> segment_words(std::string_view s);

}  // namespace mcqforge::uni
