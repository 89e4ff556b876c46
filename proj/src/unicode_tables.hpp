#pragma once

#include <cstddef>
#include <cstdint>

// Table layout shared with tools/gen_unicode_tables.py. Internal to the
// unicode implementation; not installed.
namespace mcqforge::uni {

// Index into the general-category name list (alphabetical, 30 entries).
enum Category : std::uint8_t {
  kCc, kCf, kCn, kCo, kCs,
  kLl, kLm, kLo, kLt, kLu,
  kMc, kMe, kMn,
  kNd, kNl, kNo,
  kPc, kPd, kPe, kPf, kPi, kPo, kPs,
  kSc, kSk, kSm, kSo,
  kZl, kZp, kZs,
};

struct CategoryRange {
  char32_t first;
  char32_t last;
  std::uint8_t cat;
};

struct CccEntry {
  char32_t cp;
  std::uint8_t ccc;
};

// Canonical decomposition; b == 0 for singleton decompositions.
struct DecompEntry {
  char32_t cp;
  char32_t a;
  char32_t b;
};

struct CompEntry {
  char32_t a;
  char32_t b;
  char32_t composite;
};

// Full case folding, up to three code points, zero-padded.
struct FoldEntry {
  char32_t cp;
  char32_t to[3];
};

extern const CategoryRange kCategoryRanges[];
extern const std::size_t kCategoryRangeCount;
extern const CccEntry kCccEntries[];
extern const std::size_t kCccEntryCount;
extern const DecompEntry kDecompEntries[];
extern const std::size_t kDecompEntryCount;
extern const CompEntry kCompEntries[];
extern const std::size_t kCompEntryCount;
extern const FoldEntry kFoldEntries[];
extern const std::size_t kFoldEntryCount;

}  // namespace mcqforge::uni
