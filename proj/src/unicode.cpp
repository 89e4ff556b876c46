#include "mcqforge/unicode.hpp"

#include <algorithm>
#include <array>

#include "unicode_tables.hpp"

namespace mcqforge::uni {
namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Hangul syllable composition constants (UAX #15, algorithmic).
constexpr char32_t kHangulSBase = 0xAC00;
constexpr char32_t kHangulLBase = 0x1100;
constexpr char32_t kHangulVBase = 0x1161;
constexpr char32_t kHangulTBase = 0x11A7;
constexpr int kHangulLCount = 19;
constexpr int kHangulVCount = 21;
constexpr int kHangulTCount = 28;
constexpr int kHangulNCount = kHangulVCount * kHangulTCount;
constexpr int kHangulSCount = kHangulLCount * kHangulNCount;

std::uint8_t category_of(char32_t cp) {
  std::size_t lo = 0, hi = kCategoryRangeCount;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    const CategoryRange& r = kCategoryRanges[mid];
    if (cp < r.first) {
      hi = mid;
    } else if (cp > r.last) {
      lo = mid + 1;
    } else {
      return r.cat;
    }
  }
  return kCn;
}

const DecompEntry* find_decomp(char32_t cp) {
  std::size_t lo = 0, hi = kDecompEntryCount;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (kDecompEntries[mid].cp < cp) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < kDecompEntryCount && kDecompEntries[lo].cp == cp) {
    return &kDecompEntries[lo];
  }
  return nullptr;
}

char32_t find_composite(char32_t a, char32_t b) {
  std::size_t lo = 0, hi = kCompEntryCount;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    const CompEntry& e = kCompEntries[mid];
    if (e.a < a || (e.a == a && e.b < b)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < kCompEntryCount && kCompEntries[lo].a == a && kCompEntries[lo].b == b) {
    return kCompEntries[lo].composite;
  }
  return 0;
}

void decompose_into(char32_t cp, std::u32string& out) {
  if (cp >= kHangulSBase && cp < kHangulSBase + kHangulSCount) {
    char32_t s = cp - kHangulSBase;
    out.push_back(kHangulLBase + s / kHangulNCount);
    out.push_back(kHangulVBase + (s % kHangulNCount) / kHangulTCount);
    char32_t t = s % kHangulTCount;
    if (t != 0) out.push_back(kHangulTBase + t);
    return;
  }
  if (const DecompEntry* d = find_decomp(cp)) {
    decompose_into(d->a, out);
    if (d->b != 0) decompose_into(d->b, out);
    return;
  }
  out.push_back(cp);
}

// Canonical ordering: stable bubble of nonzero-ccc runs (runs are short).
void canonical_order(std::u32string& cps) {
  for (std::size_t i = 1; i < cps.size(); ++i) {
    std::uint8_t ccc = combining_class(cps[i]);
    if (ccc == 0) continue;
    std::size_t j = i;
    while (j > 0 && combining_class(cps[j - 1]) > ccc) {
      std::swap(cps[j - 1], cps[j]);
      --j;
    }
  }
}

std::u32string decompose(std::u32string_view in) {
  std::u32string out;
  out.reserve(in.size() + in.size() / 4);
  for (char32_t cp : in) decompose_into(cp, out);
  canonical_order(out);
  return out;
}

// Canonical composition over an NFD sequence (UAX #15 algorithm).
std::u32string compose(std::u32string nfd_cps) {
  if (nfd_cps.empty()) return nfd_cps;
  std::u32string out;
  out.reserve(nfd_cps.size());
  std::ptrdiff_t last_starter = -1;
  std::uint8_t last_ccc = 0;
  for (char32_t cp : nfd_cps) {
    std::uint8_t ccc = combining_class(cp);
    if (last_starter >= 0) {
      char32_t starter = out[last_starter];
      bool blocked = (last_ccc >= ccc && last_ccc != 0) ||
                     (last_ccc == 0 && static_cast<std::size_t>(last_starter) + 1 != out.size());
      if (!blocked) {
        char32_t composite = 0;
        // Hangul LV / LVT composition.
        if (starter >= kHangulLBase && starter < kHangulLBase + kHangulLCount &&
            cp >= kHangulVBase && cp < kHangulVBase + kHangulVCount) {
          composite = kHangulSBase + ((starter - kHangulLBase) * kHangulVCount +
                                      (cp - kHangulVBase)) * kHangulTCount;
        } else if (starter >= kHangulSBase && starter < kHangulSBase + kHangulSCount &&
                   (starter - kHangulSBase) % kHangulTCount == 0 &&
                   cp > kHangulTBase && cp < kHangulTBase + kHangulTCount) {
          composite = starter + (cp - kHangulTBase);
        } else {
          composite = find_composite(starter, cp);
        }
        if (composite != 0) {
          out[last_starter] = composite;
          continue;
        }
      }
    }
    if (ccc == 0) {
      last_starter = static_cast<std::ptrdiff_t>(out.size());
    }
    last_ccc = ccc;
    out.push_back(cp);
  }
  return out;
}

enum class WordClass {
  Other,
  ALetter,     // L* and Nl
  Extend,      // M*
  Numeric,     // Nd
  ExtendNumLet,  // Pc
  MidLetter,
  MidNum,
  MidNumLet,
  SingleQuote,
};

WordClass word_class(char32_t cp) {
  switch (cp) {
    case 0x0027:
      return WordClass::SingleQuote;
    case 0x003A: case 0x00B7: case 0x0387: case 0x05F4:
    case 0x2027: case 0xFE13: case 0xFE55: case 0xFF1A:
      return WordClass::MidLetter;
    case 0x002C: case 0x003B: case 0x037E: case 0x0589:
    case 0x060C: case 0x060D: case 0x066C: case 0x07F8:
    case 0x2044: case 0xFE10: case 0xFE14: case 0xFE50:
    case 0xFE54: case 0xFF0C: case 0xFF1B:
      return WordClass::MidNum;
    case 0x002E: case 0x2018: case 0x2019: case 0x2024:
    case 0xFE52: case 0xFF07: case 0xFF0E:
      return WordClass::MidNumLet;
    default:
      break;
  }
  std::uint8_t cat = category_of(cp);
  switch (cat) {
    case kLl: case kLm: case kLo: case kLt: case kLu: case kNl:
      return WordClass::ALetter;
    case kMc: case kMe: case kMn:
      return WordClass::Extend;
    case kNd:
      return WordClass::Numeric;
    case kPc:
      return WordClass::ExtendNumLet;
    default:
      return WordClass::Other;
  }
}

bool is_word_base(WordClass c) {
  return c == WordClass::ALetter || c == WordClass::Numeric ||
         c == WordClass::ExtendNumLet;
}

}  // namespace

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  const auto* b = reinterpret_cast<const unsigned char*>(s.data());
  while (i < s.size()) {
    unsigned char c = b[i];
    std::size_t len;
    char32_t cp;
    if (c < 0x80) {
      len = 1;
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + len > s.size()) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      if ((b[i + k] & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b[i + k] & 0x3F);
    }
    // Reject overlong forms, surrogates, and out-of-range values.
    static constexpr char32_t kMinByLen[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (!ok || cp < kMinByLen[len] || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(const std::u32string& cps) {
  std::string out;
  out.reserve(cps.size() * 2);
  for (char32_t cp : cps) {
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = kReplacement;
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

bool is_letter(char32_t cp) {
  std::uint8_t c = category_of(cp);
  return c == kLl || c == kLm || c == kLo || c == kLt || c == kLu;
}

bool is_mark(char32_t cp) {
  std::uint8_t c = category_of(cp);
  return c == kMc || c == kMe || c == kMn;
}

bool is_digit(char32_t cp) { return category_of(cp) == kNd; }

bool is_punct(char32_t cp) {
  std::uint8_t c = category_of(cp);
  return c == kPc || c == kPd || c == kPe || c == kPf || c == kPi ||
         c == kPo || c == kPs;
}

bool is_symbol(char32_t cp) {
  std::uint8_t c = category_of(cp);
  return c == kSc || c == kSk || c == kSm || c == kSo;
}

bool is_space(char32_t cp) {
  if (cp == U'\t' || cp == U'\n' || cp == U'\v' || cp == U'\f' ||
      cp == U'\r' || cp == 0x85) {
    return true;
  }
  std::uint8_t c = category_of(cp);
  return c == kZl || c == kZp || c == kZs;
}

bool is_connector(char32_t cp) { return category_of(cp) == kPc; }

std::uint8_t combining_class(char32_t cp) {
  std::size_t lo = 0, hi = kCccEntryCount;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (kCccEntries[mid].cp < cp) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < kCccEntryCount && kCccEntries[lo].cp == cp) {
    return kCccEntries[lo].ccc;
  }
  return 0;
}

std::string nfd(std::string_view s) {
  return encode_utf8(decompose(decode_utf8(s)));
}

std::string nfc(std::string_view s) {
  return encode_utf8(compose(decompose(decode_utf8(s))));
}

std::string casefold(std::string_view s) {
  std::u32string in = decode_utf8(s);
  std::u32string out;
  out.reserve(in.size());
  for (char32_t cp : in) {
    std::size_t lo = 0, hi = kFoldEntryCount;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (kFoldEntries[mid].cp < cp) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    if (lo < kFoldEntryCount && kFoldEntries[lo].cp == cp) {
      const FoldEntry& f = kFoldEntries[lo];
      for (char32_t t : f.to) {
        if (t != 0) out.push_back(t);
      }
    } else {
      out.push_back(cp);
    }
  }
  return encode_utf8(out);
}

std::string fold_key(std::string_view s) { return nfc(casefold(nfc(s))); }

std::string trim(std::string_view s) {
  std::u32string cps = decode_utf8(s);
  std::size_t b = 0, e = cps.size();
  while (b < e && is_space(cps[b])) ++b;
  while (e > b && is_space(cps[e - 1])) --e;
  return encode_utf8(cps.substr(b, e - b));
}

std::vector<std::string> segment_words(std::string_view s) {
  std::u32string cps = decode_utf8(s);
  std::vector<std::string> words;
  std::size_t n = cps.size();
  std::size_t i = 0;
  while (i < n) {
    WordClass c = word_class(cps[i]);
    if (!is_word_base(c)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    WordClass prev_base = c;
    while (j < n) {
      WordClass cj = word_class(cps[j]);
      if (cj == WordClass::Extend) {
        ++j;
        continue;
      }
      if (is_word_base(cj)) {
        prev_base = cj;
        ++j;
        continue;
      }
      // Medial characters join when flanked by the right base classes
      // (WB6/7, WB11/12); Extend after the medial is skipped (WB4).
      bool letter_mid = cj == WordClass::MidLetter || cj == WordClass::MidNumLet ||
                        cj == WordClass::SingleQuote;
      bool num_mid = cj == WordClass::MidNum || cj == WordClass::MidNumLet ||
                     cj == WordClass::SingleQuote;
      std::size_t k = j + 1;
      while (k < n && word_class(cps[k]) == WordClass::Extend) ++k;
      if (k < n) {
        WordClass next = word_class(cps[k]);
        if ((letter_mid && prev_base == WordClass::ALetter &&
             next == WordClass::ALetter) ||
            (num_mid && prev_base == WordClass::Numeric &&
             next == WordClass::Numeric)) {
          prev_base = next;
          j = k + 1;
          continue;
        }
      }
      break;
    }
    words.push_back(encode_utf8(cps.substr(i, j - i)));
    i = j;
  }
  return words;
}

}  // namespace mcqforge::uni
