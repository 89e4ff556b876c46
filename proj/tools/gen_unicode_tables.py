#!/usr/bin/env python3
"""Regenerates src/unicode_tables.cpp from the Python unicodedata module.

Emits four tables: general-category ranges, nonzero canonical combining
classes, canonical decompositions (Hangul excluded, handled algorithmically),
primary composition pairs (composition exclusions filtered out), and full
case foldings. Run from the repository root:

    python3 tools/gen_unicode_tables.py > src/unicode_tables.cpp
"""

import sys
import unicodedata

MAX_CP = 0x110000
HANGUL_S_BASE = 0xAC00
HANGUL_S_COUNT = 11172

CATEGORIES = [
    "Cc", "Cf", "Cn", "Co", "Cs",
    "Ll", "Lm", "Lo", "Lt", "Lu",
    "Mc", "Me", "Mn",
    "Nd", "Nl", "No",
    "Pc", "Pd", "Pe", "Pf", "Pi", "Po", "Ps",
    "Sc", "Sk", "Sm", "So",
    "Zl", "Zp", "Zs",
]
CAT_INDEX = {c: i for i, c in enumerate(CATEGORIES)}


def category_ranges():
    ranges = []
    start = 0
    cur = unicodedata.category(chr(0))
    for cp in range(1, MAX_CP):
        cat = unicodedata.category(chr(cp))
        if cat != cur:
            ranges.append((start, cp - 1, cur))
            start = cp
            cur = cat
    ranges.append((start, MAX_CP - 1, cur))
    return ranges


def ccc_entries():
    out = []
    for cp in range(MAX_CP):
        c = unicodedata.combining(chr(cp))
        if c:
            out.append((cp, c))
    return out


def is_hangul_syllable(cp):
    return HANGUL_S_BASE <= cp < HANGUL_S_BASE + HANGUL_S_COUNT


def decomp_entries():
    out = []
    for cp in range(MAX_CP):
        if is_hangul_syllable(cp):
            continue
        d = unicodedata.decomposition(chr(cp))
        if not d or d.startswith("<"):
            continue  # compatibility decompositions are not canonical
        parts = [int(x, 16) for x in d.split()]
        if len(parts) == 1:
            out.append((cp, parts[0], 0))
        elif len(parts) == 2:
            out.append((cp, parts[0], parts[1]))
        else:
            raise AssertionError("canonical decomposition longer than 2")
    return out


def composition_entries(decomps):
    out = []
    for cp, a, b in decomps:
        if b == 0:
            continue
        # Primary composite iff NFC re-composes its own NFD expansion.
        s = chr(cp)
        if unicodedata.normalize("NFC", unicodedata.normalize("NFD", s)) == s:
            out.append((a, b, cp))
    out.sort()
    return out


def fold_entries():
    out = []
    for cp in range(MAX_CP):
        ch = chr(cp)
        f = ch.casefold()
        if f != ch:
            cps = [ord(c) for c in f]
            assert len(cps) <= 3
            while len(cps) < 3:
                cps.append(0)
            out.append((cp, cps))
    return out


def main():
    w = sys.stdout.write
    w("// Generated by tools/gen_unicode_tables.py (Unicode %s). Do not edit.\n"
      % unicodedata.unidata_version)
    w('#include "unicode_tables.hpp"\n\n')
    w("namespace mcqforge::uni {\n\n")

    cats = category_ranges()
    w("const CategoryRange kCategoryRanges[] = {\n")
    for first, last, cat in cats:
        w("  {0x%X,0x%X,%d},\n" % (first, last, CAT_INDEX[cat]))
    w("};\n")
    w("const std::size_t kCategoryRangeCount = %d;\n\n" % len(cats))

    ccc = ccc_entries()
    w("const CccEntry kCccEntries[] = {\n")
    for cp, c in ccc:
        w("  {0x%X,%d},\n" % (cp, c))
    w("};\n")
    w("const std::size_t kCccEntryCount = %d;\n\n" % len(ccc))

    dec = decomp_entries()
    w("const DecompEntry kDecompEntries[] = {\n")
    for cp, a, b in dec:
        w("  {0x%X,0x%X,0x%X},\n" % (cp, a, b))
    w("};\n")
    w("const std::size_t kDecompEntryCount = %d;\n\n" % len(dec))

    comp = composition_entries(dec)
    w("const CompEntry kCompEntries[] = {\n")
    for a, b, cp in comp:
        w("  {0x%X,0x%X,0x%X},\n" % (a, b, cp))
    w("};\n")
    w("const std::size_t kCompEntryCount = %d;\n\n" % len(comp))

    folds = fold_entries()
    w("const FoldEntry kFoldEntries[] = {\n")
    for cp, cps in folds:
        w("  {0x%X,{0x%X,0x%X,0x%X}},\n" % (cp, cps[0], cps[1], cps[2]))
    w("};\n")
    w("const std::size_t kFoldEntryCount = %d;\n\n" % len(folds))

    w("}  // namespace mcqforge::uni\n")


if __name__ == "__main__":
    main()
