#pragma once

// Shared fixtures and independent oracle implementations for the unit and
// acceptance suites. The oracles here deliberately use naive algorithms
// (linear-scan n-gram counting, subsequence enumeration) so they share no
// code path with the kernels they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mcqforge/core.hpp"
#include "mcqforge/prompts.hpp"

namespace testutil {

// ---- Fixture inputs (must match tests/make_golden_prompts.py) -----------

inline std::string fixture_context(mcqforge::Language lang) {
  using mcqforge::Language;
  switch (lang) {
    case Language::En: return "The sun is a star.";
    case Language::De: return "Die Sonne ist ein Stern.";
    case Language::Hi:
      return "सूर्य एक "
             "तारा है।";
    case Language::Bn:
      return "সূর্য একটি "
             "নক্ষত্র।";
  }
  return "";
}

inline std::string fixture_paraphrase(mcqforge::Language lang) {
  using mcqforge::Language;
  switch (lang) {
    case Language::En: return "The sun is one of the stars.";
    case Language::De: return "Die Sonne zählt zu den Sternen.";
    case Language::Hi:
      return "सूर्य तारों "
             "में से एक है।";
    case Language::Bn:
      return "সূর্য "
             "নক্ষত্রদের "
             "একটি।";
  }
  return "";
}

inline std::string fixture_keyword(mcqforge::Language lang) {
  using mcqforge::Language;
  switch (lang) {
    case Language::En: return "sun";
    case Language::De: return "Sonne";
    case Language::Hi: return "सूर्य";
    case Language::Bn: return "সূর্য";
  }
  return "";
}

inline std::string fixture_question(mcqforge::Language lang) {
  using mcqforge::Language;
  switch (lang) {
    case Language::En: return "What is the sun?";
    case Language::De: return "Was ist die Sonne?";
    case Language::Hi:
      return "सूर्य क्या "
             "है?";
    case Language::Bn: return "সূর্য কী?";
  }
  return "";
}

inline mcqforge::prompts::QgExemplar fixture_qg_exemplar() {
  mcqforge::prompts::QgExemplar ex;
  ex.paraphrased_context = "Water boils at one hundred degrees.";
  ex.keyword = "water";
  ex.question = "What boils at one hundred degrees?";
  return ex;
}

inline mcqforge::prompts::DgExemplar fixture_dg_exemplar() {
  mcqforge::prompts::DgExemplar ex;
  ex.question = "What boils at one hundred degrees?";
  ex.correct_answer = "water";
  ex.distractors = {"milk", "oil", "mercury"};
  return ex;
}

inline std::map<mcqforge::Language, mcqforge::prompts::ExemplarSet>
fixture_exemplars() {
  std::map<mcqforge::Language, mcqforge::prompts::ExemplarSet> out;
  for (int l = 0; l < mcqforge::kLanguageCount; ++l) {
    mcqforge::prompts::ExemplarSet set;
    set.qg = fixture_qg_exemplar();
    set.dg = fixture_dg_exemplar();
    out[static_cast<mcqforge::Language>(l)] = set;
  }
  return out;
}

// ---- Independent metric oracles ------------------------------------------

// Clipped n-gram matches by linear scanning; no hash maps.
inline std::int64_t oracle_clipped_matches(const std::vector<std::string>& cand,
                                           const std::vector<std::string>& ref,
                                           int n) {
  auto gram_at = [n](const std::vector<std::string>& seq, std::size_t pos,
                     const std::vector<std::string>& other, std::size_t opos) {
    for (int k = 0; k < n; ++k) {
      if (seq[pos + k] != other[opos + k]) return false;
    }
    return true;
  };
  if (static_cast<int>(cand.size()) < n) return 0;
  std::int64_t matched = 0;
  for (std::size_t i = 0; i + n <= cand.size(); ++i) {
    // Only count each distinct gram at its first occurrence.
    bool first = true;
    for (std::size_t j = 0; j < i; ++j) {
      if (gram_at(cand, i, cand, j)) {
        first = false;
        break;
      }
    }
    if (!first) continue;
    std::int64_t in_cand = 0;
    for (std::size_t j = 0; j + n <= cand.size(); ++j) {
      if (gram_at(cand, i, cand, j)) ++in_cand;
    }
    std::int64_t in_ref = 0;
    if (static_cast<int>(ref.size()) >= n) {
      for (std::size_t j = 0; j + n <= ref.size(); ++j) {
        if (gram_at(cand, i, ref, j)) ++in_ref;
      }
    }
    matched += std::min(in_cand, in_ref);
  }
  return matched;
}

// Same declared combination formula (geometric mean, add-1 smoothing on
// zero higher-order numerators, brevity penalty), driven by the
// brute-force counter above.
inline double oracle_bleu(const std::vector<std::string>& cand,
                          const std::vector<std::string>& ref, int n) {
  const auto c = static_cast<std::ptrdiff_t>(cand.size());
  const auto r = static_cast<std::ptrdiff_t>(ref.size());
  if (c < n) return 0.0;
  double log_sum = 0.0;
  for (int i = 1; i <= n; ++i) {
    std::int64_t matched = oracle_clipped_matches(cand, ref, i);
    std::int64_t total = c - i + 1;
    if (matched == 0 && i > 1) {
      matched += 1;
      total += 1;
    }
    if (matched == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matched) / static_cast<double>(total));
  }
  double bp = c >= r ? 1.0
                     : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
  return bp * std::exp(log_sum / n);
}

// Longest common subsequence by exhaustive enumeration of candidate
// subsequences (lengths <= ~16 only).
inline std::size_t oracle_lcs(const std::vector<std::string>& cand,
                              const std::vector<std::string>& ref) {
  std::size_t best = 0;
  const std::size_t m = cand.size();
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    std::size_t len = static_cast<std::size_t>(__builtin_popcount(mask));
    if (len <= best) continue;
    // Check the selected subsequence against ref left to right.
    std::size_t r = 0;
    bool ok = true;
    for (std::size_t i = 0; i < m && ok; ++i) {
      if (!(mask & (1u << i))) continue;
      while (r < ref.size() && ref[r] != cand[i]) ++r;
      if (r == ref.size()) {
        ok = false;
      } else {
        ++r;
      }
    }
    if (ok) best = len;
  }
  return best;
}

inline double oracle_rouge_l(const std::vector<std::string>& cand,
                             const std::vector<std::string>& ref) {
  if (cand.empty() || ref.empty()) return 0.0;
  double lcs = static_cast<double>(oracle_lcs(cand, ref));
  if (lcs == 0) return 0.0;
  double p = lcs / static_cast<double>(cand.size());
  double r = lcs / static_cast<double>(ref.size());
  return 2 * p * r / (p + r);
}

inline std::vector<std::string> random_tokens(std::mt19937_64& rng,
                                              std::size_t max_len,
                                              std::size_t alphabet) {
  static const char* kSymbols[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
  std::size_t len = rng() % (max_len + 1);
  std::vector<std::string> out;
  out.reserve(len);
  for (std::size_t i = 0; i < len; ++i) {
    out.push_back(kSymbols[rng() % alphabet]);
  }
  return out;
}

}  // namespace testutil
