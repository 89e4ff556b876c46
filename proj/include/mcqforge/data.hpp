#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mcqforge/core.hpp"

// Adapters turning the four QA corpora into the unified context stream,
// plus seeded sampling. QA pairs are discarded at load time; generation
// consumes contexts only.
namespace mcqforge::data {

enum class DatasetFormat {
  SquadJson,   // nested article -> paragraph -> {context, qas}
  PairedText,  // one delimited record per line; one field is the context
  QaJson,      // array of records with a configurable context field
};

struct DatasetDescriptor {
  std::string name;  // squad | germanquad | hiquad | banglarqa
  Language language = Language::En;
  DatasetFormat format = DatasetFormat::SquadJson;
  std::filesystem::path path;

  // PairedText options.
  char delimiter = '\t';
  int context_column = 0;

  // QaJson field mapping; releases vary, so both are configurable.
  std::string records_field;  // empty = the document root is the array
  std::string context_field = "context";
};

// Fixed name -> (language, default format) pairing. Throws Error for an
// unknown dataset name.
DatasetDescriptor descriptor_for(const std::string& name,
                                 const std::filesystem::path& path);

// Extracts unique context passages in file order. Deduplicates by
// NFC-normalized trimmed text; ids are digest(dataset, normalized text).
// Throws FormatError with a line/record locus on malformed input.
std::vector<Context> load_contexts(const DatasetDescriptor& descriptor);

// Uniform sample without replacement; output order is the sampled order
// and depends only on (input order, n, seed). When n exceeds the pool the
// whole pool is returned (in sampled order) and *saturated is set.
std::vector<Context> sample_contexts(const std::vector<Context>& contexts,
                                     std::size_t n, std::uint64_t seed,
                                     bool* saturated = nullptr);

}  // namespace mcqforge::data
