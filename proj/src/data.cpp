#include "mcqforge/data.hpp"

#include <fstream>
#include <random>
#include <unordered_set>

#include "mcqforge/digest.hpp"
#include "mcqforge/jsonl.hpp"
#include "mcqforge/unicode.hpp"

namespace mcqforge::data {
namespace {

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

json parse_json_file(const std::filesystem::path& path) {
  std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("malformed JSON in " + path.string() + ": " + e.what(),
                      line_of_offset(text, e.byte));
  }
}

struct ContextCollector {
  explicit ContextCollector(const DatasetDescriptor& d) : descriptor(d) {}

  const DatasetDescriptor& descriptor;
  std::vector<Context> contexts;
  std::unordered_set<std::string> seen;

  void add(const std::string& raw) {
    std::string text = uni::trim(raw);
    if (text.empty()) return;
    std::string norm = uni::nfc(text);
    if (!seen.insert(norm).second) return;
    Context c;
    c.id = sha256_hex_prefix(descriptor.name + '\x1f' + norm, 16);
    c.text = text;
    c.language = descriptor.language;
    c.source_dataset = descriptor.name;
    contexts.push_back(std::move(c));
  }
};

void load_squad_json(const DatasetDescriptor& d, ContextCollector& out) {
  json doc = parse_json_file(d.path);
  if (!doc.contains("data") || !doc.at("data").is_array()) {
    throw FormatError(d.path.string() + ": expected top-level 'data' array", 1);
  }
  std::size_t article_idx = 0;
  for (const json& article : doc.at("data")) {
    if (!article.contains("paragraphs") || !article.at("paragraphs").is_array()) {
      throw FormatError(d.path.string() + ": data[" + std::to_string(article_idx) +
                            "] has no 'paragraphs' array",
                        article_idx + 1);
    }
    std::size_t para_idx = 0;
    for (const json& paragraph : article.at("paragraphs")) {
      if (!paragraph.contains("context") || !paragraph.at("context").is_string()) {
        throw FormatError(d.path.string() + ": data[" + std::to_string(article_idx) +
                              "].paragraphs[" + std::to_string(para_idx) +
                              "] has no 'context' string",
                          para_idx + 1);
      }
      out.add(paragraph.at("context").get<std::string>());
      ++para_idx;
    }
    ++article_idx;
  }
}

void load_paired_text(const DatasetDescriptor& d, ContextCollector& out) {
  std::ifstream in(d.path, std::ios::binary);
  if (!in) throw IoError("cannot open " + d.path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (uni::trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t pos = line.find(d.delimiter, start);
      if (pos == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    if (d.context_column < 0 ||
        static_cast<std::size_t>(d.context_column) >= fields.size()) {
      throw FormatError(d.path.string() + ": record has " +
                            std::to_string(fields.size()) +
                            " fields, context column is " +
                            std::to_string(d.context_column),
                        lineno);
    }
    out.add(fields[static_cast<std::size_t>(d.context_column)]);
  }
}

void load_qa_json(const DatasetDescriptor& d, ContextCollector& out) {
  json doc = parse_json_file(d.path);
  const json* records = &doc;
  if (!d.records_field.empty()) {
    if (!doc.contains(d.records_field)) {
      throw FormatError(d.path.string() + ": no '" + d.records_field + "' field", 1);
    }
    records = &doc.at(d.records_field);
  }
  if (!records->is_array()) {
    throw FormatError(d.path.string() + ": records node is not an array", 1);
  }
  std::size_t idx = 0;
  for (const json& record : *records) {
    if (!record.contains(d.context_field) ||
        !record.at(d.context_field).is_string()) {
      throw FormatError(d.path.string() + ": record [" + std::to_string(idx) +
                            "] has no '" + d.context_field + "' string",
                        idx + 1);
    }
    out.add(record.at(d.context_field).get<std::string>());
    ++idx;
  }
}

}  // namespace

DatasetDescriptor descriptor_for(const std::string& name,
                                 const std::filesystem::path& path) {
  DatasetDescriptor d;
  d.name = name;
  d.path = path;
  if (name == "squad") {
    d.language = Language::En;
    d.format = DatasetFormat::SquadJson;
  } else if (name == "germanquad") {
    d.language = Language::De;
    d.format = DatasetFormat::SquadJson;
  } else if (name == "hiquad") {
    d.language = Language::Hi;
    d.format = DatasetFormat::PairedText;
  } else if (name == "banglarqa") {
    d.language = Language::Bn;
    d.format = DatasetFormat::QaJson;
  } else {
    throw Error("unknown dataset: " + name +
                " (expected squad, germanquad, hiquad, or banglarqa)");
  }
  return d;
}

std::vector<Context> load_contexts(const DatasetDescriptor& descriptor) {
  ContextCollector collector(descriptor);
  switch (descriptor.format) {
    case DatasetFormat::SquadJson:
      load_squad_json(descriptor, collector);
      break;
    case DatasetFormat::PairedText:
      load_paired_text(descriptor, collector);
      break;
    case DatasetFormat::QaJson:
      load_qa_json(descriptor, collector);
      break;
  }
  return std::move(collector.contexts);
}

std::vector<Context> sample_contexts(const std::vector<Context>& contexts,
                                     std::size_t n, std::uint64_t seed,
                                     bool* saturated) {
  if (n < 1) throw Error("sample size must be >= 1");
  if (saturated != nullptr) *saturated = n > contexts.size();

  // Partial Fisher-Yates with an explicit generator; the draw sequence is
  // pinned here rather than delegated to distribution internals so samples
  // reproduce across standard libraries.
  std::vector<std::size_t> index(contexts.size());
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
  std::mt19937_64 rng(seed);
  std::size_t take = std::min(n, contexts.size());
  std::vector<Context> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng() % (index.size() - i));
    std::swap(index[i], index[j]);
    out.push_back(contexts[index[i]]);
  }
  return out;
}

}  // namespace mcqforge::data
