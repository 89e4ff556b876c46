#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "mcqforge/core.hpp"

// Line-delimited UTF-8 records, one JSON object per line: the canonical
// persistence format for every record stream in this project.
namespace mcqforge {

struct IoError : Error {
  using Error::Error;
};

// Parse failure with a line/record locus.
struct FormatError : Error {
  FormatError(const std::string& msg, std::size_t line_arg)
      : Error(msg + " (line " + std::to_string(line_arg) + ")"), line(line_arg) {}
  std::size_t line = 0;
};

// Calls fn(record, line_number) for every non-empty line. Throws IoError if
// the file cannot be opened and FormatError at the first malformed line.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const json&, std::size_t)>& fn);

std::vector<json> read_jsonl(const std::filesystem::path& path);

// Serialized single-line writer; open in append mode to resume a stream.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path, bool append = false);

  void write(const json& record);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

void write_jsonl(const std::filesystem::path& path,
                 const std::vector<json>& records);

// Whole-file slurp/overwrite used for manifests and reports.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     std::string_view content);

}  // namespace mcqforge
