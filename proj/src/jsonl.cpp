#include "mcqforge/jsonl.hpp"

#include <sstream>

namespace mcqforge {

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const json&, std::size_t)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded()) {
      throw FormatError("malformed record in " + path.string(), lineno);
    }
    fn(record, lineno);
  }
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::vector<json> out;
  for_each_jsonl(path, [&out](const json& j, std::size_t) { out.push_back(j); });
  return out;
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path, bool append)
    : out_(path, append ? std::ios::binary | std::ios::app : std::ios::binary) {
  if (!out_) throw IoError("cannot open " + path.string() + " for writing");
}

void JsonlWriter::write(const json& record) {
  out_ << record.dump() << '\n';
  if (!out_) throw IoError("write failed");
}

void write_jsonl(const std::filesystem::path& path,
                 const std::vector<json>& records) {
  JsonlWriter w(path);
  for (const json& r : records) w.write(r);
  w.flush();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path,
                     std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace mcqforge
