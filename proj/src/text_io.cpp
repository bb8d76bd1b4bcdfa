#include "lift3d/text_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lift3d/error.hpp"

namespace lift3d::text {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value, 16);
  std::string digits(buf, end);
  return std::string(16 - digits.size(), '0') + digits;
}

std::string format_double(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, end);
}

void append_doubles(std::string& out, const double* values, std::size_t count) {
  char buf[32];
  for (std::size_t i = 0; i < count; ++i) {
    if (i > 0) out += ' ';
    auto [end, ec] =
        std::to_chars(buf, buf + sizeof(buf), values[i], std::chars_format::general, 17);
    out.append(buf, end);
  }
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

LineReader::LineReader(std::string_view text, std::string source)
    : text_(text), source_(std::move(source)) {}

std::vector<std::string_view> LineReader::next(std::string_view what) {
  while (pos_ < text_.size()) {
    std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    std::string_view line = text_.substr(pos_, end - pos_);
    pos_ = end + 1;
    ++line_;
    auto fields = split_fields(line);
    if (!fields.empty() && fields[0][0] != '#') return fields;
  }
  fail(ErrorCode::kParseError,
       source_ + ":" + std::to_string(line_) + ": unexpected end of input, expected " +
           std::string(what));
}

void LineReader::error(const std::string& message) const {
  fail(ErrorCode::kParseError, source_ + ":" + std::to_string(line_) + ": " + message);
}

double LineReader::parse_double(std::string_view field) const {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    error("bad number '" + std::string(field) + "'");
  }
  return value;
}

long LineReader::parse_int(std::string_view field) const {
  long value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    error("bad integer '" + std::string(field) + "'");
  }
  return value;
}

void LineReader::expect(const std::vector<std::string_view>& fields, std::string_view keyword,
                        std::size_t count) const {
  if (fields.empty() || fields[0] != keyword) {
    error("expected '" + std::string(keyword) + "', got '" +
          (fields.empty() ? std::string() : std::string(fields[0])) + "'");
  }
  if (count > 0 && fields.size() != count) {
    error("'" + std::string(keyword) + "' expects " + std::to_string(count - 1) +
          " values, got " + std::to_string(fields.size() - 1));
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path);
  out << contents;
  if (!out) fail(ErrorCode::kIoError, "write failed for " + path);
}

}  // namespace lift3d::text
