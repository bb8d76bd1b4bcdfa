#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Helpers shared by the line-oriented checkpoint, dataset and report formats.
namespace lift3d::text {

// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

// 17 significant digits, shortest exponent form; round-trips every double.
std::string format_double(double value);
void append_doubles(std::string& out, const double* values, std::size_t count);

std::vector<std::string_view> split_fields(std::string_view line);

// Reads lines with 1-based numbering for error messages. Throws
// kParseError with "<source>:<line>: ..." on malformed fields.
class LineReader {
 public:
  LineReader(std::string_view text, std::string source);

  bool at_end() const { return pos_ >= text_.size(); }
  // Next non-empty line split into fields; throws kParseError at end of input.
  std::vector<std::string_view> next(std::string_view what);
  int line_number() const { return line_; }
  const std::string& source() const { return source_; }

  [[noreturn]] void error(const std::string& message) const;
  double parse_double(std::string_view field) const;
  long parse_int(std::string_view field) const;
  // Fails unless fields[0] == keyword and fields.size() == count (when > 0).
  void expect(const std::vector<std::string_view>& fields, std::string_view keyword,
              std::size_t count = 0) const;

 private:
  std::string_view text_;
  std::string source_;
  std::size_t pos_ = 0;
  int line_ = 0;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace lift3d::text
