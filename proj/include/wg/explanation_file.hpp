#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "wg/spaces.hpp"

namespace wg {

// Malformed file text. Line and column are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string source, long line, long column, const std::string& message);
  const std::string& source() const noexcept { return source_; }
  long line() const noexcept { return line_; }
  long column() const noexcept { return column_; }

 private:
  std::string source_;
  long line_;
  long column_;
};

/// On disk: one `# {"kind": ..., "s": ..., "N": ..., "metadata": {...}}`
/// line, then N comma-separated rows of s numbers. Attribution entries are
/// written with 17 significant digits so a round trip is exact.
struct ExplanationFile {
  ExplanationSet set;
  std::map<std::string, std::string> metadata;
};

std::string format_explanation_file(const ExplanationFile& file);

// Throws ParseError for malformed text and ValidationError when the rows do
// not form a valid set of the declared kind.
ExplanationFile parse_explanation_file(const std::string& text, const std::string& source = "<input>");

ExplanationFile read_explanation_file(const std::string& path);
void write_explanation_file(const std::string& path, const ExplanationFile& file);

std::string read_text_file(const std::string& path);

// Lower-case hex SHA-256 of the bytes.
std::string sha256_hex(const std::string& bytes);

}  // namespace wg
