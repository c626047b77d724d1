#include "wg/explanation_file.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wg/errors.hpp"
#include "wg/studies.hpp"

namespace wg {

ParseError::ParseError(std::string source, long line, long column, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      source_(std::move(source)),
      line_(line),
      column_(column) {}

std::string format_explanation_file(const ExplanationFile& file) {
  const ExplanationSet& set = file.set;
  nlohmann::json header = {{"kind", std::string(to_string(set.kind().space))},
                           {"s", set.dim()},
                           {"N", set.size()},
                           {"metadata", file.metadata}};
  std::string out = "# " + header.dump() + "\n";
  const bool integral = set.kind().space != SpaceKind::Attribution;
  char buf[40];
  for (Index i = 0; i < set.size(); ++i) {
    for (int j = 0; j < set.dim(); ++j) {
      if (j) out += ',';
      const double v = set.data()(i, j);
      if (integral)
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
      else
        std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    if (end == text.size()) break;
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

}  // namespace

ExplanationFile parse_explanation_file(const std::string& text, const std::string& source) {
  const std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) throw ParseError(source, 1, 1, "empty file: expected a '# {...}' header line");
  const std::string& head = lines[0];
  if (head.empty() || head[0] != '#') throw ParseError(source, 1, 1, "expected '#' followed by a JSON header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(head.substr(1));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source, 1, static_cast<long>(e.byte) + 1, std::string("invalid JSON header: ") + e.what());
  }
  auto require = [&](const char* key) -> const nlohmann::json& {
    if (!header.is_object() || !header.contains(key))
      throw ParseError(source, 1, 1, std::string("header is missing \"") + key + "\"");
    return header.at(key);
  };
  const auto& jkind = require("kind");
  const auto& js = require("s");
  const auto& jn = require("N");
  if (!jkind.is_string()) throw ParseError(source, 1, 1, "header \"kind\" must be a string");
  if (!js.is_number_integer() || js.get<long>() < 1)
    throw ParseError(source, 1, 1, "header \"s\" must be a positive integer");
  if (!jn.is_number_integer() || jn.get<long>() < 0)
    throw ParseError(source, 1, 1, "header \"N\" must be a non-negative integer");

  SpaceKind space;
  try {
    space = parse_space_kind(jkind.get<std::string>());
  } catch (const ConfigError& e) {
    throw ParseError(source, 1, 1, e.what());
  }
  const int s = js.get<int>();
  const long n = jn.get<long>();

  std::map<std::string, std::string> metadata;
  if (header.contains("metadata")) {
    const auto& meta = header.at("metadata");
    if (!meta.is_object()) throw ParseError(source, 1, 1, "header \"metadata\" must be an object");
    for (const auto& [key, value] : meta.items())
      metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();
  }

  const long body = static_cast<long>(lines.size()) - 1;
  if (body != n)
    throw ParseError(source, static_cast<long>(lines.size()) + (body < n ? 1 : 0), 1,
                     "header declares N=" + std::to_string(n) + " rows but the body has " + std::to_string(body));

  Matrix data(n, s);
  for (long i = 0; i < n; ++i) {
    const std::string& line = lines[static_cast<std::size_t>(i) + 1];
    const long line_no = i + 2;
    std::size_t pos = 0;
    for (int j = 0; j < s; ++j) {
      std::size_t end = line.find(',', pos);
      if (end == std::string::npos) end = line.size();
      if (j == s - 1 && end != line.size())
        throw ParseError(source, line_no, static_cast<long>(end) + 1,
                         "too many fields: expected " + std::to_string(s));
      std::size_t a = pos, b = end;
      while (a < b && (line[a] == ' ' || line[a] == '\t')) ++a;
      while (b > a && (line[b - 1] == ' ' || line[b - 1] == '\t')) --b;
      double v = 0.0;
      const char* first = line.data() + a;
      const char* last = line.data() + b;
      if (a < b && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (a == b || ec != std::errc() || ptr != last)
        throw ParseError(source, line_no, static_cast<long>(a) + 1,
                         "expected a number, found '" + line.substr(a, b - a) + "'");
      data(i, j) = v;
      if (j < s - 1) {
        if (end == line.size())
          throw ParseError(source, line_no, static_cast<long>(line.size()) + 1,
                           "too few fields: expected " + std::to_string(s));
        pos = end + 1;
      }
    }
  }
  return {ExplanationSet(ExplanationKind{space, s}, std::move(data)), std::move(metadata)};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExplanationFile read_explanation_file(const std::string& path) {
  return parse_explanation_file(read_text_file(path), path);
}

void write_explanation_file(const std::string& path, const ExplanationFile& file) {
  write_file_atomic(path, format_explanation_file(file));
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

}  // namespace wg
