#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "greenchain/error.hpp"

namespace greenchain::csv {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// Splits one CSV line. Double-quoted fields may contain commas and "" escapes.
inline std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.emplace_back(trim(cur));
  return out;
}

inline std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

/// Shortest text that parses back to the same double.
inline std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::optional<double> try_parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Table;

/// One data row with column lookup by header name.
class Row {
 public:
  Row(const Table* table, std::vector<std::string> fields, int line)
      : table_(table), fields_(std::move(fields)), line_(line) {}

  int line() const { return line_; }
  const std::string& text(std::string_view column) const;
  double number(std::string_view column) const;
  /// Empty field or "-" means absent.
  std::optional<double> optional_number(std::string_view column) const;
  int integer(std::string_view column) const;
  std::string location(std::string_view column) const;

 private:
  friend class Table;
  const Table* table_;
  std::vector<std::string> fields_;
  int line_;
};

class Table {
 public:
  Table(std::string name, std::vector<std::string> header) : name_(std::move(name)), header_(std::move(header)) {
    for (std::size_t i = 0; i < header_.size(); ++i) index_[header_[i]] = i;
  }

  /// Parses text; blank lines and lines starting with '#' are skipped.
  static Table parse(std::string_view text, const std::string& name,
                     const std::vector<std::string>& required) {
    std::vector<std::pair<int, std::string_view>> lines;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      ++line_no;
      auto line = trim(text.substr(pos, nl - pos));
      if (!line.empty() && line.front() != '#') lines.emplace_back(line_no, line);
      pos = nl + 1;
    }
    if (lines.empty()) throw SchemaViolation(name + ": missing header row");
    Table t(name, split_line(lines.front().second));
    for (const auto& col : required)
      if (!t.index_.count(col)) throw SchemaViolation(name + ": missing column '" + col + "'");
    for (std::size_t i = 1; i < lines.size(); ++i) {
      auto fields = split_line(lines[i].second);
      if (fields.size() != t.header_.size())
        throw SchemaViolation(name + ":" + std::to_string(lines[i].first) + ": expected " +
                              std::to_string(t.header_.size()) + " fields, found " +
                              std::to_string(fields.size()));
      t.rows_.emplace_back(&t, std::move(fields), lines[i].first);
    }
    return t;
  }

  static Table load(const std::filesystem::path& path, const std::vector<std::string>& required) {
    return parse(read_file(path), path.filename().string(), required);
  }

  Table(const Table& other) : name_(other.name_), header_(other.header_), index_(other.index_) {
    for (const auto& r : other.rows_) rows_.emplace_back(this, r.fields_, r.line_);
  }
  Table& operator=(const Table&) = delete;

  const std::string& name() const { return name_; }
  const std::vector<Row>& rows() const { return rows_; }
  bool has_column(std::string_view c) const { return index_.count(std::string(c)) > 0; }
  std::size_t column(std::string_view c) const {
    auto it = index_.find(std::string(c));
    if (it == index_.end()) throw SchemaViolation(name_ + ": missing column '" + std::string(c) + "'");
    return it->second;
  }

 private:
  friend class Row;
  std::string name_;
  std::vector<std::string> header_;
  std::map<std::string, std::size_t> index_;
  std::vector<Row> rows_;
};

inline const std::string& Row::text(std::string_view column) const { return fields_[table_->column(column)]; }

inline std::string Row::location(std::string_view column) const {
  return table_->name() + ":" + std::to_string(line_) + ": column '" + std::string(column) + "'";
}

inline double Row::number(std::string_view column) const {
  const auto& t = text(column);
  auto v = try_parse_number(t);
  if (!v) throw SchemaViolation(location(column) + ": expected a number, found '" + t + "'");
  return *v;
}

inline std::optional<double> Row::optional_number(std::string_view column) const {
  const auto& t = text(column);
  if (t.empty() || t == "-") return std::nullopt;
  return number(column);
}

inline int Row::integer(std::string_view column) const {
  double v = number(column);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw SchemaViolation(location(column) + ": expected an integer, found '" + text(column) + "'");
  return static_cast<int>(v);
}

/// Accumulates rows and writes them with a fixed header.
class Writer {
 public:
  explicit Writer(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_comment(std::string c) { comments_.push_back(std::move(c)); }
  void add_row(std::vector<std::string> fields) { rows_.push_back(std::move(fields)); }

  std::string str() const {
    std::string out;
    for (const auto& c : comments_) out += "# " + c + "\n";
    append(out, header_);
    for (const auto& r : rows_) append(out, r);
    return out;
  }

  void save(const std::filesystem::path& path) const;

 private:
  static void append(std::string& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += quote(fields[i]);
    }
    out += '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::string> comments_;
  std::vector<std::vector<std::string>> rows_;
};

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

inline void Writer::save(const std::filesystem::path& path) const { write_file(path, str()); }

}  // namespace greenchain::csv
