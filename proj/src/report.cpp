#include "boxsearch/report.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace boxsearch {

bool operator==(const Report& a, const Report& b) {
  return a.config == b.config && a.columns == b.columns && a.rows == b.rows;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  if (std::strpbrk(buf, ".eE") == nullptr && std::strchr(buf, 'n') == nullptr &&
      std::strchr(buf, 'i') == nullptr)
    std::strcat(buf, ".0");
  return buf;
}

namespace {

// Mirrors classify: any text from_chars fully consumes would change type on
// re-parse, so the writer has to quote it.
bool looks_numeric(const std::string& s) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  int64_t i = 0;
  auto ir = std::from_chars(begin, end, i);
  if (ir.ec == std::errc{} && ir.ptr == end) return true;
  double d = 0.0;
  auto dr = std::from_chars(begin, end, d);
  return dr.ec == std::errc{} && dr.ptr == end;
}

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n") != std::string::npos || looks_numeric(s);
}

std::string csv_escape(const std::string& s) {
  if (!needs_quoting(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string cell_to_csv(const Cell& cell) {
  if (const auto* i = std::get_if<int64_t>(&cell)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  return csv_escape(std::get<std::string>(cell));
}

// Splits one CSV record; a quoted field is remembered so it re-parses as a
// string even when it looks numeric.
struct RawField {
  std::string text;
  bool quoted = false;
};

std::vector<RawField> split_record(const std::string& line) {
  std::vector<RawField> fields;
  RawField cur;
  bool in_quotes = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.text += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cur.text += c;
      }
    } else if (c == '"' && cur.text.empty()) {
      in_quotes = true;
      cur.quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur = RawField{};
    } else {
      cur.text += c;
    }
  }
  if (in_quotes) throw std::invalid_argument("csv: unterminated quote");
  fields.push_back(std::move(cur));
  return fields;
}

Cell classify(const RawField& f) {
  if (f.quoted) return f.text;
  const char* begin = f.text.data();
  const char* end = begin + f.text.size();
  int64_t i = 0;
  auto ir = std::from_chars(begin, end, i);
  if (ir.ec == std::errc{} && ir.ptr == end) return i;
  double d = 0.0;
  auto dr = std::from_chars(begin, end, d);
  if (dr.ec == std::errc{} && dr.ptr == end) return d;
  return f.text;
}

}  // namespace

std::string to_csv(const Report& report) {
  std::string out = "# config " + report.config.dump() + "\n";
  for (size_t c = 0; c < report.columns.size(); ++c) {
    if (c) out += ',';
    out += csv_escape(report.columns[c]);
  }
  out += '\n';
  for (const auto& row : report.rows) {
    if (row.size() != report.columns.size())
      throw std::invalid_argument("csv: row width differs from header");
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += cell_to_csv(row[c]);
    }
    out += '\n';
  }
  return out;
}

Report parse_csv(const std::string& text) {
  Report report;

  // The config line is json.dump output, which never holds a raw newline.
  const size_t nl = text.find('\n');
  const std::string first = text.substr(0, nl);
  if (first.rfind("# config ", 0) != 0)
    throw std::invalid_argument("csv: missing '# config' header line");
  report.config = nlohmann::json::parse(first.substr(9));

  // Records split on newlines outside quotes, so quoted cells may span
  // lines; doubled quotes toggle the state twice and cancel out.
  std::vector<std::string> records;
  std::string cur;
  bool in_quotes = false;
  for (size_t i = nl == std::string::npos ? text.size() : nl + 1; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '"') in_quotes = !in_quotes;
    if (c == '\n' && !in_quotes) {
      records.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (in_quotes) throw std::invalid_argument("csv: unterminated quote");
  if (!cur.empty()) records.push_back(std::move(cur));

  if (records.empty()) throw std::invalid_argument("csv: missing column header");
  for (const RawField& f : split_record(records[0])) report.columns.push_back(f.text);

  for (size_t r = 1; r < records.size(); ++r) {
    if (records[r].empty()) continue;
    std::vector<Cell> row;
    for (const RawField& f : split_record(records[r])) row.push_back(classify(f));
    if (row.size() != report.columns.size())
      throw std::invalid_argument("csv: row width differs from header");
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

std::string json_cell(const Cell& cell) {
  if (const auto* i = std::get_if<int64_t>(&cell)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  return nlohmann::json(std::get<std::string>(cell)).dump();
}

}  // namespace

std::string to_json(const Report& report) {
  std::string out = "{\"config\":" + report.config.dump() + ",\"columns\":";
  out += nlohmann::json(report.columns).dump();
  out += ",\"rows\":[";
  for (size_t r = 0; r < report.rows.size(); ++r) {
    if (r) out += ',';
    out += '[';
    for (size_t c = 0; c < report.rows[r].size(); ++c) {
      if (c) out += ',';
      out += json_cell(report.rows[r][c]);
    }
    out += ']';
  }
  out += "]}\n";
  return out;
}

Report parse_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  Report report;
  report.config = j.at("config");
  report.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& jrow : j.at("rows")) {
    std::vector<Cell> row;
    for (const auto& v : jrow) {
      if (v.is_number_integer())
        row.emplace_back(v.get<int64_t>());
      else if (v.is_number_float())
        row.emplace_back(v.get<double>());
      else if (v.is_string())
        row.emplace_back(v.get<std::string>());
      else
        throw std::invalid_argument("json report: unsupported cell type");
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace boxsearch
