#include "mtdiag/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mtdiag/error.hpp"

namespace mtdiag {

namespace {

bool needs_quoting(const std::string& cell) {
  return cell.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quote(const std::string& cell) {
  if (!needs_quoting(cell)) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool in_quotes = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c == '\r') {
      // tolerate CRLF
    } else {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

CsvTable parse_csv(const std::string& content) {
  CsvTable table;
  std::istringstream in(content);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen && !line.empty() && line[0] == '#') {
      table.comments.push_back(line);
      continue;
    }
    if (line.empty()) continue;
    if (!header_seen) {
      table.header = split_record(line);
      header_seen = true;
    } else {
      table.rows.push_back(split_record(line));
    }
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  return parse_csv(read_file(path));
}

void CsvWriter::comment(const std::string& line) { comments_.push_back("# " + line); }

void CsvWriter::header(std::vector<std::string> columns) { header_ = std::move(columns); }

void CsvWriter::row(std::vector<std::string> cells) {
  if (!header_.empty() && cells.size() != header_.size()) {
    throw Error("csv row has " + std::to_string(cells.size()) + " cells, header has " +
                std::to_string(header_.size()));
  }
  rows_.push_back(std::move(cells));
}

std::string CsvWriter::str() const {
  std::string out;
  for (const auto& c : comments_) out += c + "\n";
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      out += quote(cells[i]);
    }
    out += '\n';
  };
  if (!header_.empty()) emit(header_);
  for (const auto& r : rows_) emit(r);
  return out;
}

void CsvWriter::write(const std::string& path) const { write_file(path, str()); }

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  std::string out(buf);
  if (out == "-0" || out.rfind("-0.", 0) == 0) {
    // normalize negative zero
    bool all_zero = true;
    for (char c : out) {
      if (c != '-' && c != '0' && c != '.') all_zero = false;
    }
    if (all_zero) out = out.substr(1);
  }
  return out;
}

std::string format_percent(double ratio, int decimals) {
  return format_fixed(ratio * 100.0, decimals) + "%";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
}

std::optional<double> parse_double(const std::string& text) {
  if (text.empty()) return std::nullopt;
  try {
    size_t pos = 0;
    double v = std::stod(text, &pos);
    if (pos != text.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace mtdiag
