#pragma once

#include <optional>
#include <string>
#include <vector>

namespace mtdiag {

/// Minimal RFC-4180-style CSV support: comma separator, double-quote
/// escaping, "\n" record separator. Leading lines starting with '#' are
/// treated as comments on read and preserved separately.
struct CsvTable {
  std::vector<std::string> comments;  // leading '#' lines, without newline
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& content);

class CsvWriter {
 public:
  void comment(const std::string& line);  // emitted before the header
  void header(std::vector<std::string> columns);
  void row(std::vector<std::string> cells);
  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> comments_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Fixed-point decimal formatting, e.g. format_fixed(1.62785, 2) == "1.63".
/// All tabular output goes through this so reruns are byte-identical.
std::string format_fixed(double value, int decimals);

/// format_fixed on value*100 with a trailing '%'.
std::string format_percent(double ratio, int decimals);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

std::optional<double> parse_double(const std::string& text);

}  // namespace mtdiag
