#pragma once

#include <string>
#include <vector>

namespace pec::csv {

// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite.
std::string num(double x);

// Config echo as "# key=value" lines, then one header row, then data rows.
class Table {
public:
  void comment(const std::string& key, const std::string& value);
  void header(std::vector<std::string> columns);
  void row(std::vector<std::string> cells);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

private:
  std::vector<std::string> comments_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string join(const std::vector<double>& xs);

}  // namespace pec::csv
