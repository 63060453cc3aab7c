#include "pec/csv.hpp"

#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

namespace pec::csv {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += quote(cells[i]);
  }
  return out + "\n";
}

}  // namespace

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{}", x);
}

void Table::comment(const std::string& key, const std::string& value) {
  comments_.push_back("# " + key + "=" + value + "\n");
}

void Table::header(std::vector<std::string> columns) { header_ = std::move(columns); }

void Table::row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw std::logic_error("CSV row width differs from header");
  rows_.push_back(std::move(cells));
}

std::string Table::str() const {
  std::string out;
  for (const auto& c : comments_) out += c;
  out += line(header_);
  for (const auto& r : rows_) out += line(r);
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ';';
    out += num(xs[i]);
  }
  return out;
}

}  // namespace pec::csv
