#include "wcost/sample.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wcost/error.hpp"

namespace wcost {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open data file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

PairedSample::PairedSample(std::vector<double> xs, std::vector<double> ys, std::string provenance)
    : xs_(std::move(xs)), ys_(std::move(ys)), provenance_(std::move(provenance)) {
  if (xs_.size() != ys_.size()) throw ValidationError("paired sample columns differ in length");
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    if (!std::isfinite(xs_[i]) || !std::isfinite(ys_[i])) throw ValidationError("paired sample contains a non-finite value");
  }
  sx_ = xs_;
  sy_ = ys_;
  std::sort(sx_.begin(), sx_.end());
  std::sort(sy_.begin(), sy_.end());
}

std::vector<std::vector<double>> parse_numeric_csv(std::string_view text, std::string_view source) {
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF && static_cast<unsigned char>(text[1]) == 0xBB &&
      static_cast<unsigned char>(text[2]) == 0xBF) {
    text.remove_prefix(3);
  }
  std::vector<std::vector<double>> rows;
  std::size_t columns = 0;
  std::size_t line_no = 0;
  bool first_content = true;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line.empty()) continue;

    const auto fields = split(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i) numeric = numeric && parse_double(fields[i], row[i]);
    const auto where = [&] {
      std::ostringstream os;
      os << source << ":" << line_no << ": ";
      return os.str();
    };
    if (first_content) {
      first_content = false;
      columns = fields.size();
      if (!numeric) continue;  // header row
    }
    if (fields.size() != columns) {
      std::ostringstream os;
      os << where() << "expected " << columns << " columns, found " << fields.size();
      throw ValidationError(os.str());
    }
    if (!numeric) throw ValidationError(where() + "non-numeric value in '" + std::string(line) + "'");
    for (const double v : row) {
      if (!std::isfinite(v)) throw ValidationError(where() + "non-finite value");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError(std::string(source) + ": no data rows");
  return rows;
}

PairedSample parse_pairs_csv(std::string_view text, std::string_view source) {
  const auto rows = parse_numeric_csv(text, source);
  if (rows.front().size() != 2) {
    std::ostringstream os;
    os << source << ": expected 2 columns (x,y), found " << rows.front().size();
    throw ValidationError(os.str());
  }
  std::vector<double> xs, ys;
  xs.reserve(rows.size());
  ys.reserve(rows.size());
  for (const auto& r : rows) {
    xs.push_back(r[0]);
    ys.push_back(r[1]);
  }
  return PairedSample(std::move(xs), std::move(ys), "csv:" + std::string(source));
}

PairedSample ingest_csv(const std::string& path) { return parse_pairs_csv(read_file(path), path); }

std::vector<double> ingest_column_csv(const std::string& path) {
  const auto rows = parse_numeric_csv(read_file(path), path);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[0]);
  return out;
}

}  // namespace wcost
