#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace wcost {

/// n aligned observation pairs with cached ascending copies of each column.
class PairedSample {
 public:
  PairedSample() = default;
  PairedSample(std::vector<double> xs, std::vector<double> ys, std::string provenance = "memory");

  std::size_t size() const noexcept { return xs_.size(); }
  const std::vector<double>& xs() const noexcept { return xs_; }
  const std::vector<double>& ys() const noexcept { return ys_; }
  const std::vector<double>& sorted_xs() const noexcept { return sx_; }
  const std::vector<double>& sorted_ys() const noexcept { return sy_; }
  const std::string& provenance() const noexcept { return provenance_; }

 private:
  std::vector<double> xs_, ys_, sx_, sy_;
  std::string provenance_;
};

/// Rows of a numeric CSV. A first row that does not parse as numbers is taken
/// as a header. Every row must have the same column count; errors name the line.
std::vector<std::vector<double>> parse_numeric_csv(std::string_view text, std::string_view source = "<text>");

/// Two-column CSV text (x,y per row) into a PairedSample.
PairedSample parse_pairs_csv(std::string_view text, std::string_view source = "<text>");
PairedSample ingest_csv(const std::string& path);
/// First column of a CSV file, for one-sample use.
std::vector<double> ingest_column_csv(const std::string& path);

}  // namespace wcost
