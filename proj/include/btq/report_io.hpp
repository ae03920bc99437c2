#pragma once

// Text artifacts: CSV tables at full double precision and the operator dump format.

#include "btq/operator_core.hpp"
#include "btq/unsharpness.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace btq {

/// Shortest round-trip-safe rendering with 17 significant digits.
std::string format_number(double v);

class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<double>& values);
  void write(std::ostream& out) const;
  void write(const std::string& path) const;
  std::size_t rows() const { return rows_.size(); }

private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  /// Column index by name; throws if absent.
  std::size_t column(const std::string& name) const;
};

CsvData read_csv(const std::string& path);

/// "dim <n> k <k>" then n rows of n "re im" pairs.
void write_operator(std::ostream& out, const ComplexMatrix& a, int k);
ComplexMatrix read_operator(std::istream& in, int* k = nullptr);

/// theta, phi, G11, G12, G22, J11, J12, J21, J22, rho11, rho12, rho22, sqrt_detG.
CsvTable metric_table(const MetricField& field, const MetricDecomposition& decomposition);

} // namespace btq
