#include "btq/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace btq {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& values) {
  if (values.size() != header_.size())
    throw PreconditionError("CsvTable: row width does not match header");
  rows_.push_back(values);
}

void CsvTable::write(std::ostream& out) const {
  for (std::size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << header_[i];
  out << "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << "\n";
  }
}

void CsvTable::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write(out);
}

std::size_t CsvData::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw PreconditionError("csv: missing column '" + name + "'");
}

CsvData read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path);
  CsvData data;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      data.header = cells;
      first = false;
      continue;
    }
    if (cells.size() != data.header.size())
      throw PreconditionError("csv: ragged row in " + path);
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(std::stod(c));
    data.rows.push_back(std::move(row));
  }
  if (first) throw PreconditionError("csv: empty file " + path);
  return data;
}

void write_operator(std::ostream& out, const ComplexMatrix& a, int k) {
  out << "dim " << a.rows() << " k " << k << "\n";
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j)
      out << (j ? " " : "") << format_number(a(i, j).real()) << " "
          << format_number(a(i, j).imag());
    out << "\n";
  }
}

ComplexMatrix read_operator(std::istream& in, int* k) {
  std::string tag1, tag2;
  int n = 0, level = 0;
  if (!(in >> tag1 >> n >> tag2 >> level) || tag1 != "dim" || tag2 != "k" || n < 1)
    throw PreconditionError("read_operator: bad header");
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double re, im;
      if (!(in >> re >> im)) throw PreconditionError("read_operator: truncated body");
      a(i, j) = Complex(re, im);
    }
  if (k) *k = level;
  return a;
}

CsvTable metric_table(const MetricField& field, const MetricDecomposition& decomposition) {
  CsvTable t({"theta", "phi", "G11", "G12", "G22", "J11", "J12", "J21", "J22", "rho11", "rho12",
              "rho22", "sqrt_detG"});
  for (std::size_t q = 0; q < field.G.size(); ++q) {
    const auto& g = field.G[q];
    const auto& d = decomposition.points[q];
    t.add_row({field.points[q].theta, field.points[q].phi, g(0, 0), g(0, 1), g(1, 1), d.J(0, 0),
               d.J(0, 1), d.J(1, 0), d.J(1, 1), d.rho(0, 0), d.rho(0, 1), d.rho(1, 1), d.alpha});
  }
  return t;
}

} // namespace btq
