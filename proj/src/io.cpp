#include "cpce/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cpce/errors.hpp"

namespace cpce {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string matrix_to_csv(const SymmetricMatrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& cell, std::size_t line) {
  const std::string t = trim(cell);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size())
    throw InputError("line " + std::to_string(line) + ": '" + t + "' is not a number");
  return value;
}

std::vector<std::string> nonblank_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!trim(line).empty()) lines.push_back(line);
  return lines;
}

}  // namespace

Matrix parse_matrix_csv(const std::string& text) {
  const std::vector<std::string> lines = nonblank_lines(text);
  const std::size_t n = lines.size();
  if (n < 2) throw InputError("matrix CSV needs at least two rows");
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto cells = split_line(lines[i]);
    if (cells.size() != n)
      throw InputError("line " + std::to_string(i + 1) + ": expected " + std::to_string(n) +
                       " columns, found " + std::to_string(cells.size()));
    for (std::size_t j = 0; j < n; ++j) {
      m(i, j) = parse_number(cells[j], i + 1);
      if (!std::isfinite(m(i, j)))
        throw InputError("line " + std::to_string(i + 1) + ": non-finite entry");
    }
  }
  return m;
}

LoadedMatrix load_covariance(const std::filesystem::path& path, double tolerance) {
  const Matrix m = parse_matrix_csv(read_text_file(path));
  double asym = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j) asym = std::max(asym, std::abs(m(i, j) - m(j, i)));
  if (asym > tolerance)
    throw InputError(path.string() + ": matrix is not symmetric (max asymmetry " +
                     format_double(asym) + ")");
  for (std::size_t i = 0; i < m.rows(); ++i)
    if (m(i, i) < 0.0) throw InputError(path.string() + ": negative variance on the diagonal");
  return {SymmetricMatrix::symmetrize(m), asym};
}

std::string mask_to_csv(const ObservationMask& mask) {
  std::string out;
  for (const auto& [i, j] : mask.pairs()) out += std::to_string(i) + ',' + std::to_string(j) + '\n';
  return out;
}

ObservationMask parse_mask_csv(const std::string& text, std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  const auto lines = nonblank_lines(text);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto cells = split_line(lines[k]);
    if (cells.size() != 2) throw InputError("mask line " + std::to_string(k + 1) + ": need i,j");
    const double i = parse_number(cells[0], k + 1);
    const double j = parse_number(cells[1], k + 1);
    if (i < 0 || j < 0 || i != std::floor(i) || j != std::floor(j))
      throw InputError("mask line " + std::to_string(k + 1) + ": indices must be integers >= 0");
    pairs.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  try {
    return ObservationMask(n, std::move(pairs));
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("mask: ") + e.what());
  }
}

std::string trace_to_csv(const Trace& trace) {
  std::string out = "iteration,loss,mae,best_loss,best_mae\n";
  for (const TraceRecord& r : trace.records)
    out += std::to_string(r.iteration) + ',' + format_double(r.loss) + ',' + format_double(r.mae) +
           ',' + format_double(r.best_loss) + ',' + format_double(r.best_mae) + '\n';
  return out;
}

std::string aggregated_to_csv(const AggregatedTrace& agg) {
  std::string out = "iteration,mean_best_mae,std_best_mae\n";
  for (std::size_t t = 0; t < agg.mean_best_mae.size(); ++t)
    out += std::to_string(t) + ',' + format_double(agg.mean_best_mae[t]) + ',' +
           format_double(agg.std_best_mae[t]) + '\n';
  return out;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == name) return k;
  throw InputError("CSV has no column '" + name + "'");
}

double CsvTable::number(std::size_t row, const std::string& name) const {
  return parse_number(rows.at(row).at(column(name)), row + 2);
}

CsvTable parse_csv_table(const std::string& text) {
  const auto lines = nonblank_lines(text);
  if (lines.empty()) throw InputError("CSV is empty");
  CsvTable table;
  for (const auto& cell : split_line(lines[0])) table.header.push_back(trim(cell));
  for (std::size_t k = 1; k < lines.size(); ++k) {
    auto cells = split_line(lines[k]);
    if (cells.size() != table.header.size())
      throw InputError("CSV line " + std::to_string(k + 1) + ": column count differs from header");
    for (auto& c : cells) c = trim(c);
    table.rows.push_back(std::move(cells));
  }
  return table;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace cpce
