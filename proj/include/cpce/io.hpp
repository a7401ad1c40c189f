#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cpce/linalg.hpp"
#include "cpce/optimizer.hpp"

namespace cpce {

/// printf("%.17g"), the lossless round-trip format used by every CSV.
std::string format_double(double value);

/// One row per line, no header.
std::string matrix_to_csv(const SymmetricMatrix& m);

/// Parses a square numeric CSV. Throws InputError on malformed input.
Matrix parse_matrix_csv(const std::string& text);

struct LoadedMatrix {
  SymmetricMatrix matrix;
  double asymmetry = 0.0;  // max |A_ij - A_ji| before symmetrizing
};

/// Reads a covariance matrix. Input asymmetric by more than `tolerance`
/// is rejected; smaller asymmetry is averaged away and reported.
LoadedMatrix load_covariance(const std::filesystem::path& path, double tolerance = 1e-9);

/// "i,j" per observed pair, 0-based, j < i.
std::string mask_to_csv(const ObservationMask& mask);
ObservationMask parse_mask_csv(const std::string& text, std::size_t n);

/// iteration,loss,mae,best_loss,best_mae
std::string trace_to_csv(const Trace& trace);
/// iteration,mean_best_mae,std_best_mae
std::string aggregated_to_csv(const AggregatedTrace& agg);

/// Header plus rows of a simple numeric/text CSV.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};
CsvTable parse_csv_table(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary file and renames it into place.
void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace cpce
