#pragma once

#include "pdfp/linop.hpp"
#include "pdfp/problems.hpp"
#include "pdfp/solver.hpp"

#include <string>
#include <utility>
#include <vector>

namespace pdfp {
namespace io {

/// Parses "label idx:val idx:val ..." lines with 1-based indices. Labels
/// {0,1} are remapped to {-1,+1}; q is the largest index seen; missing
/// indices are zeros. Malformed tokens and labels outside {-1,0,+1} are
/// rejected with the line number.
LogRegDataset load_libsvm(const std::string& path);

struct PgmImage {
    DenseVector pixels;  // row-major, values in [0, maxval]
    std::size_t height = 0;
    std::size_t width = 0;
    int maxval = 255;
};

/// Reads P2 (ASCII) or P5 (binary) PGM with maxval <= 255; '#' comments
/// are skipped.
PgmImage load_pgm(const std::string& path);

/// Writes binary P5, clamping to [0, maxval] and rounding half-to-even.
/// The write is atomic (temp file + rename).
void save_pgm(const std::string& path, const PgmImage& image);

/// Comma-separated rows of decimal literals, no header.
DenseMatrixMap load_matrix_csv(const std::string& path);

/// Writes "iter,objective,km_residual_P,primal_change,elapsed_ms" rows with
/// 12 significant digits, atomically.
void write_trace_csv(const std::string& path, const std::vector<ConvergenceRecord>& trace);

/// key=value lines, atomically.
void write_summary(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& entries);

/// 12-significant-digit decimal rendering shared by trace and summary.
std::string format_g12(double v);

}  // namespace io
}  // namespace pdfp
