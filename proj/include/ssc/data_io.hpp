#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ssc/matrix.hpp"
#include "ssc/ssc_admm.hpp"

namespace ssc {

/// Grayscale frame, pixels row-major in [0, 1].
struct Frame {
  std::string path;
  int width = 0;
  int height = 0;
  std::vector<double> pixels;
};

using FrameSet = std::vector<Frame>;

/// Parses a P2 or P5 PGM image (maxval 1..65535). Errors carry the byte
/// offset where parsing stopped.
Frame parse_pgm(std::string_view bytes, const std::string& source = "<memory>");
Frame load_frame(const std::filesystem::path& path);

/// Loads every file matching `pattern` in lexicographic path order.
FrameSet load_frames(const std::string& pattern);

/// Column i is frame i flattened. With `normalize`, nonzero columns are
/// scaled to unit l2 norm.
DataMatrix frames_to_matrix(const FrameSet& frames, bool normalize);

struct SyntheticDataset {
  DataMatrix Y;
  std::vector<int> labels;
  std::vector<Matrix> bases;  // D x d, orthonormal
  double noise_sigma = 0.0;
};

/// K random d-dimensional subspaces of R^D with n_per unit-norm points each.
/// Bases are redrawn (up to 100 times) while any pair of subspaces has a
/// principal-angle cosine above 0.9.
SyntheticDataset synth_union_of_subspaces(int K, int d, int D, int n_per,
                                          double noise_sigma, std::uint64_t seed);

/// Pixel values round(255 |m_ij| / max |m|), row-major.
std::vector<std::uint8_t> heatmap_pixels(const Matrix& m);
void export_heatmap(const Matrix& m, const std::filesystem::path& path);

void export_labels(std::span<const int> labels, const std::filesystem::path& path);
std::vector<int> read_labels(const std::filesystem::path& path);

void export_convergence(std::span<const Residuals> history,
                        const std::filesystem::path& path);
std::vector<Residuals> read_convergence(const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace ssc
