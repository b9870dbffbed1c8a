#include "ssc/data_io.hpp"

#include <glob.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "ssc/errors.hpp"

namespace ssc {

namespace {

class PgmReader {
 public:
  PgmReader(std::string_view bytes, const std::string& source)
      : bytes_(bytes), source_(source) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError(source_ + ": " + what + " at byte offset " + std::to_string(pos_));
  }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_int(const char* field) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) {
      pos_ = start;
      fail(std::string("expected ") + field);
    }
    long value = 0;
    const auto [ptr, ec] = std::from_chars(bytes_.data() + start, bytes_.data() + pos_, value);
    if (ec != std::errc()) {
      pos_ = start;
      fail(std::string(field) + " out of range");
    }
    (void)ptr;
    return value;
  }

  std::string_view magic() {
    if (bytes_.size() < 2) fail("file too short for a PGM magic number");
    pos_ = 2;
    return bytes_.substr(0, 2);
  }

  std::size_t pos() const noexcept { return pos_; }
  void advance(std::size_t n) { pos_ += n; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
  unsigned char at(std::size_t offset) const {
    return static_cast<unsigned char>(bytes_[pos_ + offset]);
  }

 private:
  std::string_view bytes_;
  std::string source_;
  std::size_t pos_ = 0;
};

void ensure_stream(const std::ios& stream, const std::filesystem::path& path,
                   const char* action) {
  if (!stream) throw IoError(std::string("cannot ") + action + " " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  ensure_stream(in, path, "open");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

template <typename T>
T parse_field(std::string_view text, const std::filesystem::path& path, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InputError(path.string() + ":" + std::to_string(line) + ": cannot parse '" +
                     std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

Frame parse_pgm(std::string_view bytes, const std::string& source) {
  PgmReader reader(bytes, source);
  const std::string_view magic = reader.magic();
  const bool binary = magic == "P5";
  if (!binary && magic != "P2") {
    throw InputError(source + ": unsupported magic number '" + std::string(magic) +
                     "' at byte offset 0 (expected P2 or P5)");
  }
  const long width = reader.read_int("width");
  const long height = reader.read_int("height");
  const std::size_t maxval_offset = reader.pos();
  const long maxval = reader.read_int("maxval");
  if (width < 1 || height < 1) reader.fail("image dimensions must be positive");
  if (maxval < 1 || maxval > 65535) {
    throw InputError(source + ": maxval " + std::to_string(maxval) +
                     " outside [1, 65535] at byte offset " + std::to_string(maxval_offset));
  }

  Frame frame;
  frame.path = source;
  frame.width = static_cast<int>(width);
  frame.height = static_cast<int>(height);
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  frame.pixels.resize(count);
  const double scale = static_cast<double>(maxval);

  if (binary) {
    // Exactly one whitespace byte separates the header from the payload.
    if (reader.remaining() < 1) reader.fail("missing payload");
    reader.advance(1);
    const std::size_t sample_bytes = maxval < 256 ? 1 : 2;
    const std::size_t expected = count * sample_bytes;
    if (reader.remaining() < expected) {
      reader.fail("truncated payload: expected " + std::to_string(expected) +
                  " bytes, got " + std::to_string(reader.remaining()));
    }
    for (std::size_t i = 0; i < count; ++i) {
      long sample = sample_bytes == 1
                        ? reader.at(i)
                        : (static_cast<long>(reader.at(2 * i)) << 8) | reader.at(2 * i + 1);
      if (sample > maxval) reader.fail("sample exceeds maxval");
      frame.pixels[i] = static_cast<double>(sample) / scale;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const long sample = reader.read_int("pixel value");
      if (sample > maxval) reader.fail("sample exceeds maxval");
      frame.pixels[i] = static_cast<double>(sample) / scale;
    }
  }
  return frame;
}

Frame load_frame(const std::filesystem::path& path) {
  return parse_pgm(read_file(path), path.string());
}

FrameSet load_frames(const std::string& pattern) {
  glob_t matches{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &matches);
  std::vector<std::string> paths;
  if (rc == 0) {
    for (std::size_t i = 0; i < matches.gl_pathc; ++i) paths.emplace_back(matches.gl_pathv[i]);
  }
  ::globfree(&matches);
  if (rc == GLOB_NOMATCH || paths.empty()) {
    throw InputError("no frames match '" + pattern + "'");
  }
  if (rc != 0) throw IoError("cannot expand frame pattern '" + pattern + "'");
  std::sort(paths.begin(), paths.end());
  FrameSet frames;
  frames.reserve(paths.size());
  for (const auto& p : paths) frames.push_back(load_frame(p));
  return frames;
}

DataMatrix frames_to_matrix(const FrameSet& frames, bool normalize) {
  if (frames.empty()) throw InputError("no frames given");
  const int width = frames.front().width;
  const int height = frames.front().height;
  std::string offenders;
  for (const auto& f : frames) {
    if (f.width != width || f.height != height) {
      offenders += "\n  " + f.path + " (" + std::to_string(f.width) + "x" +
                   std::to_string(f.height) + ")";
    }
  }
  if (!offenders.empty()) {
    throw InputError("frames differ from " + std::to_string(width) + "x" +
                     std::to_string(height) + ":" + offenders);
  }
  const Eigen::Index dim = static_cast<Eigen::Index>(width) * height;
  Matrix y(dim, static_cast<Eigen::Index>(frames.size()));
  for (std::size_t j = 0; j < frames.size(); ++j) {
    y.col(static_cast<Eigen::Index>(j)) =
        Eigen::Map<const Vector>(frames[j].pixels.data(), dim);
  }
  return DataMatrix(normalize ? normalize_columns(y) : std::move(y));
}

SyntheticDataset synth_union_of_subspaces(int K, int d, int D, int n_per,
                                          double noise_sigma, std::uint64_t seed) {
  if (K < 1) throw InputError("K must be at least 1");
  if (d < 1 || d >= D) throw InputError("subspace dimension must satisfy 1 <= d < D");
  if (n_per < 1) throw InputError("n_per must be at least 1");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw InputError("noise_sigma must be finite and nonnegative");
  }

  constexpr int kMaxBasisDraws = 100;
  constexpr double kMaxPrincipalCosine = 0.9;

  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&](Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(engine);
    return m;
  };

  std::vector<Matrix> bases;
  bool separated = false;
  for (int attempt = 0; attempt < kMaxBasisDraws && !separated; ++attempt) {
    bases.clear();
    for (int k = 0; k < K; ++k) {
      Eigen::HouseholderQR<Matrix> qr(gaussian(D, d));
      bases.push_back(qr.householderQ() * Matrix::Identity(D, d));
    }
    separated = true;
    for (int a = 0; a < K && separated; ++a) {
      for (int b = a + 1; b < K && separated; ++b) {
        Eigen::JacobiSVD<Matrix> svd(bases[a].transpose() * bases[b]);
        if (svd.singularValues()(0) > kMaxPrincipalCosine) separated = false;
      }
    }
  }
  if (!separated) {
    throw InputError("could not draw subspaces with principal-angle cosines <= 0.9");
  }

  Matrix y(D, static_cast<Eigen::Index>(K) * n_per);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(K) * n_per);
  Eigen::Index col = 0;
  for (int k = 0; k < K; ++k) {
    for (int p = 0; p < n_per; ++p, ++col) {
      Vector coeffs = gaussian(d, 1);
      coeffs.normalize();
      Vector point = bases[k] * coeffs;
      if (noise_sigma > 0.0) {
        Vector noise = gaussian(D, 1);
        noise.normalize();
        point += noise_sigma * noise;
      }
      y.col(col) = point;
      labels.push_back(k);
    }
  }
  return {DataMatrix(normalize_columns(y)), std::move(labels), std::move(bases), noise_sigma};
}

std::vector<std::uint8_t> heatmap_pixels(const Matrix& m) {
  if (!m.allFinite()) throw InputError("heatmap matrix has non-finite entries");
  const double peak = m.size() > 0 ? m.cwiseAbs().maxCoeff() : 0.0;
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(m.size()), 0);
  if (peak == 0.0) return pixels;
  std::size_t idx = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      pixels[idx++] = static_cast<std::uint8_t>(std::lround(255.0 * std::abs(m(i, j)) / peak));
    }
  }
  return pixels;
}

void export_heatmap(const Matrix& m, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> pixels = heatmap_pixels(m);
  std::ofstream out(path, std::ios::binary);
  ensure_stream(out, path, "open for writing");
  out << "P5\n" << m.cols() << ' ' << m.rows() << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  out.close();
  ensure_stream(out, path, "write");
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void export_labels(std::span<const int> labels, const std::filesystem::path& path) {
  if (labels.empty()) throw InputError("no labels to export");
  std::ofstream out(path, std::ios::binary);
  ensure_stream(out, path, "open for writing");
  out << "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
  out.close();
  ensure_stream(out, path, "write");
}

std::vector<int> read_labels(const std::filesystem::path& path) {
  const auto lines = split_lines(read_file(path));
  if (lines.empty() || lines.front() != "index,label") {
    throw InputError(path.string() + ": missing 'index,label' header");
  }
  std::vector<int> labels;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto fields = split_commas(lines[n]);
    if (fields.size() != 2) throw InputError(path.string() + ": malformed line " + std::to_string(n + 1));
    if (parse_field<std::size_t>(fields[0], path, n + 1) != labels.size()) {
      throw InputError(path.string() + ": out-of-order index on line " + std::to_string(n + 1));
    }
    labels.push_back(parse_field<int>(fields[1], path, n + 1));
  }
  return labels;
}

void export_convergence(std::span<const Residuals> history,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  ensure_stream(out, path, "open for writing");
  out << "iteration,r1,r2,r3\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    const Residuals& r = history[i];
    out << (i + 1) << ',' << format_double(r.feasibility) << ','
        << format_double(r.coupling) << ',' << format_double(r.change) << '\n';
  }
  out.close();
  ensure_stream(out, path, "write");
}

std::vector<Residuals> read_convergence(const std::filesystem::path& path) {
  const auto lines = split_lines(read_file(path));
  if (lines.empty() || lines.front() != "iteration,r1,r2,r3") {
    throw InputError(path.string() + ": missing 'iteration,r1,r2,r3' header");
  }
  std::vector<Residuals> history;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto fields = split_commas(lines[n]);
    if (fields.size() != 4) throw InputError(path.string() + ": malformed line " + std::to_string(n + 1));
    Residuals r;
    r.feasibility = parse_field<double>(fields[1], path, n + 1);
    r.coupling = parse_field<double>(fields[2], path, n + 1);
    r.change = parse_field<double>(fields[3], path, n + 1);
    history.push_back(r);
  }
  return history;
}

}  // namespace ssc
