#pragma once

#include <map>
#include <string>
#include <vector>

#include "lpl/gaussian_mixture.hpp"
#include "lpl/metrics.hpp"

namespace lpl {

/// GMM specification file: flat text, `#` comments, keys
///   d = <int>            dimension
///   k = <int>            component count
///   weights = w1 ... wk           (must sum to 1 within 1e-9)
///   means = m1_1 ... m1_d  m2_1 ...   (k*d reals, row-major)
///   covs = c1_11 c1_12 ... (k*d*d reals, row-major per component)
/// Unknown keys and malformed values are rejected with a diagnostic.
GaussianMixture parse_gmm_file(const std::string& path);
GaussianMixture parse_gmm_text(const std::string& text, const std::string& origin);
void write_gmm_file(const std::string& path, const GaussianMixture& gmm);

/// Flat key=value config text; `#` comments; unknown keys are reported by
/// validate_keys. Values keep their raw string form.
class KeyValueConfig {
 public:
  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_text(const std::string& text, const std::string& origin);

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  /// Throws ContractViolation naming any key outside `allowed`.
  void validate_keys(const std::vector<std::string>& allowed) const;
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
  std::string origin_ = "<config>";
};

/// RFC-4180-style CSV writer: header row, '.' decimal, UTF-8, deterministic
/// %.17g number formatting (reruns are byte-identical).
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& cells);
  std::string str() const;
  void save(const std::string& path) const;
  static std::string format(double v);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// 8-bit grayscale image IO; values in [0,1] map linearly onto 0..255.
Matrix read_pgm(const std::string& path);           // P2 or P5
void write_pgm(const std::string& path, const Matrix& image);  // P5

struct SvgScatterSpec {
  Vector lo, hi;              // data window (d == 2)
  Matrix contour_field;       // density values for marching-squares contours
  std::vector<double> levels;
  Matrix points;              // n x 2 scatter
  std::string title;
};

/// 800x800 SVG: density contours (marching squares) plus 1.5-px sample dots.
std::string render_scatter_svg(const SvgScatterSpec& spec);
void save_text(const std::string& path, const std::string& text);
std::string load_text(const std::string& path);

}  // namespace lpl
