#include "lpl/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lpl {

namespace {
std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_reals(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ContractViolation(what + ": cannot parse real '" + tok + "'");
    }
    if (used != tok.size()) throw ContractViolation(what + ": cannot parse real '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::map<std::string, std::string> parse_kv_lines(const std::string& text,
                                                  const std::string& origin) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ContractViolation(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = strip(line.substr(0, eq));
    const std::string val = strip(line.substr(eq + 1));
    if (key.empty()) throw ContractViolation(origin + ":" + std::to_string(lineno) + ": empty key");
    if (kv.count(key))
      throw ContractViolation(origin + ": duplicate key '" + key + "'");
    kv[key] = val;
  }
  return kv;
}
}  // namespace

GaussianMixture parse_gmm_text(const std::string& text, const std::string& origin) {
  auto kv = parse_kv_lines(text, origin);
  for (const auto& [key, _] : kv)
    if (key != "d" && key != "k" && key != "weights" && key != "means" && key != "covs")
      throw ContractViolation(origin + ": unknown key '" + key + "'");
  for (const char* key : {"d", "k", "weights", "means", "covs"})
    if (!kv.count(key)) throw ContractViolation(origin + ": missing key '" + std::string(key) + "'");

  const auto dv = parse_reals(kv["d"], origin + ": d");
  const auto kvv = parse_reals(kv["k"], origin + ": k");
  if (dv.size() != 1 || kvv.size() != 1)
    throw ContractViolation(origin + ": d and k must be single integers");
  const int d = static_cast<int>(dv[0]);
  const int k = static_cast<int>(kvv[0]);
  if (d < 1 || k < 1) throw ContractViolation(origin + ": d and k must be >= 1");

  const auto w = parse_reals(kv["weights"], origin + ": weights");
  const auto m = parse_reals(kv["means"], origin + ": means");
  const auto c = parse_reals(kv["covs"], origin + ": covs");
  if (static_cast<int>(w.size()) != k)
    throw ContractViolation(origin + ": weights needs exactly k = " + std::to_string(k) +
                            " entries, got " + std::to_string(w.size()));
  if (static_cast<int>(m.size()) != k * d)
    throw ContractViolation(origin + ": means needs k*d = " + std::to_string(k * d) +
                            " entries, got " + std::to_string(m.size()));
  if (static_cast<int>(c.size()) != k * d * d)
    throw ContractViolation(origin + ": covs needs k*d*d = " + std::to_string(k * d * d) +
                            " entries, got " + std::to_string(c.size()));

  double wsum = 0.0;
  for (double x : w) wsum += x;
  if (std::abs(wsum - 1.0) > 1e-9)
    throw ContractViolation(origin + ": weights sum to " + std::to_string(wsum) +
                            ", must be 1 within 1e-9");

  Vector weights(k);
  for (int i = 0; i < k; ++i) weights[i] = w[i];
  // pin the largest weight so the exact-sum constructor check passes
  int imax = 0;
  weights.maxCoeff(&imax);
  double rest = 0.0;
  for (int i = 0; i < k; ++i)
    if (i != imax) rest += weights[i];
  weights[imax] = 1.0 - rest;

  std::vector<Vector> means(k);
  std::vector<Matrix> covs(k);
  for (int i = 0; i < k; ++i) {
    means[i] = Eigen::Map<const Vector>(m.data() + i * d, d);
    covs[i] = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                             Eigen::RowMajor>>(c.data() + i * d * d, d, d);
  }
  try {
    return GaussianMixture(weights, std::move(means), std::move(covs));
  } catch (const ContractViolation& e) {
    throw ContractViolation(origin + ": " + e.what());
  }
}

GaussianMixture parse_gmm_file(const std::string& path) {
  return parse_gmm_text(load_text(path), path);
}

void write_gmm_file(const std::string& path, const GaussianMixture& gmm) {
  std::ostringstream os;
  os << "d = " << gmm.dim() << "\n";
  os << "k = " << gmm.components() << "\n";
  os << "weights =";
  for (int i = 0; i < gmm.components(); ++i) os << " " << CsvWriter::format(gmm.weights()[i]);
  os << "\nmeans =";
  for (const auto& m : gmm.means())
    for (int i = 0; i < m.size(); ++i) os << " " << CsvWriter::format(m[i]);
  os << "\ncovs =";
  for (const auto& c : gmm.covariances())
    for (int i = 0; i < c.rows(); ++i)
      for (int j = 0; j < c.cols(); ++j) os << " " << CsvWriter::format(c(i, j));
  os << "\n";
  save_text(path, os.str());
}

KeyValueConfig KeyValueConfig::from_text(const std::string& text, const std::string& origin) {
  KeyValueConfig cfg;
  cfg.kv_ = parse_kv_lines(text, origin);
  cfg.origin_ = origin;
  return cfg;
}

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  return from_text(load_text(path), path);
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const auto vals = parse_reals(it->second, origin_ + ": " + key);
  if (vals.size() != 1) throw ContractViolation(origin_ + ": " + key + " must be a single real");
  return vals[0];
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
  const double v = get_double(key, static_cast<double>(fallback));
  const auto r = static_cast<std::int64_t>(std::llround(v));
  if (std::abs(v - static_cast<double>(r)) > 1e-9)
    throw ContractViolation(origin_ + ": " + key + " must be an integer");
  return r;
}

void KeyValueConfig::validate_keys(const std::vector<std::string>& allowed) const {
  for (const auto& [key, _] : kv_) {
    bool ok = false;
    for (const auto& a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) throw ContractViolation(origin_ + ": unknown key '" + key + "'");
  }
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  require(cells.size() == header_.size(), "CsvWriter: row width mismatch");
  rows_.push_back(cells);
}

std::string CsvWriter::format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {
std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}
}  // namespace

std::string CsvWriter::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header_.size(); ++i)
    os << (i ? "," : "") << csv_escape(header_[i]);
  os << "\r\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
    os << "\r\n";
  }
  return os.str();
}

void CsvWriter::save(const std::string& path) const { save_text(path, str()); }

std::string load_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractViolation("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractViolation("cannot write file: " + path);
  out << text;
  if (!out) throw ContractViolation("write failed: " + path);
}

Matrix read_pgm(const std::string& path) {
  const std::string data = load_text(path);
  std::istringstream is(data);
  std::string magic;
  is >> magic;
  if (magic != "P2" && magic != "P5") throw ContractViolation(path + ": not a P2/P5 PGM file");
  const auto next_token = [&is, &path]() {
    std::string tok;
    for (;;) {
      if (!(is >> tok)) throw ContractViolation(path + ": truncated PGM header");
      if (tok[0] == '#') {
        std::string rest;
        std::getline(is, rest);
        continue;
      }
      return tok;
    }
  };
  const int w = std::stoi(next_token());
  const int h = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (w < 1 || h < 1 || maxval < 1 || maxval > 255)
    throw ContractViolation(path + ": unsupported PGM geometry");
  Matrix img(h, w);
  if (magic == "P2") {
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) img(i, j) = std::stoi(next_token()) / static_cast<double>(maxval);
  } else {
    is.get();  // the single whitespace after maxval
    const std::streampos pos = is.tellg();
    const std::size_t offset = static_cast<std::size_t>(pos);
    if (data.size() < offset + static_cast<std::size_t>(w) * h)
      throw ContractViolation(path + ": truncated PGM pixel data");
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j)
        img(i, j) =
            static_cast<unsigned char>(data[offset + static_cast<std::size_t>(i) * w + j]) /
            static_cast<double>(maxval);
  }
  return img;
}

void write_pgm(const std::string& path, const Matrix& image) {
  require(image.allFinite(), "write_pgm: non-finite pixels");
  const int h = static_cast<int>(image.rows());
  const int w = static_cast<int>(image.cols());
  std::string out = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(w) * h);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      const int v = static_cast<int>(std::lround(std::clamp(image(i, j), 0.0, 1.0) * 255.0));
      out.push_back(static_cast<char>(static_cast<unsigned char>(v)));
    }
  save_text(path, out);
}

namespace {
struct Pt {
  double x, y;
};

// marching-squares segments for one level, in data coordinates (cell centers)
void contour_segments(const Matrix& field, const Vector& lo, const Vector& hi, double level,
                      std::vector<std::pair<Pt, Pt>>& segs) {
  const int r = static_cast<int>(field.rows());
  const int c = static_cast<int>(field.cols());
  if (r < 2 || c < 2) return;
  const double dx = (hi[0] - lo[0]) / r;
  const double dy = (hi[1] - lo[1]) / c;
  const auto cx = [&](int i) { return lo[0] + (i + 0.5) * dx; };
  const auto cy = [&](int j) { return lo[1] + (j + 0.5) * dy; };
  const auto interp = [level](double a, double b) {
    const double t = (level - a) / (b - a);
    return std::clamp(t, 0.0, 1.0);
  };
  for (int i = 0; i + 1 < r; ++i)
    for (int j = 0; j + 1 < c; ++j) {
      const double v00 = field(i, j), v10 = field(i + 1, j);
      const double v01 = field(i, j + 1), v11 = field(i + 1, j + 1);
      int idx = 0;
      if (v00 > level) idx |= 1;
      if (v10 > level) idx |= 2;
      if (v11 > level) idx |= 4;
      if (v01 > level) idx |= 8;
      if (idx == 0 || idx == 15) continue;
      // edge midpoints with linear interpolation
      const Pt e_bottom{cx(i) + interp(v00, v10) * dx, cy(j)};
      const Pt e_right{cx(i + 1), cy(j) + interp(v10, v11) * dy};
      const Pt e_top{cx(i) + interp(v01, v11) * dx, cy(j + 1)};
      const Pt e_left{cx(i), cy(j) + interp(v00, v01) * dy};
      const auto add = [&segs](Pt a, Pt b) { segs.emplace_back(a, b); };
      switch (idx) {
        case 1: case 14: add(e_left, e_bottom); break;
        case 2: case 13: add(e_bottom, e_right); break;
        case 3: case 12: add(e_left, e_right); break;
        case 4: case 11: add(e_right, e_top); break;
        case 6: case 9: add(e_bottom, e_top); break;
        case 7: case 8: add(e_left, e_top); break;
        case 5:
          add(e_left, e_bottom);
          add(e_right, e_top);
          break;
        case 10:
          add(e_bottom, e_right);
          add(e_left, e_top);
          break;
        default: break;
      }
    }
}
}  // namespace

std::string render_scatter_svg(const SvgScatterSpec& spec) {
  require(spec.points.cols() == 2, "render_scatter_svg: points must be 2D");
  const double view = 800.0;
  const auto sx = [&](double x) {
    return (x - spec.lo[0]) / (spec.hi[0] - spec.lo[0]) * view;
  };
  const auto sy = [&](double y) {
    return view - (y - spec.lo[1]) / (spec.hi[1] - spec.lo[1]) * view;
  };
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
        "viewBox=\"0 0 800 800\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"800\" fill=\"white\"/>\n";
  if (!spec.title.empty())
    os << "<text x=\"12\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">" << spec.title
       << "</text>\n";
  std::vector<std::pair<Pt, Pt>> segs;
  for (double level : spec.levels) {
    segs.clear();
    contour_segments(spec.contour_field, spec.lo, spec.hi, level, segs);
    for (const auto& [a, b] : segs) {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\" "
                    "stroke-width=\"0.8\"/>\n",
                    sx(a.x), sy(a.y), sx(b.x), sy(b.y));
      os << buf;
    }
  }
  for (int s = 0; s < spec.points.rows(); ++s) {
    char buf[120];
    std::snprintf(buf, sizeof(buf),
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1.5\" fill=\"steelblue\" "
                  "fill-opacity=\"0.5\"/>\n",
                  sx(spec.points(s, 0)), sy(spec.points(s, 1)));
    os << buf;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace lpl
