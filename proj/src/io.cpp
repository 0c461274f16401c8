#include "homoflow/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "homoflow/error.hpp"
#include "json.hpp"

namespace homoflow::io {
namespace {

using nlohmann::json;

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = {}) {
  std::ifstream in(path, std::ios::in | mode);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = {}) {
  std::ofstream out(path, std::ios::out | std::ios::trunc | mode);
  if (!out) throw InvalidInput("cannot write " + path.string());
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& token, double& out) {
  const std::string t = trim(token);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::vector<double>> read_table(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool first_data = true;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(t);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      if (!parse_double(cell, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first_data) {
        first_data = false;
        continue;
      }
      throw InvalidInput(path.string() + ":" + std::to_string(lineno) +
                         ": not a number");
    }
    first_data = false;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InvalidInput(path.string() + ":" + std::to_string(lineno) +
                         ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput(path.string() + ": no data");
  return rows;
}

std::string ext_of(const fs::path& path) {
  std::string e = path.extension().string();
  std::transform(e.begin(), e.end(), e.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return e;
}

void skip_pgm_space(std::istream& in) {
  while (true) {
    const int c = in.peek();
    if (c == '#') {
      std::string dummy;
      std::getline(in, dummy);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

long read_pgm_int(std::istream& in, const fs::path& path) {
  skip_pgm_space(in);
  long v = -1;
  if (!(in >> v) || v < 0) throw InvalidInput(path.string() + ": bad PGM header");
  return v;
}

json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

json vec_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(number(v[i]));
  return arr;
}

Eigen::VectorXd vec_from(const json& arr, double null_value) {
  Eigen::VectorXd v(static_cast<Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    v[static_cast<Index>(i)] = arr[i].is_null() ? null_value : arr[i].get<double>();
  }
  return v;
}

}  // namespace

GridSignal read_csv(const fs::path& path, double spacing) {
  const auto rows = read_table(path);
  const Index nr = static_cast<Index>(rows.size());
  const Index nc = static_cast<Index>(rows.front().size());
  Eigen::VectorXd values(nr * nc);
  for (Index r = 0; r < nr; ++r) {
    for (Index c = 0; c < nc; ++c) {
      values[r * nc + c] = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
  }
  if (nc == 1) return GridSignal::line(std::move(values), spacing);
  return GridSignal::image(nr, nc, std::move(values), spacing);
}

void write_csv(const fs::path& path, const GridSignal& signal) {
  std::ofstream out = open_out(path);
  out << std::setprecision(17);
  const GridShape& s = signal.shape();
  if (s.dims == 1) {
    for (Index i = 0; i < signal.size(); ++i) out << signal.values()[i] << '\n';
    return;
  }
  for (Index r = 0; r < s.rows; ++r) {
    for (Index c = 0; c < s.cols; ++c) {
      if (c > 0) out << ',';
      out << signal(r, c);
    }
    out << '\n';
  }
}

fs::path scale_sidecar(const fs::path& pgm) {
  return fs::path(pgm.string() + ".scale.json");
}

GridSignal read_pgm(const fs::path& path, double spacing) {
  std::ifstream in = open_in(path, std::ios::binary);
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (magic != "P5") throw InvalidInput(path.string() + ": not a binary PGM (P5)");
  const long width = read_pgm_int(in, path);
  const long height = read_pgm_int(in, path);
  const long maxval = read_pgm_int(in, path);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
    throw InvalidInput(path.string() + ": unsupported PGM header");
  }
  in.get();
  const bool wide = maxval > 255;
  const std::size_t count = static_cast<std::size_t>(width * height);
  std::vector<unsigned char> raw(count * (wide ? 2 : 1));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw InvalidInput(path.string() + ": truncated PGM data");
  }
  PgmScale scale;
  if (fs::exists(scale_sidecar(path))) {
    std::ifstream sc = open_in(scale_sidecar(path));
    const json j = json::parse(sc);
    scale.min = j.at("min").get<double>();
    scale.max = j.at("max").get<double>();
  }
  Eigen::VectorXd values(static_cast<Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned v = wide ? (unsigned{raw[2 * i]} << 8) | raw[2 * i + 1] : raw[i];
    values[static_cast<Index>(i)] =
        scale.min + (scale.max - scale.min) * static_cast<double>(v) /
                        static_cast<double>(maxval);
  }
  return GridSignal::image(height, width, std::move(values), spacing);
}

PgmScale write_pgm16(const fs::path& path, const GridSignal& image) {
  if (image.dims() != 2) throw InvalidInput("write_pgm16: signal is not 2D");
  PgmScale scale{image.values().minCoeff(), image.values().maxCoeff()};
  if (scale.max == scale.min) scale.max = scale.min + 1.0;
  {
    std::ofstream out = open_out(path, std::ios::binary);
    out << "P5\n" << image.shape().cols << ' ' << image.shape().rows << "\n65535\n";
    for (Index i = 0; i < image.size(); ++i) {
      const double u = (image.values()[i] - scale.min) / (scale.max - scale.min);
      const auto q = static_cast<std::uint16_t>(
          std::lround(std::clamp(u, 0.0, 1.0) * 65535.0));
      out.put(static_cast<char>(q >> 8));
      out.put(static_cast<char>(q & 0xff));
    }
  }
  std::ofstream sc = open_out(scale_sidecar(path));
  sc << std::setprecision(17) << json{{"min", scale.min}, {"max", scale.max}}.dump(2)
     << '\n';
  return scale;
}

GridSignal read_signal(const fs::path& path, double spacing) {
  if (!fs::exists(path)) throw InvalidInput("no such file: " + path.string());
  const std::string e = ext_of(path);
  if (e == ".pgm") return read_pgm(path, spacing);
  if (e == ".csv" || e == ".txt") return read_csv(path, spacing);
  throw InvalidInput(path.string() + ": unknown extension (expected .csv or .pgm)");
}

void write_signal(const fs::path& path, const GridSignal& signal) {
  if (signal.dims() == 2 && ext_of(path) == ".pgm") {
    write_pgm16(path, signal);
  } else {
    write_csv(path, signal);
  }
}

std::vector<double> read_column(const fs::path& path) {
  const auto rows = read_table(path);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.size() != 1) throw InvalidInput(path.string() + ": expected one column");
    out.push_back(r.front());
  }
  return out;
}

void write_column(const fs::path& path, const std::string& header,
                  const std::vector<double>& values) {
  std::ofstream out = open_out(path);
  out << std::setprecision(17) << header << '\n';
  for (double v : values) out << v << '\n';
}

void write_snapshots(const fs::path& dir, const SnapshotSequence& seq) {
  fs::create_directories(dir);
  const std::size_t width =
      std::max<std::size_t>(5, std::to_string(seq.size() - 1).size());
  for (std::size_t k = 0; k < seq.size(); ++k) {
    std::ostringstream name;
    name << "psi_" << std::setw(static_cast<int>(width)) << std::setfill('0') << k
         << ".csv";
    write_csv(dir / name.str(), seq.snapshots[k]);
  }
  write_column(dir / "times.csv", "t", seq.times());
}

LoadedSnapshots read_snapshots(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InvalidInput("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("psi_", 0) == 0 &&
        (ext_of(entry.path()) == ".csv" || ext_of(entry.path()) == ".pgm")) {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw InvalidInput(dir.string() + ": no psi_* snapshot files");
  std::sort(files.begin(), files.end());
  LoadedSnapshots out;
  for (const auto& f : files) out.seq.snapshots.push_back(read_signal(f));
  const fs::path tfile = dir / "times.csv";
  if (fs::exists(tfile)) {
    const std::vector<double> t = read_column(tfile);
    if (t.size() != files.size()) {
      throw InvalidInput(tfile.string() + ": expected one time per snapshot");
    }
    for (std::size_t k = 1; k < t.size(); ++k) out.seq.dts.push_back(t[k] - t[k - 1]);
    out.has_times = true;
  } else {
    out.seq.dts.assign(files.size() - 1, 1.0);
  }
  out.seq.uniform = !out.seq.dts.empty() &&
                    std::all_of(out.seq.dts.begin(), out.seq.dts.end(), [&](double d) {
                      return std::abs(d - out.seq.dts.front()) <=
                             1e-12 * std::abs(out.seq.dts.front());
                    });
  out.seq.validate();
  return out;
}

std::string decomposition_to_json(const OrthoNsDecomposition& dec) {
  json j;
  j["p"] = dec.p;
  j["delta"] = dec.delta;
  j["spacing"] = dec.spacing;
  j["method"] = dec.method == EigenvalueMethod::kFromMu ? "mu" : "mode";
  json shape = json::array();
  for (Index e : dec.shape.extents()) shape.push_back(e);
  j["shape"] = shape;
  json modes = json::array();
  for (Index i = 0; i < dec.rank(); ++i) modes.push_back(vec_json(dec.modes.col(i)));
  j["modes"] = modes;
  j["alphas"] = vec_json(dec.alphas);
  j["lambdas"] = vec_json(dec.lambdas);
  j["ext_times"] = vec_json(dec.ext_times);
  j["mus"] = vec_json(dec.mus);
  j["lambdas_mu"] = vec_json(dec.lambdas_mu);
  if (dec.lambdas_mode) j["lambdas_mode"] = vec_json(*dec.lambdas_mode);
  if (dec.mode_residuals) j["mode_residuals"] = vec_json(*dec.mode_residuals);
  j["physical"] = dec.physical;
  j["warnings"] = dec.warnings;
  return j.dump(2);
}

OrthoNsDecomposition decomposition_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("decomposition JSON: ") + e.what());
  }
  try {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    OrthoNsDecomposition dec;
    dec.p = j.at("p").get<double>();
    dec.delta = j.at("delta").get<double>();
    dec.spacing = j.value("spacing", 1.0);
    dec.method = j.value("method", std::string("mu")) == "mode"
                     ? EigenvalueMethod::kFromMode
                     : EigenvalueMethod::kFromMu;
    const auto shape = j.at("shape").get<std::vector<Index>>();
    if (shape.size() == 1) {
      dec.shape = GridShape::line(shape[0]);
    } else if (shape.size() == 2) {
      dec.shape = GridShape::image(shape[0], shape[1]);
    } else {
      throw InvalidInput("decomposition JSON: shape must have 1 or 2 entries");
    }
    const json& modes = j.at("modes");
    const Index r = static_cast<Index>(modes.size());
    dec.modes.resize(dec.shape.size(), r);
    for (Index i = 0; i < r; ++i) {
      const Eigen::VectorXd col = vec_from(modes[static_cast<std::size_t>(i)], nan);
      if (col.size() != dec.shape.size()) {
        throw InvalidInput("decomposition JSON: mode length does not match shape");
      }
      dec.modes.col(i) = col;
    }
    dec.alphas = vec_from(j.at("alphas"), nan);
    dec.lambdas = vec_from(j.at("lambdas"), -inf);
    dec.ext_times = vec_from(j.at("ext_times"), nan);
    dec.mus = j.contains("mus") ? vec_from(j["mus"], nan)
                                : Eigen::VectorXd::Constant(r, nan);
    dec.lambdas_mu = j.contains("lambdas_mu") ? vec_from(j["lambdas_mu"], nan)
                                              : dec.lambdas;
    if (j.contains("lambdas_mode")) dec.lambdas_mode = vec_from(j["lambdas_mode"], nan);
    if (j.contains("mode_residuals")) {
      dec.mode_residuals = vec_from(j["mode_residuals"], nan);
    }
    if (j.contains("physical")) {
      dec.physical = j["physical"].get<std::vector<bool>>();
    } else {
      for (Index i = 0; i < dec.lambdas.size(); ++i) {
        dec.physical.push_back(std::isfinite(dec.lambdas[i]));
      }
    }
    if (j.contains("warnings")) dec.warnings = j["warnings"].get<std::vector<std::string>>();
    const auto n = static_cast<std::size_t>(r);
    if (static_cast<std::size_t>(dec.alphas.size()) != n ||
        static_cast<std::size_t>(dec.lambdas.size()) != n ||
        static_cast<std::size_t>(dec.ext_times.size()) != n ||
        dec.physical.size() != n) {
      throw InvalidInput("decomposition JSON: per-mode arrays differ in length");
    }
    if (!dec.alphas.allFinite() || !dec.modes.allFinite()) {
      throw InvalidInput("decomposition JSON: modes and alphas must be numbers");
    }
    return dec;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("decomposition JSON: ") + e.what());
  }
}

void write_decomposition(const fs::path& path, const OrthoNsDecomposition& dec) {
  std::ofstream out = open_out(path);
  out << decomposition_to_json(dec) << '\n';
}

OrthoNsDecomposition read_decomposition(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return decomposition_from_json(ss.str());
}

}  // namespace homoflow::io
