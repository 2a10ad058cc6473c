#include "subsample/io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace subsample {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

double from_le(const unsigned char* b) {
  std::uint64_t u = 0;
  for (int k = 7; k >= 0; --k) u = (u << 8) | b[k];
  return std::bit_cast<double>(u);
}

void to_le(double v, unsigned char* b) {
  auto u = std::bit_cast<std::uint64_t>(v);
  for (int k = 0; k < 8; ++k, u >>= 8) b[k] = static_cast<unsigned char>(u & 0xffu);
}

RawSignals read_smx(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_error("cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) parse_error(path + ": missing header line");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    parse_error(path + ": bad header: " + e.what());
  }
  if (!h.contains("p") || !h.contains("m")) parse_error(path + ": header needs p and m");
  if (h.value("dtype", std::string("f64le")) != "f64le") parse_error(path + ": only dtype f64le is supported");
  const auto p = h["p"].get<Index>();
  const auto m = h["m"].get<Index>();
  if (p < 1 || m < 0) parse_error(path + ": bad p/m");
  RawSignals out;
  if (h.contains("dims") && !h["dims"].is_null()) {
    const auto d = h["dims"].get<std::vector<Index>>();
    if (d.size() != 2) parse_error(path + ": dims must be [rows, cols]");
    out.dims = Dims2{d[0], d[1]};
    if (d[0] * d[1] != p) throw Error(ErrorCode::ShapeMismatch, path + ": rows*cols != p");
  }
  const auto bytes = static_cast<std::size_t>(8 * p * m);
  std::vector<unsigned char> buf(bytes);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes) parse_error(path + ": payload shorter than 8*m*p bytes");
  if (in.peek() != std::char_traits<char>::eof()) parse_error(path + ": trailing bytes after payload");
  out.rows.reserve(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j) {
    Eigen::VectorXd v(p);
    for (Index i = 0; i < p; ++i) v(i) = from_le(buf.data() + 8 * (j * p + i));
    out.rows.push_back(std::move(v));
  }
  return out;
}

RawSignals read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open " + path);
  RawSignals out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        parse_error(path + ":" + std::to_string(lineno) + ": not a number: '" + cell + "'");
      }
    }
    if (!out.rows.empty() && static_cast<Index>(vals.size()) != out.rows.front().size())
      throw Error(ErrorCode::ShapeMismatch, path + ":" + std::to_string(lineno) + ": row length differs");
    out.rows.push_back(Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Index>(vals.size())));
  }
  if (out.rows.empty()) parse_error(path + ": no signals");
  return out;
}

// Binary (P5) PGM, 8- or 16-bit.
Eigen::VectorXd read_pgm(const fs::path& path, Dims2& dims) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_error("cannot open " + path.string());
  auto token = [&]() {
    std::string tok;
    char ch;
    while (in.get(ch)) {
      if (ch == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(ch);
    }
    return tok;
  };
  if (token() != "P5") parse_error(path.string() + ": not a binary PGM (P5)");
  Index w = 0, h = 0, maxval = 0;
  try {
    w = std::stoll(token());
    h = std::stoll(token());
    maxval = std::stoll(token());
  } catch (const std::exception&) {
    parse_error(path.string() + ": bad PGM header");
  }
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535) parse_error(path.string() + ": bad PGM header values");
  dims = Dims2{h, w};
  const int bpp = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> buf(static_cast<std::size_t>(w * h * bpp));
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size()) parse_error(path.string() + ": truncated PGM payload");
  Eigen::VectorXd v(w * h);
  for (Index k = 0; k < w * h; ++k)
    v(k) = bpp == 1 ? buf[static_cast<std::size_t>(k)]
                    : (buf[static_cast<std::size_t>(2 * k)] << 8) | buf[static_cast<std::size_t>(2 * k + 1)];
  return v;
}

RawSignals read_pgm_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) parse_error(dir + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".pgm") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) parse_error(dir + ": no .pgm files");
  RawSignals out;
  for (const auto& f : files) {
    Dims2 d;
    auto v = read_pgm(f, d);
    if (out.dims && !(*out.dims == d))
      throw Error(ErrorCode::ShapeMismatch, f.string() + ": image size differs from " + files.front().string());
    out.dims = d;
    out.rows.push_back(std::move(v));
  }
  return out;
}

}  // namespace

SignalFormat parse_signal_format(const std::string& name) {
  if (name == "smx") return SignalFormat::Smx;
  if (name == "csv") return SignalFormat::Csv;
  if (name == "pgm-dir" || name == "pgm") return SignalFormat::PgmDir;
  throw Error(ErrorCode::ParseError, "unknown signal format '" + name + "'");
}

SignalFormat infer_signal_format(const std::string& path) {
  if (fs::is_directory(path)) return SignalFormat::PgmDir;
  if (fs::path(path).extension() == ".csv") return SignalFormat::Csv;
  return SignalFormat::Smx;
}

RawSignals read_raw_signals(const std::string& path, SignalFormat format) {
  switch (format) {
    case SignalFormat::Smx: return read_smx(path);
    case SignalFormat::Csv: return read_csv(path);
    case SignalFormat::PgmDir: return read_pgm_dir(path);
  }
  parse_error("bad format");
}

void write_smx(const std::string& path, const RawSignals& data) {
  if (data.rows.empty()) throw Error(ErrorCode::ShapeMismatch, "nothing to write");
  const Index p = data.rows.front().size();
  nlohmann::json h = {{"p", p}, {"m", data.rows.size()}, {"dtype", "f64le"}};
  h["dims"] = data.dims ? nlohmann::json::array({data.dims->rows, data.dims->cols}) : nlohmann::json(nullptr);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  out << h.dump() << '\n';
  unsigned char b[8];
  for (const auto& v : data.rows) {
    if (v.size() != p) throw Error(ErrorCode::ShapeMismatch, "rows differ in length");
    for (Index i = 0; i < p; ++i) {
      to_le(v(i), b);
      out.write(reinterpret_cast<const char*>(b), 8);
    }
  }
  if (!out) throw Error(ErrorCode::ParseError, "write failed: " + path);
}

TrainingSet load_signals(const std::string& path, SignalFormat format, LoadStats* stats) {
  auto raw = read_raw_signals(path, format);
  std::vector<Signal> signals;
  std::size_t skipped = 0;
  for (const auto& r : raw.rows) {
    try {
      signals.push_back(normalize(r));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroSignal) throw;
      ++skipped;
    }
  }
  if (stats) stats->skipped_zero = skipped;
  if (signals.empty()) throw Error(ErrorCode::ZeroSignal, path + ": every signal is zero");
  return TrainingSet(std::move(signals), raw.dims);
}

TrainingSet load_signals(const std::string& path) { return load_signals(path, infer_signal_format(path)); }

nlohmann::json to_json(const IndexSet& s) {
  return {{"p", s.dim()},
          {"n", s.size()},
          {"indices", s.indices()},
          {"meta", {{"criterion", s.meta().criterion}, {"constraint", s.meta().constraint}, {"transform", s.meta().transform}}}};
}

IndexSet index_set_from_json(const nlohmann::json& j) {
  try {
    const auto p = j.at("p").get<Index>();
    const auto n = j.at("n").get<Index>();
    auto idx = j.at("indices").get<std::vector<Index>>();
    if (static_cast<Index>(idx.size()) != n) throw Error(ErrorCode::InvariantViolation, "n != number of indices");
    IndexSetMeta meta;
    if (j.contains("meta")) {
      const auto& m = j["meta"];
      meta.criterion = m.value("criterion", "");
      meta.constraint = m.value("constraint", "");
      meta.transform = m.value("transform", "");
    }
    return IndexSet::from_sorted(std::move(idx), p, std::move(meta));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("mask JSON: ") + e.what());
  }
}

void save_index_set(const std::string& path, const IndexSet& s) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  out << to_json(s).dump(2) << '\n';
}

IndexSet load_index_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  return index_set_from_json(j);
}

}  // namespace subsample
