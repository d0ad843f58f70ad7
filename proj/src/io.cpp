#include "psfest/io.hpp"

#include <fmt/format.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "psfest/error.hpp"

namespace psfest::io {

namespace pt = boost::property_tree;

// ---------------------------------------------------------------- config

namespace {

Config from_stream(std::istream& in, const std::string& origin) {
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  Config c;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      c.set(section, body.data());
      continue;
    }
    for (const auto& [key, leaf] : body) {
      if (!leaf.empty()) throw ConfigError(origin + ": nested key " + section + "." + key);
      c.set(section + "." + key, leaf.data());
    }
  }
  return c;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + text + "'");
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected an integer, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return from_stream(in, path.string());
}

Config Config::parse(const std::string& text) {
  std::istringstream in(text);
  return from_stream(in, "<config>");
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : trim(it->second);
}

std::string Config::require_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key + ": required field missing");
  return trim(it->second);
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? parse_double(key, get_string(key, "")) : fallback;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? parse_int(key, get_string(key, "")) : fallback;
}

std::uint64_t Config::require_u64(const std::string& key) const {
  const std::string text = require_string(key);
  try {
    std::size_t used = 0;
    if (!text.empty() && text[0] != '-') {
      const unsigned long long v = std::stoull(text, &used);
      if (trim(text.substr(used)).empty()) return v;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
}

std::vector<double> Config::get_doubles(const std::string& key, std::vector<double> fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const auto& s : split_list(get_string(key, ""))) out.push_back(parse_double(key, s));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<std::int64_t> Config::get_ints(const std::string& key, std::vector<std::int64_t> fallback) const {
  if (!has(key)) return fallback;
  std::vector<std::int64_t> out;
  for (const auto& s : split_list(get_string(key, ""))) out.push_back(parse_int(key, s));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

// ---------------------------------------------------------------- images

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string header_token(std::istream& in, const std::string& path) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw ImageHeaderError(path + ": header ends early");
  return tok;
}

long header_number(std::istream& in, const std::string& path, const char* what) {
  const std::string tok = header_token(in, path);
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
    throw ImageHeaderError(path + ": bad " + what + " '" + tok + "'");
  if (tok.size() > 9) throw ImageHeaderError(path + ": " + what + " too large");
  return std::stol(tok);
}

}  // namespace

LatticeSignal load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image " + path.string());
  const std::string p = path.string();
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (in.gcount() != 2 || magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5'))
    throw ImageHeaderError(p + ": not a P2/P5 graymap");
  const bool binary = magic[1] == '5';
  const long width = header_number(in, p, "width");
  const long height = header_number(in, p, "height");
  const long maxval = header_number(in, p, "max value");
  if (width < 1 || height < 1) throw ImageHeaderError(p + ": dimensions must be positive");
  if (maxval < 1 || maxval > 65535) throw ImageDepthError(p + ": max value " + std::to_string(maxval) + " outside 1..65535");

  const std::size_t cells = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<double> v(cells);
  if (binary) {
    const std::size_t bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(cells * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
      throw ImagePayloadError(p + ": payload truncated (" + std::to_string(in.gcount()) + " of " + std::to_string(raw.size()) + " bytes)");
    for (std::size_t i = 0; i < cells; ++i) {
      const long px = bytes == 1 ? raw[i] : (static_cast<long>(raw[2 * i]) << 8) | raw[2 * i + 1];
      if (px > maxval) throw ImageDepthError(p + ": pixel value " + std::to_string(px) + " exceeds max value");
      v[i] = static_cast<double>(px);
    }
  } else {
    for (std::size_t i = 0; i < cells; ++i) {
      long px = -1;
      if (!(in >> px)) throw ImagePayloadError(p + ": payload truncated at pixel " + std::to_string(i));
      if (px < 0 || px > maxval) throw ImageDepthError(p + ": pixel value " + std::to_string(px) + " outside 0..max value");
      v[i] = static_cast<double>(px);
    }
  }
  return LatticeSignal(Box{{0, 0}, {height - 1, width - 1}}, std::move(v));
}

namespace {

void write_pgm(const std::vector<long>& px, std::int64_t height, std::int64_t width, int max_value,
               const std::filesystem::path& path, PgmEncoding enc) {
  std::string out = fmt::format("{}\n{} {}\n{}\n", enc == PgmEncoding::binary ? "P5" : "P2", width, height, max_value);
  if (enc == PgmEncoding::binary) {
    for (long v : px) {
      if (max_value >= 256) out.push_back(static_cast<char>((v >> 8) & 0xFF));
      out.push_back(static_cast<char>(v & 0xFF));
    }
  } else {
    for (std::int64_t r = 0; r < height; ++r) {
      for (std::int64_t c = 0; c < width; ++c) {
        if (c) out.push_back(' ');
        out += std::to_string(px[static_cast<std::size_t>(r * width + c)]);
      }
      out.push_back('\n');
    }
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write image " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("failed writing image " + path.string());
}

void check_image(const LatticeSignal& image) {
  if (image.dims() != 2) throw DomainError("images must be 2-dimensional");
  if (image.box().empty()) throw DomainError("image is empty");
}

}  // namespace

void save_image_exact(const LatticeSignal& image, const std::filesystem::path& path, int max_value, PgmEncoding enc) {
  check_image(image);
  if (max_value < 1 || max_value > 65535) throw ImageDepthError("max value must be in 1..65535");
  std::vector<long> px(image.values().size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double v = image.values()[i];
    if (v != std::floor(v) || v < 0.0 || v > max_value)
      throw ImageDepthError("pixel value " + format_double(v) + " is not an integer in 0.." + std::to_string(max_value));
    px[i] = static_cast<long>(v);
  }
  write_pgm(px, image.box().extent(0), image.box().extent(1), max_value, path, enc);
}

Quantization save_image(const LatticeSignal& image, const std::filesystem::path& path, int depth_bits, PgmEncoding enc,
                        double lo, double hi) {
  check_image(image);
  if (depth_bits != 8 && depth_bits != 16) throw ImageDepthError("image depth must be 8 or 16 bits");
  Quantization q;
  q.max_value = depth_bits == 8 ? 255 : 65535;
  if (hi < lo) {
    const auto [mn, mx] = std::minmax_element(image.values().begin(), image.values().end());
    lo = *mn;
    hi = *mx;
  }
  q.offset = lo;
  q.scale = hi > lo ? static_cast<double>(q.max_value) / (hi - lo) : 1.0;
  std::vector<long> px(image.values().size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double v = std::nearbyint((image.values()[i] - q.offset) * q.scale);
    if (v < 0.0) {
      px[i] = 0;
      ++q.clipped_low;
    } else if (v > q.max_value) {
      px[i] = q.max_value;
      ++q.clipped_high;
    } else {
      px[i] = static_cast<long>(v);
    }
  }
  write_pgm(px, image.box().extent(0), image.box().extent(1), q.max_value, path, enc);

  std::ofstream side(path.string() + ".map");
  if (!side) throw IoError("cannot write sidecar " + path.string() + ".map");
  side << "pixel = round_half_even((value - offset) * scale), clipped to [0, max_value]\n"
       << "offset = " << format_double(q.offset) << "\n"
       << "scale = " << format_double(q.scale) << "\n"
       << "max_value = " << q.max_value << "\n"
       << "origin = " << image.box().lo[0] << "," << image.box().lo[1] << "\n"
       << "clipped_low = " << q.clipped_low << "\n"
       << "clipped_high = " << q.clipped_high << "\n";
  return q;
}

// ---------------------------------------------------------------- csv

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), columns_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw DomainError("csv row has " + std::to_string(cells.size()) + " cells, expected " + std::to_string(columns_));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buffer_.push_back(',');
    buffer_ += cells[i];
  }
  buffer_.push_back('\n');
}

void CsvWriter::close() {
  std::ofstream f(path_, std::ios::binary);
  if (!f) throw IoError("cannot write " + path_.string());
  f.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  if (!f) throw IoError("failed writing " + path_.string());
}

void write_signal_csv(const LatticeSignal& signal, const std::filesystem::path& path) {
  std::vector<std::string> header;
  for (std::size_t l = 0; l < signal.dims(); ++l) header.push_back("j" + std::to_string(l));
  header.push_back("value");
  CsvWriter w(path, header);
  std::vector<std::string> cells(header.size());
  for_each_cell(signal.box(), [&](const Coord& j, std::size_t lin) {
    for (std::size_t l = 0; l < j.size(); ++l) cells[l] = std::to_string(j[l]);
    cells.back() = format_double(signal.values()[lin]);
    w.row(cells);
  });
  w.close();
}

LatticeSignal read_signal_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  const std::size_t d = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  if (d == 0) throw IoError(path.string() + ": header needs coordinate columns");
  std::vector<Coord> coords;
  std::vector<double> vals;
  Box box{Coord(d, 0), Coord(d, -1)};
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Coord j(d);
    for (std::size_t l = 0; l < d; ++l) {
      if (!std::getline(ss, cell, ',')) throw IoError(path.string() + ": short row");
      j[l] = std::stoll(cell);
    }
    if (!std::getline(ss, cell, ',')) throw IoError(path.string() + ": missing value");
    const double v = std::stod(cell);
    if (coords.empty()) {
      box = Box{j, j};
    } else {
      for (std::size_t l = 0; l < d; ++l) {
        box.lo[l] = std::min(box.lo[l], j[l]);
        box.hi[l] = std::max(box.hi[l], j[l]);
      }
    }
    coords.push_back(std::move(j));
    vals.push_back(v);
  }
  if (coords.empty()) throw IoError(path.string() + ": no data rows");
  std::vector<double> out(box.cells(), 0.0);
  for (std::size_t i = 0; i < coords.size(); ++i) out[box.linear_index(coords[i])] = vals[i];
  return LatticeSignal(box, std::move(out));
}

const std::vector<std::string> kReportColumns = {"n",       "sigma",      "r",         "h_star",   "replicates",
                                                 "msse",    "sse_sd",     "sse_se",    "var_term", "bias2_term",
                                                 "closed_form", "nd_msse", "nd_sse_sd", "card_t",  "window"};

void emit_report(const std::vector<RiskReport>& reports, const std::filesystem::path& path) {
  if (reports.empty()) throw DomainError("emit_report: no reports");
  CsvWriter w(path, kReportColumns);
  for (const auto& r : reports) {
    const double nd = std::pow(static_cast<double>(r.n), static_cast<double>(r.dims));
    w.row({std::to_string(r.n), format_double(r.sigma), format_double(r.r), format_double(r.h),
           std::to_string(r.replicates), format_double(r.msse), format_double(r.sse_sd), format_double(r.sse_se),
           format_double(r.variance_term), format_double(r.bias_sq_term), format_double(r.closed_form),
           format_double(nd * r.msse), format_double(nd * r.sse_sd), format_double(r.card_t), r.window});
  }
  w.close();
}

}  // namespace psfest::io
