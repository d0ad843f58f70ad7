#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "psfest/lattice.hpp"
#include "psfest/risk.hpp"

namespace psfest::io {

/// Flat sectioned key = value file ("[section]" headers, ';' or '#' comments).
/// Keys are addressed as "section.key".
class Config {
 public:
  static Config load(const std::filesystem::path& path);
  static Config parse(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t require_u64(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;
  std::vector<std::int64_t> get_ints(const std::string& key, std::vector<std::int64_t> fallback) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

 private:
  std::map<std::string, std::string> values_;
};

enum class PgmEncoding { ascii, binary };

struct Quantization {
  double offset = 0.0;  // pixel = round_half_even((value - offset) * scale), clipped
  double scale = 1.0;
  int max_value = 255;
  std::size_t clipped_low = 0;
  std::size_t clipped_high = 0;
};

/// Reads P2 or P5 (8 or 16 bit). Rows map to axis 0, columns to axis 1, origin at (0, 0).
LatticeSignal load_image(const std::filesystem::path& path);
/// Integer pixel values of a 2-d signal, written without rescaling (values
/// must already be integral and within [0, max_value]).
void save_image_exact(const LatticeSignal& image, const std::filesystem::path& path, int max_value,
                      PgmEncoding enc = PgmEncoding::binary);
/// Affine map to [0, max_value] (range [lo, hi] of the data unless given),
/// round-half-even, clipping; the map is written to "<path>.map".
Quantization save_image(const LatticeSignal& image, const std::filesystem::path& path, int depth_bits,
                        PgmEncoding enc = PgmEncoding::binary, double lo = 0.0, double hi = -1.0);

/// Lattice signal as CSV: header "j0,...,j{d-1},value", one row per cell.
void write_signal_csv(const LatticeSignal& signal, const std::filesystem::path& path);
LatticeSignal read_signal_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal with 17 significant digits.
std::string format_double(double v);

/// Header plus one row per report (aggregate rows).
void emit_report(const std::vector<RiskReport>& reports, const std::filesystem::path& path);
extern const std::vector<std::string> kReportColumns;

/// Generic CSV writer with the same float format.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  void close();

 private:
  std::filesystem::path path_;
  std::string buffer_;
  std::size_t columns_;
};

}  // namespace psfest::io
