#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mrw {

struct PriceSeries {
  std::vector<double> timestamps;
  std::vector<double> close;
  double tick_size = 0.01;
  std::string asset_id;

  void validate() const;  // strictly increasing timestamps, positive closes
};

// Two-column CSV (timestamp, close); '#' lines skipped, an optional header
// row detected by a non-numeric first field. Malformed rows are reported with
// their line number.
PriceSeries read_price_csv(const std::string& path, double tick_size,
                           const std::string& asset_id = "");

// Log-price increments with the tick rule: when two consecutive closes are
// equal, the second is perturbed by one tick up or down (fair coin from the
// seeded stream); a perturbation that collides with the previous adjusted
// value or breaks positivity is flipped. Returned increments are never zero.
std::vector<double> ingest_prices(const PriceSeries& series, std::uint64_t seed);

// Numeric CSV table with an optional leading "# {json}" config line.
struct CsvTable {
  std::string config_line;  // JSON text after "# ", empty if absent
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }
  const std::vector<double>& column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

// Writes "# config" (when non-empty), a header row, then rows with 17
// significant digits so doubles survive a round trip.
void write_csv(const std::string& path, const std::string& config_json,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

enum class PathKind : std::uint16_t { omega = 0, mrm = 1, mrw = 2 };

PathKind path_kind_from_string(const std::string& s);
std::string to_string(PathKind k);

struct BinaryPath {
  PathKind kind = PathKind::mrw;
  double tau = 1.0;
  std::uint64_t seed = 0;
  std::vector<double> values;
};

// Fixed 32-byte header (magic, format version, kind, count, tau, seed)
// followed by the raw little-endian doubles.
void write_path_binary(const std::string& path, const BinaryPath& data);
BinaryPath read_path_binary(const std::string& path);

}  // namespace mrw
