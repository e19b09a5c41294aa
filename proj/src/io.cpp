#include "mrw/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mrw/rng.hpp"

namespace mrw {

namespace {

bool parse_double(const std::string& field, double& out) {
  const char* begin = field.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end != begin && *end == '\0' && std::isfinite(out);
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    const auto a = f.find_first_not_of(" \t");
    const auto b = f.find_last_not_of(" \t");
    f = a == std::string::npos ? std::string() : f.substr(a, b - a + 1);
  }
  return fields;
}

}  // namespace

void PriceSeries::validate() const {
  if (close.empty() || close.size() != timestamps.size())
    throw std::invalid_argument("PriceSeries: empty or mismatched columns");
  if (!(tick_size > 0.0)) throw std::invalid_argument("PriceSeries: tick_size must be positive");
  for (std::size_t i = 0; i < close.size(); ++i) {
    if (!(close[i] > 0.0))
      throw std::invalid_argument("PriceSeries: non-positive close at row " + std::to_string(i));
    if (i > 0 && !(timestamps[i] > timestamps[i - 1]))
      throw std::invalid_argument("PriceSeries: timestamps not strictly increasing at row " +
                                  std::to_string(i));
  }
}

PriceSeries read_price_csv(const std::string& path, double tick_size,
                           const std::string& asset_id) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  PriceSeries out;
  out.tick_size = tick_size;
  out.asset_id = asset_id.empty() ? path : asset_id;
  std::string line;
  std::size_t line_no = 0;
  bool saw_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_csv_row(line);
    if (fields.size() < 2)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 2 columns");
    double t, c;
    if (!parse_double(fields[0], t)) {
      if (!saw_data) continue;  // header row
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad timestamp '" +
                               fields[0] + "'");
    }
    if (!parse_double(fields[1], c))
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad close '" +
                               fields[1] + "'");
    out.timestamps.push_back(t);
    out.close.push_back(c);
    saw_data = true;
  }
  if (out.close.empty()) throw std::runtime_error(path + ": no data rows");
  out.validate();
  return out;
}

std::vector<double> ingest_prices(const PriceSeries& series, std::uint64_t seed) {
  series.validate();
  const auto& close = series.close;
  const double tick = series.tick_size;
  Rng rng(derive_seed(seed, StreamRole::tick));
  std::vector<double> adjusted(close.size());
  adjusted[0] = close[0];
  for (std::size_t i = 1; i < close.size(); ++i) {
    double x = close[i];
    if (close[i] == close[i - 1]) {
      const double dir = rng.flip() ? 1.0 : -1.0;
      x = close[i] + dir * tick;
      if (x <= 0.0 || x == adjusted[i - 1]) x = close[i] - dir * tick;
      if (x <= 0.0 || x == adjusted[i - 1]) x = close[i] + 2.0 * tick;
    } else if (x == adjusted[i - 1]) {
      // the raw move is nonzero but an earlier adjustment landed on this value
      const double dir = rng.flip() ? 1.0 : -1.0;
      x = close[i] + dir * tick;
      if (x <= 0.0) x = close[i] + tick;
    }
    adjusted[i] = x;
  }
  std::vector<double> returns(close.size() - 1);
  for (std::size_t i = 1; i < close.size(); ++i)
    returns[i - 1] = std::log(adjusted[i]) - std::log(adjusted[i - 1]);
  return returns;
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return columns[i];
  throw std::invalid_argument("CSV column not found: " + name);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  CsvTable out;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (out.config_line.empty()) {
        std::size_t start = line.find_first_not_of("# \t");
        if (start != std::string::npos) out.config_line = line.substr(start);
      }
      continue;
    }
    auto fields = split_csv_row(line);
    if (!saw_header) {
      double probe;
      if (!parse_double(fields[0], probe)) {
        out.header = fields;
        out.columns.assign(fields.size(), {});
        saw_header = true;
        continue;
      }
      out.header.resize(fields.size());
      for (std::size_t i = 0; i < fields.size(); ++i)
        out.header[i] = "c" + std::to_string(i);
      out.columns.assign(fields.size(), {});
      saw_header = true;
    }
    if (fields.size() != out.columns.size())
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": inconsistent column count");
    for (std::size_t i = 0; i < fields.size(); ++i) {
      double v;
      if (!parse_double(fields[i], v))
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad number '" +
                                 fields[i] + "'");
      out.columns[i].push_back(v);
    }
  }
  if (out.columns.empty() || out.columns[0].empty())
    throw std::runtime_error(path + ": no data rows");
  return out;
}

void write_csv(const std::string& path, const std::string& config_json,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size())
    throw std::invalid_argument("write_csv: header/column mismatch");
  const std::size_t rows = columns.empty() ? 0 : columns[0].size();
  for (const auto& c : columns)
    if (c.size() != rows) throw std::invalid_argument("write_csv: ragged columns");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (!config_json.empty()) out << "# " << config_json << "\n";
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  char buf[40];
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", columns[i][r]);
      out << (i ? "," : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

constexpr char kMagic[8] = {'m', 'r', 'w', 'p', 'a', 't', 'h', '1'};
constexpr std::uint16_t kFormatVersion = 1;

}  // namespace

PathKind path_kind_from_string(const std::string& s) {
  if (s == "omega") return PathKind::omega;
  if (s == "mrm") return PathKind::mrm;
  if (s == "mrw") return PathKind::mrw;
  throw std::invalid_argument("unknown path kind: " + s);
}

std::string to_string(PathKind k) {
  switch (k) {
    case PathKind::omega: return "omega";
    case PathKind::mrm: return "mrm";
    default: return "mrw";
  }
}

void write_path_binary(const std::string& path, const BinaryPath& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  const std::uint32_t n = static_cast<std::uint32_t>(data.values.size());
  if (data.values.size() != n) throw std::invalid_argument("path too long for the format");
  const std::uint16_t kind = static_cast<std::uint16_t>(data.kind);
  out.write(kMagic, 8);
  out.write(reinterpret_cast<const char*>(&kFormatVersion), 2);
  out.write(reinterpret_cast<const char*>(&kind), 2);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&data.tau), 8);
  out.write(reinterpret_cast<const char*>(&data.seed), 8);
  out.write(reinterpret_cast<const char*>(data.values.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
  if (!out) throw std::runtime_error("write failed: " + path);
}

BinaryPath read_path_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  std::uint16_t version = 0, kind = 0;
  std::uint32_t n = 0;
  BinaryPath out;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&version), 2);
  in.read(reinterpret_cast<char*>(&kind), 2);
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&out.tau), 8);
  in.read(reinterpret_cast<char*>(&out.seed), 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error(path + ": not a path dump");
  if (version != kFormatVersion)
    throw std::runtime_error(path + ": unsupported format version " + std::to_string(version));
  if (kind > 2) throw std::runtime_error(path + ": bad kind field");
  out.kind = static_cast<PathKind>(kind);
  out.values.resize(n);
  in.read(reinterpret_cast<char*>(out.values.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in || in.gcount() != static_cast<std::streamsize>(n * sizeof(double)))
    throw std::runtime_error(path + ": truncated payload");
  return out;
}

}  // namespace mrw
