#include "memlab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "memlab/error.hpp"

namespace memlab::io {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string where(const std::filesystem::path& p, std::size_t line) {
  return p.string() + ":" + std::to_string(line);
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_time_ns(double t) {
  const double ps = std::round(t * 1000.0);
  detail::require(std::abs(ps - t * 1000.0) <= 1e-6 * std::max(1.0, std::abs(ps)),
                  "format_time_ns: time is not a multiple of 1 ps");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", ps / 1000.0);
  std::string s(buf);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  std::filesystem::path p = csv;
  p.replace_extension(".json");
  return p;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError(path.string(), "cannot open file for writing");
  out << text;
  out.flush();
  if (!out) throw ConfigError(path.string(), "write failed");
}

std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& csv,
                                                  const std::vector<std::string>& header) {
  std::istringstream in(read_text(csv));
  std::string line;
  std::size_t lineno = 0;
  bool seen_header = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (!seen_header) {
      if (cells != header)
        throw ConfigError(where(csv, lineno), "expected header '" + join(header) + "'");
      seen_header = true;
      continue;
    }
    if (cells.size() != header.size())
      throw ConfigError(where(csv, lineno), "expected " + std::to_string(header.size()) + " columns");
    std::vector<double> row(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const std::string& c = cells[k];
      const auto res = std::from_chars(c.data(), c.data() + c.size(), row[k]);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size() || !std::isfinite(row[k]))
        throw ConfigError(where(csv, lineno), "column '" + header[k] + "': not a finite number: '" + c + "'");
    }
    rows.push_back(std::move(row));
  }
  if (!seen_header) throw ConfigError(csv.string(), "missing header '" + join(header) + "'");
  return rows;
}

void write_histogram(const std::filesystem::path& csv, const counting::ArrivalHistogram& h) {
  h.validate();
  std::string text = "time_ns,counts\n";
  for (std::size_t i = 0; i < h.size(); ++i)
    text += format_time_ns(h.bin_time(i)) + "," + std::to_string(h.counts[i]) + "\n";
  write_text(csv, text);
  json side;
  side["bin_ns"] = h.bin_width_ns;
  side["rep_rate_hz"] = h.rep_rate_hz;
  side["t_int_s"] = h.integration_time_s;
  write_text(sidecar_path(csv), side.dump(2) + "\n");
}

counting::ArrivalHistogram read_histogram(const std::filesystem::path& csv) {
  const auto side_path = sidecar_path(csv);
  json side;
  try {
    side = json::parse(read_text(side_path));
  } catch (const json::exception& e) {
    throw ConfigError(side_path.string(), std::string("invalid JSON: ") + e.what());
  }
  if (!side.is_object()) throw ConfigError(side_path.string(), "expected a JSON object");
  counting::ArrivalHistogram h;
  const std::map<std::string, double*> keys{{"bin_ns", &h.bin_width_ns},
                                            {"rep_rate_hz", &h.rep_rate_hz},
                                            {"t_int_s", &h.integration_time_s}};
  for (const auto& [k, v] : side.items()) {
    const auto it = keys.find(k);
    if (it == keys.end()) throw ConfigError(side_path.string() + ":" + k, "unknown key");
    if (!v.is_number()) throw ConfigError(side_path.string() + ":" + k, "expected a number");
    *it->second = v.get<double>();
  }
  for (const auto& [k, ptr] : keys) {
    if (!side.contains(k)) throw ConfigError(side_path.string() + ":" + k, "missing key");
    if (!(*ptr > 0.0)) throw ConfigError(side_path.string() + ":" + k, "must be > 0");
  }

  const auto rows = read_numeric_csv(csv, {"time_ns", "counts"});
  if (rows.empty()) throw ConfigError(csv.string(), "histogram has no bins");
  h.t0_ns = rows.front()[0];
  h.counts.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double expect = h.t0_ns + static_cast<double>(i) * h.bin_width_ns;
    if (std::abs(rows[i][0] - expect) > 1e-6 * std::max(1.0, h.bin_width_ns))
      throw ConfigError(where(csv, i + 2), "time column is not uniform with bin_ns");
    const double c = rows[i][1];
    if (c < 0.0 || c != std::floor(c))
      throw ConfigError(where(csv, i + 2), "counts must be non-negative integers");
    h.counts.push_back(static_cast<std::int64_t>(c));
  }
  return h;
}

void write_envelope(const std::filesystem::path& csv, const sim::SignalEnvelope& e) {
  std::string text = "time_ns,re,im\n";
  for (std::size_t i = 0; i < e.time_ns.size(); ++i)
    text += format_double(e.time_ns[i]) + "," + format_double(e.amplitude[i].real()) + "," +
            format_double(e.amplitude[i].imag()) + "\n";
  write_text(csv, text);
}

sim::SignalEnvelope read_envelope(const std::filesystem::path& csv) {
  sim::SignalEnvelope e;
  std::size_t line = 1;
  for (const auto& r : read_numeric_csv(csv, {"time_ns", "re", "im"})) {
    ++line;
    if (!e.time_ns.empty() && !(r[0] > e.time_ns.back()))
      throw ConfigError(where(csv, line), "time column must be strictly increasing");
    e.time_ns.push_back(r[0]);
    e.amplitude.emplace_back(r[1], r[2]);
  }
  if (e.time_ns.size() < 2) throw ConfigError(csv.string(), "envelope needs at least 2 samples");
  return e;
}

void write_dataset(const std::filesystem::path& csv, const fit::Dataset& d) {
  std::string text = "x,y,sigma_y\n";
  for (std::size_t i = 0; i < d.size(); ++i)
    text += format_double(d.x[i]) + "," + format_double(d.y[i]) + "," +
            format_double(d.sigma_y[i]) + "\n";
  write_text(csv, text);
}

fit::Dataset read_dataset(const std::filesystem::path& csv) {
  fit::Dataset d;
  std::size_t line = 1;
  for (const auto& r : read_numeric_csv(csv, {"x", "y", "sigma_y"})) {
    ++line;
    if (!(r[2] > 0.0)) throw ConfigError(where(csv, line), "sigma_y must be > 0");
    d.x.push_back(r[0]);
    d.y.push_back(r[1]);
    d.sigma_y.push_back(r[2]);
  }
  return d;
}

std::vector<fit::ScanPoint> read_scan(const std::filesystem::path& csv) {
  std::vector<fit::ScanPoint> scan;
  std::size_t line = 1;
  for (const auto& r : read_numeric_csv(csv, {"delta_mhz", "x", "y", "sigma_y"})) {
    ++line;
    if (!(r[3] > 0.0)) throw ConfigError(where(csv, line), "sigma_y must be > 0");
    auto it = std::find_if(scan.begin(), scan.end(),
                           [&](const fit::ScanPoint& s) { return s.delta_mhz == r[0]; });
    if (it == scan.end()) {
      scan.push_back({r[0], {}});
      it = scan.end() - 1;
    }
    it->data.x.push_back(r[1]);
    it->data.y.push_back(r[2]);
    it->data.sigma_y.push_back(r[3]);
  }
  return scan;
}

void write_scan(const std::filesystem::path& csv, const std::vector<fit::ScanPoint>& scan) {
  std::string text = "delta_mhz,x,y,sigma_y\n";
  for (const auto& s : scan)
    for (std::size_t i = 0; i < s.data.size(); ++i)
      text += format_double(s.delta_mhz) + "," + format_double(s.data.x[i]) + "," +
              format_double(s.data.y[i]) + "," + format_double(s.data.sigma_y[i]) + "\n";
  write_text(csv, text);
}

}  // namespace memlab::io
