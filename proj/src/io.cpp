#include "qkr/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qkr::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
    if (!out.good()) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string series_csv(const std::vector<std::pair<TimeSeries, SeriesMeta>>& series) {
  std::ostringstream out;
  out << "t,value,n_q,k,T,epsilon,realization,observable_name\n";
  for (const auto& [ts, meta] : series) {
    for (std::size_t i = 0; i < ts.size(); ++i) {
      out << ts.times[i] << ',' << format_double(ts.values[i]) << ',' << meta.n_q << ','
          << format_double(meta.k) << ',' << format_double(meta.T) << ','
          << format_double(meta.epsilon) << ',' << meta.realization << ','
          << ts.observable << '\n';
    }
  }
  return out.str();
}

void write_series_csv(const fs::path& path,
                      const std::vector<std::pair<TimeSeries, SeriesMeta>>& series) {
  atomic_write(path, series_csv(series));
}

std::vector<std::pair<TimeSeries, SeriesMeta>> read_series_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::pair<TimeSeries, SeriesMeta>> out;
  auto find_or_add = [&](const SeriesMeta& meta, const std::string& name)
      -> std::pair<TimeSeries, SeriesMeta>& {
    for (auto& entry : out)
      if (entry.second.realization == meta.realization && entry.first.observable == name &&
          entry.second.epsilon == meta.epsilon)
        return entry;
    out.emplace_back(TimeSeries{}, meta);
    out.back().first.observable = name;
    return out.back();
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 8) throw std::runtime_error("bad csv row in " + path.string());
    SeriesMeta meta;
    meta.n_q = std::stoi(fields[2]);
    meta.k = std::stod(fields[3]);
    meta.T = std::stod(fields[4]);
    meta.epsilon = std::stod(fields[5]);
    meta.realization = std::stol(fields[6]);
    auto& entry = find_or_add(meta, fields[7]);
    entry.first.push(std::stoll(fields[0]), std::stod(fields[1]));
  }
  return out;
}

void write_matrix(const fs::path& path, const std::vector<double>& values, std::size_t rows,
                  std::size_t cols, const std::map<std::string, std::string>& header) {
  if (values.size() != rows * cols) throw std::invalid_argument("matrix shape mismatch");
  std::ostringstream out;
  out << "# {\"rows\":" << rows << ",\"cols\":" << cols;
  for (const auto& [k, v] : header) out << ",\"" << k << "\":" << v;
  out << "}\n";
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c) out << ' ';
      out << format_double(values[r * cols + c]);
    }
    out << '\n';
  }
  atomic_write(path, out.str());
}

void write_wigner_grid(const fs::path& path, const WignerGrid& grid) {
  write_matrix(path, grid.values, grid.side(), grid.side(),
               {{"N", std::to_string(grid.N)},
                {"axes", "\"rows: doubled angle index, cols: doubled momentum index\""},
                {"normalization", "\"sum W = 1\""}});
}

void write_husimi_grid(const fs::path& path, const HusimiGrid& grid) {
  write_matrix(path, grid.values, static_cast<std::size_t>(grid.n_momentum),
               static_cast<std::size_t>(grid.n_theta),
               {{"N", std::to_string(grid.N)},
                {"T", format_double(grid.T)},
                {"n_bar", format_double(grid.n_bar)},
                {"axes", "\"rows: momentum level, cols: theta\""},
                {"normalization", "\"grid sum = 1\""}});
}

void write_density_grid(const fs::path& path, const DensityGrid& grid) {
  write_matrix(path, grid.values, static_cast<std::size_t>(grid.n_theta),
               static_cast<std::size_t>(grid.n_momentum),
               {{"n_lo", format_double(grid.n_lo)},
                {"n_hi", format_double(grid.n_hi)},
                {"axes", "\"rows: theta, cols: momentum\""},
                {"normalization", "\"grid sum = 1\""}});
}

void write_portrait(const fs::path& path, const std::vector<PortraitPoint>& points) {
  std::ostringstream out;
  out << "# theta p\n";
  for (const auto& p : points)
    out << format_double(p.theta) << ' ' << format_double(p.p) << '\n';
  atomic_write(path, out.str());
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::map<std::string, std::string>> read_csv_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv " + path.string());
  std::vector<std::string> header;
  {
    std::istringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) header.push_back(f);
  }
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string f;
    std::map<std::string, std::string> row;
    std::size_t i = 0;
    while (std::getline(ss, f, ',') && i < header.size()) row[header[i++]] = f;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace qkr::io
