#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "qkr/classical.hpp"
#include "qkr/observables.hpp"
#include "qkr/phasespace.hpp"

namespace qkr::io {

/// Canonical numeric formatting for every persisted value: shortest
/// round-trippable decimal ("%.17g"-style via %.17g). Output bytes feed the
/// determinism contract, so all writers go through this.
std::string format_double(double v);

/// Write `content` to `path` atomically (tmp file + rename). Parent
/// directories are created. The rename makes "file exists" a reliable
/// completion marker for resume logic.
void atomic_write(const std::filesystem::path& path, const std::string& content);

struct SeriesMeta {
  int n_q = 0;
  double k = 0.0;
  double T = 0.0;
  double epsilon = 0.0;
  long realization = -1;  // -1: exact arm
};

/// CSV with columns t,value,n_q,k,T,epsilon,realization,observable_name.
std::string series_csv(const std::vector<std::pair<TimeSeries, SeriesMeta>>& series);
void write_series_csv(const std::filesystem::path& path,
                      const std::vector<std::pair<TimeSeries, SeriesMeta>>& series);

/// Parse a series CSV back; inverse of series_csv for resume/aggregation.
std::vector<std::pair<TimeSeries, SeriesMeta>> read_series_csv(
    const std::filesystem::path& path);

/// Plain-text matrix with a one-line JSON header comment:
///   # {"rows":..,"cols":..,"N":..,"T":..,  ...extra keys}
/// then one whitespace-separated row per line.
void write_matrix(const std::filesystem::path& path, const std::vector<double>& values,
                  std::size_t rows, std::size_t cols,
                  const std::map<std::string, std::string>& header);

void write_wigner_grid(const std::filesystem::path& path, const WignerGrid& grid);
void write_husimi_grid(const std::filesystem::path& path, const HusimiGrid& grid);
void write_density_grid(const std::filesystem::path& path, const DensityGrid& grid);

/// Columnar theta/momentum pairs for portraits.
void write_portrait(const std::filesystem::path& path,
                    const std::vector<PortraitPoint>& points);

/// FNV-1a of a canonical parameter string; used in directory slugs.
std::uint64_t fnv1a(const std::string& s);

/// Header-keyed CSV reader for summary tables.
std::vector<std::map<std::string, std::string>> read_csv_table(
    const std::filesystem::path& path);

}  // namespace qkr::io
