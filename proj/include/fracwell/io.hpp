#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fracwell/energy.hpp"
#include "fracwell/lattice.hpp"

namespace fracwell {

/// Shortest text that reads back to the same double; at most 17 significant digits.
std::string format_double(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  CsvTable& row();
  CsvTable& add(double x);
  CsvTable& add(long long x);
  CsvTable& add(int x) { return add(static_cast<long long>(x)); }
  CsvTable& add(std::size_t x) { return add(static_cast<long long>(x)); }
  CsvTable& add(const std::string& x);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// One row per collocation point: coordinates then value.
CsvTable field_table(const Grid& grid, const std::vector<double>& values);

std::string disorder_to_json(const Disorder& g);
Disorder disorder_from_json(const std::string& text);
void write_disorder_binary(const Disorder& g, const std::filesystem::path& path);
Disorder read_disorder_binary(const std::filesystem::path& path);

/// File name stem of a per-point weight table keyed by (d, n, m, s).
std::string weight_cache_name(const Grid& grid, double s);
void write_weights(const std::vector<double>& w, const std::filesystem::path& path);
std::vector<double> read_weights(const std::filesystem::path& path);
/// Exterior weights read from `dir` when cached there, computed and stored otherwise.
std::vector<double> cached_exterior_weights(const Grid& grid, double s, const std::filesystem::path& dir);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace fracwell
