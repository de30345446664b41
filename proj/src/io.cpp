#include "fracwell/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fracwell {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvTable& CsvTable::row() {
  rows_.emplace_back();
  rows_.back().reserve(header_.size());
  return *this;
}

CsvTable& CsvTable::add(double x) { return add(format_double(x)); }

CsvTable& CsvTable::add(long long x) { return add(std::to_string(x)); }

CsvTable& CsvTable::add(const std::string& x) {
  if (rows_.empty()) throw std::logic_error("add called before row");
  if (rows_.back().size() >= header_.size()) throw std::logic_error("row has more cells than the header");
  rows_.back().push_back(x);
  return *this;
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) {
    if (r.size() != header_.size()) throw std::logic_error("incomplete csv row");
    line(r);
  }
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

CsvTable field_table(const Grid& grid, const std::vector<double>& values) {
  if (values.size() != grid.size()) throw std::invalid_argument("field does not match grid");
  CsvTable t(grid.dim() == 1 ? std::vector<std::string>{"x", "value"} : std::vector<std::string>{"x", "y", "value"});
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Point p = grid.point(i);
    t.row().add(p[0]);
    if (grid.dim() == 2) t.add(p[1]);
    t.add(values[i]);
  }
  return t;
}

namespace {

nlohmann::json header_json(const Disorder& g) {
  const auto& b = g.box();
  return {{"d", b.dim},
          {"box", {{"lo", {b.lo[0], b.lo[1]}}, {"hi", {b.hi[0], b.hi[1]}}}},
          {"seed", g.seed()},
          {"dist", {{"law", g.distribution().name()}, {"half_width", g.distribution().half_width}}}};
}

}  // namespace

std::string disorder_to_json(const Disorder& g) {
  nlohmann::json j = header_json(g);
  j["values"] = g.values();
  return j.dump();
}

Disorder disorder_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  SiteBox box;
  box.dim = j.at("d").get<int>();
  const auto& b = j.at("box");
  box.lo = {b.at("lo").at(0).get<int>(), b.at("lo").at(1).get<int>()};
  box.hi = {b.at("hi").at(0).get<int>(), b.at("hi").at(1).get<int>()};
  DisorderDistribution dist = DisorderDistribution::from_name(j.at("dist").at("law").get<std::string>());
  dist.half_width = j.at("dist").at("half_width").get<double>();
  return Disorder::from_values(box, dist, j.at("seed").get<std::uint64_t>(), j.at("values").get<std::vector<double>>());
}

namespace {

constexpr char kMagic[8] = {'F', 'W', 'D', 'I', 'S', 'O', 'R', '1'};

template <class T>
void put(std::ostream& os, T v) {
  static_assert(std::endian::native == std::endian::little, "binary snapshots assume little-endian hosts");
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw std::runtime_error("truncated binary file");
  return v;
}

}  // namespace

void write_disorder_binary(const Disorder& g, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os.write(kMagic, sizeof kMagic);
  const auto& b = g.box();
  put<std::int32_t>(os, b.dim);
  for (int k = 0; k < 2; ++k) put<std::int32_t>(os, b.lo[k]);
  for (int k = 0; k < 2; ++k) put<std::int32_t>(os, b.hi[k]);
  put<std::uint64_t>(os, g.seed());
  put<std::int32_t>(os, static_cast<std::int32_t>(g.distribution().law));
  put<double>(os, g.distribution().half_width);
  put<std::uint64_t>(os, g.values().size());
  os.write(reinterpret_cast<const char*>(g.values().data()),
           static_cast<std::streamsize>(g.values().size() * sizeof(double)));
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

Disorder read_disorder_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw std::runtime_error("not a disorder snapshot");
  SiteBox box;
  box.dim = get<std::int32_t>(is);
  for (int k = 0; k < 2; ++k) box.lo[k] = get<std::int32_t>(is);
  for (int k = 0; k < 2; ++k) box.hi[k] = get<std::int32_t>(is);
  const auto seed = get<std::uint64_t>(is);
  DisorderDistribution dist;
  dist.law = static_cast<DisorderLaw>(get<std::int32_t>(is));
  dist.half_width = get<double>(is);
  const auto n = get<std::uint64_t>(is);
  std::vector<double> values(n);
  is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw std::runtime_error("truncated binary file");
  return Disorder::from_values(box, dist, seed, std::move(values));
}

std::string weight_cache_name(const Grid& grid, double s) {
  return "weights_" + std::to_string(grid.dim()) + "d_n" + std::to_string(grid.side()) + "_m" +
         std::to_string(grid.refine()) + "_s" + format_double(s) + ".bin";
}

void write_weights(const std::vector<double>& w, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  put<std::uint64_t>(os, w.size());
  os.write(reinterpret_cast<const char*>(w.data()), static_cast<std::streamsize>(w.size() * sizeof(double)));
}

std::vector<double> read_weights(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  const auto n = get<std::uint64_t>(is);
  std::vector<double> w(n);
  is.read(reinterpret_cast<char*>(w.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw std::runtime_error("truncated binary file");
  return w;
}

std::vector<double> cached_exterior_weights(const Grid& grid, double s, const std::filesystem::path& dir) {
  const auto path = dir / weight_cache_name(grid, s);
  if (std::filesystem::exists(path)) {
    auto w = read_weights(path);
    if (w.size() == grid.size()) return w;
  }
  auto w = exterior_weights(grid, s);
  std::filesystem::create_directories(dir);
  write_weights(w, path);
  return w;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace fracwell
