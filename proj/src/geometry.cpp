#include "subres/geometry.hpp"

#include "subres/errors.hpp"
#include "subres/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace subres {

namespace {

double equivalent_radius(double volume) {
  return std::cbrt(3.0 * volume / (4.0 * std::numbers::pi));
}

bool covers_origin(const Cell& c) {
  for (int k = 0; k < 3; ++k) {
    const double half = 0.5 * c.extent[k];
    if (std::abs(c.center[k]) > half * (1.0 + 1e-12)) return false;
  }
  return true;
}

std::optional<Lattice> detect_lattice(const std::vector<Cell>& cells) {
  if (cells.empty()) return std::nullopt;
  const Vec3 spacing = cells.front().extent;
  Vec3 origin = cells.front().center;
  for (const Cell& c : cells) {
    if (((c.extent - spacing).array().abs() > 1e-12 * spacing.array()).any()) return std::nullopt;
    origin = origin.cwiseMin(c.center);
  }
  Lattice lat;
  lat.spacing = spacing;
  lat.origin = origin;
  lat.index.reserve(cells.size());
  for (const Cell& c : cells) {
    std::array<int, 3> idx{};
    for (int k = 0; k < 3; ++k) {
      const double t = (c.center[k] - origin[k]) / spacing[k];
      const double r = std::round(t);
      if (std::abs(t - r) > 1e-6) return std::nullopt;
      idx[k] = static_cast<int>(r);
      lat.dims[k] = std::max(lat.dims[k], idx[k] + 1);
    }
    lat.index.push_back(idx);
  }
  return lat;
}

}  // namespace

Cell Cell::cube(const Vec3& center, double side) {
  return cuboid(center, Vec3::Constant(side));
}

Cell Cell::cuboid(const Vec3& center, const Vec3& extent) {
  Cell c;
  c.center = center;
  c.extent = extent;
  c.volume = extent.prod();
  c.eq_radius = equivalent_radius(c.volume);
  return c;
}

DiscreteDomain::DiscreteDomain(std::vector<Cell> cells, DomainKind kind, double diameter)
    : cells_(std::move(cells)), kind_(std::move(kind)), diameter_(diameter) {
  if (cells_.empty()) throw DomainError("domain has no cells");
  for (const Cell& c : cells_) {
    if (!(c.volume > 0.0) || !std::isfinite(c.volume)) throw DomainError("cell with nonpositive volume");
    total_volume_ += c.volume;
    contains_origin_ = contains_origin_ || covers_origin(c);
  }
  lattice_ = detect_lattice(cells_);
}

Eigen::VectorXd DiscreteDomain::volumes() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(cells_.size()));
  for (std::size_t i = 0; i < cells_.size(); ++i) v[static_cast<Eigen::Index>(i)] = cells_[i].volume;
  return v;
}

double DiscreteDomain::max_center_distance() const {
  double best = 0.0;
  const std::size_t n = cells_.size();
#pragma omp parallel for reduction(max : best) schedule(dynamic, 64)
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      best = std::max(best, (cells_[i].center - cells_[j].center).squaredNorm());
  return std::sqrt(best);
}

double DiscreteDomain::circumradius() const {
  double r = 0.0;
  for (const Cell& c : cells_) r = std::max(r, c.center.norm() + 0.5 * c.extent.norm());
  return r;
}

std::string DiscreteDomain::describe() const {
  std::ostringstream ss;
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, BallKind>)
          ss << "ball(radius=" << k.radius << ",resolution=" << k.resolution << ")";
        else if constexpr (std::is_same_v<K, BoxKind>)
          ss << "box(extents=" << k.extents[0] << "x" << k.extents[1] << "x" << k.extents[2]
             << ",resolution=" << k.resolution << ")";
        else
          ss << "voxel(" << k.path << ")";
      },
      kind_);
  ss << ",n=" << cells_.size();
  return ss.str();
}

DiscreteDomain make_ball(double radius, int resolution) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("ball radius must be positive");
  if (resolution < 4) throw ConfigError("ball resolution must be at least 4 cells per axis");
  const double h = 2.0 * radius / resolution;
  const double r2 = radius * radius;
  std::vector<Cell> cells;
  auto coord = [&](int i) { return radius * (static_cast<double>(2 * i + 1) / resolution - 1.0); };
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j)
      for (int k = 0; k < resolution; ++k) {
        const Vec3 c(coord(i), coord(j), coord(k));
        if (c.squaredNorm() <= r2) cells.push_back(Cell::cube(c, h));
      }
  return DiscreteDomain(std::move(cells), BallKind{radius, resolution}, 2.0 * radius);
}

DiscreteDomain make_box(const Vec3& extents, int resolution) {
  if (!(extents.array() > 0.0).all() || !extents.allFinite())
    throw ConfigError("box extents must be positive");
  if (resolution < 1) throw ConfigError("box resolution must be positive");
  const Vec3 h = extents / resolution;
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(resolution) * resolution * resolution);
  auto coord = [&](int axis, int i) {
    return 0.5 * extents[axis] * (static_cast<double>(2 * i + 1) / resolution - 1.0);
  };
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j)
      for (int k = 0; k < resolution; ++k)
        cells.push_back(Cell::cuboid(Vec3(coord(0, i), coord(1, j), coord(2, k)), h));
  return DiscreteDomain(std::move(cells), BoxKind{extents, resolution}, extents.norm());
}

DiscreteDomain parse_voxels(const std::string& text, const std::string& source_name) {
  std::vector<Cell> cells;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::array<double, 4> v{};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto skip_ws = [&] {
      while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    };
    skip_ws();
    if (p == end) continue;
    for (int f = 0; f < 4; ++f) {
      skip_ws();
      if (*p == '+') ++p;
      auto [next, ec] = std::from_chars(p, end, v[f]);
      if (ec != std::errc() || !std::isfinite(v[f]))
        throw ParseError("expected 4 numbers `x y z h`", lineno);
      p = next;
      if (p < end && !(*p == ' ' || *p == '\t' || *p == '\r'))
        throw ParseError("malformed number", lineno);
    }
    skip_ws();
    if (p != end) throw ParseError("trailing characters after `x y z h`", lineno);
    if (!(v[3] > 0.0)) throw ParseError("cube side must be positive", lineno);
    cells.push_back(Cell::cube(Vec3(v[0], v[1], v[2]), v[3]));
  }
  if (cells.empty()) throw DomainError(source_name + ": voxel file has no cells");

  double diag = 0.0;
  for (const Cell& c : cells) diag = std::max(diag, c.extent.norm());
  // Diameter is an upper bound: farthest centers plus one cell diagonal.
  DiscreteDomain probe(cells, VoxelKind{source_name}, 0.0);
  if (!probe.contains_origin()) throw DomainError(source_name + ": voxels do not cover the origin");
  const double diameter = probe.max_center_distance() + diag;
  return DiscreteDomain(std::move(cells), VoxelKind{source_name}, diameter);
}

DiscreteDomain load_voxels(const std::filesystem::path& path) {
  return parse_voxels(io::read_file(path), path.string());
}

std::string format_voxels(const DiscreteDomain& domain) {
  std::string out = "# x y z h\n";
  for (const Cell& c : domain.cells()) {
    const bool cubic = c.extent[0] == c.extent[1] && c.extent[1] == c.extent[2];
    const double side = cubic ? c.extent[0] : std::cbrt(c.volume);
    out += io::fmt(c.center[0]) + ' ' + io::fmt(c.center[1]) + ' ' + io::fmt(c.center[2]) + ' ' +
           io::fmt(side) + '\n';
  }
  return out;
}

void export_voxels(const DiscreteDomain& domain, const std::filesystem::path& path) {
  io::write_atomic(path, format_voxels(domain));
}

}  // namespace subres
