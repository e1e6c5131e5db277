#pragma once

#include <Eigen/Core>

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace subres {

using Vec3 = Eigen::Vector3d;

// One volume element of the reference domain. `extent` holds the edge lengths
// of the (axis-aligned) cell; the kernel only sees `volume` and `eq_radius`.
struct Cell {
  Vec3 center;
  Vec3 extent;
  double volume = 0.0;
  double eq_radius = 0.0;  // (3 volume / 4 pi)^(1/3)

  static Cell cube(const Vec3& center, double side);
  static Cell cuboid(const Vec3& center, const Vec3& extent);
};

struct BallKind {
  double radius;
  int resolution;
};
struct BoxKind {
  Vec3 extents;
  int resolution;
};
struct VoxelKind {
  std::string path;
};
using DomainKind = std::variant<BallKind, BoxKind, VoxelKind>;

// Regular lattice carrying every cell of a domain. Present when all cells have
// the same extent and their centers sit on a common grid; enables FFT matvecs.
struct Lattice {
  Vec3 spacing;
  Vec3 origin;  // center of the cell with index (0,0,0)
  std::array<int, 3> dims{};
  std::vector<std::array<int, 3>> index;  // per cell
};

// Immutable cell decomposition of the reference set Omega.
class DiscreteDomain {
 public:
  DiscreteDomain(std::vector<Cell> cells, DomainKind kind, double diameter);

  const std::vector<Cell>& cells() const noexcept { return cells_; }
  std::size_t size() const noexcept { return cells_.size(); }
  const Cell& operator[](std::size_t i) const { return cells_[i]; }

  double total_volume() const noexcept { return total_volume_; }
  double diameter() const noexcept { return diameter_; }
  const DomainKind& kind() const noexcept { return kind_; }
  bool contains_origin() const noexcept { return contains_origin_; }
  const std::optional<Lattice>& lattice() const noexcept { return lattice_; }

  Eigen::VectorXd volumes() const;
  double max_center_distance() const;
  // Largest |x| over all cell corners.
  double circumradius() const;
  std::string describe() const;

 private:
  std::vector<Cell> cells_;
  DomainKind kind_;
  double total_volume_ = 0.0;
  double diameter_ = 0.0;
  bool contains_origin_ = false;
  std::optional<Lattice> lattice_;
};

DiscreteDomain make_ball(double radius, int resolution);
DiscreteDomain make_box(const Vec3& extents, int resolution);
DiscreteDomain load_voxels(const std::filesystem::path& path);

// Voxel text format: one `x y z h` record per line, `#` starts a comment.
DiscreteDomain parse_voxels(const std::string& text, const std::string& source_name);
std::string format_voxels(const DiscreteDomain& domain);
void export_voxels(const DiscreteDomain& domain, const std::filesystem::path& path);

}  // namespace subres
