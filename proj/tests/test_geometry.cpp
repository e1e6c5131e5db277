#include "subres/errors.hpp"
#include "subres/field.hpp"
#include "subres/geometry.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace subres;

namespace {
double ball_volume(double r) { return 4.0 / 3.0 * std::numbers::pi * r * r * r; }
}  // namespace

TEST_CASE("ball mesh: counts, volume, diameter") {
  const DiscreteDomain d = make_ball(1.0, 8);
  CHECK(d.size() == 280);
  CHECK(d.diameter() == doctest::Approx(2.0));
  CHECK(d.contains_origin());
  CHECK(d.lattice().has_value());
  CHECK(std::abs(d.total_volume() - ball_volume(1.0)) / ball_volume(1.0) < 0.05);
  for (const Cell& c : d.cells()) CHECK(c.center.norm() <= 1.0);
}

TEST_CASE("ball mesh volume converges") {
  CHECK(std::abs(make_ball(1.0, 16).total_volume() / ball_volume(1.0) - 1.0) < 0.02);
  for (int res : {20, 24})
    CHECK(std::abs(make_ball(1.0, res).total_volume() / ball_volume(1.0) - 1.0) < 0.01);
}

TEST_CASE("ball radius scales the mesh") {
  const DiscreteDomain a = make_ball(1.0, 8), b = make_ball(2.0, 8);
  REQUIRE(a.size() == b.size());
  CHECK(b.total_volume() == doctest::Approx(8.0 * a.total_volume()));
  CHECK(b.diameter() == doctest::Approx(4.0));
}

TEST_CASE("ball preconditions") {
  CHECK_THROWS_AS(make_ball(1.0, 3), ConfigError);
  CHECK_THROWS_AS(make_ball(-1.0, 8), ConfigError);
}

TEST_CASE("box mesh") {
  const DiscreteDomain d = make_box(Vec3(1.0, 2.0, 0.5), 4);
  CHECK(d.size() == 64);
  CHECK(d.total_volume() == doctest::Approx(1.0));
  CHECK(d.diameter() == doctest::Approx(std::sqrt(1.0 + 4.0 + 0.25)));
  CHECK(d.contains_origin());
  CHECK(d.cells()[0].extent[1] == doctest::Approx(0.5));
}

TEST_CASE("voxel text round trip") {
  const DiscreteDomain d = make_ball(1.0, 6);
  const DiscreteDomain back = parse_voxels(format_voxels(d), "roundtrip");
  REQUIRE(back.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(back[i].center == d[i].center);
    CHECK(back[i].volume == doctest::Approx(d[i].volume).epsilon(1e-15));
  }
  CHECK(back.total_volume() == doctest::Approx(d.total_volume()));
}

TEST_CASE("voxel file export and load") {
  const auto dir = testutil::temp_dir("voxels");
  const DiscreteDomain d = make_box(Vec3(1.0, 1.0, 1.0), 3);
  export_voxels(d, dir / "box.vox");
  const DiscreteDomain back = load_voxels(dir / "box.vox");
  CHECK(back.size() == 27);
  CHECK(back.total_volume() == doctest::Approx(1.0));
}

TEST_CASE("voxel parser errors") {
  CHECK_NOTHROW(parse_voxels("# comment\n0 0 0 1  # trailing comment\n\n", "ok"));
  try {
    parse_voxels("0 0 0 1\n1 2 x 1\n", "bad");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_voxels("0 0 0 1 5\n", "extra"), ParseError);
  CHECK_THROWS_AS(parse_voxels("0 0 0 -1\n", "neg"), ParseError);
  CHECK_THROWS_AS(parse_voxels("# only comments\n", "empty"), DomainError);
  CHECK_THROWS_AS(parse_voxels("5 5 5 1\n", "far"), DomainError);
}

TEST_CASE("scaled domain") {
  const DiscreteDomain d = make_ball(1.0, 6);
  const DiscreteDomain s = scaled_domain(d, 0.1);
  CHECK(s.total_volume() == doctest::Approx(1e-3 * d.total_volume()));
  CHECK(s.diameter() == doctest::Approx(0.2));
  CHECK(s.circumradius() == doctest::Approx(0.1 * d.circumradius()));
}
