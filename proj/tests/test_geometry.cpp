#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "stit/geometry.hpp"
#include "stit/rng.hpp"

using namespace stit;

namespace {

Polyhedron unit_cube() { return make_box(Vec3{{0, 0, 0}}, Vec3{{1, 1, 1}}); }

Polyhedron random_tetrahedron(RandomStream& rng) {
  Polyhedron t;
  t.vertices = {Vec3{{0, 0, 0}}, Vec3{{1, 0, 0}}, Vec3{{0, 1, 0}}, Vec3{{0, 0, 1}}};
  t.faces = {{0, 2, 1}, {0, 3, 2}, {0, 1, 3}, {1, 2, 3}};
  // Random proper rotation + anisotropic scaling + translation.
  const Vec3 a = rng.direction<3>();
  Vec3 b = rng.direction<3>();
  b = normalized(b - dot(a, b) * a);
  const Vec3 c = cross(a, b);
  const Vec3 scale{{0.5 + rng.uniform(), 0.5 + rng.uniform(), 0.5 + rng.uniform()}};
  const Vec3 shift{{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}};
  for (auto& v : t.vertices) {
    const Vec3 s{{v[0] * scale[0], v[1] * scale[1], v[2] * scale[2]}};
    v = s[0] * a + s[1] * b + s[2] * c + shift;
  }
  return t;
}

bool point_in_convex_cycle2(const std::vector<Vec2>& cyc, const Vec2& p) {
  const double orient = area(cyc) >= 0.0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < cyc.size(); ++i) {
    const Vec2 e = cyc[(i + 1) % cyc.size()] - cyc[i];
    if (orient * cross(e, p - cyc[i]) < 0.0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("axis-aligned halfspace clips of the unit square", "[geometry]") {
  const Polygon sq = make_box(Vec2{{0, 0}}, Vec2{{1, 1}});

  const Polygon left = clip_halfspace(sq, {Vec2{{1, 0}}, 0.5}, Side::minus);
  CHECK(volume(left) == Catch::Approx(0.5).epsilon(1e-12));
  auto [lo, hi] = support_interval(left, Vec2{{1, 0}});
  CHECK(lo == Catch::Approx(0.0).margin(1e-12));
  CHECK(hi == Catch::Approx(0.5).margin(1e-12));

  // Non-intersecting plane: unchanged, vertex for vertex.
  const Polygon same = clip_halfspace(sq, {Vec2{{1, 0}}, 2.0}, Side::minus);
  REQUIRE(same.vertices.size() == sq.vertices.size());
  for (std::size_t i = 0; i < sq.vertices.size(); ++i)
    CHECK(dist(same.vertices[i], sq.vertices[i]) < 1e-12);

  const Polygon none = clip_halfspace(sq, {Vec2{{1, 0}}, 2.0}, Side::plus);
  CHECK(none.empty());
}

TEST_CASE("corner clip of the unit cube keeps 7 faces and half the volume", "[geometry]") {
  const Polyhedron cube = unit_cube();
  const Hyperplane<3> h{normalized(Vec3{{1, 1, 1}}), 1.5 / std::sqrt(3.0)};
  const Polyhedron kept = clip_halfspace(cube, h, Side::minus);
  validate(kept);
  CHECK(kept.vertices.size() == 10);
  CHECK(kept.faces.size() == 7);
  CHECK(volume(kept) == Catch::Approx(0.5).epsilon(1e-12));

  RandomStream rng(7001);
  const auto [mc, se] = oracles::mc_volume(kept, 2'000'000, rng);
  CHECK(std::abs(mc - volume(kept)) < 3.0 * se);
}

TEST_CASE("cut_by_hyperplane splits squares and cubes", "[geometry]") {
  const Polygon sq = make_box(Vec2{{0, 0}}, Vec2{{1, 1}});
  const auto cut = cut_by_hyperplane(sq, {Vec2{{1, 0}}, 0.5});
  CHECK(volume(cut.minus) == Catch::Approx(0.5));
  CHECK(volume(cut.plus) == Catch::Approx(0.5));
  CHECK(cut.facet.measure() == Catch::Approx(1.0));

  const auto ccut = cut_by_hyperplane(unit_cube(), {Vec3{{0, 0, 1}}, 0.25});
  CHECK(volume(ccut.minus) == Catch::Approx(0.25));
  CHECK(volume(ccut.plus) == Catch::Approx(0.75));
  CHECK(ccut.facet.measure() == Catch::Approx(1.0));
  validate(ccut.minus);
  validate(ccut.plus);

  CHECK_THROWS_AS(cut_by_hyperplane(sq, {Vec2{{1, 0}}, 3.0}), NoSplitError);
}

TEST_CASE("random simplex cut: additivity and slice-area oracle", "[geometry]") {
  RandomStream rng(7002);
  for (int rep = 0; rep < 20; ++rep) {
    const Polyhedron t = random_tetrahedron(rng);
    validate(t);
    const Vec3 u = rng.direction<3>();
    const auto [lo, hi] = support_interval(t, u);
    const Hyperplane<3> h{u, rng.uniform(lo + 0.2 * (hi - lo), hi - 0.2 * (hi - lo))};
    const auto cut = cut_by_hyperplane(t, h);
    CHECK(volume(cut.minus) + volume(cut.plus) ==
          Catch::Approx(volume(t)).epsilon(1e-9));
    validate(cut.minus);
    validate(cut.plus);

    // Facet vertices satisfy the carrier equation.
    for (const auto& v : cut.facet.vertices)
      CHECK(std::abs(cut.facet.carrier.signed_distance(v)) < 1e-9 * diameter(t));

    // Monte Carlo slice-area oracle in carrier coordinates.
    const auto box = oracles::bounding_box<2>(cut.facet.plane_coords);
    std::size_t hits = 0;
    const std::size_t n = 200'000;
    for (std::size_t i = 0; i < n; ++i)
      hits += point_in_convex_cycle2(cut.facet.plane_coords, box.sample(rng));
    const double frac = static_cast<double>(hits) / static_cast<double>(n);
    const double est = frac * box.volume();
    const double se = box.volume() * std::sqrt(frac * (1 - frac) / static_cast<double>(n));
    CHECK(std::abs(est - cut.facet.measure()) < 4.0 * se + 1e-12);
  }
}

TEST_CASE("support intervals", "[geometry]") {
  const Polygon sq = make_box(Vec2{{0, 0}}, Vec2{{1, 1}});
  auto [a0, a1] = support_interval(sq, Vec2{{1, 0}});
  CHECK(a0 == 0.0);
  CHECK(a1 == 1.0);
  const Polygon sq2 = make_box(Vec2{{1, 1}}, Vec2{{2, 2}});
  auto [b0, b1] = support_interval(sq2, Vec2{{0, 1}});
  CHECK(b0 == 1.0);
  CHECK(b1 == 2.0);

  // Interior points never exceed the vertex-scan support values.
  RandomStream rng(7003);
  const Polygon poly = oracles::random_clipped_polygon(rng);
  for (int rep = 0; rep < 50; ++rep) {
    const Vec2 u = rng.direction<2>();
    auto [lo, hi] = support_interval(poly, u);
    CHECK(lo <= hi);
    for (int i = 0; i < 200; ++i) {
      // Rejection-sample an interior point.
      const auto box = oracles::bounding_box<2>(poly.vertices);
      Vec2 p = box.sample(rng);
      if (!contains(poly, p)) continue;
      const double s = dot(p, u);
      CHECK(s >= lo - 1e-12);
      CHECK(s <= hi + 1e-12);
    }
  }
}

TEST_CASE("intrinsic volumes of square and cube", "[geometry]") {
  const auto sq = intrinsic_volumes(make_box(Vec2{{0, 0}}, Vec2{{1, 1}}));
  CHECK(sq[0] == 1.0);
  CHECK(sq[1] == Catch::Approx(2.0));
  CHECK(sq[2] == Catch::Approx(1.0));

  const auto cu = intrinsic_volumes(unit_cube());
  CHECK(cu[0] == 1.0);
  CHECK(cu[1] == Catch::Approx(3.0));
  CHECK(cu[2] == Catch::Approx(3.0));
  CHECK(cu[3] == Catch::Approx(1.0));
}

TEST_CASE("intrinsic volumes are monotone under inclusion", "[geometry]") {
  RandomStream rng(7004);
  for (int rep = 0; rep < 25; ++rep) {
    const Polyhedron big = oracles::random_clipped_polyhedron(rng, 2);
    const Vec3 u = rng.direction<3>();
    const auto [lo, hi] = support_interval(big, u);
    const Polyhedron small =
        clip_halfspace(big, {u, rng.uniform(lo + 0.4 * (hi - lo), hi - 0.1 * (hi - lo))}, Side::minus);
    if (small.empty()) continue;
    const auto vb = intrinsic_volumes(big);
    const auto vs = intrinsic_volumes(small);
    for (int j = 1; j <= 3; ++j) CHECK(vs[static_cast<std::size_t>(j)] <= vb[static_cast<std::size_t>(j)] + 1e-9);
  }
}

TEST_CASE("k_faces enumerations", "[geometry]") {
  // A square facet embedded in 3D has 4 edges.
  const Hyperplane<3> carrier{Vec3{{0, 0, 1}}, 0.5};
  const auto facet = make_embedded_facet<3>(
      carrier, {Vec3{{0, 0, 0.5}}, Vec3{{1, 0, 0.5}}, Vec3{{1, 1, 0.5}}, Vec3{{0, 1, 0.5}}});
  CHECK(k_faces(facet, 1).size() == 4);
  CHECK(k_faces(facet, 0).size() == 4);
  CHECK(facet.measure() == Catch::Approx(1.0));

  // A segment has 2 endpoints.
  const auto seg = make_embedded_facet<2>({Vec2{{1, 0}}, 0.5}, {Vec2{{0.5, 0}}, Vec2{{0.5, 1}}});
  CHECK(k_faces(seg, 0).size() == 2);

  // Polygon combinatorics: n vertices, n edges.
  RandomStream rng(7005);
  const Polygon poly = oracles::random_clipped_polygon(rng, 4);
  CHECK(k_faces(poly, 0).size() == poly.vertices.size());
  CHECK(k_faces(poly, 1).size() == poly.vertices.size());

  const Polyhedron cube = unit_cube();
  CHECK(k_faces(cube, 0).size() == 8);
  CHECK(k_faces(cube, 1).size() == 12);
  CHECK(k_faces(cube, 2).size() == 6);
  CHECK_THROWS_AS(k_faces(cube, 4), std::invalid_argument);
}

TEST_CASE("clip additivity over random cut sequences", "[geometry]") {
  RandomStream rng(7006);
  for (int rep = 0; rep < 400; ++rep) {
    Polygon c = oracles::random_clipped_polygon(rng, 2);
    for (int i = 0; i < 4; ++i) {
      const Vec2 u = rng.direction<2>();
      const auto [lo, hi] = support_interval(c, u);
      const Hyperplane<2> h{u, rng.uniform(lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo))};
      Cut<2> cut;
      try {
        cut = cut_by_hyperplane(c, h);
      } catch (const NoSplitError&) {
        continue;
      }
      REQUIRE(volume(cut.minus) + volume(cut.plus) ==
              Catch::Approx(volume(c)).epsilon(1e-9));
      c = volume(cut.minus) > volume(cut.plus) ? cut.minus : cut.plus;
    }
  }
  for (int rep = 0; rep < 150; ++rep) {
    Polyhedron c = oracles::random_clipped_polyhedron(rng, 1);
    for (int i = 0; i < 4; ++i) {
      const Vec3 u = rng.direction<3>();
      const auto [lo, hi] = support_interval(c, u);
      const Hyperplane<3> h{u, rng.uniform(lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo))};
      Cut<3> cut;
      try {
        cut = cut_by_hyperplane(c, h);
      } catch (const NoSplitError&) {
        continue;
      }
      REQUIRE(volume(cut.minus) + volume(cut.plus) ==
              Catch::Approx(volume(c)).epsilon(1e-9));
      validate(cut.minus);
      validate(cut.plus);
      c = volume(cut.minus) > volume(cut.plus) ? cut.minus : cut.plus;
    }
  }
}

TEST_CASE("polytope intersection and facet clipping", "[geometry]") {
  const Polygon sq = make_box(Vec2{{0, 0}}, Vec2{{2, 2}});
  const Polygon off = make_box(Vec2{{1, 1}}, Vec2{{3, 3}});
  const Polygon inter = intersect(sq, off);
  CHECK(volume(inter) == Catch::Approx(1.0));

  const auto seg = make_embedded_facet<2>(canonical(Hyperplane<2>{Vec2{{0, 1}}, 1.5}),
                                          {Vec2{{-1, 1.5}}, Vec2{{5, 1.5}}});
  const auto clipped = clip_facet(seg, off, 1e-12, 1e-12);
  REQUIRE(clipped.has_value());
  CHECK(clipped->measure() == Catch::Approx(2.0));

  const Polyhedron cube = unit_cube();
  const auto plate = make_embedded_facet<3>(
      canonical(Hyperplane<3>{Vec3{{0, 0, 1}}, 0.5}),
      {Vec3{{-1, -1, 0.5}}, Vec3{{2, -1, 0.5}}, Vec3{{2, 2, 0.5}}, Vec3{{-1, 2, 0.5}}});
  const auto pc = clip_facet(plate, cube, 1e-12, 1e-12);
  REQUIRE(pc.has_value());
  CHECK(pc->measure() == Catch::Approx(1.0));
}

TEST_CASE("hyperplane canonical form", "[geometry]") {
  const auto h = canonical(Hyperplane<2>{Vec2{{-1, 0}}, -2.0});
  CHECK(h.offset == 2.0);
  CHECK(h.normal[0] == 1.0);
  const auto z = canonical(Hyperplane<2>{Vec2{{-1, 0}}, 0.0});
  CHECK(z.normal[0] == 1.0);
}

TEST_CASE("malformed inputs raise structural errors", "[geometry]") {
  Polygon bad;
  bad.vertices = {Vec2{{0, 0}}, Vec2{{1, 0}}};
  CHECK_THROWS_AS(clip_halfspace(bad, {Vec2{{1, 0}}, 0.5}, Side::minus), GeometryError);
  CHECK_THROWS_AS(make_polygon({Vec2{{0, 0}}, Vec2{{1, 0}}}), GeometryError);
}
