// Poisson hyperplane tessellations under the same driving measure: a Poisson
// number of hyperplanes drawn i.i.d. from the normalized hitting law, cells
// built by sequentially splitting every crossed cell, and k-face extraction
// from the hyperplane arrangement.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "stit/geometry.hpp"
#include "stit/measure.hpp"
#include "stit/rng.hpp"

namespace stit {

template <int D>
struct PhtTessellation {
  Polytope<D> window;
  double time = 0.0;
  HyperplaneMeasure<D> measure;
  std::vector<Hyperplane<D>> hyperplanes;
  std::vector<Polytope<D>> cells;
};

template <int D>
inline PhtTessellation<D> build_pht(const Polytope<D>& window, const HyperplaneMeasure<D>& measure,
                                    double t, RandomStream& rng, bool with_cells = true) {
  if (!(t >= 0.0)) throw std::invalid_argument("build_pht: negative time");
  PhtTessellation<D> out;
  out.window = window;
  out.time = t;
  out.measure = measure;

  const double eps = 1e-9 * diameter(window);
  const double min_vol = 1e-12 * volume(window);
  const std::uint64_t n = rng.poisson(t * hitting_mass(measure, window));
  out.hyperplanes.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.hyperplanes.push_back(sample_hitting(measure, window, rng));

  if (!with_cells) return out;
  out.cells.push_back(window);
  out.cells.front().id = 0;
  std::uint64_t next_id = 1;
  for (const auto& h : out.hyperplanes) {
    std::vector<Polytope<D>> next;
    next.reserve(out.cells.size() + 4);
    for (auto& cell : out.cells) {
      const auto [lo, hi] = support_interval(cell, h.normal);
      if (h.offset <= lo + eps || h.offset >= hi - eps) {
        next.push_back(std::move(cell));
        continue;
      }
      try {
        auto cut = cut_by_hyperplane(cell, h, eps, min_vol);
        cut.minus.id = cell.id;
        cut.plus.id = next_id++;
        next.push_back(std::move(cut.minus));
        next.push_back(std::move(cut.plus));
      } catch (const NoSplitError&) {
        next.push_back(std::move(cell));
      }
    }
    out.cells = std::move(next);
  }
  return out;
}

namespace detail {

// Chord of the line {p0 + tau * dir} inside a convex region, as a parameter
// interval.  Returns false if the line misses the region.
template <int D>
inline bool line_window_interval(const Vec<D>& p0, const Vec<D>& dir,
                                 const std::vector<Hyperplane<D>>& window_hs, double& t0,
                                 double& t1) {
  t0 = -std::numeric_limits<double>::infinity();
  t1 = std::numeric_limits<double>::infinity();
  for (const auto& h : window_hs) {
    const double da = h.signed_distance(p0);
    const double dd = dot(dir, h.normal);
    if (std::abs(dd) < 1e-14) {
      if (da > 0.0) return false;
      continue;
    }
    const double tcut = -da / dd;
    if (dd > 0.0)
      t1 = std::min(t1, tcut);
    else
      t0 = std::max(t0, tcut);
    if (t0 >= t1) return false;
  }
  return std::isfinite(t0) && std::isfinite(t1) && t0 < t1;
}

}  // namespace detail

// All k-faces of the tessellation, k in 1..D-1.  Faces are carried as point
// cycles (k=2) or endpoint pairs (k=1) in D-dimensional coordinates.
inline std::vector<KFace<2>> extract_faces(const PhtTessellation<2>& y, int k) {
  if (k != 1) throw std::invalid_argument("extract_faces: only k=1 is defined for d=2");
  const auto whs = bounding_halfspaces(y.window);
  const double eps = 1e-12 * diameter(y.window);
  std::vector<KFace<2>> out;
  for (std::size_t i = 0; i < y.hyperplanes.size(); ++i) {
    const auto& hi = y.hyperplanes[i];
    const Vec2 p0 = hi.offset * hi.normal;
    const Vec2 dir = perp(hi.normal);
    double t0, t1;
    if (!detail::line_window_interval(p0, dir, whs, t0, t1)) continue;
    std::vector<double> cuts{t0, t1};
    for (std::size_t j = 0; j < y.hyperplanes.size(); ++j) {
      if (j == i) continue;
      const auto& hj = y.hyperplanes[j];
      const double dd = dot(dir, hj.normal);
      if (std::abs(dd) < 1e-12) continue;
      const double tau = -hj.signed_distance(p0) / dd;
      if (tau > t0 + eps && tau < t1 - eps) cuts.push_back(tau);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s)
      out.push_back({1, {p0 + cuts[s] * dir, p0 + cuts[s + 1] * dir}});
  }
  return out;
}

inline std::vector<KFace<3>> extract_faces(const PhtTessellation<3>& y, int k) {
  if (k != 1 && k != 2) throw std::invalid_argument("extract_faces: k must be 1 or 2 for d=3");
  const auto whs = bounding_halfspaces(y.window);
  const double eps = 1e-12 * diameter(y.window);
  std::vector<KFace<3>> out;
  const auto& planes = y.hyperplanes;

  if (k == 2) {
    const double min_area = 1e-12 * volume(y.window) / std::max(diameter(y.window), 1.0);
    for (std::size_t i = 0; i < planes.size(); ++i) {
      // Section polygon of the window in carrier coordinates.
      Cut<3> cut;
      try {
        cut = cut_by_hyperplane(y.window, planes[i]);
      } catch (const NoSplitError&) {
        continue;
      }
      const auto [e1, e2] = plane_basis(planes[i].normal);
      const Vec3 origin = planes[i].offset * planes[i].normal;
      std::vector<Vec2> section2;
      section2.reserve(cut.facet.vertices.size());
      for (const auto& v : cut.facet.vertices)
        section2.push_back(Vec2{{dot(v - origin, e1), dot(v - origin, e2)}});
      Polygon base = make_polygon(std::move(section2));

      // Split the section by the trace lines of all other planes.
      std::vector<Polygon> cells2{std::move(base)};
      for (std::size_t j = 0; j < planes.size(); ++j) {
        if (j == i) continue;
        const Vec2 m{{dot(e1, planes[j].normal), dot(e2, planes[j].normal)}};
        const double mn = norm(m);
        if (mn < 1e-12) continue;
        const Hyperplane<2> trace{m * (1.0 / mn),
                                  (planes[j].offset - dot(origin, planes[j].normal)) / mn};
        std::vector<Polygon> next;
        next.reserve(cells2.size() + 2);
        for (auto& c2 : cells2) {
          const auto [lo, hi] = support_interval(c2, trace.normal);
          if (trace.offset <= lo + eps || trace.offset >= hi - eps) {
            next.push_back(std::move(c2));
            continue;
          }
          try {
            auto sub = cut_by_hyperplane(c2, trace, eps, min_area);
            next.push_back(std::move(sub.minus));
            next.push_back(std::move(sub.plus));
          } catch (const NoSplitError&) {
            next.push_back(std::move(c2));
          }
        }
        cells2 = std::move(next);
      }
      for (const auto& c2 : cells2) {
        KFace<3> f{2, {}};
        f.vertices.reserve(c2.vertices.size());
        for (const auto& v : c2.vertices) f.vertices.push_back(origin + v[0] * e1 + v[1] * e2);
        out.push_back(std::move(f));
      }
    }
    return out;
  }

  // k == 1: pairwise intersection lines subdivided by third-plane crossings.
  for (std::size_t i = 0; i < planes.size(); ++i) {
    for (std::size_t j = i + 1; j < planes.size(); ++j) {
      const Vec3 w = cross(planes[i].normal, planes[j].normal);
      const double wn2 = norm2(w);
      if (wn2 < 1e-20) continue;
      const Vec3 p0 = (planes[i].offset * cross(planes[j].normal, w) +
                       planes[j].offset * cross(w, planes[i].normal)) *
                      (1.0 / wn2);
      const Vec3 dir = w * (1.0 / std::sqrt(wn2));
      double t0, t1;
      if (!detail::line_window_interval(p0, dir, whs, t0, t1)) continue;
      std::vector<double> cuts{t0, t1};
      for (std::size_t m = 0; m < planes.size(); ++m) {
        if (m == i || m == j) continue;
        const double dd = dot(dir, planes[m].normal);
        if (std::abs(dd) < 1e-12) continue;
        const double tau = -planes[m].signed_distance(p0) / dd;
        if (tau > t0 + eps && tau < t1 - eps) cuts.push_back(tau);
      }
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t s = 0; s + 1 < cuts.size(); ++s)
        out.push_back({1, {p0 + cuts[s] * dir, p0 + cuts[s + 1] * dir}});
    }
  }
  return out;
}

// Exhaustive edge/plate incidence audit for a 3D realization: for every
// arrangement edge interior to the window, the number of extracted plates
// having that edge on their boundary.  Plate boundary edges are matched to
// arrangement edges through a quantized midpoint-and-length key.
inline std::vector<int> edge_plate_incidence(const PhtTessellation<3>& y) {
  const double diam = diameter(y.window);
  const double eps_bd = 1e-9 * diam;
  const double tol = 1e-7 * diam;
  const double q = 1e-6 * diam;
  const auto whs = bounding_halfspaces(y.window);

  const auto edges = extract_faces(y, 1);
  const auto plates = extract_faces(y, 2);

  std::vector<int> counts;
  struct Entry {
    Vec3 mid;
    double len;
    int idx;
  };
  std::map<std::array<long long, 3>, std::vector<Entry>> grid;
  auto key_of = [&](const Vec3& m) {
    return std::array<long long, 3>{static_cast<long long>(std::floor(m[0] / q)),
                                    static_cast<long long>(std::floor(m[1] / q)),
                                    static_cast<long long>(std::floor(m[2] / q))};
  };

  std::vector<int> edge_index_of_interior;
  for (const auto& e : edges) {
    if (touches_boundary(e.vertices, whs, eps_bd)) continue;
    const int idx = static_cast<int>(counts.size());
    counts.push_back(0);
    const Vec3 mid = 0.5 * (e.vertices[0] + e.vertices[1]);
    grid[key_of(mid)].push_back({mid, dist(e.vertices[0], e.vertices[1]), idx});
  }

  for (const auto& p : plates) {
    const std::size_t n = p.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3& a = p.vertices[i];
      const Vec3& b = p.vertices[(i + 1) % n];
      const Vec3 mid = 0.5 * (a + b);
      const double len = dist(a, b);
      const auto base = key_of(mid);
      for (long long dx = -1; dx <= 1; ++dx)
        for (long long dy = -1; dy <= 1; ++dy)
          for (long long dz = -1; dz <= 1; ++dz) {
            const auto it = grid.find({base[0] + dx, base[1] + dy, base[2] + dz});
            if (it == grid.end()) continue;
            for (const auto& entry : it->second)
              if (dist(entry.mid, mid) < tol && std::abs(entry.len - len) < tol)
                ++counts[static_cast<std::size_t>(entry.idx)];
          }
    }
  }
  return counts;
}

}  // namespace stit
