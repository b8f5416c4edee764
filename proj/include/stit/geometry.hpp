// Convex polytope kernel for dimensions 2 and 3.
//
// Polytopes are value types: a CCW vertex cycle in 2D, a vertex list plus
// outward-oriented face cycles in 3D.  Clipping maintains the 3D face lattice
// incrementally (the cut cross-section becomes one new face); nothing is
// recomputed from scratch via convex hulls.  Floating-point predicates use an
// absolute on-plane tolerance; vertices within that tolerance of a cut plane
// are snapped onto it.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stit/vec.hpp"

namespace stit {

// Structural problem with a polytope (malformed input, broken face lattice).
struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A hyperplane that misses or merely grazes the cell it was asked to split.
struct NoSplitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Side { minus, plus };

// {x : <x,normal> = offset}, canonical form: offset > 0, or offset == 0 and
// normal lexicographically positive.
template <int D>
struct Hyperplane {
  Vec<D> normal{};
  double offset = 0.0;

  double signed_distance(const Vec<D>& p) const { return dot(p, normal) - offset; }
};

template <int D>
inline Hyperplane<D> canonical(Hyperplane<D> h) {
  h.normal = normalized(h.normal);
  const Vec<D> zero{};
  if (h.offset < 0.0 || (h.offset == 0.0 && lex_less(h.normal, zero))) {
    h.normal = -h.normal;
    h.offset = -h.offset;
  }
  return h;
}

template <int D>
struct Polytope {
  std::vector<Vec<D>> vertices;              // CCW cycle when D == 2
  std::vector<std::vector<int>> faces;       // outward-oriented cycles, D == 3 only
  std::uint64_t id = 0;

  bool empty() const { return vertices.empty(); }
};

using Polygon = Polytope<2>;
using Polyhedron = Polytope<3>;

// A k-dimensional face carried in d-dimensional coordinates.  Vertices are in
// cycle order for k == 2 and are the two endpoints for k == 1.
template <int D>
struct KFace {
  int k = 0;
  std::vector<Vec<D>> vertices;
};

// ---------------------------------------------------------------------------
// Construction helpers

inline Polygon make_polygon(std::vector<Vec2> verts) {
  if (verts.size() < 3) throw GeometryError("make_polygon: need at least 3 vertices");
  double a = 0.0;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const Vec2& p = verts[i];
    const Vec2& q = verts[(i + 1) % verts.size()];
    a += cross(p, q);
  }
  if (a < 0.0) std::reverse(verts.begin(), verts.end());
  Polygon poly;
  poly.vertices = std::move(verts);
  return poly;
}

inline Polygon make_box(const Vec2& lo, const Vec2& hi) {
  Polygon p;
  p.vertices = {Vec2{{lo[0], lo[1]}}, Vec2{{hi[0], lo[1]}}, Vec2{{hi[0], hi[1]}}, Vec2{{lo[0], hi[1]}}};
  return p;
}

inline Polyhedron make_box(const Vec3& lo, const Vec3& hi) {
  Polyhedron p;
  p.vertices = {Vec3{{lo[0], lo[1], lo[2]}}, Vec3{{hi[0], lo[1], lo[2]}},
                Vec3{{hi[0], hi[1], lo[2]}}, Vec3{{lo[0], hi[1], lo[2]}},
                Vec3{{lo[0], lo[1], hi[2]}}, Vec3{{hi[0], lo[1], hi[2]}},
                Vec3{{hi[0], hi[1], hi[2]}}, Vec3{{lo[0], hi[1], hi[2]}}};
  p.faces = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4}, {2, 3, 7, 6}, {1, 2, 6, 5}, {3, 0, 4, 7}};
  return p;
}

template <int D>
inline Polytope<D> make_window(const Vec<D>& lo, const Vec<D>& hi) {
  return make_box(lo, hi);
}

// ---------------------------------------------------------------------------
// Basic metric quantities

inline double area(const std::vector<Vec2>& cycle) {
  double a = 0.0;
  const std::size_t n = cycle.size();
  for (std::size_t i = 0; i < n; ++i) a += cross(cycle[i], cycle[(i + 1) % n]);
  return 0.5 * a;
}

// Area of a planar polygon given in 3D coordinates (Newell vector norm / 2).
inline double area3(const std::vector<Vec3>& cycle) {
  Vec3 nsum{};
  const std::size_t n = cycle.size();
  for (std::size_t i = 0; i < n; ++i) nsum += cross(cycle[i], cycle[(i + 1) % n]);
  return 0.5 * norm(nsum);
}

inline Vec3 newell_normal(const std::vector<Vec3>& cycle) {
  Vec3 nsum{};
  const std::size_t n = cycle.size();
  for (std::size_t i = 0; i < n; ++i) nsum += cross(cycle[i], cycle[(i + 1) % n]);
  return normalized(nsum);
}

inline double volume(const Polygon& c) { return c.empty() ? 0.0 : area(c.vertices); }

inline double volume(const Polyhedron& c) {
  if (c.empty()) return 0.0;
  double six_v = 0.0;
  for (const auto& f : c.faces) {
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
      six_v += dot(c.vertices[static_cast<std::size_t>(f[0])],
                   cross(c.vertices[static_cast<std::size_t>(f[i])],
                         c.vertices[static_cast<std::size_t>(f[i + 1])]));
    }
  }
  return six_v / 6.0;
}

inline double perimeter(const Polygon& c) {
  double s = 0.0;
  const std::size_t n = c.vertices.size();
  for (std::size_t i = 0; i < n; ++i) s += dist(c.vertices[i], c.vertices[(i + 1) % n]);
  return s;
}

inline double surface_area(const Polyhedron& c) {
  double s = 0.0;
  for (const auto& f : c.faces) {
    std::vector<Vec3> cyc;
    cyc.reserve(f.size());
    for (int i : f) cyc.push_back(c.vertices[static_cast<std::size_t>(i)]);
    s += area3(cyc);
  }
  return s;
}

template <int D>
inline double diameter(const Polytope<D>& c) {
  double best = 0.0;
  for (std::size_t i = 0; i < c.vertices.size(); ++i)
    for (std::size_t j = i + 1; j < c.vertices.size(); ++j)
      best = std::max(best, dist(c.vertices[i], c.vertices[j]));
  return best;
}

template <int D>
inline Vec<D> centroid(const Polytope<D>& c) {
  Vec<D> s{};
  for (const auto& v : c.vertices) s += v;
  if (!c.vertices.empty()) s *= 1.0 / static_cast<double>(c.vertices.size());
  return s;
}

template <int D>
inline Vec<D> centroid(const std::vector<Vec<D>>& pts) {
  Vec<D> s{};
  for (const auto& v : pts) s += v;
  if (!pts.empty()) s *= 1.0 / static_cast<double>(pts.size());
  return s;
}

// min/max of <x,u> over the vertices of c.
template <int D>
inline std::pair<double, double> support_interval(const Polytope<D>& c, const Vec<D>& u) {
  if (c.empty()) throw GeometryError("support_interval: empty polytope");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& v : c.vertices) {
    const double s = dot(v, u);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return {lo, hi};
}

template <int D>
inline double width_along(const Polytope<D>& c, const Vec<D>& u) {
  auto [lo, hi] = support_interval(c, u);
  return hi - lo;
}

// Per-axis extents of a vertex set; used by window erosion weights.
template <int D>
inline std::array<double, D> axis_extents(const std::vector<Vec<D>>& pts) {
  std::array<double, D> lo{}, hi{};
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& p : pts)
    for (int i = 0; i < D; ++i) {
      lo[static_cast<std::size_t>(i)] = std::min(lo[static_cast<std::size_t>(i)], p[i]);
      hi[static_cast<std::size_t>(i)] = std::max(hi[static_cast<std::size_t>(i)], p[i]);
    }
  std::array<double, D> ext{};
  for (int i = 0; i < D; ++i)
    ext[static_cast<std::size_t>(i)] = hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)];
  return ext;
}

// Volume of {x : x + K subset window} for an axis-aligned box window and the
// convex hull K of pts; the erosion of a box only sees per-axis extents.
// Zero when K does not fit.
template <int D>
inline double box_erosion_volume(const Polytope<D>& box_window, const std::vector<Vec<D>>& pts) {
  const auto win = axis_extents(box_window.vertices);
  const auto obj = axis_extents(pts);
  double v = 1.0;
  for (int i = 0; i < D; ++i) {
    const double s = win[static_cast<std::size_t>(i)] - obj[static_cast<std::size_t>(i)];
    if (s <= 0.0) return 0.0;
    v *= s;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Halfspace views and point queries

// Outward halfspaces whose intersection is c: each returned plane satisfies
// <x,n> <= offset for all x in c.
inline std::vector<Hyperplane<2>> bounding_halfspaces(const Polygon& c) {
  std::vector<Hyperplane<2>> hs;
  const std::size_t n = c.vertices.size();
  hs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e = c.vertices[(i + 1) % n] - c.vertices[i];
    const Vec2 out = normalized(Vec2{{e[1], -e[0]}});
    hs.push_back({out, dot(out, c.vertices[i])});
  }
  return hs;
}

inline std::vector<Hyperplane<3>> bounding_halfspaces(const Polyhedron& c) {
  std::vector<Hyperplane<3>> hs;
  hs.reserve(c.faces.size());
  for (const auto& f : c.faces) {
    std::vector<Vec3> cyc;
    cyc.reserve(f.size());
    for (int i : f) cyc.push_back(c.vertices[static_cast<std::size_t>(i)]);
    const Vec3 n = newell_normal(cyc);
    double off = 0.0;
    for (const auto& v : cyc) off += dot(n, v);
    hs.push_back({n, off / static_cast<double>(cyc.size())});
  }
  return hs;
}

template <int D>
inline bool contains(const Polytope<D>& c, const Vec<D>& p, double eps = 0.0) {
  for (const auto& h : bounding_halfspaces(c))
    if (h.signed_distance(p) > eps) return false;
  return true;
}

// True when some point of pts lies on the boundary of the window (within eps).
// Valid for point sets already contained in the window.
template <int D>
inline bool touches_boundary(const std::vector<Vec<D>>& pts,
                             const std::vector<Hyperplane<D>>& window_halfspaces, double eps) {
  for (const auto& p : pts)
    for (const auto& h : window_halfspaces)
      if (h.signed_distance(p) > -eps) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Clipping

namespace detail {

inline void dedupe_cycle(std::vector<int>& f, const std::vector<Vec3>& verts, double eps) {
  std::vector<int> out;
  out.reserve(f.size());
  for (int idx : f) {
    if (!out.empty() && (idx == out.back() ||
                         dist(verts[static_cast<std::size_t>(idx)],
                              verts[static_cast<std::size_t>(out.back())]) <= eps))
      continue;
    out.push_back(idx);
  }
  while (out.size() > 1 && (out.front() == out.back() ||
                            dist(verts[static_cast<std::size_t>(out.front())],
                                 verts[static_cast<std::size_t>(out.back())]) <= eps))
    out.pop_back();
  f = std::move(out);
}

struct Clip3Result {
  Polyhedron poly;
  int section_face = -1;  // index into poly.faces, -1 if the plane missed
};

// Clip keeping {<x,n> <= off}.  eps is the absolute on-plane snap tolerance.
inline Clip3Result clip3_impl(const Polyhedron& c, const Vec3& n, double off, double eps) {
  const std::size_t nv = c.vertices.size();
  std::vector<double> s(nv);
  std::vector<bool> onplane(nv, false);
  bool any_neg = false, any_pos = false;
  for (std::size_t i = 0; i < nv; ++i) {
    s[i] = dot(c.vertices[i], n) - off;
    if (std::abs(s[i]) <= eps) {
      onplane[i] = true;
      s[i] = 0.0;
    } else if (s[i] < 0.0) {
      any_neg = true;
    } else {
      any_pos = true;
    }
  }

  Clip3Result out;
  if (!any_pos) {  // nothing cut away; snap grazing vertices onto the plane
    out.poly = c;
    for (std::size_t i = 0; i < nv; ++i)
      if (onplane[i]) out.poly.vertices[i] -= (dot(c.vertices[i], n) - off) * n;
    return out;
  }
  if (!any_neg) return out;  // empty

  std::vector<int> keep(nv, -1);
  std::map<std::pair<int, int>, int> crossing;
  Polyhedron r;
  r.id = c.id;

  auto kept_index = [&](int i) {
    if (keep[static_cast<std::size_t>(i)] < 0) {
      Vec3 v = c.vertices[static_cast<std::size_t>(i)];
      if (onplane[static_cast<std::size_t>(i)]) v -= (dot(v, n) - off) * n;
      keep[static_cast<std::size_t>(i)] = static_cast<int>(r.vertices.size());
      r.vertices.push_back(v);
    }
    return keep[static_cast<std::size_t>(i)];
  };
  auto crossing_index = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = crossing.find(key);
    if (it != crossing.end()) return it->second;
    const double sa = s[static_cast<std::size_t>(a)], sb = s[static_cast<std::size_t>(b)];
    const double t = sa / (sa - sb);
    const Vec3 v = c.vertices[static_cast<std::size_t>(a)] +
                   t * (c.vertices[static_cast<std::size_t>(b)] - c.vertices[static_cast<std::size_t>(a)]);
    const int idx = static_cast<int>(r.vertices.size());
    r.vertices.push_back(v - (dot(v, n) - off) * n);
    crossing.emplace(key, idx);
    return idx;
  };

  std::vector<bool> new_onplane;  // parallel to r.vertices
  auto mark_onplane = [&](int new_idx, bool flag) {
    if (static_cast<std::size_t>(new_idx) >= new_onplane.size()) new_onplane.resize(new_idx + 1, false);
    if (flag) new_onplane[static_cast<std::size_t>(new_idx)] = true;
  };

  std::vector<std::pair<int, int>> section_edges;
  for (const auto& f : c.faces) {
    std::vector<int> nf;
    nf.reserve(f.size() + 2);
    const std::size_t m = f.size();
    for (std::size_t i = 0; i < m; ++i) {
      const int a = f[i], b = f[(i + 1) % m];
      const double sa = s[static_cast<std::size_t>(a)], sb = s[static_cast<std::size_t>(b)];
      if (sa <= 0.0) {
        const int ka = kept_index(a);
        mark_onplane(ka, onplane[static_cast<std::size_t>(a)]);
        nf.push_back(ka);
      }
      if ((sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0)) {
        const int kc = crossing_index(a, b);
        mark_onplane(kc, true);
        nf.push_back(kc);
      }
    }
    dedupe_cycle(nf, r.vertices, eps);
    if (nf.size() < 3) continue;
    for (std::size_t i = 0; i < nf.size(); ++i) {
      const int a = nf[i], b = nf[(i + 1) % nf.size()];
      if (new_onplane[static_cast<std::size_t>(a)] && new_onplane[static_cast<std::size_t>(b)])
        section_edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    r.faces.push_back(std::move(nf));
  }

  std::sort(section_edges.begin(), section_edges.end());
  section_edges.erase(std::unique(section_edges.begin(), section_edges.end()), section_edges.end());
  if (section_edges.size() < 3)
    throw GeometryError("clip3: degenerate cut cross-section");

  // Chain the section edges into the new face cycle.
  std::map<int, std::vector<int>> adj;
  for (auto [a, b] : section_edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (const auto& [v, nb] : adj)
    if (nb.size() != 2) throw GeometryError("clip3: cut cross-section is not a single cycle");
  std::vector<int> cycle;
  cycle.reserve(section_edges.size());
  int start = section_edges.front().first;
  int prev = -1, cur = start;
  do {
    cycle.push_back(cur);
    const auto& nb = adj[cur];
    const int nxt = (nb[0] == prev) ? nb[1] : nb[0];
    prev = cur;
    cur = nxt;
  } while (cur != start && cycle.size() <= section_edges.size());
  if (cycle.size() != section_edges.size())
    throw GeometryError("clip3: cut cross-section chaining failed");

  // Outward normal of the kept piece along the cut is +n.
  std::vector<Vec3> cyc;
  cyc.reserve(cycle.size());
  for (int i : cycle) cyc.push_back(r.vertices[static_cast<std::size_t>(i)]);
  if (dot(newell_normal(cyc), n) < 0.0) std::reverse(cycle.begin(), cycle.end());
  out.section_face = static_cast<int>(r.faces.size());
  r.faces.push_back(std::move(cycle));

  // Drop vertices no longer referenced by any face.
  std::vector<int> remap(r.vertices.size(), -1);
  Polyhedron compact;
  compact.id = r.id;
  for (auto& f : r.faces) {
    for (int& idx : f) {
      if (remap[static_cast<std::size_t>(idx)] < 0) {
        remap[static_cast<std::size_t>(idx)] = static_cast<int>(compact.vertices.size());
        compact.vertices.push_back(r.vertices[static_cast<std::size_t>(idx)]);
      }
      idx = remap[static_cast<std::size_t>(idx)];
    }
    compact.faces.push_back(std::move(f));
  }
  out.poly = std::move(compact);
  return out;
}

struct Clip2Result {
  Polygon poly;
  // Endpoints of the cut chord, filled when the plane genuinely crossed.
  std::vector<Vec2> section;
};

inline Clip2Result clip2_impl(const Polygon& c, const Vec2& n, double off, double eps) {
  const std::size_t nv = c.vertices.size();
  std::vector<double> s(nv);
  bool any_neg = false, any_pos = false;
  for (std::size_t i = 0; i < nv; ++i) {
    s[i] = dot(c.vertices[i], n) - off;
    if (std::abs(s[i]) <= eps)
      s[i] = 0.0;
    else if (s[i] < 0.0)
      any_neg = true;
    else
      any_pos = true;
  }
  Clip2Result out;
  if (!any_pos) {
    out.poly = c;
    for (std::size_t i = 0; i < nv; ++i)
      if (s[i] == 0.0) out.poly.vertices[i] -= (dot(c.vertices[i], n) - off) * n;
    return out;
  }
  if (!any_neg) return out;

  Polygon r;
  r.id = c.id;
  for (std::size_t i = 0; i < nv; ++i) {
    const std::size_t j = (i + 1) % nv;
    const double sa = s[i], sb = s[j];
    if (sa <= 0.0) {
      Vec2 v = c.vertices[i];
      if (sa == 0.0) {
        v -= (dot(v, n) - off) * n;
        out.section.push_back(v);
      }
      r.vertices.push_back(v);
    }
    if ((sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0)) {
      const double t = sa / (sa - sb);
      Vec2 v = c.vertices[i] + t * (c.vertices[j] - c.vertices[i]);
      v -= (dot(v, n) - off) * n;
      r.vertices.push_back(v);
      out.section.push_back(v);
    }
  }
  // Remove coincident consecutive vertices.
  std::vector<Vec2> clean;
  for (const auto& v : r.vertices) {
    if (!clean.empty() && dist(clean.back(), v) <= eps) continue;
    clean.push_back(v);
  }
  while (clean.size() > 1 && dist(clean.front(), clean.back()) <= eps) clean.pop_back();
  r.vertices = std::move(clean);
  if (r.vertices.size() < 3) {
    out.poly = Polygon{};
    out.poly.id = c.id;
    return out;
  }
  out.poly = std::move(r);
  return out;
}

template <int D>
inline double default_eps(const Polytope<D>& c) {
  return 1e-9 * diameter(c);
}

}  // namespace detail

// c intersected with the closed halfspace on the given side of H.  Returns an
// empty polytope when the intersection is lower-dimensional or void.
template <int D>
inline Polytope<D> clip_halfspace(const Polytope<D>& c, const Hyperplane<D>& H, Side side,
                                  double eps = -1.0) {
  if (c.empty() || c.vertices.size() < static_cast<std::size_t>(D) + 1)
    throw GeometryError("clip_halfspace: malformed polytope");
  if constexpr (D == 3) {
    if (c.faces.size() < 4) throw GeometryError("clip_halfspace: malformed face lattice");
  }
  if (eps < 0.0) eps = detail::default_eps(c);
  const double sg = (side == Side::minus) ? 1.0 : -1.0;
  if constexpr (D == 2)
    return detail::clip2_impl(c, sg * H.normal, sg * H.offset, eps).poly;
  else
    return detail::clip3_impl(c, sg * H.normal, sg * H.offset, eps).poly;
}

// A (d-1)-dimensional facet embedded in d-space: its carrier hyperplane, the
// d-dimensional vertex coordinates, and the same vertices in carrier-frame
// coordinates.
template <int D>
struct EmbeddedFacet {
  Hyperplane<D> carrier;
  std::vector<Vec<D>> vertices;                // segment endpoints (D=2) or CCW cycle (D=3)
  std::vector<Vec<D - 1>> plane_coords;

  double measure() const {
    if constexpr (D == 2) {
      return vertices.size() == 2 ? dist(vertices[0], vertices[1]) : 0.0;
    } else {
      return area3(vertices);
    }
  }
};

// Orthonormal in-plane basis; deterministic in the carrier normal.
inline std::array<Vec3, 2> plane_basis(const Vec3& n) {
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(n[i]) < std::abs(n[k])) k = i;
  Vec3 axis{};
  axis[k] = 1.0;
  const Vec3 e1 = normalized(cross(n, axis));
  const Vec3 e2 = cross(n, e1);
  return {e1, e2};
}

template <int D>
inline EmbeddedFacet<D> make_embedded_facet(const Hyperplane<D>& carrier,
                                            std::vector<Vec<D>> verts) {
  EmbeddedFacet<D> f;
  f.carrier = carrier;
  f.vertices = std::move(verts);
  const Vec<D> origin = carrier.offset * carrier.normal;
  if constexpr (D == 2) {
    const Vec2 tangent = perp(carrier.normal);
    for (const auto& v : f.vertices) f.plane_coords.push_back(Vec1{{dot(v - origin, tangent)}});
  } else {
    const auto [e1, e2] = plane_basis(carrier.normal);
    for (const auto& v : f.vertices)
      f.plane_coords.push_back(Vec2{{dot(v - origin, e1), dot(v - origin, e2)}});
  }
  return f;
}

template <int D>
struct Cut {
  Polytope<D> plus;
  Polytope<D> minus;
  EmbeddedFacet<D> facet;
};

// Split c by H into the pieces on each side plus the shared cross-section.
// Throws NoSplitError when either piece falls below min_volume.
template <int D>
inline Cut<D> cut_by_hyperplane(const Polytope<D>& c, const Hyperplane<D>& H, double eps = -1.0,
                                double min_volume = 0.0) {
  if (c.empty() || c.vertices.size() < static_cast<std::size_t>(D) + 1)
    throw GeometryError("cut_by_hyperplane: malformed polytope");
  if (eps < 0.0) eps = detail::default_eps(c);
  Cut<D> cut;
  if constexpr (D == 2) {
    auto lo = detail::clip2_impl(c, H.normal, H.offset, eps);
    auto hi = detail::clip2_impl(c, -H.normal, -H.offset, eps);
    if (lo.poly.empty() || hi.poly.empty() || volume(lo.poly) < min_volume ||
        volume(hi.poly) < min_volume)
      throw NoSplitError("cut_by_hyperplane: hyperplane misses or grazes the cell");
    std::vector<Vec2> seg = lo.section;
    std::sort(seg.begin(), seg.end(), lex_less<2>);
    seg.erase(std::unique(seg.begin(), seg.end(),
                          [&](const Vec2& a, const Vec2& b) { return dist(a, b) <= eps; }),
              seg.end());
    if (seg.size() != 2) throw NoSplitError("cut_by_hyperplane: degenerate chord");
    cut.minus = std::move(lo.poly);
    cut.plus = std::move(hi.poly);
    cut.facet = make_embedded_facet(canonical(H), std::move(seg));
  } else {
    auto lo = detail::clip3_impl(c, H.normal, H.offset, eps);
    auto hi = detail::clip3_impl(c, -H.normal, -H.offset, eps);
    if (lo.poly.empty() || hi.poly.empty() || lo.section_face < 0 ||
        volume(lo.poly) < min_volume || volume(hi.poly) < min_volume)
      throw NoSplitError("cut_by_hyperplane: hyperplane misses or grazes the cell");
    std::vector<Vec3> cyc;
    for (int i : lo.poly.faces[static_cast<std::size_t>(lo.section_face)])
      cyc.push_back(lo.poly.vertices[static_cast<std::size_t>(i)]);
    cut.minus = std::move(lo.poly);
    cut.plus = std::move(hi.poly);
    cut.facet = make_embedded_facet(canonical(H), std::move(cyc));
  }
  return cut;
}

// Intersection of two convex polytopes (c clipped by every bounding halfspace
// of region).  Empty result when the intersection is lower-dimensional.
template <int D>
inline Polytope<D> intersect(const Polytope<D>& c, const Polytope<D>& region, double eps = -1.0) {
  if (eps < 0.0) eps = detail::default_eps(region);
  Polytope<D> cur = c;
  for (const auto& h : bounding_halfspaces(region)) {
    if (cur.empty()) break;
    if (cur.vertices.size() < static_cast<std::size_t>(D) + 1) return Polytope<D>{};
    cur = clip_halfspace(cur, h, Side::minus, eps);
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Intrinsic volumes

// 2D: (V0, V1, V2) = (1, perimeter/2, area).
inline std::array<double, 3> intrinsic_volumes(const Polygon& c) {
  return {1.0, 0.5 * perimeter(c), volume(c)};
}

namespace detail {

struct EdgeRef {
  int a, b;
  bool operator<(const EdgeRef& o) const { return std::tie(a, b) < std::tie(o.a, o.b); }
};

inline std::array<double, 3> polygon3_intrinsics(const std::vector<Vec3>& cycle) {
  double per = 0.0;
  for (std::size_t i = 0; i < cycle.size(); ++i) per += dist(cycle[i], cycle[(i + 1) % cycle.size()]);
  return {1.0, 0.5 * per, area3(cycle)};
}

}  // namespace detail

// 3D: (V0, V1, V2, V3) with V1 the normalized edge-length-weighted exterior
// dihedral sum, so V1(unit cube) = 3.  A degenerate (flat) polyhedron is
// measured as the planar polygon spanned by its hull cycle instead.
inline std::array<double, 4> intrinsic_volumes(const Polyhedron& c) {
  constexpr double pi = 3.14159265358979323846;
  const double v3 = volume(c);
  const double scale = diameter(c);
  if (v3 < 1e-12 * scale * scale * scale) {
    // Flat: find the dominant face and measure it as a polygon.
    std::size_t best = 0;
    double best_area = -1.0;
    for (std::size_t fi = 0; fi < c.faces.size(); ++fi) {
      std::vector<Vec3> cyc;
      for (int i : c.faces[fi]) cyc.push_back(c.vertices[static_cast<std::size_t>(i)]);
      const double a = area3(cyc);
      if (a > best_area) {
        best_area = a;
        best = fi;
      }
    }
    std::vector<Vec3> cyc;
    for (int i : c.faces[best]) cyc.push_back(c.vertices[static_cast<std::size_t>(i)]);
    const auto iv = detail::polygon3_intrinsics(cyc);
    return {iv[0], iv[1], iv[2], 0.0};
  }

  const double v2 = 0.5 * surface_area(c);

  // Exterior dihedral angles over edges; every edge is shared by two faces.
  std::map<detail::EdgeRef, std::vector<int>> edge_faces;
  for (std::size_t fi = 0; fi < c.faces.size(); ++fi) {
    const auto& f = c.faces[fi];
    for (std::size_t i = 0; i < f.size(); ++i) {
      const int a = f[i], b = f[(i + 1) % f.size()];
      edge_faces[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(fi));
    }
  }
  const auto planes = bounding_halfspaces(c);
  double edge_sum = 0.0;
  for (const auto& [e, fs] : edge_faces) {
    if (fs.size() != 2) throw GeometryError("intrinsic_volumes: edge not shared by two faces");
    const Vec3& n1 = planes[static_cast<std::size_t>(fs[0])].normal;
    const Vec3& n2 = planes[static_cast<std::size_t>(fs[1])].normal;
    const double ext = std::atan2(norm(cross(n1, n2)), dot(n1, n2));
    edge_sum += dist(c.vertices[static_cast<std::size_t>(e.a)],
                     c.vertices[static_cast<std::size_t>(e.b)]) *
                ext;
  }
  return {1.0, edge_sum / (2.0 * pi), v2, v3};
}

// Intrinsic volumes of a facet measured as a (d-1)-polytope.
inline std::array<double, 2> intrinsic_volumes(const EmbeddedFacet<2>& f) {
  return {1.0, f.measure()};
}
inline std::array<double, 3> intrinsic_volumes(const EmbeddedFacet<3>& f) {
  return detail::polygon3_intrinsics(f.vertices);
}

// ---------------------------------------------------------------------------
// k-faces

namespace detail {

template <int D>
inline std::vector<KFace<D>> cycle_k_faces(const std::vector<Vec<D>>& cycle, int k, int dim) {
  std::vector<KFace<D>> out;
  if (k == dim) {
    out.push_back({k, cycle});
    return out;
  }
  if (k == 0) {
    for (const auto& v : cycle) out.push_back({0, {v}});
    return out;
  }
  // k == 1 on a polygon cycle
  for (std::size_t i = 0; i < cycle.size(); ++i)
    out.push_back({1, {cycle[i], cycle[(i + 1) % cycle.size()]}});
  return out;
}

}  // namespace detail

inline std::vector<KFace<2>> k_faces(const Polygon& c, int k) {
  if (k < 0 || k > 2) throw std::invalid_argument("k_faces: k out of range");
  return detail::cycle_k_faces<2>(c.vertices, k, 2);
}

inline std::vector<KFace<3>> k_faces(const Polyhedron& c, int k) {
  if (k < 0 || k > 3) throw std::invalid_argument("k_faces: k out of range");
  std::vector<KFace<3>> out;
  if (k == 3) {
    out.push_back({3, c.vertices});
    return out;
  }
  if (k == 0) {
    for (const auto& v : c.vertices) out.push_back({0, {v}});
    return out;
  }
  if (k == 2) {
    for (const auto& f : c.faces) {
      KFace<3> kf{2, {}};
      for (int i : f) kf.vertices.push_back(c.vertices[static_cast<std::size_t>(i)]);
      out.push_back(std::move(kf));
    }
    return out;
  }
  std::vector<detail::EdgeRef> edges;
  for (const auto& f : c.faces)
    for (std::size_t i = 0; i < f.size(); ++i) {
      const int a = f[i], b = f[(i + 1) % f.size()];
      edges.push_back({std::min(a, b), std::max(a, b)});
    }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const detail::EdgeRef& x, const detail::EdgeRef& y) {
                            return x.a == y.a && x.b == y.b;
                          }),
              edges.end());
  for (const auto& e : edges)
    out.push_back({1, {c.vertices[static_cast<std::size_t>(e.a)], c.vertices[static_cast<std::size_t>(e.b)]}});
  return out;
}

inline std::vector<KFace<2>> k_faces(const EmbeddedFacet<2>& f, int k) {
  if (k < 0 || k > 1) throw std::invalid_argument("k_faces: k out of range");
  if (k == 1) return {{1, f.vertices}};
  std::vector<KFace<2>> out;
  for (const auto& v : f.vertices) out.push_back({0, {v}});
  return out;
}

inline std::vector<KFace<3>> k_faces(const EmbeddedFacet<3>& f, int k) {
  if (k < 0 || k > 2) throw std::invalid_argument("k_faces: k out of range");
  return detail::cycle_k_faces<3>(f.vertices, k, 2);
}

// Length (k=1) or area (k=2) of a k-face; 1 for k=0 so that sums count.
template <int D>
inline double face_measure(const KFace<D>& f) {
  if (f.k == 0) return 1.0;
  if (f.k == 1) return dist(f.vertices.front(), f.vertices.back());
  if constexpr (D == 3) {
    if (f.k == 2) return area3(f.vertices);
  }
  if constexpr (D == 2) {
    if (f.k == 2) return area(f.vertices);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Facet clipping (restriction of a facet to a convex region)

inline std::optional<EmbeddedFacet<2>> clip_facet(const EmbeddedFacet<2>& f, const Polygon& region,
                                                  double eps, double min_measure) {
  Vec2 a = f.vertices[0], b = f.vertices[1];
  double t0 = 0.0, t1 = 1.0;
  const Vec2 d = b - a;
  for (const auto& h : bounding_halfspaces(region)) {
    const double da = h.signed_distance(a);
    const double dd = dot(d, h.normal);
    if (std::abs(dd) <= eps) {
      if (da > eps) return std::nullopt;
      continue;
    }
    const double t = -da / dd;
    if (dd > 0.0)
      t1 = std::min(t1, t);
    else
      t0 = std::max(t0, t);
    if (t0 >= t1) return std::nullopt;
  }
  const Vec2 p = a + t0 * d, q = a + t1 * d;
  if (dist(p, q) < min_measure) return std::nullopt;
  return make_embedded_facet(f.carrier, {p, q});
}

inline std::optional<EmbeddedFacet<3>> clip_facet(const EmbeddedFacet<3>& f, const Polyhedron& region,
                                                  double eps, double min_measure) {
  std::vector<Vec3> cyc = f.vertices;
  for (const auto& h : bounding_halfspaces(region)) {
    if (cyc.size() < 3) return std::nullopt;
    std::vector<Vec3> next;
    const std::size_t m = cyc.size();
    std::vector<double> s(m);
    for (std::size_t i = 0; i < m; ++i) {
      s[i] = h.signed_distance(cyc[i]);
      if (std::abs(s[i]) <= eps) s[i] = 0.0;
    }
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = (i + 1) % m;
      if (s[i] <= 0.0) next.push_back(cyc[i]);
      if ((s[i] < 0.0 && s[j] > 0.0) || (s[i] > 0.0 && s[j] < 0.0)) {
        const double t = s[i] / (s[i] - s[j]);
        next.push_back(cyc[i] + t * (cyc[j] - cyc[i]));
      }
    }
    std::vector<Vec3> clean;
    for (const auto& v : next) {
      if (!clean.empty() && dist(clean.back(), v) <= eps) continue;
      clean.push_back(v);
    }
    while (clean.size() > 1 && dist(clean.front(), clean.back()) <= eps) clean.pop_back();
    cyc = std::move(clean);
  }
  if (cyc.size() < 3) return std::nullopt;
  auto out = make_embedded_facet(f.carrier, std::move(cyc));
  if (out.measure() < min_measure) return std::nullopt;
  return out;
}

// ---------------------------------------------------------------------------
// Scaling and validation

template <int D>
inline Polytope<D> rescale(Polytope<D> c, double m) {
  for (auto& v : c.vertices) v *= m;
  return c;
}

template <int D>
inline EmbeddedFacet<D> rescale(const EmbeddedFacet<D>& f, double m) {
  Hyperplane<D> carrier = f.carrier;
  carrier.offset *= m;
  std::vector<Vec<D>> verts = f.vertices;
  for (auto& v : verts) v *= m;
  return make_embedded_facet(carrier, std::move(verts));
}

// Full structural and convexity check; throws GeometryError on failure.
inline void validate(const Polygon& c, double eps = -1.0) {
  if (c.vertices.size() < 3) throw GeometryError("validate: polygon needs 3+ vertices");
  if (eps < 0.0) eps = detail::default_eps(c);
  const double a = volume(c);
  if (a <= 0.0) throw GeometryError("validate: polygon not CCW / zero area");
  const std::size_t n = c.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e1 = c.vertices[(i + 1) % n] - c.vertices[i];
    const Vec2 e2 = c.vertices[(i + 2) % n] - c.vertices[(i + 1) % n];
    if (cross(e1, e2) < -eps * (norm(e1) + norm(e2))) throw GeometryError("validate: polygon not convex");
  }
}

inline void validate(const Polyhedron& c, double eps = -1.0) {
  if (c.vertices.size() < 4 || c.faces.size() < 4)
    throw GeometryError("validate: polyhedron needs 4+ vertices and faces");
  if (eps < 0.0) eps = detail::default_eps(c);
  const auto planes = bounding_halfspaces(c);
  for (std::size_t fi = 0; fi < c.faces.size(); ++fi) {
    for (int i : c.faces[fi])
      if (std::abs(planes[fi].signed_distance(c.vertices[static_cast<std::size_t>(i)])) > eps)
        throw GeometryError("validate: face cycle not planar");
    for (const auto& v : c.vertices)
      if (planes[fi].signed_distance(v) > eps) throw GeometryError("validate: polyhedron not convex");
  }
  std::map<detail::EdgeRef, int> edge_count;
  for (const auto& f : c.faces)
    for (std::size_t i = 0; i < f.size(); ++i) {
      const int a = f[i], b = f[(i + 1) % f.size()];
      ++edge_count[{std::min(a, b), std::max(a, b)}];
    }
  for (const auto& [e, cnt] : edge_count)
    if (cnt != 2) throw GeometryError("validate: edge not shared by exactly two faces");
  const auto V = static_cast<long>(c.vertices.size());
  const auto E = static_cast<long>(edge_count.size());
  const auto F = static_cast<long>(c.faces.size());
  if (V - E + F != 2) throw GeometryError("validate: Euler characteristic violated");
}

}  // namespace stit
