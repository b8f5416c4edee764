// The translation-invariant hyperplane measure driving both tessellation
// models: a time scale t times the product of Lebesgue measure in the signed
// distance and a directional distribution R on the unit sphere.
//
// R is a distribution over unoriented directions (u and -u describe the same
// family of hyperplanes), so the total mass of hyperplanes hitting a convex
// body c is
//
//     hitting_mass(c) = t * mean_width_R(c),
//
// the R-average of the support widths of c.  With this normalization the
// induced Poisson hyperplane tessellation PHT(t) has surface intensity t, and
// the isotropic 2D value is t * perimeter(c) / pi.
#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stit/geometry.hpp"
#include "stit/rng.hpp"

namespace stit {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SamplingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <int D>
class DirectionalDistribution {
 public:
  enum class Kind { isotropic, discrete };

  static DirectionalDistribution isotropic() {
    DirectionalDistribution d;
    d.kind_ = Kind::isotropic;
    return d;
  }

  // Atoms are unoriented directions with positive weights; weights are
  // normalized to sum to 1 and the atom directions must span R^D.
  static DirectionalDistribution discrete(std::vector<std::pair<Vec<D>, double>> atoms) {
    if (atoms.empty()) throw ConfigError("directional distribution: no atoms");
    double total = 0.0;
    for (auto& [u, w] : atoms) {
      if (!(w > 0.0)) throw ConfigError("directional distribution: weights must be positive");
      const double n = norm(u);
      if (!(n > 0.0)) throw ConfigError("directional distribution: zero direction");
      u *= 1.0 / n;
      total += w;
    }
    for (auto& [u, w] : atoms) w /= total;
    if (!spans(atoms))
      throw ConfigError(
          "directional distribution: atom directions do not span the space "
          "(span(supp R) = R^d is required)");
    DirectionalDistribution d;
    d.kind_ = Kind::discrete;
    d.atoms_ = std::move(atoms);
    return d;
  }

  Kind kind() const { return kind_; }
  bool is_isotropic() const { return kind_ == Kind::isotropic; }
  const std::vector<std::pair<Vec<D>, double>>& atoms() const { return atoms_; }

  // One direction distributed per the symmetrized R (sign chosen uniformly).
  Vec<D> sample(RandomStream& rng) const {
    if (kind_ == Kind::isotropic) return rng.template direction<D>();
    double x = rng.uniform();
    for (const auto& [u, w] : atoms_) {
      if (x < w) return rng.uniform() < 0.5 ? u : -u;
      x -= w;
    }
    const auto& u = atoms_.back().first;
    return rng.uniform() < 0.5 ? u : -u;
  }

 private:
  static bool spans(const std::vector<std::pair<Vec<D>, double>>& atoms) {
    // Gram-Schmidt rank with a fixed tolerance.
    std::vector<Vec<D>> basis;
    for (const auto& [u, w] : atoms) {
      Vec<D> r = u;
      for (const auto& b : basis) r -= dot(r, b) * b;
      if (norm(r) > 1e-9) basis.push_back(normalized(r));
      if (static_cast<int>(basis.size()) == D) return true;
    }
    return false;
  }

  Kind kind_ = Kind::isotropic;
  std::vector<std::pair<Vec<D>, double>> atoms_;
};

template <int D>
struct HyperplaneMeasure {
  double time_scale = 1.0;  // units 1/length
  DirectionalDistribution<D> directional = DirectionalDistribution<D>::isotropic();
};

// R-average of the support width of c.  Isotropic closed forms: perimeter/pi
// in 2D and half the first intrinsic volume in 3D.
inline double mean_width(const Polygon& c, const DirectionalDistribution<2>& R) {
  if (R.is_isotropic()) {
    constexpr double pi = 3.14159265358979323846;
    return perimeter(c) / pi;
  }
  double s = 0.0;
  for (const auto& [u, w] : R.atoms()) s += w * width_along(c, u);
  return s;
}

inline double mean_width(const Polyhedron& c, const DirectionalDistribution<3>& R) {
  if (R.is_isotropic()) {
    // 0.5 * V1 = (edge length x exterior dihedral angle sum) / (4 pi).
    constexpr double pi = 3.14159265358979323846;
    std::vector<std::array<int, 3>> edge_face;  // (a, b, face)
    edge_face.reserve(3 * c.faces.size());
    for (std::size_t fi = 0; fi < c.faces.size(); ++fi) {
      const auto& f = c.faces[fi];
      for (std::size_t i = 0; i < f.size(); ++i) {
        const int a = f[i], b = f[(i + 1) % f.size()];
        edge_face.push_back({std::min(a, b), std::max(a, b), static_cast<int>(fi)});
      }
    }
    std::sort(edge_face.begin(), edge_face.end());
    const auto planes = bounding_halfspaces(c);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < edge_face.size(); i += 2) {
      const auto& e1 = edge_face[i];
      const auto& e2 = edge_face[i + 1];
      if (e1[0] != e2[0] || e1[1] != e2[1])
        throw GeometryError("mean_width: edge not shared by exactly two faces");
      const Vec3& n1 = planes[static_cast<std::size_t>(e1[2])].normal;
      const Vec3& n2 = planes[static_cast<std::size_t>(e2[2])].normal;
      const double ext = std::atan2(norm(cross(n1, n2)), dot(n1, n2));
      sum += ext * dist(c.vertices[static_cast<std::size_t>(e1[0])],
                        c.vertices[static_cast<std::size_t>(e1[1])]);
    }
    return sum / (4.0 * pi);
  }
  double s = 0.0;
  for (const auto& [u, w] : R.atoms()) s += w * width_along(c, u);
  return s;
}

// Total measure of the hyperplanes hitting c; the exponential lifetime rate of
// a cell in the recursive construction.
template <int D>
inline double hitting_mass(const HyperplaneMeasure<D>& m, const Polytope<D>& c) {
  return m.time_scale * mean_width(c, m.directional);
}

// One hyperplane distributed per the measure restricted to the hitters of c,
// normalized.  Rejection from the direction marginal with envelope diam(c);
// given the direction, the signed distance is uniform on the support interval
// clipped to (0, inf).
template <int D>
inline Hyperplane<D> sample_hitting(const HyperplaneMeasure<D>& m, const Polytope<D>& c,
                                    RandomStream& rng) {
  const double diam = diameter(c);
  if (!(diam > 0.0)) throw SamplingError("sample_hitting: degenerate cell");
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    const Vec<D> u = m.directional.sample(rng);
    auto [lo, hi] = support_interval(c, u);
    lo = std::max(lo, 0.0);
    hi = std::max(hi, 0.0);
    const double len = hi - lo;
    if (len <= 0.0) continue;
    if (rng.uniform() * diam > len) continue;
    const double r = rng.uniform(lo, hi);
    if (!(r > 0.0)) continue;
    return canonical(Hyperplane<D>{u, r});
  }
  throw SamplingError("sample_hitting: rejection failed (does supp R span the space?)");
}

}  // namespace stit
