// Continuous-time recursive cell division in a window: every cell carries an
// exponential lifetime with rate equal to its hitting mass, dies by splitting
// along a hyperplane drawn from the measure restricted to its hitters, and
// the construction runs until the deterministic time horizon t.
//
// Events are scheduled on a priority queue keyed by absolute death time, which
// is equivalent in law to the recursive description because exponential
// lifetimes are memoryless.  One sequential random stream is consumed in event
// order, so a fixed seed reproduces the tessellation exactly.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "stit/geometry.hpp"
#include "stit/measure.hpp"
#include "stit/rng.hpp"

namespace stit {

inline constexpr std::uint64_t kNoCell = std::numeric_limits<std::uint64_t>::max();

template <int D>
struct MaximalFacetRecord {
  EmbeddedFacet<D> facet;
  double birth_time = 0.0;
  std::uint64_t parent_cell_id = kNoCell;
  std::uint64_t child_plus_id = kNoCell;
  std::uint64_t child_minus_id = kNoCell;
};

// One node of the binary split tree, indexed by cell id.
struct SplitNode {
  std::uint64_t parent = kNoCell;
  double birth_time = 0.0;
  // Sampled death time; the cell actually split iff death_time <= horizon.
  double death_time = std::numeric_limits<double>::infinity();
  double mass = 0.0;  // hitting mass at creation
  std::uint64_t child_plus = kNoCell;
  std::uint64_t child_minus = kNoCell;
  std::int64_t facet_index = -1;  // facet created by this cell's split
};

template <int D>
struct StitTessellation {
  Polytope<D> window;
  double time = 0.0;
  HyperplaneMeasure<D> measure;
  std::vector<Polytope<D>> cells;  // cells alive at the horizon; id set on each
  std::vector<MaximalFacetRecord<D>> facets;
  std::vector<SplitNode> split_tree;  // indexed by cell id
};

// Streaming core of the construction.  on_facet receives each facet record in
// birth order; on_final_cell receives every cell still alive at the horizon
// together with its birth time.  The optional tree records the full genealogy.
template <int D, typename FacetFn, typename CellFn>
inline void run_mnw(const Polytope<D>& window, const HyperplaneMeasure<D>& measure, double t,
                    RandomStream& rng, FacetFn&& on_facet, CellFn&& on_final_cell,
                    std::vector<SplitNode>* tree = nullptr) {
  if (!(t >= 0.0)) throw std::invalid_argument("run_mnw: negative time horizon");
  const double eps = 1e-9 * diameter(window);
  const double min_vol = 1e-12 * volume(window);

  struct Event {
    double death = 0.0;
    std::uint64_t id = 0;
    double birth = 0.0;
    Polytope<D> cell;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.death != b.death) return a.death > b.death;
      return a.id > b.id;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> queue;

  std::uint64_t next_id = 0;
  auto schedule = [&](Polytope<D> cell, double birth, std::uint64_t parent) {
    const std::uint64_t id = next_id++;
    cell.id = id;
    const double mass = hitting_mass(measure, cell);
    const double death = birth + rng.exponential(mass);
    if (tree) {
      tree->push_back(SplitNode{parent, birth, death, mass, kNoCell, kNoCell, -1});
    }
    queue.push(Event{death, id, birth, std::move(cell)});
    return id;
  };

  if (tree) tree->clear();
  schedule(window, 0.0, kNoCell);

  std::int64_t facet_count = 0;
  while (!queue.empty()) {
    if (queue.top().death > t) {
      // The earliest pending death is beyond the horizon: everything left is final.
      while (!queue.empty()) {
        Event e = std::move(const_cast<Event&>(queue.top()));
        queue.pop();
        on_final_cell(std::move(e.cell), e.birth);
      }
      break;
    }
    Event e = std::move(const_cast<Event&>(queue.top()));
    queue.pop();

    // Draw the splitting hyperplane; a rejected tangential cut is re-drawn
    // without advancing the clock (a measure-zero event under a diffuse
    // measure, so the law is unchanged).
    Cut<D> cut;
    bool ok = false;
    for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
      const Hyperplane<D> h = sample_hitting(measure, e.cell, rng);
      try {
        cut = cut_by_hyperplane(e.cell, h, eps, min_vol);
        ok = true;
      } catch (const NoSplitError&) {
      }
    }
    if (!ok) throw SamplingError("run_mnw: could not realize a split after 1000 proposals");

    const std::uint64_t plus_id = schedule(std::move(cut.plus), e.death, e.id);
    const std::uint64_t minus_id = schedule(std::move(cut.minus), e.death, e.id);

    MaximalFacetRecord<D> rec;
    rec.facet = std::move(cut.facet);
    rec.birth_time = e.death;
    rec.parent_cell_id = e.id;
    rec.child_plus_id = plus_id;
    rec.child_minus_id = minus_id;
    if (tree) {
      auto& node = (*tree)[e.id];
      node.child_plus = plus_id;
      node.child_minus = minus_id;
      node.facet_index = facet_count;
    }
    ++facet_count;
    on_facet(std::move(rec));
  }
}

template <int D>
inline StitTessellation<D> build_stit(const Polytope<D>& window, const HyperplaneMeasure<D>& measure,
                                      double t, RandomStream& rng) {
  StitTessellation<D> out;
  out.window = window;
  out.time = t;
  out.measure = measure;
  run_mnw(
      window, measure, t, rng, [&](MaximalFacetRecord<D>&& f) { out.facets.push_back(std::move(f)); },
      [&](Polytope<D>&& c, double) { out.cells.push_back(std::move(c)); }, &out.split_tree);
  return out;
}

// ---------------------------------------------------------------------------
// Generic tessellation view, iteration, rescaling, restriction

template <int D>
struct MarkedFacet {
  EmbeddedFacet<D> facet;
  double birth_time = std::numeric_limits<double>::quiet_NaN();  // NaN = unmarked
};

template <int D>
struct Tessellation {
  Polytope<D> window;
  std::vector<Polytope<D>> cells;
  std::vector<MarkedFacet<D>> facets;
};

template <int D>
inline Tessellation<D> to_tessellation(const StitTessellation<D>& y) {
  Tessellation<D> out;
  out.window = y.window;
  out.cells = y.cells;
  out.facets.reserve(y.facets.size());
  for (const auto& f : y.facets) out.facets.push_back({f.facet, f.birth_time});
  return out;
}

template <int D>
using ComponentGenerator = std::function<Tessellation<D>(const Polytope<D>& cell, RandomStream& rng)>;

// Local superposition: an independent component tessellation is generated for
// every frame cell and intersected with it.  The facets of the result are the
// frame facets plus the component facets clipped to their cells.
template <int D>
inline Tessellation<D> iterate(const Tessellation<D>& frame, const ComponentGenerator<D>& component,
                               RandomStream& rng) {
  const double eps = 1e-9 * diameter(frame.window);
  const double min_vol = 1e-12 * volume(frame.window);
  const double min_measure = 0.0;

  Tessellation<D> out;
  out.window = frame.window;
  out.facets = frame.facets;
  std::uint64_t next_id = 0;
  for (const auto& cell : frame.cells) {
    Tessellation<D> comp = component(cell, rng);
    for (const auto& sub : comp.cells) {
      Polytope<D> piece = intersect(sub, cell, eps);
      if (piece.empty() || volume(piece) < min_vol) continue;
      piece.id = next_id++;
      out.cells.push_back(std::move(piece));
    }
    for (const auto& f : comp.facets) {
      auto clipped = clip_facet(f.facet, cell, eps, min_measure);
      if (clipped) out.facets.push_back({std::move(*clipped), f.birth_time});
    }
  }
  return out;
}

template <int D>
inline Tessellation<D> rescale(const Tessellation<D>& y, double m) {
  if (!(m > 0.0)) throw std::invalid_argument("rescale: factor must be positive");
  Tessellation<D> out;
  out.window = rescale(y.window, m);
  out.cells.reserve(y.cells.size());
  for (const auto& c : y.cells) out.cells.push_back(rescale(c, m));
  out.facets.reserve(y.facets.size());
  for (const auto& f : y.facets) out.facets.push_back({rescale(f.facet, m), f.birth_time});
  return out;
}

// Intersection of the tessellation with a convex region (cells and facets are
// clipped; empty intersections drop out).
template <int D>
inline Tessellation<D> restrict_to(const Tessellation<D>& y, const Polytope<D>& region) {
  const double eps = 1e-9 * diameter(region);
  const double min_vol = 1e-12 * volume(region);
  Tessellation<D> out;
  out.window = region;
  std::uint64_t next_id = 0;
  for (const auto& c : y.cells) {
    Polytope<D> piece = intersect(c, region, eps);
    if (piece.empty() || volume(piece) < min_vol) continue;
    piece.id = next_id++;
    out.cells.push_back(std::move(piece));
  }
  for (const auto& f : y.facets) {
    auto clipped = clip_facet(f.facet, region, eps, 0.0);
    if (clipped) out.facets.push_back({std::move(*clipped), f.birth_time});
  }
  return out;
}

}  // namespace stit
