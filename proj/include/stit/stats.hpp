// Estimators and hypothesis tests for typical-object statistics: mergeable
// summaries, minus-sampling with Miles-Lantuejoul debiasing weights,
// Kolmogorov-Smirnov distances, and the simulation checks comparing the
// recursive construction against Poisson hyperplane tessellations.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stit/analytic.hpp"
#include "stit/geometry.hpp"
#include "stit/measure.hpp"
#include "stit/mnw.hpp"
#include "stit/parallel.hpp"
#include "stit/pht.hpp"

namespace stit {

// ---------------------------------------------------------------------------
// Mergeable summary

// Counts, raw moment sums, an optional fixed-edge histogram, and an optional
// bounded raw-sample buffer.  merge() is exact for counts and histogram bins;
// moment sums merge by addition.
class EmpiricalSummary {
 public:
  EmpiricalSummary() = default;
  EmpiricalSummary(double hist_lo, double hist_hi, std::size_t bins, std::size_t sample_cap = 0)
      : lo_(hist_lo), hi_(hist_hi), bins_(bins, 0), sample_cap_(sample_cap) {
    if (bins > 0 && !(hist_hi > hist_lo))
      throw std::invalid_argument("EmpiricalSummary: empty histogram range");
  }

  void add(double x) {
    ++count_;
    sum_ += x;
    sum2_ += x * x;
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
    if (!bins_.empty()) {
      if (x < lo_)
        ++underflow_;
      else if (x >= hi_)
        ++overflow_;
      else
        ++bins_[static_cast<std::size_t>((x - lo_) / (hi_ - lo_) * static_cast<double>(bins_.size()))];
    }
    if (samples_.size() < sample_cap_) samples_.push_back(x);
  }

  void merge(const EmpiricalSummary& o) {
    if (bins_.size() != o.bins_.size() || (bins_.size() && (lo_ != o.lo_ || hi_ != o.hi_)))
      throw std::invalid_argument("EmpiricalSummary::merge: incompatible histograms");
    count_ += o.count_;
    sum_ += o.sum_;
    sum2_ += o.sum2_;
    min_ = std::min(min_, o.min_);
    max_ = std::max(max_, o.max_);
    underflow_ += o.underflow_;
    overflow_ += o.overflow_;
    for (std::size_t i = 0; i < bins_.size(); ++i) bins_[i] += o.bins_[i];
    for (double x : o.samples_)
      if (samples_.size() < sample_cap_)
        samples_.push_back(x);
      else
        break;
  }

  std::uint64_t count() const { return count_; }
  double mean() const { return count_ ? sum_ / static_cast<double>(count_) : 0.0; }
  double second_moment() const { return count_ ? sum2_ / static_cast<double>(count_) : 0.0; }
  double variance() const {
    if (count_ < 2) return 0.0;
    const double n = static_cast<double>(count_);
    return std::max(0.0, (sum2_ - sum_ * sum_ / n) / (n - 1.0));
  }
  double se_mean() const { return count_ ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0; }
  double minimum() const { return min_; }
  double maximum() const { return max_; }

  std::size_t bin_count() const { return bins_.size(); }
  double bin_left(std::size_t i) const { return lo_ + (hi_ - lo_) * static_cast<double>(i) / static_cast<double>(bins_.size()); }
  double bin_right(std::size_t i) const { return lo_ + (hi_ - lo_) * static_cast<double>(i + 1) / static_cast<double>(bins_.size()); }
  std::uint64_t bin(std::size_t i) const { return bins_[i]; }
  std::uint64_t underflow() const { return underflow_; }
  std::uint64_t overflow() const { return overflow_; }
  const std::vector<double>& samples() const { return samples_; }

 private:
  std::uint64_t count_ = 0;
  double sum_ = 0.0, sum2_ = 0.0;
  double min_ = std::numeric_limits<double>::infinity();
  double max_ = -std::numeric_limits<double>::infinity();
  double lo_ = 0.0, hi_ = 0.0;
  std::vector<std::uint64_t> bins_;
  std::uint64_t underflow_ = 0, overflow_ = 0;
  std::size_t sample_cap_ = 0;
  std::vector<double> samples_;
};

// ---------------------------------------------------------------------------
// Verdicts

struct Verdict {
  std::string name;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;  // absolute bound on |observed - expected|
  bool pass = false;
  std::uint64_t sample_size = 0;
  std::uint64_t seed = 0;
  double p_value = std::numeric_limits<double>::quiet_NaN();
  std::string detail;
};

inline Verdict make_verdict(std::string name, double observed, double expected, double tolerance,
                            std::uint64_t n, std::uint64_t seed, std::string detail = {}) {
  Verdict v;
  v.name = std::move(name);
  v.observed = observed;
  v.expected = expected;
  v.tolerance = tolerance;
  v.pass = std::abs(observed - expected) <= tolerance;
  v.sample_size = n;
  v.seed = seed;
  v.detail = std::move(detail);
  return v;
}

inline Verdict make_pvalue_verdict(std::string name, double p, double threshold, double statistic,
                                   std::uint64_t n, std::uint64_t seed, std::string detail = {}) {
  Verdict v;
  v.name = std::move(name);
  v.observed = statistic;
  v.expected = 0.0;
  v.tolerance = threshold;  // threshold on the p-value
  v.p_value = p;
  v.pass = p > threshold;
  v.sample_size = n;
  v.seed = seed;
  v.detail = std::move(detail);
  return v;
}

// ---------------------------------------------------------------------------
// Minus-sampling and Miles-Lantuejoul weights

// Objects with any vertex on the window boundary are discarded.
template <typename Obj, int D>
inline std::vector<Obj> minus_sample(const std::vector<Obj>& objects, const Polytope<D>& window) {
  const auto hs = bounding_halfspaces(window);
  const double eps = 1e-9 * diameter(window);
  std::vector<Obj> kept;
  kept.reserve(objects.size());
  for (const auto& o : objects)
    if (!touches_boundary(o.vertices, hs, eps)) kept.push_back(o);
  return kept;
}

// Debiasing weight of a fully observed object in a box window: the inverse
// volume of the positions at which the object fits inside the window.  The
// weighted empirical law of the minus-sampled objects is unbiased for the
// typical-object law (up to shapes too large to fit at all).
template <typename Obj, int D>
inline double ml_weight(const Obj& object, const Polytope<D>& window) {
  const double ev = box_erosion_volume(window, object.vertices);
  if (!(ev > 0.0)) throw std::invalid_argument("ml_weight: object does not fit the window");
  return 1.0 / ev;
}

// Weighted sample pool for typical-object statistics.
struct WeightedSample {
  std::vector<double> values;
  std::vector<double> weights;

  void add(double v, double w) {
    values.push_back(v);
    weights.push_back(w);
  }
  void merge(const WeightedSample& o) {
    values.insert(values.end(), o.values.begin(), o.values.end());
    weights.insert(weights.end(), o.weights.begin(), o.weights.end());
  }
  std::size_t size() const { return values.size(); }
  double total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
  double moment(int m) const {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      num += weights[i] * std::pow(values[i], m);
      den += weights[i];
    }
    return den > 0.0 ? num / den : 0.0;
  }
  double mean() const { return moment(1); }
};

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

// Asymptotic survival function of the KS statistic.
inline double kolmogorov_q(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

namespace detail {
inline double ks_pvalue(double d, double n_eff) {
  const double rn = std::sqrt(n_eff);
  return kolmogorov_q((rn + 0.12 + 0.11 / rn) * d);
}
}  // namespace detail

// One-sample KS statistic and asymptotic p-value.  The CDF is probed on both
// sides of every sample point, so step-function CDFs are handled exactly.
inline std::pair<double, double> ks_distance(std::vector<double> sample,
                                             const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f_right = cdf(sample[i]);
    const double f_left = cdf(std::nextafter(sample[i], -std::numeric_limits<double>::infinity()));
    d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - f_right));
    d = std::max(d, std::abs(f_left - static_cast<double>(i) / n));
  }
  return {d, detail::ks_pvalue(d, n)};
}

// Weighted one-sample KS statistic (weighted empirical CDF vs cdf).
inline double ks_statistic_weighted(const WeightedSample& ws,
                                    const std::function<double(double)>& cdf) {
  if (ws.values.empty()) throw std::invalid_argument("ks_statistic_weighted: empty sample");
  std::vector<std::size_t> idx(ws.values.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return ws.values[a] < ws.values[b]; });
  const double total = ws.total_weight();
  double acc = 0.0, d = 0.0;
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const double x = ws.values[idx[r]];
    const double f = cdf(x);
    d = std::max(d, std::abs(acc / total - f));
    acc += ws.weights[idx[r]];
    d = std::max(d, std::abs(acc / total - f));
  }
  return d;
}

// Two-sample KS statistic and asymptotic p-value.
inline std::pair<double, double> two_sample_ks(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("two_sample_ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, detail::ks_pvalue(d, na * nb / (na + nb))};
}

// ---------------------------------------------------------------------------
// Intensity estimators

template <int D>
inline double estimate_intensity(std::size_t count, const Polytope<D>& window) {
  const double v = volume(window);
  if (!(v > 0.0)) throw std::invalid_argument("estimate_intensity: zero-volume window");
  return static_cast<double>(count) / v;
}

// Plain count estimator; with minus-sampled input it is biased low by the
// boundary fraction, so report it together with the window size.
template <typename Obj, int D>
inline double estimate_intensity(const std::vector<Obj>& objects, const Polytope<D>& window) {
  return estimate_intensity(objects.size(), window);
}

// Miles-Lantuejoul intensity estimator: the weight sum over minus-sampled
// objects is unbiased for the intensity of shapes that can fit the window.
template <typename Obj, int D>
inline double ml_intensity(const std::vector<Obj>& objects, const Polytope<D>& window) {
  double s = 0.0;
  for (const auto& o : objects) {
    const double ev = box_erosion_volume(window, o.vertices);
    if (ev > 0.0) s += 1.0 / ev;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Model comparison checks

// Jump-rate identity: centered finite differences of t -> E[#cells] against
// E[sum of cell hitting masses], from a single path per replication evaluated
// on the grid.  Passes when every interior grid point agrees within
// 3 combined standard errors.
template <int D>
inline Verdict generator_check(const Polytope<D>& window, const HyperplaneMeasure<D>& measure,
                               const std::vector<double>& t_grid, std::size_t reps,
                               std::uint64_t seed, unsigned threads) {
  if (t_grid.size() < 3) throw std::invalid_argument("generator_check: need at least 3 grid points");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (t_grid[i] <= t_grid[i - 1]) throw std::invalid_argument("generator_check: grid not increasing");
  const double t_max = t_grid.back();
  const std::size_t m = t_grid.size();

  struct RepStats {
    std::vector<double> cells;  // N(t_i)
    std::vector<double> mass;   // S(t_i)
  };
  auto per_rep = [&](std::size_t, RandomStream& rng) {
    std::vector<SplitNode> tree;
    run_mnw(
        window, measure, t_max, rng, [](MaximalFacetRecord<D>&&) {}, [](Polytope<D>&&, double) {},
        &tree);
    RepStats st;
    st.cells.assign(m, 0.0);
    st.mass.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double ti = t_grid[i];
      double n = 1.0, s = 0.0;
      for (const auto& node : tree) {
        const bool split_by_ti = node.child_plus != kNoCell && node.death_time <= ti;
        if (split_by_ti) n += 1.0;
        if (node.birth_time <= ti && ti < node.death_time) s += node.mass;
      }
      st.cells[i] = n;
      st.mass[i] = s;
    }
    return st;
  };
  const auto stats = run_replications<RepStats>(seed, reps, threads, per_rep);

  // Per-replication discrepancy X_i = FD_i - S_i at interior points.
  double worst = 0.0;
  std::ostringstream table;
  table << "t  FD(E#cells)  E[sum mass]  diff  3se\n";
  bool pass = true;
  for (std::size_t i = 1; i + 1 < m; ++i) {
    const double h2 = t_grid[i + 1] - t_grid[i - 1];
    double sx = 0.0, sx2 = 0.0;
    for (const auto& st : stats) {
      const double x = (st.cells[i + 1] - st.cells[i - 1]) / h2 - st.mass[i];
      sx += x;
      sx2 += x * x;
    }
    const double n = static_cast<double>(reps);
    const double meanx = sx / n;
    const double se = std::sqrt(std::max(0.0, (sx2 - sx * sx / n) / (n - 1.0)) / n);
    const double z = se > 0.0 ? std::abs(meanx) / se : 0.0;
    worst = std::max(worst, z);
    if (z > 3.0) pass = false;
    double fd = 0.0, g = 0.0;
    for (const auto& st : stats) {
      fd += (st.cells[i + 1] - st.cells[i - 1]) / h2;
      g += st.mass[i];
    }
    table << t_grid[i] << "  " << fd / n << "  " << g / n << "  " << meanx << "  " << 3.0 * se
          << "\n";
  }
  Verdict v = make_verdict("generator identity (max |z|)", worst, 0.0, 3.0,
                           static_cast<std::uint64_t>(reps), seed, table.str());
  v.pass = pass;
  return v;
}

namespace detail {

template <int D>
struct CellStats {
  double count = 0.0;
  std::vector<double> areas;   // minus-sampled cell volumes
  std::vector<double> perims;  // minus-sampled cell boundary measures
};

template <int D>
inline CellStats<D> collect_cells(const std::vector<Polytope<D>>& cells, const Polytope<D>& window) {
  CellStats<D> out;
  out.count = static_cast<double>(cells.size());
  const auto hs = bounding_halfspaces(window);
  const double eps = 1e-9 * diameter(window);
  for (const auto& c : cells) {
    if (touches_boundary(c.vertices, hs, eps)) continue;
    out.areas.push_back(volume(c));
    if constexpr (D == 2)
      out.perims.push_back(perimeter(c));
    else
      out.perims.push_back(surface_area(c));
  }
  return out;
}

inline std::pair<double, double> mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double s = 0.0, s2 = 0.0;
  for (double x : v) {
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  const double var = n > 1 ? std::max(0.0, (s2 - s * s / n) / (n - 1.0)) : 0.0;
  return {mean, std::sqrt(var / n)};
}

}  // namespace detail

// Equality of the expected cell systems of the two models at equal time:
// mean cell counts within 3 sigma, two-sample KS on minus-sampled cell
// volumes and boundary measures with p > 0.01.
template <int D>
inline std::vector<Verdict> meq_check(const Polytope<D>& window, const HyperplaneMeasure<D>& measure,
                                      double t, std::size_t reps, std::uint64_t seed,
                                      unsigned threads) {
  using CS = detail::CellStats<D>;
  auto stit_rep = [&](std::size_t, RandomStream& rng) {
    const auto y = build_stit(window, measure, t, rng);
    return detail::collect_cells<D>(y.cells, window);
  };
  auto pht_rep = [&](std::size_t, RandomStream& rng) {
    const auto y = build_pht(window, measure, t, rng);
    return detail::collect_cells<D>(y.cells, window);
  };
  const auto s_stats = run_replications<CS>(seed, reps, threads, stit_rep);
  const auto p_stats = run_replications<CS>(seed + 0x9E37, reps, threads, pht_rep);

  std::vector<double> s_counts, p_counts, s_areas, p_areas, s_per, p_per;
  for (const auto& st : s_stats) {
    s_counts.push_back(st.count);
    s_areas.insert(s_areas.end(), st.areas.begin(), st.areas.end());
    s_per.insert(s_per.end(), st.perims.begin(), st.perims.end());
  }
  for (const auto& st : p_stats) {
    p_counts.push_back(st.count);
    p_areas.insert(p_areas.end(), st.areas.begin(), st.areas.end());
    p_per.insert(p_per.end(), st.perims.begin(), st.perims.end());
  }
  const auto [ms, ses] = detail::mean_se(s_counts);
  const auto [mp, sep] = detail::mean_se(p_counts);
  const double combined = std::sqrt(ses * ses + sep * sep);

  std::vector<Verdict> out;
  out.push_back(make_verdict("cell count mean difference", ms - mp, 0.0, 3.0 * combined,
                             static_cast<std::uint64_t>(reps), seed,
                             "stit " + std::to_string(ms) + " vs pht " + std::to_string(mp)));
  const auto [d_area, p_area] = two_sample_ks(s_areas, p_areas);
  out.push_back(make_pvalue_verdict("cell volume two-sample KS", p_area, 0.01, d_area,
                                    static_cast<std::uint64_t>(s_areas.size()), seed));
  const auto [d_per, p_perv] = two_sample_ks(s_per, p_per);
  out.push_back(make_pvalue_verdict("cell boundary two-sample KS", p_perv, 0.01, d_per,
                                    static_cast<std::uint64_t>(s_per.size()), seed));
  return out;
}

// Expected k-face measure comparison: the count (and total size) of the
// k-dimensional maximal polytopes against the coefficient-weighted time
// average of the Poisson model, integrated over the time grid with an exact
// zero endpoint.  Also checks trapezoid-grid stability under refinement.
template <int D>
inline std::vector<Verdict> fkeq_check(const Polytope<D>& window, const HyperplaneMeasure<D>& measure,
                                       double t, int k, std::size_t stit_reps,
                                       std::size_t pht_reps_per_point, std::uint64_t seed,
                                       unsigned threads, double rel_tolerance = 0.03) {
  if (k < 1 || k > D - 1) throw std::invalid_argument("fkeq_check: k out of range");

  struct Totals {
    double count = 0.0;
    double size = 0.0;
  };
  auto stit_rep = [&](std::size_t, RandomStream& rng) {
    Totals tot;
    run_mnw(
        window, measure, t, rng,
        [&](MaximalFacetRecord<D>&& f) {
          if (k == D - 1) {
            tot.count += 1.0;
            tot.size += f.facet.measure();
          } else {
            for (const auto& e : k_faces(f.facet, k)) {
              tot.count += 1.0;
              tot.size += face_measure(e);
            }
          }
        },
        [](Polytope<D>&&, double) {});
    return tot;
  };
  const auto stit_tot = run_replications<Totals>(seed, stit_reps, threads, stit_rep);

  // Fine 40-point grid; the coarse 20-point integral uses every other point.
  const int fine = 40;
  std::vector<double> grid(fine);
  for (int i = 0; i < fine; ++i) grid[static_cast<std::size_t>(i)] = t * (i + 1) / fine;
  struct PointEst {
    double count = 0.0, size = 0.0;
  };
  std::vector<PointEst> est(grid.size());
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    auto pht_rep = [&](std::size_t, RandomStream& rng) {
      const auto y = build_pht(window, measure, grid[gi], rng, /*with_cells=*/false);
      PointEst pe;
      const auto faces = extract_faces(y, k);
      pe.count = static_cast<double>(faces.size());
      for (const auto& f : faces) pe.size += face_measure(f);
      return pe;
    };
    const auto rep_est =
        run_replications<PointEst>(seed + 1000 + gi, pht_reps_per_point, threads, pht_rep);
    for (const auto& pe : rep_est) {
      est[gi].count += pe.count / static_cast<double>(pht_reps_per_point);
      est[gi].size += pe.size / static_cast<double>(pht_reps_per_point);
    }
  }

  // Exact s -> 0 limits of F(s)/s: the facet count behaves like the expected
  // number of hyperplanes and the facet mass like s * Vol(W); lower dimensional
  // faces vanish faster.
  const double g0_count = (k == D - 1) ? hitting_mass(measure, window) : 0.0;
  const double g0_size = (k == D - 1) ? volume(window) : 0.0;

  auto integral = [&](int stride, auto field, double g0) {
    std::vector<double> xs{0.0};
    std::vector<double> ys{g0};
    for (std::size_t gi = static_cast<std::size_t>(stride - 1); gi < grid.size();
         gi += static_cast<std::size_t>(stride)) {
      xs.push_back(grid[gi]);
      ys.push_back(field(est[gi]) / grid[gi]);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      acc += 0.5 * (ys[i] + ys[i + 1]) * (xs[i + 1] - xs[i]);
    return acc;
  };
  const double coeff = (D - k) * std::pow(2.0, D - k - 1);
  auto count_of = [](const PointEst& p) { return p.count; };
  auto size_of = [](const PointEst& p) { return p.size; };
  const double pred_count_fine = coeff * integral(1, count_of, g0_count);
  const double pred_count_coarse = coeff * integral(2, count_of, g0_count);
  const double pred_size_fine = coeff * integral(1, size_of, g0_size);

  double sc = 0.0, ss = 0.0;
  for (const auto& tt : stit_tot) {
    sc += tt.count / static_cast<double>(stit_reps);
    ss += tt.size / static_cast<double>(stit_reps);
  }

  std::vector<Verdict> out;
  out.push_back(make_verdict("k-face count ratio (observed/predicted)", sc / pred_count_fine, 1.0,
                             rel_tolerance, static_cast<std::uint64_t>(stit_reps), seed,
                             "stit " + std::to_string(sc) + " vs " + std::to_string(pred_count_fine)));
  out.push_back(make_verdict("k-face total size ratio", ss / pred_size_fine, 1.0, rel_tolerance,
                             static_cast<std::uint64_t>(stit_reps), seed,
                             "stit " + std::to_string(ss) + " vs " + std::to_string(pred_size_fine)));
  out.push_back(make_verdict("time-grid refinement stability", pred_count_coarse / pred_count_fine,
                             1.0, 0.005, static_cast<std::uint64_t>(grid.size()), seed));
  return out;
}

}  // namespace stit
