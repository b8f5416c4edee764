// Closed-form laws of typical maximal polytopes of the iteration-stable
// tessellation: the Beta(d,1) mixture over Poisson hyperplane tessellations,
// the I-segment length density and its moments, birth-time densities, and the
// intensity coefficient relating the two models, plus a simulation-backed
// sampler of the mixture itself.
//
// The I-segment length density for the isotropic model at time t is
//
//     p_d(x) = d * ig(d+1, g1 t x) / ((g1 t)^d x^(d+1)),
//
// where ig is the lower incomplete gamma function and g1 the typical-edge
// rate constant of an isotropic Poisson hyperplane tessellation per unit
// surface intensity.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "stit/geometry.hpp"
#include "stit/measure.hpp"
#include "stit/pht.hpp"
#include "stit/rng.hpp"

namespace stit {

namespace special {

// Regularized lower incomplete gamma P(a,x): series for x < a+1, continued
// fraction for the complement otherwise.  Absolute accuracy ~1e-15 for the
// small integer orders used here.
inline double regularized_gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("regularized_gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - lg);
  }
  // Lentz continued fraction for Q(a,x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + a * std::log(x) - lg) * h;
  return 1.0 - q;
}

// Unnormalized lower incomplete gamma ig(a,x) = P(a,x) * Gamma(a).
inline double lower_incomplete_gamma(double a, double x) {
  return regularized_gamma_p(a, x) * std::tgamma(a);
}

}  // namespace special

namespace detail {
constexpr double kPi = 3.14159265358979323846;
inline void check_dim(int d) {
  if (d != 2 && d != 3) throw std::invalid_argument("dimension must be 2 or 3");
}
}  // namespace detail

// Rate constant of the exponential typical-edge length law of an isotropic
// Poisson hyperplane tessellation with unit surface intensity:
// Gamma(d/2) / (Gamma(1/2) Gamma((d+1)/2)).  2/pi in 2D, 1/2 in 3D.
inline double gamma1(int d) {
  detail::check_dim(d);
  return std::tgamma(d / 2.0) / (std::tgamma(0.5) * std::tgamma((d + 1) / 2.0));
}

// Typical I-segment length density at time t (isotropic model).
inline double isegment_density(int d, double t, double x) {
  detail::check_dim(d);
  if (!(x > 0.0)) throw std::domain_error("isegment_density: x must be positive");
  if (!(t > 0.0)) throw std::domain_error("isegment_density: t must be positive");
  const double g = gamma1(d);
  const double z = g * t * x;
  return d * special::lower_incomplete_gamma(d + 1, z) / (std::pow(g * t, d) * std::pow(x, d + 1));
}

inline double isegment_cdf(int d, double t, double x) {
  detail::check_dim(d);
  if (x <= 0.0) return 0.0;
  const double g = gamma1(d);
  const double z = g * t * x;
  return 1.0 - d * special::lower_incomplete_gamma(d, z) / std::pow(z, d);
}

// m-th moment of the I-segment length; finite exactly for m <= d-1.
inline double isegment_moment(int d, double t, int m) {
  detail::check_dim(d);
  if (m < 0 || m >= d) throw std::domain_error("isegment_moment: moment of order >= d diverges");
  if (m == 0) return 1.0;
  double mfact = 1.0;
  for (int i = 2; i <= m; ++i) mfact *= i;
  return d * mfact / ((d - m) * std::pow(gamma1(d) * t, m));
}

// Density of the typical birth-time mark: d s^(d-1) / t^d on (0,t), zero
// outside by convention.
inline double birth_time_density(int d, double t, double s) {
  detail::check_dim(d);
  if (s <= 0.0 || s >= t) return 0.0;
  return d * std::pow(s, d - 1) / std::pow(t, d);
}

inline double birth_time_cdf(int d, double t, double s) {
  detail::check_dim(d);
  if (s <= 0.0) return 0.0;
  if (s >= t) return 1.0;
  return std::pow(s / t, d);
}

inline double birth_time_mean(int d, double t) {
  detail::check_dim(d);
  return t * d / (d + 1.0);
}

// Intensity of k-dimensional maximal polytopes relative to the k-face
// intensity of the Poisson hyperplane tessellation at equal time:
// (d-k)/d * 2^(d-k-1).
inline double intensity_coefficient(int d, int k) {
  detail::check_dim(d);
  if (k < 1 || k > d - 1) throw std::invalid_argument("intensity_coefficient: k out of range");
  return (d - k) / static_cast<double>(d) * std::pow(2.0, d - k - 1);
}

// Mean j-th intrinsic volume of the typical k-dimensional maximal polytope in
// the isotropic model:  d/((d-j) kappa_j) * C(k,j) * (2/(gamma1 t))^j.
inline double mean_intrinsic_volume_isotropic(int j, int k, int d, double t) {
  detail::check_dim(d);
  if (k < 0 || k > d - 1 || j < 0 || j > k)
    throw std::invalid_argument("mean_intrinsic_volume_isotropic: need 0 <= j <= k <= d-1");
  static constexpr double kappa[4] = {1.0, 2.0, detail::kPi, 4.0 * detail::kPi / 3.0};
  double binom = 1.0;
  for (int i = 0; i < j; ++i) binom = binom * (k - i) / (i + 1);
  return d / ((d - j) * kappa[j]) * binom * std::pow(2.0 / (gamma1(d) * t), j);
}

template <int D>
inline double mean_intrinsic_volume(int j, int k, const DirectionalDistribution<D>& R, double t) {
  if (!R.is_isotropic())
    throw std::invalid_argument(
        "mean intrinsic volumes are only implemented for the isotropic directional distribution");
  return mean_intrinsic_volume_isotropic(j, k, D, t);
}

// Mixing time with density d s^(d-1) / t^d on (0,t).
inline double sample_mixing_time(int d, double t, RandomStream& rng) {
  detail::check_dim(d);
  return t * std::pow(rng.uniform(), 1.0 / d);
}

template <int D>
struct TypicalMixtureDraw {
  KFace<D> face;
  double time = 0.0;  // the birth-time mark
};

// Sampler of the birth-time-marked typical k-dimensional maximal polytope:
// the mark s follows the Beta(d,1) mixing law, conditionally on which the face
// is a typical k-face of the Poisson hyperplane tessellation at time s.
//
// Because PHT(s Lambda) equals (1/s) PHT(Lambda) in law, every realization is
// simulated at unit intensity in a fixed window and rescaled by 1/s.  A
// realization yields one face by independent thinning: every interior face is
// flagged with probability proportional to its inverse erosion volume (the
// minus-sampling debiasing weight) against a rate calibrated once from pilot
// realizations; a realization is used only when exactly one flag comes up.
// The flag rate being realization-independent is what removes the ratio bias
// a per-realization normalized pick would have.
template <int D>
class TypicalMixtureSampler {
 public:
  TypicalMixtureSampler(int k, double t, HyperplaneMeasure<D> base, double window_factor = 30.0)
      : k_(k), t_(t), base_(std::move(base)) {
    if (k_ < 1 || k_ > D - 1) throw std::invalid_argument("typical mixture: k out of range");
    if (!(t_ > 0.0)) throw std::domain_error("typical mixture: t must be positive");
    unit_measure_ = HyperplaneMeasure<D>{1.0, base_.directional};
    Vec<D> lo{}, hi{};
    for (int i = 0; i < D; ++i) hi[i] = window_factor;
    window_ = make_window(lo, hi);
    window_halfspaces_ = bounding_halfspaces(window_);
    boundary_eps_ = 1e-9 * diameter(window_);
  }

  TypicalMixtureDraw<D> sample(RandomStream& rng) {
    ensure_calibrated(rng);
    const double s = sample_mixing_time(D, t_, rng);
    const double scale = 1.0 / (s * base_.time_scale);
    for (int attempt = 0; attempt < 20'000; ++attempt) {
      realize(rng);
      int flagged = -1;
      int flags = 0;
      for (std::size_t i = 0; i < weights_.size() && flags < 2; ++i) {
        const double p = std::min(1.0, flag_rate_ * weights_[i]);
        if (rng.uniform() < p) {
          ++flags;
          flagged = static_cast<int>(i);
        }
      }
      if (flags != 1) continue;
      KFace<D> face = faces_[static_cast<std::size_t>(flagged)];
      for (auto& v : face.vertices) v *= scale;
      return {std::move(face), s};
    }
    throw SamplingError("typical mixture: thinning failed to select a face");
  }

 private:
  void realize(RandomStream& rng) {
    faces_.clear();
    weights_.clear();
    const auto y = build_pht(window_, unit_measure_, 1.0, rng, /*with_cells=*/false);
    auto all = extract_faces(y, k_);
    for (auto& f : all) {
      if (touches_boundary(f.vertices, window_halfspaces_, boundary_eps_)) continue;
      const double ev = box_erosion_volume(window_, f.vertices);
      if (!(ev > 0.0)) continue;
      faces_.push_back(std::move(f));
      weights_.push_back(1.0 / ev);
    }
  }

  void ensure_calibrated(RandomStream& rng) {
    if (flag_rate_ > 0.0) return;
    double total = 0.0;
    const int pilots = 8;
    for (int i = 0; i < pilots; ++i) {
      realize(rng);
      for (double w : weights_) total += w;
    }
    if (!(total > 0.0))
      throw SamplingError("typical mixture: no interior face in pilot realizations");
    // Keep the expected flag count per realization small so that multi-flag
    // realizations (which get rejected) distort face probabilities only at
    // O(rate * weight).
    flag_rate_ = 0.2 * pilots / total;
  }

  int k_;
  double t_;
  HyperplaneMeasure<D> base_;
  HyperplaneMeasure<D> unit_measure_;
  Polytope<D> window_;
  std::vector<Hyperplane<D>> window_halfspaces_;
  double boundary_eps_ = 0.0;
  double flag_rate_ = 0.0;
  std::vector<KFace<D>> faces_;
  std::vector<double> weights_;
};

// Single-draw convenience wrapper; for bulk sampling construct a
// TypicalMixtureSampler once (the wrapper re-runs its pilot calibration on
// every call).
template <int D>
inline TypicalMixtureDraw<D> sample_typical_mixture(int k, double t,
                                                    const HyperplaneMeasure<D>& base,
                                                    RandomStream& rng,
                                                    double window_factor = 30.0) {
  TypicalMixtureSampler<D> sampler(k, t, base, window_factor);
  return sampler.sample(rng);
}

}  // namespace stit
