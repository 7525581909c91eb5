#pragma once

#include <span>
#include <string>
#include <vector>

#include "spinbath/model.hpp"

namespace spinbath {

// Time-indexed samples of a decoherence factor or expectation value.
// Quantities that are real by construction (expectation, case2, r2, r3,
// |r1|^2) carry an exactly zero imaginary part.
struct DecoherenceSeries {
  std::vector<double> times;
  std::vector<Complex> values;
  std::string label;
};

// Per-factor and product bounds of the |r1|^2 factors: each factor moves
// between (2|alpha_i|^2 - 1)^2 and 1.
struct EnvelopeBounds {
  std::vector<double> per_factor_max;
  std::vector<double> per_factor_min;
  double product_min = 1.0;
  double product_max = 1.0;
};

/// Diagonal-branch product factor of the general expectation value.
/// Mathematically real for Hermitian blocks; returned with zero imaginary
/// part. Throws std::invalid_argument on block-count mismatch.
Complex gamma0(double t, const SpinBathConfig& config, const ObservableSpec& obs);

/// Cross-branch product factor of the general expectation value.
Complex gamma1(double t, const SpinBathConfig& config, const ObservableSpec& obs);

/// Exact expectation value of the product observable at time t. The up and
/// down branches see the bath rotated in opposite time directions, so the
/// two diagonal weights multiply gamma0(t) and gamma0(-t) respectively; for
/// real coefficients the two coincide.
double expectation(double t, const SpinBathConfig& config, const ObservableSpec& obs);

/// One factor of r1: cos(g t) + i (|alpha|^2 - |beta|^2) sin(g t). Uses the
/// normalization |alpha|^2 + |beta|^2 = 1, which makes the value exactly 1
/// at t = 0.
Complex r1_factor(double t, const BathParticle& p);

/// Decoherence factor for observing the central particle.
Complex r1(double t, const SpinBathConfig& config);

/// |r1|^2 evaluated through its own product form
/// (|alpha|^4 + |beta|^4 + 2 |alpha|^2 |beta|^2 cos 2gt per factor), kept as
/// an independent consistency route next to |r1(t)|^2.
double r1_modsq(double t, const SpinBathConfig& config);

/// Envelope bounds of the r1_modsq factors.
EnvelopeBounds envelope(const SpinBathConfig& config);

/// Oscillating term of the single-observed-particle expectation:
/// Re(alpha conj(beta) od e^{+igt}). Never decays; its amplitude is
/// |alpha beta od|.
double r2(double t, const BathParticle& particle, const HermitianBlock2& block);

/// Expectation of the product observable over the first p = blocks.size()
/// observed particles (identity elsewhere); real by construction. Throws
/// std::invalid_argument unless 1 <= p <= config.size().
double case2_expectation(double t, const SpinBathConfig& config,
                         const std::vector<HermitianBlock2>& blocks);

/// Product of p spin-x expectations: factors 2 Re(conj(alpha) beta (1/2)
/// e^{-igt}). Depends only on the first p particles.
double r3(double t, const SpinBathConfig& config, std::size_t p);

// ---------------------------------------------------------------------------
// Underflow-safe products
// ---------------------------------------------------------------------------

// A complex product in log-magnitude/phase form. A zero factor gives
// log_magnitude = -infinity with phase 0.
struct LogProduct {
  double log_magnitude = 0.0;
  double phase = 0.0;
  Complex value() const;
};

// Streaming accumulator: multiplies factors into a working block and flushes
// the block into (log-magnitude, phase) form whenever its magnitude leaves a
// safe range, so arbitrarily long products never underflow or overflow.
class LogProductAccumulator {
 public:
  void push(Complex factor);
  LogProduct result() const;

 private:
  void flush();

  Complex block_{1.0, 0.0};
  LogProduct flushed_{};
  bool zero_ = false;
};

/// Product of a factor sequence in log-magnitude/phase form. Exponentiating
/// reproduces the naive product to 1e-12 relative whenever that product is
/// representable.
LogProduct stable_product_accumulate(std::span<const Complex> factors);

/// r1 at a single time in log form (exact factors, any N).
LogProduct r1_log(double t, const SpinBathConfig& config);

struct LogSeries {
  std::vector<double> times;
  std::vector<LogProduct> values;
  std::string label;
};

// Above this particle count, series evaluation switches from the naive
// complex product to the log-accumulated path (the raw product starts to
// underflow around N ~ 1e5 for typical factor magnitudes).
inline constexpr std::size_t kNaiveProductMaxParticles = 10000;

/// r1 over a grid in log form. For N <= kNaiveProductMaxParticles each
/// factor is evaluated exactly per point; beyond that, each particle's
/// e^{igt} is advanced across the uniform grid by a complex rotation
/// recurrence (re-synchronized every 256 points), which keeps very large N
/// affordable at a per-factor accuracy of a few 1e-14.
LogSeries r1_log_series(const SpinBathConfig& config, const TimeGrid& grid);

// ---------------------------------------------------------------------------
// Series evaluation (pointwise over a grid, assembled in grid order)
// ---------------------------------------------------------------------------

DecoherenceSeries series_gamma0(const SpinBathConfig&, const ObservableSpec&, const TimeGrid&);
DecoherenceSeries series_gamma1(const SpinBathConfig&, const ObservableSpec&, const TimeGrid&);
DecoherenceSeries series_expectation(const SpinBathConfig&, const ObservableSpec&, const TimeGrid&);
// Naive product for N <= kNaiveProductMaxParticles, log path beyond (values
// that fall under the smallest double flush to zero).
DecoherenceSeries series_r1(const SpinBathConfig&, const TimeGrid&);
DecoherenceSeries series_r1_modsq(const SpinBathConfig&, const TimeGrid&);
DecoherenceSeries series_r2(const BathParticle&, const HermitianBlock2&, const TimeGrid&);
DecoherenceSeries series_case2(const SpinBathConfig&, const std::vector<HermitianBlock2>&, const TimeGrid&);
DecoherenceSeries series_r3(const SpinBathConfig&, std::size_t p, const TimeGrid&);

/// Series of |values| of an existing series (label gets an "abs_" prefix).
DecoherenceSeries abs_series(const DecoherenceSeries& series);

}  // namespace spinbath
