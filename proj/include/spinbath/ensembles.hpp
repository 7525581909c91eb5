#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "spinbath/engine.hpp"
#include "spinbath/model.hpp"

namespace spinbath {

enum class PhaseMode {
  RealCoefficients,  // all sampled amplitudes real non-negative
  RandomPhases,      // independent uniform(0, 2pi) phase on each amplitude
};

struct SamplerSpec {
  std::uint64_t seed = 0;
  std::size_t n = 1;
  double g_min = 0.0;
  double g_max = 1.0;
  PhaseMode phases = PhaseMode::RealCoefficients;
};

/// Deterministic config sampling: |alpha_i|^2 ~ uniform(0,1) with
/// |beta_i|^2 its normalization complement, g_i ~ uniform(g_min, g_max]
/// (half-open, so the default range (0, 1] never produces g = 0), and
/// a = b = 1/sqrt(2). One substream per particle index: the first p
/// particles are bitwise identical for every n >= p.
SpinBathConfig sample_config(const SamplerSpec& spec);

/// Generic Hermitian block with entries uniform in [-1, 1) (complex
/// off-diagonal), from the salted observable substream of `seed`. Index 0
/// addresses a system block, index i >= 1 the block of particle i; blocks
/// are prefix-stable in the same way as sampled particles.
HermitianBlock2 sample_block(std::uint64_t seed, std::size_t index);

/// Random product observable for an n-particle config (system block plus n
/// particle blocks from sample_block).
ObservableSpec sample_observable(std::uint64_t seed, std::size_t n);

/// Smallest grid time t* such that |value| < threshold at every grid point
/// of [t*, t* + dwell], with the dwell window lying inside the grid;
/// std::nullopt if no such t* exists. Throws std::invalid_argument if the
/// dwell exceeds the grid span (or threshold <= 0, dwell < 0).
std::optional<double> decay_time(const DecoherenceSeries& series,
                                 double threshold, double dwell);

/// For each n (ascending), the median over `seeds` consecutive seeds
/// (template.seed + k) of |r1(t_probe)|. Throws std::invalid_argument for
/// t_probe = 0, where r1 = 1 identically.
std::vector<std::pair<std::size_t, double>> n_trend(
    std::size_t seeds, const std::vector<std::size_t>& n_values,
    double t_probe, const SamplerSpec& tmpl);

/// Population standard deviation of the real values over grid points in
/// [t_a, t_b]; the window must lie inside the grid and contain at least two
/// points.
double fluctuation_std(const DecoherenceSeries& series, double t_a, double t_b);

/// Grid times t > after where |value| exceeds threshold (empirical revivals).
std::vector<double> recurrence_scan(const DecoherenceSeries& series,
                                    double threshold, double after);

// Ensemble summary of |r1| over a seed range: per-seed series, the pointwise
// median of |r1|, its fluctuation std over a stated late-time window and the
// decay time of the median.
struct EnsembleStats {
  std::vector<DecoherenceSeries> per_seed_series;
  DecoherenceSeries median_abs;
  double fluctuation_std = 0.0;
  std::optional<double> decay_time;
};

EnsembleStats ensemble_r1_stats(const SamplerSpec& tmpl, std::size_t seeds,
                                const TimeGrid& grid, double threshold,
                                double dwell, double window_a, double window_b);

}  // namespace spinbath
