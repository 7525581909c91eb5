#include "spinbath/ensembles.hpp"

#include <algorithm>
#include <cmath>

#include "spinbath/rng.hpp"

namespace spinbath {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

// Salt separating observable-block streams from particle streams.
constexpr std::uint64_t kObservableSalt = 0x0B5E55A17ED0B5ull;

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  if (v.size() % 2 == 1) return v[m];
  return 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

SpinBathConfig sample_config(const SamplerSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("sample_config: n must be >= 1");
  if (!(spec.g_min < spec.g_max))
    throw std::invalid_argument("sample_config: need g_min < g_max");

  SpinBathConfig config;
  if (spec.phases == PhaseMode::RandomPhases) {
    SplitMix64 sys(substream_seed(spec.seed, 0));
    config.a = std::polar(kInvSqrt2, kTwoPi * sys.next_unit());
    config.b = std::polar(kInvSqrt2, kTwoPi * sys.next_unit());
  } else {
    config.a = config.b = Complex{kInvSqrt2, 0.0};
  }

  config.particles.reserve(spec.n);
  for (std::size_t i = 1; i <= spec.n; ++i) {
    SplitMix64 st(substream_seed(spec.seed, i));
    const double u = st.next_unit();  // |alpha|^2
    const double g = spec.g_max - (spec.g_max - spec.g_min) * st.next_unit();
    double pa = 0.0, pb = 0.0;
    if (spec.phases == PhaseMode::RandomPhases) {
      pa = kTwoPi * st.next_unit();
      pb = kTwoPi * st.next_unit();
    }
    config.particles.push_back(
        {std::polar(std::sqrt(u), pa), std::polar(std::sqrt(1.0 - u), pb), g});
  }
  return config;
}

HermitianBlock2 sample_block(std::uint64_t seed, std::size_t index) {
  SplitMix64 st(substream_seed(seed ^ kObservableSalt, index));
  HermitianBlock2 b;
  b.uu = 2.0 * st.next_unit() - 1.0;
  b.dd = 2.0 * st.next_unit() - 1.0;
  b.od = {2.0 * st.next_unit() - 1.0, 2.0 * st.next_unit() - 1.0};
  return b;
}

ObservableSpec sample_observable(std::uint64_t seed, std::size_t n) {
  ObservableSpec obs;
  obs.system = sample_block(seed, 0);
  obs.particle_blocks.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) obs.particle_blocks.push_back(sample_block(seed, i));
  return obs;
}

std::optional<double> decay_time(const DecoherenceSeries& series, double threshold,
                                 double dwell) {
  if (!(threshold > 0.0)) throw std::invalid_argument("decay_time: threshold must be > 0");
  if (dwell < 0.0) throw std::invalid_argument("decay_time: dwell must be >= 0");
  if (series.times.empty()) throw std::invalid_argument("decay_time: empty series");
  const double span = series.times.back() - series.times.front();
  if (dwell > span) throw std::invalid_argument("decay_time: dwell exceeds grid span");

  const std::size_t m = series.times.size();
  std::size_t i = 0;
  while (i < m) {
    if (!(std::abs(series.values[i]) < threshold)) {
      ++i;
      continue;
    }
    std::size_t hi = i;  // maximal run of below-threshold points
    while (hi + 1 < m && std::abs(series.values[hi + 1]) < threshold) ++hi;
    const double window_end = series.times[i] + dwell;
    const bool observable = window_end <= series.times.back();
    const bool clean = hi + 1 >= m || series.times[hi + 1] > window_end;
    if (observable && clean) return series.times[i];
    i = hi + 1;
  }
  return std::nullopt;
}

std::vector<std::pair<std::size_t, double>> n_trend(
    std::size_t seeds, const std::vector<std::size_t>& n_values, double t_probe,
    const SamplerSpec& tmpl) {
  if (t_probe == 0.0)
    throw std::invalid_argument("n_trend: t_probe must be nonzero (r1(0) = 1 identically)");
  if (seeds < 1) throw std::invalid_argument("n_trend: need at least one seed");

  std::vector<std::size_t> ns = n_values;
  std::sort(ns.begin(), ns.end());

  std::vector<std::pair<std::size_t, double>> out;
  out.reserve(ns.size());
  for (std::size_t n : ns) {
    std::vector<double> vals;
    vals.reserve(seeds);
    for (std::size_t k = 0; k < seeds; ++k) {
      SamplerSpec spec = tmpl;
      spec.seed = tmpl.seed + k;
      spec.n = n;
      vals.push_back(std::abs(r1(t_probe, sample_config(spec))));
    }
    out.emplace_back(n, median_of(std::move(vals)));
  }
  return out;
}

double fluctuation_std(const DecoherenceSeries& series, double t_a, double t_b) {
  if (series.times.empty()) throw std::invalid_argument("fluctuation_std: empty series");
  if (!(t_a < t_b) || t_a < series.times.front() || t_b > series.times.back())
    throw std::invalid_argument("fluctuation_std: window must lie inside the grid");

  std::vector<double> vals;
  for (std::size_t j = 0; j < series.times.size(); ++j)
    if (series.times[j] >= t_a && series.times[j] <= t_b)
      vals.push_back(series.values[j].real());
  if (vals.size() < 2)
    throw std::invalid_argument("fluctuation_std: window must contain at least 2 points");

  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(vals.size());
  double acc = 0.0;
  for (double v : vals) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(vals.size()));
}

std::vector<double> recurrence_scan(const DecoherenceSeries& series, double threshold,
                                    double after) {
  std::vector<double> revivals;
  for (std::size_t j = 0; j < series.times.size(); ++j)
    if (series.times[j] > after && std::abs(series.values[j]) > threshold)
      revivals.push_back(series.times[j]);
  return revivals;
}

EnsembleStats ensemble_r1_stats(const SamplerSpec& tmpl, std::size_t seeds,
                                const TimeGrid& grid, double threshold, double dwell,
                                double window_a, double window_b) {
  if (seeds < 1) throw std::invalid_argument("ensemble_r1_stats: need at least one seed");
  EnsembleStats stats;
  stats.per_seed_series.reserve(seeds);
  for (std::size_t k = 0; k < seeds; ++k) {
    SamplerSpec spec = tmpl;
    spec.seed = tmpl.seed + k;
    stats.per_seed_series.push_back(series_r1(sample_config(spec), grid));
  }

  const std::size_t m = stats.per_seed_series.front().times.size();
  stats.median_abs.times = stats.per_seed_series.front().times;
  stats.median_abs.label = "median_abs_r1";
  stats.median_abs.values.reserve(m);
  std::vector<double> column(seeds);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < seeds; ++k)
      column[k] = std::abs(stats.per_seed_series[k].values[j]);
    stats.median_abs.values.push_back({median_of(column), 0.0});
  }

  stats.fluctuation_std = fluctuation_std(stats.median_abs, window_a, window_b);
  stats.decay_time = decay_time(stats.median_abs, threshold, dwell);
  return stats;
}

}  // namespace spinbath
