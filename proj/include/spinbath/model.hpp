#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinbath {

using Complex = std::complex<double>;

// Normalization tolerance for |a|^2+|b|^2 = 1 and |alpha|^2+|beta|^2 = 1.
// The sampler constructs exactly normalized pairs; the tolerance guards
// hand-written configurations.
inline constexpr double kNormTolerance = 1e-12;

// Thrown when a request exceeds a hard resource cap (oracle state size).
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One bath spin-1/2 particle: state amplitudes (alpha |up> + beta |down>)
// and its coupling g to the central particle (angular frequency, hbar = 1).
struct BathParticle {
  Complex alpha{1.0, 0.0};
  Complex beta{0.0, 0.0};
  double g = 0.0;
};

// The full model: central-particle amplitudes (a |up> + b |down>) plus an
// ordered list of N >= 1 bath particles. Basis convention everywhere:
// index 0 = up, index 1 = down, in the fixed quantization direction.
struct SpinBathConfig {
  Complex a{1.0, 0.0};
  Complex b{0.0, 0.0};
  std::vector<BathParticle> particles;

  std::size_t size() const { return particles.size(); }
};

// A 2x2 Hermitian block of a product observable. `uu` and `dd` are the
// real diagonal entries (up-up and down-down). `od` is the single stored
// off-diagonal coefficient; the other off-diagonal entry is conj(od).
// Convention: for the system block `od` is the down-up (lower-left) entry,
// for a particle block it is the up-down (upper-right) entry — i.e. in both
// cases the coefficient that appears unconjugated in the closed-form
// expectation formulas.
struct HermitianBlock2 {
  double uu = 0.0;
  double dd = 0.0;
  Complex od{0.0, 0.0};
};

inline HermitianBlock2 identity_block() { return {1.0, 1.0, {0.0, 0.0}}; }

// Spin projection onto the x axis: zero diagonal, off-diagonal 1/2.
inline HermitianBlock2 spin_x_block() { return {0.0, 0.0, {0.5, 0.0}}; }

// Row-major 2x2 matrices over the {up, down} basis, with the role-dependent
// placement of `od` described above. Both are Hermitian by construction.
std::array<Complex, 4> system_block_matrix(const HermitianBlock2& b);
std::array<Complex, 4> particle_block_matrix(const HermitianBlock2& b);

// A product observable: one system block tensored with one block per bath
// particle. particle_blocks.size() must match the config it is evaluated
// against (checked at evaluation time).
struct ObservableSpec {
  HermitianBlock2 system;
  std::vector<HermitianBlock2> particle_blocks;
};

// Uniform time sampling of [t_start, t_end], both endpoints included.
// `steps` is the number of sample points.
struct TimeGrid {
  double t_start = 0.0;
  double t_end = 50.0;
  std::size_t steps = 2000;
};

// Expands a TimeGrid into its sample times (strictly increasing; the last
// point is exactly t_end). Throws std::invalid_argument on a degenerate
// grid (steps = 0, t_start > t_end, or steps > 1 with t_start == t_end).
std::vector<double> grid_times(const TimeGrid& grid);

struct Violation {
  long particle = -1;  // -1 refers to the system amplitudes
  double residual = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks finiteness, N >= 1 and the normalization constraints; returns a
// report naming each offending particle and the residual |norm - 1|.
ValidationReport validate_config(const SpinBathConfig& config);

// Observable for "observe the central particle": system block as given,
// all n particle blocks the identity. Throws std::invalid_argument if n = 0.
ObservableSpec observable_case1(const HermitianBlock2& system, std::size_t n);

// Observable for "observe the first p bath particles": identity system
// block, blocks 1..p as given, identities beyond. Throws
// std::invalid_argument unless 1 <= p <= n.
ObservableSpec observable_case2(const std::vector<HermitianBlock2>& observed,
                                std::size_t n);

}  // namespace spinbath
