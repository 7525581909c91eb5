#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "spinbath/model.hpp"

namespace spinbath::oracle {

// Hard cap on bath size: a state of 2^15 amplitudes is still desk-scale.
inline constexpr std::size_t kMaxBathParticles = 14;

// Up to this bath size the observable is materialized as an explicit dense
// matrix and applied by full matrix-vector product; above it the same
// operator acts factor by factor on the state vector (still the dense
// operator, never the factorized scalar formula of the engine under test).
inline constexpr std::size_t kDenseMatrixMaxParticles = 10;

// Full state vector of the composite system, 2^(N+1) amplitudes. Index
// layout: the system occupies the most significant bit, bath particle i
// (1-based) the bit below by i positions; bit value 0 = up, 1 = down.
struct DenseState {
  std::size_t n_particles = 0;
  std::vector<Complex> amplitudes;

  std::size_t dim() const { return amplitudes.size(); }
};

// The product observable as a dense operator. Entries are available
// individually for any N <= kMaxBathParticles; apply() contracts it with a
// state vector.
class DenseObservable {
 public:
  explicit DenseObservable(const ObservableSpec& obs);

  std::size_t n_particles() const { return particles_.size(); }
  std::size_t dim() const { return std::size_t{1} << (particles_.size() + 1); }

  Complex entry(std::size_t row, std::size_t col) const;
  std::vector<Complex> apply(const std::vector<Complex>& amplitudes) const;

 private:
  std::array<Complex, 4> system_;
  std::vector<std::array<Complex, 4>> particles_;
  std::vector<Complex> dense_;  // materialized when n <= kDenseMatrixMaxParticles
};

/// Product state (a|up> + b|down>) ⊗_i (alpha_i|up> + beta_i|down>).
/// Throws ResourceLimitError above the bath cap.
DenseState build_initial_state(const SpinBathConfig& config);

/// Exact evolution. The Hamiltonian is diagonal in the product basis; each
/// amplitude picks up exp(-i E t) with the basis energy
/// E = -(1/2) sigma_s * sum_i g_i sigma_i (sigma = +1 for an up bit). The
/// sign is fixed so that this reproduces the factored solution
/// evolve_factored() identically: the up branch advances bath phases by
/// +g_i t / 2. Throws std::invalid_argument on dimension mismatch.
DenseState evolve(const DenseState& state, const SpinBathConfig& config, double t);

/// Second construction of the evolved state, assembled directly from the
/// factored branch form a|up>|E_up(t)> + b|down>|E_dn(t)> with
/// |E_up(t)> = ⊗_i (alpha_i e^{+i g_i t/2}|up> + beta_i e^{-i g_i t/2}|down>)
/// and |E_dn(t)> = |E_up(-t)>. Must agree with evolve() per amplitude.
DenseState evolve_factored(const SpinBathConfig& config, double t);

/// Kronecker product of the system block with each particle block, in the
/// fixed bit order. Throws ResourceLimitError above the bath cap.
DenseObservable build_observable(const ObservableSpec& obs);

/// <psi(t)| O |psi(t)> by direct contraction; the imaginary residual is
/// checked against 1e-10 and the real part returned.
double oracle_expectation(const SpinBathConfig& config, const ObservableSpec& obs, double t);

/// Contraction of a prebuilt observable with a prebuilt state (same value as
/// oracle_expectation; avoids rebuilding the operator per time point).
double expectation_value(const DenseObservable& op, const DenseState& state);

double state_norm(const DenseState& state);

/// max_k |psi1_k e^{i phi} - psi2_k| with the global phase phi chosen to
/// align the largest-magnitude amplitude of the two states.
double max_amplitude_deviation(const DenseState& a, const DenseState& b);

}  // namespace spinbath::oracle
