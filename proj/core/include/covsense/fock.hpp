#pragma once

// Truncated Fock-space reference implementation used to cross-check the
// Gaussian code. Dense density matrices over at most three modes; channels are
// applied as exact finite Kraus sums and probability pushed past the cutoff is
// reported as trace_deficit.
//
// Basis ordering: |n_0, n_1, ...> with mode 0 most significant.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "covsense/gaussian.hpp"

namespace covsense::fock {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

inline constexpr int kDefaultCutoff = 40;
inline constexpr std::size_t kMaxModes = 3;
/// Largest product-space dimension accepted by from_gaussian.
inline constexpr std::size_t kMaxGaussianDimension = 4096;

struct FockState {
  std::vector<int> cutoffs;
  CMatrix rho;
  double trace_deficit = 0.0;

  std::size_t num_modes() const { return cutoffs.size(); }
  std::size_t dimension() const { return static_cast<std::size_t>(rho.rows()); }
  /// Recomputes trace_deficit as max(0, 1 - tr rho).
  void refresh_deficit();
  /// Throws InvalidStateError unless Hermitian (1e-10), PSD (-1e-9) and
  /// trace + deficit = 1 (1e-9).
  void validate() const;
};

// Constructors ----------------------------------------------------------------

FockState vacuum(std::vector<int> cutoffs);
FockState number_state(int n, int cutoff);
FockState thermal(double mean_photons, int cutoff);
FockState coherent(Complex alpha, int cutoff);
/// Two-mode squeezed vacuum from its Schmidt form, sum_k sqrt(lambda_k) |k, k>.
FockState tmsv(double mean_photons, int cutoff);
FockState tensor(const FockState& a, const FockState& b);

/// Matrix elements of a Gaussian state (at most three modes) by Hermite
/// recursion. Throws TruncationError when a mode's mean photon number exceeds
/// cutoff / 8 or the space exceeds kMaxGaussianDimension.
FockState from_gaussian(const GaussianState& state, std::vector<int> cutoffs);
FockState from_gaussian(const GaussianState& state, int cutoff = kDefaultCutoff);

// Channels ----------------------------------------------------------------------

FockState apply_phase(const FockState& s, std::size_t mode, double theta);
/// Same convention as the Gaussian beamsplitter: a -> sqrt(eta) a + sqrt(1-eta) b.
FockState apply_beamsplitter(const FockState& s, std::size_t a, std::size_t b, double eta);
/// Same convention as the Gaussian two-mode squeezer: a -> sqrt(G) a + sqrt(G-1) b^dagger.
FockState apply_two_mode_squeeze(const FockState& s, std::size_t a, std::size_t b, double gain);
FockState apply_pure_loss(const FockState& s, std::size_t mode, double eta);
/// Quantum-limited amplifier of gain G >= 1; the mode's cutoff may grow to out_cutoff.
FockState apply_amplifier(const FockState& s, std::size_t mode, double gain, int out_cutoff);
/// Receiver-referred thermal loss (kappa, N_B): pure loss kappa / (N_B + 1)
/// followed by amplification N_B + 1. Output cutoff defaults to the input's.
FockState apply_thermal_loss(const FockState& s, std::size_t mode, double kappa,
                             double noise_photons, int out_cutoff = 0);
/// Two-mode squeezing of `mode` with a vacuum auxiliary, keeping only the
/// auxiliary, which takes the mode's place with the given cutoff.
FockState apply_conjugation(const FockState& s, std::size_t mode, double gain, int out_cutoff);
/// Changes one mode's cutoff: pads with zeros or drops the truncated tail.
FockState with_cutoff(const FockState& s, std::size_t mode, int cutoff);
/// Appends a vacuum mode.
FockState append_vacuum(const FockState& s, int cutoff);
FockState partial_trace(const FockState& s, const std::vector<std::size_t>& keep);

enum class ChannelKind { Phase, Beamsplitter, TwoModeSqueeze, ThermalLoss };

struct ChannelSpec {
  ChannelKind kind;
  std::vector<std::size_t> modes;
  /// theta | eta | gain | {kappa, N_B}
  std::vector<double> params;
};

FockState oracle_channel(const FockState& s, const ChannelSpec& spec);

// Statistics ---------------------------------------------------------------------

std::vector<double> photon_distribution(const FockState& s, std::size_t mode);
double photon_mean(const FockState& s, std::size_t mode);
double photon_covariance(const FockState& s, std::size_t a, std::size_t b);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};
Moments difference_stats(const FockState& s, std::size_t a, std::size_t b);

// Metrics --------------------------------------------------------------------------

struct Metrics {
  double fidelity = 0.0;  ///< root fidelity
  double trace_distance = 0.0;
  double rel_entropy = 0.0;  ///< D(a || b), nats
};

/// Throws TruncationError when either deficit exceeds 1e-6 or the cutoffs differ.
Metrics oracle_metrics(const FockState& a, const FockState& b);
double fidelity(const FockState& a, const FockState& b);
double trace_distance(const FockState& a, const FockState& b);
double rel_entropy(const FockState& a, const FockState& b);

/// Quantum Fisher information for rho(theta) = e^{i theta n_mode} rho e^{-i theta n_mode}
/// from the symmetric-logarithmic-derivative spectral formula.
double phase_qfi(const FockState& s, std::size_t mode);

}  // namespace covsense::fock
