#pragma once

// Phase-space representation of bosonic Gaussian states.
//
// Conventions: quadratures obey [x, p] = 2i, so the vacuum covariance is the
// identity and the mean photon number of a mode is
//   n = (tr V_mode - 2) / 4 + |d_mode|^2 / 4.
// Vectors are ordered (x1, p1, ..., xn, pn).

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace covsense {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ModeLabel = std::string;

inline constexpr double kStructuralTol = 1e-9;
inline constexpr double kOracleTol = 1e-5;

/// Block-diagonal symplectic form with [[0, 1], [-1, 0]] blocks.
Matrix symplectic_form(std::size_t n_modes);

/// Immutable Gaussian state over labelled modes.
class GaussianState {
 public:
  /// Validates shapes, symmetry and the uncertainty relation V + i*Omega >= 0.
  GaussianState(std::vector<ModeLabel> labels, Vector mean, Matrix cov);

  std::size_t num_modes() const { return labels_.size(); }
  const std::vector<ModeLabel>& labels() const { return labels_; }
  const Vector& mean() const { return mean_; }
  const Matrix& cov() const { return cov_; }

  bool has_mode(std::string_view label) const;
  /// Throws UnknownModeError.
  std::size_t index_of(std::string_view label) const;

  Eigen::Vector2d mode_mean(std::size_t i) const { return mean_.segment<2>(2 * i); }
  Eigen::Matrix2d mode_cov(std::size_t i) const { return cov_.block<2, 2>(2 * i, 2 * i); }

 private:
  struct Unchecked {};
  GaussianState(Unchecked, std::vector<ModeLabel> labels, Vector mean, Matrix cov);

  std::vector<ModeLabel> labels_;
  Vector mean_;
  Matrix cov_;

  friend struct StateBuilder;
};

/// Symplectic matrix plus displacement acting on an ordered subset of modes.
struct SymplecticOp {
  /// Throws InvalidArgument unless S Omega S^T = Omega to 1e-9 (Frobenius).
  SymplecticOp(Matrix matrix, Vector displacement);
  explicit SymplecticOp(Matrix matrix);

  std::size_t num_modes() const { return static_cast<std::size_t>(matrix.rows() / 2); }

  Matrix matrix;
  Vector displacement;
};

struct ModePhotonStats {
  ModeLabel label;
  double mean = 0.0;
  double variance = 0.0;
};

/// Photon-number moments of a set of modes.
struct PhotonStats {
  std::vector<ModePhotonStats> modes;
  std::map<std::pair<ModeLabel, ModeLabel>, double> pairwise_covariances;

  const ModePhotonStats& at(std::string_view label) const;
  double mean(std::string_view label) const { return at(label).mean; }
  double variance(std::string_view label) const { return at(label).variance; }
  /// Covariance of n_a and n_b for distinct a, b (order-insensitive).
  double covariance(std::string_view a, std::string_view b) const;
};

/// Mean and variance of the photon-count difference n_a - n_b.
struct DifferenceStats {
  double mean = 0.0;
  double variance = 0.0;
};

// Constructors ---------------------------------------------------------------

GaussianState vacuum(std::size_t n_modes);
GaussianState vacuum(std::vector<ModeLabel> labels);
GaussianState thermal_state(double mean_photons, ModeLabel label = "m0");
/// Coherent state |alpha>, mean vector (2 Re alpha, 2 Im alpha).
GaussianState coherent_state(std::complex<double> alpha, ModeLabel label = "m0");
/// Product state; labels must be disjoint.
GaussianState tensor(const GaussianState& a, const GaussianState& b);

// Operations -----------------------------------------------------------------

GaussianState apply_symplectic(const GaussianState& state, const SymplecticOp& op,
                               std::span<const ModeLabel> modes);

/// Rotation a -> e^{i theta} a on one mode.
GaussianState apply_phase(const GaussianState& state, std::string_view mode, double theta);

/// a -> sqrt(eta) a + sqrt(1-eta) b,  b -> -sqrt(1-eta) a + sqrt(eta) b.
GaussianState apply_beamsplitter(const GaussianState& state, std::string_view mode_a,
                                 std::string_view mode_b, double transmissivity);

/// a -> sqrt(G) a + sqrt(G-1) b^dagger (and symmetrically for b); G >= 1.
GaussianState apply_two_mode_squeeze(const GaussianState& state, std::string_view mode_a,
                                     std::string_view mode_b, double gain);

/// Receiver-referred thermal-loss channel: V -> kappa V + ((1-kappa) + 2 N_B) I
/// on the mode, cross blocks and mean scaled by sqrt(kappa). Output photon mean
/// is kappa * n_in + N_B. Equivalent to a beamsplitter of transmissivity kappa
/// mixing in an environment of mean N_B / (1 - kappa). kappa must be in (0, 1].
GaussianState apply_thermal_loss(const GaussianState& state, std::string_view mode,
                                 double kappa, double noise_photons);

/// The kappa = 0 limit of the thermal-loss channel: the mode is discarded and
/// replaced by a thermal state of the given mean, uncorrelated with the rest.
GaussianState replace_with_thermal(const GaussianState& state, std::string_view mode,
                                   double mean_photons);

GaussianState partial_trace(const GaussianState& state, std::span<const ModeLabel> keep_modes);
GaussianState rename_mode(const GaussianState& state, std::string_view from, ModeLabel to);

PhotonStats photon_stats(const GaussianState& state, std::span<const ModeLabel> modes);
double photon_mean(const GaussianState& state, std::string_view mode);
DifferenceStats difference_stats(const GaussianState& state, std::string_view mode_a,
                                 std::string_view mode_b);

/// Symplectic eigenvalues in ascending order.
Vector symplectic_eigenvalues(const Matrix& cov);

}  // namespace covsense
