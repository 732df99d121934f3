#include "covsense/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "covsense/errors.hpp"

namespace covsense {

struct StateBuilder {
  static GaussianState make(std::vector<ModeLabel> labels, Vector mean, Matrix cov) {
    // Exact symmetry keeps rounding from accumulating across long pipelines.
    Matrix sym = 0.5 * (cov + cov.transpose());
    return GaussianState(GaussianState::Unchecked{}, std::move(labels), std::move(mean),
                         std::move(sym));
  }
};

namespace {

void check_finite_nonnegative(double value, const char* what) {
  if (!std::isfinite(value) || value < 0.0) {
    throw InvalidArgument(std::string(what) + " must be finite and non-negative");
  }
}

std::vector<std::size_t> mode_indices(const GaussianState& state,
                                      std::span<const ModeLabel> modes) {
  std::vector<std::size_t> out;
  out.reserve(modes.size());
  for (const auto& m : modes) {
    const std::size_t idx = state.index_of(m);
    if (std::find(out.begin(), out.end(), idx) != out.end()) {
      throw InvalidArgument("mode '" + m + "' listed twice");
    }
    out.push_back(idx);
  }
  return out;
}

// Embeds a local symplectic op acting on `idx` into the full phase space.
Matrix embed(const Matrix& local, const std::vector<std::size_t>& idx, std::size_t n_modes) {
  Matrix full = Matrix::Identity(2 * n_modes, 2 * n_modes);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    for (std::size_t c = 0; c < idx.size(); ++c) {
      full.block<2, 2>(2 * idx[r], 2 * idx[c]) = local.block<2, 2>(2 * r, 2 * c);
    }
  }
  return full;
}

GaussianState transform(const GaussianState& state, const Matrix& local,
                        const Vector& displacement, const std::vector<std::size_t>& idx) {
  const Matrix full = embed(local, idx, state.num_modes());
  Vector mean = full * state.mean();
  for (std::size_t r = 0; r < idx.size(); ++r) {
    mean.segment<2>(2 * idx[r]) += displacement.segment<2>(2 * r);
  }
  Matrix cov = full * state.cov() * full.transpose();
  return StateBuilder::make(state.labels(), std::move(mean), std::move(cov));
}

}  // namespace

Matrix symplectic_form(std::size_t n_modes) {
  Matrix omega = Matrix::Zero(2 * n_modes, 2 * n_modes);
  for (std::size_t i = 0; i < n_modes; ++i) {
    omega(2 * i, 2 * i + 1) = 1.0;
    omega(2 * i + 1, 2 * i) = -1.0;
  }
  return omega;
}

Vector symplectic_eigenvalues(const Matrix& cov) {
  const auto n = static_cast<std::size_t>(cov.rows() / 2);
  const Matrix omega = symplectic_form(n);
  // Eigenvalues of i*Omega*V are +-nu_k and i*Omega*V is Hermitian-similar, so
  // the moduli come out as pairs.
  Eigen::EigenSolver<Matrix> solver(omega * cov, false);
  std::vector<double> moduli;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    moduli.push_back(std::abs(solver.eigenvalues()[k]));
  }
  std::sort(moduli.begin(), moduli.end());
  Vector out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = 0.5 * (moduli[2 * k] + moduli[2 * k + 1]);
  return out;
}

GaussianState::GaussianState(Unchecked, std::vector<ModeLabel> labels, Vector mean, Matrix cov)
    : labels_(std::move(labels)), mean_(std::move(mean)), cov_(std::move(cov)) {}

GaussianState::GaussianState(std::vector<ModeLabel> labels, Vector mean, Matrix cov)
    : labels_(std::move(labels)), mean_(std::move(mean)), cov_(std::move(cov)) {
  const auto n = static_cast<Eigen::Index>(labels_.size());
  if (n == 0) throw InvalidStateError("state needs at least one mode");
  if (mean_.size() != 2 * n || cov_.rows() != 2 * n || cov_.cols() != 2 * n) {
    throw InvalidStateError("mean/covariance dimensions do not match the mode count");
  }
  std::set<ModeLabel> unique(labels_.begin(), labels_.end());
  if (unique.size() != labels_.size()) throw InvalidStateError("duplicate mode labels");
  if (!mean_.allFinite() || !cov_.allFinite()) throw InvalidStateError("non-finite entries");

  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InvalidStateError("covariance matrix is not symmetric");
  }
  cov_ = 0.5 * (cov_ + cov_.transpose());

  const Eigen::MatrixXcd herm =
      cov_.cast<std::complex<double>>() +
      std::complex<double>(0.0, 1.0) * symplectic_form(labels_.size()).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kStructuralTol * scale) {
    throw InvalidStateError("covariance violates the uncertainty relation");
  }
}

bool GaussianState::has_mode(std::string_view label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t GaussianState::index_of(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw UnknownModeError(std::string(label));
  return static_cast<std::size_t>(it - labels_.begin());
}

SymplecticOp::SymplecticOp(Matrix m, Vector d) : matrix(std::move(m)), displacement(std::move(d)) {
  if (matrix.rows() != matrix.cols() || matrix.rows() % 2 != 0 || matrix.rows() == 0) {
    throw InvalidArgument("symplectic matrix must be square with even dimension");
  }
  if (displacement.size() != matrix.rows()) {
    throw InvalidArgument("displacement length does not match the symplectic matrix");
  }
  const Matrix omega = symplectic_form(num_modes());
  if ((matrix * omega * matrix.transpose() - omega).norm() > kStructuralTol) {
    throw InvalidArgument("matrix is not symplectic");
  }
}

SymplecticOp::SymplecticOp(Matrix m) : SymplecticOp(m, Vector::Zero(m.rows())) {}

const ModePhotonStats& PhotonStats::at(std::string_view label) const {
  for (const auto& m : modes) {
    if (m.label == label) return m;
  }
  throw UnknownModeError(std::string(label));
}

double PhotonStats::covariance(std::string_view a, std::string_view b) const {
  ModeLabel x(a), y(b);
  if (y < x) std::swap(x, y);
  auto it = pairwise_covariances.find({x, y});
  if (it == pairwise_covariances.end()) throw UnknownModeError(x + "," + y);
  return it->second;
}

GaussianState vacuum(std::size_t n_modes) {
  if (n_modes == 0) throw InvalidArgument("vacuum needs at least one mode");
  std::vector<ModeLabel> labels;
  for (std::size_t i = 0; i < n_modes; ++i) labels.push_back("m" + std::to_string(i));
  return vacuum(std::move(labels));
}

GaussianState vacuum(std::vector<ModeLabel> labels) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  return GaussianState(std::move(labels), Vector::Zero(2 * n), Matrix::Identity(2 * n, 2 * n));
}

GaussianState thermal_state(double mean_photons, ModeLabel label) {
  check_finite_nonnegative(mean_photons, "thermal mean photon number");
  return StateBuilder::make({std::move(label)}, Vector::Zero(2),
                            (2.0 * mean_photons + 1.0) * Matrix::Identity(2, 2));
}

GaussianState coherent_state(std::complex<double> alpha, ModeLabel label) {
  Vector mean(2);
  mean << 2.0 * alpha.real(), 2.0 * alpha.imag();
  return StateBuilder::make({std::move(label)}, std::move(mean), Matrix::Identity(2, 2));
}

GaussianState tensor(const GaussianState& a, const GaussianState& b) {
  std::vector<ModeLabel> labels = a.labels();
  for (const auto& l : b.labels()) {
    if (a.has_mode(l)) throw InvalidArgument("tensor product with duplicate mode '" + l + "'");
    labels.push_back(l);
  }
  const auto na = a.mean().size(), nb = b.mean().size();
  Vector mean(na + nb);
  mean << a.mean(), b.mean();
  Matrix cov = Matrix::Zero(na + nb, na + nb);
  cov.topLeftCorner(na, na) = a.cov();
  cov.bottomRightCorner(nb, nb) = b.cov();
  return StateBuilder::make(std::move(labels), std::move(mean), std::move(cov));
}

GaussianState apply_symplectic(const GaussianState& state, const SymplecticOp& op,
                               std::span<const ModeLabel> modes) {
  if (modes.size() != op.num_modes()) {
    throw InvalidArgument("symplectic op size does not match the number of target modes");
  }
  return transform(state, op.matrix, op.displacement, mode_indices(state, modes));
}

GaussianState apply_phase(const GaussianState& state, std::string_view mode, double theta) {
  if (!std::isfinite(theta)) throw InvalidArgument("phase must be finite");
  const double c = std::cos(theta), s = std::sin(theta);
  Matrix rot(2, 2);
  rot << c, -s, s, c;
  return transform(state, rot, Vector::Zero(2), {state.index_of(mode)});
}

GaussianState apply_beamsplitter(const GaussianState& state, std::string_view mode_a,
                                 std::string_view mode_b, double transmissivity) {
  if (!(transmissivity >= 0.0 && transmissivity <= 1.0)) {
    throw InvalidArgument("beamsplitter transmissivity must lie in [0, 1]");
  }
  const std::size_t ia = state.index_of(mode_a), ib = state.index_of(mode_b);
  if (ia == ib) throw InvalidArgument("beamsplitter needs two distinct modes");
  const double t = std::sqrt(transmissivity), r = std::sqrt(1.0 - transmissivity);
  Matrix bs = Matrix::Zero(4, 4);
  bs.block<2, 2>(0, 0) = t * Eigen::Matrix2d::Identity();
  bs.block<2, 2>(0, 2) = r * Eigen::Matrix2d::Identity();
  bs.block<2, 2>(2, 0) = -r * Eigen::Matrix2d::Identity();
  bs.block<2, 2>(2, 2) = t * Eigen::Matrix2d::Identity();
  return transform(state, bs, Vector::Zero(4), {ia, ib});
}

GaussianState apply_two_mode_squeeze(const GaussianState& state, std::string_view mode_a,
                                     std::string_view mode_b, double gain) {
  if (!std::isfinite(gain) || gain < 1.0) {
    throw InvalidArgument("two-mode squeezing gain must be >= 1");
  }
  const std::size_t ia = state.index_of(mode_a), ib = state.index_of(mode_b);
  if (ia == ib) throw InvalidArgument("two-mode squeezing needs two distinct modes");
  const double g = std::sqrt(gain), h = std::sqrt(gain - 1.0);
  const Eigen::Matrix2d z = Eigen::Vector2d(1.0, -1.0).asDiagonal();
  Matrix tms = Matrix::Zero(4, 4);
  tms.block<2, 2>(0, 0) = g * Eigen::Matrix2d::Identity();
  tms.block<2, 2>(0, 2) = h * z;
  tms.block<2, 2>(2, 0) = h * z;
  tms.block<2, 2>(2, 2) = g * Eigen::Matrix2d::Identity();
  return transform(state, tms, Vector::Zero(4), {ia, ib});
}

GaussianState apply_thermal_loss(const GaussianState& state, std::string_view mode, double kappa,
                                 double noise_photons) {
  if (!(kappa > 0.0 && kappa <= 1.0)) {
    throw InvalidArgument("thermal-loss transmissivity must lie in (0, 1]; use replace_with_thermal for 0");
  }
  check_finite_nonnegative(noise_photons, "background photon number");
  const std::size_t i = state.index_of(mode);
  const double s = std::sqrt(kappa);
  const auto dim = state.mean().size();
  Vector scale = Vector::Ones(dim);
  scale.segment<2>(2 * i).setConstant(s);
  Vector mean = state.mean().cwiseProduct(scale);
  Matrix cov = scale.asDiagonal() * state.cov() * scale.asDiagonal();
  cov.block<2, 2>(2 * i, 2 * i) += ((1.0 - kappa) + 2.0 * noise_photons) * Eigen::Matrix2d::Identity();
  return StateBuilder::make(state.labels(), std::move(mean), std::move(cov));
}

GaussianState replace_with_thermal(const GaussianState& state, std::string_view mode,
                                   double mean_photons) {
  check_finite_nonnegative(mean_photons, "thermal mean photon number");
  const std::size_t i = state.index_of(mode);
  Vector mean = state.mean();
  Matrix cov = state.cov();
  mean.segment<2>(2 * i).setZero();
  cov.middleRows(2 * i, 2).setZero();
  cov.middleCols(2 * i, 2).setZero();
  cov.block<2, 2>(2 * i, 2 * i) = (2.0 * mean_photons + 1.0) * Eigen::Matrix2d::Identity();
  return StateBuilder::make(state.labels(), std::move(mean), std::move(cov));
}

GaussianState partial_trace(const GaussianState& state, std::span<const ModeLabel> keep_modes) {
  if (keep_modes.empty()) throw InvalidArgument("partial trace must keep at least one mode");
  const auto idx = mode_indices(state, keep_modes);
  const auto k = static_cast<Eigen::Index>(idx.size());
  Vector mean(2 * k);
  Matrix cov(2 * k, 2 * k);
  for (Eigen::Index r = 0; r < k; ++r) {
    mean.segment<2>(2 * r) = state.mean().segment<2>(2 * idx[r]);
    for (Eigen::Index c = 0; c < k; ++c) {
      cov.block<2, 2>(2 * r, 2 * c) = state.cov().block<2, 2>(2 * idx[r], 2 * idx[c]);
    }
  }
  return StateBuilder::make({keep_modes.begin(), keep_modes.end()}, std::move(mean),
                            std::move(cov));
}

GaussianState rename_mode(const GaussianState& state, std::string_view from, ModeLabel to) {
  const std::size_t i = state.index_of(from);
  if (state.has_mode(to) && state.labels()[i] != to) {
    throw InvalidArgument("mode '" + to + "' already exists");
  }
  auto labels = state.labels();
  labels[i] = std::move(to);
  return StateBuilder::make(std::move(labels), state.mean(), state.cov());
}

namespace {

// Cov(n_i, n_j) via Gaussian fourth-moment reduction of the Weyl-ordered
// quadratic forms; the -1/4 term corrects the same-mode ordering.
double number_covariance(const GaussianState& state, std::size_t i, std::size_t j) {
  const Matrix& v = state.cov();
  const Vector& d = state.mean();
  double sum = 0.0;
  for (std::size_t a = 2 * i; a < 2 * i + 2; ++a) {
    for (std::size_t b = 2 * j; b < 2 * j + 2; ++b) {
      sum += 2.0 * v(a, b) * v(a, b) + 4.0 * d[a] * d[b] * v(a, b);
    }
  }
  return sum / 16.0 - (i == j ? 0.25 : 0.0);
}

double number_mean(const GaussianState& state, std::size_t i) {
  const Matrix& v = state.cov();
  const Vector& d = state.mean();
  return (v(2 * i, 2 * i) + v(2 * i + 1, 2 * i + 1) - 2.0) / 4.0 +
         (d[2 * i] * d[2 * i] + d[2 * i + 1] * d[2 * i + 1]) / 4.0;
}

}  // namespace

double photon_mean(const GaussianState& state, std::string_view mode) {
  return number_mean(state, state.index_of(mode));
}

PhotonStats photon_stats(const GaussianState& state, std::span<const ModeLabel> modes) {
  const auto idx = mode_indices(state, modes);
  PhotonStats out;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out.modes.push_back({modes[k], number_mean(state, idx[k]),
                         std::max(0.0, number_covariance(state, idx[k], idx[k]))});
  }
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      ModeLabel x = modes[a], y = modes[b];
      if (y < x) std::swap(x, y);
      out.pairwise_covariances[{x, y}] = number_covariance(state, idx[a], idx[b]);
    }
  }
  return out;
}

DifferenceStats difference_stats(const GaussianState& state, std::string_view mode_a,
                                 std::string_view mode_b) {
  const std::size_t ia = state.index_of(mode_a), ib = state.index_of(mode_b);
  if (ia == ib) throw InvalidArgument("difference statistics need two distinct modes");
  const double var = number_covariance(state, ia, ia) + number_covariance(state, ib, ib) -
                     2.0 * number_covariance(state, ia, ib);
  return {number_mean(state, ia) - number_mean(state, ib), std::max(0.0, var)};
}

}  // namespace covsense
