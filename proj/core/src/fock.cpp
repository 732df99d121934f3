#include "covsense/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include <Eigen/Eigenvalues>

#include "covsense/errors.hpp"

namespace covsense::fock {

namespace {

struct Layout {
  std::vector<int> dims;
  std::vector<std::size_t> strides;
  std::size_t total = 1;

  explicit Layout(std::vector<int> d) : dims(std::move(d)), strides(dims.size()) {
    for (std::size_t m = dims.size(); m-- > 0;) {
      strides[m] = total;
      total *= static_cast<std::size_t>(dims[m]);
    }
  }
  int digit(std::size_t index, std::size_t mode) const {
    return static_cast<int>((index / strides[mode]) % static_cast<std::size_t>(dims[mode]));
  }
};

// A Kraus operator on a subset of modes, stored by input column:
// column[local_in] = list of (local_out, amplitude).
struct LocalOp {
  std::vector<std::vector<std::pair<std::size_t, Complex>>> columns;
};

// Plain complex product; avoids the library's inf/nan recovery path in hot loops.
inline Complex mul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

void check_mode(const FockState& s, std::size_t mode) {
  if (mode >= s.num_modes()) throw InvalidArgument("mode index out of range");
}

void check_cutoff(int c) {
  if (c < 2) throw InvalidArgument("Fock cutoff must be >= 2");
}

// rho -> sum_k K_k rho K_k^dagger for Kraus operators acting on `modes`.
FockState apply_kraus(const FockState& s, const std::vector<std::size_t>& modes,
                      const std::vector<int>& out_dims, const std::vector<LocalOp>& kraus) {
  const Layout in(s.cutoffs);
  std::vector<int> new_cutoffs = s.cutoffs;
  std::vector<int> in_dims;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    in_dims.push_back(s.cutoffs[modes[i]]);
    new_cutoffs[modes[i]] = out_dims[i];
  }
  const Layout out(new_cutoffs);
  const Layout local_in(in_dims), local_out(out_dims);

  // Offsets of local output indices inside the full output index.
  std::vector<std::size_t> out_offset(local_out.total);
  for (std::size_t l = 0; l < local_out.total; ++l) {
    std::size_t off = 0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      off += static_cast<std::size_t>(local_out.digit(l, i)) * out.strides[modes[i]];
    }
    out_offset[l] = off;
  }
  // For every full input index: its local input index and the rest offset.
  std::vector<std::size_t> in_local(in.total), rest_offset(in.total);
  for (std::size_t idx = 0; idx < in.total; ++idx) {
    std::size_t loc = 0, rest = 0;
    for (std::size_t m = 0; m < s.num_modes(); ++m) {
      const int d = in.digit(idx, m);
      const auto pos = std::find(modes.begin(), modes.end(), m);
      if (pos == modes.end()) {
        rest += static_cast<std::size_t>(d) * out.strides[m];
      } else {
        loc += static_cast<std::size_t>(d) * local_in.strides[pos - modes.begin()];
      }
    }
    in_local[idx] = loc;
    rest_offset[idx] = rest;
  }

  FockState result;
  result.cutoffs = new_cutoffs;
  const auto d_in = static_cast<Eigen::Index>(in.total);
  const auto d_out = static_cast<Eigen::Index>(out.total);
  result.rho = CMatrix::Zero(d_out, d_out);
  CMatrix tmp(d_out, d_in);
  // Column-oriented sparse form of the full operator.
  std::vector<std::size_t> offsets(in.total + 1);
  std::vector<Eigen::Index> targets;
  std::vector<Complex> amps;
  for (const auto& op : kraus) {
    targets.clear();
    amps.clear();
    for (std::size_t idx = 0; idx < in.total; ++idx) {
      offsets[idx] = targets.size();
      for (const auto& [lo, amp] : op.columns[in_local[idx]]) {
        targets.push_back(static_cast<Eigen::Index>(rest_offset[idx] + out_offset[lo]));
        amps.push_back(amp);
      }
    }
    offsets[in.total] = targets.size();
    if (targets.empty()) continue;
    // tmp = K rho, one column at a time.
    tmp.setZero();
    for (Eigen::Index c = 0; c < d_in; ++c) {
      const Complex* src = s.rho.col(c).data();
      Complex* dst = tmp.col(c).data();
      for (Eigen::Index i = 0; i < d_in; ++i) {
        const Complex v = src[i];
        if (v == Complex(0.0)) continue;
        for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) dst[targets[e]] += mul(amps[e], v);
      }
    }
    // rho' += tmp K^dagger.
    for (Eigen::Index i = 0; i < d_in; ++i) {
      for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
        const Complex a = std::conj(amps[e]);
        Complex* dst = result.rho.col(targets[e]).data();
        const Complex* src = tmp.col(i).data();
        for (Eigen::Index r = 0; r < d_out; ++r) dst[r] += mul(a, src[r]);
      }
    }
  }
  result.rho = 0.5 * (result.rho + result.rho.adjoint()).eval();
  result.refresh_deficit();
  return result;
}

FockState apply_unitary(const FockState& s, const std::vector<std::size_t>& modes,
                        const LocalOp& op) {
  std::vector<int> dims;
  for (auto m : modes) dims.push_back(s.cutoffs[m]);
  return apply_kraus(s, modes, dims, {op});
}

FockState pure_state(const Eigen::VectorXcd& psi, std::vector<int> cutoffs) {
  FockState s;
  s.cutoffs = std::move(cutoffs);
  s.rho = psi * psi.adjoint();
  s.refresh_deficit();
  return s;
}

// Hermitian eigen-decomposition with eigenvalues clamped at zero.
Eigen::SelfAdjointEigenSolver<CMatrix> eig(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
  if (solver.info() != Eigen::Success) throw ConvergenceError("Hermitian eigensolver failed");
  return solver;
}

CMatrix sqrt_psd(const CMatrix& m) {
  const auto solver = eig(m);
  const Eigen::VectorXd ev = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * ev.asDiagonal() * solver.eigenvectors().adjoint();
}

void require_comparable(const FockState& a, const FockState& b) {
  if (a.cutoffs != b.cutoffs) throw TruncationError("states have different cutoffs");
  if (a.trace_deficit > 1e-6 || b.trace_deficit > 1e-6) {
    throw TruncationError("trace deficit above 1e-6 invalidates the comparison");
  }
}

}  // namespace

void FockState::refresh_deficit() { trace_deficit = std::max(0.0, 1.0 - rho.trace().real()); }

void FockState::validate() const {
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-10) throw InvalidStateError("density matrix is not Hermitian");
  const auto solver = eig(rho);
  if (solver.eigenvalues().minCoeff() < -1e-9) {
    throw InvalidStateError("density matrix is not positive semidefinite");
  }
  if (std::abs(rho.trace().real() + trace_deficit - 1.0) > 1e-9) {
    throw InvalidStateError("trace and deficit do not add to one");
  }
}

FockState vacuum(std::vector<int> cutoffs) {
  for (int c : cutoffs) check_cutoff(c);
  if (cutoffs.empty() || cutoffs.size() > kMaxModes) {
    throw InvalidArgument("Fock states hold between one and three modes");
  }
  const Layout l(cutoffs);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(l.total));
  psi(0) = 1.0;
  return pure_state(psi, std::move(cutoffs));
}

FockState number_state(int n, int cutoff) {
  check_cutoff(cutoff);
  if (n < 0 || n >= cutoff) throw InvalidArgument("number state outside the cutoff");
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(cutoff);
  psi(n) = 1.0;
  return pure_state(psi, {cutoff});
}

FockState thermal(double mean_photons, int cutoff) {
  check_cutoff(cutoff);
  if (!(mean_photons >= 0.0)) throw InvalidArgument("thermal mean must be >= 0");
  FockState s;
  s.cutoffs = {cutoff};
  s.rho = CMatrix::Zero(cutoff, cutoff);
  const double q = mean_photons / (mean_photons + 1.0);
  double p = 1.0 / (mean_photons + 1.0);
  for (int k = 0; k < cutoff; ++k, p *= q) s.rho(k, k) = p;
  s.refresh_deficit();
  return s;
}

FockState coherent(Complex alpha, int cutoff) {
  check_cutoff(cutoff);
  Eigen::VectorXcd psi(cutoff);
  psi(0) = std::exp(-0.5 * std::norm(alpha));
  for (int k = 1; k < cutoff; ++k) psi(k) = psi(k - 1) * alpha / std::sqrt(static_cast<double>(k));
  return pure_state(psi, {cutoff});
}

FockState tmsv(double mean_photons, int cutoff) {
  check_cutoff(cutoff);
  if (!(mean_photons >= 0.0)) throw InvalidArgument("TMSV mean must be >= 0");
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(cutoff) * cutoff);
  const double q = mean_photons / (mean_photons + 1.0);
  double lambda = 1.0 / (mean_photons + 1.0);
  for (int k = 0; k < cutoff; ++k, lambda *= q) psi(k * cutoff + k) = std::sqrt(lambda);
  return pure_state(psi, {cutoff, cutoff});
}

FockState tensor(const FockState& a, const FockState& b) {
  if (a.num_modes() + b.num_modes() > kMaxModes) throw InvalidArgument("too many modes");
  FockState s;
  s.cutoffs = a.cutoffs;
  s.cutoffs.insert(s.cutoffs.end(), b.cutoffs.begin(), b.cutoffs.end());
  const Eigen::Index nb = b.rho.rows();
  s.rho.resize(a.rho.rows() * nb, a.rho.cols() * nb);
  for (Eigen::Index i = 0; i < a.rho.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.rho.cols(); ++j) {
      s.rho.block(i * nb, j * nb, nb, nb) = a.rho(i, j) * b.rho;
    }
  }
  s.refresh_deficit();
  return s;
}

FockState from_gaussian(const GaussianState& state, std::vector<int> cutoffs) {
  const auto n = static_cast<Eigen::Index>(state.num_modes());
  if (n < 1 || static_cast<std::size_t>(n) > kMaxModes) {
    throw InvalidArgument("from_gaussian supports one to three modes");
  }
  if (cutoffs.size() != static_cast<std::size_t>(n)) {
    throw InvalidArgument("one cutoff per mode is required");
  }
  for (Eigen::Index m = 0; m < n; ++m) {
    check_cutoff(cutoffs[m]);
    if (covsense::photon_mean(state, state.labels()[m]) > cutoffs[m] / 8.0) {
      throw TruncationError("mode '" + state.labels()[m] + "' exceeds the cutoff/8 guard");
    }
  }
  const Layout half(cutoffs);
  if (half.total > kMaxGaussianDimension) {
    throw TruncationError("Fock dimension exceeds the from_gaussian limit");
  }

  // Quadratures reordered to (x1..xn, p1..pn).
  Eigen::VectorXd mx(n), mp(n);
  Eigen::MatrixXd vx(n, n), vp(n, n), vxp(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    mx(i) = state.mean()(2 * i);
    mp(i) = state.mean()(2 * i + 1);
    for (Eigen::Index j = 0; j < n; ++j) {
      vx(i, j) = state.cov()(2 * i, 2 * j);
      vp(i, j) = state.cov()(2 * i + 1, 2 * j + 1);
      vxp(i, j) = state.cov()(2 * i, 2 * j + 1);
    }
  }
  const Complex I(0.0, 1.0);
  const CMatrix eye = CMatrix::Identity(n, n);
  const CMatrix adag_a =
      (vx.cast<Complex>() + vp.cast<Complex>() + I * (vxp - vxp.transpose()).cast<Complex>() -
       2.0 * eye) / 4.0;
  const CMatrix a_a =
      (vx.cast<Complex>() - vp.cast<Complex>() + I * (vxp + vxp.transpose()).cast<Complex>()) /
      4.0;
  CMatrix q(2 * n, 2 * n);
  q << adag_a, a_a.conjugate(), a_a, adag_a.conjugate();
  q += CMatrix::Identity(2 * n, 2 * n);
  CMatrix x = CMatrix::Zero(2 * n, 2 * n);
  x.topRightCorner(n, n) = eye;
  x.bottomLeftCorner(n, n) = eye;
  const CMatrix q_inv = q.inverse();
  const CMatrix a_mat = x * (CMatrix::Identity(2 * n, 2 * n) - q_inv).conjugate();
  const Eigen::VectorXcd alpha = (mx.cast<Complex>() + I * mp.cast<Complex>()) / 2.0;
  Eigen::VectorXcd beta(2 * n);
  beta << alpha, alpha.conjugate();
  const Complex quad = (beta.transpose() * q_inv * beta.conjugate())(0, 0);
  const Complex prefactor = std::exp(-0.5 * quad) / std::sqrt(q.determinant());
  const Eigen::VectorXcd gamma = beta.conjugate() - a_mat * beta;

  // Renormalized Hermite tensor over (k_1..k_n, l_1..l_n), row-major.
  std::vector<int> dims = cutoffs;
  dims.insert(dims.end(), cutoffs.begin(), cutoffs.end());
  const Layout full(dims);
  const std::size_t rank = dims.size();
  std::vector<Complex> h(full.total);
  std::vector<int> k(rank, 0);
  h[0] = 1.0;
  for (std::size_t f = 1; f < full.total; ++f) {
    for (std::size_t d = rank; d-- > 0;) {
      if (++k[d] < dims[d]) break;
      k[d] = 0;
    }
    std::size_t i = 0;
    while (k[i] == 0) ++i;
    const std::size_t fm = f - full.strides[i];
    Complex v = gamma(static_cast<Eigen::Index>(i)) * h[fm];
    for (std::size_t j = 0; j < rank; ++j) {
      const int kj = k[j] - (j == i ? 1 : 0);
      if (kj > 0) {
        v += a_mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
             std::sqrt(static_cast<double>(kj)) * h[fm - full.strides[j]];
      }
    }
    h[f] = v / std::sqrt(static_cast<double>(k[i]));
  }

  FockState s;
  s.cutoffs = std::move(cutoffs);
  const auto dim = static_cast<Eigen::Index>(half.total);
  s.rho.resize(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      s.rho(r, c) = prefactor * h[static_cast<std::size_t>(c * dim + r)];
    }
  }
  s.rho = 0.5 * (s.rho + s.rho.adjoint()).eval();
  s.refresh_deficit();
  return s;
}

FockState from_gaussian(const GaussianState& state, int cutoff) {
  return from_gaussian(state, std::vector<int>(state.num_modes(), cutoff));
}

FockState apply_phase(const FockState& s, std::size_t mode, double theta) {
  check_mode(s, mode);
  LocalOp op;
  for (int k = 0; k < s.cutoffs[mode]; ++k) {
    op.columns.push_back({{static_cast<std::size_t>(k), std::polar(1.0, theta * k)}});
  }
  return apply_unitary(s, {mode}, op);
}

FockState apply_beamsplitter(const FockState& s, std::size_t a, std::size_t b, double eta) {
  check_mode(s, a);
  check_mode(s, b);
  if (a == b) throw InvalidArgument("beamsplitter needs two distinct modes");
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("transmissivity must lie in [0, 1]");
  const int ca = s.cutoffs[a], cb = s.cutoffs[b];
  const double t = std::sqrt(eta), r = std::sqrt(1.0 - eta);
  // U |m, n> = (t a^+ - r b^+)^m (r a^+ + t b^+)^n |0, 0> / sqrt(m! n!)
  LocalOp op;
  op.columns.resize(static_cast<std::size_t>(ca) * cb);
  for (int m = 0; m < ca; ++m) {
    for (int n = 0; n < cb; ++n) {
      const int total = m + n;
      auto& col = op.columns[static_cast<std::size_t>(m) * cb + n];
      for (int mo = std::max(0, total - cb + 1); mo <= std::min(total, ca - 1); ++mo) {
        double sum = 0.0;
        for (int i = std::max(0, mo - n); i <= std::min(m, mo); ++i) {
          const double log_binom = log_factorial(m) - log_factorial(i) - log_factorial(m - i) +
                                   log_factorial(n) - log_factorial(mo - i) -
                                   log_factorial(n - mo + i);
          const double mag = std::exp(log_binom) * std::pow(t, i + n - mo + i) *
                             std::pow(r, m - i + mo - i);
          sum += ((m - i) % 2 ? -mag : mag);
        }
        const double norm = std::exp(0.5 * (log_factorial(mo) + log_factorial(total - mo) -
                                            log_factorial(m) - log_factorial(n)));
        const double amp = sum * norm;
        if (amp != 0.0) {
          col.emplace_back(static_cast<std::size_t>(mo) * cb + (total - mo), amp);
        }
      }
    }
  }
  return apply_unitary(s, {a, b}, op);
}

FockState apply_two_mode_squeeze(const FockState& s, std::size_t a, std::size_t b, double gain) {
  check_mode(s, a);
  check_mode(s, b);
  if (a == b) throw InvalidArgument("two-mode squeezing needs two distinct modes");
  if (!(gain >= 1.0)) throw InvalidArgument("gain must be >= 1");
  const int ca = s.cutoffs[a], cb = s.cutoffs[b];
  const double t = std::sqrt((gain - 1.0) / gain);
  const double log_cosh = 0.5 * std::log(gain);
  // Normal-ordered form: U = exp(t a^+ b^+) cosh^-(n_a + n_b + 1) exp(-t a b).
  LocalOp op;
  op.columns.resize(static_cast<std::size_t>(ca) * cb);
  for (int m = 0; m < ca; ++m) {
    for (int n = 0; n < cb; ++n) {
      auto& col = op.columns[static_cast<std::size_t>(m) * cb + n];
      const int diff = m - n;
      for (int mo = std::max(0, diff); mo < ca && mo - diff < cb; ++mo) {
        const int no = mo - diff;
        double sum = 0.0;
        for (int k = 0; k <= std::min(m, n); ++k) {
          const int l = mo - m + k;
          if (l < 0) continue;
          if (t == 0.0 && (k > 0 || l > 0)) continue;
          const double log_mag =
              (t > 0.0 ? (k + l) * std::log(t) : 0.0) - log_factorial(k) - log_factorial(l) +
              0.5 * (log_factorial(m) + log_factorial(n) + log_factorial(mo) + log_factorial(no)) -
              log_factorial(m - k) - log_factorial(n - k) - (m + n - 2 * k + 1) * log_cosh;
          sum += (k % 2 ? -1.0 : 1.0) * std::exp(log_mag);
        }
        if (sum != 0.0) col.emplace_back(static_cast<std::size_t>(mo) * cb + no, sum);
      }
    }
  }
  return apply_unitary(s, {a, b}, op);
}

FockState apply_pure_loss(const FockState& s, std::size_t mode, double eta) {
  check_mode(s, mode);
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("transmissivity must lie in [0, 1]");
  const int c = s.cutoffs[mode];
  std::vector<LocalOp> kraus(static_cast<std::size_t>(c));
  for (int k = 0; k < c; ++k) {
    auto& op = kraus[k];
    op.columns.resize(c);
    for (int n = k; n < c; ++n) {
      const double log_binom = log_factorial(n) - log_factorial(k) - log_factorial(n - k);
      const double amp = std::exp(0.5 * log_binom) * std::pow(eta, 0.5 * (n - k)) *
                         std::pow(1.0 - eta, 0.5 * k);
      if (amp != 0.0) op.columns[n].emplace_back(static_cast<std::size_t>(n - k), amp);
    }
  }
  return apply_kraus(s, {mode}, {c}, kraus);
}

FockState apply_amplifier(const FockState& s, std::size_t mode, double gain, int out_cutoff) {
  check_mode(s, mode);
  check_cutoff(out_cutoff);
  if (!(gain >= 1.0)) throw InvalidArgument("gain must be >= 1");
  const int c = s.cutoffs[mode];
  const double log_ratio = gain > 1.0 ? 0.5 * std::log((gain - 1.0) / gain) : 0.0;
  const int k_max = gain > 1.0 ? out_cutoff : 1;
  std::vector<LocalOp> kraus(static_cast<std::size_t>(k_max));
  for (int k = 0; k < k_max; ++k) {
    auto& op = kraus[k];
    op.columns.resize(c);
    for (int n = 0; n < c && n + k < out_cutoff; ++n) {
      const double log_binom = log_factorial(n + k) - log_factorial(n) - log_factorial(k);
      const double amp =
          std::exp(0.5 * log_binom - 0.5 * (n + 1) * std::log(gain) + k * log_ratio);
      op.columns[n].emplace_back(static_cast<std::size_t>(n + k), amp);
    }
  }
  return apply_kraus(s, {mode}, {out_cutoff}, kraus);
}

FockState apply_thermal_loss(const FockState& s, std::size_t mode, double kappa,
                             double noise_photons, int out_cutoff) {
  check_mode(s, mode);
  if (!(kappa > 0.0 && kappa <= 1.0)) throw InvalidArgument("kappa must lie in (0, 1]");
  if (!(noise_photons >= 0.0)) throw InvalidArgument("noise photons must be >= 0");
  if (out_cutoff == 0) out_cutoff = s.cutoffs[mode];
  const double gain = noise_photons + 1.0;
  const FockState lossy = apply_pure_loss(s, mode, kappa / gain);
  return apply_amplifier(lossy, mode, gain, out_cutoff);
}

FockState apply_conjugation(const FockState& s, std::size_t mode, double gain, int out_cutoff) {
  check_mode(s, mode);
  check_cutoff(out_cutoff);
  if (!(gain >= 1.0)) throw InvalidArgument("gain must be >= 1");
  const int c = s.cutoffs[mode];
  const double t = std::sqrt((gain - 1.0) / gain);
  // Kraus operator k projects the squeezed input onto k photons:
  // |m> -> t^j sqrt(C(m + j, j)) / cosh^(m+1) |j>, j = k - m.
  std::vector<LocalOp> kraus;
  for (int k = 0; k < c + out_cutoff - 1; ++k) {
    LocalOp op;
    op.columns.resize(c);
    bool any = false;
    for (int m = 0; m < c && m <= k; ++m) {
      const int j = k - m;
      if (j >= out_cutoff || (t == 0.0 && j > 0)) continue;
      const double log_amp = (j > 0 ? j * std::log(t) : 0.0) +
                             0.5 * (log_factorial(m + j) - log_factorial(m) - log_factorial(j)) -
                             0.5 * (m + 1) * std::log(gain);
      op.columns[m].emplace_back(static_cast<std::size_t>(j), std::exp(log_amp));
      any = true;
    }
    if (any) kraus.push_back(std::move(op));
  }
  return apply_kraus(s, {mode}, {out_cutoff}, kraus);
}

FockState with_cutoff(const FockState& s, std::size_t mode, int cutoff) {
  check_mode(s, mode);
  check_cutoff(cutoff);
  const int c = s.cutoffs[mode];
  LocalOp id;
  id.columns.resize(c);
  for (int n = 0; n < std::min(c, cutoff); ++n) id.columns[n].emplace_back(n, 1.0);
  return apply_kraus(s, {mode}, {cutoff}, {id});
}

FockState append_vacuum(const FockState& s, int cutoff) {
  return tensor(s, vacuum({cutoff}));
}

FockState partial_trace(const FockState& s, const std::vector<std::size_t>& keep) {
  if (keep.empty()) throw InvalidArgument("partial trace must keep at least one mode");
  for (auto m : keep) check_mode(s, m);
  const Layout in(s.cutoffs);
  std::vector<int> kept_dims;
  for (auto m : keep) kept_dims.push_back(s.cutoffs[m]);
  const Layout out(kept_dims);
  FockState r;
  r.cutoffs = kept_dims;
  r.rho = CMatrix::Zero(static_cast<Eigen::Index>(out.total), static_cast<Eigen::Index>(out.total));
  auto split = [&](std::size_t idx) {
    std::size_t kept = 0, traced = 0, traced_stride = 1;
    for (std::size_t m = s.num_modes(); m-- > 0;) {
      const int d = in.digit(idx, m);
      const auto pos = std::find(keep.begin(), keep.end(), m);
      if (pos == keep.end()) {
        traced += static_cast<std::size_t>(d) * traced_stride;
        traced_stride *= static_cast<std::size_t>(s.cutoffs[m]);
      } else {
        kept += static_cast<std::size_t>(d) * out.strides[pos - keep.begin()];
      }
    }
    return std::pair{kept, traced};
  };
  std::vector<std::pair<std::size_t, std::size_t>> parts(in.total);
  for (std::size_t i = 0; i < in.total; ++i) parts[i] = split(i);
  for (std::size_t i = 0; i < in.total; ++i) {
    for (std::size_t j = 0; j < in.total; ++j) {
      if (parts[i].second == parts[j].second) {
        r.rho(static_cast<Eigen::Index>(parts[i].first), static_cast<Eigen::Index>(parts[j].first)) +=
            s.rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  r.trace_deficit = s.trace_deficit;
  r.refresh_deficit();
  return r;
}

FockState oracle_channel(const FockState& s, const ChannelSpec& spec) {
  auto need = [&](std::size_t modes, std::size_t params) {
    if (spec.modes.size() != modes || spec.params.size() != params) {
      throw InvalidArgument("channel spec has the wrong number of modes or parameters");
    }
  };
  switch (spec.kind) {
    case ChannelKind::Phase:
      need(1, 1);
      return apply_phase(s, spec.modes[0], spec.params[0]);
    case ChannelKind::Beamsplitter:
      need(2, 1);
      return apply_beamsplitter(s, spec.modes[0], spec.modes[1], spec.params[0]);
    case ChannelKind::TwoModeSqueeze:
      need(2, 1);
      return apply_two_mode_squeeze(s, spec.modes[0], spec.modes[1], spec.params[0]);
    case ChannelKind::ThermalLoss:
      need(1, 2);
      return apply_thermal_loss(s, spec.modes[0], spec.params[0], spec.params[1]);
  }
  throw InvalidArgument("unsupported channel");
}

std::vector<double> photon_distribution(const FockState& s, std::size_t mode) {
  check_mode(s, mode);
  const Layout l(s.cutoffs);
  std::vector<double> p(static_cast<std::size_t>(s.cutoffs[mode]), 0.0);
  for (std::size_t i = 0; i < l.total; ++i) {
    p[static_cast<std::size_t>(l.digit(i, mode))] +=
        s.rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
  }
  return p;
}

double photon_mean(const FockState& s, std::size_t mode) {
  const auto p = photon_distribution(s, mode);
  double m = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) m += static_cast<double>(k) * p[k];
  return m;
}

double photon_covariance(const FockState& s, std::size_t a, std::size_t b) {
  check_mode(s, a);
  check_mode(s, b);
  const Layout l(s.cutoffs);
  double ea = 0.0, eb = 0.0, eab = 0.0;
  for (std::size_t i = 0; i < l.total; ++i) {
    const double p = s.rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    const double na = l.digit(i, a), nb = l.digit(i, b);
    ea += p * na;
    eb += p * nb;
    eab += p * na * nb;
  }
  return eab - ea * eb;
}

Moments difference_stats(const FockState& s, std::size_t a, std::size_t b) {
  check_mode(s, a);
  check_mode(s, b);
  const Layout l(s.cutoffs);
  double e1 = 0.0, e2 = 0.0;
  for (std::size_t i = 0; i < l.total; ++i) {
    const double p = s.rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    const double d = l.digit(i, a) - l.digit(i, b);
    e1 += p * d;
    e2 += p * d * d;
  }
  return {e1, e2 - e1 * e1};
}

double fidelity(const FockState& a, const FockState& b) {
  require_comparable(a, b);
  const CMatrix sa = sqrt_psd(a.rho);
  const CMatrix inner = sa * b.rho * sa;
  const auto solver = eig(0.5 * (inner + inner.adjoint()));
  return std::min(1.0, solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum());
}

double trace_distance(const FockState& a, const FockState& b) {
  require_comparable(a, b);
  const auto solver = eig(a.rho - b.rho);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double rel_entropy(const FockState& a, const FockState& b) {
  require_comparable(a, b);
  const auto ea = eig(a.rho);
  const auto eb = eig(b.rho);
  const Eigen::VectorXd la = ea.eigenvalues().cwiseMax(0.0);
  const Eigen::VectorXd lb = eb.eigenvalues();
  const Eigen::MatrixXd overlap =
      (ea.eigenvectors().adjoint() * eb.eigenvectors()).cwiseAbs2();
  double d = 0.0;
  for (Eigen::Index i = 0; i < la.size(); ++i) {
    if (la(i) <= 0.0) continue;
    d += la(i) * std::log(la(i));
    for (Eigen::Index j = 0; j < lb.size(); ++j) {
      const double w = la(i) * overlap(i, j);
      if (w < 1e-300) continue;
      if (lb(j) <= 0.0) {
        if (w > 1e-14) throw TruncationError("relative entropy support mismatch");
        continue;
      }
      d -= w * std::log(lb(j));
    }
  }
  return std::max(0.0, d);
}

Metrics oracle_metrics(const FockState& a, const FockState& b) {
  return {fidelity(a, b), trace_distance(a, b), rel_entropy(a, b)};
}

double phase_qfi(const FockState& s, std::size_t mode) {
  check_mode(s, mode);
  const Layout l(s.cutoffs);
  Eigen::VectorXd n(static_cast<Eigen::Index>(l.total));
  for (std::size_t i = 0; i < l.total; ++i) n(static_cast<Eigen::Index>(i)) = l.digit(i, mode);
  const auto solver = eig(s.rho);
  const Eigen::VectorXd lambda = solver.eigenvalues().cwiseMax(0.0);
  const CMatrix& v = solver.eigenvectors();
  const CMatrix g = v.adjoint() * n.asDiagonal() * v;
  double qfi = 0.0;
  for (Eigen::Index j = 0; j < lambda.size(); ++j) {
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
      const double sum = lambda(j) + lambda(k);
      if (sum < 1e-14) continue;
      const double diff = lambda(j) - lambda(k);
      qfi += 2.0 * diff * diff / sum * std::norm(g(j, k));
    }
  }
  return qfi;
}

}  // namespace covsense::fock
