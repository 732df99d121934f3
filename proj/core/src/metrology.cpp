#include "covsense/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Eigenvalues>

#include "covsense/errors.hpp"

namespace covsense {

namespace {

using Real = long double;
using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

RMatrix omega_ld(Eigen::Index n_modes) {
  RMatrix om = RMatrix::Zero(2 * n_modes, 2 * n_modes);
  for (Eigen::Index i = 0; i < n_modes; ++i) {
    om(2 * i, 2 * i + 1) = 1;
    om(2 * i + 1, 2 * i) = -1;
  }
  return om;
}

}  // namespace

double gaussian_fidelity(const GaussianState& a, const GaussianState& b) {
  if (a.num_modes() != b.num_modes()) {
    throw InvalidArgument("fidelity requires states over the same number of modes");
  }
  const auto n = static_cast<Eigen::Index>(a.num_modes());
  const RMatrix om = omega_ld(n);
  // Covariances rescaled to vacuum = I/2 for the standard expression.
  const RMatrix a1 = a.cov().cast<Real>() / 2;
  const RMatrix a2 = b.cov().cast<Real>() / 2;
  const RMatrix sum = a1 + a2;
  const RMatrix sum_inv = sum.inverse();
  const RMatrix v_aux = om.transpose() * sum_inv * (om / 4 + a2 * om * a1);

  Eigen::EigenSolver<RMatrix> solver(v_aux * om, false);
  if (solver.info() != Eigen::Success) throw ConvergenceError("fidelity eigensolver failed");
  std::complex<Real> prod = 1;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const std::complex<Real> mu = solver.eigenvalues()(i);
    const std::complex<Real> lambda = Real(1) + Real(1) / (Real(4) * mu * mu);
    prod *= std::sqrt(lambda) + Real(1);
  }
  const Real f4 = std::ldexp(Real(1), static_cast<int>(2 * n)) * prod.real() *
                  v_aux.determinant() / sum.determinant();
  const RVector delta = (a.mean() - b.mean()).cast<Real>();
  const Real exponent = delta.dot((a.cov() + b.cov()).cast<Real>().ldlt().solve(delta)) / 4;
  const Real f = std::pow(std::max(f4, Real(0)), Real(0.25)) * std::exp(-exponent);
  return std::clamp(static_cast<double>(f), 0.0, 1.0);
}

QfiResult qfi_phase(const SensingScenario& scenario, ProtocolVariant variant,
                    const QfiOptions& options) {
  scenario.validate();
  if (!(options.step > 0.0) || options.step > 1.0) {
    throw InvalidArgument("QFI step must lie in (0, 1]");
  }
  auto j_at = [&](double h) {
    SensingScenario lo = scenario, hi = scenario;
    lo.theta = scenario.theta - h / 2;
    hi.theta = scenario.theta + h / 2;
    const double f = gaussian_fidelity(build_receiver_input(lo, variant),
                                       build_receiver_input(hi, variant));
    return 8.0 * (1.0 - f) / (h * h);
  };
  const double h = options.step;
  const double j1 = j_at(h), j2 = j_at(h / 2), j4 = j_at(h / 4);
  const double r1 = (4.0 * j2 - j1) / 3.0;
  const double r2 = (4.0 * j4 - j2) / 3.0;

  QfiResult out;
  out.J = std::max(0.0, r2);
  out.step = h / 4;
  out.richardson_error = std::abs(r2 - r1);
  if (out.richardson_error > options.rel_tolerance * out.J + 1e-13) {
    throw ConvergenceError("QFI finite differences did not converge");
  }
  const double m = static_cast<double>(scenario.mode_count());
  out.qcrb_var = out.J > 0.0 ? 1.0 / (m * out.J) : std::numeric_limits<double>::infinity();
  return out;
}

double receiver_fisher(const ReceiverStats& stats, double theta) {
  const double slope = stats.calib_scale * std::sin(theta);
  if (slope == 0.0) return 0.0;
  if (!(stats.var_diff > 0.0)) {
    throw InvalidArgument("receiver Fisher information diverges for zero output variance");
  }
  return slope * slope / stats.var_diff;
}

}  // namespace covsense
