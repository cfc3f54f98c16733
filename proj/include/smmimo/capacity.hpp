#ifndef SMMIMO_CAPACITY_HPP
#define SMMIMO_CAPACITY_HPP

#include "smmimo/dbm.hpp"
#include "smmimo/error.hpp"
#include "smmimo/topology.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace smmimo {

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

using MaskMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// M x K channel (rows: VC antennas, columns: UTs) plus the key it was drawn
/// from.
struct ChannelRealization {
  ComplexMatrix<double> h;
  std::uint64_t seed = 0;
  std::uint64_t trial_index = 0;
};

/// i.i.d. CN(0, 1) entries. Entry (m, k) depends only on
/// (seed, trial_index, m, k).
ChannelRealization draw_channel(Eigen::Index antennas, Eigen::Index users, std::uint64_t seed,
                                std::uint64_t trial_index);

/// Entry (m, k) scaled to variance `variance(m, k)` (pathloss model).
ChannelRealization draw_channel(const Eigen::MatrixXd& variance, std::uint64_t seed,
                                std::uint64_t trial_index);

inline MaskMatrix full_mask(Eigen::Index antennas, Eigen::Index users) {
  return MaskMatrix::Constant(antennas, users, true);
}

/// Column k keeps antenna m when power(m, k) >= mu * max_m power(m, k), the
/// same acceptance rule candidate selection applies to pilot receptions.
template <typename Derived>
MaskMatrix build_mask(const Eigen::MatrixBase<Derived>& power, double mu) {
  MaskMatrix mask(power.rows(), power.cols());
  for (Eigen::Index k = 0; k < power.cols(); ++k) {
    const double strongest = static_cast<double>(power.col(k).maxCoeff());
    for (Eigen::Index m = 0; m < power.rows(); ++m) {
      mask(m, k) = meets_acceptance(static_cast<double>(power(m, k)), strongest, mu);
    }
  }
  return mask;
}

/// rho / (1 + alpha * rho * k_interferers): inter-cell interference folded
/// into the noise floor.
template <typename Scalar>
Scalar effective_snr(Scalar rho, Scalar alpha, Scalar k_interferers) {
  return rho / (Scalar(1) + alpha * rho * k_interferers);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// H masked entrywise; zeroed entries are antennas not serving that UT.
template <typename Derived>
auto apply_mask(const Eigen::MatrixBase<Derived>& h, const MaskMatrix& mask) {
  using C = typename Derived::Scalar;
  return h.cwiseProduct(mask.template cast<C>()).eval();
}

/// K x K Gram matrix H^H H, full Hermitian storage.
template <typename Derived>
auto gram(const Eigen::MatrixBase<Derived>& h) {
  using C = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix g = Matrix::Zero(h.cols(), h.cols());
  g.template selfadjointView<Eigen::Lower>().rankUpdate(h.adjoint());
  return Matrix(g.template selfadjointView<Eigen::Lower>());
}

/// log2 det(I + rho_eff * G) for a Hermitian PSD Gram matrix, via Cholesky:
/// 2 * sum(log diag(L)) / ln 2.
template <typename Derived>
auto gram_capacity(const Eigen::MatrixBase<Derived>& g, typename Derived::RealScalar rho_eff) {
  using Real = typename Derived::RealScalar;
  using C = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic>;
  if (!g.allFinite() || !std::isfinite(rho_eff)) {
    throw Error(Errc::NumericalFailure, "non-finite channel or SNR");
  }
  Matrix a = rho_eff * g;
  a.diagonal().array() += C(1);
  Eigen::LLT<Matrix, Eigen::Lower> llt(a);
  if (llt.info() != Eigen::Success) {
    throw Error(Errc::NumericalFailure, "Gram factorization failed");
  }
  Real log_det = 0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += std::log(std::real(l(i, i)));
  const Real bits = Real(2) * log_det / std::log(Real(2));
  return bits > Real(0) ? bits : Real(0);
}

/// Sum capacity of one virtual cell in bps/Hz:
/// log2 det(I_K + rho_eff * Hm^H Hm), Hm = H masked by the serving pattern.
template <typename Derived>
auto vc_capacity(const Eigen::MatrixBase<Derived>& h, const MaskMatrix& mask,
                 typename Derived::RealScalar rho, typename Derived::RealScalar alpha,
                 typename Derived::RealScalar k_interferers) {
  using Real = typename Derived::RealScalar;
  if (mask.rows() != h.rows() || mask.cols() != h.cols()) {
    throw Error(Errc::InvalidArgument, "mask shape differs from channel");
  }
  if (!(rho >= Real(0)) || !(alpha >= Real(0) && alpha <= Real(1)) || !(k_interferers >= Real(0))) {
    throw Error(Errc::InvalidArgument, "rho, alpha or k_interferers out of range");
  }
  return gram_capacity(gram(apply_mask(h, mask)), effective_snr(rho, alpha, k_interferers));
}

struct CapacityPoint {
  double snr_db = 0.0;
  double alpha = 0.0;
  double mu = 1.0;
  MaskMode mask_mode = MaskMode::Full;
  double mean_capacity = 0.0;
  double std_error = 0.0;
  int trials = 0;
};

struct CapacityCurve {
  std::vector<CapacityPoint> points;  ///< alpha ascending, then SNR ascending
  std::uint64_t seed = 0;
};

/// One virtual cell's Monte Carlo setup.
struct ErgodicSpec {
  int antennas = 1000;
  int users = 100;
  double snr_db = 10.0;
  double alpha = 1.0;
  double mu = 1.0;
  MaskMode mask_mode = MaskMode::Full;
  int k_interferers = 100;
  int trials = 200;
  std::uint64_t seed = 1;
  int threads = 1;
};

/// Mean and standard error of vc_capacity over independent draws. Every
/// trial is evaluated on its own and the results are folded in trial order,
/// so the answer does not depend on `threads`.
CapacityPoint ergodic_capacity(const ErgodicSpec& spec);

/// One point per (alpha, SNR) cell of the config's grid at its mu. Grid cells
/// share each trial's channel draw.
CapacityCurve sweep_curve(const ScenarioConfig& config, int threads = 1);

/// Pathloss-model geometry of the cell owned by VN 0: variance of every
/// (antenna, UT) entry, the UTs and antennas involved.
struct CellGeometry {
  Eigen::MatrixXd variance;
  std::vector<int> antenna_ids;
  std::vector<int> ut_ids;
};
CellGeometry cell_geometry(const Scenario& scenario, int vn_id = 0);

struct AlphaCalibration {
  double alpha = 0.0;
  double mean_capacity = 0.0;
  int iterations = 0;
};

/// Bisection on alpha until the ergodic capacity of `spec` (alpha ignored)
/// hits `target_bps_hz`. Capacity is nonincreasing in alpha, and common
/// random numbers across iterations keep the search monotone.
AlphaCalibration calibrate_alpha(const ErgodicSpec& spec, double target_bps_hz,
                                 double alpha_tolerance = 1e-9);

}  // namespace smmimo

#endif  // SMMIMO_CAPACITY_HPP
