#include "bellrand/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "bellrand/errors.hpp"
#include "bellrand/simd/kernels.hpp"

namespace bellrand {
namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw DimensionError(std::string(what) + " must be a non-empty square matrix");
}

std::span<const double> as_reals(const ComplexMatrix& m) {
  return {reinterpret_cast<const double*>(m.data()), static_cast<std::size_t>(2 * m.size())};
}

}  // namespace

DensityMatrix DensityMatrix::from_matrix(const ComplexMatrix& m) {
  require_square(m, "density matrix");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol::kHermitian) throw InvalidOperator("density matrix is not Hermitian");
  ComplexMatrix h = (m + m.adjoint()) / 2.0;
  if (std::abs(h.trace().real() - 1.0) > tol::kTrace) throw InvalidOperator("density matrix does not have unit trace");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol::kPsd) throw InvalidOperator("density matrix is not positive semidefinite");
  return DensityMatrix(std::move(h));
}

DensityMatrix DensityMatrix::pure(const Ket& psi) {
  if (psi.size() == 0) throw DimensionError("empty ket");
  if (std::abs(psi.norm() - 1.0) > tol::kTrace) throw InvalidOperator("ket is not normalized");
  return from_matrix(psi * psi.adjoint());
}

DensityMatrix DensityMatrix::diagonal(std::span<const double> probabilities) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(probabilities.size()),
                                        static_cast<Eigen::Index>(probabilities.size()));
  for (std::size_t i = 0; i < probabilities.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = probabilities[i];
  return from_matrix(m);
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  if (dim <= 0) throw DimensionError("dimension must be positive");
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Unitary Unitary::from_matrix(const ComplexMatrix& m) {
  require_square(m, "unitary");
  ComplexMatrix id = ComplexMatrix::Identity(m.rows(), m.cols());
  if ((m.adjoint() * m - id).cwiseAbs().maxCoeff() > tol::kUnitary) throw InvalidOperator("matrix is not unitary");
  return Unitary(m);
}

Unitary Unitary::identity(int dim) {
  if (dim <= 0) throw DimensionError("dimension must be positive");
  return Unitary(ComplexMatrix::Identity(dim, dim));
}

MeasurementFamily::MeasurementFamily(int inputs, int outcomes, std::vector<ComplexMatrix> operators)
    : inputs_(inputs), outcomes_(outcomes), dim_(0), operators_(std::move(operators)) {
  if (inputs <= 0 || outcomes <= 0) throw DimensionError("measurement family needs inputs and outcomes");
  if (operators_.size() != static_cast<std::size_t>(inputs * outcomes))
    throw DimensionError("measurement family has the wrong number of operators");
  dim_ = static_cast<int>(operators_.front().rows());
  for (const auto& op : operators_) {
    require_square(op, "Kraus operator");
    if (op.rows() != dim_) throw DimensionError("Kraus operators of different dimensions");
  }
  ComplexMatrix id = ComplexMatrix::Identity(dim_, dim_);
  for (int x = 0; x < inputs; ++x) {
    ComplexMatrix sum = ComplexMatrix::Zero(dim_, dim_);
    for (int a = 0; a < outcomes; ++a) sum += op(x, a).adjoint() * op(x, a);
    if ((sum - id).cwiseAbs().maxCoeff() > tol::kComplete)
      throw InvalidOperator("Kraus operators for input " + std::to_string(x) + " are not complete");
  }
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

Ket tensor(const Ket& a, const Ket& b) {
  Ket r(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) r.segment(i * b.size(), b.size()) = a(i) * b;
  return r;
}

namespace {

ComplexMatrix joint(const DensityMatrix& rho, const ComplexMatrix& k_a, const ComplexMatrix& k_b) {
  ComplexMatrix k = tensor(k_a, k_b);
  if (k.rows() != rho.dim() || k.cols() != rho.dim()) throw DimensionError("operator does not match state dimension");
  return k;
}

}  // namespace

double born_prob(const DensityMatrix& rho, const ComplexMatrix& k_a, const ComplexMatrix& k_b) {
  ComplexMatrix k = joint(rho, k_a, k_b);
  ComplexMatrix e = k.adjoint() * k;
  // tr(E rho) = sum_ij E_ij conj(rho_ij) for Hermitian rho; its real part is
  // the dot product of the interleaved storage.
  double p = simd::dot(as_reals(e), as_reals(rho.matrix()));
  return std::clamp(p, 0.0, 1.0);
}

DensityMatrix collapse(const DensityMatrix& rho, const ComplexMatrix& k_a, const ComplexMatrix& k_b) {
  ComplexMatrix k = joint(rho, k_a, k_b);
  ComplexMatrix m = k * rho.matrix() * k.adjoint();
  double p = m.trace().real();
  if (p <= kImpossible) throw ZeroProbability("collapse onto an impossible outcome");
  return DensityMatrix::from_matrix(m / p);
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const Unitary& u) {
  if (u.dim() != rho.dim()) throw DimensionError("unitary does not match state dimension");
  return DensityMatrix::from_matrix(u.matrix() * rho.matrix() * u.matrix().adjoint());
}

DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep, std::pair<int, int> dims) {
  const int da = dims.first, db = dims.second;
  if (da <= 0 || db <= 0 || da * db != rho.dim()) throw DimensionError("subsystem dimensions do not match state");
  const auto& m = rho.matrix();
  const int d = keep == Subsystem::kA ? da : db;
  ComplexMatrix r = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Complex s = 0.0;
      if (keep == Subsystem::kA)
        for (int k = 0; k < db; ++k) s += m(i * db + k, j * db + k);
      else
        for (int k = 0; k < da; ++k) s += m(k * db + i, k * db + j);
      r(i, j) = s;
    }
  return DensityMatrix::from_matrix(r);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionError("states of different dimensions");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix() - sigma.matrix(), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace bellrand
