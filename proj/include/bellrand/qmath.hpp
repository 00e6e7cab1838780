#pragma once

// Dense complex linear algebra for small bipartite systems.

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace bellrand {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Ket = Eigen::VectorXcd;

namespace tol {
inline constexpr double kHermitian = 1e-9;
inline constexpr double kPsd = 1e-9;
inline constexpr double kTrace = 1e-9;
inline constexpr double kComplete = 1e-9;
inline constexpr double kUnitary = 1e-9;
inline constexpr double kProb = 1e-9;
}  // namespace tol

// Hermitian, PSD, unit trace (all within tolerance). Stored Hermitian-symmetrized.
class DensityMatrix {
 public:
  static DensityMatrix from_matrix(const ComplexMatrix& m);
  static DensityMatrix pure(const Ket& psi);
  static DensityMatrix diagonal(std::span<const double> probabilities);
  static DensityMatrix maximally_mixed(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  Eigen::VectorXd eigenvalues() const;

 private:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

class Unitary {
 public:
  static Unitary from_matrix(const ComplexMatrix& m);
  static Unitary identity(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  explicit Unitary(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

// Kraus operators {M_x^a} acting on one component. For every input x the
// completeness relation sum_a M^dagger M = I holds within tolerance.
class MeasurementFamily {
 public:
  // operators[x * outcomes + a]
  MeasurementFamily(int inputs, int outcomes, std::vector<ComplexMatrix> operators);

  int inputs() const { return inputs_; }
  int outcomes() const { return outcomes_; }
  int dim() const { return dim_; }
  const ComplexMatrix& op(int input, int outcome) const {
    return operators_[static_cast<std::size_t>(input * outcomes_ + outcome)];
  }

 private:
  int inputs_;
  int outcomes_;
  int dim_;
  std::vector<ComplexMatrix> operators_;
};

enum class Subsystem { kA, kB };

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
Ket tensor(const Ket& a, const Ket& b);

// tr((Ka (x) Kb) rho (Ka (x) Kb)^dagger), clamped to [0, 1].
double born_prob(const DensityMatrix& rho, const ComplexMatrix& k_a, const ComplexMatrix& k_b);
// Post-measurement state; throws ZeroProbability if the outcome is impossible.
DensityMatrix collapse(const DensityMatrix& rho, const ComplexMatrix& k_a, const ComplexMatrix& k_b);
DensityMatrix apply_unitary(const DensityMatrix& rho, const Unitary& u);
DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep, std::pair<int, int> dims);
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

// Probabilities at or below this are treated as impossible outcomes.
inline constexpr double kImpossible = 1e-12;

}  // namespace bellrand
