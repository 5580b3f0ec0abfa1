#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace emdpe {

using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;

enum class OperatorKind { Identity, GaussianDense, RowSubsampledIdentity };

/// Real compression map Phi (M x N). Gaussian entries are i.i.d. N(0, 1/M);
/// row-subsampled operators keep M distinct rows of the identity, stored as
/// the sorted list of kept sample indices.
class MeasurementOperator {
 public:
  static MeasurementOperator identity(Eigen::Index n);
  static MeasurementOperator gaussian(Eigen::Index m, Eigen::Index n, std::uint64_t seed);
  static MeasurementOperator row_subsampled(Eigen::Index m, Eigen::Index n, std::uint64_t seed);

  OperatorKind kind() const { return kind_; }
  Eigen::Index rows() const { return m_; }
  Eigen::Index cols() const { return n_; }
  std::uint64_t seed() const { return seed_; }

  /// Phi x. Throws std::invalid_argument on dimension mismatch.
  cvec apply(const cvec& x) const;
  /// Phi^H y (= Phi^T y, Phi is real).
  cvec apply_adjoint(const cvec& y) const;
  /// Phi A for a block of columns.
  cmat apply(const cmat& a) const;

  /// Dense realization; identity and row selection are materialized on demand.
  Eigen::MatrixXd dense() const;
  const Eigen::VectorXi& kept_rows() const { return rows_kept_; }

 private:
  MeasurementOperator(OperatorKind kind, Eigen::Index m, Eigen::Index n, std::uint64_t seed)
      : kind_(kind), m_(m), n_(n), seed_(seed) {}

  OperatorKind kind_;
  Eigen::Index m_;
  Eigen::Index n_;
  std::uint64_t seed_;
  Eigen::MatrixXd phi_;        // GaussianDense only
  Eigen::VectorXi rows_kept_;  // RowSubsampledIdentity only
};

}  // namespace emdpe
