#include "emdpe/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "emdpe/rng.hpp"

namespace emdpe {

MeasurementOperator MeasurementOperator::identity(Eigen::Index n) {
  if (n <= 0) throw std::invalid_argument("MeasurementOperator: N must be positive");
  return MeasurementOperator(OperatorKind::Identity, n, n, 0);
}

MeasurementOperator MeasurementOperator::gaussian(Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
  if (m <= 0 || n <= 0) throw std::invalid_argument("MeasurementOperator: M and N must be positive");
  MeasurementOperator op(OperatorKind::GaussianDense, m, n, seed);
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(m)));
  op.phi_.resize(m, n);
  // Row-major fill so the draw order does not depend on Eigen's storage.
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) op.phi_(i, j) = normal(rng);
  }
  return op;
}

MeasurementOperator MeasurementOperator::row_subsampled(Eigen::Index m, Eigen::Index n,
                                                        std::uint64_t seed) {
  if (m <= 0 || n <= 0 || m > n) {
    throw std::invalid_argument("MeasurementOperator: row subsampling needs 0 < M <= N");
  }
  MeasurementOperator op(OperatorKind::RowSubsampledIdentity, m, n, seed);
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  // Partial Fisher-Yates.
  for (Eigen::Index i = 0; i < m; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  std::sort(idx.begin(), idx.begin() + m);
  op.rows_kept_.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) op.rows_kept_(i) = idx[static_cast<std::size_t>(i)];
  return op;
}

cvec MeasurementOperator::apply(const cvec& x) const {
  if (x.size() != n_) throw std::invalid_argument("MeasurementOperator::apply: dimension mismatch");
  switch (kind_) {
    case OperatorKind::Identity:
      return x;
    case OperatorKind::GaussianDense: {
      cvec y(m_);
      y.real() = phi_ * x.real();
      y.imag() = phi_ * x.imag();
      return y;
    }
    case OperatorKind::RowSubsampledIdentity: {
      cvec y(m_);
      for (Eigen::Index i = 0; i < m_; ++i) y(i) = x(rows_kept_(i));
      return y;
    }
  }
  return x;
}

cvec MeasurementOperator::apply_adjoint(const cvec& y) const {
  if (y.size() != m_) {
    throw std::invalid_argument("MeasurementOperator::apply_adjoint: dimension mismatch");
  }
  switch (kind_) {
    case OperatorKind::Identity:
      return y;
    case OperatorKind::GaussianDense: {
      cvec x(n_);
      x.real() = phi_.transpose() * y.real();
      x.imag() = phi_.transpose() * y.imag();
      return x;
    }
    case OperatorKind::RowSubsampledIdentity: {
      cvec x = cvec::Zero(n_);
      for (Eigen::Index i = 0; i < m_; ++i) x(rows_kept_(i)) = y(i);
      return x;
    }
  }
  return y;
}

cmat MeasurementOperator::apply(const cmat& a) const {
  if (a.rows() != n_) throw std::invalid_argument("MeasurementOperator::apply: dimension mismatch");
  switch (kind_) {
    case OperatorKind::Identity:
      return a;
    case OperatorKind::GaussianDense: {
      cmat out(m_, a.cols());
      out.real() = phi_ * a.real();
      out.imag() = phi_ * a.imag();
      return out;
    }
    case OperatorKind::RowSubsampledIdentity: {
      cmat out(m_, a.cols());
      for (Eigen::Index i = 0; i < m_; ++i) out.row(i) = a.row(rows_kept_(i));
      return out;
    }
  }
  return a;
}

Eigen::MatrixXd MeasurementOperator::dense() const {
  switch (kind_) {
    case OperatorKind::Identity:
      return Eigen::MatrixXd::Identity(m_, n_);
    case OperatorKind::GaussianDense:
      return phi_;
    case OperatorKind::RowSubsampledIdentity: {
      Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m_, n_);
      for (Eigen::Index i = 0; i < m_; ++i) d(i, rows_kept_(i)) = 1.0;
      return d;
    }
  }
  return {};
}

}  // namespace emdpe
