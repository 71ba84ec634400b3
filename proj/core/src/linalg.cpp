#include "mole2d/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>
#include <cmath>

#include "mole2d/errors.hpp"

namespace mole2d {

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

namespace {

// Acklam's rational approximation of the probit function (|error| < 1.2e-9
// before refinement).
double probit_seed(double p) {
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) raise(Errc::OutOfRange, "normal_quantile needs p in (0,1)");
  double x = probit_seed(p);
  // One Halley step against the erf-based CDF.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * 3.141592653589793238462643) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double chi2_quantile_1dof(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) raise(Errc::OutOfRange, "chi2 quantile needs eta in (0,1)");
  const double z = normal_quantile(0.5 * (1.0 + eta));
  return z * z;
}

double chi2_cdf_1dof(double x) {
  if (x <= 0.0) return 0.0;
  return std::erf(std::sqrt(0.5 * x));
}

GaussianBelief condition(const GaussianBelief& belief,
                         std::span<const int> fixed_indices,
                         std::span<const double> fixed_values) {
  const int dim = belief.dim();
  const int nf = static_cast<int>(fixed_indices.size());
  if (nf != static_cast<int>(fixed_values.size()))
    raise(Errc::OutOfRange, "fixed indices/values length mismatch");

  std::vector<bool> fixed(dim, false);
  for (int idx : fixed_indices) {
    if (idx < 0 || idx >= dim) raise(Errc::OutOfRange, "conditioning index out of range");
    if (fixed[idx]) raise(Errc::OutOfRange, "duplicate conditioning index");
    fixed[idx] = true;
  }
  const int nr = dim - nf;

  std::vector<int> rest;
  rest.reserve(nr);
  for (int i = 0; i < dim; ++i)
    if (!fixed[i]) rest.push_back(i);

  Eigen::MatrixXd s_uu(nf, nf), s_ru(nr, nf);
  Eigen::VectorXd mu_u(nf), innovation(nf);
  for (int a = 0; a < nf; ++a) {
    mu_u[a] = belief.mean[fixed_indices[a]];
    innovation[a] = fixed_values[a] - mu_u[a];
    for (int b = 0; b < nf; ++b)
      s_uu(a, b) = belief.covariance(fixed_indices[a], fixed_indices[b]);
    for (int r = 0; r < nr; ++r)
      s_ru(r, a) = belief.covariance(rest[r], fixed_indices[a]);
  }

  Eigen::LLT<Eigen::MatrixXd> llt(s_uu);
  if (llt.info() != Eigen::Success)
    raise(Errc::SingularBlock, "fixed sub-covariance is not invertible");

  GaussianBelief out;
  out.mean.resize(nr);
  out.covariance.resize(nr, nr);
  const Eigen::MatrixXd gain = llt.solve(s_ru.transpose()).transpose();  // S_ru S_uu^-1
  for (int r = 0; r < nr; ++r) out.mean[r] = belief.mean[rest[r]];
  out.mean += gain * innovation;

  Eigen::MatrixXd s_rr(nr, nr);
  for (int r = 0; r < nr; ++r)
    for (int c = 0; c < nr; ++c) s_rr(r, c) = belief.covariance(rest[r], rest[c]);
  out.covariance = s_rr - gain * s_ru.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

struct WeightedLsSolver::Impl {
  Eigen::SparseMatrix<double> weighted;  // A P^-1
  Eigen::SparseMatrix<double> normal;    // A P^-1 A^T
  Eigen::MatrixXd normal_dense;
  Eigen::LLT<Eigen::MatrixXd> dense_llt;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> sparse_llt;
  bool use_dense = false;
};

WeightedLsSolver::WeightedLsSolver(const Eigen::SparseMatrix<double>& reduced_incidence,
                                   const Eigen::VectorXd& variances)
    : impl_(new Impl) {
  const auto n = reduced_incidence.rows();
  if (variances.size() != reduced_incidence.cols())
    raise(Errc::OutOfRange, "variance vector length mismatch");

  impl_->weighted = reduced_incidence;
  for (int col = 0; col < impl_->weighted.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(impl_->weighted, col); it; ++it)
      it.valueRef() /= variances[col];
  impl_->normal = (impl_->weighted * reduced_incidence.transpose()).pruned();

  impl_->use_dense = n < 50;
  if (impl_->use_dense) {
    impl_->normal_dense = Eigen::MatrixXd(impl_->normal);
    impl_->dense_llt.compute(impl_->normal_dense);
    if (impl_->dense_llt.info() != Eigen::Success)
      raise(Errc::NotPositiveDefinite, "normal matrix not SPD (graph disconnected?)");
  } else {
    impl_->sparse_llt.compute(impl_->normal);
    if (impl_->sparse_llt.info() != Eigen::Success)
      raise(Errc::NotPositiveDefinite, "normal matrix not SPD (graph disconnected?)");
  }
}

WeightedLsSolver::~WeightedLsSolver() = default;
WeightedLsSolver::WeightedLsSolver(WeightedLsSolver&&) noexcept = default;
WeightedLsSolver& WeightedLsSolver::operator=(WeightedLsSolver&&) noexcept = default;

Eigen::VectorXd WeightedLsSolver::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != impl_->weighted.cols())
    raise(Errc::OutOfRange, "rhs length mismatch");
  if (impl_->weighted.rows() == 0) return Eigen::VectorXd();
  const Eigen::VectorXd b = impl_->weighted * rhs;
  Eigen::VectorXd x;
  if (impl_->use_dense) {
    x = impl_->dense_llt.solve(b);
    x += impl_->dense_llt.solve(b - impl_->normal_dense * x);  // one refinement step
  } else {
    x = impl_->sparse_llt.solve(b);
    x += impl_->sparse_llt.solve(b - impl_->normal * x);
  }
  return x;
}

Eigen::VectorXd weighted_ls_solve(const Eigen::SparseMatrix<double>& reduced_incidence,
                                  const Eigen::VectorXd& variances,
                                  const Eigen::VectorXd& rhs) {
  return WeightedLsSolver(reduced_incidence, variances).solve(rhs);
}

double projection_identity_residual(const Eigen::MatrixXd& reduced_incidence,
                                    const Eigen::MatrixXd& cycle_basis,
                                    const Eigen::VectorXd& variances) {
  const Eigen::VectorXd pinv = variances.cwiseInverse();
  const Eigen::MatrixXd api = reduced_incidence * pinv.asDiagonal();  // A P^-1
  const Eigen::MatrixXd apa = api * reduced_incidence.transpose();
  Eigen::MatrixXd lhs =
      api.transpose() * Eigen::LLT<Eigen::MatrixXd>(apa).solve(api);
  if (cycle_basis.rows() > 0) {
    const Eigen::MatrixXd cpc =
        cycle_basis * variances.asDiagonal() * cycle_basis.transpose();
    lhs += cycle_basis.transpose() *
           Eigen::LLT<Eigen::MatrixXd>(cpc).solve(cycle_basis);
  }
  lhs -= Eigen::MatrixXd(pinv.asDiagonal());
  return lhs.cwiseAbs().maxCoeff();
}

}  // namespace mole2d
