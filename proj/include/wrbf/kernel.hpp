#pragma once

#include <Eigen/Core>
#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace wrbf {

using Rational = boost::multiprecision::cpp_rational;

/// Dense univariate polynomial with exact rational coefficients, lowest
/// degree first.
class RationalPolynomial {
 public:
  RationalPolynomial() = default;
  explicit RationalPolynomial(std::vector<Rational> coeffs);

  const std::vector<Rational>& coeffs() const noexcept { return coeffs_; }
  const Rational& coeff(std::size_t j) const;
  /// -1 for the zero polynomial.
  int degree() const noexcept;

  Rational operator()(const Rational& x) const;
  RationalPolynomial derivative() const;
  /// Exact division by the monomial r; throws unless the constant term is 0.
  RationalPolynomial divide_by_r() const;
  RationalPolynomial scaled(const Rational& factor) const;

  std::vector<double> to_double() const;

 private:
  void trim();

  std::vector<Rational> coeffs_;
};

/// Wendland kernel Phi_{d,tau}(x) = phi(|x|), compactly supported on |x| < rho.
///
/// p is the polynomial piece of phi on [0,1]. The derivative kernels are
///   phi1(r) = phi'(r) / r,      phi2(r) = phi1'(r) / r,
/// represented by the polynomials p1 = p'/r and p2 = p1'/r, which exist
/// exactly for tau >= 1 and tau >= 2 respectively. All evaluations divide by
/// the normalizer p(0) so that phi(0) = 1, and use the scaled argument r/rho.
///
/// Immutable after construction; every evaluation is thread-safe.
class WendlandKernel {
 public:
  static constexpr int kDefaultDegreeCap = 64;

  static WendlandKernel build(int d, int tau, double support_scale = 1.0,
                              int degree_cap = kDefaultDegreeCap);

  int d() const noexcept { return d_; }
  int tau() const noexcept { return tau_; }
  int nu() const noexcept { return nu_; }
  int degree() const noexcept { return nu_ + 2 * tau_; }
  double support_scale() const noexcept { return rho_; }
  /// p(0); the unnormalized kernel value at the origin.
  double normalizer() const noexcept { return normalizer_; }

  /// Raw recursion output, before normalization.
  const RationalPolynomial& p_exact() const noexcept { return p_; }
  /// Empty when tau < 1.
  const RationalPolynomial& p1_exact() const noexcept { return p1_; }
  /// Empty when tau < 2.
  const RationalPolynomial& p2_exact() const noexcept { return p2_; }

  bool has_phi1() const noexcept { return tau_ >= 1; }
  bool has_phi2() const noexcept { return tau_ >= 2; }

  double phi(double r) const;
  double phi1(double r) const;
  double phi2(double r) const;

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::MatrixXd hessian(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  WendlandKernel() = default;

  void check_dim(Eigen::Index size) const;

  int d_ = 0;
  int tau_ = 0;
  int nu_ = 0;
  double rho_ = 1.0;
  double normalizer_ = 1.0;
  RationalPolynomial p_;
  RationalPolynomial p1_;
  RationalPolynomial p2_;
  // Normalized double coefficients in the scaled variable.
  std::vector<double> p_coeffs_;
  std::vector<double> p1_coeffs_;
  std::vector<double> p2_coeffs_;
};

/// Coefficients d_{j,tau}^{(nu)}, j = 0..nu+2tau, from the closed recursion
/// starting at the binomial expansion of (1-r)^nu.
std::vector<Rational> wendland_coefficients(int nu, int tau);

/// floor(tau + d/2 + 1).
int wendland_nu(int d, int tau);

/// Horner evaluation, lowest degree first.
double horner(const std::vector<double>& coeffs, double x) noexcept;

std::string to_string(const Rational& q);

}  // namespace wrbf
