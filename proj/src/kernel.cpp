#include "wrbf/kernel.hpp"

#include "wrbf/error.hpp"

#include <cmath>
#include <sstream>

namespace wrbf {

RationalPolynomial::RationalPolynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  trim();
}

void RationalPolynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

const Rational& RationalPolynomial::coeff(std::size_t j) const {
  static const Rational zero{0};
  return j < coeffs_.size() ? coeffs_[j] : zero;
}

int RationalPolynomial::degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }

Rational RationalPolynomial::operator()(const Rational& x) const {
  Rational acc{0};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

RationalPolynomial RationalPolynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<Rational> out(coeffs_.size() - 1);
  for (std::size_t j = 1; j < coeffs_.size(); ++j) out[j - 1] = coeffs_[j] * static_cast<long>(j);
  return RationalPolynomial(std::move(out));
}

RationalPolynomial RationalPolynomial::divide_by_r() const {
  if (coeffs_.empty()) return {};
  if (coeffs_.front() != 0)
    fail(ErrorCode::internal, "polynomial division by r leaves remainder " + to_string(coeffs_.front()));
  return RationalPolynomial(std::vector<Rational>(coeffs_.begin() + 1, coeffs_.end()));
}

RationalPolynomial RationalPolynomial::scaled(const Rational& factor) const {
  std::vector<Rational> out(coeffs_);
  for (auto& c : out) c *= factor;
  return RationalPolynomial(std::move(out));
}

std::vector<double> RationalPolynomial::to_double() const {
  std::vector<double> out;
  out.reserve(coeffs_.size());
  for (const auto& c : coeffs_) out.push_back(c.convert_to<double>());
  return out;
}

std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

int wendland_nu(int d, int tau) {
  // floor(tau + d/2 + 1) for non-negative integers.
  return tau + d / 2 + 1;
}

std::vector<Rational> wendland_coefficients(int nu, int tau) {
  // s = 0: binomial expansion of (1 - r)^nu.
  std::vector<Rational> cur(static_cast<std::size_t>(nu) + 1);
  Rational binom{1};
  for (int j = 0; j <= nu; ++j) {
    cur[j] = (j % 2 == 0) ? binom : Rational(-binom);
    binom = binom * (nu - j) / (j + 1);
  }

  for (int s = 0; s < tau; ++s) {
    const int top = nu + 2 * s;  // degree at level s
    std::vector<Rational> next(static_cast<std::size_t>(top) + 3);
    for (int j = 0; j <= top; ++j) next[0] += cur[j] / (j + 2);
    next[1] = 0;
    for (int j = 2; j <= top + 2; ++j) next[j] = -cur[j - 2] / j;
    cur = std::move(next);
  }
  return cur;
}

double horner(const std::vector<double>& coeffs, double x) noexcept {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

WendlandKernel WendlandKernel::build(int d, int tau, double support_scale, int degree_cap) {
  require(d >= 1, ErrorCode::invalid_argument, "kernel dimension d must be >= 1");
  require(tau >= 0, ErrorCode::invalid_argument, "kernel smoothness tau must be >= 0");
  require(std::isfinite(support_scale) && support_scale > 0.0, ErrorCode::invalid_argument,
          "support scale must be positive and finite");
  const int nu = wendland_nu(d, tau);
  if (nu + 2 * tau > degree_cap) {
    fail(ErrorCode::out_of_range, "Wendland kernel (d=" + std::to_string(d) + ", tau=" + std::to_string(tau) +
                                      ") has degree " + std::to_string(nu + 2 * tau) + " above the cap " +
                                      std::to_string(degree_cap));
  }

  WendlandKernel k;
  k.d_ = d;
  k.tau_ = tau;
  k.nu_ = nu;
  k.rho_ = support_scale;
  k.p_ = RationalPolynomial(wendland_coefficients(nu, tau));
  if (tau >= 1) k.p1_ = k.p_.derivative().divide_by_r();
  if (tau >= 2) k.p2_ = k.p1_.derivative().divide_by_r();

  const Rational p0 = k.p_.coeff(0);
  if (p0 <= 0) fail(ErrorCode::internal, "Wendland polynomial has non-positive value at 0");
  k.normalizer_ = p0.convert_to<double>();

  const Rational inv = 1 / p0;
  k.p_coeffs_ = k.p_.scaled(inv).to_double();
  k.p1_coeffs_ = k.p1_.scaled(inv).to_double();
  k.p2_coeffs_ = k.p2_.scaled(inv).to_double();
  return k;
}

double WendlandKernel::phi(double r) const {
  require(r >= 0.0, ErrorCode::invalid_argument, "phi: radius must be non-negative");
  const double u = r / rho_;
  return u < 1.0 ? horner(p_coeffs_, u) : 0.0;
}

double WendlandKernel::phi1(double r) const {
  require(r >= 0.0, ErrorCode::invalid_argument, "phi1: radius must be non-negative");
  require(has_phi1(), ErrorCode::invalid_argument, "phi1 requires tau >= 1");
  const double u = r / rho_;
  return u < 1.0 ? horner(p1_coeffs_, u) / (rho_ * rho_) : 0.0;
}

double WendlandKernel::phi2(double r) const {
  require(r >= 0.0, ErrorCode::invalid_argument, "phi2: radius must be non-negative");
  require(has_phi2(), ErrorCode::invalid_argument, "phi2 requires tau >= 2");
  const double u = r / rho_;
  if (u >= 1.0) return 0.0;
  const double rho2 = rho_ * rho_;
  return horner(p2_coeffs_, u) / (rho2 * rho2);
}

void WendlandKernel::check_dim(Eigen::Index size) const {
  if (size != d_)
    fail(ErrorCode::dimension_mismatch,
         "kernel expects " + std::to_string(d_) + "-vectors, got length " + std::to_string(size));
}

double WendlandKernel::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_dim(x.size());
  return phi(x.norm());
}

Eigen::VectorXd WendlandKernel::gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_dim(x.size());
  return phi1(x.norm()) * x;
}

Eigen::MatrixXd WendlandKernel::hessian(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_dim(x.size());
  const double r = x.norm();
  Eigen::MatrixXd h = phi2(r) * (x * x.transpose());
  h.diagonal().array() += phi1(r);
  return h;
}

}  // namespace wrbf
