#include "wrbf/error.hpp"
#include "wrbf/kernel.hpp"

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

using namespace wrbf;

namespace {

Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(boost::multiprecision::cpp_int(s));
  return Rational(boost::multiprecision::cpp_int(s.substr(0, slash)),
                  boost::multiprecision::cpp_int(s.substr(slash + 1)));
}

struct Expected {
  int d, tau, nu;
  std::vector<std::string> coeffs;
};

// Repeated integration of r (1-r)^nu in sympy (tests/oracles/wendland_oracle.py), normalized to p(0) = 1.
const std::vector<Expected> kOracle = {
    {1, 0, 1, {"1", "-1"}},
    {1, 2, 3, {"1", "0", "-7", "0", "35", "-56", "35", "-8"}},
    {1, 3, 4, {"1", "0", "-9", "0", "42", "0", "-210", "384", "-315", "128", "-21"}},
    {1, 4, 5, {"1", "0", "-78/7", "0", "429/7", "0", "-1716/7", "0", "1287", "-18304/7", "2574", "-9984/7", "429",
               "-384/7"}},
    {2, 4, 6, {"1", "0", "-13", "0", "429/5", "0", "-429", "0", "3003", "-36608/5", "9009", "-6656", "3003", "-768",
               "429/5"}},
    {2, 5, 7, {"1", "0", "-136/9", "0", "340/3", "0", "-1768/3", "0", "24310/9", "0", "-19448", "452608/9", "-68068",
               "174080/3", "-97240/3", "34816/3", "-2431", "2048/9"}},
    {3, 3, 5, {"1", "0", "-11", "0", "66", "0", "-462", "1056", "-1155", "704", "-231", "32"}},
};

double fd_phi_derivative(const WendlandKernel& k, double r, double h = 1e-5) {
  return (k.phi(r + h) - k.phi(r - h)) / (2 * h);
}

}  // namespace

TEST_CASE("coefficients agree with the integral-definition oracle") {
  for (const auto& e : kOracle) {
    CAPTURE(e.d);
    CAPTURE(e.tau);
    const auto k = WendlandKernel::build(e.d, e.tau);
    CHECK(k.nu() == e.nu);
    CHECK(k.degree() == static_cast<int>(e.coeffs.size()) - 1);
    const auto& p = k.p_exact();
    REQUIRE(p.degree() == k.degree());
    for (std::size_t j = 0; j < e.coeffs.size(); ++j) {
      CAPTURE(j);
      CHECK(p.coeff(j) / p.coeff(0) == parse_rational(e.coeffs[j]));
    }
  }
}

TEST_CASE("nu follows floor(tau + d/2 + 1)") {
  CHECK(wendland_nu(1, 0) == 1);
  CHECK(wendland_nu(2, 0) == 2);
  CHECK(wendland_nu(3, 0) == 2);
  CHECK(wendland_nu(1, 4) == 5);
  CHECK(wendland_nu(2, 15) == 17);
  CHECK(wendland_nu(3, 3) == 5);
}

TEST_CASE("tau = 0 kernels are truncated powers") {
  const auto k1 = WendlandKernel::build(1, 0);
  const auto k2 = WendlandKernel::build(2, 0);
  const auto k3 = WendlandKernel::build(3, 0);
  for (double r : {0.0, 0.1, 0.37, 0.9, 1.0, 1.5}) {
    const double t = std::max(1.0 - r, 0.0);
    CHECK(k1.phi(r) == doctest::Approx(t).epsilon(1e-14));
    CHECK(k2.phi(r) == doctest::Approx(t * t).epsilon(1e-14));
    CHECK(k3.phi(r) == doctest::Approx(t * t).epsilon(1e-14));
  }
  CHECK_FALSE(k1.has_phi1());
  CHECK_THROWS_AS(k1.phi1(0.5), Error);
}

TEST_CASE("p and its first 2 tau derivatives vanish at r = 1") {
  for (int d = 1; d <= 3; ++d)
    for (int tau = 0; tau <= 6; ++tau) {
      CAPTURE(d);
      CAPTURE(tau);
      auto p = WendlandKernel::build(d, tau).p_exact();
      for (int k = 0; k <= 2 * tau; ++k) {
        CHECK(p(Rational(1)) == 0);
        p = p.derivative();
      }
    }
}

TEST_CASE("phi(0) = 1 and compact support") {
  for (double rho : {1.0, 2.5}) {
    const auto k = WendlandKernel::build(2, 4, rho);
    CHECK(k.phi(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(k.phi(rho) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(k.phi(rho * 1.01) == 0.0);
    CHECK(k.phi1(rho * 1.01) == 0.0);
    CHECK(k.phi2(rho * 1.01) == 0.0);
  }
}

TEST_CASE("phi1 and phi2 match finite differences") {
  for (double rho : {1.0, 1.7}) {
    const auto k = WendlandKernel::build(1, 4, rho);
    for (double u : {0.05, 0.2, 0.5, 0.8, 0.97}) {
      const double r = u * rho;
      CAPTURE(r);
      CHECK(k.phi1(r) == doctest::Approx(fd_phi_derivative(k, r) / r).epsilon(1e-7));
      const double h = 1e-5;
      const double dphi1 = (k.phi1(r + h) - k.phi1(r - h)) / (2 * h);
      CHECK(k.phi2(r) == doctest::Approx(dphi1 / r).epsilon(1e-6));
    }
  }
}

TEST_CASE("gradient and Hessian match finite differences") {
  const auto k = WendlandKernel::build(2, 5, 1.3);
  Eigen::Vector2d x(0.31, -0.44);
  const double h = 1e-6;
  const Eigen::VectorXd g = k.gradient(x);
  const Eigen::MatrixXd H = k.hessian(x);
  CHECK((H - H.transpose()).norm() == 0.0);
  for (int m = 0; m < 2; ++m) {
    Eigen::Vector2d e = Eigen::Vector2d::Zero();
    e[m] = h;
    CHECK(g[m] == doctest::Approx((k(x + e) - k(x - e)) / (2 * h)).epsilon(1e-7));
    const Eigen::VectorXd dg = (k.gradient(x + e) - k.gradient(x - e)) / (2 * h);
    for (int l = 0; l < 2; ++l) CHECK(H(l, m) == doctest::Approx(dg[l]).epsilon(1e-6));
  }
  // smooth at the origin
  const Eigen::MatrixXd H0 = k.hessian(Eigen::Vector2d::Zero());
  CHECK(H0(0, 0) == doctest::Approx(k.phi1(0.0)));
  CHECK(H0(0, 1) == 0.0);
  CHECK(k.gradient(Eigen::Vector2d::Zero()).norm() == 0.0);
}

TEST_CASE("argument validation and degree cap") {
  CHECK_THROWS_AS(WendlandKernel::build(0, 2), Error);
  CHECK_THROWS_AS(WendlandKernel::build(1, -1), Error);
  CHECK_THROWS_AS(WendlandKernel::build(1, 2, 0.0), Error);
  try {
    WendlandKernel::build(1, 40);
    FAIL("expected the degree cap to trigger");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::out_of_range);
  }
  CHECK_NOTHROW(WendlandKernel::build(2, 15));
  const auto k = WendlandKernel::build(2, 3);
  CHECK_THROWS_AS(k.phi(-0.1), Error);
  CHECK_THROWS_AS(k(Eigen::Vector3d::Zero()), Error);
}

TEST_CASE("rational helpers") {
  RationalPolynomial p({Rational(0), Rational(3), Rational(-2)});
  CHECK(p.divide_by_r().coeffs() == std::vector<Rational>{Rational(3), Rational(-2)});
  CHECK_THROWS(RationalPolynomial({Rational(1), Rational(1)}).divide_by_r());
  CHECK(to_string(Rational(-78, 7)) == "-78/7");
  CHECK(horner({1.0, 2.0, 3.0}, 2.0) == 17.0);
}

TEST_CASE("closed-form values") {
  const auto k = WendlandKernel::build(1, 2);
  CHECK(k.phi(0.3) == doctest::Approx(std::pow(0.7, 5) * 3.22).epsilon(1e-14));
  // unnormalized tau = 0 value: (1 - 0.5)^nu
  const auto k0 = WendlandKernel::build(1, 0);
  CHECK(static_cast<double>(k0.p_exact()(Rational(1, 2))) == 0.5);
}

TEST_CASE("derivative kernels at zero are the scaled constant terms") {
  for (double rho : {1.0, 2.0}) {
    const auto k = WendlandKernel::build(2, 4, rho);
    const double c1 = static_cast<double>(k.p1_exact().coeff(0)) / k.normalizer() / (rho * rho);
    const double c2 = static_cast<double>(k.p2_exact().coeff(0)) / k.normalizer() / std::pow(rho, 4);
    CHECK(k.phi1(0.0) == doctest::Approx(c1).epsilon(1e-14));
    CHECK(k.phi2(0.0) == doctest::Approx(c2).epsilon(1e-14));
  }
}

TEST_CASE("finite-difference oracles at fixed points") {
  const auto k12 = WendlandKernel::build(1, 2);
  const double h = 1e-6;
  CHECK(std::abs(k12.phi1(0.5) - (k12.phi(0.5 + h) - k12.phi(0.5 - h)) / (2 * h) / 0.5) <= 1e-8);

  const auto k24 = WendlandKernel::build(2, 4);
  const double r = 0.4, e = 1e-5;
  // phi1 is checked against differences of phi above
  const double nested = (k24.phi1(r + e) - k24.phi1(r - e)) / (2 * e) / r;
  CHECK(std::abs(k24.phi2(r) - nested) <= 1e-7 * std::max(1.0, std::abs(k24.phi2(r))));
  const double p1_fd = (k24.phi(r + 1e-6) - k24.phi(r - 1e-6)) / 2e-6 / r;
  CHECK(std::abs(k24.phi1(r) - p1_fd) <= 1e-7 * std::max(1.0, std::abs(p1_fd)));

  const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.3);
  const double g = k12.gradient(x)[0];
  CHECK(std::abs(g - (k12(x.array() + h) - k12(x.array() - h)) / (2 * h)) <= 1e-8);
}

TEST_CASE("derivatives vanish outside the support and have exact parity") {
  const auto k = WendlandKernel::build(2, 4, 0.8);
  const Eigen::Vector2d far(0.7, 0.5);
  CHECK(k.phi(far.norm()) == 0.0);
  CHECK(k.gradient(far).isZero(0.0));
  CHECK(k.hessian(far).isZero(0.0));
  CHECK(k.phi1(0.8) == 0.0);
  CHECK(k.phi2(0.9) == 0.0);
  const Eigen::Vector2d x(0.2, -0.1);
  CHECK(k.gradient(-x) == -k.gradient(x));
  CHECK(k.hessian(-x) == k.hessian(x));
  const Eigen::MatrixXd H0 = k.hessian(Eigen::Vector2d::Zero());
  CHECK(H0 == k.phi1(0.0) * Eigen::MatrixXd::Identity(2, 2));
}
