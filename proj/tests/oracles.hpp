#pragma once
// Independent reference computations for the unit tests. Nothing here calls the closed
// forms under test; integrals go through Boost's adaptive Gauss-Kronrod.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

inline long double lambda(long double x) { return std::fabs(x) * std::sqrt(1.0L + x * x); }

inline double factorial(int p) {
  double f = 1;
  for (int i = 2; i <= p; ++i) f *= i;
  return f;
}

/// int_0^t sin(alpha (t - tau)) e^{i beta tau} d tau by adaptive quadrature.
inline cplx time_integral(double alpha, double beta, double t) {
  using boost::math::quadrature::gauss_kronrod;
  const long double A = alpha, B = beta, T = t;
  auto re = [&](long double s) { return std::sin(A * (T - s)) * std::cos(B * s); };
  auto im = [&](long double s) { return std::sin(A * (T - s)) * std::sin(B * s); };
  return {static_cast<double>(gauss_kronrod<long double, 61>::integrate(re, 0.0L, T, 20, 1e-16L)),
          static_cast<double>(gauss_kronrod<long double, 61>::integrate(im, 0.0L, T, 20, 1e-16L))};
}

/// A_p on the torus at mode xi by running over all (2|A|)^p ordered tuples.
inline cplx torus_ap(const std::vector<std::int64_t>& A, int p, std::int64_t xi, double N, double sigma,
                     double t) {
  std::vector<std::int64_t> vals;
  for (auto a : A) {
    vals.push_back(a);
    vals.push_back(-a);
  }
  const double alpha = static_cast<double>(lambda(static_cast<long double>(xi)));
  std::vector<std::size_t> idx(static_cast<std::size_t>(p), 0);
  cplx sum{};
  while (true) {
    std::int64_t s = 0;
    long double b = 0;
    for (auto i : idx) {
      s += vals[i];
      b -= (vals[i] > 0 ? 1 : -1) * lambda(static_cast<long double>(vals[i]));
    }
    if (s == xi) sum += time_integral(alpha, static_cast<double>(b), t);
    std::size_t j = 0;
    while (j < idx.size() && ++idx[j] == vals.size()) idx[j++] = 0;
    if (j == idx.size()) break;
  }
  const double x = static_cast<double>(xi);
  return factorial(p) * x * x / alpha * std::pow(N, -p * sigma) * sum;
}

/// A_2 on the line at one xi in (0, 1). The ordered pairs (a, xi - a) with one factor in
/// [N, N+1] and the other in -[N, N+1] have a in [N + xi, N + 1] or a in [xi - N - 1, -N].
inline cplx line_a2(double N, double sigma, double t, double xi) {
  using boost::math::quadrature::gauss_kronrod;
  const double alpha = static_cast<double>(lambda(xi));
  auto piece = [&](double lo, double hi, bool imag) {
    auto f = [&](double a_) {
      const long double a = a_, b = xi - a;
      const long double beta = -((a > 0 ? 1 : -1) * lambda(a) + (b > 0 ? 1 : -1) * lambda(b));
      const long double A = alpha, T = t, B = beta;
      // the closed form written out term by term in long double; beta is far from +-alpha here
      const long double den = B * B - A * A;
      const long double re = -A / den * (std::cos(B * T) - std::cos(A * T));
      const long double im = (-A * std::sin(B * T) + B * std::sin(A * T)) / den;
      return static_cast<double>(imag ? im : re);
    };
    return gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-13);
  };
  const cplx I{piece(N + xi, N + 1.0, false) + piece(xi - N - 1.0, -N, false),
               piece(N + xi, N + 1.0, true) + piece(xi - N - 1.0, -N, true)};
  return 2.0 * xi * xi / alpha * std::pow(N, -2.0 * sigma) * I;
}

}  // namespace oracle
