#include "tailwave/exact_chain.hpp"

#include <cmath>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

namespace tailwave {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

// a + b sqrt(d)
struct Surd {
  cpp_rational a, b;
};

Surd mul(const Surd& x, const Surd& y, const cpp_int& d) {
  return {x.a * y.a + x.b * y.b * cpp_rational(d), x.a * y.b + x.b * y.a};
}

std::optional<Surd> inv(const Surd& x, const cpp_int& d) {
  const cpp_rational norm = x.a * x.a - x.b * x.b * cpp_rational(d);
  if (norm == 0) return std::nullopt;
  return Surd{x.a / norm, -x.b / norm};
}

double to_double(const Surd& x, const cpp_int& d) {
  return x.a.convert_to<double>() + x.b.convert_to<double>() * std::sqrt(d.convert_to<double>());
}

std::string format_rational(const cpp_rational& q) {
  std::ostringstream os;
  os << numerator(q);
  if (denominator(q) != 1) os << '/' << denominator(q);
  return os.str();
}

std::string format_surd(const Surd& x, const cpp_int& d) {
  if (x.b == 0 || d == 1) return format_rational(x.a + (d == 1 ? x.b : cpp_rational(0)));
  std::ostringstream os;
  if (x.a != 0) os << format_rational(x.a) << (x.b > 0 ? " + " : " - ");
  else if (x.b < 0) os << '-';
  const cpp_rational mag = x.b < 0 ? cpp_rational(-x.b) : x.b;
  if (mag != 1) os << format_rational(mag) << '*';
  os << "sqrt(" << d << ')';
  return os.str();
}

// Squarefree decomposition m = s^2 * d.
void squarefree(cpp_int m, cpp_int& s, cpp_int& d) {
  s = 1;
  d = 1;
  for (cpp_int p = 2; p * p <= m; ++p) {
    while (m % (p * p) == 0) {
      m /= p * p;
      s *= p;
    }
    if (m % p == 0) {
      m /= p;
      d *= p;
    }
  }
  d *= m;
}

}  // namespace

std::optional<ExactChain> exact_leading_chain(int n, std::int64_t alpha_num, std::int64_t alpha_den, int k) {
  if (alpha_den == 0 || k < 1 || k > 8) return std::nullopt;
  if (alpha_den < 0) {
    alpha_num = -alpha_num;
    alpha_den = -alpha_den;
  }
  // nu^2 = (n-2)^2/4 + p/q = N / D
  const cpp_int N = cpp_int(n - 2) * (n - 2) * alpha_den + 4 * cpp_int(alpha_num);
  const cpp_int D = 4 * cpp_int(alpha_den);
  if (N <= 0) return std::nullopt;
  cpp_int s, d;
  squarefree(N * D, s, d);
  // nu = (s / D) sqrt(d)
  const Surd nu = d == 1 ? Surd{cpp_rational(s, D), 0} : Surd{0, cpp_rational(s, D)};

  ExactChain out;
  out.d = d.convert_to<std::int64_t>();
  // f_j = re + i im; f_1 = -i (2 nu - 1)
  Surd re{0, 0}, im{-(2 * nu.a - 1), -2 * nu.b};
  for (int j = 1; j <= k; ++j) {
    if (j > 1) {
      const int jj = j - 1;
      // factor -2i (nu - 1/2 - jj) / (jj (2 nu - jj))
      const auto den = inv(Surd{cpp_rational(jj) * (2 * nu.a - jj), 2 * cpp_rational(jj) * nu.b}, d);
      if (!den) return std::nullopt;
      const Surd num{nu.a - cpp_rational(1, 2) - jj, nu.b};
      const Surd g = mul(num, *den, d);  // real factor; multiply by -2i
      const Surd nre = mul(g, im, d), nim = mul(g, re, d);
      re = Surd{2 * nre.a, 2 * nre.b};
      im = Surd{-2 * nim.a, -2 * nim.b};
    }
    out.values.emplace_back(to_double(re, d), to_double(im, d));
    const std::string rs = format_surd(re, d), is = format_surd(im, d);
    const bool rz = re.a == 0 && re.b == 0, iz = im.a == 0 && im.b == 0;
    if (rz && iz)
      out.symbolic.push_back("0");
    else if (iz)
      out.symbolic.push_back(rs);
    else if (rz)
      out.symbolic.push_back("(" + is + ")*i");
    else
      out.symbolic.push_back(rs + " + (" + is + ")*i");
  }
  return out;
}

}  // namespace tailwave
