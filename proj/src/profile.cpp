#include "tailwave/profile.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "tailwave/errors.hpp"

namespace tailwave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string fmt_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string fmt_amplitude(cplx a) {
  if (a.imag() == 0.0) return fmt_number(a.real());
  return fmt_number(a.real()) + (a.imag() < 0 ? "-" : "+") + fmt_number(std::abs(a.imag())) + "i";
}

}  // namespace

double smooth_cutoff(double r) {
  if (r <= 1.0) return 0.0;
  if (r >= 2.0) return 1.0;
  const double s = r - 1.0;
  return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double smooth_cutoff_derivative(double r) {
  if (r <= 1.0 || r >= 2.0) return 0.0;
  const double s = r - 1.0;
  return 30.0 * s * s * (1.0 - s) * (1.0 - s);
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n)
    throw Error(ErrorCode::InvalidModel, "spline needs at least two (r, V) samples");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw Error(ErrorCode::InvalidModel, "spline knots must increase");
  // Natural spline second derivatives via the tridiagonal system.
  m_.assign(n, 0.0);
  if (n == 2) return;
  std::vector<double> c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1];
    const double h1 = x_[i + 1] - x_[i];
    const double diag = 2.0 * (h0 + h1);
    const double rhs = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    const double denom = diag - h0 * c[i - 1];
    c[i] = h1 / denom;
    d[i] = (rhs - h0 * d[i - 1]) / denom;
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m_[i] = d[i] - c[i] * m_[i + 1];
    if (i == 1) break;
  }
}

double CubicSpline::operator()(double x) const {
  if (x < x_.front() || x > x_.back())
    throw Error(ErrorCode::Extrapolation,
                "r = " + fmt_number(x) + " outside table [" + fmt_number(x_.front()) + ", " +
                    fmt_number(x_.back()) + "]");
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  if (i + 1 >= x_.size()) i = x_.size() - 2;
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = (x - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

std::vector<double> CubicSpline::first_segment() const {
  const double h = x_[1] - x_[0];
  const double y0 = y_[0], y1 = y_[1], m0 = m_[0], m1 = m_[1];
  // S(x0 + s) = y0 + s*c1 + s^2 m0/2 + s^3 (m1 - m0)/(6h)
  const double c1 = (y1 - y0) / h - h * (2.0 * m0 + m1) / 6.0;
  return {y0, c1, m0 / 2.0, (m1 - m0) / (6.0 * h)};
}

RadialProfile RadialProfile::table(std::vector<double> r, std::vector<double> v, std::string path) {
  return {Table{CubicSpline(std::move(r), std::move(v)), std::move(path)}, 1.0};
}

cplx RadialProfile::operator()(double r) const {
  const double base = std::visit(
      Overloaded{
          [](const Zero&) { return 0.0; },
          [r](const Exponential& e) { return std::exp(-e.mu * r); },
          [r](const Gauss& g) { return std::exp(-(r / g.width) * (r / g.width)); },
          [r](const Table& t) { return t.spline(r); },
          [r](const CutoffInverseSquare&) { return r > 1.0 ? smooth_cutoff(r) / (r * r) : 0.0; },
          [r](const Indicator& d) { return (r >= d.lo && r <= d.hi) ? 1.0 : 0.0; },
          [r](const Bump& b) {
            const double s = (2.0 * r - b.lo - b.hi) / (b.hi - b.lo);
            if (std::abs(s) >= 1.0) return 0.0;
            return std::exp(1.0 - 1.0 / (1.0 - s * s));
          },
          [](const PowerTail&) { return std::numeric_limits<double>::quiet_NaN(); },
      },
      family_);
  if (const auto* p = std::get_if<PowerTail>(&family_)) {
    if (r <= 1.0) return 0.0;
    return amplitude_ * smooth_cutoff(r) * std::pow(cplx(r), p->exponent);
  }
  return amplitude_ * base;
}

bool RadialProfile::is_zero() const {
  return std::holds_alternative<Zero>(family_) || amplitude_ == cplx(0.0);
}

bool RadialProfile::is_real() const {
  if (amplitude_.imag() != 0.0) return false;
  if (const auto* p = std::get_if<PowerTail>(&family_)) return p->exponent.imag() == 0.0;
  return true;
}

std::vector<cplx> RadialProfile::taylor(int m) const {
  std::vector<cplx> c(static_cast<std::size_t>(std::max(m, 1)), 0.0);
  std::visit(Overloaded{
                 [](const Zero&) {},
                 [&](const Exponential& e) {
                   double term = 1.0;
                   for (int k = 0; k < m; ++k) {
                     c[k] = term;
                     term *= -e.mu / (k + 1);
                   }
                 },
                 [&](const Gauss& g) {
                   double term = 1.0;
                   const double w2 = g.width * g.width;
                   for (int k = 0; 2 * k < m; ++k) {
                     c[2 * k] = term;
                     term *= -1.0 / (w2 * (k + 1));
                   }
                 },
                 [&](const Table& t) {
                   if (t.spline.front() != 0.0)
                     throw Error(ErrorCode::Extrapolation,
                                 "tabulated potential must start at r = 0 for the origin series");
                   const auto seg = t.spline.first_segment();
                   for (int k = 0; k < m && k < 4; ++k) c[k] = seg[k];
                 },
                 [](const CutoffInverseSquare&) {},
                 [](const Indicator&) {},
                 [](const Bump&) {},
                 [](const PowerTail&) {},
             },
             family_);
  for (auto& x : c) x *= amplitude_;
  return c;
}

double RadialProfile::taylor_radius() const {
  return std::visit(Overloaded{
                        [](const Zero&) { return kInf; },
                        [](const Exponential&) { return kInf; },
                        [](const Gauss&) { return kInf; },
                        [](const Table& t) { return t.spline.knots()[1]; },
                        [](const CutoffInverseSquare&) { return 1.0; },
                        [](const Indicator& d) { return d.lo; },
                        [](const Bump& b) { return b.lo; },
                        [](const PowerTail&) { return 1.0; },
                    },
                    family_);
}

std::vector<double> RadialProfile::breakpoints() const {
  return std::visit(Overloaded{
                        [](const Zero&) { return std::vector<double>{}; },
                        [](const Exponential&) { return std::vector<double>{}; },
                        [](const Gauss&) { return std::vector<double>{}; },
                        [](const Table& t) { return t.spline.knots(); },
                        [](const CutoffInverseSquare&) { return std::vector<double>{1.0, 2.0}; },
                        [](const Indicator& d) { return std::vector<double>{d.lo, d.hi}; },
                        [](const Bump& b) { return std::vector<double>{b.lo, b.hi}; },
                        [](const PowerTail&) { return std::vector<double>{1.0, 2.0}; },
                    },
                    family_);
}

double RadialProfile::support_end() const {
  if (is_zero()) return 0.0;
  return std::visit(Overloaded{
                        [](const Indicator& d) { return d.hi; },
                        [](const Bump& b) { return b.hi; },
                        [](const auto&) { return kInf; },
                    },
                    family_);
}

std::optional<std::pair<cplx, cplx>> RadialProfile::power_law_tail() const {
  if (const auto* p = std::get_if<PowerTail>(&family_)) return std::pair{amplitude_, p->exponent};
  if (std::holds_alternative<CutoffInverseSquare>(family_)) return std::pair{amplitude_, cplx(-2.0)};
  return std::nullopt;
}

std::string RadialProfile::describe() const {
  const std::string a = fmt_amplitude(amplitude_);
  return std::visit(
      Overloaded{
          [](const Zero&) { return std::string("none"); },
          [&](const Exponential& e) { return "yukawa(" + a + "," + fmt_number(e.mu) + ")"; },
          [&](const Gauss& g) { return "gauss(" + a + "," + fmt_number(g.width) + ")"; },
          [&](const Table& t) { return "table(" + t.path + ")"; },
          [&](const CutoffInverseSquare&) { return "cutoff_inverse_square(" + a + ")"; },
          [&](const Indicator& d) {
            return "indicator(" + fmt_number(d.lo) + "," + fmt_number(d.hi) + "," + a + ")";
          },
          [&](const Bump& b) {
            return "bump(" + fmt_number(b.lo) + "," + fmt_number(b.hi) + "," + a + ")";
          },
          [&](const PowerTail& p) {
            return "power_tail(" + a + "," + fmt_amplitude(p.exponent) + ")";
          },
      },
      family_);
}

namespace {

std::vector<double> parse_args(const std::string& text, const std::string& name, std::size_t lo,
                               std::size_t hi) {
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw Error(ErrorCode::ConfigParse, "malformed profile '" + text + "'");
  std::vector<double> args;
  std::stringstream ss(text.substr(open + 1, close - open - 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      args.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigParse, "bad number '" + item + "' in " + name);
    }
  }
  if (args.size() < lo || args.size() > hi)
    throw Error(ErrorCode::ConfigParse, "wrong argument count for " + name);
  return args;
}

}  // namespace

RadialProfile parse_profile(const std::string& raw) {
  std::string text;
  for (char ch : raw)
    if (!std::isspace(static_cast<unsigned char>(ch))) text += ch;
  const std::string name = text.substr(0, text.find('('));
  if (name == "none" || name == "0") return RadialProfile::none();
  if (name == "yukawa") {
    const auto a = parse_args(text, name, 2, 2);
    return RadialProfile::yukawa(a[0], a[1]);
  }
  if (name == "gauss") {
    const auto a = parse_args(text, name, 2, 2);
    if (a[1] <= 0) throw Error(ErrorCode::ConfigParse, "gauss width must be positive");
    return RadialProfile::gauss(a[0], a[1]);
  }
  if (name == "cutoff_inverse_square") {
    const auto a = parse_args(text, name, 1, 1);
    return RadialProfile::cutoff_inverse_square(a[0]);
  }
  if (name == "indicator" || name == "bump") {
    const auto a = parse_args(text, name, 2, 3);
    if (!(a[1] > a[0])) throw Error(ErrorCode::ConfigParse, name + " needs lo < hi");
    const double amp = a.size() == 3 ? a[2] : 1.0;
    return name == "bump" ? RadialProfile::bump(a[0], a[1], amp)
                          : RadialProfile::indicator(a[0], a[1], amp);
  }
  if (name == "table") {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos)
      throw Error(ErrorCode::ConfigParse, "malformed table profile");
    const std::string path = raw.substr(raw.find('(') + 1, raw.rfind(')') - raw.find('(') - 1);
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigParse, "cannot read potential table '" + path + "'");
    std::vector<double> r, v;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      for (auto& ch : line)
        if (ch == ',') ch = ' ';
      std::istringstream ls(line);
      double x, y;
      if (!(ls >> x >> y)) throw Error(ErrorCode::ConfigParse, "bad table line '" + line + "'");
      r.push_back(x);
      v.push_back(y);
    }
    return RadialProfile::table(std::move(r), std::move(v), path);
  }
  throw Error(ErrorCode::ConfigParse, "unknown profile '" + raw + "'");
}

}  // namespace tailwave
