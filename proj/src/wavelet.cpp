#include "roughlift/wavelet.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <iomanip>
#include <ostream>

#include "roughlift/error.hpp"

namespace roughlift {

namespace {

using Complex = std::complex<double>;

constexpr double kCascadeTolerance = 1e-7;
constexpr int kCascadeMaxSweeps = 200;

int vanishing_moments_of(WaveletKind kind) { return kind == WaveletKind::DB6 ? 6 : 8; }

// Hoelder exponents of the Daubechies scaling functions (Daubechies, Ten
// Lectures, Table 7.3).
double regularity_of(WaveletKind kind) { return kind == WaveletKind::DB6 ? 2.189 : 2.760; }

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// Cubic Hermite interpolation on [0,1] with node spacing h.
double hermite(double y0, double m0, double y1, double m1, double t, double h) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * m1;
}

// Cumulative integral with the endpoint-corrected trapezoid rule.
Eigen::VectorXd cumulative_integral(const Eigen::VectorXd& f, const Eigen::VectorXd& df, double h) {
  Eigen::VectorXd out(f.size());
  out(0) = 0.0;
  for (Eigen::Index j = 0; j + 1 < f.size(); ++j)
    out(j + 1) = out(j) + 0.5 * h * (f(j) + f(j + 1)) + h * h / 12.0 * (df(j) - df(j + 1));
  return out;
}

Eigen::VectorXd centered_difference(const Eigen::VectorXd& f, double h) {
  const Eigen::Index n = f.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double left = j > 0 ? f(j - 1) : 0.0;
    const double right = j + 1 < n ? f(j + 1) : 0.0;
    out(j) = (right - left) / (2.0 * h);
  }
  return out;
}

}  // namespace

std::string_view to_string(WaveletKind kind) { return kind == WaveletKind::DB6 ? "db6" : "db8"; }

WaveletKind parse_wavelet(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "db6") return WaveletKind::DB6;
  if (lower == "db8") return WaveletKind::DB8;
  throw Error(ErrorCode::ConfigMismatch, "unknown wavelet '" + std::string(name) + "'");
}

Eigen::VectorXd daubechies_filter(int vanishing_moments) {
  const int N = vanishing_moments;
  if (N < 1) throw Error(ErrorCode::ConfigMismatch, "vanishing moments must be positive");

  // Roots in y = sin^2(w/2) of P(y) = sum_k C(N-1+k, k) y^k.
  std::vector<Complex> z_roots;
  if (N > 1) {
    const int deg = N - 1;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
    const double lead = binomial(2 * N - 2, deg);
    for (int i = 0; i < deg; ++i) companion(0, i) = -binomial(N - 1 + deg - 1 - i, deg - 1 - i) / lead;
    for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    for (int i = 0; i < deg; ++i) {
      const Complex y = solver.eigenvalues()(i);
      // y = (2 - z - 1/z)/4  =>  z^2 - (2 - 4y) z + 1 = 0; keep the root inside the unit circle.
      const Complex b = 1.0 - 2.0 * y;
      const Complex disc = std::sqrt(b * b - 1.0);
      const Complex z1 = b + disc;
      const Complex z2 = b - disc;
      z_roots.push_back(std::abs(z1) < 1.0 ? z1 : z2);
    }
  }

  // (1 + z)^N prod_j (z - z_j), coefficients in ascending powers.
  std::vector<Complex> poly{1.0};
  auto multiply = [&poly](Complex root_term, Complex lead_term) {
    std::vector<Complex> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] += root_term * poly[i];
      next[i + 1] += lead_term * poly[i];
    }
    poly = std::move(next);
  };
  for (int i = 0; i < N; ++i) multiply(1.0, 1.0);
  for (const auto& z : z_roots) multiply(-z, 1.0);

  const auto taps = static_cast<Eigen::Index>(poly.size());
  Eigen::VectorXd h(taps);
  for (Eigen::Index i = 0; i < taps; ++i) h(i) = poly[static_cast<std::size_t>(taps - 1 - i)].real();
  h *= std::sqrt(2.0) / h.sum();
  return h;
}

WaveletFamily::WaveletFamily(WaveletKind kind, int refine_depth)
    : kind_(kind),
      refine_depth_(refine_depth),
      vanishing_moments_(vanishing_moments_of(kind)),
      regularity_(regularity_of(kind)) {
  if (refine_depth < 8 || refine_depth > 14)
    throw Error(ErrorCode::ResourceLimit,
                "refine depth " + std::to_string(refine_depth) + " outside [8, 14]");

  filter_ = std::sqrt(2.0) * daubechies_filter(vanishing_moments_);
  const int last = static_cast<int>(filter_.size()) - 1;  // support of phi is [0, last]
  const Eigen::Index per_unit = Eigen::Index{1} << refine_depth;
  grid_size_ = last * per_unit + 1;
  const double h = 1.0 / static_cast<double>(per_unit);

  // phi at the integers: eigenvector of (a_{2j-m}) for eigenvalue 1 with sum 1.
  const int interior = last - 1;
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(interior, interior);
  for (int j = 1; j <= interior; ++j)
    for (int m = 1; m <= interior; ++m) {
      const int idx = 2 * j - m;
      if (idx >= 0 && idx <= last) system(j - 1, m - 1) = filter_(idx);
    }
  system -= Eigen::MatrixXd::Identity(interior, interior);
  system.row(interior - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(interior);
  rhs(interior - 1) = 1.0;
  const Eigen::VectorXd at_integers = system.fullPivLu().solve(rhs);

  // Cascade sweeps v <- sum_k a_k v(2x - k) on the dyadic grid, started from
  // the piecewise-linear interpolant of the integer values.
  Eigen::VectorXd phi(grid_size_);
  for (Eigen::Index m = 0; m < grid_size_; ++m) {
    const Eigen::Index j = m / per_unit;
    const double t = static_cast<double>(m % per_unit) * h;
    const double left = (j >= 1 && j <= interior) ? at_integers(j - 1) : 0.0;
    const double right = (j + 1 >= 1 && j + 1 <= interior) ? at_integers(j) : 0.0;
    phi(m) = (1.0 - t) * left + t * right;
  }
  Eigen::VectorXd next(grid_size_);
  cascade_residual_ = 1.0;
  for (int sweep = 0; sweep < kCascadeMaxSweeps && cascade_residual_ > 1e-14; ++sweep) {
    for (Eigen::Index m = 0; m < grid_size_; ++m) {
      double acc = 0.0;
      for (int k = 0; k <= last; ++k) {
        const Eigen::Index src = 2 * m - k * per_unit;
        if (src >= 0 && src < grid_size_) acc += filter_(k) * phi(src);
      }
      next(m) = acc;
    }
    cascade_residual_ = (next - phi).cwiseAbs().maxCoeff();
    phi.swap(next);
  }
  if (!(cascade_residual_ < kCascadeTolerance))
    throw Error(ErrorCode::CascadeDiverged,
                "cascade residual " + std::to_string(cascade_residual_) + " after sweeps");

  // psi(x) = sum_k (-1)^k a_{last-k} phi(2x - k)
  Eigen::VectorXd psi(grid_size_);
  for (Eigen::Index m = 0; m < grid_size_; ++m) {
    double acc = 0.0;
    for (int k = 0; k <= last; ++k) {
      const Eigen::Index src = 2 * m - k * per_unit;
      if (src >= 0 && src < grid_size_) acc += ((k % 2 == 0) ? 1.0 : -1.0) * filter_(last - k) * phi(src);
    }
    psi(m) = acc;
  }

  // Integer shift centring the support; independent of the refine depth.
  const double shift = static_cast<double>(last / 2);
  support_lo_ = -shift;
  support_hi_ = static_cast<double>(last) - shift;

  auto fill = [h](Eigen::VectorXd (&out)[4], const Eigen::VectorXd& value) {
    out[static_cast<int>(Order::Value)] = value;
    out[static_cast<int>(Order::Derivative)] = centered_difference(value, h);
    out[static_cast<int>(Order::Primitive)] =
        cumulative_integral(value, out[static_cast<int>(Order::Derivative)], h);
    out[static_cast<int>(Order::SecondPrimitive)] =
        cumulative_integral(out[static_cast<int>(Order::Primitive)], value, h);
  };
  fill(tables_[static_cast<int>(Basis::Father)], phi);
  fill(tables_[static_cast<int>(Basis::Mother)], psi);
}

double WaveletFamily::grid_point(Eigen::Index j) const {
  return support_lo_ + std::ldexp(static_cast<double>(j), -refine_depth_);
}

const Eigen::VectorXd& WaveletFamily::table(Basis basis, Order order) const {
  return tables_[static_cast<int>(basis)][static_cast<int>(order)];
}

double WaveletFamily::eval(Basis basis, Order order, double x) const {
  const auto& tabs = tables_[static_cast<int>(basis)];
  if (x <= support_lo_) return 0.0;
  const Eigen::Index last = grid_size_ - 1;
  if (x >= support_hi_) {
    switch (order) {
      case Order::Derivative:
      case Order::Value: return 0.0;
      case Order::Primitive: return tabs[2](last);
      case Order::SecondPrimitive: return tabs[3](last) + tabs[2](last) * (x - support_hi_);
    }
  }
  const double u = std::ldexp(x - support_lo_, refine_depth_);
  const auto j = std::min(static_cast<Eigen::Index>(u), last - 1);
  const double t = u - static_cast<double>(j);
  const double h = std::ldexp(1.0, -refine_depth_);
  const int o = static_cast<int>(order);
  if (order == Order::Derivative) return (1.0 - t) * tabs[o](j) + t * tabs[o](j + 1);
  const auto& slope = tabs[o - 1];
  return hermite(tabs[o](j), slope(j), tabs[o](j + 1), slope(j + 1), t, h);
}

double WaveletFamily::regularity_margin(const SobolevParams& params) const {
  return regularity_ - std::abs(params.alpha - 1.0 - 1.0 / params.p);
}

WaveletFamily build_family(WaveletKind kind, int refine_depth) {
  return WaveletFamily(kind, refine_depth);
}

const WaveletFamily& default_family() {
  static const WaveletFamily family(WaveletKind::DB8, 12);
  return family;
}

std::pair<std::int64_t, std::int64_t> translation_range(const WaveletFamily& family, int n,
                                                        double a, double b) {
  const double scale = std::ldexp(1.0, n);
  const auto k_min = static_cast<std::int64_t>(std::floor(a * scale - family.support_hi())) + 1;
  const auto k_max = static_cast<std::int64_t>(std::ceil(b * scale - family.support_lo())) - 1;
  return {k_min, k_max};
}

CoefficientPyramid make_pyramid(const WaveletFamily& family, double a, double b, int top_level) {
  CoefficientPyramid pyr;
  pyr.window_lo = a;
  pyr.window_hi = b;
  auto make_level = [&](int n) {
    const auto [k_min, k_max] = translation_range(family, n, a, b);
    CoefficientLevel level;
    level.k_min = k_min;
    level.coeffs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k_max - k_min + 1));
    return level;
  };
  pyr.base = make_level(0);
  for (int n = 0; n <= top_level; ++n) pyr.levels.push_back(make_level(n));
  return pyr;
}

namespace {

// Cells of `path` meeting the support of the scaled basis function at idx.
std::pair<Eigen::Index, Eigen::Index> cell_range(const SampledPath& path, const DyadicIndex& idx,
                                                 const WaveletFamily& family) {
  const double x = idx.x();
  const double lo = x + std::ldexp(family.support_lo(), -idx.n);
  const double hi = x + std::ldexp(family.support_hi(), -idx.n);
  const double inv_h = std::ldexp(1.0, path.level());
  const auto first = std::max<Eigen::Index>(
      0, static_cast<Eigen::Index>(std::floor((lo - path.t0()) * inv_h)));
  const auto last = std::min<Eigen::Index>(
      path.cells(), static_cast<Eigen::Index>(std::ceil((hi - path.t0()) * inv_h)));
  return {first, last};
}

// Primitives of the scaled basis function 2^{n/2} b(2^n(y - x)).
struct ScaledBasis {
  ScaledBasis(const WaveletFamily& family, Basis basis, int n, double x)
      : family(family), basis(basis), n(n), x(x),
        first_scale(std::pow(2.0, -0.5 * n)), second_scale(std::pow(2.0, -1.5 * n)) {}

  double primitive(Order order, double y) const {
    const double arg = std::ldexp(y - x, n);
    const double scale = order == Order::Primitive ? first_scale : second_scale;
    return scale * family.eval(basis, order, arg);
  }

  const WaveletFamily& family;
  Basis basis;
  int n;
  double x;
  double first_scale;
  double second_scale;
};

}  // namespace

double pair_derivative(const SampledPath& w, const DyadicIndex& idx, const WaveletFamily& family,
                       Basis basis) {
  const auto [first, last] = cell_range(w, idx, family);
  if (first >= last) return 0.0;
  const ScaledBasis b{family, basis, idx.n, idx.x()};
  const auto& v = w.values();
  const double inv_h = std::ldexp(1.0, w.level());
  double acc = 0.0;
  double prev = b.primitive(Order::Primitive, w.time(first));
  for (Eigen::Index i = first; i < last; ++i) {
    const double cur = b.primitive(Order::Primitive, w.time(i + 1));
    acc += (v(i + 1, 0) - v(i, 0)) * inv_h * (cur - prev);
    prev = cur;
  }
  return acc;
}

double pair_function(const SampledPath& f, const DyadicIndex& idx, const WaveletFamily& family,
                     Basis basis) {
  const auto [first, last] = cell_range(f, idx, family);
  if (first >= last) return 0.0;
  const ScaledBasis b{family, basis, idx.n, idx.x()};
  const auto& v = f.values();
  const double h = f.spacing();
  double acc = 0.0;
  double p_prev = b.primitive(Order::Primitive, f.time(first));
  double q_prev = b.primitive(Order::SecondPrimitive, f.time(first));
  for (Eigen::Index i = first; i < last; ++i) {
    const double t = f.time(i + 1);
    const double p_cur = b.primitive(Order::Primitive, t);
    const double q_cur = b.primitive(Order::SecondPrimitive, t);
    const double slope = (v(i + 1, 0) - v(i, 0)) / h;
    acc += v(i, 0) * (p_cur - p_prev) + slope * (h * p_cur - (q_cur - q_prev));
    p_prev = p_cur;
    q_prev = q_cur;
  }
  return acc;
}

int max_truncation_level(int sampling_level) { return sampling_level - 2; }

namespace {

template <typename Pairing>
CoefficientPyramid fill_pyramid(const SampledPath& path, const WaveletFamily& family, int N,
                                Pairing&& pairing) {
  if (path.dim() != 1)
    throw Error(ErrorCode::DimensionMismatch, "pyramid requires a scalar path");
  CoefficientPyramid pyr = make_pyramid(family, path.t0(), path.t1(), N);
  for (Eigen::Index i = 0; i < pyr.base.coeffs.size(); ++i)
    pyr.base.coeffs(i) = pairing(DyadicIndex{0, pyr.base.k_min + i}, Basis::Father);
  for (int n = 0; n <= N; ++n) {
    auto& level = pyr.levels[static_cast<std::size_t>(n)];
    for (Eigen::Index i = 0; i < level.coeffs.size(); ++i)
      level.coeffs(i) = pairing(DyadicIndex{n, level.k_min + i}, Basis::Mother);
  }
  return pyr;
}

}  // namespace

CoefficientPyramid function_pyramid(const SampledPath& f, const WaveletFamily& family, int N) {
  return fill_pyramid(f, family, N, [&](const DyadicIndex& idx, Basis basis) {
    return pair_function(f, idx, family, basis);
  });
}

CoefficientPyramid derivative_pyramid(const SampledPath& w, const WaveletFamily& family, int N) {
  return fill_pyramid(w, family, N, [&](const DyadicIndex& idx, Basis basis) {
    return pair_derivative(w, idx, family, basis);
  });
}

double lp_n_norm(const Eigen::Ref<const Eigen::VectorXd>& u, int n, double p) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) acc += std::pow(std::abs(u(i)), p);
  return std::pow(std::ldexp(acc, -n), 1.0 / p);
}

double besov_norm_coeffs(const CoefficientPyramid& pyramid, double s, double p) {
  double acc = std::pow(lp_n_norm(pyramid.base.coeffs, 0, p), p);
  for (int n = 0; n <= pyramid.top_level(); ++n) {
    const double scale = std::pow(2.0, n * (0.5 + s));
    acc += std::pow(lp_n_norm(scale * pyramid.levels[static_cast<std::size_t>(n)].coeffs, n, p), p);
  }
  return std::pow(acc, 1.0 / p);
}

double synthesize(const CoefficientPyramid& pyramid, const WaveletFamily& family, double t) {
  auto level_sum = [&](const CoefficientLevel& level, int n, Basis basis) {
    const double u = std::ldexp(t, n);
    const auto k_lo = std::max(level.k_min, static_cast<std::int64_t>(std::floor(u - family.support_hi())));
    const auto k_hi = std::min(level.k_max(), static_cast<std::int64_t>(std::ceil(u - family.support_lo())));
    double acc = 0.0;
    for (auto k = k_lo; k <= k_hi; ++k)
      acc += level.at(k) * family.eval(basis, Order::Value, u - static_cast<double>(k));
    return std::pow(2.0, n / 2.0) * acc;
  };
  double value = level_sum(pyramid.base, 0, Basis::Father);
  for (int n = 0; n <= pyramid.top_level(); ++n)
    value += level_sum(pyramid.levels[static_cast<std::size_t>(n)], n, Basis::Mother);
  return value;
}

void write_tabulation_csv(const WaveletFamily& family, std::ostream& out) {
  out << "grid,phi,psi,dpsi,Psi,Phi\n";
  out << std::setprecision(17);
  const auto& phi = family.table(Basis::Father, Order::Value);
  const auto& Phi = family.table(Basis::Father, Order::Primitive);
  const auto& psi = family.table(Basis::Mother, Order::Value);
  const auto& dpsi = family.table(Basis::Mother, Order::Derivative);
  const auto& Psi = family.table(Basis::Mother, Order::Primitive);
  for (Eigen::Index j = 0; j < family.grid_size(); ++j)
    out << family.grid_point(j) << ',' << phi(j) << ',' << psi(j) << ',' << dpsi(j) << ','
        << Psi(j) << ',' << Phi(j) << '\n';
}

}  // namespace roughlift
