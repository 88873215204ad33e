#include "modvar/spectral.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <map>
#include <mutex>

#include "modvar/error.hpp"
#include "modvar/fft.hpp"
#include "modvar/grid_ops.hpp"
#include "modvar/kernels.hpp"
#include "modvar/kummer.hpp"

namespace modvar {

const char* to_string(EigenMethod method) {
  switch (method) {
    case EigenMethod::kummer_shoot: return "kummer_shoot";
    case EigenMethod::brute_force: return "brute_force";
    case EigenMethod::perturbative: return "perturbative";
  }
  return "?";
}

double boundary_mismatch(double mu, const ModularScale& scale) {
  require(std::isfinite(mu), ErrorCode::non_finite, "boundary_mismatch: mu is not finite");
  const double u = 0.5;
  const double a = -kPi * mu / 2.0 + 0.25;
  const double b = 0.5;
  const double z = 2.0 * kPi * u * u;
  const double m = kummer_m(a, b, z);
  const double dm = kummer_m_derivative(a, b, z);
  const double d_du = std::exp(-kPi * u * u) * (-2.0 * kPi * u * m + 4.0 * kPi * u * dm);
  return d_du / scale.ell();
}

namespace {

double refine_root(double lo, double hi, double tolerance) {
  const ModularScale unit(1.0);
  auto f = [&](double mu) { return boundary_mismatch(mu, unit); };
  auto tol = [tolerance](double a, double b) { return std::abs(b - a) <= tolerance; };
  std::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, max_iter);
  require(max_iter < 200, ErrorCode::no_convergence, "root refinement did not converge");
  return 0.5 * (a + b);
}

}  // namespace

std::vector<double> shooting_spectrum(int count, double tolerance) {
  require(count >= 1, ErrorCode::invalid_argument, "shooting_spectrum: count must be positive");
  require(tolerance >= 1e-12, ErrorCode::invalid_argument,
          "shooting_spectrum: tolerance must be >= 1e-12");
  const ModularScale unit(1.0);
  std::vector<double> roots;
  const double step = 0.01;
  double lo = 0.0;
  double f_lo = boundary_mismatch(lo, unit);
  for (int i = 1; i <= 5000 && static_cast<int>(roots.size()) < count; ++i) {
    const double hi = i * step;
    const double f_hi = boundary_mismatch(hi, unit);
    if (f_hi == 0.0) {
      roots.push_back(hi);
    } else if (f_lo * f_hi < 0.0) {
      roots.push_back(refine_root(lo, hi, tolerance));
    }
    lo = hi;
    f_lo = f_hi;
  }
  require(static_cast<int>(roots.size()) == count, ErrorCode::bracket_failure,
          "shooting_spectrum: fewer roots than requested below mu = 50");
  return roots;
}

EigenSolveReport solve_c(double tolerance) {
  require(tolerance >= 1e-12, ErrorCode::invalid_argument, "solve_c: tolerance must be >= 1e-12");
  static std::mutex mutex;
  static std::map<double, EigenSolveReport> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(tolerance); it != cache.end()) return it->second;
  }

  const ModularScale unit(1.0);
  const double lo = perturbative_c() - 0.02;
  const double hi = perturbative_c() + 0.02;
  require(boundary_mismatch(lo, unit) * boundary_mismatch(hi, unit) < 0.0,
          ErrorCode::bracket_failure, "solve_c: no sign change of the boundary mismatch");

  EigenSolveReport report;
  report.method = EigenMethod::kummer_shoot;
  report.c = refine_root(lo, hi, tolerance);
  report.residual = std::abs(boundary_mismatch(report.c, unit));
  report.mu_spectrum_head = shooting_spectrum(4, tolerance);
  report.mu_spectrum_head.front() = report.c;

  std::lock_guard lock(mutex);
  cache.emplace(tolerance, report);
  return report;
}

double perturbative_c() { return 7.0 / 90.0; }

namespace {

class CellOperator {
 public:
  CellOperator(const GridSpec& grid, const ModularScale& scale)
      : np2_(observable_values(grid, Observable::n_p, scale)),
        xb2_(observable_values(grid, Observable::x_bar, scale)) {
    const double ell2 = scale.ell() * scale.ell();
    for (auto& v : np2_) v *= v;
    for (auto& v : xb2_) v = v * v / ell2;
    precond_.resize(np2_.size());
    for (std::size_t i = 0; i < np2_.size(); ++i) precond_[i] = 1.0 / (np2_[i] + 1.0 / 12.0);
  }

  void apply(std::span<const cplx> in, std::span<cplx> out) const {
    std::copy(in.begin(), in.end(), out.begin());
    fft::forward(out);
    kernels::scale_pointwise(out, np2_);
    fft::inverse(out);
    for (std::size_t i = 0; i < in.size(); ++i) out[i] += xb2_[i] * in[i];
  }

  void precondition(std::span<const cplx> in, std::span<cplx> out) const {
    std::copy(in.begin(), in.end(), out.begin());
    fft::forward(out);
    kernels::scale_pointwise(out, precond_);
    fft::inverse(out);
  }

 private:
  std::vector<double> np2_;
  std::vector<double> xb2_;
  std::vector<double> precond_;
};

double norm2(std::span<const cplx> v) { return std::sqrt(kernels::inner(v, v).real()); }

// Solves A x = b by preconditioned conjugate gradients; returns iterations.
int solve_cg(const CellOperator& op, std::span<const cplx> b, std::span<cplx> x, double rel_tol,
             int max_iter) {
  const std::size_t n = b.size();
  std::vector<cplx> r(b.begin(), b.end()), z(n), p(n), ap(n);
  std::fill(x.begin(), x.end(), cplx{});
  const double b_norm = norm2(b);
  if (b_norm == 0.0) return 0;
  op.precondition(r, z);
  p = z;
  double rz = kernels::inner(r, z).real();
  for (int it = 1; it <= max_iter; ++it) {
    op.apply(p, ap);
    const double alpha = rz / kernels::inner(p, ap).real();
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    if (norm2(r) <= rel_tol * b_norm) return it;
    op.precondition(r, z);
    const double rz_new = kernels::inner(r, z).real();
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw Error(ErrorCode::no_convergence, "brute_force_c: conjugate gradients did not converge");
}

void normalize(std::span<cplx> v) {
  const double n = norm2(v);
  for (auto& x : v) x /= n;
}

}  // namespace

EigenSolveReport brute_force_c(int periods, int points_per_period,
                               const BruteForceOptions& options) {
  require(periods >= 8, ErrorCode::invalid_argument, "brute_force_c: periods must be >= 8");
  require(points_per_period >= 32, ErrorCode::invalid_argument,
          "brute_force_c: points_per_period must be >= 32");
  require(options.eigenvalues >= 1, ErrorCode::invalid_argument,
          "brute_force_c: eigenvalues must be >= 1");

  const ModularScale scale(1.0);
  const GridSpec grid = GridSpec::commensurate(0.0, 1.0, static_cast<std::size_t>(periods),
                                               static_cast<std::size_t>(points_per_period));
  const CellOperator op(grid, scale);
  const std::size_t n = grid.points();
  const std::vector<double> xbar = observable_values(grid, Observable::x_bar, scale);

  const int wanted = options.eigenvalues;
  const int block = wanted == 1 ? 1 : wanted + 2;

  // Cell-periodic start vectors keep the iteration inside the p_bar = 0
  // fiber; every fiber carries the same spectrum.
  std::vector<std::vector<cplx>> v(block, std::vector<cplx>(n));
  for (int k = 0; k < block; ++k)
    for (std::size_t i = 0; i < n; ++i)
      v[k][i] = std::exp(-kPi * xbar[i] * xbar[i]) * std::pow(xbar[i], k);

  EigenSolveReport report;
  report.method = EigenMethod::brute_force;
  std::vector<std::vector<cplx>> w(block, std::vector<cplx>(n)), aw(block, std::vector<cplx>(n));
  std::vector<double> theta(block, 0.0), residual(block, 0.0);
  bool converged = false;
  int it = 0;
  while (!converged && it < options.max_outer_iterations) {
    ++it;
    for (int k = 0; k < block; ++k)
      report.iterations += solve_cg(op, v[k], w[k], 1e-13, options.max_cg_iterations);
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < block; ++k) {
        for (int j = 0; j < k; ++j) {
          const cplx proj = kernels::inner(w[j], w[k]);
          for (std::size_t i = 0; i < n; ++i) w[k][i] -= proj * w[j][i];
        }
        normalize(w[k]);
      }
    }
    for (int k = 0; k < block; ++k) op.apply(w[k], aw[k]);

    // Rayleigh-Ritz on the block.
    Eigen::MatrixXcd h(block, block);
    for (int r = 0; r < block; ++r)
      for (int c = 0; c < block; ++c) h(r, c) = kernels::inner(w[r], aw[c]);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ritz(h);
    const Eigen::MatrixXcd& u = ritz.eigenvectors();

    converged = true;
    std::vector<cplx> av(n);
    for (int k = 0; k < block; ++k) {
      std::fill(v[k].begin(), v[k].end(), cplx{});
      std::fill(av.begin(), av.end(), cplx{});
      for (int j = 0; j < block; ++j) {
        const cplx coeff = u(j, k);
        for (std::size_t i = 0; i < n; ++i) {
          v[k][i] += coeff * w[j][i];
          av[i] += coeff * aw[j][i];
        }
      }
      const double t = ritz.eigenvalues()(k);
      for (std::size_t i = 0; i < n; ++i) av[i] -= t * v[k][i];
      residual[k] = norm2(av);
      if (k < wanted) {
        converged = converged && std::abs(t - theta[k]) <= options.tolerance * t &&
                    residual[k] < 1e-7;
      }
      theta[k] = t;
    }
  }
  require(converged, ErrorCode::no_convergence,
          "brute_force_c: inverse iteration did not converge");

  report.c = theta[0];
  report.residual = residual[0];
  report.mu_spectrum_head.assign(theta.begin(), theta.begin() + wanted);
  const double scale_amp = 1.0 / std::sqrt(grid.dx());
  std::vector<cplx> amp(v[0]);
  for (auto& a : amp) a *= scale_amp;
  report.ground_state.emplace(grid, std::move(amp));
  return report;
}

}  // namespace modvar
