#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace modvar {

using cplx = std::complex<double>;

/// Uniform periodic grid on [min, max) with cell-centred nodes
/// x_i = min + (i + 1/2) dx. Points must be a power of two >= 16.
class GridSpec {
 public:
  GridSpec(std::size_t points, double min, double max);

  /// Box of `periods` cells of length ell centred near `center`, with the
  /// box edges on modular cell boundaries (x = k ell - ell/2) so that no
  /// node sits on a jump of the modular position.
  static GridSpec commensurate(double center, double ell, std::size_t periods,
                               std::size_t points_per_period);

  std::size_t points() const { return points_; }
  double min() const { return min_; }
  double max() const { return max_; }
  double box() const { return max_ - min_; }
  double dx() const { return box() / static_cast<double>(points_); }
  double node(std::size_t i) const { return min_ + (static_cast<double>(i) + 0.5) * dx(); }
  std::vector<double> nodes() const;

  double dk() const;
  /// Angular wavenumber belonging to FFT slot `index`.
  double momentum(std::size_t index) const;
  double nyquist() const;

  /// Number of ell-periods in the box when it is an integer multiple of
  /// ell (relative tolerance 1e-9), nullopt otherwise.
  std::optional<std::int64_t> periods_of(double ell) const;

  bool operator==(const GridSpec&) const = default;

 private:
  std::size_t points_;
  double min_;
  double max_;
};

/// Sampled single-particle amplitudes, unit norm under sum |psi|^2 dx.
class GridState {
 public:
  GridState(GridSpec spec, std::vector<cplx> amplitudes);

  const GridSpec& spec() const { return spec_; }
  std::span<const cplx> amplitudes() const { return amp_; }
  const cplx& operator[](std::size_t i) const { return amp_[i]; }

  double norm() const;
  GridState normalized() const;
  std::vector<double> density() const;
  /// Momentum probabilities per FFT slot (sum to the squared norm).
  std::vector<double> momentum_probabilities() const;

 private:
  GridSpec spec_;
  std::vector<cplx> amp_;
};

/// Two-particle state kept as sum_n coeff_n f_n(x1) g_n(x2).
class ProductGridState {
 public:
  struct Term {
    cplx coeff;
    std::vector<cplx> first;
    std::vector<cplx> second;
  };

  ProductGridState(GridSpec spec1, GridSpec spec2, std::vector<Term> terms);

  const GridSpec& spec1() const { return spec1_; }
  const GridSpec& spec2() const { return spec2_; }
  const std::vector<Term>& terms() const { return terms_; }

  double norm() const;
  ProductGridState normalized() const;

 private:
  GridSpec spec1_;
  GridSpec spec2_;
  std::vector<Term> terms_;
};

/// Fully materialized two-particle amplitudes, row-major [i1 * n2 + i2].
class DenseGrid2D {
 public:
  static constexpr std::size_t kMaxAxisPoints = 2048;

  DenseGrid2D(GridSpec spec1, GridSpec spec2, std::vector<cplx> amplitudes);
  static DenseGrid2D from_product(const ProductGridState& state);

  const GridSpec& spec1() const { return spec1_; }
  const GridSpec& spec2() const { return spec2_; }
  std::span<const cplx> amplitudes() const { return amp_; }
  cplx at(std::size_t i1, std::size_t i2) const { return amp_[i1 * spec2_.points() + i2]; }

  double norm() const;
  std::vector<double> density() const;
  std::vector<double> momentum_probabilities() const;

 private:
  GridSpec spec1_;
  GridSpec spec2_;
  std::vector<cplx> amp_;
};

/// Ensemble of pure two-particle grid states with weights summing to one.
struct MixtureGrid {
  struct Component {
    double weight;
    ProductGridState state;
  };
  std::vector<Component> components;
};

}  // namespace modvar
