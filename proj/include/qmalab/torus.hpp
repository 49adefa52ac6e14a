#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "qmalab/frame.hpp"

namespace qmalab {

/// Uniform periodic grid on the flat torus [0,1)^{4n}, N points per axis, with
/// cached FFT plans and Fourier multipliers for spectral differentiation.
class TorusGrid {
  public:
    TorusGrid(int n, int N);
    ~TorusGrid();
    TorusGrid(const TorusGrid&) = delete;
    TorusGrid& operator=(const TorusGrid&) = delete;

    int n() const { return n_; }
    int N() const { return N_; }
    int axes() const { return axes_; }
    size_t points() const { return points_; }
    double spacing() const { return 1.0 / N_; }

    /// Coordinate of grid index along one axis.
    double coord(int idx) const { return idx * spacing(); }
    /// Decode a flat index into per-axis indices (row-major, axis 0 slowest).
    void unflatten(size_t flat, int* idx) const;

    /// Signed integer wavenumber for index k along an axis.
    int wavenumber(int k) const { return k <= N_ / 2 ? k : k - N_; }

    /// All second derivatives d2 phi / dx_a dx_b for a <= b, as axes*(axes+1)/2
    /// fields indexed by pair_index(a, b).
    std::vector<std::vector<double>> second_derivatives(const std::vector<double>& values) const;
    static int pair_index(int a, int b, int axes);

    /// Trigonometric interpolation of a grid field at arbitrary points (each
    /// row of pts is a point in [0,1)^{4n}). Exact on band-limited data.
    std::vector<double> interpolate(const std::vector<double>& values,
                                    const Eigen::MatrixXd& pts) const;

    /// Spectral zero-padding onto a finer grid (N_out >= N, same n).
    std::vector<double> upsample(const std::vector<double>& values, const TorusGrid& fine) const;

    /// Solve Laplace(u) = rhs with mean(u) = 0; rhs must have zero mean.
    std::vector<double> poisson_solve(const std::vector<double>& rhs) const;

  private:
    struct Fft;
    int n_, N_, axes_;
    size_t points_;
    std::unique_ptr<Fft> fft_;
};

/// Real scalar field sampled on a torus grid.
struct ScalarField {
    const TorusGrid* grid = nullptr;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const TorusGrid& g) : grid(&g), values(g.points(), 0.0) {}
    ScalarField(const TorusGrid& g, std::vector<double> v);

    double mean() const;
    double max() const;
    double min() const;
    double max_abs() const;
    /// Grid L1 norm (unit-volume torus quadrature).
    double l1() const;
    void add_constant(double c);
};

}  // namespace qmalab
