/// @file spectral.hpp
/// @brief Periodic pseudo-spectral foundation: grids, transforms, Fourier
/// multipliers, spectral derivatives, two-thirds dealiasing and Sobolev norms.
///
/// Conventions (fixed for the whole library):
///   - the domain is the torus [0, L)^d, d in {1, 2}, with N points per axis;
///   - samples and modes are stored row-major, axis 0 varying slowest;
///   - the forward transform divides by N^d, so a field f has
///       f(x) = sum_k fhat_k exp(i xi_k . x),  xi_k = 2 pi k / L;
///   - the inverse transform applies no scaling.
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace whitham {

using Complex = std::complex<double>;

/// Wave vector (or physical point); the second component is zero when d = 1.
using Vec2 = std::array<double, 2>;

class SpectralGrid;
using GridPtr = std::shared_ptr<const SpectralGrid>;

/// Immutable periodic grid with cached wavenumbers, dealiasing mask and FFT
/// plans. Shared between fields via `GridPtr`; all members are safe to use
/// concurrently.
class SpectralGrid {
public:
    ~SpectralGrid();
    SpectralGrid(const SpectralGrid&) = delete;
    SpectralGrid& operator=(const SpectralGrid&) = delete;

    int dim() const { return dim_; }
    std::size_t points_per_dim() const { return n_; }
    std::size_t size() const { return size_; }
    double length() const { return length_; }
    double spacing() const { return length_ / static_cast<double>(n_); }
    /// L^d, the measure of the torus.
    double volume() const;

    /// Signed integer wavenumber of 1-D index i in standard FFT order.
    int signed_index(std::size_t i) const;
    /// Integer mode vector of flat mode index m.
    std::array<int, 2> mode(std::size_t m) const;
    /// Physical wave vector xi = 2 pi k / L of flat mode index m.
    const Vec2& wavenumber(std::size_t m) const { return xi_[m]; }
    /// |xi|^2 of flat mode index m.
    double wavenumber_squared(std::size_t m) const { return xi2_[m]; }
    /// True when mode m survives the two-thirds rule (every |k_i| <= N/3).
    bool kept(std::size_t m) const { return mask_[m] != 0; }
    /// True when some component of mode m is the Nyquist index -N/2.
    bool nyquist(std::size_t m, int axis) const;
    /// Largest |xi| over all grid modes.
    double max_wavenumber() const { return max_xi_; }
    /// Coordinates of flat sample index p.
    Vec2 point(std::size_t p) const;

    /// Forward transform, physical -> spectral, normalized by N^d.
    void forward(std::span<const double> in, std::span<Complex> out) const;
    /// Inverse transform, spectral -> physical; keeps the real part.
    void inverse(std::span<const Complex> in, std::span<double> out) const;

private:
    SpectralGrid(int dim, std::size_t n, double length);
    friend GridPtr make_grid(int dim, std::size_t n, double length);

    int dim_;
    std::size_t n_;
    std::size_t size_;
    double length_;
    double max_xi_ = 0.0;
    std::vector<Vec2> xi_;
    std::vector<double> xi2_;
    std::vector<char> mask_;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

/// Builds a grid on [0, L)^dim. Throws std::invalid_argument unless
/// dim is 1 or 2, n is a power of two no smaller than 8, and L > 0.
GridPtr make_grid(int dim, std::size_t n, double length);

/// Real samples of a scalar function on a grid.
class ScalarField {
public:
    explicit ScalarField(GridPtr grid);
    ScalarField(GridPtr grid, std::vector<double> values);

    /// Samples f at every grid point.
    static ScalarField sample(GridPtr grid, const std::function<double(const Vec2&)>& f);

    const SpectralGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double a);
    /// this += a * x
    ScalarField& axpy(double a, const ScalarField& x);

    bool all_finite() const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double a, ScalarField f);

/// Vector-valued field: one ScalarField per axis.
using VectorField = std::vector<ScalarField>;

/// Spectral coefficients of a real field; Hermitian-symmetric by construction.
class Spectrum {
public:
    explicit Spectrum(GridPtr grid);
    Spectrum(GridPtr grid, std::vector<Complex> coeffs);

    const SpectralGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t size() const { return coeffs_.size(); }
    std::span<Complex> coeffs() { return coeffs_; }
    std::span<const Complex> coeffs() const { return coeffs_; }
    Complex& operator[](std::size_t m) { return coeffs_[m]; }
    const Complex& operator[](std::size_t m) const { return coeffs_[m]; }

    Spectrum& operator+=(const Spectrum& other);
    Spectrum& operator-=(const Spectrum& other);
    Spectrum& operator*=(double a);
    Spectrum& axpy(double a, const Spectrum& x);

private:
    GridPtr grid_;
    std::vector<Complex> coeffs_;
};

Spectrum operator+(Spectrum a, const Spectrum& b);
Spectrum operator-(Spectrum a, const Spectrum& b);
Spectrum operator*(double a, Spectrum s);

Spectrum forward(const ScalarField& f);
ScalarField inverse(const Spectrum& s);

/// Real, even symbol tabulated on every mode of a grid.
class SymbolTable {
public:
    SymbolTable(GridPtr grid, std::vector<double> values);

    /// Evaluates g at every wave vector; throws NonFiniteError if any value
    /// is NaN or infinite.
    static SymbolTable tabulate(GridPtr grid, const std::function<double(const Vec2&)>& g);
    static SymbolTable constant(GridPtr grid, double value);

    const SpectralGrid& grid() const { return *grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t m) const { return values_[m]; }
    double sup_abs() const;
    double inf() const;

    SymbolTable operator*(const SymbolTable& other) const;
    /// Pointwise power; used for G^2 and G^-1.
    SymbolTable pow(double exponent) const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

Spectrum apply_symbol(const SymbolTable& g, Spectrum s);
ScalarField apply_symbol(const SymbolTable& g, const ScalarField& f);
ScalarField apply_symbol(const std::function<double(const Vec2&)>& g, const ScalarField& f);

/// Multiplies by i xi_axis; the Nyquist mode along `axis` is set to zero.
Spectrum derivative(Spectrum s, int axis);
ScalarField spectral_derivative(const ScalarField& f, int axis);

/// Zeroes every mode outside the two-thirds band.
Spectrum dealias(Spectrum s);

/// Truncates both factors to the two-thirds band, multiplies pointwise and
/// truncates the result. Exact on kept modes for band-limited inputs.
Spectrum dealiased_product(const Spectrum& a, const Spectrum& b);
ScalarField dealiased_product(const ScalarField& a, const ScalarField& b);

/// Pointwise multiplier prepared once for repeated dealiased products.
class ProductOperator {
public:
    explicit ProductOperator(const Spectrum& coefficient);
    Spectrum operator()(const Spectrum& g) const;
    std::span<const double> samples() const { return samples_; }

private:
    GridPtr grid_;
    std::vector<double> samples_;
};

/// |f|_{H^s} = sqrt(L^d sum_k <xi>^{2s} |fhat_k|^2), <xi> = (1 + |xi|^2)^{1/2}.
double sobolev_norm(const Spectrum& s, double order);
double sobolev_norm(const ScalarField& f, double order);

/// L^2 inner product by grid quadrature, (L/N)^d sum f_i g_i.
double inner_product(const ScalarField& f, const ScalarField& g);
/// L^2 inner product of two spectra via Parseval (real part).
double inner_product(const Spectrum& f, const Spectrum& g);

/// Spectral interpolation onto a grid of the same dimension and length
/// (zero padding or truncation; the Nyquist mode is dropped).
ScalarField resample(const ScalarField& f, GridPtr target);

double max_value(const ScalarField& f);
double min_value(const ScalarField& f);
double max_abs(const ScalarField& f);

}  // namespace whitham
