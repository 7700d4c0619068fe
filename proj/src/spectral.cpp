#include "whitham/spectral.hpp"

#include "whitham/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace whitham {

namespace {

// FFTW's planner is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void require_same_grid(const SpectralGrid& a, const SpectralGrid& b) {
    if (&a != &b) throw std::invalid_argument("fields live on different grids");
}

}  // namespace

SpectralGrid::SpectralGrid(int dim, std::size_t n, double length)
    : dim_(dim), n_(n), size_(dim == 1 ? n : n * n), length_(length) {
    xi_.resize(size_);
    xi2_.resize(size_);
    mask_.resize(size_);
    const double base = 2.0 * std::numbers::pi / length_;
    for (std::size_t m = 0; m < size_; ++m) {
        const auto k = mode(m);
        xi_[m] = {base * k[0], base * k[1]};
        xi2_[m] = xi_[m][0] * xi_[m][0] + xi_[m][1] * xi_[m][1];
        const int limit3 = static_cast<int>(n_);
        mask_[m] = (3 * std::abs(k[0]) <= limit3 && 3 * std::abs(k[1]) <= limit3) ? 1 : 0;
        max_xi_ = std::max(max_xi_, std::sqrt(xi2_[m]));
    }

    std::vector<fftw_complex> a(size_), b(size_);
    std::lock_guard lock(planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    const int ni = static_cast<int>(n_);
    if (dim_ == 1) {
        forward_plan_ = fftw_plan_dft_1d(ni, a.data(), b.data(), FFTW_FORWARD, flags);
        inverse_plan_ = fftw_plan_dft_1d(ni, a.data(), b.data(), FFTW_BACKWARD, flags);
    } else {
        forward_plan_ = fftw_plan_dft_2d(ni, ni, a.data(), b.data(), FFTW_FORWARD, flags);
        inverse_plan_ = fftw_plan_dft_2d(ni, ni, a.data(), b.data(), FFTW_BACKWARD, flags);
    }
    if (!forward_plan_ || !inverse_plan_) throw std::runtime_error("FFTW planning failed");
}

SpectralGrid::~SpectralGrid() {
    std::lock_guard lock(planner_mutex());
    if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

double SpectralGrid::volume() const { return dim_ == 1 ? length_ : length_ * length_; }

int SpectralGrid::signed_index(std::size_t i) const {
    const auto half = n_ / 2;
    return i < half ? static_cast<int>(i) : static_cast<int>(i) - static_cast<int>(n_);
}

std::array<int, 2> SpectralGrid::mode(std::size_t m) const {
    if (dim_ == 1) return {signed_index(m), 0};
    return {signed_index(m / n_), signed_index(m % n_)};
}

bool SpectralGrid::nyquist(std::size_t m, int axis) const {
    return mode(m)[axis] == -static_cast<int>(n_ / 2);
}

Vec2 SpectralGrid::point(std::size_t p) const {
    const double h = spacing();
    if (dim_ == 1) return {h * static_cast<double>(p), 0.0};
    return {h * static_cast<double>(p / n_), h * static_cast<double>(p % n_)};
}

void SpectralGrid::forward(std::span<const double> in, std::span<Complex> out) const {
    if (in.size() != size_ || out.size() != size_) throw std::invalid_argument("transform size mismatch");
    std::vector<Complex> buf(in.begin(), in.end());
    fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), reinterpret_cast<fftw_complex*>(buf.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / static_cast<double>(size_);
    for (auto& c : out) c *= scale;
}

void SpectralGrid::inverse(std::span<const Complex> in, std::span<double> out) const {
    if (in.size() != size_ || out.size() != size_) throw std::invalid_argument("transform size mismatch");
    std::vector<Complex> src(in.begin(), in.end());
    std::vector<Complex> dst(size_);
    fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), reinterpret_cast<fftw_complex*>(src.data()),
                     reinterpret_cast<fftw_complex*>(dst.data()));
    for (std::size_t i = 0; i < size_; ++i) out[i] = dst[i].real();
}

GridPtr make_grid(int dim, std::size_t n, double length) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("grid dimension must be 1 or 2");
    if (n < 8 || (n & (n - 1)) != 0) throw std::invalid_argument("points per dimension must be a power of two >= 8");
    if (!(length > 0.0) || !std::isfinite(length)) throw std::invalid_argument("domain length must be positive");
    return GridPtr(new SpectralGrid(dim, n, length));
}

// ---------------------------------------------------------------- ScalarField

ScalarField::ScalarField(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size(), 0.0) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->size()) throw std::invalid_argument("sample count does not match grid");
}

ScalarField ScalarField::sample(GridPtr grid, const std::function<double(const Vec2&)>& f) {
    ScalarField out(grid);
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = f(grid->point(p));
    return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) { return axpy(1.0, other); }
ScalarField& ScalarField::operator-=(const ScalarField& other) { return axpy(-1.0, other); }

ScalarField& ScalarField::operator*=(double a) {
    for (auto& v : values_) v *= a;
    return *this;
}

ScalarField& ScalarField::axpy(double a, const ScalarField& x) {
    require_same_grid(*grid_, *x.grid_);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
    return *this;
}

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double a, ScalarField f) { return f *= a; }

// ------------------------------------------------------------------- Spectrum

Spectrum::Spectrum(GridPtr grid) : grid_(std::move(grid)), coeffs_(grid_->size()) {}

Spectrum::Spectrum(GridPtr grid, std::vector<Complex> coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_->size()) throw std::invalid_argument("coefficient count does not match grid");
}

Spectrum& Spectrum::operator+=(const Spectrum& other) { return axpy(1.0, other); }
Spectrum& Spectrum::operator-=(const Spectrum& other) { return axpy(-1.0, other); }

Spectrum& Spectrum::operator*=(double a) {
    for (auto& c : coeffs_) c *= a;
    return *this;
}

Spectrum& Spectrum::axpy(double a, const Spectrum& x) {
    require_same_grid(*grid_, *x.grid_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * x.coeffs_[i];
    return *this;
}

Spectrum operator+(Spectrum a, const Spectrum& b) { return a += b; }
Spectrum operator-(Spectrum a, const Spectrum& b) { return a -= b; }
Spectrum operator*(double a, Spectrum s) { return s *= a; }

Spectrum forward(const ScalarField& f) {
    Spectrum s(f.grid_ptr());
    f.grid().forward(f.values(), s.coeffs());
    return s;
}

ScalarField inverse(const Spectrum& s) {
    ScalarField f(s.grid_ptr());
    s.grid().inverse(s.coeffs(), f.values());
    return f;
}

// ---------------------------------------------------------------- SymbolTable

SymbolTable::SymbolTable(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->size()) throw std::invalid_argument("symbol table size does not match grid");
    for (double v : values_)
        if (!std::isfinite(v)) throw NonFiniteError("symbol is not finite on a grid mode");
}

SymbolTable SymbolTable::tabulate(GridPtr grid, const std::function<double(const Vec2&)>& g) {
    std::vector<double> values(grid->size());
    for (std::size_t m = 0; m < values.size(); ++m) values[m] = g(grid->wavenumber(m));
    return SymbolTable(std::move(grid), std::move(values));
}

SymbolTable SymbolTable::constant(GridPtr grid, double value) {
    std::vector<double> values(grid->size(), value);
    return SymbolTable(std::move(grid), std::move(values));
}

double SymbolTable::sup_abs() const {
    double s = 0.0;
    for (double v : values_) s = std::max(s, std::abs(v));
    return s;
}

double SymbolTable::inf() const { return *std::min_element(values_.begin(), values_.end()); }

SymbolTable SymbolTable::operator*(const SymbolTable& other) const {
    require_same_grid(*grid_, *other.grid_);
    std::vector<double> out(values_.size());
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = values_[m] * other.values_[m];
    return SymbolTable(grid_, std::move(out));
}

SymbolTable SymbolTable::pow(double exponent) const {
    std::vector<double> out(values_.size());
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = std::pow(values_[m], exponent);
    return SymbolTable(grid_, std::move(out));
}

Spectrum apply_symbol(const SymbolTable& g, Spectrum s) {
    require_same_grid(g.grid(), s.grid());
    for (std::size_t m = 0; m < s.size(); ++m) s[m] *= g[m];
    return s;
}

ScalarField apply_symbol(const SymbolTable& g, const ScalarField& f) {
    return inverse(apply_symbol(g, forward(f)));
}

ScalarField apply_symbol(const std::function<double(const Vec2&)>& g, const ScalarField& f) {
    return apply_symbol(SymbolTable::tabulate(f.grid_ptr(), g), f);
}

Spectrum derivative(Spectrum s, int axis) {
    const auto& grid = s.grid();
    if (axis < 0 || axis >= grid.dim()) throw std::invalid_argument("derivative axis out of range");
    for (std::size_t m = 0; m < s.size(); ++m) {
        if (grid.nyquist(m, axis)) {
            s[m] = 0.0;
        } else {
            s[m] *= Complex(0.0, grid.wavenumber(m)[axis]);
        }
    }
    return s;
}

ScalarField spectral_derivative(const ScalarField& f, int axis) {
    return inverse(derivative(forward(f), axis));
}

Spectrum dealias(Spectrum s) {
    const auto& grid = s.grid();
    for (std::size_t m = 0; m < s.size(); ++m)
        if (!grid.kept(m)) s[m] = 0.0;
    return s;
}

Spectrum dealiased_product(const Spectrum& a, const Spectrum& b) {
    require_same_grid(a.grid(), b.grid());
    ScalarField fa = inverse(dealias(a));
    const ScalarField fb = inverse(dealias(b));
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
    return dealias(forward(fa));
}

ScalarField dealiased_product(const ScalarField& a, const ScalarField& b) {
    return inverse(dealiased_product(forward(a), forward(b)));
}

ProductOperator::ProductOperator(const Spectrum& coefficient) : grid_(coefficient.grid_ptr()) {
    const ScalarField f = inverse(dealias(coefficient));
    samples_.assign(f.values().begin(), f.values().end());
}

Spectrum ProductOperator::operator()(const Spectrum& g) const {
    require_same_grid(*grid_, g.grid());
    ScalarField fg = inverse(dealias(g));
    for (std::size_t i = 0; i < fg.size(); ++i) fg[i] *= samples_[i];
    return dealias(forward(fg));
}

double sobolev_norm(const Spectrum& s, double order) {
    const auto& grid = s.grid();
    double sum = 0.0;
    for (std::size_t m = 0; m < s.size(); ++m)
        sum += std::pow(1.0 + grid.wavenumber_squared(m), order) * std::norm(s[m]);
    return std::sqrt(sum * grid.volume());
}

double sobolev_norm(const ScalarField& f, double order) { return sobolev_norm(forward(f), order); }

double inner_product(const ScalarField& f, const ScalarField& g) {
    require_same_grid(f.grid(), g.grid());
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * g[i];
    return sum * f.grid().volume() / static_cast<double>(f.size());
}

double inner_product(const Spectrum& f, const Spectrum& g) {
    require_same_grid(f.grid(), g.grid());
    double sum = 0.0;
    for (std::size_t m = 0; m < f.size(); ++m) sum += (f[m] * std::conj(g[m])).real();
    return sum * f.grid().volume();
}

ScalarField resample(const ScalarField& f, GridPtr target) {
    const auto& src = f.grid();
    if (src.dim() != target->dim() || src.length() != target->length())
        throw std::invalid_argument("resample requires matching dimension and length");
    const Spectrum s = forward(f);
    Spectrum out(target);
    const int half_src = static_cast<int>(src.points_per_dim() / 2);
    const int half_dst = static_cast<int>(target->points_per_dim() / 2);
    const int nd = static_cast<int>(target->points_per_dim());
    auto wrap = [nd](int k) { return static_cast<std::size_t>(k < 0 ? k + nd : k); };
    for (std::size_t m = 0; m < s.size(); ++m) {
        const auto k = src.mode(m);
        bool ok = true;
        for (int a = 0; a < src.dim(); ++a)
            if (std::abs(k[a]) >= std::min(half_src, half_dst)) ok = false;
        if (!ok) continue;
        const std::size_t dst = target->dim() == 1
                                    ? wrap(k[0])
                                    : wrap(k[0]) * target->points_per_dim() + wrap(k[1]);
        out[dst] = s[m];
    }
    return inverse(out);
}

double max_value(const ScalarField& f) { return *std::max_element(f.values().begin(), f.values().end()); }
double min_value(const ScalarField& f) { return *std::min_element(f.values().begin(), f.values().end()); }

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace whitham
