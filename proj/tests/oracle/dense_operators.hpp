// Dense-matrix oracle for the operators of the model in d = 1.
//
// Everything here is assembled from explicit DFT sums and closed-form symbol
// formulas; nothing calls into the library's transforms, symbol catalog or
// operator code. Matrices act on sample vectors; for a state the layout is
// (zeta samples, v samples). With uniform quadrature weights the L2 adjoint
// of a real matrix is its transpose.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

struct Mat {
    std::size_t n = 0;
    std::vector<double> a;

    explicit Mat(std::size_t size = 0) : n(size), a(size * size, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

    static Mat identity(std::size_t size) {
        Mat m(size);
        for (std::size_t i = 0; i < size; ++i) m(i, i) = 1.0;
        return m;
    }
    Mat transpose() const {
        Mat t(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
    std::vector<double> operator*(const std::vector<double>& x) const {
        std::vector<double> y(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }
};

inline Mat operator*(const Mat& x, const Mat& y) {
    Mat z(x.n);
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t k = 0; k < x.n; ++k) {
            const double xik = x(i, k);
            if (xik == 0.0) continue;
            for (std::size_t j = 0; j < x.n; ++j) z(i, j) += xik * y(k, j);
        }
    return z;
}

inline Mat operator+(Mat x, const Mat& y) {
    for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] += y.a[i];
    return x;
}

inline Mat operator-(Mat x, const Mat& y) {
    for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] -= y.a[i];
    return x;
}

inline Mat operator*(double s, Mat x) {
    for (auto& v : x.a) v *= s;
    return x;
}

// 1-D periodic grid of n points on [0, length).
struct Grid1 {
    std::size_t n;
    double length;

    int k(std::size_t m) const { return m < n / 2 ? static_cast<int>(m) : static_cast<int>(m) - static_cast<int>(n); }
    double xi(std::size_t m) const { return 2.0 * std::numbers::pi * k(m) / length; }
    bool kept(std::size_t m) const { return 3 * std::abs(k(m)) <= static_cast<int>(n); }
    bool nyquist(std::size_t m) const { return k(m) == -static_cast<int>(n / 2); }

    // Real matrix of the Fourier multiplier with the given complex symbol:
    // (T f)_p = sum_m symbol(m) * (1/n) sum_q f_q exp(i xi_m (x_p - x_q)).
    Mat multiplier(const std::function<std::complex<double>(std::size_t)>& symbol) const {
        Mat t(n);
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q) {
                std::complex<double> sum = 0.0;
                for (std::size_t m = 0; m < n; ++m) {
                    const double phase = 2.0 * std::numbers::pi * k(m) *
                                         (static_cast<double>(p) - static_cast<double>(q)) / static_cast<double>(n);
                    sum += symbol(m) * std::polar(1.0, phase);
                }
                t(p, q) = sum.real() / static_cast<double>(n);
            }
        return t;
    }

    Mat radial(const std::function<double(double)>& g) const {
        return multiplier([&](std::size_t m) { return std::complex<double>(g(std::abs(xi(m))), 0.0); });
    }
    Mat projection() const {
        return multiplier([&](std::size_t m) { return std::complex<double>(kept(m) ? 1.0 : 0.0, 0.0); });
    }
    Mat derivative() const {
        return multiplier([&](std::size_t m) { return std::complex<double>(0.0, nyquist(m) ? 0.0 : xi(m)); });
    }
    // Dealiased product with f: P diag(P f) P.
    Mat product(const std::vector<double>& f) const {
        const Mat p = projection();
        const std::vector<double> pf = p * f;
        Mat d(n);
        for (std::size_t i = 0; i < n; ++i) d(i, i) = pf[i];
        return p * d * p;
    }
};

// Places four n x n blocks into a 2n x 2n matrix [[a, b], [c, d]].
inline Mat blocks(const Mat& a, const Mat& b, const Mat& c, const Mat& d) {
    const std::size_t n = a.n;
    Mat m(2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            m(i, j) = a(i, j);
            m(i, j + n) = b(i, j);
            m(i + n, j) = c(i, j);
            m(i + n, j + n) = d(i, j);
        }
    return m;
}

// Whitham-Boussinesq operators in d = 1, assembled densely from their
// definitions: A = [[eps G2 M_w, G1^2 + eps G2 M_zeta G2], [1, eps M_w G2]],
// S0 = diag(1, G1^2 + eps G2 M_zeta G2), B = S0 A, A~ = (B + B^T)/2,
// F = -(B - B^T)/(2 eps), with w = G2[v].
struct DenseModel {
    Mat A, S0, B, A_tilde, F;

    DenseModel(const Grid1& grid, const std::function<double(double)>& g1, const std::function<double(double)>& g2,
               double eps, const std::vector<double>& zeta, const std::vector<double>& v) {
        const std::size_t n = grid.n;
        const Mat G1sq = grid.radial([&](double x) { return g1(x) * g1(x); });
        const Mat G2 = grid.radial(g2);
        const Mat Mw = grid.product(G2 * v);
        const Mat Mz = grid.product(zeta);
        const Mat I = Mat::identity(n);
        const Mat Z(n);
        const Mat T = G1sq + eps * (G2 * Mz * G2);
        A = blocks(eps * (G2 * Mw), T, I, eps * (Mw * G2));
        S0 = blocks(I, Z, Z, T);
        B = S0 * A;
        A_tilde = 0.5 * (B + B.transpose());
        F = (-0.5 / eps) * (B - B.transpose());
    }
};

inline std::vector<double> concat(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a);
    c.insert(c.end(), b.begin(), b.end());
    return c;
}

}  // namespace oracle
