#include "qlike/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qlike/errors.hpp"

namespace qlike {

namespace {

std::string shape(const ComplexMatrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(what) + ": shape mismatch " + shape(a) + " vs " + shape(b));
    }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) {
        throw DimensionError("ComplexMatrix: expected " + std::to_string(rows_ * cols_) +
                             " entries, got " + std::to_string(entries_.size()));
    }
    if (!is_finite()) {
        throw DomainError("ComplexMatrix: non-finite entry");
    }
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::initializer_list<Complex> entries)
    : ComplexMatrix(rows, cols, std::vector<Complex>(entries)) {}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        m(k, k) = 1.0;
    }
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> values) {
    ComplexMatrix m(values.size(), values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        m(k, k) = values[k];
    }
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size(), values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        m(k, k) = values[k];
    }
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            out(c, r) = std::conj((*this)(r, c));
        }
    }
    return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            out(c, r) = (*this)(r, c);
        }
    }
    return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
    ComplexMatrix out = *this;
    for (auto& e : out.entries_) {
        e = std::conj(e);
    }
    return out;
}

Complex ComplexMatrix::trace() const {
    Complex t = 0.0;
    for (std::size_t k = 0; k < std::min(rows_, cols_); ++k) {
        t += (*this)(k, k);
    }
    return t;
}

Complex ComplexMatrix::determinant() const {
    if (!is_square()) {
        throw DimensionError("determinant: matrix is " + shape(*this));
    }
    const std::size_t n = rows_;
    ComplexMatrix work = *this;
    Complex det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(work(r, col)) > std::abs(work(pivot, col))) {
                pivot = r;
            }
        }
        if (work(pivot, col) == Complex{0.0, 0.0}) {
            return 0.0;
        }
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(work(pivot, c), work(col, c));
            }
            det = -det;
        }
        det *= work(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const Complex f = work(r, col) / work(col, col);
            for (std::size_t c = col; c < n; ++c) {
                work(r, c) -= f * work(col, c);
            }
        }
    }
    return det;
}

bool ComplexMatrix::is_finite() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const Complex& e) { return std::isfinite(e.real()) && std::isfinite(e.imag()); });
}

bool ComplexMatrix::is_real(double tol) const {
    return std::all_of(entries_.begin(), entries_.end(), [tol](const Complex& e) { return std::abs(e.imag()) <= tol; });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    require_same_shape(*this, other, "operator+");
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        entries_[k] += other.entries_[k];
    }
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    require_same_shape(*this, other, "operator-");
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        entries_[k] -= other.entries_[k];
    }
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
    for (auto& e : entries_) {
        e *= scale;
    }
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("operator*: cannot multiply " + shape(a) + " by " + shape(b));
    }
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex f = a(r, k);
            for (std::size_t c = 0; c < b.cols(); ++c) {
                out(r, c) += f * b(k, c);
            }
        }
    }
    return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "max_abs_diff");
    double worst = 0.0;
    for (std::size_t k = 0; k < a.entries().size(); ++k) {
        worst = std::max(worst, std::abs(a.entries()[k] - b.entries()[k]));
    }
    return worst;
}

double max_abs_diff_up_to_phase(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "max_abs_diff_up_to_phase");
    Complex overlap = 0.0;
    for (std::size_t k = 0; k < a.entries().size(); ++k) {
        overlap += std::conj(b.entries()[k]) * a.entries()[k];
    }
    const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex{1.0, 0.0};
    return max_abs_diff(a, b * phase);
}

bool is_unitary(const ComplexMatrix& m, double tol) {
    return m.is_square() && max_abs_diff(m.adjoint() * m, ComplexMatrix::identity(m.rows())) <= tol;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
    return m.is_square() && max_abs_diff(m, m.adjoint()) <= tol;
}

UnitaryMatrix UnitaryMatrix::from(ComplexMatrix m, double tol) {
    if (!m.is_square()) {
        throw DimensionError("UnitaryMatrix: matrix is " + shape(m));
    }
    if (!is_unitary(m, tol)) {
        throw DomainError("UnitaryMatrix: U^dagger U deviates from identity");
    }
    return UnitaryMatrix(std::move(m));
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

DensityMatrix DensityMatrix::from(ComplexMatrix m) {
    if (!m.is_square()) {
        throw DimensionError("DensityMatrix: matrix is " + shape(m));
    }
    if (!m.is_finite()) {
        throw DomainError("DensityMatrix: non-finite entry");
    }
    if (!is_hermitian(m)) {
        throw DomainError("DensityMatrix: not Hermitian");
    }
    if (std::abs(m.trace() - 1.0) > kStructuralTolerance) {
        throw DomainError("DensityMatrix: trace differs from 1");
    }
    if (hermitian_eigen(m).values.front() < -kStructuralTolerance) {
        throw DomainError("DensityMatrix: negative eigenvalue");
    }
    return DensityMatrix(std::move(m));
}

BlochVector DensityMatrix::bloch() const {
    if (dimension() != 2) {
        throw DimensionError("DensityMatrix::bloch: state is not a single qubit");
    }
    const Complex off = matrix_(0, 1);
    return {2.0 * off.real(), -2.0 * off.imag(), (matrix_(0, 0) - matrix_(1, 1)).real()};
}

HermitianEigen hermitian_eigen(const ComplexMatrix& m) {
    if (!m.is_square()) {
        throw DimensionError("hermitian_eigen: matrix is " + shape(m));
    }
    const std::size_t n = m.rows();
    ComplexMatrix a = m;
    ComplexMatrix v = ComplexMatrix::identity(n);

    double scale = 0.0;
    for (const auto& e : a.entries()) {
        scale = std::max(scale, std::abs(e));
    }
    const double negligible = std::max(scale, 1e-300) * 1e-18;

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off = std::max(off, std::abs(a(p, q)));
            }
        }
        if (off <= negligible) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double mag = std::abs(a(p, q));
                if (mag <= negligible) {
                    continue;
                }
                // Phase the q axis so that a(p, q) becomes real positive.
                const Complex phase = a(p, q) / mag;
                for (std::size_t k = 0; k < n; ++k) {
                    a(k, q) *= std::conj(phase);
                    v(k, q) *= std::conj(phase);
                }
                for (std::size_t k = 0; k < n; ++k) {
                    a(q, k) *= phase;
                }
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * mag);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = app - t * mag;
                a(q, q) = aqq + t * mag;
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
    HermitianEigen out{std::vector<double>(n), ComplexMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t r = 0; r < n; ++r) {
            out.vectors(r, k) = v(r, order[k]);
        }
    }
    return out;
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ++ar) {
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            const Complex f = a(ar, ac);
            for (std::size_t br = 0; br < b.rows(); ++br) {
                for (std::size_t bc = 0; bc < b.cols(); ++bc) {
                    out(ar * b.rows() + br, ac * b.cols() + bc) = f * b(br, bc);
                }
            }
        }
    }
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, Subsystem keep) {
    if (m.rows() != 4 || m.cols() != 4) {
        throw DimensionError("partial_trace: expected 4x4, got " + shape(m));
    }
    ComplexMatrix out(2, 2);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            for (std::size_t k = 0; k < 2; ++k) {
                out(i, j) += keep == Subsystem::first ? m(2 * i + k, 2 * j + k) : m(2 * k + i, 2 * k + j);
            }
        }
    }
    return out;
}

DensityMatrix bloch_to_density(const BlochVector& b) {
    const double len = b.norm();
    if (!(len <= 1.0 + kStructuralTolerance)) {
        throw DomainError("bloch_to_density: |b| = " + std::to_string(len) + " exceeds 1");
    }
    ComplexMatrix m(2, 2,
                    {Complex{0.5 * (1.0 + b.z), 0.0}, Complex{0.5 * b.x, -0.5 * b.y},
                     Complex{0.5 * b.x, 0.5 * b.y}, Complex{0.5 * (1.0 - b.z), 0.0}});
    return DensityMatrix::from(std::move(m));
}

ComplexMatrix expm(const ComplexMatrix& a) {
    if (!a.is_square()) {
        throw DimensionError("expm: matrix is " + shape(a));
    }
    const std::size_t n = a.rows();
    double norm1 = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        double col = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            col += std::abs(a(r, c));
        }
        norm1 = std::max(norm1, col);
    }
    int squarings = 0;
    if (norm1 > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
    }
    const ComplexMatrix scaled = a * Complex{std::ldexp(1.0, -squarings), 0.0};

    // Taylor series; with ||scaled|| <= 1/2, 20 terms are far below double epsilon.
    ComplexMatrix result = ComplexMatrix::identity(n);
    ComplexMatrix term = ComplexMatrix::identity(n);
    for (int k = 1; k <= 20; ++k) {
        term = term * scaled;
        term *= Complex{1.0 / k, 0.0};
        result += term;
    }
    for (int s = 0; s < squarings; ++s) {
        result = result * result;
    }
    return result;
}

UnitaryMatrix expm_antisymmetric(const ComplexMatrix& a) {
    if (!a.is_square()) {
        throw DimensionError("expm_antisymmetric: matrix is " + shape(a));
    }
    if (!a.is_real(kAlgebraicTolerance) || max_abs_diff(a.transpose(), a * Complex{-1.0, 0.0}) > kAlgebraicTolerance) {
        throw DomainError("expm_antisymmetric: generator is not real antisymmetric");
    }
    ComplexMatrix e = expm(a);
    for (std::size_t r = 0; r < e.rows(); ++r) {
        for (std::size_t c = 0; c < e.cols(); ++c) {
            e(r, c) = e(r, c).real();
        }
    }
    return UnitaryMatrix::from(std::move(e));
}

ComplexMatrix orthonormalize_columns(const ComplexMatrix& m) {
    ComplexMatrix q = m;
    for (std::size_t c = 0; c < q.cols(); ++c) {
        for (std::size_t prev = 0; prev < c; ++prev) {
            Complex overlap = 0.0;
            for (std::size_t r = 0; r < q.rows(); ++r) {
                overlap += std::conj(q(r, prev)) * q(r, c);
            }
            for (std::size_t r = 0; r < q.rows(); ++r) {
                q(r, c) -= overlap * q(r, prev);
            }
        }
        double norm = 0.0;
        for (std::size_t r = 0; r < q.rows(); ++r) {
            norm += std::norm(q(r, c));
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            throw DomainError("orthonormalize_columns: rank-deficient input");
        }
        for (std::size_t r = 0; r < q.rows(); ++r) {
            q(r, c) /= norm;
        }
    }
    return q;
}

namespace pauli {
ComplexMatrix i() { return ComplexMatrix::identity(2); }
ComplexMatrix x() { return ComplexMatrix(2, 2, {0.0, 1.0, 1.0, 0.0}); }
ComplexMatrix y() { return ComplexMatrix(2, 2, {Complex{0, 0}, Complex{0, -1}, Complex{0, 1}, Complex{0, 0}}); }
ComplexMatrix z() { return ComplexMatrix(2, 2, {1.0, 0.0, 0.0, -1.0}); }
}  // namespace pauli

ComplexMatrix ry(double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return ComplexMatrix(2, 2, {c, -s, s, c});
}

ComplexMatrix rx(double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return ComplexMatrix(2, 2, {Complex{c, 0}, Complex{0, -s}, Complex{0, -s}, Complex{c, 0}});
}

ComplexMatrix rz(double theta) {
    return ComplexMatrix(2, 2, {std::polar(1.0, -theta / 2.0), 0.0, 0.0, std::polar(1.0, theta / 2.0)});
}

}  // namespace qlike
