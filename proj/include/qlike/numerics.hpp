#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qlike {

using Complex = std::complex<double>;

inline constexpr double kStructuralTolerance = 1e-10;
inline constexpr double kAlgebraicTolerance = 1e-12;

/// Dense row-major complex matrix.
///
/// Subsystem ordering for tensor products is most-significant-first: in
/// `tensor_product(a, b)` the basis index is `i_a * dim_b + i_b`.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    /// Throws DimensionError on a size mismatch and DomainError on NaN/Inf.
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::initializer_list<Complex> entries);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const Complex> values);
    static ComplexMatrix diagonal(std::span<const double> values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    std::span<const Complex> entries() const { return entries_; }

    ComplexMatrix adjoint() const;
    ComplexMatrix transpose() const;
    ComplexMatrix conjugate() const;
    Complex trace() const;
    /// Determinant by partial-pivot elimination.
    Complex determinant() const;
    bool is_finite() const;
    bool is_real(double tol = kStructuralTolerance) const;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(Complex scale);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> entries_;
};

/// Largest absolute entry difference; DimensionError on shape mismatch.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Largest absolute entry difference after removing the best global phase
/// from `b` (`a` vs e^{i g} b).
double max_abs_diff_up_to_phase(const ComplexMatrix& a, const ComplexMatrix& b);

class UnitaryMatrix {
public:
    /// Throws DomainError when U^dagger U deviates from I by more than `tol`.
    static UnitaryMatrix from(ComplexMatrix m, double tol = kStructuralTolerance);

    const ComplexMatrix& matrix() const { return matrix_; }
    std::size_t dimension() const { return matrix_.rows(); }

private:
    explicit UnitaryMatrix(ComplexMatrix m) : matrix_(std::move(m)) {}
    ComplexMatrix matrix_;
};

bool is_unitary(const ComplexMatrix& m, double tol = kStructuralTolerance);
bool is_hermitian(const ComplexMatrix& m, double tol = kStructuralTolerance);

struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const;
};

class DensityMatrix {
public:
    /// Validates Hermiticity, unit trace and positivity (all within 1e-10).
    static DensityMatrix from(ComplexMatrix m);

    const ComplexMatrix& matrix() const { return matrix_; }
    std::size_t dimension() const { return matrix_.rows(); }
    /// Single-qubit states only.
    BlochVector bloch() const;

private:
    explicit DensityMatrix(ComplexMatrix m) : matrix_(std::move(m)) {}
    ComplexMatrix matrix_;
};

struct HermitianEigen {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // columns, matching `values`
};

/// Cyclic complex Jacobi eigensolver for small Hermitian matrices.
HermitianEigen hermitian_eigen(const ComplexMatrix& m);

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

enum class Subsystem { first, second };

/// Reduced 2x2 matrix of a 4x4 operator, keeping `keep`.
ComplexMatrix partial_trace(const ComplexMatrix& m, Subsystem keep);

DensityMatrix bloch_to_density(const BlochVector& b);

/// Matrix exponential (scaling and squaring with a Taylor core).
ComplexMatrix expm(const ComplexMatrix& a);

/// exp(a) for a real antisymmetric generator; result is special orthogonal.
UnitaryMatrix expm_antisymmetric(const ComplexMatrix& a);

/// Orthonormalize columns (modified Gram-Schmidt).
ComplexMatrix orthonormalize_columns(const ComplexMatrix& m);

namespace pauli {
ComplexMatrix i();
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

/// Rotation exp(-i theta Y / 2); turns Bloch vectors from z towards x.
ComplexMatrix ry(double theta);
ComplexMatrix rx(double theta);
ComplexMatrix rz(double theta);

}  // namespace qlike
