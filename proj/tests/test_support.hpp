#pragma once

// Seeded generators shared by the unit and acceptance tests.

#include <cmath>
#include <numbers>
#include <vector>

#include "qlike/numerics.hpp"
#include "qlike/rng.hpp"
#include "qlike/simulator.hpp"

namespace qlike::testing {

inline ComplexMatrix gaussian_matrix(Rng& rng, std::size_t n, bool complex_entries = true) {
    std::vector<Complex> e(n * n);
    for (auto& z : e) {
        const double re = rng.normal();
        z = Complex(re, complex_entries ? rng.normal() : 0.0);
    }
    return ComplexMatrix(n, n, std::move(e));
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix.
inline ComplexMatrix random_unitary(Rng& rng, std::size_t n) {
    return orthonormalize_columns(gaussian_matrix(rng, n));
}

inline ComplexMatrix random_antisymmetric(Rng& rng, std::size_t n, double scale = 1.0) {
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = scale * rng.normal();
            a(i, j) = v;
            a(j, i) = -v;
        }
    }
    return a;
}

inline ComplexMatrix random_so4(Rng& rng) {
    return expm_antisymmetric(random_antisymmetric(rng, 4, 2.0)).matrix();
}

/// Normalized Wishart density matrix G G^dagger / tr(G G^dagger).
inline ComplexMatrix random_density(Rng& rng, std::size_t n) {
    const ComplexMatrix g = gaussian_matrix(rng, n);
    ComplexMatrix w = g * g.adjoint();
    const Complex t = w.trace();
    return w * (1.0 / t.real());
}

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

inline double random_beta(Rng& rng) { return uniform(rng, 0.05, 1.5); }
inline double random_delta(Rng& rng) { return uniform(rng, 0.05, std::numbers::pi - 0.05); }

/// Kronecker product written out independently of tensor_product.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

inline ComplexMatrix cnot_literal() {
    return ComplexMatrix(4, 4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0});
}

/// Closed-form two-outcome KL in nats.
inline double binary_kl(double p, double q) {
    double d = 0.0;
    if (p > 0) d += p * std::log(p / q);
    if (p < 1) d += (1 - p) * std::log((1 - p) / (1 - q));
    return d;
}

inline Circuit random_circuit(Rng& rng) {
    Circuit c;
    c.num_qubits = 1 + rng.next() % 5;
    const std::size_t gates = rng.next() % 25;
    for (std::size_t g = 0; g < gates; ++g) {
        if (c.num_qubits > 1 && rng.uniform() < 0.3) {
            const std::size_t ctl = rng.next() % c.num_qubits;
            c.ops.push_back(CnotGate{ctl, (ctl + 1 + rng.next() % (c.num_qubits - 1)) % c.num_qubits});
        } else {
            // Mix of arbitrary doubles, exact zeros and negative values.
            auto angle = [&] { return rng.uniform() < 0.1 ? 0.0 : uniform(rng, -7, 7); };
            c.ops.push_back(U3Gate{angle(), angle(), angle(), rng.next() % c.num_qubits});
        }
    }
    std::vector<std::size_t> qubits(c.num_qubits);
    for (std::size_t i = 0; i < qubits.size(); ++i) qubits[i] = i;
    for (std::size_t i = qubits.size(); i > 1; --i) std::swap(qubits[i - 1], qubits[rng.next() % i]);
    qubits.resize(1 + rng.next() % c.num_qubits);
    c.measured_qubits = qubits;
    if (rng.uniform() < 0.5) c.comments = {"random circuit", "", "x=1"};
    return c;
}

}  // namespace qlike::testing
