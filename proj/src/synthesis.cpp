#include "qlike/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "qlike/errors.hpp"
#include "qlike/format.hpp"

namespace qlike {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;
const Complex kI{0.0, 1.0};

double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * kPi);
    return a <= -kPi ? a + 2.0 * kPi : a;
}

/// Magic (Bell) basis; Q^dagger (a x b) Q is real orthogonal for a, b in SU(2).
const ComplexMatrix& magic_basis() {
    static const ComplexMatrix q = [] {
        const double h = 1.0 / std::sqrt(2.0);
        return ComplexMatrix(4, 4,
                             {Complex{h, 0}, Complex{0, h}, Complex{0, 0}, Complex{0, 0},  //
                              Complex{0, 0}, Complex{0, 0}, Complex{0, h}, Complex{h, 0},  //
                              Complex{0, 0}, Complex{0, 0}, Complex{0, h}, Complex{-h, 0}, //
                              Complex{h, 0}, Complex{0, -h}, Complex{0, 0}, Complex{0, 0}});
    }();
    return q;
}

/// Diagonal of Q^dagger (P x P) Q for P in {X, Y, Z}; entries are +-1.
std::array<double, 4> magic_diagonal(const ComplexMatrix& pauli_matrix) {
    const ComplexMatrix& q = magic_basis();
    const ComplexMatrix d = q.adjoint() * tensor_product(pauli_matrix, pauli_matrix) * q;
    return {d(0, 0).real(), d(1, 1).real(), d(2, 2).real(), d(3, 3).real()};
}

/// u / det(u)^{1/4}.
ComplexMatrix to_special_unitary(const ComplexMatrix& u) {
    const Complex det = u.determinant();
    return u * (1.0 / std::pow(det, 0.25));
}

struct Kak {
    ComplexMatrix left;   // local, applied last
    ComplexMatrix right;  // local, applied first
    double cx = 0.0;      // raw coordinates, not reduced
    double cy = 0.0;
    double cz = 0.0;
};

/// Returns P real orthogonal (det +1) with P^T m P diagonal, for a complex
/// symmetric unitary m. Real and imaginary parts of m commute, so a generic
/// real combination of the two shares their eigenvectors.
ComplexMatrix diagonalize_symmetric_unitary(const ComplexMatrix& m) {
    static constexpr double kMixes[] = {0.5772156649015329, 1.6180339887498949, 2.718281828459045,
                                        0.3183098861837907, 4.123105625617661,  0.1414213562373095};
    for (const double mix : kMixes) {
        ComplexMatrix combo(4, 4);
        for (std::size_t r = 0; r < 4; ++r) {
            for (std::size_t c = 0; c < 4; ++c) {
                combo(r, c) = m(r, c).real() + mix * m(r, c).imag();
            }
        }
        ComplexMatrix p = hermitian_eigen(combo).vectors;
        for (auto r = 0u; r < 4; ++r) {
            for (auto c = 0u; c < 4; ++c) {
                p(r, c) = p(r, c).real();
            }
        }
        p = orthonormalize_columns(p);
        if (p.determinant().real() < 0.0) {
            for (std::size_t r = 0; r < 4; ++r) {
                p(r, 0) = -p(r, 0);
            }
        }
        const ComplexMatrix d = p.transpose() * m * p;
        double off = 0.0;
        for (std::size_t r = 0; r < 4; ++r) {
            for (std::size_t c = 0; c < 4; ++c) {
                if (r != c) {
                    off = std::max(off, std::abs(d(r, c)));
                }
            }
        }
        if (off <= 1e-10) {
            return p;
        }
    }
    throw DomainError("decompose_two_qubit: failed to diagonalize the magic-basis Gram matrix");
}

/// u (special unitary) = left * exp(i(alpha + cx XX + cy YY + cz ZZ)) * right.
Kak kak_decompose(const ComplexMatrix& su) {
    const ComplexMatrix& q = magic_basis();
    const ComplexMatrix up = q.adjoint() * su * q;
    const ComplexMatrix gram = up.transpose() * up;
    const ComplexMatrix p = diagonalize_symmetric_unitary(gram);
    const ComplexMatrix d = p.transpose() * gram * p;

    std::array<double, 4> theta{};
    for (std::size_t k = 0; k < 4; ++k) {
        theta[k] = std::arg(d(k, k)) / 2.0;
    }
    // det(A) must be +1 so that the outer factors land in SO(4).
    Complex det_a = 1.0;
    for (const double t : theta) {
        det_a *= std::polar(1.0, t);
    }
    if (det_a.real() < 0.0) {
        theta[0] += kPi;
    }

    std::array<Complex, 4> inverse_phases{};
    for (std::size_t k = 0; k < 4; ++k) {
        inverse_phases[k] = std::polar(1.0, -theta[k]);
    }
    ComplexMatrix k1 = up * p * ComplexMatrix::diagonal(std::span<const Complex>(inverse_phases));
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            k1(r, c) = k1(r, c).real();
        }
    }

    static const std::array<double, 4> hx = magic_diagonal(pauli::x());
    static const std::array<double, 4> hy = magic_diagonal(pauli::y());
    static const std::array<double, 4> hz = magic_diagonal(pauli::z());
    Kak out{q * k1 * q.adjoint(), q * p.transpose() * q.adjoint(), 0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < 4; ++k) {
        out.cx += theta[k] * hx[k] / 4.0;
        out.cy += theta[k] * hy[k] / 4.0;
        out.cz += theta[k] * hz[k] / 4.0;
    }
    return out;
}

struct Reduced {
    int quarter_turns = 0;  // multiples of pi/2 removed
    double rest = 0.0;      // in (-pi/4, pi/4]
};

Reduced reduce_coordinate(double c) {
    Reduced r;
    r.quarter_turns = static_cast<int>(std::lround(c / kHalfPi));
    r.rest = c - r.quarter_turns * kHalfPi;
    if (r.rest <= -kPi / 4.0) {
        r.rest += kHalfPi;
        r.quarter_turns -= 1;
    }
    return r;
}

/// Splits a 4x4 operator known to be a tensor product into 2x2 factors,
/// each scaled into SU(2) (the leftover scalar is discarded).
std::pair<ComplexMatrix, ComplexMatrix> factor_local(const ComplexMatrix& l) {
    std::size_t bi = 0;
    std::size_t bj = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            double norm = 0.0;
            for (std::size_t k = 0; k < 2; ++k) {
                for (std::size_t m = 0; m < 2; ++m) {
                    norm += std::norm(l(2 * i + k, 2 * j + m));
                }
            }
            if (norm > best) {
                best = norm;
                bi = i;
                bj = j;
            }
        }
    }
    ComplexMatrix b(2, 2);
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t m = 0; m < 2; ++m) {
            b(k, m) = l(2 * bi + k, 2 * bj + m);
        }
    }
    b *= 1.0 / std::sqrt(b.determinant());
    ComplexMatrix a(2, 2);
    const ComplexMatrix b_dag = b.adjoint();
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            Complex t = 0.0;
            for (std::size_t k = 0; k < 2; ++k) {
                for (std::size_t m = 0; m < 2; ++m) {
                    t += b_dag(k, m) * l(2 * i + m, 2 * j + k);
                }
            }
            a(i, j) = t / 2.0;
        }
    }
    a *= 1.0 / std::sqrt(a.determinant());
    return {a, b};
}

SingleQubitGate to_gate(const ComplexMatrix& m, std::size_t target) {
    // Re-unitarize against accumulated rounding before the Euler split.
    SingleQubitGate g = zyz_decompose(UnitaryMatrix::from(orthonormalize_columns(m), 1e-6)).gate;
    g.target = target;
    return g;
}

}  // namespace

ComplexMatrix u3_matrix(double theta, double phi, double lambda) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return ComplexMatrix(2, 2, {Complex{c, 0.0}, -std::polar(s, lambda), std::polar(s, phi), std::polar(c, phi + lambda)});
}

ComplexMatrix cnot_matrix() {
    return ComplexMatrix(4, 4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0});
}

ZyzResult zyz_decompose(const UnitaryMatrix& unitary) {
    if (unitary.dimension() != 2) {
        throw DimensionError("zyz_decompose: expected a 2x2 unitary");
    }
    const ComplexMatrix& u = unitary.matrix();
    const double c = std::abs(u(0, 0));
    const double s = std::abs(u(1, 0));
    const double theta = 2.0 * std::atan2(s, c);
    constexpr double tiny = 1e-14;
    double gamma = 0.0;
    double phi = 0.0;
    double lambda = 0.0;
    if (c >= s) {
        gamma = std::arg(u(0, 0));
        const double sum = std::arg(u(1, 1)) - gamma;
        if (s > tiny) {
            phi = std::arg(u(1, 0)) - gamma;
            lambda = sum - phi;
        } else {
            lambda = sum;
        }
    } else {
        const double d = std::arg(u(1, 0));
        const double e = std::arg(-u(0, 1));
        if (c > tiny) {
            gamma = d + e - std::arg(u(1, 1));
            phi = d - gamma;
            lambda = e - gamma;
        } else {
            gamma = d;
            lambda = e - gamma;
        }
    }
    return {SingleQubitGate{theta, wrap_angle(phi), wrap_angle(lambda), 0}, wrap_angle(gamma)};
}

MakhlinInvariants makhlin_invariants(const UnitaryMatrix& unitary) {
    if (unitary.dimension() != 4) {
        throw DimensionError("makhlin_invariants: expected a 4x4 unitary");
    }
    const ComplexMatrix& q = magic_basis();
    const ComplexMatrix ub = q.adjoint() * unitary.matrix() * q;
    const ComplexMatrix m = ub.transpose() * ub;
    const Complex det = unitary.matrix().determinant();
    const Complex tr = m.trace();
    const Complex tr_sq = (m * m).trace();
    return {tr * tr / (16.0 * det), ((tr * tr - tr_sq) / (4.0 * det)).real()};
}

CnotCountCriterion cnot_count_criterion(const UnitaryMatrix& unitary) {
    if (unitary.dimension() != 4) {
        throw DimensionError("cnot_count_criterion: expected a 4x4 unitary");
    }
    const ComplexMatrix su = to_special_unitary(unitary.matrix());
    const ComplexMatrix yy = tensor_product(pauli::y(), pauli::y());
    const Kak kak = kak_decompose(su);

    CnotCountCriterion out;
    out.chi = (su * yy * su.transpose() * yy).trace();
    out.coordinates = {reduce_coordinate(kak.cx).rest, reduce_coordinate(kak.cy).rest, reduce_coordinate(kak.cz).rest};
    out.invariants = makhlin_invariants(unitary);
    out.distance_to_two_cnot_class = std::min(
        {std::abs(out.coordinates.cx), std::abs(out.coordinates.cy), std::abs(out.coordinates.cz)});
    out.two_cnots_suffice = out.distance_to_two_cnot_class <= kTwoCnotTolerance;
    return out;
}

ComplexMatrix DecompositionResult::reconstruct() const {
    const ComplexMatrix cx = cnot_matrix();
    const ComplexMatrix pre = tensor_product(locals[0].matrix(), locals[1].matrix());
    const ComplexMatrix mid = tensor_product(locals[2].matrix(), locals[3].matrix());
    const ComplexMatrix post = tensor_product(locals[4].matrix(), locals[5].matrix());
    return post * cx * mid * cx * pre * std::polar(1.0, global_phase);
}

DecompositionResult decompose_two_qubit(const UnitaryMatrix& unitary) {
    if (unitary.dimension() != 4) {
        throw DimensionError("decompose_two_qubit: expected a 4x4 unitary");
    }
    const CnotCountCriterion criterion = cnot_count_criterion(unitary);
    if (!criterion.two_cnots_suffice) {
        throw SynthesisError("decompose_two_qubit: unitary requires 3 CNOTs (chi = " +
                                 format_double(criterion.chi.real()) + (criterion.chi.imag() < 0 ? "" : "+") +
                                 format_double(criterion.chi.imag()) + "i, G1 = " +
                                 format_double(criterion.invariants.g1.real()) + "+" +
                                 format_double(criterion.invariants.g1.imag()) +
                                 "i, G2 = " + format_double(criterion.invariants.g2) + ")",
                             criterion);
    }

    const ComplexMatrix su = to_special_unitary(unitary.matrix());
    const Kak kak = kak_decompose(su);
    const std::array<Reduced, 3> reduced = {reduce_coordinate(kak.cx), reduce_coordinate(kak.cy),
                                            reduce_coordinate(kak.cz)};

    // Axis whose interaction is dropped; the other two become XX and ZZ.
    std::size_t dropped = 0;
    for (std::size_t k = 1; k < 3; ++k) {
        if (std::abs(reduced[k].rest) < std::abs(reduced[dropped].rest)) {
            dropped = k;
        }
    }

    // Clifford C (on both qubits) with C X C^dag = +-P1 and C Z C^dag = +-P2.
    ComplexMatrix clifford = ComplexMatrix::identity(2);
    double first = 0.0;
    double second = 0.0;
    switch (dropped) {
        case 0:  // keep YY, ZZ
            clifford = ComplexMatrix(2, 2, {1.0, 0.0, 0.0, kI});
            first = reduced[1].rest;
            second = reduced[2].rest;
            break;
        case 1:  // keep XX, ZZ
            first = reduced[0].rest;
            second = reduced[2].rest;
            break;
        default:  // keep XX, YY
            clifford = rx(-kHalfPi);
            first = reduced[0].rest;
            second = reduced[1].rest;
            break;
    }
    if (std::max({std::abs(reduced[0].rest), std::abs(reduced[1].rest), std::abs(reduced[2].rest)}) <=
        kSeparableTolerance) {
        first = 0.0;
        second = 0.0;
    }

    // Whole quarter turns exp(i pi/2 PP) = i PP are local Pauli products.
    ComplexMatrix paulis = ComplexMatrix::identity(2);
    const ComplexMatrix axes[3] = {pauli::x(), pauli::y(), pauli::z()};
    for (std::size_t k = 0; k < 3; ++k) {
        if (reduced[k].quarter_turns % 2 != 0) {
            paulis = paulis * axes[k];
        }
    }

    const auto [left_a, left_b] = factor_local(kak.left);
    const auto [right_a, right_b] = factor_local(kak.right);
    const ComplexMatrix post_tail = paulis * clifford;
    const ComplexMatrix pre_head = clifford.adjoint();

    DecompositionResult result;
    result.criterion = criterion;
    result.locals[0] = to_gate(pre_head * right_a, 0);
    result.locals[1] = to_gate(pre_head * right_b, 1);
    result.locals[2] = to_gate(rx(-2.0 * first), 0);
    result.locals[3] = to_gate(rz(-2.0 * second), 1);
    result.locals[4] = to_gate(left_a * post_tail, 0);
    result.locals[5] = to_gate(left_b * post_tail, 1);
    if (first == 0.0 && second == 0.0) {
        result.locals[2] = SingleQubitGate{0.0, 0.0, 0.0, 0};
        result.locals[3] = SingleQubitGate{0.0, 0.0, 0.0, 1};
    }

    result.global_phase = 0.0;
    const ComplexMatrix bare = result.reconstruct();
    Complex overlap = 0.0;
    for (std::size_t k = 0; k < 16; ++k) {
        overlap += std::conj(bare.entries()[k]) * unitary.matrix().entries()[k];
    }
    result.global_phase = std::arg(overlap);
    result.residual = max_abs_diff(result.reconstruct(), unitary.matrix());
    if (!(result.residual <= kMaxResidual)) {
        throw SynthesisError("decompose_two_qubit: reconstruction residual " + format_double(result.residual) +
                                 " exceeds " + format_double(kMaxResidual),
                             criterion);
    }
    return result;
}

}  // namespace qlike
