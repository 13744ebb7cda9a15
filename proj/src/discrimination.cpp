#include "qlike/discrimination.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <string>

#include "qlike/errors.hpp"
#include "qlike/rng.hpp"

namespace qlike {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegenerateValue = 1e-14;

/// Minus infinity stands in for rejected (infinite-divergence) states so that
/// a plain `>` comparison never accepts them.
double score(const Divergence& d, bool allow_infinite) {
    if (d.infinite() && !allow_infinite) {
        return -std::numeric_limits<double>::infinity();
    }
    return d.nats;
}

/// D_KL of the outcome distributions of two states measured in the columns of `v`.
Divergence basis_divergence(const ComplexMatrix& rho_a, const ComplexMatrix& rho_b, const ComplexMatrix& v) {
    const std::size_t n = v.rows();
    std::vector<double> p(n);
    std::vector<double> q(n);
    for (std::size_t col = 0; col < n; ++col) {
        Complex pa = 0.0;
        Complex pb = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            Complex ra = 0.0;
            Complex rb = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                ra += rho_a(j, k) * v(k, col);
                rb += rho_b(j, k) * v(k, col);
            }
            pa += std::conj(v(j, col)) * ra;
            pb += std::conj(v(j, col)) * rb;
        }
        p[col] = std::max(pa.real(), 0.0);
        q[col] = std::max(pb.real(), 0.0);
    }
    return kl_divergence(p, q);
}

/// Single-qubit D_KL along Bloch direction (sin phi, 0, cos phi).
Divergence xz_divergence(const BlochVector& a, const BlochVector& b, double phi) {
    const double s = std::sin(phi);
    const double c = std::cos(phi);
    const double pa = std::clamp(0.5 * (1.0 + a.x * s + a.z * c), 0.0, 1.0);
    const double pb = std::clamp(0.5 * (1.0 + b.x * s + b.z * c), 0.0, 1.0);
    const double p[2] = {pa, 1.0 - pa};
    const double q[2] = {pb, 1.0 - pb};
    return kl_divergence(p, q);
}

double reduce_angle(double phi) {
    double r = std::fmod(phi, kPi);
    if (r < 0.0) {
        r += kPi;
    }
    return r >= kPi ? 0.0 : r;
}

void require_dimension(const DensityMatrix& rho, std::size_t dim, const char* what) {
    if (rho.dimension() != dim) {
        throw DimensionError(std::string(what) + ": expected a " + std::to_string(dim) + "-dimensional state, got " +
                             std::to_string(rho.dimension()));
    }
}

/// Haar-distributed element of SO(4) or SU(4).
ComplexMatrix random_group_element(Rng& rng, SearchGroup group) {
    ComplexMatrix g(4, 4);
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            const double re = rng.normal();
            const double im = group == SearchGroup::su4 ? rng.normal() : 0.0;
            g(r, c) = Complex{re, im};
        }
    }
    ComplexMatrix q = orthonormalize_columns(g);
    const Complex det = q.determinant();
    if (group == SearchGroup::so4) {
        if (det.real() < 0.0) {
            for (std::size_t r = 0; r < 4; ++r) {
                q(r, 0) = -q(r, 0);
            }
        }
    } else {
        q *= std::pow(std::conj(det) / std::abs(det), 0.25);
    }
    return q;
}

/// Basis of the Lie algebra searched over: real antisymmetric E_jk for so(4),
/// i times the traceless Hermitian (generalized Gell-Mann) matrices for su(4).
std::vector<ComplexMatrix> algebra_basis(SearchGroup group) {
    std::vector<ComplexMatrix> basis;
    const Complex i{0.0, 1.0};
    for (std::size_t j = 0; j < 4; ++j) {
        for (std::size_t k = j + 1; k < 4; ++k) {
            ComplexMatrix e(4, 4);
            e(j, k) = 1.0;
            e(k, j) = -1.0;
            basis.push_back(e);
            if (group == SearchGroup::su4) {
                ComplexMatrix s(4, 4);
                s(j, k) = i;
                s(k, j) = i;
                basis.push_back(s);
            }
        }
    }
    if (group == SearchGroup::su4) {
        for (std::size_t l = 1; l < 4; ++l) {
            ComplexMatrix d(4, 4);
            const double norm = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
            for (std::size_t k = 0; k < l; ++k) {
                d(k, k) = i * norm;
            }
            d(l, l) = -i * norm * static_cast<double>(l);
            basis.push_back(d);
        }
    }
    return basis;
}

ComplexMatrix random_generator(Rng& rng, const std::vector<ComplexMatrix>& basis) {
    ComplexMatrix a(4, 4);
    for (const auto& e : basis) {
        a += e * Complex{rng.normal(), 0.0};
    }
    return a;
}

ComplexMatrix chart(const ComplexMatrix& v, const std::vector<ComplexMatrix>& basis, std::span<const double> x) {
    ComplexMatrix a(4, 4);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        if (x[k] != 0.0) {
            a += basis[k] * Complex{x[k], 0.0};
        }
    }
    return v * expm(a);
}

struct WalkResult {
    double value = -std::numeric_limits<double>::infinity();
    ComplexMatrix basis;
};

class EntangledSearch {
public:
    EntangledSearch(const ComplexMatrix& rho_a, const ComplexMatrix& rho_b, const OptimizerConfig& cfg)
        : rho_a_(rho_a), rho_b_(rho_b), cfg_(cfg), algebra_(algebra_basis(cfg.search_group)) {}

    double evaluate(const ComplexMatrix& v) const {
        return score(basis_divergence(rho_a_, rho_b_, v), cfg_.allow_infinite);
    }

    WalkResult run(std::uint64_t restart, const ComplexMatrix& warm_start) const {
        Rng rng(derive_seed(cfg_.seed, restart));
        ComplexMatrix v = warm_start;
        double value = evaluate(v);
        if (restart > 0) {
            // Random starts; redraw the rare ones that land on rejected bases.
            for (int attempt = 0; attempt < 64; ++attempt) {
                v = random_group_element(rng, cfg_.search_group);
                value = evaluate(v);
                if (std::isfinite(value)) {
                    break;
                }
            }
        }

        double step = cfg_.step_size;
        std::uint64_t stall = 0;
        std::uint64_t accepted = 0;
        for (std::uint64_t it = 0; it < cfg_.iterations; ++it) {
            const ComplexMatrix proposal = v * expm(random_generator(rng, algebra_) * Complex{step, 0.0});
            const double candidate = evaluate(proposal);
            if (candidate > value) {
                v = proposal;
                value = candidate;
                stall = 0;
                if (++accepted % 64 == 0) {
                    v = orthonormalize_columns(v);
                }
            } else if (++stall >= cfg_.stall_window) {
                step *= cfg_.cooling;
                stall = 0;
            }
        }
        v = orthonormalize_columns(v);
        value = evaluate(v);
        if (cfg_.polish && std::isfinite(value)) {
            polish(v, value);
        }
        return {value, v};
    }

private:
    /// Damped Newton ascent in the exponential chart around the current point,
    /// with finite-difference derivatives. Never lowers the objective.
    void polish(ComplexMatrix& v, double& value) const {
        const std::size_t dim = algebra_.size();
        const double hg = 1e-5;
        const double hh = 1e-4;
        std::vector<double> x(dim, 0.0);
        auto at = [&](std::initializer_list<std::pair<std::size_t, double>> moves) {
            std::fill(x.begin(), x.end(), 0.0);
            for (const auto& [k, d] : moves) {
                x[k] += d;
            }
            return evaluate(chart(v, algebra_, x));
        };

        for (int iter = 0; iter < 100; ++iter) {
            std::vector<double> grad(dim);
            ComplexMatrix hess(dim, dim);
            bool finite = true;
            for (std::size_t k = 0; k < dim && finite; ++k) {
                const double up = at({{k, hg}});
                const double down = at({{k, -hg}});
                grad[k] = (up - down) / (2.0 * hg);
                const double up2 = at({{k, hh}});
                const double down2 = at({{k, -hh}});
                hess(k, k) = -(up2 - 2.0 * value + down2) / (hh * hh);
                finite = std::isfinite(grad[k]) && std::isfinite(hess(k, k).real());
                for (std::size_t l = k + 1; l < dim && finite; ++l) {
                    const double pp = at({{k, hh}, {l, hh}});
                    const double pm = at({{k, hh}, {l, -hh}});
                    const double mp = at({{k, -hh}, {l, hh}});
                    const double mm = at({{k, -hh}, {l, -hh}});
                    const double h = -(pp - pm - mp + mm) / (4.0 * hh * hh);
                    finite = std::isfinite(h);
                    hess(k, l) = h;
                    hess(l, k) = h;
                }
            }
            if (!finite) {
                return;
            }

            // Ascent step along (-H + shift)^{-1} g, shifted to stay positive definite.
            const HermitianEigen eig = hermitian_eigen(hess);
            const double top = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
            const double floor = std::max(1e-8 * top, 1e-12);
            std::vector<double> step(dim, 0.0);
            for (std::size_t e = 0; e < dim; ++e) {
                double proj = 0.0;
                for (std::size_t k = 0; k < dim; ++k) {
                    proj += eig.vectors(k, e).real() * grad[k];
                }
                const double curvature = std::max(eig.values[e], floor);
                for (std::size_t k = 0; k < dim; ++k) {
                    step[k] += eig.vectors(k, e).real() * proj / curvature;
                }
            }

            double t = 1.0;
            bool moved = false;
            for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
                std::vector<double> trial(dim);
                for (std::size_t k = 0; k < dim; ++k) {
                    trial[k] = t * step[k];
                }
                ComplexMatrix candidate = orthonormalize_columns(chart(v, algebra_, trial));
                const double candidate_value = evaluate(candidate);
                if (candidate_value > value) {
                    const double gain = candidate_value - value;
                    v = std::move(candidate);
                    value = candidate_value;
                    moved = true;
                    if (gain < cfg_.tolerance) {
                        return;
                    }
                    break;
                }
            }
            if (!moved) {
                return;
            }
        }
    }

    const ComplexMatrix& rho_a_;
    const ComplexMatrix& rho_b_;
    const OptimizerConfig& cfg_;
    std::vector<ComplexMatrix> algebra_;
};

}  // namespace

PreparationParams::PreparationParams(double beta, double delta) : beta_(beta), delta_(delta) {
    if (!(beta >= 0.0 && beta <= kPi) || !(delta >= 0.0 && delta <= kPi)) {
        throw DomainError("PreparationParams: beta and delta must lie in [0, pi]");
    }
}

MeasurementBasis::MeasurementBasis(UnitaryMatrix unitary) : unitary_(std::move(unitary)) {
    if (dimension() != 2 && dimension() != 4) {
        throw DimensionError("MeasurementBasis: dimension must be 2 or 4, got " + std::to_string(dimension()));
    }
}

ProbDist ProbDist::from(std::vector<double> probs) {
    double total = 0.0;
    for (auto& p : probs) {
        if (!(p >= -kAlgebraicTolerance)) {
            throw DomainError("ProbDist: negative probability " + std::to_string(p));
        }
        p = std::max(p, 0.0);
        total += p;
    }
    if (std::abs(total - 1.0) > kStructuralTolerance) {
        throw DomainError("ProbDist: probabilities sum to " + std::to_string(total));
    }
    return ProbDist(std::move(probs));
}

std::string_view to_string(SearchGroup group) { return group == SearchGroup::so4 ? "so4" : "su4"; }

std::string_view to_string(Strategy strategy) { return strategy == Strategy::direct ? "direct" : "entangled"; }

SearchGroup parse_search_group(std::string_view text) {
    if (text == "so4") {
        return SearchGroup::so4;
    }
    if (text == "su4") {
        return SearchGroup::su4;
    }
    throw ConfigError("unknown search group '" + std::string(text) + "' (expected so4 or su4)");
}

Strategy parse_strategy(std::string_view text) {
    if (text == "direct") {
        return Strategy::direct;
    }
    if (text == "entangled") {
        return Strategy::entangled;
    }
    throw ConfigError("unknown strategy '" + std::string(text) + "' (expected direct or entangled)");
}

void OptimizerConfig::validate() const {
    if (!(step_size > 0.0)) {
        throw ConfigError("step_size must be positive");
    }
    if (!(cooling > 0.0 && cooling <= 1.0)) {
        throw ConfigError("cooling must lie in (0, 1]");
    }
    if (iterations < 1 || restarts < 1) {
        throw ConfigError("iterations and restarts must be at least 1");
    }
    if (stall_window < 1 || workers < 1) {
        throw ConfigError("stall_window and workers must be at least 1");
    }
    if (direct_grid_points < 3) {
        throw ConfigError("direct_grid_points must be at least 3");
    }
    if (!(tolerance >= 0.0) || !(direct_angle_tolerance > 0.0)) {
        throw ConfigError("tolerances must be positive");
    }
}

bool StrategyReport::improved_over_separable() const {
    return raw_pair_value && separable_pair_value && *raw_pair_value > *separable_pair_value;
}

StatePair prepare_states(const PreparationParams& params) {
    const double c = std::cos(params.beta() / 2.0);
    const double s = std::sin(params.beta() / 2.0);
    const double diag[2] = {c * c, s * s};
    DensityMatrix rho_a = DensityMatrix::from(ComplexMatrix::diagonal(std::span<const double>(diag)));
    DensityMatrix rho_b = rotate_xz(rho_a, params.delta());
    return {std::move(rho_a), std::move(rho_b)};
}

DensityMatrix rotate_xz(const DensityMatrix& rho, double angle) {
    require_dimension(rho, 2, "rotate_xz");
    const ComplexMatrix r = ry(angle);
    ComplexMatrix out = r * rho.matrix() * r.adjoint();
    // Restore exact Hermiticity lost to rounding.
    out = (out + out.adjoint()) * Complex{0.5, 0.0};
    return DensityMatrix::from(std::move(out));
}

ProbDist measurement_distribution(const DensityMatrix& rho, const MeasurementBasis& basis) {
    if (rho.dimension() != basis.dimension()) {
        throw DimensionError("measurement_distribution: state dimension " + std::to_string(rho.dimension()) +
                             " does not match basis dimension " + std::to_string(basis.dimension()));
    }
    const ComplexMatrix& u = basis.unitary().matrix();
    const ComplexMatrix rotated = u.adjoint() * rho.matrix() * u;
    std::vector<double> probs(rotated.rows());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        probs[i] = rotated(i, i).real();
    }
    return ProbDist::from(std::move(probs));
}

Divergence relative_entropy_of_basis(const DensityMatrix& rho_a, const DensityMatrix& rho_b,
                                     const MeasurementBasis& basis) {
    const ProbDist p = measurement_distribution(rho_a, basis);
    const ProbDist q = measurement_distribution(rho_b, basis);
    return kl_divergence(p.probs(), q.probs());
}

MeasurementBasis basis_from_angle(double phi) {
    return MeasurementBasis(UnitaryMatrix::from(ry(reduce_angle(phi))));
}

StrategyReport optimize_direct(const DensityMatrix& rho_a, const DensityMatrix& rho_b, const OptimizerConfig& cfg) {
    cfg.validate();
    require_dimension(rho_a, 2, "optimize_direct");
    require_dimension(rho_b, 2, "optimize_direct");
    const BlochVector a = rho_a.bloch();
    const BlochVector b = rho_b.bloch();
    auto objective = [&](double phi) { return score(xz_divergence(a, b, phi), cfg.allow_infinite); };

    const std::uint64_t points = cfg.direct_grid_points;
    const double spacing = kPi / static_cast<double>(points);
    double best_phi = 0.0;
    double best_value = objective(0.0);
    for (std::uint64_t k = 1; k < points; ++k) {
        const double phi = spacing * static_cast<double>(k);
        const double value = objective(phi);
        if (value > best_value) {
            best_value = value;
            best_phi = phi;
        }
    }

    if (std::isfinite(best_value)) {
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double lo = best_phi - spacing;
        double hi = best_phi + spacing;
        double x1 = hi - inv_phi * (hi - lo);
        double x2 = lo + inv_phi * (hi - lo);
        double f1 = objective(x1);
        double f2 = objective(x2);
        while (hi - lo > cfg.direct_angle_tolerance) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = objective(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = objective(x1);
            }
        }
        const double refined = 0.5 * (lo + hi);
        const double refined_value = objective(refined);
        if (refined_value > best_value) {
            best_value = refined_value;
            best_phi = refined;
        }
    }

    const double phi_star = reduce_angle(best_phi);
    const bool degenerate = !(best_value > kDegenerateValue);
    return StrategyReport{
        .strategy = Strategy::direct,
        .s_rel = degenerate ? 0.0 : best_value,
        .basis = basis_from_angle(phi_star),
        .phi_star = phi_star,
        .raw_pair_value = std::nullopt,
        .separable_pair_value = std::nullopt,
        .restart_values = {},
        .degenerate = degenerate,
        .seed = cfg.seed,
        .config = cfg,
    };
}

StrategyReport optimize_entangled(const DensityMatrix& rho_a, const DensityMatrix& rho_b,
                                  const OptimizerConfig& cfg) {
    cfg.validate();
    require_dimension(rho_a, 2, "optimize_entangled");
    require_dimension(rho_b, 2, "optimize_entangled");
    const ComplexMatrix pair_a = tensor_product(rho_a.matrix(), rho_a.matrix());
    const ComplexMatrix pair_b = tensor_product(rho_b.matrix(), rho_b.matrix());

    const StrategyReport direct = optimize_direct(rho_a, rho_b, cfg);
    const ComplexMatrix& local = direct.basis.unitary().matrix();
    const ComplexMatrix warm_start = tensor_product(local, local);

    const EntangledSearch search(pair_a, pair_b, cfg);
    const double separable_value = search.evaluate(warm_start);

    std::vector<WalkResult> results(cfg.restarts);
    const std::uint64_t workers = std::min(cfg.workers, cfg.restarts);
    if (workers <= 1) {
        for (std::uint64_t r = 0; r < cfg.restarts; ++r) {
            results[r] = search.run(r, warm_start);
        }
    } else {
        std::vector<std::future<void>> tasks;
        for (std::uint64_t w = 0; w < workers; ++w) {
            tasks.push_back(std::async(std::launch::async, [&, w] {
                for (std::uint64_t r = w; r < cfg.restarts; r += workers) {
                    results[r] = search.run(r, warm_start);
                }
            }));
        }
        for (auto& t : tasks) {
            t.get();
        }
    }

    std::size_t best = 0;
    std::vector<double> restart_values;
    for (std::size_t r = 0; r < results.size(); ++r) {
        restart_values.push_back(results[r].value);
        if (results[r].value > results[best].value) {
            best = r;
        }
    }

    const double pair_value = results[best].value;
    const bool degenerate = !(pair_value > 2.0 * kDegenerateValue);
    return StrategyReport{
        .strategy = Strategy::entangled,
        .s_rel = degenerate ? 0.0 : pair_value / 2.0,
        .basis = MeasurementBasis(UnitaryMatrix::from(results[best].basis)),
        .phi_star = std::nullopt,
        .raw_pair_value = degenerate ? 0.0 : pair_value,
        .separable_pair_value = separable_value,
        .restart_values = std::move(restart_values),
        .degenerate = degenerate,
        .seed = cfg.seed,
        .config = cfg,
    };
}

double log_confidence_decay(std::uint64_t n, double s_rel, double p) {
    if (n < 1) {
        throw DomainError("confidence_decay: n must be at least 1");
    }
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("confidence_decay: p must lie strictly between 0 and 1");
    }
    if (!(s_rel >= 0.0)) {
        throw DomainError("confidence_decay: s_rel must be non-negative");
    }
    const double nn = static_cast<double>(n);
    return -nn * s_rel - 0.5 * std::log(2.0 * kPi * nn * p * (1.0 - p));
}

double confidence_decay(std::uint64_t n, double s_rel, double p) { return std::exp(log_confidence_decay(n, s_rel, p)); }

}  // namespace qlike
