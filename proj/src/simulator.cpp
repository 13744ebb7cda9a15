#include "qlike/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>

#include "qlike/errors.hpp"
#include "qlike/rng.hpp"
#include "qlike/synthesis.hpp"

namespace qlike {

namespace {

std::size_t bit_of(std::size_t num_qubits, std::size_t qubit) { return std::size_t{1} << (num_qubits - 1 - qubit); }

U3Gate as_u3(const SingleQubitGate& g, std::size_t qubit) { return U3Gate{g.theta, g.phi, g.lambda, qubit}; }

class Statevector {
public:
    explicit Statevector(std::size_t num_qubits)
        : num_qubits_(num_qubits), amplitudes_(std::size_t{1} << num_qubits) {
        amplitudes_[0] = 1.0;
    }

    void apply(const GateOp& op) {
        if (const auto* u = std::get_if<U3Gate>(&op)) {
            apply_u3(*u);
        } else {
            apply_cnot(std::get<CnotGate>(op));
        }
    }

    std::vector<double> probabilities() const {
        std::vector<double> p(amplitudes_.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = std::norm(amplitudes_[i]);
        }
        return p;
    }

private:
    void apply_u3(const U3Gate& g) {
        const ComplexMatrix m = u3_matrix(g.theta, g.phi, g.lambda);
        const std::size_t bit = bit_of(num_qubits_, g.qubit);
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            if (i & bit) {
                continue;
            }
            const Complex a0 = amplitudes_[i];
            const Complex a1 = amplitudes_[i | bit];
            amplitudes_[i] = m(0, 0) * a0 + m(0, 1) * a1;
            amplitudes_[i | bit] = m(1, 0) * a0 + m(1, 1) * a1;
        }
    }

    void apply_cnot(const CnotGate& g) {
        const std::size_t cbit = bit_of(num_qubits_, g.control);
        const std::size_t tbit = bit_of(num_qubits_, g.target);
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            if ((i & cbit) && !(i & tbit)) {
                std::swap(amplitudes_[i], amplitudes_[i | tbit]);
            }
        }
    }

    std::size_t num_qubits_;
    std::vector<Complex> amplitudes_;
};

/// Density-matrix backend with depolarizing noise after every gate.
class DensityState {
public:
    explicit DensityState(std::size_t num_qubits)
        : num_qubits_(num_qubits), dim_(std::size_t{1} << num_qubits), rho_(dim_ * dim_) {
        rho_[0] = 1.0;
    }

    void apply(const GateOp& op, const NoiseModel& noise) {
        if (const auto* u = std::get_if<U3Gate>(&op)) {
            apply_u3(*u);
            depolarize(bit_of(num_qubits_, u->qubit), noise.depolarizing_1q);
        } else {
            const auto& g = std::get<CnotGate>(op);
            apply_cnot(g);
            depolarize(bit_of(num_qubits_, g.control) | bit_of(num_qubits_, g.target), noise.depolarizing_2q);
        }
    }

    std::vector<double> probabilities() const {
        std::vector<double> p(dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            p[i] = std::max(at(i, i).real(), 0.0);
        }
        return p;
    }

private:
    Complex& at(std::size_t r, std::size_t c) { return rho_[r * dim_ + c]; }
    const Complex& at(std::size_t r, std::size_t c) const { return rho_[r * dim_ + c]; }

    void apply_u3(const U3Gate& g) {
        const ComplexMatrix m = u3_matrix(g.theta, g.phi, g.lambda);
        const std::size_t bit = bit_of(num_qubits_, g.qubit);
        for (std::size_t c = 0; c < dim_; ++c) {
            for (std::size_t r = 0; r < dim_; ++r) {
                if (r & bit) {
                    continue;
                }
                const Complex x0 = at(r, c);
                const Complex x1 = at(r | bit, c);
                at(r, c) = m(0, 0) * x0 + m(0, 1) * x1;
                at(r | bit, c) = m(1, 0) * x0 + m(1, 1) * x1;
            }
        }
        for (std::size_t r = 0; r < dim_; ++r) {
            for (std::size_t c = 0; c < dim_; ++c) {
                if (c & bit) {
                    continue;
                }
                const Complex x0 = at(r, c);
                const Complex x1 = at(r, c | bit);
                at(r, c) = x0 * std::conj(m(0, 0)) + x1 * std::conj(m(0, 1));
                at(r, c | bit) = x0 * std::conj(m(1, 0)) + x1 * std::conj(m(1, 1));
            }
        }
    }

    void apply_cnot(const CnotGate& g) {
        const std::size_t cbit = bit_of(num_qubits_, g.control);
        const std::size_t tbit = bit_of(num_qubits_, g.target);
        auto flip = [&](std::size_t i) { return (i & cbit) ? i ^ tbit : i; };
        std::vector<Complex> out(rho_.size());
        for (std::size_t r = 0; r < dim_; ++r) {
            for (std::size_t c = 0; c < dim_; ++c) {
                out[flip(r) * dim_ + flip(c)] = at(r, c);
            }
        }
        rho_ = std::move(out);
    }

    /// rho -> (1 - p) rho + p (Tr_S rho) x I_S / 2^|S| for the qubits in `mask`.
    void depolarize(std::size_t mask, double p) {
        if (p == 0.0) {
            return;
        }
        const double share = 1.0 / static_cast<double>(std::size_t{1} << std::popcount(mask));
        std::vector<Complex> out(rho_.size());
        for (std::size_t r = 0; r < dim_; ++r) {
            for (std::size_t c = 0; c < dim_; ++c) {
                Complex mixed = 0.0;
                if ((r & mask) == (c & mask)) {
                    // Sum over every assignment s of the masked bits.
                    for (std::size_t s = mask;; s = (s - 1) & mask) {
                        mixed += at((r & ~mask) | s, (c & ~mask) | s);
                        if (s == 0) {
                            break;
                        }
                    }
                    mixed *= share;
                }
                out[r * dim_ + c] = (1.0 - p) * at(r, c) + p * mixed;
            }
        }
        rho_ = std::move(out);
    }

    std::size_t num_qubits_;
    std::size_t dim_;
    std::vector<Complex> rho_;
};

std::vector<double> marginalize(const Circuit& circuit, const std::vector<double>& full) {
    std::vector<double> out(circuit.outcome_count(), 0.0);
    const std::size_t m = circuit.measured_qubits.size();
    for (std::size_t i = 0; i < full.size(); ++i) {
        std::size_t outcome = 0;
        for (std::size_t k = 0; k < m; ++k) {
            if (i & bit_of(circuit.num_qubits, circuit.measured_qubits[k])) {
                outcome |= std::size_t{1} << (m - 1 - k);
            }
        }
        out[outcome] += full[i];
    }
    return out;
}

void apply_readout_flips(std::vector<double>& probs, std::size_t bits, double flip) {
    if (flip == 0.0) {
        return;
    }
    for (std::size_t k = 0; k < bits; ++k) {
        const std::size_t bit = std::size_t{1} << k;
        std::vector<double> next(probs.size());
        for (std::size_t x = 0; x < probs.size(); ++x) {
            next[x] = (1.0 - flip) * probs[x] + flip * probs[x ^ bit];
        }
        probs = std::move(next);
    }
}

ProbDist normalized(std::vector<double> probs) {
    double total = 0.0;
    for (const double p : probs) {
        total += p;
    }
    for (auto& p : probs) {
        p /= total;
    }
    return ProbDist::from(std::move(probs));
}

void draw(const std::vector<double>& cdf, std::uint64_t shots, Rng& rng, std::vector<std::uint32_t>& out) {
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        out.push_back(static_cast<std::uint32_t>(std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1)));
    }
}

std::vector<double> cumulative(const ProbDist& dist) {
    std::vector<double> cdf(dist.size());
    double running = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        running += dist[i];
        cdf[i] = running;
    }
    // Zero-probability tail cells must never be drawn.
    for (std::size_t i = cdf.size(); i-- > 0;) {
        if (dist[i] > 0.0) {
            for (std::size_t j = i; j < cdf.size(); ++j) {
                cdf[j] = 1.0;
            }
            break;
        }
    }
    return cdf;
}

}  // namespace

void Circuit::validate() const {
    if (num_qubits == 0 || num_qubits > 16) {
        throw ConfigError("circuit: register size must be between 1 and 16");
    }
    auto check = [&](std::size_t q) {
        if (q >= num_qubits) {
            throw ConfigError("circuit: qubit index " + std::to_string(q) + " out of range");
        }
    };
    for (const auto& op : ops) {
        if (const auto* u = std::get_if<U3Gate>(&op)) {
            check(u->qubit);
        } else {
            const auto& g = std::get<CnotGate>(op);
            check(g.control);
            check(g.target);
            if (g.control == g.target) {
                throw ConfigError("circuit: CNOT control and target coincide");
            }
        }
    }
    std::set<std::size_t> seen;
    for (const std::size_t q : measured_qubits) {
        check(q);
        if (!seen.insert(q).second) {
            throw ConfigError("circuit: qubit " + std::to_string(q) + " measured twice");
        }
    }
}

std::size_t Circuit::cnot_count() const {
    return static_cast<std::size_t>(
        std::count_if(ops.begin(), ops.end(), [](const GateOp& op) { return std::holds_alternative<CnotGate>(op); }));
}

void NoiseModel::validate() const {
    for (const double p : {depolarizing_1q, depolarizing_2q, readout_flip}) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ConfigError("noise probabilities must lie in [0, 1]");
        }
    }
}

void ShotCounts::validate() const {
    std::uint64_t total = 0;
    for (const auto& [label, n] : counts) {
        total += n;
    }
    if (total != shots) {
        throw DomainError("ShotCounts: counts sum to " + std::to_string(total) + ", expected " + std::to_string(shots));
    }
}

Circuit build_circuit(const PreparationParams& params, Strategy strategy, const MeasurementBasis& basis,
                      PreparedState which) {
    const std::size_t expected = strategy == Strategy::direct ? 2 : 4;
    if (basis.dimension() != expected) {
        throw ConfigError("build_circuit: " + std::string(to_string(strategy)) + " strategy needs a " +
                          std::to_string(expected) + "-dimensional basis, got " + std::to_string(basis.dimension()));
    }
    Circuit c;
    c.num_qubits = 4;
    c.ops = {
        U3Gate{params.beta(), 0.0, 0.0, kQubitB},
        U3Gate{params.beta(), 0.0, 0.0, kQubitC},
        CnotGate{kQubitB, kQubitA},
        CnotGate{kQubitC, kQubitD},
    };
    if (which == PreparedState::b) {
        c.ops.push_back(U3Gate{params.delta(), 0.0, 0.0, kQubitB});
        c.ops.push_back(U3Gate{params.delta(), 0.0, 0.0, kQubitC});
    }

    // Measuring in the columns of U means rotating by U^dagger first.
    const ComplexMatrix change = basis.unitary().matrix().adjoint();
    if (strategy == Strategy::direct) {
        const SingleQubitGate g = zyz_decompose(UnitaryMatrix::from(change)).gate;
        c.ops.push_back(as_u3(g, kQubitB));
        c.ops.push_back(as_u3(g, kQubitC));
    } else {
        const DecompositionResult d = decompose_two_qubit(UnitaryMatrix::from(change));
        const std::size_t pair[2] = {kQubitB, kQubitC};
        c.ops.push_back(as_u3(d.locals[0], pair[d.locals[0].target]));
        c.ops.push_back(as_u3(d.locals[1], pair[d.locals[1].target]));
        c.ops.push_back(CnotGate{pair[d.cnots[0].control], pair[d.cnots[0].target]});
        c.ops.push_back(as_u3(d.locals[2], pair[d.locals[2].target]));
        c.ops.push_back(as_u3(d.locals[3], pair[d.locals[3].target]));
        c.ops.push_back(CnotGate{pair[d.cnots[1].control], pair[d.cnots[1].target]});
        c.ops.push_back(as_u3(d.locals[4], pair[d.locals[4].target]));
        c.ops.push_back(as_u3(d.locals[5], pair[d.locals[5].target]));
    }
    c.measured_qubits = {kQubitB, kQubitC};
    return c;
}

std::string outcome_label(std::size_t outcome, std::size_t bits) {
    std::string label(bits, '0');
    for (std::size_t k = 0; k < bits; ++k) {
        if (outcome & (std::size_t{1} << (bits - 1 - k))) {
            label[k] = '1';
        }
    }
    return label;
}

ProbDist born_probabilities(const Circuit& circuit) {
    circuit.validate();
    Statevector state(circuit.num_qubits);
    for (const auto& op : circuit.ops) {
        state.apply(op);
    }
    return normalized(marginalize(circuit, state.probabilities()));
}

ProbDist noisy_probabilities(const Circuit& circuit, const NoiseModel& noise) {
    noise.validate();
    if (noise.noiseless()) {
        return born_probabilities(circuit);
    }
    circuit.validate();
    DensityState state(circuit.num_qubits);
    for (const auto& op : circuit.ops) {
        state.apply(op, noise);
    }
    std::vector<double> probs = marginalize(circuit, state.probabilities());
    apply_readout_flips(probs, circuit.measured_qubits.size(), noise.readout_flip);
    return normalized(std::move(probs));
}

std::vector<std::uint32_t> sample_outcomes(const Circuit& circuit, std::uint64_t shots, const NoiseModel& noise,
                                           std::uint64_t seed) {
    const std::vector<double> cdf = cumulative(noisy_probabilities(circuit, noise));
    Rng rng(derive_seed(seed, 0));
    std::vector<std::uint32_t> out;
    out.reserve(shots);
    draw(cdf, shots, rng, out);
    return out;
}

ShotCounts sample_shots(const Circuit& circuit, std::uint64_t shots, const NoiseModel& noise, std::uint64_t seed,
                        std::uint64_t workers) {
    if (shots < 1) {
        throw ConfigError("sample_shots: shots must be at least 1");
    }
    if (workers < 1) {
        throw ConfigError("sample_shots: workers must be at least 1");
    }
    const std::vector<double> cdf = cumulative(noisy_probabilities(circuit, noise));

    std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(cdf.size(), 0));
    auto run = [&](std::uint64_t w) {
        const std::uint64_t share = shots / workers + (w < shots % workers ? 1 : 0);
        Rng rng(derive_seed(seed, w));
        std::vector<std::uint32_t> outcomes;
        outcomes.reserve(share);
        draw(cdf, share, rng, outcomes);
        for (const auto o : outcomes) {
            ++partial[w][o];
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::future<void>> tasks;
        for (std::uint64_t w = 0; w < workers; ++w) {
            tasks.push_back(std::async(std::launch::async, run, w));
        }
        for (auto& t : tasks) {
            t.get();
        }
    }

    ShotCounts result;
    result.shots = shots;
    result.seed = seed;
    result.workers = workers;
    result.noise = noise;
    for (std::size_t o = 0; o < cdf.size(); ++o) {
        std::uint64_t n = 0;
        for (const auto& p : partial) {
            n += p[o];
        }
        result.counts[outcome_label(o, circuit.measured_qubits.size())] = n;
    }
    return result;
}

SrelEstimate estimate_srel_from_counts(const ShotCounts& counts_a, const ShotCounts& counts_b) {
    counts_a.validate();
    counts_b.validate();
    std::set<std::string> labels;
    for (const auto& [label, n] : counts_a.counts) {
        labels.insert(label);
    }
    for (const auto& [label, n] : counts_b.counts) {
        labels.insert(label);
    }
    if (labels.empty() || counts_a.shots == 0 || counts_b.shots == 0) {
        throw DomainError("estimate_srel_from_counts: empty counts");
    }
    const std::size_t width = labels.begin()->size();
    for (const auto& l : labels) {
        if (l.size() != width) {
            throw DimensionError("estimate_srel_from_counts: bitstrings of different widths");
        }
    }

    auto lookup = [](const ShotCounts& c, const std::string& label) -> double {
        const auto it = c.counts.find(label);
        return it == c.counts.end() ? 0.0 : static_cast<double>(it->second);
    };
    const double na = static_cast<double>(counts_a.shots);
    const double nb = static_cast<double>(counts_b.shots);
    const double cells = static_cast<double>(labels.size());
    std::vector<double> raw_a;
    std::vector<double> raw_b;
    std::vector<double> smooth_a;
    std::vector<double> smooth_b;
    for (const auto& label : labels) {
        const double a = lookup(counts_a, label);
        const double b = lookup(counts_b, label);
        raw_a.push_back(a / na);
        raw_b.push_back(b / nb);
        smooth_a.push_back((a + 0.5) / (na + 0.5 * cells));
        smooth_b.push_back((b + 0.5) / (nb + 0.5 * cells));
    }

    SrelEstimate est;
    est.raw = kl_divergence(raw_a, raw_b);
    est.smoothed = kl_divergence(smooth_a, smooth_b).nats;

    // Var ~ Var_p[ln(p/q)] / n_a + (sum p^2/q - 1) / n_b.
    double mean_log = 0.0;
    double mean_log_sq = 0.0;
    double ratio_sq = 0.0;
    for (std::size_t i = 0; i < smooth_a.size(); ++i) {
        const double l = std::log(smooth_a[i] / smooth_b[i]);
        mean_log += smooth_a[i] * l;
        mean_log_sq += smooth_a[i] * l * l;
        ratio_sq += smooth_a[i] * smooth_a[i] / smooth_b[i];
    }
    const double variance = std::max(mean_log_sq - mean_log * mean_log, 0.0) / na + std::max(ratio_sq - 1.0, 0.0) / nb;
    est.standard_error = std::sqrt(variance);
    return est;
}

}  // namespace qlike
