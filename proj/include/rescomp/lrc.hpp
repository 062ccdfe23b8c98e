#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "rescomp/time_grid.hpp"

namespace rescomp {

/// Bank of independent series-LRC subcircuits.  Subcircuit n (1-based) has
/// component values l_n, r_n, c_n and eigenvalues -gamma_n +- i omega_n with
/// gamma_n = r_n / (2 l_n), omega_n = sqrt(1/(l_n c_n) - gamma_n^2).
struct LrcBank {
    Eigen::VectorXd inductance;   // l_n
    Eigen::VectorXd resistance;   // r_n
    Eigen::VectorXd capacitance;  // c_n

    [[nodiscard]] int size() const { return static_cast<int>(inductance.size()); }

    [[nodiscard]] double gamma(int i) const { return resistance(i) / (2.0 * inductance(i)); }
    [[nodiscard]] double omega(int i) const {
        const double w2 = 1.0 / (inductance(i) * capacitance(i)) - gamma(i) * gamma(i);
        return std::sqrt(w2);
    }
    [[nodiscard]] std::complex<double> lambda_plus(int i) const {
        return {-gamma(i), omega(i)};
    }

    void validate() const {
        if (size() < 1) throw ArgumentError("LrcBank: empty bank");
        if (resistance.size() != size() || capacitance.size() != size())
            throw ArgumentError("LrcBank: mismatched component vectors");
        for (int i = 0; i < size(); ++i) {
            if (!(inductance(i) > 0.0) || !(capacitance(i) > 0.0))
                throw ArgumentError("LrcBank: l and c must be positive");
            if (resistance(i) < 0.0) throw ArgumentError("LrcBank: r must be non-negative");
            const double g = gamma(i);
            if (!(1.0 / (inductance(i) * capacitance(i)) > g * g))
                throw ArgumentError("LrcBank: subcircuit is not underdamped");
        }
    }
};

/// Design a bank whose eigenvalues form the comb -gamma +- i n delta_omega,
/// n = 1..N: l_n = 1, r_n = 2 gamma, c_n = 1 / (n^2 delta_omega^2 + gamma^2).
inline LrcBank design_bank(double gamma, double delta_omega, int n) {
    if (!(gamma > 0.0) || !(delta_omega > 0.0) || n < 1)
        throw ArgumentError("design_bank: need gamma > 0, delta_omega > 0, N >= 1");
    LrcBank bank;
    bank.inductance = Eigen::VectorXd::Ones(n);
    bank.resistance = Eigen::VectorXd::Constant(n, 2.0 * gamma);
    bank.capacitance.resize(n);
    for (int i = 0; i < n; ++i) {
        const double w = static_cast<double>(i + 1) * delta_omega;
        bank.capacitance(i) = 1.0 / (w * w + gamma * gamma);
    }
    bank.validate();
    return bank;
}

/// Complex filter state for q/qdot recovery: f = l (qdot + gamma q) + i l omega q.
inline std::complex<double> lrc_state_from_qqdot(const LrcBank& bank, int i, double q,
                                                 double qdot) {
    const double l = bank.inductance(i);
    return {l * (qdot + bank.gamma(i) * q), l * bank.omega(i) * q};
}

/// Closed-form simulation of the bank driven by a single-channel signal.
///
/// Each subcircuit carries f(t) = int_0^t exp(lambda_+ (t - s)) u(s) ds,
/// advanced one sample at a time with the in-step integral evaluated exactly
/// for u linear between samples.  This keeps long runs free of phase drift.
/// q and qdot are recovered from f (and its conjugate partner) through the
/// 2x2 long-time-limit map.  Output channels: q_1..q_N then qdot_1..qdot_N.
inline Trajectory simulate_exact(const LrcBank& bank, const Trajectory& u,
                                 const std::vector<std::complex<double>>& f0 = {}) {
    bank.validate();
    if (u.channels() != 1) throw ArgumentError("simulate_exact: expected a single-channel drive");
    if (!f0.empty() && static_cast<int>(f0.size()) != bank.size())
        throw ArgumentError("simulate_exact: initial state size mismatch");

    const int n = bank.size();
    const double dt = u.grid.dt;
    Trajectory out(u.grid, 2 * n);
    out.seed = u.seed;
    out.has_seed = u.has_seed;

    for (int i = 0; i < n; ++i) {
        const std::complex<double> lambda = bank.lambda_plus(i);
        const std::complex<double> step = std::exp(lambda * dt);
        const std::complex<double> em1 = step - 1.0;
        // coefficients of u_k and u_{k+1} in the in-step integral
        const std::complex<double> c1 = em1 / (lambda * lambda * dt) - 1.0 / lambda;
        const std::complex<double> c0 = em1 / lambda - c1;

        const double inv_lw = 1.0 / (bank.inductance(i) * bank.omega(i));
        std::complex<double> f = f0.empty() ? std::complex<double>{0.0, 0.0} : f0[static_cast<std::size_t>(i)];
        out.values(0, i) = f.imag() * inv_lw;
        out.values(0, n + i) = (lambda * f).imag() * inv_lw;
        for (std::int64_t k = 0; k + 1 < u.grid.n_steps; ++k) {
            f = step * f + c0 * u.values(k, 0) + c1 * u.values(k + 1, 0);
            out.values(k + 1, i) = f.imag() * inv_lw;
            out.values(k + 1, n + i) = (lambda * f).imag() * inv_lw;
        }
    }
    return out;
}

/// Trained readout weights over a bank, split by channel role.
struct KernelWeights {
    Eigen::VectorXd w_q;
    Eigen::VectorXd w_qdot;
    double w_const = 0.0;

    /// Split a flat readout vector laid out as [q_1..q_N, qdot_1..qdot_N, const].
    [[nodiscard]] static KernelWeights from_readout(const Eigen::VectorXd& weights, int n) {
        if (weights.size() != 2 * n + 1)
            throw ArgumentError("KernelWeights: readout length != 2N + 1");
        KernelWeights w;
        w.w_q = weights.segment(0, n);
        w.w_qdot = weights.segment(n, n);
        w.w_const = weights(2 * n);
        return w;
    }
};

/// Explicit kernel of the trained readout,
///   K(tau) = exp(-gamma tau) sum_n 1/(l_n n dw) [ w_q_n sin(n dw tau)
///            + w_qdot_n (n dw cos(n dw tau) - gamma sin(n dw tau)) ],
/// evaluated on tau_grid.  Requires a comb-designed bank (gamma_n constant,
/// omega_n = n dw), which design_bank produces.
inline Eigen::VectorXd kernel_from_weights(const LrcBank& bank, const KernelWeights& w,
                                           const Eigen::VectorXd& tau_grid) {
    bank.validate();
    const int n = bank.size();
    if (w.w_q.size() != n || w.w_qdot.size() != n)
        throw ArgumentError("kernel_from_weights: weight length mismatch");
    if (!w.w_q.allFinite() || !w.w_qdot.allFinite() || !std::isfinite(w.w_const))
        throw ArgumentError("kernel_from_weights: non-finite weights");

    const double gamma = bank.gamma(0);
    Eigen::VectorXd kernel = Eigen::VectorXd::Zero(tau_grid.size());
    for (Eigen::Index t = 0; t < tau_grid.size(); ++t) {
        const double tau = tau_grid(t);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double w_n = bank.omega(i);
            const double s = std::sin(w_n * tau);
            const double c = std::cos(w_n * tau);
            acc += (w.w_q(i) * s + w.w_qdot(i) * (w_n * c - gamma * s)) /
                   (bank.inductance(i) * w_n);
        }
        kernel(t) = std::exp(-gamma * tau) * acc;
    }
    return kernel;
}

}  // namespace rescomp
