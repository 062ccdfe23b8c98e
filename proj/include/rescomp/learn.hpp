#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "rescomp/signal.hpp"
#include "rescomp/time_grid.hpp"

namespace rescomp {

struct RidgeOptions {
    double k = 1e-4;               // penalty on the normal equations (sum convention)
    bool include_constant = true;  // append a constant channel, penalized like the rest
};

/// One trained readout.  capacity = 1 - nmse on the training window; the
/// generalization error is filled in by generalization_nmse and is not
/// bounded by 1.
struct ReadoutFit {
    Eigen::VectorXd weights;  // [channels..., constant] when the constant is included
    double nmse = 0.0;
    double capacity = 0.0;
    double gen_nmse = std::numeric_limits<double>::quiet_NaN();
    double ridge_k = 0.0;
    bool constant_included = true;
};

/// Ridge regression against a fixed reservoir trajectory and training
/// window.  The Gram matrix is factorized once, so sweeps over many targets
/// (memory functions, capacity grids) reuse it; right-hand sides are cheap.
class RidgeSolver {
public:
    RidgeSolver(const Trajectory& x, Window window, RidgeOptions opts = {})
        : x_(&x), window_(window), opts_(opts) {
        x.check_finite("RidgeSolver");
        if (!(opts.k >= 0.0)) throw ArgumentError("RidgeSolver: ridge parameter must be >= 0");
        indices_ = window_indices(x.grid, window, {&x});
        if (indices_.size() < 2) throw ArgumentError("RidgeSolver: empty training window");
        contiguous_ = indices_.back() - indices_.front() + 1 ==
                      static_cast<std::int64_t>(indices_.size());
        if (!contiguous_) {
            gathered_.resize(static_cast<Eigen::Index>(indices_.size()), x.channels());
            for (std::size_t i = 0; i < indices_.size(); ++i)
                gathered_.row(static_cast<Eigen::Index>(i)) = x.values.row(indices_[i]);
        }
        factorize();
    }

    [[nodiscard]] const std::vector<std::int64_t>& indices() const { return indices_; }
    [[nodiscard]] const Window& window() const { return window_; }
    [[nodiscard]] const RidgeOptions& options() const { return opts_; }

    [[nodiscard]] ReadoutFit fit(const Trajectory& z) const {
        check_target(z);
        if (target_has_flags(z)) return fit_masked(z);
        const Eigen::VectorXd zs = gather_target(z);
        return fit_gathered(zs);
    }

    /// Fit many targets against the shared factorization.  All targets must
    /// be clean (no burn-in flags) inside the window.
    [[nodiscard]] std::vector<ReadoutFit> fit_batch(const std::vector<const Trajectory*>& zs) const {
        const auto n = static_cast<Eigen::Index>(indices_.size());
        Eigen::MatrixXd z(n, static_cast<Eigen::Index>(zs.size()));
        for (std::size_t j = 0; j < zs.size(); ++j) {
            check_target(*zs[j]);
            if (target_has_flags(*zs[j]))
                throw ArgumentError("RidgeSolver::fit_batch: target flagged inside the window");
            z.col(static_cast<Eigen::Index>(j)) = gather_target(*zs[j]);
        }

        const Eigen::Index p = dim();
        Eigen::MatrixXd rhs(p, z.cols());
        rhs.topRows(x_->channels()).noalias() = design().transpose() * z;
        if (opts_.include_constant) rhs.row(p - 1) = z.colwise().sum();
        const Eigen::MatrixXd w = llt_.solve(rhs);

        Eigen::MatrixXd resid = z;
        resid.noalias() -= design() * w.topRows(x_->channels());
        if (opts_.include_constant) resid.rowwise() -= w.row(p - 1);

        std::vector<ReadoutFit> out(zs.size());
        for (std::size_t j = 0; j < zs.size(); ++j) {
            const auto c = static_cast<Eigen::Index>(j);
            const double mz2 = z.col(c).squaredNorm() / static_cast<double>(n);
            if (!(mz2 > 0.0))
                throw UndefinedCapacityError("ridge fit: target has zero power on the window");
            ReadoutFit f;
            f.weights = w.col(c);
            f.nmse = resid.col(c).squaredNorm() / static_cast<double>(n) / mz2;
            f.capacity = 1.0 - f.nmse;
            f.ridge_k = opts_.k;
            f.constant_included = opts_.include_constant;
            out[j] = std::move(f);
        }
        return out;
    }

private:
    [[nodiscard]] Eigen::Index dim() const {
        return x_->channels() + (opts_.include_constant ? 1 : 0);
    }

    [[nodiscard]] Eigen::Block<const Eigen::MatrixXd> design() const {
        return contiguous_ ? x_->values.middleRows(indices_.front(),
                                                   static_cast<Eigen::Index>(indices_.size()))
                           : gathered_.middleRows(0, static_cast<Eigen::Index>(indices_.size()));
    }

    void factorize() {
        const auto n = static_cast<Eigen::Index>(indices_.size());
        const Eigen::Index c = x_->channels();
        Eigen::MatrixXd gram(dim(), dim());
        gram.topLeftCorner(c, c).noalias() = design().transpose() * design();
        if (opts_.include_constant) {
            gram.block(0, c, c, 1) = design().colwise().sum().transpose();
            gram.block(c, 0, 1, c) = gram.block(0, c, c, 1).transpose();
            gram(c, c) = static_cast<double>(n);
        }
        gram.diagonal().array() += opts_.k;
        llt_.compute(gram);
        if (llt_.info() != Eigen::Success)
            throw NumericalError("RidgeSolver: Gram factorization failed");
    }

    void check_target(const Trajectory& z) const {
        if (z.channels() != 1) throw ArgumentError("ridge fit: target must have one channel");
        if (!z.grid.matches(x_->grid)) throw ArgumentError("ridge fit: target grid mismatch");
        z.check_finite("ridge fit target");
    }

    [[nodiscard]] bool target_has_flags(const Trajectory& z) const {
        if (z.burn_in.empty()) return false;
        for (std::int64_t k : indices_)
            if (z.flagged(k)) return true;
        return false;
    }

    [[nodiscard]] Eigen::VectorXd gather_target(const Trajectory& z) const {
        Eigen::VectorXd zs(static_cast<Eigen::Index>(indices_.size()));
        for (std::size_t i = 0; i < indices_.size(); ++i)
            zs(static_cast<Eigen::Index>(i)) = z.values(indices_[i], 0);
        return zs;
    }

    [[nodiscard]] ReadoutFit fit_gathered(const Eigen::VectorXd& zs) const {
        const auto n = static_cast<Eigen::Index>(indices_.size());
        const double mz2 = zs.squaredNorm() / static_cast<double>(n);
        if (!(mz2 > 0.0))
            throw UndefinedCapacityError("ridge fit: target has zero power on the window");

        const Eigen::Index p = dim();
        Eigen::VectorXd rhs(p);
        rhs.head(x_->channels()).noalias() = design().transpose() * zs;
        if (opts_.include_constant) rhs(p - 1) = zs.sum();
        ReadoutFit f;
        f.weights = llt_.solve(rhs);
        Eigen::VectorXd resid = zs;
        resid.noalias() -= design() * f.weights.head(x_->channels());
        if (opts_.include_constant) resid.array() -= f.weights(p - 1);
        f.nmse = resid.squaredNorm() / static_cast<double>(n) / mz2;
        f.capacity = 1.0 - f.nmse;
        f.ridge_k = opts_.k;
        f.constant_included = opts_.include_constant;
        return f;
    }

    // One-off solve on the window minus the target's flagged samples.
    [[nodiscard]] ReadoutFit fit_masked(const Trajectory& z) const {
        std::vector<std::int64_t> idx;
        for (std::int64_t k : indices_)
            if (!z.flagged(k)) idx.push_back(k);
        if (idx.size() < 2) throw ArgumentError("ridge fit: window fully flagged for this target");

        const auto n = static_cast<Eigen::Index>(idx.size());
        const Eigen::Index c = x_->channels();
        Eigen::MatrixXd xs(n, c);
        Eigen::VectorXd zs(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            xs.row(i) = x_->values.row(idx[static_cast<std::size_t>(i)]);
            zs(i) = z.values(idx[static_cast<std::size_t>(i)], 0);
        }
        const double mz2 = zs.squaredNorm() / static_cast<double>(n);
        if (!(mz2 > 0.0))
            throw UndefinedCapacityError("ridge fit: target has zero power on the window");

        const Eigen::Index p = dim();
        Eigen::MatrixXd gram(p, p);
        gram.topLeftCorner(c, c).noalias() = xs.transpose() * xs;
        if (opts_.include_constant) {
            gram.block(0, c, c, 1) = xs.colwise().sum().transpose();
            gram.block(c, 0, 1, c) = gram.block(0, c, c, 1).transpose();
            gram(c, c) = static_cast<double>(n);
        }
        gram.diagonal().array() += opts_.k;
        Eigen::VectorXd rhs(p);
        rhs.head(c).noalias() = xs.transpose() * zs;
        if (opts_.include_constant) rhs(p - 1) = zs.sum();

        ReadoutFit f;
        f.weights = Eigen::LDLT<Eigen::MatrixXd>(gram).solve(rhs);
        Eigen::VectorXd resid = zs - xs * f.weights.head(c);
        if (opts_.include_constant) resid.array() -= f.weights(p - 1);
        f.nmse = resid.squaredNorm() / static_cast<double>(n) / mz2;
        f.capacity = 1.0 - f.nmse;
        f.ridge_k = opts_.k;
        f.constant_included = opts_.include_constant;
        return f;
    }

    const Trajectory* x_;
    Window window_;
    RidgeOptions opts_;
    std::vector<std::int64_t> indices_;
    bool contiguous_ = true;
    Eigen::MatrixXd gathered_;
    Eigen::LDLT<Eigen::MatrixXd> llt_;
};

inline ReadoutFit ridge_fit(const Trajectory& x, const Trajectory& z, double k, Window window) {
    RidgeOptions opts;
    opts.k = k;
    return RidgeSolver(x, window, opts).fit(z);
}

/// Reconstruction error of an existing fit on a fresh window,
/// mean((z - zhat)^2) / mean(z^2); not bounded by 1.
inline double generalization_nmse(const ReadoutFit& fit, const Trajectory& x, const Trajectory& z,
                                  Window test_window) {
    if (!z.grid.matches(x.grid)) throw ArgumentError("generalization_nmse: grid mismatch");
    const auto idx = window_indices(x.grid, test_window, {&x, &z});
    if (idx.empty()) throw ArgumentError("generalization_nmse: empty test window");
    const Eigen::Index c = x.channels();
    const bool with_const = fit.constant_included;
    if (fit.weights.size() != c + (with_const ? 1 : 0))
        throw ArgumentError("generalization_nmse: weight length mismatch");

    double num = 0.0, den = 0.0;
    for (std::int64_t k : idx) {
        double zhat = x.values.row(k) * fit.weights.head(c);
        if (with_const) zhat += fit.weights(c);
        const double zv = z.values(k, 0);
        num += (zv - zhat) * (zv - zhat);
        den += zv * zv;
    }
    if (!(den > 0.0))
        throw UndefinedCapacityError("generalization_nmse: target has zero power on the window");
    return num / den;
}

inline double memory_function(const RidgeSolver& solver, const Trajectory& u, double tau) {
    return solver.fit(delayed_target(u, tau)).capacity;
}

/// m(tau): capacity to reconstruct u(t - tau).
inline double memory_function(const Trajectory& x, const Trajectory& u, double tau, Window window,
                              double k = 1e-4) {
    RidgeOptions opts;
    opts.k = k;
    return memory_function(RidgeSolver(x, window, opts), u, tau);
}

inline double quadratic_memory_function(const RidgeSolver& solver, const Trajectory& u,
                                        double tau1, double tau2) {
    return solver.fit(product_target(u, tau1, tau2)).capacity;
}

/// m2(tau1, tau2): capacity to reconstruct u(t - tau1) u(t - tau2).
inline double quadratic_memory_function(const Trajectory& x, const Trajectory& u, double tau1,
                                        double tau2, Window window, double k = 1e-4) {
    RidgeOptions opts;
    opts.k = k;
    return quadratic_memory_function(RidgeSolver(x, window, opts), u, tau1, tau2);
}

/// Total (linear or quadratic) memory capacity with its error budget.
struct CapacityReport {
    double epsilon = 0.1;
    double tau_eps = 0.0;   // linear: crossing delay; quadratic: area content
    double tau_star = 0.0;  // quadratic: diagonal crossing delay
    double e_int = 0.0;
    double e_fit = 0.0;
    double e_tot = 0.0;
    bool below_threshold_at_zero = false;
    bool saturated = false;  // probe cap reached without a crossing
    std::vector<std::array<double, 3>> samples;  // (tau1, tau2, m2) for quadratic grids

    void finalize_errors() { e_tot = std::sqrt(e_int * e_int + e_fit * e_fit); }
};

namespace detail {

struct ThresholdCrossing {
    double tau = 0.0;
    bool at_zero = false;
    bool saturated = false;
};

/// Find the delay where a decreasing-beyond-support function crosses the
/// threshold: bracket by doubling, then bisect to |hi - lo| <= tol.
inline ThresholdCrossing bisect_crossing(const std::function<double(double)>& f, double threshold,
                                         double tol, double cap) {
    ThresholdCrossing out;
    if (f(0.0) <= threshold) {
        out.at_zero = true;
        return out;
    }
    double lo = 0.0, hi = 1.0;
    while (f(hi) > threshold) {
        lo = hi;
        hi *= 2.0;
        if (hi > cap) {
            out.tau = lo;
            out.saturated = true;
            return out;
        }
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > threshold ? lo : hi) = mid;
    }
    out.tau = 0.5 * (lo + hi);
    return out;
}

}  // namespace detail

/// Linear memory capacity tau_eps: the delay at which m(tau) crosses
/// 1 - epsilon, located by bisection with termination tolerance 1.
inline CapacityReport linear_capacity(const Trajectory& x, const Trajectory& u, double epsilon,
                                      Window window, double k = 1e-4) {
    RidgeOptions opts;
    opts.k = k;
    const RidgeSolver solver(x, window, opts);
    const double cap = 0.5 * u.grid.duration();
    CapacityReport report;
    report.epsilon = epsilon;
    report.e_int = 1.0;

    const auto crossing = detail::bisect_crossing(
        [&](double tau) { return memory_function(solver, u, tau); }, 1.0 - epsilon, 1.0, cap);
    report.tau_eps = crossing.tau;
    report.tau_star = crossing.tau;
    report.below_threshold_at_zero = crossing.at_zero;
    report.saturated = crossing.saturated;
    report.finalize_errors();
    return report;
}

/// Quadratic capacity from an arbitrary m2 sampler (exposed so the grid
/// integration is testable against synthetic memory functions).
inline CapacityReport quadratic_capacity_from(
    const std::function<double(double, double)>& m2, double epsilon, double grid_spacing = 0.5,
    double cap = 1e6) {
    CapacityReport report;
    report.epsilon = epsilon;
    const double threshold = 1.0 - epsilon;

    const auto crossing = detail::bisect_crossing([&](double tau) { return m2(tau, tau); },
                                                  threshold, 1.0, cap);
    report.tau_star = crossing.tau;
    report.below_threshold_at_zero = crossing.at_zero;
    report.saturated = crossing.saturated;
    if (crossing.at_zero) {
        report.finalize_errors();
        return report;
    }

    const auto cells = static_cast<std::int64_t>(std::floor(2.0 * crossing.tau / grid_spacing)) + 1;
    std::int64_t above = 0;
    for (std::int64_t i = 0; i < cells; ++i) {
        for (std::int64_t j = i; j < cells; ++j) {
            const double t1 = static_cast<double>(i) * grid_spacing;
            const double t2 = static_cast<double>(j) * grid_spacing;
            const double value = m2(t1, t2);
            report.samples.push_back({t1, t2, value});
            if (value > threshold) above += (i == j) ? 1 : 2;
        }
    }
    report.tau_eps = grid_spacing * grid_spacing * static_cast<double>(above);
    report.e_int = 2.0 * grid_spacing * grid_spacing * std::sqrt(report.tau_eps);
    report.finalize_errors();
    return report;
}

/// Quadratic memory capacity tau^(2)_eps: diagonal bisection for the
/// crossing delay tau*, then grid integration of the indicator
/// m2 > 1 - epsilon over [0, 2 tau*]^2 with spacing 0.5.
inline CapacityReport quadratic_capacity(const Trajectory& x, const Trajectory& u, double epsilon,
                                         Window window, double k = 1e-4) {
    RidgeOptions opts;
    opts.k = k;
    const RidgeSolver solver(x, window, opts);
    const double cap = 0.5 * u.grid.duration();
    return quadratic_capacity_from(
        [&](double t1, double t2) { return quadratic_memory_function(solver, u, t1, t2); },
        epsilon, 0.5, cap);
}

/// Peak of the diagonal quadratic memory function on a fixed grid
/// (ties break toward the smaller delay).
struct DiagonalPeak {
    double tau_star = 0.0;
    double m2 = 0.0;
};

inline DiagonalPeak quadratic_diagonal_peak(const Trajectory& x, const Trajectory& u,
                                            double tau_max, Window window, double k = 1e-4,
                                            double spacing = 0.25) {
    RidgeOptions opts;
    opts.k = k;
    const RidgeSolver solver(x, window, opts);
    DiagonalPeak best;
    best.m2 = -std::numeric_limits<double>::infinity();
    for (double tau = 0.0; tau <= tau_max + 1e-9; tau += spacing) {
        const double value = quadratic_memory_function(solver, u, tau, tau);
        if (value > best.m2) {
            best.m2 = value;
            best.tau_star = tau;
        }
    }
    return best;
}

/// Quadratic polynomial fit of capacity against inverse training time;
/// returns the extrapolated capacity (constant coefficient) and the fit
/// error sqrt(cov_00) with the residual variance estimated from the fit.
inline std::pair<double, double> finite_size_extrapolate(
    const std::vector<std::pair<double, double>>& inverse_time_vs_capacity) {
    const auto n = static_cast<Eigen::Index>(inverse_time_vs_capacity.size());
    if (n < 3) throw ArgumentError("finite_size_extrapolate: need at least 3 points");

    Eigen::MatrixXd v(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = inverse_time_vs_capacity[static_cast<std::size_t>(i)].first;
        v(i, 0) = 1.0;
        v(i, 1) = x;
        v(i, 2) = x * x;
        y(i) = inverse_time_vs_capacity[static_cast<std::size_t>(i)].second;
    }
    const Eigen::MatrixXd vtv = v.transpose() * v;
    const Eigen::LDLT<Eigen::MatrixXd> llt(vtv);
    const Eigen::VectorXd coef = llt.solve(v.transpose() * y);
    const double rss = (y - v * coef).squaredNorm();

    double e_fit = 0.0;
    if (n > 3) {
        const double sigma2 = rss / static_cast<double>(n - 3);
        const Eigen::MatrixXd cov = sigma2 * llt.solve(Eigen::MatrixXd::Identity(3, 3));
        e_fit = std::sqrt(std::max(0.0, cov(0, 0)));
    }
    return {coef(0), e_fit};
}

/// Ordinary least-squares line fit, returning slope, intercept and R^2.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

inline LineFit fit_line(const std::vector<std::pair<double, double>>& xy) {
    const auto n = static_cast<double>(xy.size());
    if (xy.size() < 2) throw ArgumentError("fit_line: need at least 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : xy) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    LineFit f;
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-300) throw ArgumentError("fit_line: degenerate abscissae");
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0.0;
    const double mean_y = sy / n;
    double ss_tot = 0.0;
    for (const auto& [x, y] : xy) {
        const double r = y - (f.slope * x + f.intercept);
        ss_res += r * r;
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

}  // namespace rescomp
