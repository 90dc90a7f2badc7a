/**
 * @file odeint.hpp
 * @brief Shared adaptive time integration for the particle and continuum
 *        models.
 *
 * Default scheme: explicit Dormand-Prince 5(4) embedded pair with FSAL and a
 * PI step-size controller.  A stiff mode (TR-BDF2, L-stable one-step method
 * with an embedded third-order error reference and a finite-difference
 * Jacobian) is selectable through the settings.  Both schemes keep the local
 * error estimate within atol + rtol*|y| componentwise (RMS-scaled), fire a
 * callback after every accepted step, and are bit-deterministic for identical
 * inputs.
 */
#ifndef CELLFRONT_ODEINT_HPP
#define CELLFRONT_ODEINT_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "cellfront/errors.hpp"

namespace cellfront {

/** Tolerances and step bounds for adaptive integration. */
struct IntegratorSettings {
    double rtol = 1e-8;   ///< relative tolerance (> 0)
    double atol = 1e-10;  ///< absolute tolerance (> 0)
    double h0 = 0.0;      ///< initial step; 0 selects one automatically
    double hmax = std::numeric_limits<double>::infinity();  ///< max step
    long max_steps = 5'000'000;  ///< cap on attempted steps
    bool stiff = false;   ///< use the implicit (TR-BDF2) scheme

    /** Throws ConfigError unless all settings invariants hold. */
    void validate() const {
        if (!(rtol > 0.0) || !(atol > 0.0))
            throw ConfigError("IntegratorSettings: tolerances must be positive");
        if (!(hmax > 0.0))
            throw ConfigError("IntegratorSettings: hmax must be positive");
        if (!(h0 >= 0.0) || h0 > hmax)
            throw ConfigError("IntegratorSettings: need 0 <= h0 <= hmax");
        if (max_steps < 1)
            throw ConfigError("IntegratorSettings: max_steps must be >= 1");
    }
};

/** Final state plus the accepted-step log of one integration. */
struct IntegrateResult {
    double t = 0.0;                   ///< time actually reached
    Eigen::VectorXd y;                ///< state at t
    std::vector<double> t_accepted;   ///< times after each accepted step
    long n_accepted = 0;
    long n_rejected = 0;
    long n_rhs = 0;                   ///< right-hand-side evaluations
    bool stopped_early = false;       ///< callback requested termination
};

namespace ode_detail {

/** RMS norm of e scaled by atol + rtol*max(|y|,|ynew|) componentwise. */
inline double error_norm(const Eigen::VectorXd& e, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& ynew, double rtol, double atol) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < e.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        const double q = e[i] / sc;
        acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(e.size()));
}

/** Smallest step meaningfully representable around |t| (underflow floor). */
inline double step_floor(double t, double t_end) {
    const double scale = std::max({std::abs(t), std::abs(t_end), 1e-300});
    return 16.0 * std::numeric_limits<double>::epsilon() * scale;
}

/** Standard initial-step heuristic from the scaled norms of y0 and f(y0). */
template <class Rhs>
double initial_step(Rhs& rhs, double t0, const Eigen::VectorXd& y0,
                    const Eigen::VectorXd& f0, double t1,
                    const IntegratorSettings& s, long& n_rhs, int order) {
    const auto scnorm = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& ref) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const double sc = s.atol + s.rtol * std::abs(ref[i]);
            const double q = v[i] / sc;
            acc += q * q;
        }
        return std::sqrt(acc / static_cast<double>(v.size()));
    };
    const double span = t1 - t0;
    const double d0 = scnorm(y0, y0);
    const double d1 = scnorm(f0, y0);
    // Fallbacks scale with the span: integrations here run over anything from
    // fractions of a second to 1e11-second horizons, and a fixed absolute
    // guess can start below the step-underflow floor.
    double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * span : 0.01 * (d0 / d1);
    h = std::min(h, span);
    Eigen::VectorXd y1 = y0 + h * f0;
    Eigen::VectorXd f1(y0.size());
    rhs(t0 + h, y1, f1);
    ++n_rhs;
    double h1;
    if (f1.allFinite()) {
        const double d2 = scnorm(f1 - f0, y0) / h;
        const double d12 = std::max(d1, d2);
        h1 = (d12 <= 1e-15) ? std::max(1e-6 * span, h * 1e-3)
                            : std::pow(0.01 / d12, 1.0 / order);
    } else {
        h1 = h * 1e-3;
    }
    return std::min({100.0 * h, h1, s.hmax, t1 - t0});
}

// Dormand-Prince 5(4) tableau.
inline constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double kA21 = 1.0 / 5;
inline constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
inline constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
inline constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                        kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
inline constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                        kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                        kA65 = -5103.0 / 18656;
inline constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                        kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
inline constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                        kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

template <class Rhs, class Callback>
IntegrateResult run_dopri5(Rhs&& rhs, const Eigen::VectorXd& y0, double t0,
                           double t1, const IntegratorSettings& s, Callback&& cb) {
    const Eigen::Index n = y0.size();
    IntegrateResult res;
    res.y = y0;
    double t = t0;

    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    Eigen::VectorXd ytmp(n), ynew(n), errv(n);

    rhs(t, res.y, k1);
    ++res.n_rhs;
    if (!k1.allFinite())
        throw NonFiniteDerivative("integrate: derivative not finite at the initial state");

    double h = (s.h0 > 0.0) ? std::min(s.h0, t1 - t0)
                            : initial_step(rhs, t0, res.y, k1, t1, s, res.n_rhs, 5);
    double errold = 1e-4;
    bool just_rejected = false;
    constexpr double kBeta = 0.04, kExpo = 0.2 - 0.75 * kBeta;
    constexpr double kSafety = 0.9, kFacMin = 0.2, kFacMax = 10.0;

    while (t < t1) {
        if (res.n_accepted + res.n_rejected >= s.max_steps)
            throw MaxStepsExceeded("integrate: step cap reached");
        if (!(h > step_floor(t, t1)))
            throw StepUnderflow("integrate: step size underflow");
        bool last = false;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }

        ytmp = res.y + h * (kA21 * k1);
        rhs(t + kC[1] * h, ytmp, k2);
        ytmp = res.y + h * (kA31 * k1 + kA32 * k2);
        rhs(t + kC[2] * h, ytmp, k3);
        ytmp = res.y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3);
        rhs(t + kC[3] * h, ytmp, k4);
        ytmp = res.y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
        rhs(t + kC[4] * h, ytmp, k5);
        ytmp = res.y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
        rhs(t + h, ytmp, k6);
        ynew = res.y + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
        rhs(t + h, ynew, k7);
        res.n_rhs += 6;

        double err;
        if (!ynew.allFinite() || !k7.allFinite()) {
            err = std::numeric_limits<double>::infinity();
        } else {
            errv = h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);
            err = errv.allFinite() ? error_norm(errv, res.y, ynew, s.rtol, s.atol)
                                   : std::numeric_limits<double>::infinity();
        }

        if (err <= 1.0) {
            t = last ? t1 : t + h;
            res.y.swap(ynew);
            k1.swap(k7);  // FSAL
            ++res.n_accepted;
            res.t_accepted.push_back(t);
            if (!cb(t, res.y)) {
                res.stopped_early = true;
                break;
            }
            double fac;
            if (std::isfinite(err) && err > 0.0) {
                fac = std::pow(err, kExpo) / (kSafety * std::pow(errold, kBeta));
            } else {
                fac = 1.0 / kFacMax;
            }
            fac = std::max(1.0 / kFacMax, std::min(1.0 / kFacMin, fac));
            if (just_rejected) fac = std::max(fac, 1.0);  // no growth right after a rejection
            h = std::min(h / fac, s.hmax);
            errold = std::max(err, 1e-4);
            just_rejected = false;
        } else {
            ++res.n_rejected;
            just_rejected = true;
            if (std::isfinite(err)) {
                const double fac = std::min(1.0 / kFacMin,
                                            std::pow(err, kExpo) / kSafety);
                h /= fac;
            } else {
                h *= 0.5;
            }
        }
    }
    res.t = t;
    return res;
}

template <class Rhs, class Callback>
IntegrateResult run_trbdf2(Rhs&& rhs, const Eigen::VectorXd& y0, double t0,
                           double t1, const IntegratorSettings& s, Callback&& cb) {
    const Eigen::Index n = y0.size();
    IntegrateResult res;
    res.y = y0;
    double t = t0;

    const double gam = 2.0 - std::sqrt(2.0);
    const double d = gam / 2.0;                       // same implicit weight in both stages
    const double a2 = 1.0 / (gam * (2.0 - gam));
    const double a1 = 1.0 - a2;
    // Weights of the quadratic (three-node Lagrange) reconstruction of the
    // derivative, integrated over the step: the third-order error reference.
    const double w0 = 0.5 - 1.0 / (6.0 * gam);
    const double w1 = 1.0 / (6.0 * gam * (1.0 - gam));
    const double w2 = (2.0 - 3.0 * gam) / (6.0 * (1.0 - gam));

    Eigen::VectorXd f0(n), fg(n), f1(n), yg(n), ynew(n), errv(n);
    Eigen::VectorXd g(n), delta(n), ypert(n), fpert(n);
    Eigen::MatrixXd J(n, n), M(n, n);

    rhs(t, res.y, f0);
    ++res.n_rhs;
    if (!f0.allFinite())
        throw NonFiniteDerivative("integrate: derivative not finite at the initial state");

    double h = (s.h0 > 0.0) ? std::min(s.h0, t1 - t0)
                            : initial_step(rhs, t0, res.y, f0, t1, s, res.n_rhs, 3);

    const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());

    // Solves x - d*h*f(tx, x) = b by damped modified Newton with the supplied
    // LU factor of M = I - d*h*J; returns false when it fails to converge.
    const auto newton_solve =
        [&](double tx, const Eigen::PartialPivLU<Eigen::MatrixXd>& lu,
            const Eigen::VectorXd& b, Eigen::VectorXd& x, Eigen::VectorXd& fx) {
            double prev_norm = std::numeric_limits<double>::infinity();
            for (int it = 0; it < 15; ++it) {
                rhs(tx, x, fx);
                ++res.n_rhs;
                if (!fx.allFinite()) return false;
                g = x - d * h * fx - b;
                delta = lu.solve(-g);
                if (!delta.allFinite()) return false;
                const double dn = error_norm(delta, x, x, s.rtol, s.atol);
                const double lambda = (dn > prev_norm) ? 0.5 : 1.0;  // damp growth
                x += lambda * delta;
                if (dn * lambda < 1e-2) {
                    rhs(tx, x, fx);
                    ++res.n_rhs;
                    return fx.allFinite();
                }
                prev_norm = dn;
            }
            return false;
        };

    while (t < t1) {
        if (res.n_accepted + res.n_rejected >= s.max_steps)
            throw MaxStepsExceeded("integrate: step cap reached");
        if (!(h > step_floor(t, t1)))
            throw StepUnderflow("integrate: step size underflow");
        bool last = false;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }

        // Finite-difference Jacobian at the step base, reused by both stages.
        for (Eigen::Index j = 0; j < n; ++j) {
            const double dy = sqrt_eps * std::max(std::abs(res.y[j]), 1e-8);
            ypert = res.y;
            ypert[j] += dy;
            rhs(t, ypert, fpert);
            J.col(j) = (fpert - f0) / dy;
        }
        res.n_rhs += static_cast<long>(n);
        bool ok = J.allFinite();

        double err = std::numeric_limits<double>::infinity();
        if (ok) {
            M = Eigen::MatrixXd::Identity(n, n) - (d * h) * J;
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);

            yg = res.y;  // predictor: previous state
            ok = newton_solve(t + gam * h, lu, res.y + (d * h) * f0, yg, fg);
            if (ok) {
                ynew = yg;
                ok = newton_solve(t + h, lu, a1 * res.y + a2 * yg, ynew, f1);
            }
            if (ok) {
                errv = res.y + h * (w0 * f0 + w1 * fg + w2 * f1) - ynew;
                err = errv.allFinite()
                          ? error_norm(errv, res.y, ynew, s.rtol, s.atol)
                          : std::numeric_limits<double>::infinity();
            }
        }

        if (ok && err <= 1.0) {
            t = last ? t1 : t + h;
            res.y.swap(ynew);
            f0.swap(f1);
            ++res.n_accepted;
            res.t_accepted.push_back(t);
            if (!cb(t, res.y)) {
                res.stopped_early = true;
                break;
            }
            const double fac = (std::isfinite(err) && err > 0.0)
                                   ? 0.9 * std::pow(err, -1.0 / 3.0)
                                   : 5.0;
            h = std::min({h * std::max(0.2, std::min(5.0, fac)), s.hmax});
        } else {
            ++res.n_rejected;
            if (ok && std::isfinite(err)) {
                const double fac = 0.9 * std::pow(err, -1.0 / 3.0);
                h *= std::max(0.2, std::min(0.9, fac));
            } else {
                h *= 0.25;  // Newton or evaluation failure
            }
        }
    }
    res.t = t;
    return res;
}

} // namespace ode_detail

/**
 * Integrates dy/dt = rhs(t, y) from t0 to t1 under the given settings.
 *
 * @param rhs  callable rhs(t, y, dydt) writing the derivative into dydt.
 * @param cb   callable cb(t, y) fired after each accepted step; returning
 *             false terminates the integration early (flagged on the result).
 *
 * The scheme is the explicit embedded pair unless settings.stiff is set, in
 * which case the implicit TR-BDF2 scheme with a finite-difference Jacobian is
 * used.  Both control the local error to atol + rtol*|y| componentwise.
 *
 * @throws ConfigError          on invalid settings or a degenerate span.
 * @throws NonFiniteDerivative  if rhs is not finite at (t0, y0).
 * @throws StepUnderflow        if the step size collapses.
 * @throws MaxStepsExceeded     if the attempted-step cap is hit.
 */
template <class Rhs, class Callback>
IntegrateResult integrate(Rhs&& rhs, const Eigen::VectorXd& y0, double t0,
                          double t1, const IntegratorSettings& s, Callback&& cb) {
    s.validate();
    if (!(t1 > t0)) throw ConfigError("integrate: need t1 > t0");
    if (y0.size() == 0) throw ConfigError("integrate: empty state");
    if (s.stiff)
        return ode_detail::run_trbdf2(std::forward<Rhs>(rhs), y0, t0, t1, s,
                                      std::forward<Callback>(cb));
    return ode_detail::run_dopri5(std::forward<Rhs>(rhs), y0, t0, t1, s,
                                  std::forward<Callback>(cb));
}

/** integrate() without a step callback. */
template <class Rhs>
IntegrateResult integrate(Rhs&& rhs, const Eigen::VectorXd& y0, double t0,
                          double t1, const IntegratorSettings& s) {
    return integrate(std::forward<Rhs>(rhs), y0, t0, t1, s,
                     [](double, const Eigen::VectorXd&) { return true; });
}

} // namespace cellfront

#endif // CELLFRONT_ODEINT_HPP
