/**
 * @file twave.cpp
 * @brief Travelling-wave construction: rear plug, proliferating tail, and
 *        the wave-speed shooting.
 */
#include "cellfront/twave.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cellfront/odeint.hpp"

namespace cellfront {

namespace {

/** Adaptive quadrature used for plug masses (relative tolerance 1e-11). */
double plug_mass_integral(double c, double ell, double P_ell,
                          const ForceLaw& law_B) {
    if (ell <= 0.0) return 0.0;
    const auto rho_at = [&](double z) {
        return pressure_inverse(c * (ell - z) + P_ell, law_B);
    };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        rho_at, 0.0, ell, 12, 1e-11);
}

/** Core plug solve: rear-edge closure and the width carrying mass M. */
struct PlugCore {
    double ell;      // plug width (m)
    double P_ell;    // rear-edge pressure (m^2/s)
    double rho_ell;  // rear-edge density (1/m)
    double P0;       // interface pressure c*ell + P_ell (m^2/s)
    double rho0;     // interface density (1/m)
};

PlugCore solve_plug(double c, double M, const ForceLaw& law_B) {
    if (!(c > 0.0)) throw ConfigError("wave plug: need c > 0");
    if (!(M > 0.0)) throw ConfigError("wave plug: need M > 0");

    // Rear edge: the outward free-boundary speed equals c, so the edge
    // density carries the force eta_B*c/2.
    double rho_ell;
    try {
        rho_ell = density_from_force(0.5 * law_B.eta * c, law_B);
    } catch (const NonConvergence& e) {
        // The edge force already exceeds what compression can deliver: no
        // plug of any width exists at this speed.
        throw BisectionFailure(
            fmt::format("wave plug: rear-edge force {0:g} N not attainable "
                        "by compression ({1})",
                        0.5 * law_B.eta * c, e.what()));
    }
    const double P_ell = pressure(rho_ell, law_B);

    // The pressure potential has a finite supremum, so the interface
    // pressure P(0) = c*ell + P_ell caps the attainable width and mass.
    const double P_sup = pressure_sup(law_B);
    const double ell_cap = (P_sup * (1.0 - 1e-9) - P_ell) / c;
    if (!(ell_cap > 0.0))
        throw BisectionFailure(
            "wave plug: rear-edge pressure exhausts the pressure range");
    const double M_cap = plug_mass_integral(c, ell_cap, P_ell, law_B);
    if (!(M < M_cap))
        throw BisectionFailure(
            fmt::format("wave plug: mass {0:g} above the capacity {1:g} at "
                        "speed {2:g} m/s",
                        M, M_cap, c));

    // The mass is strictly increasing in the width (the profile both extends
    // and lifts), so plain bisection brackets the width.
    double lo = 0.0, hi = ell_cap;
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (plug_mass_integral(c, mid, P_ell, law_B) < M ? lo : hi) = mid;
    }
    const double ell = 0.5 * (lo + hi);
    const double P0 = c * ell + P_ell;
    return PlugCore{ell, P_ell, rho_ell, P0, pressure_inverse(P0, law_B)};
}

/** How a backward tail integration ended. */
enum class ShotEnd {
    Reached,  // got to z_min
    Ceiling,  // pressure exceeded the plateau guard
    Floor,    // pressure fell to the force-free value
    Turned    // pressure slope reversed (production outran advection)
};

/** Accepted-step log of one backward tail integration (s = -z >= 0). */
struct ShotLog {
    ShotEnd end = ShotEnd::Reached;
    std::vector<double> s, P, I;
};

/**
 * Integrates the augmented tail system in the arclength s = -z:
 * dP/ds = c - I/rho(P), dI/ds = G(rho) rho, from (P_A0, 0) at s = 0.
 * Aborts at the ceiling or floor; with detect_turn also when the pressure
 * slope reverses by a clear margin (the undershoot signature).
 *
 * The integrator state is nondimensionalized: pressure in units of the
 * growth-plateau pressure, cumulative flux in units of c times the plateau
 * density.  A levelling trajectory then has both components O(1), so one
 * absolute tolerance serves both; the raw state spans so many decades
 * across candidate speeds that no single dimensional tolerance does.
 */
ShotLog shoot_tail(double c, double P_A0, const ForceLaw& law_A,
                   const GrowthLaw& growth, double S, double ceiling,
                   const WaveOptions& opt, bool detect_turn) {
    const double P_ref = pressure(growth.rho_plateau(), law_A);
    const double I_ref = c * growth.rho_plateau();
    // Below this the pressure is falling irrecoverably: the flux integral
    // only grows, so the slope c - I/rho can never turn positive again
    // once it has driven the pressure six decades under its start.
    const double p_floor = 1e-6 * (P_A0 / P_ref);

    // Stage states may poke slightly beyond an accepted crossing, so the
    // density lookup saturates just under the pressure supremum instead of
    // failing there.
    const double P_cap = pressure_sup(law_A) * (1.0 - 1e-9);
    const auto rho_of = [&](double P) {
        if (P <= 0.0) return law_A.rho_eq;
        return pressure_inverse(std::min(P, P_cap), law_A);
    };
    const auto rhs = [&](double, const Eigen::VectorXd& y,
                         Eigen::VectorXd& dy) {
        const double rho = rho_of(y[0] * P_ref);
        dy[0] = (c - y[1] * I_ref / rho) / P_ref;
        dy[1] = growth_rate(rho, growth) * rho / I_ref;
    };

    ShotLog log;
    log.s.push_back(0.0);
    log.P.push_back(P_A0);
    log.I.push_back(0.0);

    Eigen::VectorXd y0(2);
    y0 << P_A0 / P_ref, 0.0;
    IntegratorSettings set;
    set.rtol = opt.shot_rtol;
    set.atol = opt.shot_atol;
    // Pick the first step from the fastest initial rate rather than the
    // library heuristic: far-from-critical speeds make the flux component
    // ramp so steeply that the heuristic's trial step lands under the
    // integrator's step floor and aborts before stepping at all.
    const double rho0 = rho_of(P_A0);
    const double rate0 = std::max({c / P_ref,
                                   growth_rate(rho0, growth) * rho0 / I_ref,
                                   1.0 / S});
    set.h0 = 1e-2 / rate0;

    integrate(rhs, y0, 0.0, S, set, [&](double s, const Eigen::VectorXd& y) {
        const double P = y[0] * P_ref;
        const double I = y[1] * I_ref;
        log.s.push_back(s);
        log.P.push_back(P);
        log.I.push_back(I);
        if (P >= ceiling) {
            log.end = ShotEnd::Ceiling;
            return false;
        }
        if (y[0] <= p_floor) {
            log.end = ShotEnd::Floor;
            return false;
        }
        if (detect_turn && I >= c * rho_of(P) * (1.0 + 1e-6)) {
            log.end = ShotEnd::Turned;
            return false;
        }
        return true;
    });
    return log;
}

/**
 * Cubic-Hermite value of the logged pressure at arclength s.  Slopes are
 * recomputed from the state itself (dP/ds = c - I/rho), so the interpolant
 * is fourth-order accurate between accepted steps.
 */
double sample_pressure(const ShotLog& log, const std::vector<double>& dP,
                       double s) {
    const auto& sv = log.s;
    if (s <= sv.front()) return log.P.front();
    if (s >= sv.back()) return log.P.back();
    const auto it = std::upper_bound(sv.begin(), sv.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - sv.begin()) - 1;
    const double h = sv[i + 1] - sv[i];
    const double th = (s - sv[i]) / h;
    const double t2 = th * th, t3 = t2 * th;
    const double v = (2.0 * t3 - 3.0 * t2 + 1.0) * log.P[i] +
                     (t3 - 2.0 * t2 + th) * h * dP[i] +
                     (-2.0 * t3 + 3.0 * t2) * log.P[i + 1] +
                     (t3 - t2) * h * dP[i + 1];
    return std::max(v, 0.0);
}

/** Pressure slopes dP/ds at the logged states. */
std::vector<double> log_slopes(const ShotLog& log, double c,
                               const ForceLaw& law_A) {
    const double P_cap = pressure_sup(law_A) * (1.0 - 1e-9);
    std::vector<double> dP(log.s.size());
    for (std::size_t i = 0; i < log.s.size(); ++i) {
        const double P = log.P[i];
        const double rho =
            P <= 0.0 ? law_A.rho_eq : pressure_inverse(std::min(P, P_cap), law_A);
        dP[i] = c - log.I[i] / rho;
    }
    return dP;
}

/** Uniform tail sampling of a completed (Reached) shot log. */
TailProfile sample_tail(const ShotLog& log, double c, double z_min,
                        const ForceLaw& law_A, int n) {
    const double S = -z_min;
    const std::vector<double> dP = log_slopes(log, c, law_A);
    TailProfile tp;
    tp.zgrid.resize(n + 1);
    tp.P.resize(n + 1);
    tp.rho.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double z = z_min + S * (static_cast<double>(k) / n);
        tp.zgrid[k] = z;
        // Endpoints take the integrated states themselves.
        if (k == 0)
            tp.P[k] = log.P.back();
        else if (k == n)
            tp.P[k] = log.P.front();
        else
            tp.P[k] = sample_pressure(log, dP, -z);
        tp.rho[k] = pressure_inverse(tp.P[k], law_A);
    }
    tp.zgrid[n] = 0.0;
    return tp;
}

/** Interface transfer: the tail pressure balancing the plug's edge force. */
double interface_pressure_A(double rho_B0, const ForceLaw& law_A,
                            const ForceLaw& law_B) {
    const double f_B = law_B.force_at_density(rho_B0);
    const double f_A = law_A.eta / law_B.eta * f_B;
    return pressure(density_from_force(f_A, law_A), law_A);
}

/** Linear interpolation on an ascending grid (callers stay inside it). */
double lerp_on_grid(const Eigen::VectorXd& zg, const Eigen::VectorXd& v,
                    double z) {
    const auto* begin = zg.data();
    const auto* end = zg.data() + zg.size();
    const auto* it = std::upper_bound(begin, end, z);
    Eigen::Index i = std::clamp<Eigen::Index>(it - begin, 1, zg.size() - 1) - 1;
    const double th = (z - zg[i]) / (zg[i + 1] - zg[i]);
    return v[i] + th * (v[i + 1] - v[i]);
}

} // namespace

PlugProfile wave_profile_B(double c, double M, const ForceLaw& law_B,
                           const WaveOptions& opt) {
    if (opt.samples_B < 2)
        throw ConfigError("wave plug: need at least 2 sample intervals");
    const PlugCore core = solve_plug(c, M, law_B);

    PlugProfile pp;
    pp.ell = core.ell;
    const int n = opt.samples_B;
    pp.zgrid.resize(n + 1);
    pp.P.resize(n + 1);
    pp.rho.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double z = core.ell * (static_cast<double>(k) / n);
        pp.zgrid[k] = z;
        pp.P[k] = c * (core.ell - z) + core.P_ell;
        pp.rho[k] = pressure_inverse(pp.P[k], law_B);
    }
    return pp;
}

TailProfile wave_profile_A(double c, double P_A0, const ForceLaw& law_A,
                           const GrowthLaw& growth, double z_min,
                           const WaveOptions& opt) {
    if (!(c > 0.0)) throw ConfigError("wave tail: need c > 0");
    if (!(z_min < 0.0)) throw ConfigError("wave tail: need z_min < 0");
    const double P_sup = pressure_sup(law_A);
    if (!(P_A0 > 0.0 && P_A0 < P_sup))
        throw ConfigError(
            "wave tail: interface pressure outside the attainable range");
    if (opt.samples_A < 2)
        throw ConfigError("wave tail: need at least 2 sample intervals");

    const double ceiling =
        std::min(pressure(growth.rho_plateau(), law_A) * (1.0 + opt.guard_rel),
                 P_sup * (1.0 - 1e-6));
    const ShotLog log =
        shoot_tail(c, P_A0, law_A, growth, -z_min, ceiling, opt, false);
    if (log.end == ShotEnd::Ceiling)
        throw ProfileBlowup(fmt::format(
            "wave tail: pressure exceeded the plateau guard at z = {0:g} m "
            "(speed too large)",
            -log.s.back()));
    if (log.end == ShotEnd::Floor)
        throw ProfileBlowup(fmt::format(
            "wave tail: pressure fell to the force-free value at z = {0:g} m "
            "(speed too small)",
            -log.s.back()));
    return sample_tail(log, c, z_min, law_A, opt.samples_A);
}

WaveProfile find_wave_speed(double M, const ForceLaw& law_A,
                            const ForceLaw& law_B, const GrowthLaw& growth,
                            double z_min, double tol, const WaveOptions& opt) {
    if (!(M > 0.0)) throw ConfigError("wave speed: need M > 0");
    if (!(z_min < 0.0)) throw ConfigError("wave speed: need z_min < 0");
    if (!(tol > 0.0 && tol < 0.5))
        throw ConfigError("wave speed: need 0 < tol < 1/2");

    const double P_sup_A = pressure_sup(law_A);
    const double P_target = pressure(growth.rho_plateau(), law_A);
    if (!(P_target > 0.0 && P_target < P_sup_A * (1.0 - 1e-6)))
        throw ConfigError(
            "wave speed: growth plateau outside the attainable pressure range");
    const double ceiling =
        std::min(P_target * (1.0 + 10.0 * tol), P_sup_A * (1.0 - 1e-6));
    const double S = -z_min;

    enum class Trial { Under, Over, Hit };
    ShotLog hit_log;
    PlugCore hit_plug{};
    const auto classify = [&](double c) {
        PlugCore plug;
        try {
            plug = solve_plug(c, M, law_B);
        } catch (const BisectionFailure&) {
            return Trial::Over;  // plug cannot carry M: speed too large
        }
        double P_A0;
        try {
            P_A0 = interface_pressure_A(plug.rho0, law_A, law_B);
        } catch (const NonConvergence&) {
            return Trial::Over;  // demanded force beyond the law's range
        }
        if (P_A0 >= ceiling) return Trial::Over;
        ShotLog log = shoot_tail(c, P_A0, law_A, growth, S, ceiling, opt, true);
        switch (log.end) {
            case ShotEnd::Ceiling: return Trial::Over;
            case ShotEnd::Floor:
            case ShotEnd::Turned: return Trial::Under;
            case ShotEnd::Reached: break;
        }
        const double P_end = log.P.back();
        if (std::fabs(P_end - P_target) <= tol * P_target) {
            hit_log = std::move(log);
            hit_plug = plug;
            return Trial::Hit;
        }
        return P_end > P_target ? Trial::Over : Trial::Under;
    };

    // Upper bracket: the speed at which the plug can just carry M (finite
    // pressure budget => capacity ~ 1/c), slightly reduced; feasibility of
    // the start value is irrelevant because an infeasible plug classifies
    // as an overshoot anyway.
    const auto rho_of_B = [&](double P) { return pressure_inverse(P, law_B); };
    const double P_cap_B = pressure_sup(law_B) * (1.0 - 1e-9);
    double c_hi = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                      rho_of_B, 0.0, P_cap_B, 15, 1e-8) /
                  M;
    for (int it = 0; it < 3; ++it) {
        try {
            const double rho_ell =
                density_from_force(0.5 * law_B.eta * c_hi, law_B);
            const double P_ell = pressure(rho_ell, law_B);
            const double ell_cap = (P_cap_B - P_ell) / c_hi;
            if (!(ell_cap > 0.0)) break;
            c_hi *= plug_mass_integral(c_hi, ell_cap, P_ell, law_B) / M;
        } catch (const NonConvergence&) {
            break;
        }
    }
    c_hi *= 1.0 - 1e-3;
    double c_lo = 1e-6 * c_hi;

    double c = c_hi;
    const Trial t_hi = classify(c_hi);
    bool hit = (t_hi == Trial::Hit);
    Trial t_lo = Trial::Under;
    if (!hit) {
        c = c_lo;
        t_lo = classify(c_lo);
        hit = (t_lo == Trial::Hit);
    }
    if (!hit) {
        if (!(t_lo == Trial::Under && t_hi == Trial::Over))
            throw NoSignChange(fmt::format(
                "wave speed: bracket [{0:g}, {1:g}] m/s classifies as "
                "({2}, {3}), not (undershoot, overshoot)",
                c_lo, c_hi, t_lo == Trial::Under ? "undershoot" : "overshoot",
                t_hi == Trial::Under ? "undershoot" : "overshoot"));
        for (int it = 0; it < opt.max_bisect; ++it) {
            c = 0.5 * (c_lo + c_hi);
            const Trial tr = classify(c);
            if (tr == Trial::Hit) {
                hit = true;
                break;
            }
            (tr == Trial::Under ? c_lo : c_hi) = c;
        }
        if (!hit)
            throw NonConvergence(
                fmt::format("wave speed: bisection exhausted {0} iterations "
                            "without meeting the plateau tolerance {1:g}",
                            opt.max_bisect, tol));
    }

    // Assemble the full profile from the accepted trial.
    WaveProfile wp;
    wp.c = c;
    wp.M = M;
    wp.ell = hit_plug.ell;
    const TailProfile tail = sample_tail(hit_log, c, z_min, law_A, opt.samples_A);
    wp.zgrid_A = tail.zgrid;
    wp.P_A = tail.P;
    wp.rho_A = tail.rho;
    const int nB = opt.samples_B;
    wp.zgrid_B.resize(nB + 1);
    wp.P_B.resize(nB + 1);
    wp.rho_B.resize(nB + 1);
    for (int k = 0; k <= nB; ++k) {
        const double z = hit_plug.ell * (static_cast<double>(k) / nB);
        wp.zgrid_B[k] = z;
        wp.P_B[k] = c * (hit_plug.ell - z) + hit_plug.P_ell;
        wp.rho_B[k] = pressure_inverse(wp.P_B[k], law_B);
    }
    return wp;
}

WaveFitReport compare_wave_to_fbp(const WaveProfile& profile,
                                  const FbpTrajectory& traj, double t_lo,
                                  double t_hi) {
    const FrontSpeeds fs = front_speed(traj, t_lo, t_hi);

    WaveFitReport rep;
    rep.c_measured = fs.c1;
    rep.speed_gap = fs.c1 - profile.c;

    const double z_min = profile.zgrid_A[0];
    for (const FbpState& st : traj.snapshots) {
        if (st.t < t_lo || st.t > t_hi) continue;

        double sum_d2 = 0.0, sum_r2 = 0.0, max_d = 0.0, max_r = 0.0;
        long kept_A = 0, kept_B = 0;

        // Population A: nodes at z = s0 + j*hA - s1, compared on [z_min, 0].
        const Eigen::Index NA = st.uA.size() - 1;
        const double hA = (st.s1 - st.s0) / static_cast<double>(NA);
        double prev_d = 0.0, prev_r = 0.0;
        bool have_prev = false;
        for (Eigen::Index j = 0; j <= NA; ++j) {
            const double z = st.s0 + hA * static_cast<double>(j) - st.s1;
            if (z < z_min) {
                have_prev = false;
                continue;
            }
            const double ref = lerp_on_grid(profile.zgrid_A, profile.rho_A, z);
            const double d = st.uA[j] - ref;
            max_d = std::max(max_d, std::fabs(d));
            max_r = std::max(max_r, std::fabs(ref));
            if (have_prev) {
                sum_d2 += 0.5 * hA * (prev_d * prev_d + d * d);
                sum_r2 += 0.5 * hA * (prev_r * prev_r + ref * ref);
            }
            prev_d = d;
            prev_r = ref;
            have_prev = true;
            ++kept_A;
        }

        // Population B: nodes at z = j*hB, compared on [0, ell].
        const Eigen::Index NB = st.uB.size() - 1;
        const double hB = (st.s2 - st.s1) / static_cast<double>(NB);
        have_prev = false;
        for (Eigen::Index j = 0; j <= NB; ++j) {
            const double z = hB * static_cast<double>(j);
            if (z > profile.ell) break;
            const double ref = lerp_on_grid(profile.zgrid_B, profile.rho_B, z);
            const double d = st.uB[j] - ref;
            max_d = std::max(max_d, std::fabs(d));
            max_r = std::max(max_r, std::fabs(ref));
            if (have_prev) {
                sum_d2 += 0.5 * hB * (prev_d * prev_d + d * d);
                sum_r2 += 0.5 * hB * (prev_r * prev_r + ref * ref);
            }
            prev_d = d;
            prev_r = ref;
            have_prev = true;
            ++kept_B;
        }

        if (kept_A < 4 || kept_B < 4)
            throw InsufficientOverlap(fmt::format(
                "wave comparison: only {0} A and {1} B nodes overlap the "
                "profile at t = {2:g} s",
                kept_A, kept_B, st.t));

        rep.t.push_back(st.t);
        rep.l2_rel.push_back(std::sqrt(sum_d2 / sum_r2));
        rep.linf_rel.push_back(max_d / max_r);
    }
    return rep;
}

} // namespace cellfront
