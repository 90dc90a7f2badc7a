#include "cellfront/ibm.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace cellfront {

namespace {

/// Offset, as a fraction of d_eq, separating a daughter from its mother.
constexpr double kDaughterOffsetFrac = 1e-6;

/// Relaxes the chain mechanics over dtau; a result that violates the strict
/// ordering is rejected and recomputed at tighter tolerance.
Eigen::VectorXd relax_positions(const CellChain& c, double dtau,
                                IntegratorSettings integ) {
    const auto rhs = [&c](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        chain_rhs_into(y, c.m, c.law_A, c.law_B, dy);
    };
    for (int attempt = 0; attempt < 3; ++attempt) {
        IntegrateResult res = integrate(rhs, c.r, 0.0, dtau, integ);
        bool ordered = true;
        for (int k = 1; k < c.n(); ++k) {
            if (!(res.y[k] > res.y[k - 1])) {
                ordered = false;
                break;
            }
        }
        if (ordered) {
            res.y[0] = c.s0;  // the pinned anchor is exact by definition
            return std::move(res.y);
        }
        integ.rtol *= 0.1;
        integ.atol *= 0.1;
    }
    throw NonConvergence(
        "ibm: relaxed positions violate cell ordering at the tightest retry");
}

} // namespace

void CellChain::validate() const {
    if (r.size() < 2) throw ConfigError("CellChain: need at least two cells");
    if (!(m >= 1) || m >= n())
        throw ConfigError("CellChain: population split requires 1 <= m < n");
    if (!(r[0] == s0)) throw ConfigError("CellChain: first cell must sit at s0");
    for (int i = 1; i < n(); ++i)
        if (!(r[i] > r[i - 1]))
            throw ConfigError("CellChain: positions must be strictly increasing");
}

void chain_rhs_into(const Eigen::VectorXd& r, int m, const ForceLaw& law_A,
                    const ForceLaw& law_B, Eigen::VectorXd& v) {
    const int n = static_cast<int>(r.size());
    v.resize(n);
    v[0] = 0.0;
    for (int i = 1; i < m - 1; ++i) {
        v[i] = (law_A.force_at_gap(r[i] - r[i - 1]) -
                law_A.force_at_gap(r[i + 1] - r[i])) / law_A.eta;
    }
    if (m >= 2) {
        v[m - 1] = law_A.force_at_gap(r[m - 1] - r[m - 2]) / law_A.eta -
                   law_B.force_at_gap(r[m] - r[m - 1]) / law_B.eta;
    }
    for (int i = m; i < n - 1; ++i) {
        v[i] = (law_B.force_at_gap(r[i] - r[i - 1]) -
                law_B.force_at_gap(r[i + 1] - r[i])) / law_B.eta;
    }
    v[n - 1] = law_B.force_at_gap(r[n - 1] - r[n - 2]) / law_B.eta;
}

Eigen::VectorXd chain_rhs(const CellChain& c) {
    c.validate();
    Eigen::VectorXd v;
    chain_rhs_into(c.r, c.m, c.law_A, c.law_B, v);
    return v;
}

std::vector<long> reindex_shifts(const CellChain& c, double dtau) {
    c.validate();
    if (!(dtau > 0.0)) throw ConfigError("reindex_shifts: dtau must be positive");
    std::vector<long> delta(static_cast<size_t>(std::max(c.m - 2, 0)), 0);
    double sum = 0.0;
    for (int i = 2; i <= c.m - 1; ++i) {  // 1-based gap index
        const double gap = c.r[i - 1] - c.r[i - 2];
        sum += growth_rate(1.0 / gap, c.growth) * dtau;
        delta[static_cast<size_t>(i - 2)] = static_cast<long>(std::ceil(sum));
    }
    return delta;
}

CellChain proliferation_reindex(const CellChain& c, double dtau) {
    const std::vector<long> delta = reindex_shifts(c, dtau);
    const long shift = delta.empty() ? 0 : delta.back();  // shifts are nondecreasing
    if (shift > 1)
        throw StepTooLarge(
            "proliferation_reindex: more than one division accrued; shrink dtau");
    if (shift == 0) return c;

    CellChain out = c;
    const int n_new = c.n() + static_cast<int>(shift);
    out.r.resize(n_new);
    out.r[0] = c.r[0];
    for (int i = 2; i <= c.m - 1; ++i)
        out.r[i - 1] = c.r[i - 1 - delta[static_cast<size_t>(i - 2)]];
    for (int i = c.m; i <= n_new; ++i)
        out.r[i - 1] = c.r[i - 1 - static_cast<int>(shift)];
    out.m = c.m + static_cast<int>(shift);

    // Restore strict ordering: the copy at the higher index is the daughter.
    const double offset = kDaughterOffsetFrac * c.law_A.coeffs.d_eq;
    for (int k = 1; k < n_new; ++k)
        if (out.r[k] <= out.r[k - 1]) out.r[k] = out.r[k - 1] + offset;
    return out;
}

CellChain ibm_step(const CellChain& c, double dtau, const IntegratorSettings& integ) {
    c.validate();
    if (!(dtau > 0.0)) throw ConfigError("ibm_step: dtau must be positive");
    CellChain relaxed = c;
    relaxed.r = relax_positions(c, dtau, integ);
    return proliferation_reindex(relaxed, dtau);
}

std::vector<DensitySample> chain_densities(const CellChain& c) {
    c.validate();
    std::vector<DensitySample> out;
    out.reserve(static_cast<size_t>(c.n() - 1));
    for (int i = 1; i <= c.n() - 1; ++i) {  // 1-based sample index
        out.push_back(DensitySample{c.r[i - 1], 1.0 / (c.r[i] - c.r[i - 1]),
                                    i <= c.m ? Population::A : Population::B});
    }
    return out;
}

IbmState make_ibm_state(CellChain c) {
    c.validate();
    IbmState st;
    st.clocks.assign(static_cast<size_t>(std::max(c.m - 2, 0)), 0.0);
    st.chain = std::move(c);
    return st;
}

void ibm_advance(IbmState& st, double dtau, const IntegratorSettings& integ) {
    CellChain& c = st.chain;
    c.validate();
    if (!(dtau > 0.0)) throw ConfigError("ibm_advance: dtau must be positive");
    if (st.clocks.size() != static_cast<size_t>(std::max(c.m - 2, 0)))
        throw ConfigError("ibm_advance: clock count does not match the chain");

    c.r = relax_positions(c, dtau, integ);

    // Accrue the division clocks on the end-of-step gaps.
    for (size_t k = 0; k < st.clocks.size(); ++k) {
        const double gap = c.r[static_cast<int>(k) + 1] - c.r[static_cast<int>(k)];
        st.clocks[k] += growth_rate(1.0 / gap, c.growth) * dtau;
        if (st.clocks[k] >= 2.0)
            throw StepTooLarge(
                "ibm_advance: a gap accrued two divisions in one step; shrink dtau");
    }

    // Process division events left to right.  Each insertion duplicates the
    // gap's left cell and splits the clock remainder between the daughters.
    const double offset = kDaughterOffsetFrac * c.law_A.coeffs.d_eq;
    std::vector<double> pos(c.r.data(), c.r.data() + c.n());
    for (size_t k = 0; k < st.clocks.size(); ++k) {
        if (st.clocks[k] >= 1.0) {
            const double rem = 0.5 * (st.clocks[k] - 1.0);
            pos.insert(pos.begin() + static_cast<long>(k) + 1, pos[k] + offset);
            st.clocks[k] = rem;
            st.clocks.insert(st.clocks.begin() + static_cast<long>(k) + 1, rem);
            c.m += 1;
            ++k;  // the freshly inserted clock is already settled
        }
    }
    c.r = Eigen::Map<const Eigen::VectorXd>(pos.data(),
                                            static_cast<Eigen::Index>(pos.size()));
}

} // namespace cellfront
