#include "cellfront/csvio.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cstdlib>
#include <ostream>
#include <sstream>

namespace cellfront {

namespace {

/** Full-precision double: 17 significant digits round-trip exactly. */
std::string num(double v) { return fmt::format("{:.17g}", v); }

const char* pop_tag(Population p) { return p == Population::A ? "A" : "B"; }

/** Strict double parse of one comma field; advances past the delimiter. */
double parse_field(const std::string& line, std::size_t& pos, int lineno) {
    const std::size_t comma = line.find(',', pos);
    const std::string field =
        line.substr(pos, comma == std::string::npos ? comma : comma - pos);
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0')
        throw IoError(fmt::format("snapshot CSV line {}: malformed number '{}'",
                                  lineno, field));
    pos = comma == std::string::npos ? line.size() : comma + 1;
    return v;
}

} // namespace

void write_snapshot_header(std::ostream& os) { os << "t,x,rho,pop\n"; }

void append_samples(std::ostream& os, double t,
                    const std::vector<DensitySample>& samples,
                    const CsvUnits& units) {
    for (const DensitySample& s : samples)
        os << num(t) << ',' << num(s.x / units.x_div) << ','
           << num(s.rho / units.rho_div) << ',' << pop_tag(s.pop) << '\n';
}

void append_chain_snapshot(std::ostream& os, double t, const CellChain& chain,
                           const CsvUnits& units) {
    append_samples(os, t, chain_densities(chain), units);
}

void append_fbp_snapshot(std::ostream& os, const FbpState& st,
                         const CsvUnits& units) {
    const Eigen::Index NA = st.uA.size() - 1;
    const double hA = (st.s1 - st.s0) / static_cast<double>(NA);
    for (Eigen::Index j = 0; j <= NA; ++j) {
        const double x = st.s0 + hA * static_cast<double>(j);
        os << num(st.t) << ',' << num(x / units.x_div) << ','
           << num(st.uA[j] / units.rho_div) << ",A\n";
    }
    const Eigen::Index NB = st.uB.size() - 1;
    const double hB = (st.s2 - st.s1) / static_cast<double>(NB);
    for (Eigen::Index j = 0; j <= NB; ++j) {
        const double x = st.s1 + hB * static_cast<double>(j);
        os << num(st.t) << ',' << num(x / units.x_div) << ','
           << num(st.uB[j] / units.rho_div) << ",B\n";
    }
}

void write_boundary_header(std::ostream& os) { os << "t,s1,s2\n"; }

void append_boundary(std::ostream& os, double t, double s1, double s2,
                     const CsvUnits& units) {
    os << num(t) << ',' << num(s1 / units.x_div) << ','
       << num(s2 / units.x_div) << '\n';
}

void write_report_header(std::ostream& os) {
    os << "t,linf_rel,l2_rel,gap_s1,gap_s2,jump,transmission_residual\n";
}

void append_report_row(std::ostream& os, const ComparisonRow& row,
                       const CsvUnits& units) {
    os << num(row.t) << ',' << num(row.linf_rel) << ',' << num(row.l2_rel)
       << ',' << num(row.gap_s1 / units.x_div) << ','
       << num(row.gap_s2 / units.x_div) << ','
       << num(row.jump / units.rho_div) << ','
       << num(row.transmission_residual) << '\n';
}

void write_force_table(std::ostream& os, const ForceLaw& law, double d_lo,
                       double d_hi, int n) {
    if (n < 2 || !(d_lo < d_hi) || !(d_lo > 0.0))
        throw ConfigError("force table: need n >= 2 and 0 < d_lo < d_hi");
    os << "d,F\n";
    for (int k = 0; k < n; ++k) {
        const double d =
            d_lo + (d_hi - d_lo) * (static_cast<double>(k) / (n - 1));
        os << num(d) << ',' << num(force_cubic(d, law.coeffs)) << '\n';
    }
}

void write_diffusion_table(std::ostream& os, const ForceLaw& law, double r_lo,
                           double r_hi, int n) {
    if (n < 2 || !(r_lo < r_hi) || !(r_lo > 0.0))
        throw ConfigError("diffusion table: need n >= 2 and 0 < r_lo < r_hi");
    os << "rho,D\n";
    for (int k = 0; k < n; ++k) {
        const double r =
            r_lo + (r_hi - r_lo) * (static_cast<double>(k) / (n - 1));
        os << num(r) << ',' << num(diffusion_coeff(r, law)) << '\n';
    }
}

void write_pressure_table(std::ostream& os, const ForceLaw& law, double r_lo,
                          double r_hi, int n) {
    if (n < 2 || !(r_lo < r_hi) || !(r_lo > 0.0))
        throw ConfigError("pressure table: need n >= 2 and 0 < r_lo < r_hi");
    os << "rho,P\n";
    for (int k = 0; k < n; ++k) {
        const double r =
            r_lo + (r_hi - r_lo) * (static_cast<double>(k) / (n - 1));
        os << num(r) << ',' << num(pressure(r, law)) << '\n';
    }
}

std::vector<SnapshotRow> parse_snapshot_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "t,x,rho,pop")
        throw IoError("snapshot CSV: missing or wrong header (want "
                      "'t,x,rho,pop')");
    std::vector<SnapshotRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        SnapshotRow row;
        std::size_t pos = 0;
        row.t = parse_field(line, pos, lineno);
        row.x = parse_field(line, pos, lineno);
        row.rho = parse_field(line, pos, lineno);
        const std::string tag = line.substr(pos);
        if (tag == "A")
            row.pop = Population::A;
        else if (tag == "B")
            row.pop = Population::B;
        else
            throw IoError(fmt::format(
                "snapshot CSV line {}: unknown population '{}'", lineno, tag));
        rows.push_back(row);
    }
    return rows;
}

} // namespace cellfront
