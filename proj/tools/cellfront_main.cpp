// Command-line front end: drives the particle chain, the continuum
// free-boundary solver, and the travelling-wave construction from one
// INI-style configuration file, and emits CSV files into the chosen
// output directory.
//
// Subcommands:
//   simulate-ibm <config>    particle-chain run -> ibm_snapshots.csv,
//                            ibm_boundaries.csv
//   simulate-fbp <config>    continuum run -> fbp_snapshots.csv,
//                            fbp_boundaries.csv
//   travelling-wave <config> wave construction -> wave_profile.csv,
//                            wave_summary.csv
//   compare <config>         both models + wave -> everything above plus
//                            report.csv and wave_fit.csv
//   jkr-table <config>       contact-law curves -> force_curve.csv,
//                            diffusion_curve.csv, pressure_curve.csv
//
// Global flags: --out <dir> (default $CELLFRONT_OUT or "."), --format csv,
// --nondim, --quiet.  Exit code 0 on success; on failure the module error's
// own code (printed with its name on stderr).
#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "cellfront/compare.hpp"
#include "cellfront/csvio.hpp"
#include "cellfront/twave.hpp"

namespace {

using namespace cellfront;

struct Output {
    std::filesystem::path dir;
    CsvUnits units;
    bool quiet = false;

    std::ofstream open(const std::string& name) const {
        const std::filesystem::path p = dir / name;
        std::ofstream os(p);
        if (!os)
            throw IoError(fmt::format("cannot open '{}' for writing",
                                      p.string()));
        os.precision(17);
        return os;
    }

    void note(const std::string& msg) const {
        if (!quiet) fmt::print("{}\n", msg);
    }
};

void emit_ibm(const Output& out, const SimConfig&, const IbmSeries& ser) {
    std::ofstream snap = out.open("ibm_snapshots.csv");
    std::ofstream bnd = out.open("ibm_boundaries.csv");
    write_snapshot_header(snap);
    write_boundary_header(bnd);
    for (std::size_t k = 0; k < ser.t.size(); ++k) {
        append_samples(snap, ser.t[k], ser.samples[k], out.units);
        append_boundary(bnd, ser.t[k], ser.s1[k], ser.s2[k], out.units);
    }
    out.note(fmt::format("wrote {} particle snapshots", ser.t.size()));
}

void emit_fbp(const Output& out, const FbpTrajectory& traj) {
    std::ofstream snap = out.open("fbp_snapshots.csv");
    std::ofstream bnd = out.open("fbp_boundaries.csv");
    write_snapshot_header(snap);
    write_boundary_header(bnd);
    for (const FbpState& st : traj.snapshots) {
        append_fbp_snapshot(snap, st, out.units);
        append_boundary(bnd, st.t, st.s1, st.s2, out.units);
    }
    out.note(fmt::format("wrote {} continuum snapshots",
                         traj.snapshots.size()));
}

WaveProfile emit_wave(const Output& out, const SimConfig& cfg) {
    WaveOptions opt;
    opt.shot_rtol = cfg.shot_rtol;
    const WaveProfile w =
        find_wave_speed(cfg.M, cfg.force_law_A(), cfg.force_law_B(),
                        cfg.growth_law(), cfg.z_min, cfg.wave_tol, opt);

    std::ofstream prof = out.open("wave_profile.csv");
    write_snapshot_header(prof);
    std::vector<DensitySample> rows;
    for (Eigen::Index k = 0; k < w.zgrid_A.size(); ++k)
        rows.push_back({w.zgrid_A[k], w.rho_A[k], Population::A});
    for (Eigen::Index k = 0; k < w.zgrid_B.size(); ++k)
        rows.push_back({w.zgrid_B[k], w.rho_B[k], Population::B});
    append_samples(prof, 0.0, rows, out.units);

    std::ofstream summary = out.open("wave_summary.csv");
    summary << "c,ell,M\n"
            << fmt::format("{:.17g},{:.17g},{:.17g}\n", w.c, w.ell, w.M);
    out.note(fmt::format("wave speed c = {:.6g} m/s, plug width ell = {:.6g} m",
                         w.c, w.ell));
    return w;
}

void run_compare(const Output& out, const SimConfig& cfg) {
    FbpTrajectory traj;
    IbmSeries ser;
    const ComparisonReport rep = compare_models(cfg, nullptr, &traj, &ser);

    emit_ibm(out, cfg, ser);
    emit_fbp(out, traj);
    std::ofstream repos = out.open("report.csv");
    write_report_header(repos);
    for (const ComparisonRow& row : rep.rows)
        append_report_row(repos, row, out.units);
    out.note(fmt::format(
        "front speeds: particle ({:.6g}, {:.6g}) m/s, continuum "
        "({:.6g}, {:.6g}) m/s",
        rep.ibm_speeds.c1, rep.ibm_speeds.c2, rep.fbp_speeds.c1,
        rep.fbp_speeds.c2));

    // The constructed wave, fitted against the continuum run's late half.
    const WaveProfile w = emit_wave(out, cfg);
    const double t_last = traj.snapshots.back().t;
    const WaveFitReport fit =
        compare_wave_to_fbp(w, traj, 0.5 * t_last, t_last);
    std::ofstream fitos = out.open("wave_fit.csv");
    fitos << "t,l2_rel,linf_rel\n";
    for (std::size_t j = 0; j < fit.t.size(); ++j)
        fitos << fmt::format("{:.17g},{:.17g},{:.17g}\n", fit.t[j],
                             fit.l2_rel[j], fit.linf_rel[j]);
    out.note(fmt::format(
        "wave fit: measured speed {:.6g} m/s, gap to construction {:.3g}",
        fit.c_measured, fit.speed_gap));
}

void run_jkr_table(const Output& out, const SimConfig& cfg) {
    const ForceLaw law = cfg.force_law_A();
    const double d_eq = cfg.d_eq();
    const double rho_eq = cfg.rho_eq();
    {
        std::ofstream os = out.open("force_curve.csv");
        write_force_table(os, law, 0.8 * d_eq, 1.1 * d_eq, 512);
    }
    {
        std::ofstream os = out.open("diffusion_curve.csv");
        write_diffusion_table(os, law, 0.9 * rho_eq, 1.6 * rho_eq, 512);
    }
    {
        std::ofstream os = out.open("pressure_curve.csv");
        write_pressure_table(os, law, 0.9 * rho_eq, 1.6 * rho_eq, 512);
    }
    out.note("wrote force_curve.csv, diffusion_curve.csv, pressure_curve.csv");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-population tissue front: particle chain, continuum "
                 "free-boundary solver, and travelling waves"};
    app.require_subcommand(1);

    const char* env_out = std::getenv("CELLFRONT_OUT");
    std::string out_dir = env_out != nullptr ? env_out : ".";
    std::string format = "csv";
    bool nondim = false;
    bool quiet = false;
    app.add_option("--out", out_dir, "output directory")
        ->capture_default_str();
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv"}));
    app.add_flag("--nondim", nondim,
                 "emit positions in equilibrium gaps and densities in "
                 "equilibrium units");
    app.add_flag("--quiet", quiet, "suppress informational output");

    std::string config_path;
    CLI::App* sub_ibm = app.add_subcommand(
        "simulate-ibm", "run the particle chain and emit snapshots");
    CLI::App* sub_fbp = app.add_subcommand(
        "simulate-fbp", "run the continuum solver and emit snapshots");
    CLI::App* sub_wave = app.add_subcommand(
        "travelling-wave", "construct the travelling wave and emit it");
    CLI::App* sub_cmp = app.add_subcommand(
        "compare", "run both models plus the wave and emit the comparison");
    CLI::App* sub_jkr = app.add_subcommand(
        "jkr-table", "emit the contact force, diffusivity, and pressure "
                     "curves");
    for (CLI::App* sub : {sub_ibm, sub_fbp, sub_wave, sub_cmp, sub_jkr})
        sub->add_option("config", config_path, "configuration file")
            ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const SimConfig cfg = cellfront::load_config(config_path);
        Output out;
        out.dir = out_dir;
        std::filesystem::create_directories(out.dir);
        out.units = nondim ? cellfront::nondimensional_units(cfg)
                           : cellfront::CsvUnits{};
        out.quiet = quiet;

        if (sub_ibm->parsed()) {
            emit_ibm(out, cfg, cellfront::ibm_run(cfg));
        } else if (sub_fbp->parsed()) {
            emit_fbp(out, cellfront::fbp_run(cfg));
        } else if (sub_wave->parsed()) {
            emit_wave(out, cfg);
        } else if (sub_cmp->parsed()) {
            run_compare(out, cfg);
        } else {
            run_jkr_table(out, cfg);
        }
        return 0;
    } catch (const cellfront::Error& e) {
        fmt::print(stderr, "error [{}]: {}\n", e.name(), e.what());
        return e.exit_code();
    }
}
