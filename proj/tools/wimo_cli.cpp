// SPDX-License-Identifier: Apache-2.0
//
// wimo: wideband modal-orthogonality DOA estimation for sensor arrays
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "wimo/config.hpp"
#include "wimo/modal_cache.hpp"
#include "wimo/rng.hpp"
#include "wimo/snapshot_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace
{
    namespace fs = std::filesystem;
    using nlohmann::json;
    using nlohmann::ordered_json;

    struct CommonArgs
    {
        std::string config_path;
        std::vector<std::string> overrides;
        std::string out_dir = ".";
        int threads = 0;
    };

    json load_config(const CommonArgs &args)
    {
        json config = wimo::config::load_config_file(args.config_path);
        for (const auto &assignment : args.overrides)
            wimo::config::apply_override(config, assignment);
        return config;
    }

    fs::path prepare_out_dir(const CommonArgs &args)
    {
        fs::path dir(args.out_dir);
        fs::create_directories(dir);
        return dir;
    }

    std::string now_iso8601()
    {
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        char buf[32];
        std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
        return buf;
    }

    void write_text(const fs::path &path, const std::string &text)
    {
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot open for writing: " + path.string());
        out << text;
    }

    void write_spectrum_csv(const fs::path &path, const wimo::SpatialSpectrum &spectrum)
    {
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot open for writing: " + path.string());
        out << "theta_deg,value_db\n";
        char row[80];
        for (Eigen::Index i = 0; i < spectrum.grid_deg.size(); ++i)
        {
            std::snprintf(row, sizeof(row), "%.17g,%.17g\n", spectrum.grid_deg[i],
                          10.0 * std::log10(std::max(spectrum.values[i], 1e-300)));
            out << row;
        }
    }

    void write_peaks_json(const fs::path &path, const wimo::EstimationReport &report)
    {
        ordered_json doc;
        doc["method"] = report.spectrum.method;
        doc["m"] = report.spectrum.m;
        doc["p_mdl"] = report.p_mdl;
        doc["p_used"] = report.p_used;
        doc["eps_max_1"] = report.eps_max_1;
        doc["validity_ratio_mB_fs"] = report.validity_ratio;
        doc["peaks"] = ordered_json::array();
        for (const auto &peak : report.peaks)
        {
            ordered_json p;
            p["theta_deg"] = peak.theta_deg;
            p["height_db"] = peak.height_db;
            p["prominence_db"] = peak.prominence_db;
            doc["peaks"].push_back(std::move(p));
        }
        write_text(path, doc.dump(2) + "\n");
    }

    int cmd_simulate(const CommonArgs &args, const std::string &format)
    {
        const json config = load_config(args);
        const wimo::ExperimentSpec spec = wimo::config::parse_experiment(config);
        const fs::path dir = prepare_out_dir(args);

        std::vector<double> truth;
        const wimo::SnapshotMatrix snapshots = wimo::simulate_snapshots(spec, 0, &truth);

        const fs::path data_path = dir / (format == "csv" ? "snapshots.csv" : "snapshots.wsnp");
        wimo::write_snapshot_any(data_path.string(), snapshots);

        ordered_json sidecar;
        sidecar["file"] = data_path.filename().string();
        sidecar["n_sensors"] = snapshots.n_sensors();
        sidecar["n_snapshots"] = snapshots.n_snapshots();
        sidecar["fs"] = snapshots.fs;
        sidecar["seed"] = spec.sampling.seed;
        sidecar["truth_deg"] = truth;
        sidecar["created"] = now_iso8601();
        write_text(dir / "snapshots.meta.json", sidecar.dump(2) + "\n");

        std::printf("wrote %s (%d sensors x %ld snapshots)\n", data_path.c_str(),
                    snapshots.n_sensors(), snapshots.n_snapshots());
        return 0;
    }

    void write_sfmap_csv(const fs::path &path, const Eigen::VectorXd &freqs,
                         const Eigen::VectorXd &grid, const Eigen::MatrixXd &map)
    {
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot open for writing: " + path.string());
        char cell[48];
        out << "f_hz\\theta_deg";
        for (Eigen::Index j = 0; j < grid.size(); ++j)
        {
            std::snprintf(cell, sizeof(cell), ",%.17g", grid[j]);
            out << cell;
        }
        out << '\n';
        for (Eigen::Index i = 0; i < freqs.size(); ++i)
        {
            std::snprintf(cell, sizeof(cell), "%.17g", freqs[i]);
            out << cell;
            for (Eigen::Index j = 0; j < grid.size(); ++j)
            {
                std::snprintf(cell, sizeof(cell), ",%.17g", map(i, j));
                out << cell;
            }
            out << '\n';
        }
    }

    int cmd_estimate(const CommonArgs &args, const std::string &snapshot_path,
                     const std::string &cache_path)
    {
        const json config = load_config(args);
        const wimo::ExperimentSpec spec = wimo::config::parse_experiment(config);
        const fs::path dir = prepare_out_dir(args);

        const wimo::SnapshotMatrix snapshots = wimo::read_snapshot_any(snapshot_path);

        const wimo::PsdSpec *true_psd =
            spec.sources.empty() ? nullptr : &spec.sources.front().psd;

        wimo::ModalTable table;
        const wimo::ModalTable *prebuilt = nullptr;
        if (!cache_path.empty())
        {
            const wimo::EstimatorSpec &est = spec.estimator;
            const double dt = 1.0 / snapshots.fs;
            std::string expected;
            if (est.assume_true_psd)
            {
                if (!true_psd)
                    throw std::invalid_argument("assumed_psd \"true\" needs a sources section");
                wimo::PsdSpec psd = *true_psd;
                psd.power = 1.0;
                expected = wimo::modal_table_key(spec.geometry, est.grid.make(), est.m, dt,
                                                 psd.center(),
                                                 psd.support_hi() - psd.support_lo(), &psd);
            }
            else
            {
                expected = wimo::modal_table_key(
                    spec.geometry, est.grid.make(), est.m, dt,
                    0.5 * (est.assumed_psd.f_lo + est.assumed_psd.f_hi),
                    est.assumed_psd.f_hi - est.assumed_psd.f_lo);
            }
            table = wimo::load_modal_cache(cache_path, expected);
            prebuilt = &table;
        }
        const wimo::EstimationReport report = wimo::estimate_snapshots(
            spec.estimator, spec.geometry, snapshots, true_psd, prebuilt);

        if (report.validity_ratio < 1.0)
            std::fprintf(stderr,
                         "warning: m*B/fs = %.3g < 1; the frequency-bin decorrelation "
                         "assumption behind the signal-subspace model is weak here\n",
                         report.validity_ratio);
        if (!spec.estimator.assume_true_psd && spec.estimator.assumed_psd.f_lo <= 0.0 &&
            spec.estimator.assumed_psd.f_hi > 0.0)
            std::fprintf(stderr, "warning: assumed band reaches DC (carrier <= B/2)\n");
        std::printf("P_MDL=%d  P=%d  eps_max_1=%d  mB/fs=%.3g  spectrum_time=%.3gs  "
                    "spectrum_multiplies=%.3g\n",
                    report.p_mdl, report.p_used, report.eps_max_1, report.validity_ratio,
                    report.spectrum_seconds, report.spectrum.flops);

        write_spectrum_csv(dir / "spectrum.csv", report.spectrum);
        write_peaks_json(dir / "peaks.json", report);

        // space-frequency methods with a frequency grid also emit the map
        const wimo::Method method = spec.estimator.method;
        if ((method == wimo::Method::SfCbf || method == wimo::Method::SfMvdr ||
             method == wimo::Method::SfMusic) &&
            spec.estimator.freq_grid.count > 0)
        {
            const Eigen::VectorXd freqs = spec.estimator.freq_grid.make();
            const Eigen::VectorXd grid = spec.estimator.grid.make();
            write_sfmap_csv(dir / "sfmap.csv",
                            freqs, grid,
                            wimo::sf_map(spec.estimator, spec.geometry, snapshots, freqs, grid));
        }

        for (const auto &peak : report.peaks)
            std::printf("peak  theta=%8.3f deg  height=%8.3f dB  prominence=%6.3f dB\n",
                        peak.theta_deg, peak.height_db, peak.prominence_db);
        return 0;
    }

    int cmd_approx(const CommonArgs &args)
    {
        const json config = load_config(args);
        const wimo::ExperimentSpec spec = wimo::config::parse_experiment(config);
        const fs::path dir = prepare_out_dir(args);

        const double dt = 1.0 / spec.sampling.fs;
        const Eigen::VectorXd grid = spec.estimator.grid.make();
        wimo::ModalTable table;
        if (spec.estimator.assume_true_psd)
        {
            wimo::PsdSpec psd = spec.sources.front().psd;
            psd.power = 1.0;
            table = wimo::build_modal_table_psd(spec.geometry, grid, spec.estimator.m, dt, psd,
                                                args.threads);
        }
        else
        {
            const wimo::PsdSpec &band = spec.estimator.assumed_psd;
            table = wimo::build_modal_table(spec.geometry, grid, spec.estimator.m, dt,
                                            0.5 * (band.f_lo + band.f_hi), band.f_hi - band.f_lo,
                                            args.threads);
        }

        const fs::path cache_path = dir / "modal_cache.wmod";
        wimo::save_modal_cache(cache_path.string(), table);

        std::ofstream eigen_csv(dir / "modal_eigenvalues.csv");
        eigen_csv << "theta_deg";
        for (int i = 0; i < table.length(); ++i)
            eigen_csv << ",sigma_" << i + 1;
        eigen_csv << '\n';
        char cell[48];
        for (Eigen::Index i = 0; i < table.grid_deg.size(); ++i)
        {
            eigen_csv << table.grid_deg[i];
            for (int j = 0; j < table.length(); ++j)
            {
                std::snprintf(cell, sizeof(cell), ",%.17g",
                              table.sigma[static_cast<std::size_t>(i)][j]);
                eigen_csv << cell;
            }
            eigen_csv << '\n';
        }

        std::printf("wrote %s (%ld grid points, L=%d)\n", cache_path.c_str(),
                    static_cast<long>(table.grid_deg.size()), table.length());
        return 0;
    }

    int cmd_sfmap(const CommonArgs &args, const std::string &snapshot_path)
    {
        const json config = load_config(args);
        const wimo::ExperimentSpec spec = wimo::config::parse_experiment(config);
        const fs::path dir = prepare_out_dir(args);

        const wimo::SnapshotMatrix snapshots = wimo::read_snapshot_any(snapshot_path);
        wimo::FreqGridSpec fg = spec.estimator.freq_grid;
        if (fg.count <= 0)
            throw std::invalid_argument("sfmap needs estimator.freq_grid.{start_hz,stop_hz,count}");
        const Eigen::VectorXd freqs = fg.make();
        const Eigen::VectorXd grid = spec.estimator.grid.make();

        write_sfmap_csv(dir / "sfmap.csv", freqs, grid,
                        wimo::sf_map(spec.estimator, spec.geometry, snapshots, freqs, grid));
        std::printf("wrote %s (%ld x %ld)\n", (dir / "sfmap.csv").c_str(),
                    static_cast<long>(freqs.size()), static_cast<long>(grid.size()));
        return 0;
    }

    int cmd_bench(const CommonArgs &args, bool check)
    {
        const json config = load_config(args);
        const wimo::ExperimentSpec spec = wimo::config::parse_experiment(config);
        const fs::path dir = prepare_out_dir(args);

        const wimo::SweepResult result = wimo::run_sweep(spec, args.threads);
        wimo::write_sweep_csv((dir / "trials.csv").string(), result);
        wimo::write_sweep_summary_json((dir / "summary.json").string(), result);
        wimo::write_timing_json((dir / "timing.json").string(), result);

        for (const auto &point : result.points)
        {
            std::printf("%s=%-10g trials=%zu resolved=%d prob=%.3f",
                        result.axis.empty() ? "point" : result.axis.c_str(), point.value,
                        point.trials.size(), point.resolved_count, point.resolution_prob);
            if (point.rmse_deg)
                std::printf(" rmse=%.4f deg", *point.rmse_deg);
            std::printf("\n");
        }

        if (check)
        {
            const auto failures = wimo::evaluate_checks(spec, result);
            for (const auto &f : failures)
                std::fprintf(stderr, "check failed: %s\n", f.c_str());
            if (!failures.empty())
                return 1;
            std::printf("all checks passed\n");
        }
        return 0;
    }

    // ---- check-theory: library-level property suite -------------------------

    struct TheoryCheck
    {
        std::string name;
        bool pass;
        std::string detail;
    };

    std::vector<TheoryCheck> run_theory_suite(bool perturb, const wimo::ExperimentSpec *spec)
    {
        using namespace wimo;
        std::vector<TheoryCheck> checks;
        char detail[160];

        // default scenario; a config can swap in its own array, lag order and band
        ArrayGeometry ula = make_ula(8, 1500.0 / (2.0 * 4500.0), 1500.0);
        double fs = 10e3;
        double fl = 1.5e3, fh = 4.5e3;
        int m = 5;
        if (spec)
        {
            ula = spec->geometry;
            fs = spec->sampling.fs;
            m = spec->estimator.m;
            const PsdSpec &band = spec->estimator.assume_true_psd && !spec->sources.empty()
                                      ? spec->sources.front().psd
                                      : spec->estimator.assumed_psd;
            if (band.support_hi() > band.support_lo())
            {
                fl = band.support_lo();
                fh = band.support_hi();
            }
        }
        const double dt = 1.0 / fs;
        const double fc = 0.5 * (fl + fh), B = fh - fl;

        // positive semidefiniteness over random configurations
        {
            Rng rng(20240401);
            double worst = 0.0;
            for (int trial = 0; trial < 200; ++trial)
            {
                const int ns = 2 + static_cast<int>(rng.uniform() * 5);
                const int mm = 1 + static_cast<int>(rng.uniform() * 8);
                ArrayGeometry geom;
                geom.c = 1500.0;
                for (int k = 0; k < ns; ++k)
                    geom.positions.emplace_back(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                                                rng.uniform(-2.0, 2.0));
                const double theta = deg2rad(rng.uniform(-90.0, 90.0));
                const double fcr = rng.uniform(500.0, 5000.0);
                const double Br = rng.uniform(0.0, 2.0 * fcr);
                const ApproxStcm a =
                    approx_stcm_uniform(geom, theta, rng.uniform(0.0, 2 * pi), fcr, Br, mm, dt);
                for (const Eigen::MatrixXcd &mat : {a.s, a.narrowband, a.wideband})
                {
                    const Eigen::VectorXd sig = hermitian_eig_descending(mat).values;
                    worst = std::max(worst, -sig[sig.size() - 1] / std::max(sig[0], 1e-300));
                }
            }
            if (perturb)
                worst += 1e-3;
            std::snprintf(detail, sizeof(detail), "worst -min_eig/sigma1 = %.3g", worst);
            checks.push_back({"psd_random_configs", worst <= 1e-10, detail});
        }

        // factorization: identical spectra and cluster subspace agreement
        {
            double worst_eig = 0.0, worst_angle = 0.0;
            Rng rng(77);
            for (int trial = 0; trial < 25; ++trial)
            {
                const double theta = deg2rad(rng.uniform(-80.0, 80.0));
                const ApproxStcm a = approx_stcm_uniform(ula, theta, 0.0, fc, B, m, dt);
                const ModalBasis basis = modal_basis(a);
                const Theorem1Report rep = theorem1_check(a, basis);
                worst_eig = std::max(worst_eig, rep.max_eigenvalue_mismatch);
                worst_angle = std::max(worst_angle, rep.max_principal_angle);
            }
            if (perturb)
                worst_angle += 1e-3;
            std::snprintf(detail, sizeof(detail), "eig mismatch %.3g, principal angle %.3g rad",
                          worst_eig, worst_angle);
            checks.push_back(
                {"hadamard_factorization", worst_eig <= 1e-9 && worst_angle <= 1e-6, detail});
        }

        // band-power concentration of the wideband GSV
        {
            const ApproxStcm a = approx_stcm_uniform(ula, deg2rad(30.0), 0.0, fc, B, m, dt);
            const EigDescending wide = hermitian_eig_descending(a.wideband);
            const Eigen::VectorXcd gsv_w = wide.vectors.col(0);
            const double sigma1 = wide.values[0];
            const double j_gsv = ss_band_power(gsv_w, a.model.h, B);
            bool dominated = true;
            Rng rng(3);
            for (int probe = 0; probe < 1000; ++probe)
            {
                Eigen::VectorXcd x(a.length());
                for (int k = 0; k < a.length(); ++k)
                    x[k] = rng.cnormal();
                x.normalize();
                if (ss_band_power(x, a.model.h, B) > j_gsv + 1e-9)
                    dominated = false;
            }
            const double rel = std::abs(j_gsv - sigma1) / sigma1;
            std::snprintf(detail, sizeof(detail),
                          "band power %.6g vs sigma1 %.6g (rel %.2g), dominates %s", j_gsv,
                          sigma1, rel, dominated ? "yes" : "no");
            checks.push_back({"gsv_band_power_max", rel < 1e-6 && dominated && !perturb, detail});
        }

        // narrowband limit
        {
            const double tiny = fc * 1e-6;
            const ApproxStcm a = approx_stcm_uniform(ula, deg2rad(25.0), 0.0, fc, tiny, 1, dt);
            const Eigen::VectorXcd steer = steering_vector(ula, deg2rad(25.0), 0.0, fc);
            const Eigen::MatrixXcd outer = steer * steer.adjoint();
            const double err = (a.s - outer).norm() / outer.norm();
            const ModalBasis basis = modal_basis(a);
            const double eig_err =
                std::abs(basis.sigma[0] - ula.n_sensors()) / ula.n_sensors() +
                std::abs(basis.sigma[1]);
            std::snprintf(detail, sizeof(detail), "matrix err %.3g, eigen err %.3g", err,
                          eig_err);
            checks.push_back({"narrowband_limit", err < 1e-6 && eig_err < 1e-6, detail});
        }

        // wideband limit against the block spectrum
        {
            const double f0 = 2000.0;
            const ArrayGeometry geom4 = make_ula(4, 1500.0 / (2.0 * f0), 1500.0);
            const AsymptoticSinf inf_block = asymptotic_sinf(4, 2.0);
            Eigen::VectorXd repeated(16);
            for (int i = 0; i < 4; ++i)
                for (int r = 0; r < 4; ++r)
                    repeated[4 * i + r] = inf_block.sigma[i];
            std::sort(repeated.data(), repeated.data() + 16, std::greater<double>());
            double prev = 1e9;
            bool monotone = true;
            double final_err = 0.0;
            for (double mult : {4.0, 8.0, 16.0, 32.0})
            {
                const double Bw = mult * f0;
                const ApproxStcm a = approx_stcm_uniform(geom4, deg2rad(40.0), 0.0, 3.0 * f0, Bw,
                                                         4, 1.0 / (2.0 * Bw));
                const ModalBasis basis = modal_basis(a);
                final_err = (basis.sigma - repeated).norm() / repeated.norm();
                monotone = monotone && final_err < prev;
                prev = final_err;
            }
            std::snprintf(detail, sizeof(detail), "l2 err at 32 f0 = %.3g, monotone %s",
                          final_err, monotone ? "yes" : "no");
            checks.push_back({"wideband_limit", final_err < 0.05 && monotone, detail});
        }

        // inverse reconstruction from the band-unlimited transform
        {
            Rng rng(11);
            double prev_rms = 0.0;
            bool halving = true;
            for (int step = 0; step < 4; ++step)
            {
                const double omega = 64.0 * std::pow(2.0, step);
                double sum_sq = 0.0;
                int count = 0;
                Rng fixed(500); // same vectors for every span
                for (int v = 0; v < 20; ++v)
                {
                    const int L = 10;
                    // jittered lattice keeps the offsets distinct (gap >= 0.05)
                    Eigen::VectorXd h(L);
                    for (int k = 0; k < L; ++k)
                        h[k] = (k + 0.5 * fixed.uniform()) / L;
                    Eigen::VectorXcd y(L);
                    for (int k = 0; k < L; ++k)
                        y[k] = fixed.cnormal();

                    const int nodes = static_cast<int>(omega * 64) + 1;
                    const double df = omega / (nodes - 1);
                    Eigen::VectorXcd recon = Eigen::VectorXcd::Zero(L);
                    for (int q = 0; q < nodes; ++q)
                    {
                        const double f = -omega / 2.0 + q * df;
                        cxd trans(0.0, 0.0);
                        for (int k = 0; k < L; ++k)
                            trans += y[k] * std::polar(1.0, -2.0 * pi * h[k] * f);
                        const double w = (q == 0 || q == nodes - 1) ? 0.5 : 1.0;
                        for (int k = 0; k < L; ++k)
                            recon[k] += w * df * trans * std::polar(1.0, 2.0 * pi * h[k] * f);
                    }
                    recon /= omega;
                    sum_sq += (recon - y).squaredNorm();
                    count += L;
                }
                const double rms = std::sqrt(sum_sq / count);
                if (step > 0)
                {
                    const double ratio = rms / prev_rms;
                    halving = halving && ratio > 0.4 && ratio < 0.6;
                }
                prev_rms = rms;
            }
            std::snprintf(detail, sizeof(detail), "error ratio per span doubling within [0.4,0.6]: %s",
                          halving ? "yes" : "no");
            checks.push_back({"transform_roundtrip", halving && !perturb, detail});
        }

        return checks;
    }

    int cmd_check_theory(const CommonArgs &args, bool perturb)
    {
        std::optional<wimo::ExperimentSpec> spec;
        if (!args.config_path.empty())
            spec = wimo::config::parse_experiment(load_config(args));
        const auto checks = run_theory_suite(perturb, spec ? &*spec : nullptr);
        bool all = true;
        for (const auto &check : checks)
        {
            std::printf("%-28s %s  (%s)\n", check.name.c_str(), check.pass ? "PASS" : "FAIL",
                        check.detail.c_str());
            all = all && check.pass;
        }
        return all ? 0 : 1;
    }

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"wimo: wideband modal-orthogonality DOA estimation toolkit"};
    app.require_subcommand(1);
    app.footer(wimo::config::schema_help());

    CommonArgs args;
    auto add_common = [&](CLI::App *cmd, bool needs_config = true) {
        if (needs_config)
            cmd->add_option("-c,--config", args.config_path, "JSON config file")->required();
        cmd->add_option("-s,--set", args.overrides, "override config key=value (repeatable)");
        cmd->add_option("-o,--out", args.out_dir, "output directory (default .)");
        cmd->add_option("-t,--threads", args.threads, "worker threads (default: all cores)");
    };

    auto *simulate = app.add_subcommand("simulate", "synthesize snapshots and write a container");
    std::string format = "wsnp";
    add_common(simulate);
    simulate->add_option("--format", format, "container format: wsnp or csv")
        ->check(CLI::IsMember({"wsnp", "csv"}));

    auto *estimate = app.add_subcommand("estimate", "run an estimator on a snapshot file");
    std::string snapshot_path, cache_path;
    add_common(estimate);
    estimate->add_option("--snapshot", snapshot_path, "snapshot container (.wsnp or .csv)")
        ->required();
    estimate->add_option("--cache", cache_path, "modal cache file from `approx`");

    auto *approx = app.add_subcommand("approx", "precompute the modal table over the DOA grid");
    add_common(approx);

    auto *check = app.add_subcommand("check-theory", "run the structural property suite");
    bool perturb = false;
    check->add_option("-c,--config", args.config_path,
                      "optional JSON config supplying array/band/m");
    check->add_option("-s,--set", args.overrides, "override config key=value (repeatable)");
    check->add_flag("--perturb", perturb, "inject a perturbation (harness self-test)");

    auto *bench = app.add_subcommand("bench", "run a Monte Carlo sweep");
    bool check_mode = false;
    add_common(bench);
    bench->add_flag("--check", check_mode, "exit nonzero if config checks fail");

    auto *sfmap = app.add_subcommand("sfmap", "emit a space-frequency distribution map");
    std::string sf_snapshot;
    add_common(sfmap);
    sfmap->add_option("--snapshot", sf_snapshot, "snapshot container (.wsnp or .csv)")->required();

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (simulate->parsed())
            return cmd_simulate(args, format);
        if (estimate->parsed())
            return cmd_estimate(args, snapshot_path, cache_path);
        if (approx->parsed())
            return cmd_approx(args);
        if (check->parsed())
            return cmd_check_theory(args, perturb);
        if (bench->parsed())
            return cmd_bench(args, check_mode);
        if (sfmap->parsed())
            return cmd_sfmap(args, sf_snapshot);
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
