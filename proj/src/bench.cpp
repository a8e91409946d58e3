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

#include "wimo/bench.hpp"

#include "wimo/rng.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Cholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace wimo
{
    namespace
    {
        std::string format_double(double v)
        {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            return buf;
        }

        std::string join_list(const std::vector<double> &values)
        {
            std::string out;
            for (std::size_t i = 0; i < values.size(); ++i)
            {
                if (i)
                    out += ';';
                out += format_double(values[i]);
            }
            return out;
        }
    } // namespace

    Method method_from_string(const std::string &name)
    {
        if (name == "1-wimo")
            return Method::OneWimo;
        if (name == "p-wimo")
            return Method::PWimo;
        if (name == "sf-cbf")
            return Method::SfCbf;
        if (name == "sf-mvdr")
            return Method::SfMvdr;
        if (name == "sf-music")
            return Method::SfMusic;
        throw std::invalid_argument("unknown estimator method: " + name);
    }

    std::string method_to_string(Method method)
    {
        switch (method)
        {
        case Method::OneWimo:
            return "1-wimo";
        case Method::PWimo:
            return "p-wimo";
        case Method::SfCbf:
            return "sf-cbf";
        case Method::SfMvdr:
            return "sf-mvdr";
        case Method::SfMusic:
            return "sf-music";
        }
        return "?";
    }

    Eigen::VectorXd GridSpec::make() const
    {
        if (!(step_deg > 0.0) || stop_deg < start_deg)
            throw std::invalid_argument("GridSpec: need step > 0 and stop >= start");
        const int n = static_cast<int>(std::floor((stop_deg - start_deg) / step_deg + 1e-9)) + 1;
        Eigen::VectorXd grid(n);
        for (int i = 0; i < n; ++i)
            grid[i] = start_deg + i * step_deg;
        return grid;
    }

    Eigen::VectorXd FreqGridSpec::make() const
    {
        if (count < 1 || !(stop_hz >= start_hz))
            throw std::invalid_argument("FreqGridSpec: need count >= 1 and stop >= start");
        Eigen::VectorXd grid(count);
        if (count == 1)
        {
            grid[0] = 0.5 * (start_hz + stop_hz);
            return grid;
        }
        const double step = (stop_hz - start_hz) / (count - 1);
        for (int i = 0; i < count; ++i)
            grid[i] = start_hz + i * step;
        return grid;
    }

    BandwidthMetrics bandwidth_metrics(double f_l, double f_h)
    {
        if (!(f_l > 0.0))
            throw std::invalid_argument("bandwidth_metrics: f_l must be positive");
        if (f_h < f_l)
            throw std::invalid_argument("bandwidth_metrics: f_h must be >= f_l");
        return {2.0 * (f_h - f_l) / (f_h + f_l), f_h / f_l};
    }

    void ExperimentSpec::validate_scenario() const
    {
        geometry.validate();
        if (sources.empty())
            throw std::invalid_argument("ExperimentSpec: no sources");
        if (snr_db.size() != sources.size())
            throw std::invalid_argument("ExperimentSpec: snr list does not match sources");
        const bool finite0 = std::isfinite(snr_db[0]);
        for (double s : snr_db)
            if (std::isfinite(s) != finite0)
                throw std::invalid_argument(
                    "ExperimentSpec: mix of noiseless and finite-SNR sources");
        for (const auto &src : sources)
        {
            if (std::abs(src.theta_deg) > 90.0)
                throw std::invalid_argument("ExperimentSpec: |theta| must be <= 90 deg");
            if (src.coherence_group >= 0 && (src.rho < 0.0 || src.rho > 1.0))
                throw std::invalid_argument("ExperimentSpec: rho must be in [0, 1]");
            src.psd.validate();
        }
        if (sampling.snapshots < 1)
            throw std::invalid_argument("ExperimentSpec: snapshots must be >= 1");
        if (jitter_deg < 0.0)
            throw std::invalid_argument("ExperimentSpec: jitter must be >= 0");
    }

    void ExperimentSpec::validate() const
    {
        validate_scenario();
        if (sampling.snapshots < estimator.m)
            throw std::invalid_argument("ExperimentSpec: snapshots must be >= m");
        if (estimator.m < 1)
            throw std::invalid_argument("ExperimentSpec: m must be >= 1");
        if (estimator.grid.start_deg < -90.0 || estimator.grid.stop_deg > 90.0)
            throw std::invalid_argument("ExperimentSpec: grid must lie inside [-90, 90] deg");
        if (trials < 0)
            throw std::invalid_argument("ExperimentSpec: trials must be >= 0");
        if ((estimator.method == Method::OneWimo || estimator.method == Method::PWimo) &&
            !estimator.assume_true_psd)
        {
            try
            {
                estimator.assumed_psd.validate();
            }
            catch (const std::exception &)
            {
                throw std::invalid_argument(
                    "ExperimentSpec: 1-wimo/p-wimo need estimator.assumed_psd "
                    "(a psd object or \"true\")");
            }
        }
        if (sweep)
        {
            const std::string &axis = sweep->axis;
            if (axis != "snr" && axis != "bandwidth" && axis != "separation" &&
                axis != "snapshots" && axis != "rho")
                throw std::invalid_argument("ExperimentSpec: unknown sweep axis '" + axis + "'");
            if (sweep->values.empty())
                throw std::invalid_argument("ExperimentSpec: sweep has no values");
        }
    }

    ExperimentSpec apply_sweep_value(const ExperimentSpec &spec, const std::string &axis,
                                     double value)
    {
        ExperimentSpec out = spec;
        if (axis == "snr")
        {
            std::fill(out.snr_db.begin(), out.snr_db.end(), value);
        }
        else if (axis == "bandwidth")
        {
            // value is the bandwidth ratio eta in percent; f_h is kept fixed
            const double eta = value / 100.0;
            if (!(eta > 0.0 && eta < 2.0))
                throw std::invalid_argument("bandwidth sweep: eta% must be in (0, 200)");
            auto retune = [eta](PsdSpec &psd) {
                if (psd.kind != PsdKind::Uniform)
                    throw std::invalid_argument(
                        "bandwidth sweep requires uniform source and assumption PSDs");
                const double f_h = psd.f_hi;
                psd = PsdSpec::uniform(f_h * (2.0 - eta) / (2.0 + eta), f_h, psd.power);
            };
            for (auto &src : out.sources)
                retune(src.psd);
            if (!out.estimator.assume_true_psd)
                retune(out.estimator.assumed_psd);
        }
        else if (axis == "separation")
        {
            if (out.sources.size() != 2)
                throw std::invalid_argument("separation sweep requires exactly 2 sources");
            const double center =
                0.5 * (out.sources[0].theta_deg + out.sources[1].theta_deg);
            const bool ascending = out.sources[0].theta_deg <= out.sources[1].theta_deg;
            out.sources[ascending ? 0 : 1].theta_deg = center - value / 2.0;
            out.sources[ascending ? 1 : 0].theta_deg = center + value / 2.0;
        }
        else if (axis == "snapshots")
        {
            out.sampling.snapshots = static_cast<long>(std::llround(value));
        }
        else if (axis == "rho")
        {
            bool any_group = false;
            for (const auto &src : out.sources)
                any_group = any_group || src.coherence_group >= 0;
            for (auto &src : out.sources)
            {
                if (!any_group)
                    src.coherence_group = 0;
                if (src.coherence_group >= 0)
                    src.rho = value;
            }
        }
        else
        {
            throw std::invalid_argument("unknown sweep axis '" + axis + "'");
        }
        return out;
    }

    namespace
    {
        // Signal-subspace rank of the assumed single-source model at endfire.
        int endfire_rank(const ArrayGeometry &geometry, int m, double rank_tol, double band_lo,
                         double band_hi, double dt)
        {
            return effective_dim_max(geometry, 1, 0.5 * (band_lo + band_hi), band_hi - band_lo,
                                     m, dt, rank_tol);
        }

        int endfire_rank_psd(const PsdSpec &psd, const EstimatorSpec &est,
                             const ArrayGeometry &geometry, double dt)
        {
            const ApproxStcm endfire =
                approx_stcm_psd(geometry, deg2rad(90.0), 0.0, psd, est.m, dt);
            const ModalBasis basis = modal_basis(endfire);
            const double threshold = est.rank_tol * basis.sigma[0];
            int rank = 0;
            for (Eigen::Index i = 0; i < basis.sigma.size(); ++i)
                if (basis.sigma[i] > threshold)
                    ++rank;
            return rank;
        }

        // the table already holds the endfire eigenvalues when 90 deg is on
        // its grid; -1 when it is not
        int endfire_rank_from_table(const ModalTable &table, double rank_tol)
        {
            for (Eigen::Index i = table.grid_deg.size(); i-- > 0;)
                if (std::abs(table.grid_deg[i] - 90.0) < 1e-9)
                {
                    const Eigen::VectorXd &sigma = table.sigma[static_cast<std::size_t>(i)];
                    int rank = 0;
                    for (Eigen::Index j = 0; j < sigma.size(); ++j)
                        if (sigma[j] > rank_tol * sigma[0])
                            ++rank;
                    return rank;
                }
            return -1;
        }

        SpatialSpectrum sf_spectrum(const EstimatorSpec &est, const ArrayGeometry &geometry,
                                    const StcmEstimate &estimate,
                                    const Eigen::MatrixXcd &noise_basis,
                                    const Eigen::VectorXd &grid_deg,
                                    const Eigen::VectorXd &freqs)
        {
            SpatialSpectrum spectrum;
            spectrum.grid_deg = grid_deg;
            spectrum.values = Eigen::VectorXd::Zero(grid_deg.size());
            spectrum.method = method_to_string(est.method);
            spectrum.m = est.m;
            spectrum.order = estimate.length() - static_cast<int>(noise_basis.cols());

            // factor once for MVDR
            Eigen::LDLT<Eigen::MatrixXcd> ldlt;
            if (est.method == Method::SfMvdr)
            {
                Eigen::MatrixXcd reg = estimate.s;
                reg.diagonal().array() += 1e-6 * estimate.s.trace().real() / estimate.length();
                ldlt.compute(reg);
            }

            for (Eigen::Index i = 0; i < grid_deg.size(); ++i)
            {
                const StackedModel model = build_stacked_model(
                    geometry, deg2rad(grid_deg[i]), 0.0, estimate.m, estimate.dt);
                double acc = 0.0;
                for (Eigen::Index q = 0; q < freqs.size(); ++q)
                {
                    const Eigen::VectorXcd g = g_vector(model, freqs[q]);
                    double v = 0.0;
                    switch (est.method)
                    {
                    case Method::SfCbf:
                        v = (g.adjoint() * estimate.s * g).value().real();
                        break;
                    case Method::SfMvdr:
                        v = 1.0 / std::max((g.adjoint() * ldlt.solve(g)).value().real(),
                                           spectrum_floor);
                        break;
                    case Method::SfMusic:
                        v = 1.0 / std::max((noise_basis.adjoint() * g).squaredNorm(),
                                           spectrum_floor);
                        break;
                    default:
                        throw std::logic_error("sf_spectrum: not a space-frequency method");
                    }
                    acc += v;
                }
                spectrum.values[i] = std::max(acc / freqs.size(), 1e-300);
            }
            return spectrum;
        }

        ModalTable build_table_for(const ExperimentSpec &spec, int threads = 1)
        {
            const EstimatorSpec &est = spec.estimator;
            const double dt = 1.0 / spec.sampling.fs;
            const Eigen::VectorXd grid = est.grid.make();
            if (est.assume_true_psd)
            {
                PsdSpec psd = spec.sources.front().psd;
                psd.power = 1.0;
                return build_modal_table_psd(spec.geometry, grid, est.m, dt, psd, threads);
            }
            const double fc = 0.5 * (est.assumed_psd.f_lo + est.assumed_psd.f_hi);
            const double B = est.assumed_psd.f_hi - est.assumed_psd.f_lo;
            return build_modal_table(spec.geometry, grid, est.m, dt, fc, B, threads);
        }

        SnapshotMatrix simulate_trial_data(const ExperimentSpec &spec, std::uint64_t trial_seed,
                                           std::vector<double> &truth_deg)
        {
            const long n = spec.sampling.snapshots;
            const std::size_t n_src = spec.sources.size();

            truth_deg.resize(n_src);
            Rng jitter_rng(derive_seed(trial_seed, 1000));
            for (std::size_t k = 0; k < n_src; ++k)
            {
                truth_deg[k] = spec.sources[k].theta_deg;
                if (spec.jitter_deg > 0.0)
                    truth_deg[k] += jitter_rng.uniform(-spec.jitter_deg, spec.jitter_deg);
            }

            const bool noiseless = !std::isfinite(spec.snr_db[0]);
            std::vector<std::pair<SourceSpec, Eigen::VectorXcd>> fields;
            fields.reserve(n_src);
            for (std::size_t k = 0; k < n_src; ++k)
            {
                SourceSpec src = spec.sources[k];
                src.theta_deg = truth_deg[k];
                src.psd.power = noiseless ? 1.0 : std::pow(10.0, spec.snr_db[k] / 10.0);
                Eigen::VectorXcd series =
                    synthesize_source(src.psd, spec.sampling.fs, static_cast<std::size_t>(n),
                                      derive_seed(trial_seed, k));
                fields.emplace_back(std::move(src), std::move(series));
            }

            // coherence groups mix against the first member
            for (std::size_t k = 0; k < n_src; ++k)
            {
                const int group = fields[k].first.coherence_group;
                if (group < 0)
                    continue;
                for (std::size_t ref = 0; ref < k; ++ref)
                    if (fields[ref].first.coherence_group == group)
                    {
                        fields[k].second = correlate_pair(fields[ref].second, fields[k].second,
                                                          fields[k].first.rho);
                        break;
                    }
            }

            SnapshotMatrix snapshots = propagate(fields, spec.geometry, spec.sampling.fs);
            if (!noiseless)
                snapshots = add_noise(snapshots, 1.0, derive_seed(trial_seed, 2000));
            return snapshots;
        }

        TrialResult run_trial_impl(const ExperimentSpec &spec, std::size_t trial_index,
                                   const ModalTable *table)
        {
            TrialResult result;
            try
            {
                const std::uint64_t trial_seed = derive_seed(spec.sampling.seed, trial_index);
                const SnapshotMatrix snapshots =
                    simulate_trial_data(spec, trial_seed, result.truth_deg);
                const EstimationReport est = estimate_snapshots(
                    spec.estimator, spec.geometry, snapshots,
                    &spec.sources.front().psd, table);
                result.p_mdl = est.p_mdl;
                result.p_used = est.p_used;
                result.p_mdl_zero = est.p_mdl == 0;
                result.spectrum_seconds = est.spectrum_seconds;

                const PeakSet &peaks = est.peaks;
                result.peak_count = static_cast<int>(peaks.size());

                const std::size_t n_src = result.truth_deg.size();
                result.estimates_deg.assign(n_src,
                                            std::numeric_limits<double>::quiet_NaN());
                result.errors_deg.clear();
                if (peaks.size() != n_src)
                {
                    result.failure = "peak_count";
                    return result;
                }

                // greedy nearest assignment without replacement, ties broken
                // toward the smaller estimated angle
                struct Cand
                {
                    double dist;
                    double est;
                    std::size_t truth;
                    std::size_t peak;
                };
                std::vector<Cand> cands;
                for (std::size_t i = 0; i < n_src; ++i)
                    for (std::size_t j = 0; j < peaks.size(); ++j)
                        cands.push_back({std::abs(peaks[j].theta_deg - result.truth_deg[i]),
                                         peaks[j].theta_deg, i, j});
                std::sort(cands.begin(), cands.end(), [](const Cand &a, const Cand &b) {
                    if (a.dist != b.dist)
                        return a.dist < b.dist;
                    if (a.est != b.est)
                        return a.est < b.est;
                    return a.truth < b.truth;
                });
                std::vector<bool> truth_used(n_src, false), peak_used(peaks.size(), false);
                std::size_t assigned = 0;
                for (const Cand &c : cands)
                {
                    if (truth_used[c.truth] || peak_used[c.peak])
                        continue;
                    truth_used[c.truth] = true;
                    peak_used[c.peak] = true;
                    result.estimates_deg[c.truth] = c.est;
                    ++assigned;
                    if (assigned == n_src)
                        break;
                }

                bool all_close = true;
                result.errors_deg.resize(n_src);
                for (std::size_t i = 0; i < n_src; ++i)
                {
                    result.errors_deg[i] =
                        std::abs(result.estimates_deg[i] - result.truth_deg[i]);
                    all_close = all_close && result.errors_deg[i] < 1.0;
                }
                if (!all_close)
                {
                    result.errors_deg.clear();
                    result.failure = "angle_error";
                    return result;
                }
                result.resolved = true;
            }
            catch (const std::exception &e)
            {
                result.resolved = false;
                result.failure = std::string("exception: ") + e.what();
            }
            return result;
        }
    } // namespace

    SnapshotMatrix simulate_snapshots(const ExperimentSpec &spec, std::size_t trial_index,
                                      std::vector<double> *truth_deg)
    {
        spec.validate_scenario();
        std::vector<double> truth;
        SnapshotMatrix snapshots =
            simulate_trial_data(spec, derive_seed(spec.sampling.seed, trial_index), truth);
        if (truth_deg)
            *truth_deg = std::move(truth);
        return snapshots;
    }

    EstimationReport estimate_snapshots(const EstimatorSpec &est, const ArrayGeometry &geometry,
                                        const SnapshotMatrix &snapshots, const PsdSpec *true_psd,
                                        const ModalTable *prebuilt)
    {
        geometry.validate();
        if (est.assume_true_psd && !true_psd)
            throw std::invalid_argument(
                "estimate_snapshots: true-psd estimator needs the source PSD");
        const StcmEstimate estimate = estimate_stcm(snapshots, est.m);
        const int L = estimate.length();
        const EigDescending eig = hermitian_eig_descending(estimate.s);

        EstimationReport out;
        out.p_mdl = mdl_order(eig.values, estimate.n_vectors);

        const bool wimo = est.method == Method::OneWimo || est.method == Method::PWimo;
        double band_lo, band_hi;
        if (est.assume_true_psd)
        {
            band_lo = true_psd->support_lo();
            band_hi = true_psd->support_hi();
        }
        else if (!wimo && est.freq_grid.count > 0)
        {
            band_lo = est.freq_grid.start_hz;
            band_hi = est.freq_grid.stop_hz;
        }
        else
        {
            est.assumed_psd.validate();
            band_lo = est.assumed_psd.f_lo;
            band_hi = est.assumed_psd.f_hi;
        }
        out.validity_ratio = validity_ratio(est.m, band_hi - band_lo, snapshots.fs);

        ModalTable local;
        const ModalTable *table = prebuilt;
        if (wimo && !table)
        {
            const Eigen::VectorXd grid = est.grid.make();
            if (est.assume_true_psd)
            {
                PsdSpec psd = *true_psd;
                psd.power = 1.0;
                local = build_modal_table_psd(geometry, grid, est.m, estimate.dt, psd);
            }
            else
            {
                local = build_modal_table(geometry, grid, est.m, estimate.dt,
                                          0.5 * (band_lo + band_hi), band_hi - band_lo);
            }
            table = &local;
        }

        out.eps_max_1 = table ? endfire_rank_from_table(*table, est.rank_tol) : -1;
        if (out.eps_max_1 < 0)
        {
            if (est.assume_true_psd)
                out.eps_max_1 = endfire_rank_psd(*true_psd, est, geometry, estimate.dt);
            else
                out.eps_max_1 = endfire_rank(geometry, est.m, est.rank_tol, band_lo, band_hi,
                                             estimate.dt);
        }

        if (est.order == 0)
        {
            out.p_used = select_order(est.method == Method::PWimo, std::max(out.p_mdl, 1),
                                      out.eps_max_1, L);
        }
        else
        {
            if (est.order < 1 || est.order > L - 1)
                throw std::invalid_argument("estimator order must be in [1, " +
                                            std::to_string(L - 1) + "]");
            out.p_used = est.order;
        }

        const Eigen::MatrixXcd noise_basis = eig.vectors.rightCols(L - out.p_used);

        const auto t0 = std::chrono::steady_clock::now();
        switch (est.method)
        {
        case Method::OneWimo:
            out.spectrum = spectrum_1wimo(noise_basis, *table);
            break;
        case Method::PWimo:
            out.spectrum = spectrum_pwimo(noise_basis, *table);
            break;
        default:
        {
            FreqGridSpec fg = est.freq_grid;
            if (fg.count <= 0)
            {
                fg.start_hz = band_lo;
                fg.stop_hz = band_hi;
                fg.count = 33;
            }
            out.spectrum = sf_spectrum(est, geometry, estimate, noise_basis, est.grid.make(),
                                       fg.make());
            break;
        }
        }
        const auto t1 = std::chrono::steady_clock::now();
        out.spectrum_seconds = std::chrono::duration<double>(t1 - t0).count();

        out.peaks = find_peaks(out.spectrum, est.min_prominence_db);
        return out;
    }

    Eigen::MatrixXd sf_map(const EstimatorSpec &est, const ArrayGeometry &geometry,
                           const SnapshotMatrix &snapshots, const Eigen::VectorXd &freqs_hz,
                           const Eigen::VectorXd &grid_deg)
    {
        if (est.method != Method::SfCbf && est.method != Method::SfMvdr &&
            est.method != Method::SfMusic)
            throw std::invalid_argument("sf_map: method must be one of sf-cbf, sf-mvdr, sf-music");
        const StcmEstimate estimate = estimate_stcm(snapshots, est.m);
        const int L = estimate.length();

        Eigen::MatrixXcd noise_basis;
        if (est.method == Method::SfMusic)
        {
            const EigDescending eig = hermitian_eig_descending(estimate.s);
            int p = est.order;
            if (p == 0)
                p = std::clamp(std::max(mdl_order(eig.values, estimate.n_vectors), 1), 1, L - 1);
            if (p < 1 || p > L - 1)
                throw std::invalid_argument("sf_map: order must be in [1, " +
                                            std::to_string(L - 1) + "]");
            noise_basis = eig.vectors.rightCols(L - p);
        }

        Eigen::LDLT<Eigen::MatrixXcd> ldlt;
        if (est.method == Method::SfMvdr)
        {
            Eigen::MatrixXcd reg = estimate.s;
            reg.diagonal().array() += 1e-6 * estimate.s.trace().real() / L;
            ldlt.compute(reg);
        }

        Eigen::MatrixXd map(freqs_hz.size(), grid_deg.size());
        for (Eigen::Index j = 0; j < grid_deg.size(); ++j)
        {
            const StackedModel model = build_stacked_model(geometry, deg2rad(grid_deg[j]), 0.0,
                                                           estimate.m, estimate.dt);
            for (Eigen::Index i = 0; i < freqs_hz.size(); ++i)
            {
                const Eigen::VectorXcd g = g_vector(model, freqs_hz[i]);
                double v = 0.0;
                switch (est.method)
                {
                case Method::SfCbf:
                    v = (g.adjoint() * estimate.s * g).value().real();
                    break;
                case Method::SfMvdr:
                    v = 1.0 / std::max((g.adjoint() * ldlt.solve(g)).value().real(),
                                       spectrum_floor);
                    break;
                default:
                    v = 1.0 / std::max((noise_basis.adjoint() * g).squaredNorm(),
                                       spectrum_floor);
                    break;
                }
                map(i, j) = v;
            }
        }
        return map;
    }

    TrialResult run_trial(const ExperimentSpec &spec, std::size_t trial_index)
    {
        spec.validate();
        const bool wimo =
            spec.estimator.method == Method::OneWimo || spec.estimator.method == Method::PWimo;
        if (wimo)
        {
            const ModalTable table = build_table_for(spec);
            return run_trial_impl(spec, trial_index, &table);
        }
        return run_trial_impl(spec, trial_index, nullptr);
    }

    std::optional<double> pooled_rmse(const std::vector<TrialResult> &trials)
    {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto &t : trials)
        {
            if (!t.resolved)
                continue;
            for (double e : t.errors_deg)
            {
                sum += e * e;
                ++count;
            }
        }
        if (count == 0)
            return std::nullopt;
        return std::sqrt(sum / static_cast<double>(count));
    }

    SweepResult run_sweep(const ExperimentSpec &spec, int threads)
    {
        spec.validate();
        SweepResult result;
        std::vector<double> values{0.0};
        if (spec.sweep)
        {
            result.axis = spec.sweep->axis;
            values = spec.sweep->values;
        }

        const bool wimo = spec.estimator.method == Method::OneWimo ||
                          spec.estimator.method == Method::PWimo;
        // only the bandwidth axis alters the modal table
        const bool table_per_point = spec.sweep && spec.sweep->axis == "bandwidth";
        ModalTable shared_table;
        if (wimo && !table_per_point && spec.trials > 0)
            shared_table = build_table_for(spec, threads);

        for (double value : values)
        {
            const ExperimentSpec point_spec =
                spec.sweep ? apply_sweep_value(spec, spec.sweep->axis, value) : spec;
            point_spec.validate();

            SweepPoint point;
            point.value = value;
            point.trials.resize(static_cast<std::size_t>(point_spec.trials));

            ModalTable point_table;
            const ModalTable *table = &shared_table;
            if (wimo && table_per_point && point_spec.trials > 0)
            {
                point_table = build_table_for(point_spec, threads);
                table = &point_table;
            }

            parallel_for(point.trials.size(), threads, [&](std::size_t i) {
                point.trials[i] = run_trial_impl(point_spec, i, wimo ? table : nullptr);
            });

            double time_sum = 0.0;
            for (const auto &t : point.trials)
            {
                point.resolved_count += t.resolved ? 1 : 0;
                time_sum += t.spectrum_seconds;
            }
            if (!point.trials.empty())
            {
                point.resolution_prob =
                    static_cast<double>(point.resolved_count) / point.trials.size();
                point.mean_spectrum_seconds = time_sum / point.trials.size();
            }
            point.rmse_deg = pooled_rmse(point.trials);
            result.points.push_back(std::move(point));
        }
        return result;
    }

    bool TrialResult::deterministic_equal(const TrialResult &other) const
    {
        auto list_equal = [](const std::vector<double> &a, const std::vector<double> &b) {
            if (a.size() != b.size())
                return false;
            for (std::size_t i = 0; i < a.size(); ++i)
            {
                const bool nan_a = std::isnan(a[i]);
                const bool nan_b = std::isnan(b[i]);
                if (nan_a != nan_b || (!nan_a && a[i] != b[i]))
                    return false;
            }
            return true;
        };
        return list_equal(truth_deg, other.truth_deg) &&
               list_equal(estimates_deg, other.estimates_deg) &&
               list_equal(errors_deg, other.errors_deg) && peak_count == other.peak_count &&
               resolved == other.resolved && failure == other.failure && p_mdl == other.p_mdl &&
               p_used == other.p_used && p_mdl_zero == other.p_mdl_zero;
    }

    void write_sweep_csv(const std::string &path, const SweepResult &result)
    {
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot open for writing: " + path);
        out << "axis,value,trial,resolved,failure,peak_count,p_mdl,p_used,p_mdl_zero,"
               "truth_deg,estimates_deg,errors_deg\n";
        const std::string axis = result.axis.empty() ? "none" : result.axis;
        for (const auto &point : result.points)
        {
            for (std::size_t i = 0; i < point.trials.size(); ++i)
            {
                const TrialResult &t = point.trials[i];
                out << axis << ',' << format_double(point.value) << ',' << i << ','
                    << (t.resolved ? 1 : 0) << ',' << t.failure << ',' << t.peak_count << ','
                    << t.p_mdl << ',' << t.p_used << ',' << (t.p_mdl_zero ? 1 : 0) << ','
                    << join_list(t.truth_deg) << ',' << join_list(t.estimates_deg) << ','
                    << join_list(t.errors_deg) << '\n';
            }
        }
        if (!out)
            throw std::runtime_error("write failed: " + path);
    }

    void write_sweep_summary_json(const std::string &path, const SweepResult &result)
    {
        nlohmann::ordered_json summary;
        summary["axis"] = result.axis.empty() ? "none" : result.axis;
        summary["points"] = nlohmann::ordered_json::array();
        for (const auto &point : result.points)
        {
            nlohmann::ordered_json p;
            p["value"] = point.value;
            p["trials"] = point.trials.size();
            if (point.trials.empty())
            {
                p["empty"] = true;
                p["resolved"] = 0;
                p["resolution_prob"] = nullptr;
            }
            else
            {
                p["resolved"] = point.resolved_count;
                p["resolution_prob"] = point.resolution_prob;
            }
            if (point.rmse_deg)
                p["rmse_deg"] = *point.rmse_deg;
            else
                p["rmse_deg"] = nullptr;
            summary["points"].push_back(std::move(p));
        }
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot open for writing: " + path);
        out << summary.dump(2) << '\n';
    }

    void write_timing_json(const std::string &path, const SweepResult &result)
    {
        nlohmann::ordered_json timing;
        timing["note"] = "wall-clock sidecar; excluded from the determinism contract";
        timing["points"] = nlohmann::ordered_json::array();
        for (const auto &point : result.points)
        {
            nlohmann::ordered_json p;
            p["value"] = point.value;
            p["mean_spectrum_seconds"] = point.mean_spectrum_seconds;
            timing["points"].push_back(std::move(p));
        }
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot open for writing: " + path);
        out << timing.dump(2) << '\n';
    }

    std::vector<std::string> evaluate_checks(const ExperimentSpec &spec,
                                             const SweepResult &result)
    {
        std::vector<std::string> failures;
        char buf[160];
        for (const auto &point : result.points)
        {
            if (spec.checks.min_resolution_prob && !point.trials.empty() &&
                point.resolution_prob < *spec.checks.min_resolution_prob)
            {
                std::snprintf(buf, sizeof(buf),
                              "resolution_prob %.4g < %.4g at %s=%.4g", point.resolution_prob,
                              *spec.checks.min_resolution_prob,
                              result.axis.empty() ? "point" : result.axis.c_str(), point.value);
                failures.emplace_back(buf);
            }
            if (spec.checks.max_rmse_deg && point.rmse_deg &&
                *point.rmse_deg > *spec.checks.max_rmse_deg)
            {
                std::snprintf(buf, sizeof(buf), "rmse %.4g > %.4g at %s=%.4g", *point.rmse_deg,
                              *spec.checks.max_rmse_deg,
                              result.axis.empty() ? "point" : result.axis.c_str(), point.value);
                failures.emplace_back(buf);
            }
        }
        if (spec.checks.monotonic_resolution)
            for (std::size_t i = 1; i < result.points.size(); ++i)
                if (result.points[i].resolution_prob <
                    result.points[i - 1].resolution_prob - 1e-12)
                {
                    std::snprintf(buf, sizeof(buf),
                                  "resolution_prob not nondecreasing between points %zu and %zu",
                                  i - 1, i);
                    failures.emplace_back(buf);
                }
        return failures;
    }

} // namespace wimo
