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

#ifndef WIMO_BENCH_HPP
#define WIMO_BENCH_HPP

#include "wimo/estimators.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wimo
{
    enum class Method
    {
        OneWimo,
        PWimo,
        SfCbf,
        SfMvdr,
        SfMusic
    };

    Method method_from_string(const std::string &name);
    std::string method_to_string(Method method);

    struct GridSpec
    {
        double start_deg = -90.0;
        double stop_deg = 90.0;
        double step_deg = 1.0;
        Eigen::VectorXd make() const;
    };

    struct FreqGridSpec
    {
        double start_hz = 0.0;
        double stop_hz = 0.0;
        int count = 0;
        Eigen::VectorXd make() const;
    };

    struct EstimatorSpec
    {
        Method method = Method::OneWimo;
        int m = 6;
        int order = 0; // manual P; 0 selects the automatic rule
        GridSpec grid;
        bool assume_true_psd = false; // model the signal subspace from the source PSD
        PsdSpec assumed_psd;          // uniform band assumption otherwise
        double min_prominence_db = 3.0;
        double rank_tol = 1e-3;
        FreqGridSpec freq_grid; // space-frequency methods; defaulted from the band
    };

    struct SamplingSpec
    {
        double fs = 10e3;
        long snapshots = 8192;
        std::uint64_t seed = 1;
    };

    struct SweepSpec
    {
        std::string axis; // snr | bandwidth | separation | snapshots | rho
        std::vector<double> values;
    };

    struct ExperimentChecks
    {
        std::optional<double> min_resolution_prob;
        std::optional<double> max_rmse_deg;
        bool monotonic_resolution = false; // nondecreasing along the sweep
    };

    struct ExperimentSpec
    {
        ArrayGeometry geometry;
        std::vector<SourceSpec> sources;
        std::vector<double> snr_db; // per source; noise variance is fixed at 1
        SamplingSpec sampling;
        EstimatorSpec estimator;
        int trials = 50;
        double jitter_deg = 0.0; // truth jitter half-width, uniform per source
        std::optional<SweepSpec> sweep;
        ExperimentChecks checks;

        void validate_scenario() const; // geometry, sources, sampling only
        void validate() const;          // scenario + estimator + sweep
    };

    // eta = 2 (f_h - f_l)/(f_h + f_l), gamma = f_h / f_l.
    struct BandwidthMetrics
    {
        double eta;
        double gamma;
    };
    BandwidthMetrics bandwidth_metrics(double f_l, double f_h);

    struct TrialResult
    {
        std::vector<double> truth_deg;     // jitter applied
        std::vector<double> estimates_deg; // matched to truth order; NaN if unmatched
        std::vector<double> errors_deg;    // |estimate - truth| where matched
        int peak_count = 0;
        bool resolved = false;
        std::string failure; // empty when resolved; else a failure class
        int p_mdl = 0;
        int p_used = 0;
        bool p_mdl_zero = false;
        double spectrum_seconds = 0.0; // wall clock, excluded from determinism

        bool deterministic_equal(const TrialResult &other) const;
    };

    struct SweepPoint
    {
        double value = 0.0; // sweep axis value (0 for a plain run)
        std::vector<TrialResult> trials;
        int resolved_count = 0;
        double resolution_prob = 0.0;
        std::optional<double> rmse_deg; // pooled over resolved trials; absent if none
        double mean_spectrum_seconds = 0.0;
    };

    struct SweepResult
    {
        std::string axis; // empty for a plain run
        std::vector<SweepPoint> points;
    };

    // Returns a copy of the spec with the sweep axis applied at `value`.
    ExperimentSpec apply_sweep_value(const ExperimentSpec &spec, const std::string &axis,
                                     double value);

    // Deterministic data acquisition for one trial: synthesize each source
    // (per-source power 10^(snr/10), unit noise variance; noiseless when SNRs
    // are absent), apply coherence mixing, propagate, add noise. Jittered
    // truth angles are reported through truth_deg when given.
    SnapshotMatrix simulate_snapshots(const ExperimentSpec &spec, std::size_t trial_index = 0,
                                      std::vector<double> *truth_deg = nullptr);

    // Covariance -> eigen split (order rule or manual) -> spectrum -> peaks,
    // on already-acquired snapshots. true_psd supplies the source PSD when
    // the estimator models the signal subspace from it; prebuilt reuses an
    // offline modal table (its key must match the estimator configuration).
    struct EstimationReport
    {
        SpatialSpectrum spectrum;
        PeakSet peaks;
        int p_mdl = 0;
        int p_used = 0;
        int eps_max_1 = 0;         // assumed single-source rank at endfire
        double validity_ratio = 0; // m * B / fs decorrelation diagnostic
        double spectrum_seconds = 0.0;
    };
    EstimationReport estimate_snapshots(const EstimatorSpec &estimator,
                                        const ArrayGeometry &geometry,
                                        const SnapshotMatrix &snapshots,
                                        const PsdSpec *true_psd = nullptr,
                                        const ModalTable *prebuilt = nullptr);

    // Space-frequency distribution map, rows = frequencies, cols = grid angles.
    Eigen::MatrixXd sf_map(const EstimatorSpec &estimator, const ArrayGeometry &geometry,
                           const SnapshotMatrix &snapshots, const Eigen::VectorXd &freqs_hz,
                           const Eigen::VectorXd &grid_deg);

    // Full deterministic pipeline for one Monte Carlo trial: synthesize,
    // correlate, propagate, add noise, covariance, eigen split with the order
    // rule, spectrum, peaks, nearest-assignment match against the truth.
    TrialResult run_trial(const ExperimentSpec &spec, std::size_t trial_index);

    // Runs all sweep points and trials (parallel over trials); results are
    // identical for any thread count.
    SweepResult run_sweep(const ExperimentSpec &spec, int threads = 0);

    // Pooled RMSE over resolved trials; absent when nothing resolved.
    std::optional<double> pooled_rmse(const std::vector<TrialResult> &trials);

    // Deterministic writers (timings are excluded; see write_timing_json).
    void write_sweep_csv(const std::string &path, const SweepResult &result);
    void write_sweep_summary_json(const std::string &path, const SweepResult &result);
    // Wall-clock sidecar, outside the determinism contract.
    void write_timing_json(const std::string &path, const SweepResult &result);

    // Evaluates spec.checks against a finished sweep; returns failure
    // messages (empty = all pass).
    std::vector<std::string> evaluate_checks(const ExperimentSpec &spec,
                                             const SweepResult &result);

} // namespace wimo

#endif
