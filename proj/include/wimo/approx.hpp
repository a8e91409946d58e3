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

#ifndef WIMO_APPROX_HPP
#define WIMO_APPROX_HPP

#include "wimo/geometry.hpp"
#include "wimo/psd.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wimo
{
    // Closed-form covariance approximation for one look direction,
    // normalized so the diagonal is 1 (trace = L). Factors entrywise:
    //   s_{k,l} = narrowband_{k,l} * wideband_{k,l}
    // with narrowband = g g^H at the carrier and wideband the sinc kernel
    // sinc(B (h_k - h_l)) in the uniform case. For a general PSD the
    // wideband factor is the carrier-stripped correlation kernel (complex
    // Hermitian, real only for spectra symmetric about the carrier).
    struct ApproxStcm
    {
        Eigen::MatrixXcd s;
        Eigen::MatrixXcd narrowband;
        Eigen::MatrixXcd wideband;
        StackedModel model;
        double fc = 0.0;
        double bandwidth = 0.0;         // uniform case; support width otherwise
        std::optional<PsdSpec> psd;     // set when built by quadrature

        int length() const { return static_cast<int>(s.rows()); }
    };

    // Uniform-PSD closed form:
    //   s_{k,l} = sinc(B (h_k - h_l)) exp(j 2 pi fc (h_k - h_l)).
    // B = 0 degenerates to the narrowband rank-1 model. Warns are left to
    // callers; fc > B/2 is advisable.
    ApproxStcm approx_stcm_uniform(const ArrayGeometry &geometry, double theta, double phi,
                                   double fc, double B, int m, double dt);

    struct QuadratureOptions
    {
        int initial_nodes = 2048;
        int max_nodes = 65536;
        double tol = 1e-9; // max entry delta between refinements
    };

    // General-PSD approximation by composite-trapezoid quadrature of
    //   integral S(f) exp(j 2 pi (h_k - h_l) f) df
    // over the PSD support, refined by node doubling until entries settle.
    ApproxStcm approx_stcm_psd(const ArrayGeometry &geometry, double theta, double phi,
                               const PsdSpec &psd, int m, double dt,
                               const QuadratureOptions &options = {});

    // Eigenpairs of the approximation, descending; eigenvalues clamped at 0
    // from below, eigenvector phases canonical (largest entry real positive).
    // The first eigenvector is the generalized steering vector.
    struct ModalBasis
    {
        Eigen::VectorXd sigma;
        Eigen::MatrixXcd u;

        const Eigen::MatrixXcd &vectors() const { return u; }
        Eigen::VectorXcd gsv() const { return u.col(0); }
    };

    ModalBasis modal_basis(const ApproxStcm &approx);

    // Checks the Hadamard-factorization structure of the approximation:
    // identical spectra for the full matrix and its wideband factor, and
    // per-cluster agreement between the modal vectors and the carrier-
    // modulated wideband eigenvectors. Degenerate clusters (relative gap
    // below cluster_gap) are compared as subspaces.
    struct Theorem1Report
    {
        double max_eigenvalue_mismatch = 0.0; // relative to sigma_1
        double max_principal_angle = 0.0;     // radians, worst cluster
        int cluster_count = 0;
        bool eigenvalues_match = false;
        bool subspaces_match = false;

        bool passed() const { return eigenvalues_match && subspaces_match; }
    };

    Theorem1Report theorem1_check(const ApproxStcm &approx, const ModalBasis &basis,
                                  double eig_tol = 1e-9, double angle_tol = 1e-6,
                                  double cluster_gap = 1e-8);

    // Band-average SS-transform power of x over the wideband factor's band:
    //   (1/B) integral_{-B/2}^{B/2} | sum_k x_k exp(-j 2 pi h_k u) |^2 du,
    // trapezoid quadrature. Equals x^H wideband x; maximal at the wideband
    // GSV where it equals sigma_1.
    double ss_band_power(const Eigen::VectorXcd &x, const Eigen::VectorXd &h, double B,
                         int nodes = 4096);

    // Numerical rank of the summed approximations over the given directions,
    // threshold rank_tol relative to the largest eigenvalue.
    int effective_dim(const ArrayGeometry &geometry, const std::vector<double> &thetas,
                      double fc, double B, int m, double dt, double rank_tol = 1e-3);

    // Worst-case bound: n_sources * rank at endfire (theta = 90 deg).
    int effective_dim_max(const ArrayGeometry &geometry, int n_sources, double fc, double B,
                          int m, double dt, double rank_tol = 1e-3);

    // Classic delay-line bound n_sources * (m + n_sensors).
    int bass_ale_bound(int n_sources, int m, int n_sensors);

    // Infinite-bandwidth wideband kernel block: m x m matrix with entries
    // sinc(|k - l| / nu) where fs = nu * B, plus its descending spectrum.
    struct AsymptoticSinf
    {
        Eigen::MatrixXd matrix;
        Eigen::VectorXd sigma;
    };
    AsymptoticSinf asymptotic_sinf(int m, double nu);

    // Frequency-bin decorrelation diagnostic m*B/fs; the approximation is
    // derived under m*B/fs >> 1.
    inline double validity_ratio(int m, double B, double fs) { return m * B / fs; }

    // Precomputed modal table over a DOA grid: the offline signal-subspace
    // database the estimators test against. Read-only after build.
    struct ModalTable
    {
        ArrayGeometry geometry;
        Eigen::VectorXd grid_deg;
        int m = 1;
        double dt = 0.0;
        double fc = 0.0;
        double bandwidth = 0.0;
        std::optional<PsdSpec> psd;
        std::vector<Eigen::VectorXd> sigma; // per grid point, descending
        std::vector<Eigen::MatrixXcd> u;    // per grid point, L x L

        int length() const { return sigma.empty() ? 0 : static_cast<int>(sigma.front().size()); }
        Eigen::MatrixXcd sbreve(std::size_t i) const; // U diag(sigma) U^H
        std::string key() const;                      // canonical cache key
    };

    ModalTable build_modal_table(const ArrayGeometry &geometry, const Eigen::VectorXd &grid_deg,
                                 int m, double dt, double fc, double B, int threads = 0);
    ModalTable build_modal_table_psd(const ArrayGeometry &geometry, const Eigen::VectorXd &grid_deg,
                                     int m, double dt, const PsdSpec &psd, int threads = 0);

    // Key a table configuration would carry, without building it; pass a psd
    // for density-modeled tables, fc/B otherwise.
    std::string modal_table_key(const ArrayGeometry &geometry, const Eigen::VectorXd &grid_deg,
                                int m, double dt, double fc, double B,
                                const PsdSpec *psd = nullptr);

} // namespace wimo

#endif
