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

#ifndef WIMO_ESTIMATORS_HPP
#define WIMO_ESTIMATORS_HPP

#include "wimo/approx.hpp"
#include "wimo/stcm.hpp"

#include <string>
#include <vector>

namespace wimo
{
    // All inverse-orthogonality spectra floor their denominators at 1e-12 so
    // values stay finite; argmax locations are unaffected.
    inline constexpr double spectrum_floor = 1e-12;

    struct SpatialSpectrum
    {
        Eigen::VectorXd grid_deg; // strictly increasing
        Eigen::VectorXd values;   // linear scale, > 0
        std::string method;
        int m = 0;
        int order = 0;     // P used for the noise subspace
        double flops = 0;  // advisory multiply count for the evaluation
    };

    // P(theta) = 1 / || U_n^H u_1(theta) ||^2 over the table grid.
    SpatialSpectrum spectrum_1wimo(const Eigen::MatrixXcd &noise_basis, const ModalTable &table);

    // P(theta) = 1 / trace(U_n^H S(theta) U_n) over the table grid.
    SpatialSpectrum spectrum_pwimo(const Eigen::MatrixXcd &noise_basis, const ModalTable &table);

    // Linear map of the stacked vector onto a single (f, theta) point:
    // sum_k y_k exp(-j 2 pi h_k f). Reduces to the conventional beamformer
    // for m = 1 and to a DFT sample for a single sensor.
    cxd ss_transform(const Eigen::VectorXcd &y, const StackedModel &model, double f);

    // Space-frequency distributions evaluated pointwise. Angles in radians.
    double sf_cbf(const StcmEstimate &estimate, const ArrayGeometry &geometry, double f,
                  double theta, double phi = 0.0);
    // Inverts S + delta*trace(S)/L*I (diagonal regularization).
    double sf_mvdr(const StcmEstimate &estimate, const ArrayGeometry &geometry, double f,
                   double theta, double phi = 0.0, double delta = 1e-6);
    double sf_music(const Eigen::MatrixXcd &noise_basis, const ArrayGeometry &geometry, int m,
                    double dt, double f, double theta, double phi = 0.0);

    struct Peak
    {
        double theta_deg = 0.0;
        double height_db = 0.0;
        double prominence_db = 0.0;
    };
    using PeakSet = std::vector<Peak>;

    // Local maxima of the dB-scaled spectrum with topographic prominence at
    // least min_prominence_db, sorted by height. Plateaus resolve to their
    // lowest index. Locations are refined by a 3-point parabola fitted to the
    // reciprocal of the spectrum, which is smooth near an orthogonality null;
    // heights by a parabola on the dB values. max_count < 0 keeps all peaks.
    PeakSet find_peaks(const SpatialSpectrum &spectrum, double min_prominence_db = 3.0,
                       int max_count = -1);

    // Signal-subspace order rule: start from max(p_mdl, eps_max_1) and clamp
    // into [0.2 L, 0.6 L] for the single-mode test or [0.5 L, 0.7 L] for the
    // full-matrix test; the result is always kept inside [1, L-1].
    int select_order(bool pure_wimo, int p_mdl, int eps_max_1, int L);

} // namespace wimo

#endif
