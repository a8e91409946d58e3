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

#ifndef WIMO_SIMULATOR_HPP
#define WIMO_SIMULATOR_HPP

#include "wimo/geometry.hpp"
#include "wimo/psd.hpp"

#include <cstdint>
#include <utility>
#include <vector>

// Signal model: complex analytic signals synthesized in the frequency domain
// on the length-n DFT grid, i.e. realizations of a periodic band-limited
// Gaussian process. Delays are applied as exact circular (periodic-grid)
// frequency-domain phase shifts, which is the exact continuous-time delay of
// that process; a delayed pure grid tone reproduces the analytic phase shift
// to machine precision.

namespace wimo
{
    struct SourceSpec
    {
        double theta_deg = 0.0;
        PsdSpec psd;
        int coherence_group = -1; // -1: independent
        double rho = 0.0;         // coherence index within the group, [0, 1]
    };

    struct SnapshotMatrix
    {
        Eigen::MatrixXcd data; // n_sensors x n_snapshots
        double fs = 0.0;
        std::uint64_t seed = 0;

        int n_sensors() const { return static_cast<int>(data.rows()); }
        long n_snapshots() const { return static_cast<long>(data.cols()); }
    };

    // Zero-mean circular complex Gaussian series with periodogram expectation
    // matching the PSD shape and total variance psd.power. Support must lie
    // strictly inside (0, fs/2).
    Eigen::VectorXcd synthesize_source(const PsdSpec &psd, double fs, std::size_t n,
                                       std::uint64_t seed);

    // Equal-power coherence mixing: returns rho*x1 + sqrt(1-rho^2)*x2.
    Eigen::VectorXcd correlate_pair(const Eigen::VectorXcd &x1, const Eigen::VectorXcd &x2,
                                    double rho);

    // Circular band-limited delay by tau seconds (frequency-domain phase).
    Eigen::VectorXcd delay_series(const Eigen::VectorXcd &x, double fs, double tau);

    // Superimposes every source on every sensor with its propagation delay.
    SnapshotMatrix propagate(const std::vector<std::pair<SourceSpec, Eigen::VectorXcd>> &sources,
                             const ArrayGeometry &geometry, double fs);

    // Adds i.i.d. circular complex Gaussian noise of variance sigma_n2 per
    // sensor-sample. SNR convention: SNR_dB = 10 log10(sigma_x^2 / sigma_n^2).
    SnapshotMatrix add_noise(const SnapshotMatrix &snapshots, double sigma_n2, std::uint64_t seed);

} // namespace wimo

#endif
