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

#ifndef WIMO_STCM_HPP
#define WIMO_STCM_HPP

#include "wimo/simulator.hpp"

namespace wimo
{
    // Sample spatial-temporal covariance, L x L Hermitian with L = m * n_sensors.
    struct StcmEstimate
    {
        Eigen::MatrixXcd s;
        std::size_t n_vectors = 0; // M - m + 1
        int m = 1;
        int n_sensors = 0;
        double fs = 0.0;
        double dt = 0.0;

        int length() const { return static_cast<int>(s.rows()); }
    };

    // Columns are the stacked observation vectors, one per time index
    // t = m-1 .. M-1. Entry k of a column holds sensor floor(k/m) at sample
    // t - (m-1) + (k mod m): oldest sample first inside each sensor block,
    // matching the model vector ordering of build_stacked_model.
    Eigen::MatrixXcd stack_observations(const SnapshotMatrix &snapshots, int m);

    StcmEstimate estimate_stcm(const SnapshotMatrix &snapshots, int m);

    struct SubspaceSplit
    {
        Eigen::VectorXd eigenvalues;  // descending
        Eigen::MatrixXcd signal_basis; // L x P
        Eigen::MatrixXcd noise_basis;  // L x (L - P)
        int order = 0;                 // P
    };

    // Hermitian EVD and split into signal/noise subspaces; requires
    // 1 <= p <= L-1 so a noise subspace remains.
    SubspaceSplit eigen_split(const StcmEstimate &estimate, int p);

    // Wax-Kailath MDL over sample eigenvalues (descending), argmin over
    // k = 0..L-1 of
    //   -(L-k) n log(geoMean / arithMean of the trailing eigenvalues)
    //   + k (2L - k)/2 log n.
    // Nonpositive trailing eigenvalues are clamped to 1e-15 * max before logs.
    int mdl_order(const Eigen::VectorXd &eigenvalues, std::size_t n_vectors);

} // namespace wimo

#endif
