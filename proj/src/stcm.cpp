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

#include "wimo/stcm.hpp"

#include <cmath>
#include <stdexcept>

namespace wimo
{

    Eigen::MatrixXcd stack_observations(const SnapshotMatrix &snapshots, int m)
    {
        if (m < 1)
            throw std::invalid_argument("stack_observations: m must be >= 1");
        const long M = snapshots.n_snapshots();
        if (M < m)
            throw std::invalid_argument("stack_observations: fewer snapshots than lag order");
        const int ns = snapshots.n_sensors();
        const int L = ns * m;
        const long n_vec = M - m + 1;

        Eigen::MatrixXcd stacked(L, n_vec);
        for (int k = 0; k < L; ++k)
        {
            const int sensor = k / m;
            const int lag = k % m;
            stacked.row(k) = snapshots.data.row(sensor).segment(lag, n_vec);
        }
        return stacked;
    }

    StcmEstimate estimate_stcm(const SnapshotMatrix &snapshots, int m)
    {
        const Eigen::MatrixXcd stacked = stack_observations(snapshots, m);
        const auto n_vec = static_cast<std::size_t>(stacked.cols());

        StcmEstimate est;
        est.s = stacked * stacked.adjoint() / static_cast<double>(n_vec);
        est.s = 0.5 * (est.s + est.s.adjoint().eval()); // kill rounding drift
        est.n_vectors = n_vec;
        est.m = m;
        est.n_sensors = snapshots.n_sensors();
        est.fs = snapshots.fs;
        est.dt = snapshots.fs > 0.0 ? 1.0 / snapshots.fs : 0.0;
        return est;
    }

    SubspaceSplit eigen_split(const StcmEstimate &estimate, int p)
    {
        const int L = estimate.length();
        if (p < 1 || p > L - 1)
            throw std::invalid_argument("eigen_split: order must satisfy 1 <= P <= L-1");
        const EigDescending eig = hermitian_eig_descending(estimate.s);

        SubspaceSplit split;
        split.eigenvalues = eig.values;
        split.signal_basis = eig.vectors.leftCols(p);
        split.noise_basis = eig.vectors.rightCols(L - p);
        split.order = p;
        return split;
    }

    int mdl_order(const Eigen::VectorXd &eigenvalues, std::size_t n_vectors)
    {
        const auto L = static_cast<int>(eigenvalues.size());
        if (L < 1 || n_vectors < 1)
            throw std::invalid_argument("mdl_order: need eigenvalues and n_vectors >= 1");
        const double floor_value = 1e-15 * std::max(eigenvalues[0], 0.0) +
                                   std::numeric_limits<double>::min();
        const double n = static_cast<double>(n_vectors);

        double best = std::numeric_limits<double>::infinity();
        int best_k = 0;
        for (int k = 0; k < L; ++k)
        {
            double log_sum = 0.0;
            double sum = 0.0;
            for (int i = k; i < L; ++i)
            {
                const double lam = std::max(eigenvalues[i], floor_value);
                log_sum += std::log(lam);
                sum += lam;
            }
            const int tail = L - k;
            const double log_geo = log_sum / tail;
            const double log_arith = std::log(sum / tail);
            const double value = -tail * n * (log_geo - log_arith) +
                                 0.5 * k * (2.0 * L - k) * std::log(n);
            if (value < best)
            {
                best = value;
                best_k = k;
            }
        }
        return best_k;
    }

} // namespace wimo
