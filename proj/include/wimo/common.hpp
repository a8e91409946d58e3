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

#ifndef WIMO_COMMON_HPP
#define WIMO_COMMON_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <numbers>

namespace wimo
{
    using cxd = std::complex<double>;

    constexpr double pi = std::numbers::pi;

    inline double deg2rad(double deg) { return deg * pi / 180.0; }
    inline double rad2deg(double rad) { return rad * 180.0 / pi; }

    // sin(pi*x)/(pi*x), with a series branch near zero
    inline double sinc(double x)
    {
        if (std::abs(x) < 1e-8)
        {
            double p = pi * x;
            return 1.0 - p * p / 6.0;
        }
        return std::sin(pi * x) / (pi * x);
    }

    // Hermitian eigendecomposition, eigenvalues sorted descending
    struct EigDescending
    {
        Eigen::VectorXd values;
        Eigen::MatrixXcd vectors; // columns match values
    };
    EigDescending hermitian_eig_descending(const Eigen::MatrixXcd &a);

    // Largest principal angle (radians) between the column spans of two
    // matrices with orthonormal columns of equal count.
    double max_principal_angle(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b);

    // Rotate each column so its largest-magnitude entry is real positive
    void canonicalize_phase(Eigen::MatrixXcd &vectors);

    // Runs fn(i) for i in [0, n). thread_count <= 0 selects
    // hardware_concurrency. Results must be written to disjoint slots so the
    // outcome is independent of scheduling.
    void parallel_for(std::size_t n, int thread_count, const std::function<void(std::size_t)> &fn);

} // namespace wimo

#endif
