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

#ifndef WIMO_GEOMETRY_HPP
#define WIMO_GEOMETRY_HPP

#include "wimo/common.hpp"

#include <vector>

namespace wimo
{
    // Sensor positions in Cartesian coordinates [m] and propagation speed [m/s].
    // Immutable after construction; all operations on it are pure.
    struct ArrayGeometry
    {
        std::vector<Eigen::Vector3d> positions;
        double c = 1500.0;

        int n_sensors() const { return static_cast<int>(positions.size()); }
        void validate() const; // throws std::invalid_argument
    };

    // Uniform linear array along the z axis, element k at z = k * spacing.
    ArrayGeometry make_ula(int n_sensors, double spacing, double c);

    // Propagation delays tau_k = -u(theta,phi)^T p_k / c, with
    // u = [cos(theta)cos(phi), cos(theta)sin(phi), sin(theta)]^T.
    // Angles in radians. For a z-axis linear array: tau_k = -z_k sin(theta)/c.
    Eigen::VectorXd sensor_delays(const ArrayGeometry &geometry, double theta, double phi = 0.0);

    // Spatial-temporal model for one look direction: m delayed samples per
    // sensor at interval dt, stacked sensor-major with the oldest sample
    // first inside each sensor block. Entry k carries the total time offset
    //   h_k = -tau_{floor(k/m)} + (k mod m) * dt.
    struct StackedModel
    {
        ArrayGeometry geometry;
        int m = 1;
        double dt = 0.0;
        double theta = 0.0; // radians
        double phi = 0.0;
        Eigen::VectorXd h; // length L = m * n_sensors, seconds

        int length() const { return static_cast<int>(h.size()); }
    };

    StackedModel build_stacked_model(const ArrayGeometry &geometry, double theta, double phi,
                                     int m, double dt);

    // Model vector for a single tone: g_k = exp(j 2 pi h_k f). Unit modulus
    // entries, g^H g = L.
    Eigen::VectorXcd g_vector(const StackedModel &model, double f);

    // Narrowband steering vector a_k = exp(-j 2 pi fc tau_k); identical to
    // g_vector of the m = 1 model.
    Eigen::VectorXcd steering_vector(const ArrayGeometry &geometry, double theta, double phi,
                                     double fc);

} // namespace wimo

#endif
