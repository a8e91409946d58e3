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

#include "wimo/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace wimo
{

    void ArrayGeometry::validate() const
    {
        if (positions.empty())
            throw std::invalid_argument("ArrayGeometry: at least one sensor required");
        if (!(c > 0.0) || !std::isfinite(c))
            throw std::invalid_argument("ArrayGeometry: propagation speed must be positive");
        for (const auto &p : positions)
            if (!p.allFinite())
                throw std::invalid_argument("ArrayGeometry: sensor positions must be finite");
    }

    ArrayGeometry make_ula(int n_sensors, double spacing, double c)
    {
        if (n_sensors < 1)
            throw std::invalid_argument("make_ula: n_sensors must be >= 1");
        ArrayGeometry g;
        g.c = c;
        g.positions.reserve(static_cast<std::size_t>(n_sensors));
        for (int k = 0; k < n_sensors; ++k)
            g.positions.emplace_back(0.0, 0.0, k * spacing);
        g.validate();
        return g;
    }

    Eigen::VectorXd sensor_delays(const ArrayGeometry &geometry, double theta, double phi)
    {
        geometry.validate();
        const Eigen::Vector3d u(std::cos(theta) * std::cos(phi),
                                std::cos(theta) * std::sin(phi),
                                std::sin(theta));
        Eigen::VectorXd tau(geometry.n_sensors());
        for (int k = 0; k < geometry.n_sensors(); ++k)
            tau[k] = -u.dot(geometry.positions[static_cast<std::size_t>(k)]) / geometry.c;
        return tau;
    }

    StackedModel build_stacked_model(const ArrayGeometry &geometry, double theta, double phi,
                                     int m, double dt)
    {
        if (m < 1)
            throw std::invalid_argument("build_stacked_model: m must be >= 1");
        if (!(dt > 0.0))
            throw std::invalid_argument("build_stacked_model: dt must be positive");
        const Eigen::VectorXd tau = sensor_delays(geometry, theta, phi);

        StackedModel model;
        model.geometry = geometry;
        model.m = m;
        model.dt = dt;
        model.theta = theta;
        model.phi = phi;
        const int L = m * geometry.n_sensors();
        model.h.resize(L);
        for (int k = 0; k < L; ++k)
            model.h[k] = -tau[k / m] + (k % m) * dt;
        return model;
    }

    Eigen::VectorXcd g_vector(const StackedModel &model, double f)
    {
        const int L = model.length();
        Eigen::VectorXcd g(L);
        for (int k = 0; k < L; ++k)
            g[k] = std::polar(1.0, 2.0 * pi * model.h[k] * f);
        return g;
    }

    Eigen::VectorXcd steering_vector(const ArrayGeometry &geometry, double theta, double phi,
                                     double fc)
    {
        const Eigen::VectorXd tau = sensor_delays(geometry, theta, phi);
        Eigen::VectorXcd a(tau.size());
        for (Eigen::Index k = 0; k < tau.size(); ++k)
            a[k] = std::polar(1.0, -2.0 * pi * fc * tau[k]);
        return a;
    }

} // namespace wimo
