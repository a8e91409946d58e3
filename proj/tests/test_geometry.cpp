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

#include <catch2/catch_amalgamated.hpp>

using namespace wimo;

TEST_CASE("delays vanish at broadside")
{
    const ArrayGeometry ula = make_ula(8, 0.1875, 1500.0);
    const Eigen::VectorXd tau = sensor_delays(ula, 0.0);
    REQUIRE(tau.size() == 8);
    CHECK(tau.cwiseAbs().maxCoeff() < 1e-18);
}

TEST_CASE("endfire delay of a two-element line")
{
    const ArrayGeometry geom = make_ula(2, 0.15, 1500.0);
    const Eigen::VectorXd tau = sensor_delays(geom, deg2rad(90.0));
    CHECK(tau[0] == Catch::Approx(0.0).margin(1e-18));
    CHECK(tau[1] == Catch::Approx(-1e-4).epsilon(1e-12));
}

TEST_CASE("30-degree delay")
{
    const ArrayGeometry geom = make_ula(2, 0.15, 1500.0);
    const Eigen::VectorXd tau = sensor_delays(geom, deg2rad(30.0));
    CHECK(tau[1] == Catch::Approx(-0.15 * 0.5 / 1500.0).epsilon(1e-12));
}

TEST_CASE("stacked offsets interleave delay and lag")
{
    // tau = [0, -1e-4] via endfire two-element line
    const ArrayGeometry geom = make_ula(2, 0.15, 1500.0);
    const StackedModel model = build_stacked_model(geom, deg2rad(90.0), 0.0, 2, 1e-4);
    REQUIRE(model.length() == 4);
    CHECK(model.h[0] == Catch::Approx(0.0).margin(1e-18));
    CHECK(model.h[1] == Catch::Approx(1e-4).epsilon(1e-12));
    CHECK(model.h[2] == Catch::Approx(1e-4).epsilon(1e-12));
    CHECK(model.h[3] == Catch::Approx(2e-4).epsilon(1e-12));
}

TEST_CASE("m = 1 reduces to the pure spatial model")
{
    const ArrayGeometry geom = make_ula(4, 0.2, 1500.0);
    const double theta = deg2rad(37.0);
    const StackedModel model = build_stacked_model(geom, theta, 0.0, 1, 1e-4);
    const Eigen::VectorXd tau = sensor_delays(geom, theta);
    CHECK((model.h + tau).cwiseAbs().maxCoeff() < 1e-18);
}

TEST_CASE("single sensor stacks to a DFT time base")
{
    const ArrayGeometry geom = make_ula(1, 1.0, 1500.0);
    const StackedModel model = build_stacked_model(geom, deg2rad(12.0), 0.0, 3, 1e-4);
    REQUIRE(model.length() == 3);
    CHECK(model.h[0] == Catch::Approx(0.0).margin(1e-18));
    CHECK(model.h[1] == Catch::Approx(1e-4).epsilon(1e-12));
    CHECK(model.h[2] == Catch::Approx(2e-4).epsilon(1e-12));
}

TEST_CASE("model construction rejects bad arguments")
{
    const ArrayGeometry geom = make_ula(2, 0.15, 1500.0);
    CHECK_THROWS_AS(build_stacked_model(geom, 0.0, 0.0, 0, 1e-4), std::invalid_argument);
    CHECK_THROWS_AS(build_stacked_model(geom, 0.0, 0.0, 2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_ula(0, 0.15, 1500.0), std::invalid_argument);
    ArrayGeometry bad;
    bad.c = -1.0;
    bad.positions.emplace_back(0, 0, 0);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("model vector at zero frequency is all ones")
{
    const ArrayGeometry geom = make_ula(3, 0.2, 1500.0);
    const StackedModel model = build_stacked_model(geom, deg2rad(41.0), 0.0, 2, 1e-4);
    const Eigen::VectorXcd g = g_vector(model, 0.0);
    CHECK((g - Eigen::VectorXcd::Ones(6)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("quarter-period offset lands on the imaginary axis")
{
    // h = [0, 1e-4] from one sensor with two lags; f = 2500 -> phase pi/2
    const ArrayGeometry geom = make_ula(1, 1.0, 1500.0);
    const StackedModel model = build_stacked_model(geom, 0.0, 0.0, 2, 1e-4);
    const Eigen::VectorXcd g = g_vector(model, 2500.0);
    CHECK(std::abs(g[0] - cxd(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(g[1] - cxd(0.0, 1.0)) < 1e-15);
}

TEST_CASE("model vectors have unit modulus and norm sqrt(L)")
{
    const ArrayGeometry geom = make_ula(5, 0.17, 1480.0);
    for (double theta_deg : {-72.0, -13.5, 0.0, 8.25, 64.0})
        for (double f : {100.0, 1234.5, 4999.0})
        {
            const StackedModel model = build_stacked_model(geom, deg2rad(theta_deg), 0.0, 4, 1e-4);
            const Eigen::VectorXcd g = g_vector(model, f);
            for (int k = 0; k < model.length(); ++k)
                CHECK(std::abs(std::abs(g[k]) - 1.0) < 1e-14);
            CHECK(std::abs(g.squaredNorm() - model.length()) < 1e-12);
        }
}

TEST_CASE("steering vector matches the m = 1 model vector")
{
    const ArrayGeometry geom = make_ula(6, 0.16, 1500.0);
    for (double theta_deg : {-50.0, 0.0, 20.0, 75.0})
        for (double fc : {900.0, 3100.0})
        {
            const Eigen::VectorXcd a = steering_vector(geom, deg2rad(theta_deg), 0.0, fc);
            const StackedModel model =
                build_stacked_model(geom, deg2rad(theta_deg), 0.0, 1, 1e-4);
            const Eigen::VectorXcd g = g_vector(model, fc);
            CHECK((a - g).cwiseAbs().maxCoeff() < 1e-13);
        }
}

TEST_CASE("steering vector at broadside is all ones")
{
    const Eigen::VectorXcd a = steering_vector(make_ula(8, 0.25, 1500.0), 0.0, 0.0, 2000.0);
    CHECK((a - Eigen::VectorXcd::Ones(8)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("half-wavelength steering phase progression")
{
    // d = lambda/2 at fc: a_k = exp(+j pi k sin(theta)) from tau_k = -z_k sin(theta)/c
    const double c = 1500.0, fc = 2000.0;
    const ArrayGeometry geom = make_ula(8, c / (2.0 * fc), c);
    const double theta = deg2rad(40.0);
    const Eigen::VectorXcd a = steering_vector(geom, theta, 0.0, fc);
    for (int k = 0; k < 8; ++k)
        CHECK(std::abs(a[k] - std::polar(1.0, pi * k * std::sin(theta))) < 1e-13);
}
