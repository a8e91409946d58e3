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

#include "wimo/estimators.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wimo
{

    SpatialSpectrum spectrum_1wimo(const Eigen::MatrixXcd &noise_basis, const ModalTable &table)
    {
        const int L = table.length();
        if (noise_basis.rows() != L)
            throw std::invalid_argument("spectrum_1wimo: noise basis does not match modal table");
        const auto n = table.grid_deg.size();

        SpatialSpectrum spectrum;
        spectrum.grid_deg = table.grid_deg;
        spectrum.values.resize(n);
        spectrum.method = "1-wimo";
        spectrum.m = table.m;
        spectrum.order = L - static_cast<int>(noise_basis.cols());
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const Eigen::VectorXcd gsv = table.u[static_cast<std::size_t>(i)].col(0);
            const double den = (noise_basis.adjoint() * gsv).squaredNorm();
            spectrum.values[i] = 1.0 / std::max(den, spectrum_floor);
        }
        spectrum.flops = static_cast<double>(n) * static_cast<double>(noise_basis.cols()) *
                         (L + 1.0);
        return spectrum;
    }

    SpatialSpectrum spectrum_pwimo(const Eigen::MatrixXcd &noise_basis, const ModalTable &table)
    {
        const int L = table.length();
        if (noise_basis.rows() != L)
            throw std::invalid_argument("spectrum_pwimo: noise basis does not match modal table");
        const auto n = table.grid_deg.size();

        SpatialSpectrum spectrum;
        spectrum.grid_deg = table.grid_deg;
        spectrum.values.resize(n);
        spectrum.method = "p-wimo";
        spectrum.m = table.m;
        spectrum.order = L - static_cast<int>(noise_basis.cols());
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const Eigen::MatrixXcd s = table.sbreve(static_cast<std::size_t>(i));
            const Eigen::MatrixXcd sun = s * noise_basis;
            const double den = noise_basis.conjugate().cwiseProduct(sun).sum().real();
            spectrum.values[i] = 1.0 / std::max(den, spectrum_floor);
        }
        spectrum.flops = static_cast<double>(n) * static_cast<double>(noise_basis.cols()) * L *
                         (L + 1.0);
        return spectrum;
    }

    cxd ss_transform(const Eigen::VectorXcd &y, const StackedModel &model, double f)
    {
        if (y.size() != model.length())
            throw std::invalid_argument("ss_transform: vector does not match model length");
        cxd acc(0.0, 0.0);
        for (Eigen::Index k = 0; k < y.size(); ++k)
            acc += y[k] * std::polar(1.0, -2.0 * pi * model.h[k] * f);
        return acc;
    }

    double sf_cbf(const StcmEstimate &estimate, const ArrayGeometry &geometry, double f,
                  double theta, double phi)
    {
        const StackedModel model = build_stacked_model(geometry, theta, phi, estimate.m,
                                                       estimate.dt);
        const Eigen::VectorXcd g = g_vector(model, f);
        return (g.adjoint() * estimate.s * g).value().real();
    }

    double sf_mvdr(const StcmEstimate &estimate, const ArrayGeometry &geometry, double f,
                   double theta, double phi, double delta)
    {
        const int L = estimate.length();
        const StackedModel model = build_stacked_model(geometry, theta, phi, estimate.m,
                                                       estimate.dt);
        const Eigen::VectorXcd g = g_vector(model, f);
        Eigen::MatrixXcd reg = estimate.s;
        reg.diagonal().array() += delta * estimate.s.trace().real() / L;
        const Eigen::LDLT<Eigen::MatrixXcd> ldlt(reg);
        if (ldlt.info() != Eigen::Success)
            throw std::runtime_error("sf_mvdr: covariance not invertible even with loading");
        const double den = (g.adjoint() * ldlt.solve(g)).value().real();
        return 1.0 / std::max(den, spectrum_floor);
    }

    double sf_music(const Eigen::MatrixXcd &noise_basis, const ArrayGeometry &geometry, int m,
                    double dt, double f, double theta, double phi)
    {
        const StackedModel model = build_stacked_model(geometry, theta, phi, m, dt);
        if (noise_basis.rows() != model.length())
            throw std::invalid_argument("sf_music: noise basis does not match model length");
        const Eigen::VectorXcd g = g_vector(model, f);
        const double den = (noise_basis.adjoint() * g).squaredNorm();
        return 1.0 / std::max(den, spectrum_floor);
    }

    namespace
    {
        // walk away from peak i until terrain rises above it; returns the
        // lowest level seen (saddle candidate on that side)
        double side_minimum(const Eigen::VectorXd &v, Eigen::Index i, int direction)
        {
            double low = v[i];
            for (Eigen::Index j = i + direction; j >= 0 && j < v.size(); j += direction)
            {
                if (v[j] > v[i])
                    return low;
                low = std::min(low, v[j]);
            }
            return low;
        }
    } // namespace

    PeakSet find_peaks(const SpatialSpectrum &spectrum, double min_prominence_db, int max_count)
    {
        const Eigen::Index n = spectrum.values.size();
        PeakSet peaks;
        if (n < 3)
            return peaks;

        Eigen::VectorXd db(n);
        for (Eigen::Index i = 0; i < n; ++i)
            db[i] = 10.0 * std::log10(std::max(spectrum.values[i], 1e-300));

        for (Eigen::Index i = 1; i + 1 < n; ++i)
        {
            if (!(db[i] > db[i - 1] && db[i] >= db[i + 1]))
                continue;
            const double prominence =
                db[i] - std::max(side_minimum(db, i, -1), side_minimum(db, i, +1));
            if (prominence < min_prominence_db)
                continue;

            Peak peak;
            peak.prominence_db = prominence;
            peak.height_db = db[i];
            peak.theta_deg = spectrum.grid_deg[i];

            // location from the reciprocal (orthogonality measure), which is
            // smooth and nearly quadratic around its minimum
            const double r0 = 1.0 / spectrum.values[i - 1];
            const double r1 = 1.0 / spectrum.values[i];
            const double r2 = 1.0 / spectrum.values[i + 1];
            const double curvature = r0 - 2.0 * r1 + r2;
            if (curvature > 0.0)
            {
                const double dx = std::clamp(0.5 * (r0 - r2) / curvature, -0.5, 0.5);
                const double step = 0.5 * (spectrum.grid_deg[i + 1] - spectrum.grid_deg[i - 1]);
                peak.theta_deg += dx * step;
            }
            const double db_curv = db[i - 1] - 2.0 * db[i] + db[i + 1];
            if (db_curv < 0.0)
            {
                const double dxdb = std::clamp(0.5 * (db[i - 1] - db[i + 1]) / db_curv, -0.5, 0.5);
                peak.height_db = db[i] - 0.25 * (db[i - 1] - db[i + 1]) * dxdb;
            }
            peaks.push_back(peak);
        }

        std::stable_sort(peaks.begin(), peaks.end(),
                         [](const Peak &a, const Peak &b) { return a.height_db > b.height_db; });
        if (max_count >= 0 && static_cast<int>(peaks.size()) > max_count)
            peaks.resize(static_cast<std::size_t>(max_count));
        return peaks;
    }

    int select_order(bool pure_wimo, int p_mdl, int eps_max_1, int L)
    {
        const double lo_frac = pure_wimo ? 0.5 : 0.2;
        const double hi_frac = pure_wimo ? 0.7 : 0.6;
        const int lo = std::max(1, static_cast<int>(std::ceil(lo_frac * L)));
        const int hi = std::min(L - 1, static_cast<int>(std::floor(hi_frac * L)));
        int p = std::max(p_mdl, eps_max_1);
        p = std::clamp(p, lo, std::max(lo, hi));
        return std::clamp(p, 1, L - 1);
    }

} // namespace wimo
