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

#include "wimo/simulator.hpp"

#include "wimo/fft.hpp"
#include "wimo/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace wimo
{

    Eigen::VectorXcd synthesize_source(const PsdSpec &psd, double fs, std::size_t n,
                                       std::uint64_t seed)
    {
        psd.validate();
        if (n < 2)
            throw std::invalid_argument("synthesize_source: need at least 2 samples");
        if (!(psd.support_lo() > 0.0) || !(psd.support_hi() < fs / 2.0))
            throw std::invalid_argument(
                "synthesize_source: PSD support must lie inside (0, fs/2)");

        Rng rng(seed);
        Eigen::VectorXcd spectrum = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
        const double df = fs / static_cast<double>(n);

        if (psd.is_delta())
        {
            // degenerate PSD: all power on the bin nearest the tone frequency
            auto q = static_cast<Eigen::Index>(std::llround(psd.table.front().first / df));
            q = std::max<Eigen::Index>(1, std::min<Eigen::Index>(q, static_cast<Eigen::Index>(n) / 2 - 1));
            spectrum[q] = rng.cnormal() * (std::sqrt(psd.power) * static_cast<double>(n));
        }
        else
        {
            const auto q_lo = static_cast<Eigen::Index>(std::ceil(psd.support_lo() / df));
            const auto q_hi = static_cast<Eigen::Index>(std::floor(psd.support_hi() / df));
            double shape_sum = 0.0;
            for (Eigen::Index q = q_lo; q <= q_hi; ++q)
                shape_sum += psd.density(static_cast<double>(q) * df);
            if (!(shape_sum > 0.0))
                throw std::invalid_argument("synthesize_source: no DFT bin inside the PSD support");
            // bin density normalized so the discrete total power equals psd.power
            const double scale = psd.power / (shape_sum * df);
            for (Eigen::Index q = q_lo; q <= q_hi; ++q)
            {
                const double dens = psd.density(static_cast<double>(q) * df) * scale;
                spectrum[q] = rng.cnormal() * std::sqrt(static_cast<double>(n) * fs * dens);
            }
        }
        fft_inverse_inplace(spectrum);
        return spectrum;
    }

    Eigen::VectorXcd correlate_pair(const Eigen::VectorXcd &x1, const Eigen::VectorXcd &x2,
                                    double rho)
    {
        if (x1.size() != x2.size())
            throw std::invalid_argument("correlate_pair: length mismatch");
        if (rho < 0.0 || rho > 1.0)
            throw std::invalid_argument("correlate_pair: rho must be in [0, 1]");
        return rho * x1 + std::sqrt(1.0 - rho * rho) * x2;
    }

    Eigen::VectorXcd delay_series(const Eigen::VectorXcd &x, double fs, double tau)
    {
        const auto n = static_cast<std::size_t>(x.size());
        Eigen::VectorXcd spectrum = fft_forward(x);
        for (std::size_t q = 0; q < n; ++q)
            spectrum[static_cast<Eigen::Index>(q)] *=
                std::polar(1.0, -2.0 * pi * dft_frequency(q, n, fs) * tau);
        fft_inverse_inplace(spectrum);
        return spectrum;
    }

    SnapshotMatrix propagate(const std::vector<std::pair<SourceSpec, Eigen::VectorXcd>> &sources,
                             const ArrayGeometry &geometry, double fs)
    {
        geometry.validate();
        if (sources.empty())
            throw std::invalid_argument("propagate: no sources");
        const auto n = static_cast<std::size_t>(sources.front().second.size());
        for (const auto &[spec, series] : sources)
        {
            (void)spec;
            if (static_cast<std::size_t>(series.size()) != n)
                throw std::invalid_argument("propagate: source series lengths differ");
        }

        SnapshotMatrix out;
        out.fs = fs;
        out.data = Eigen::MatrixXcd::Zero(geometry.n_sensors(), static_cast<Eigen::Index>(n));

        for (const auto &[spec, series] : sources)
        {
            const Eigen::VectorXcd spectrum = fft_forward(series);
            const Eigen::VectorXd tau = sensor_delays(geometry, deg2rad(spec.theta_deg), 0.0);
            for (int k = 0; k < geometry.n_sensors(); ++k)
            {
                Eigen::VectorXcd shifted(series.size());
                for (std::size_t q = 0; q < n; ++q)
                    shifted[static_cast<Eigen::Index>(q)] =
                        spectrum[static_cast<Eigen::Index>(q)] *
                        std::polar(1.0, -2.0 * pi * dft_frequency(q, n, fs) * tau[k]);
                fft_inverse_inplace(shifted);
                out.data.row(k) += shifted.transpose();
            }
        }
        return out;
    }

    SnapshotMatrix add_noise(const SnapshotMatrix &snapshots, double sigma_n2, std::uint64_t seed)
    {
        if (sigma_n2 < 0.0)
            throw std::invalid_argument("add_noise: sigma_n2 must be nonnegative");
        SnapshotMatrix out = snapshots;
        out.seed = seed;
        if (sigma_n2 == 0.0)
            return out;
        Rng rng(seed);
        const double amp = std::sqrt(sigma_n2);
        for (int k = 0; k < out.n_sensors(); ++k)
            for (long t = 0; t < out.n_snapshots(); ++t)
                out.data(k, t) += amp * rng.cnormal();
        return out;
    }

} // namespace wimo
