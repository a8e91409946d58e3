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

#include "wimo/approx.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace wimo
{
    namespace
    {
        Eigen::MatrixXcd narrowband_factor(const StackedModel &model, double fc)
        {
            const Eigen::VectorXcd g = g_vector(model, fc);
            return g * g.adjoint();
        }

        // Trapezoid accumulation of integral S(f) v(f) v(f)^H df over the
        // support, evaluated as one phasor-matrix product.
        Eigen::MatrixXcd psd_quadrature(const PsdSpec &psd, const Eigen::VectorXd &h, int nodes)
        {
            const double lo = psd.support_lo();
            const double hi = psd.support_hi();
            const double step = (hi - lo) / (nodes - 1);
            const auto L = h.size();
            Eigen::MatrixXcd phasors(L, nodes);
            for (int q = 0; q < nodes; ++q)
            {
                const double f = lo + q * step;
                double w = psd.density(f) * step;
                if (q == 0 || q == nodes - 1)
                    w *= 0.5;
                const double amp = std::sqrt(std::max(w, 0.0));
                for (Eigen::Index k = 0; k < L; ++k)
                    phasors(k, q) = std::polar(amp, 2.0 * pi * h[k] * f);
            }
            return phasors * phasors.adjoint();
        }
    } // namespace

    ApproxStcm approx_stcm_uniform(const ArrayGeometry &geometry, double theta, double phi,
                                   double fc, double B, int m, double dt)
    {
        if (B < 0.0)
            throw std::invalid_argument("approx_stcm_uniform: bandwidth must be nonnegative");
        ApproxStcm out;
        out.model = build_stacked_model(geometry, theta, phi, m, dt);
        out.fc = fc;
        out.bandwidth = B;

        const int L = out.model.length();
        const Eigen::VectorXd &h = out.model.h;
        out.narrowband = narrowband_factor(out.model, fc);
        out.wideband.resize(L, L);
        out.s.resize(L, L);
        for (int k = 0; k < L; ++k)
            for (int l = 0; l < L; ++l)
            {
                const double w = sinc(B * (h[k] - h[l]));
                out.wideband(k, l) = w;
                out.s(k, l) = out.narrowband(k, l) * w;
            }
        return out;
    }

    ApproxStcm approx_stcm_psd(const ArrayGeometry &geometry, double theta, double phi,
                               const PsdSpec &psd, int m, double dt,
                               const QuadratureOptions &options)
    {
        psd.validate();
        ApproxStcm out;
        out.model = build_stacked_model(geometry, theta, phi, m, dt);
        out.fc = psd.center();
        out.bandwidth = psd.support_hi() - psd.support_lo();
        out.psd = psd;

        const int L = out.model.length();
        const Eigen::VectorXd &h = out.model.h;

        if (psd.is_delta())
        {
            // narrowband limit: rank-1 model at the tone frequency
            out.narrowband = narrowband_factor(out.model, out.fc);
            out.s = out.narrowband;
            out.wideband = Eigen::MatrixXcd::Ones(L, L);
            return out;
        }

        // trapezoid with Richardson extrapolation across grid halvings
        // (node count n -> 2n-1 keeps previous abscissae)
        int nodes = options.initial_nodes;
        Eigen::MatrixXcd coarse = psd_quadrature(psd, h, nodes);
        if (!(coarse(0, 0).real() > 0.0))
            throw std::invalid_argument("approx_stcm_psd: PSD integrates to zero over its support");
        Eigen::MatrixXcd current;
        bool have_previous = false;
        while (true)
        {
            const int finer_nodes = 2 * nodes - 1;
            const Eigen::MatrixXcd fine = psd_quadrature(psd, h, finer_nodes);
            Eigen::MatrixXcd extrapolated = (4.0 * fine - coarse) / 3.0;
            extrapolated /= extrapolated(0, 0).real();
            if (have_previous &&
                (extrapolated - current).cwiseAbs().maxCoeff() < options.tol)
            {
                current.swap(extrapolated);
                break;
            }
            current.swap(extrapolated);
            have_previous = true;
            coarse = fine;
            nodes = finer_nodes;
            if (2 * nodes - 1 > options.max_nodes)
                break;
        }

        out.s = current;
        out.s = 0.5 * (out.s + out.s.adjoint().eval());
        out.narrowband = narrowband_factor(out.model, out.fc);
        // carrier-stripped kernel: s_kl * conj(g_k g_l^*)
        out.wideband = out.s.cwiseProduct(out.narrowband.conjugate());
        return out;
    }

    ModalBasis modal_basis(const ApproxStcm &approx)
    {
        EigDescending eig = hermitian_eig_descending(approx.s);
        for (Eigen::Index i = 0; i < eig.values.size(); ++i)
            eig.values[i] = std::max(eig.values[i], 0.0);
        canonicalize_phase(eig.vectors);
        return ModalBasis{eig.values, eig.vectors};
    }

    Theorem1Report theorem1_check(const ApproxStcm &approx, const ModalBasis &basis,
                                  double eig_tol, double angle_tol, double cluster_gap)
    {
        const int L = approx.length();
        const EigDescending wide = hermitian_eig_descending(approx.wideband);
        const Eigen::VectorXcd g = g_vector(approx.model, approx.fc);

        Theorem1Report report;
        const double scale = std::max(basis.sigma[0], 1e-300);
        for (int i = 0; i < L; ++i)
            report.max_eigenvalue_mismatch =
                std::max(report.max_eigenvalue_mismatch,
                         std::abs(basis.sigma[i] - wide.values[i]) / scale);
        report.eigenvalues_match = report.max_eigenvalue_mismatch <= eig_tol;

        // carrier-modulated wideband eigenvectors
        Eigen::MatrixXcd modulated = wide.vectors;
        for (int j = 0; j < L; ++j)
            modulated.col(j) = g.cwiseProduct(wide.vectors.col(j));

        int first = 0;
        while (first < L)
        {
            int last = first;
            while (last + 1 < L &&
                   (basis.sigma[last] - basis.sigma[last + 1]) < cluster_gap * scale)
                ++last;
            const int count = last - first + 1;
            const double angle = max_principal_angle(basis.u.middleCols(first, count),
                                                     modulated.middleCols(first, count));
            report.max_principal_angle = std::max(report.max_principal_angle, angle);
            ++report.cluster_count;
            first = last + 1;
        }
        report.subspaces_match = report.max_principal_angle <= angle_tol;
        return report;
    }

    double ss_band_power(const Eigen::VectorXcd &x, const Eigen::VectorXd &h, double B, int nodes)
    {
        if (!(B > 0.0))
            throw std::invalid_argument("ss_band_power: bandwidth must be positive");
        const double step = B / (nodes - 1);
        double acc = 0.0;
        for (int q = 0; q < nodes; ++q)
        {
            const double u = -B / 2.0 + q * step;
            cxd t(0.0, 0.0);
            for (Eigen::Index k = 0; k < x.size(); ++k)
                t += x[k] * std::polar(1.0, -2.0 * pi * h[k] * u);
            double w = (q == 0 || q == nodes - 1) ? 0.5 : 1.0;
            acc += w * std::norm(t);
        }
        return acc * step / B;
    }

    namespace
    {
        int rank_of(const Eigen::MatrixXcd &s, double rank_tol)
        {
            const Eigen::VectorXd sigma = hermitian_eig_descending(s).values;
            const double threshold = rank_tol * std::max(sigma[0], 0.0);
            int rank = 0;
            for (Eigen::Index i = 0; i < sigma.size(); ++i)
                if (sigma[i] > threshold)
                    ++rank;
            return rank;
        }
    } // namespace

    int effective_dim(const ArrayGeometry &geometry, const std::vector<double> &thetas,
                      double fc, double B, int m, double dt, double rank_tol)
    {
        if (thetas.empty())
            throw std::invalid_argument("effective_dim: empty direction list");
        Eigen::MatrixXcd sum;
        for (double theta : thetas)
        {
            const ApproxStcm a = approx_stcm_uniform(geometry, theta, 0.0, fc, B, m, dt);
            if (sum.size() == 0)
                sum = a.s;
            else
                sum += a.s;
        }
        return rank_of(sum, rank_tol);
    }

    int effective_dim_max(const ArrayGeometry &geometry, int n_sources, double fc, double B,
                          int m, double dt, double rank_tol)
    {
        if (n_sources < 1)
            throw std::invalid_argument("effective_dim_max: n_sources must be >= 1");
        const ApproxStcm endfire =
            approx_stcm_uniform(geometry, deg2rad(90.0), 0.0, fc, B, m, dt);
        return n_sources * rank_of(endfire.s, rank_tol);
    }

    int bass_ale_bound(int n_sources, int m, int n_sensors)
    {
        if (n_sources < 1 || m < 1 || n_sensors < 1)
            throw std::invalid_argument("bass_ale_bound: arguments must be >= 1");
        return n_sources * (m + n_sensors);
    }

    AsymptoticSinf asymptotic_sinf(int m, double nu)
    {
        if (m < 1)
            throw std::invalid_argument("asymptotic_sinf: m must be >= 1");
        if (!(nu > 0.0))
            throw std::invalid_argument("asymptotic_sinf: nu must be positive");
        AsymptoticSinf out;
        out.matrix.resize(m, m);
        for (int k = 0; k < m; ++k)
            for (int l = 0; l < m; ++l)
                out.matrix(k, l) = sinc(std::abs(k - l) / nu);
        out.sigma = hermitian_eig_descending(out.matrix.cast<cxd>()).values;
        return out;
    }

    Eigen::MatrixXcd ModalTable::sbreve(std::size_t i) const
    {
        return u[i] * sigma[i].asDiagonal() * u[i].adjoint();
    }

    std::string ModalTable::key() const
    {
        char buf[128];
        std::string out = "wimo-modal-v1|c=";
        std::snprintf(buf, sizeof(buf), "%.17g", geometry.c);
        out += buf;
        for (const auto &p : geometry.positions)
        {
            std::snprintf(buf, sizeof(buf), "|%.17g,%.17g,%.17g", p.x(), p.y(), p.z());
            out += buf;
        }
        std::snprintf(buf, sizeof(buf), "|m=%d|dt=%.17g", m, dt);
        out += buf;
        if (psd)
            out += "|psd=" + psd->digest();
        else
        {
            std::snprintf(buf, sizeof(buf), "|fc=%.17g|B=%.17g", fc, bandwidth);
            out += buf;
        }
        out += "|grid=";
        for (Eigen::Index i = 0; i < grid_deg.size(); ++i)
        {
            std::snprintf(buf, sizeof(buf), i ? ",%.17g" : "%.17g", grid_deg[i]);
            out += buf;
        }
        return out;
    }

    namespace
    {
        template <typename BuildPoint>
        ModalTable build_table(const ArrayGeometry &geometry, const Eigen::VectorXd &grid_deg,
                               int m, double dt, int threads, BuildPoint &&build_point)
        {
            if (grid_deg.size() == 0)
                throw std::invalid_argument("build_modal_table: empty grid");
            ModalTable table;
            table.geometry = geometry;
            table.grid_deg = grid_deg;
            table.m = m;
            table.dt = dt;
            const auto n = static_cast<std::size_t>(grid_deg.size());
            table.sigma.resize(n);
            table.u.resize(n);
            parallel_for(n, threads, [&](std::size_t i) {
                const ModalBasis basis = build_point(deg2rad(grid_deg[static_cast<Eigen::Index>(i)]));
                table.sigma[i] = basis.sigma;
                table.u[i] = basis.u;
            });
            return table;
        }
    } // namespace

    ModalTable build_modal_table(const ArrayGeometry &geometry, const Eigen::VectorXd &grid_deg,
                                 int m, double dt, double fc, double B, int threads)
    {
        ModalTable table = build_table(geometry, grid_deg, m, dt, threads, [&](double theta) {
            return modal_basis(approx_stcm_uniform(geometry, theta, 0.0, fc, B, m, dt));
        });
        table.fc = fc;
        table.bandwidth = B;
        return table;
    }

    std::string modal_table_key(const ArrayGeometry &geometry, const Eigen::VectorXd &grid_deg,
                                int m, double dt, double fc, double B, const PsdSpec *psd)
    {
        ModalTable skeleton;
        skeleton.geometry = geometry;
        skeleton.grid_deg = grid_deg;
        skeleton.m = m;
        skeleton.dt = dt;
        skeleton.fc = fc;
        skeleton.bandwidth = B;
        if (psd)
            skeleton.psd = *psd;
        return skeleton.key();
    }

    ModalTable build_modal_table_psd(const ArrayGeometry &geometry, const Eigen::VectorXd &grid_deg,
                                     int m, double dt, const PsdSpec &psd, int threads)
    {
        ModalTable table = build_table(geometry, grid_deg, m, dt, threads, [&](double theta) {
            return modal_basis(approx_stcm_psd(geometry, theta, 0.0, psd, m, dt));
        });
        table.fc = psd.center();
        table.bandwidth = psd.support_hi() - psd.support_lo();
        table.psd = psd;
        return table;
    }

} // namespace wimo
