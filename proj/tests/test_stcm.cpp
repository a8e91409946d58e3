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

#include "wimo/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace wimo;

namespace
{
    SnapshotMatrix random_snapshots(int ns, long m, std::uint64_t seed)
    {
        SnapshotMatrix out;
        out.fs = 10e3;
        out.data.resize(ns, m);
        Rng rng(seed);
        for (int k = 0; k < ns; ++k)
            for (long t = 0; t < m; ++t)
                out.data(k, t) = rng.cnormal();
        return out;
    }
} // namespace

TEST_CASE("stacking with m = 1 returns the raw snapshots")
{
    const SnapshotMatrix snap = random_snapshots(3, 10, 1);
    const Eigen::MatrixXcd stacked = stack_observations(snap, 1);
    CHECK(stacked == snap.data);
}

TEST_CASE("a single sensor stacked with m = M yields the full series")
{
    const SnapshotMatrix snap = random_snapshots(1, 8, 2);
    const Eigen::MatrixXcd stacked = stack_observations(snap, 8);
    REQUIRE(stacked.rows() == 8);
    REQUIRE(stacked.cols() == 1);
    CHECK(stacked.col(0).transpose() == snap.data.row(0));
}

TEST_CASE("stacked vector count is M - m + 1")
{
    const SnapshotMatrix snap = random_snapshots(2, 3, 3);
    const Eigen::MatrixXcd stacked = stack_observations(snap, 2);
    CHECK(stacked.rows() == 4);
    CHECK(stacked.cols() == 2);
    // sensor-major, oldest-first: column t holds [y0(t-1), y0(t), y1(t-1), y1(t)]
    CHECK(stacked(0, 0) == snap.data(0, 0));
    CHECK(stacked(1, 0) == snap.data(0, 1));
    CHECK(stacked(2, 0) == snap.data(1, 0));
    CHECK(stacked(3, 0) == snap.data(1, 1));
    CHECK_THROWS_AS(stack_observations(snap, 4), std::invalid_argument);
}

TEST_CASE("zero input gives a zero covariance")
{
    SnapshotMatrix zeros;
    zeros.fs = 10e3;
    zeros.data = Eigen::MatrixXcd::Zero(3, 32);
    const StcmEstimate est = estimate_stcm(zeros, 2);
    CHECK(est.s.cwiseAbs().maxCoeff() == 0.0);
    CHECK(est.n_vectors == 31);
}

TEST_CASE("a noiseless tone produces a rank-1 covariance aligned with the model vector")
{
    const ArrayGeometry geom = make_ula(4, 0.2, 1500.0);
    const double fs = 10e3;
    const std::size_t n = 8192;
    const double f0 = fs * 2048.0 / static_cast<double>(n); // on-grid 2.5 kHz
    Eigen::VectorXcd tone(n);
    for (std::size_t t = 0; t < n; ++t)
        tone[static_cast<Eigen::Index>(t)] = std::polar(1.0, 2.0 * pi * f0 * t / fs);
    SourceSpec src;
    src.theta_deg = 28.0;
    const SnapshotMatrix snap = propagate({{src, tone}}, geom, fs);

    const int m = 3;
    const StcmEstimate est = estimate_stcm(snap, m);
    const EigDescending eig = hermitian_eig_descending(est.s);
    CHECK(eig.values[1] < 1e-8 * eig.values[0]);

    const StackedModel model = build_stacked_model(geom, deg2rad(28.0), 0.0, m, 1.0 / fs);
    const Eigen::VectorXcd g = g_vector(model, f0).normalized();
    const double overlap = std::abs((g.adjoint() * eig.vectors.col(0)).value());
    const double angle_deg = rad2deg(std::acos(std::min(overlap, 1.0)));
    CHECK(angle_deg < 1.0);
}

TEST_CASE("noise-only covariance has unit average power")
{
    SnapshotMatrix zeros;
    zeros.fs = 10e3;
    zeros.data = Eigen::MatrixXcd::Zero(4, 65536);
    const SnapshotMatrix noisy = add_noise(zeros, 1.0, 5);
    const StcmEstimate est = estimate_stcm(noisy, 4); // L = 16
    CHECK(est.length() == 16);
    const double mean_power = est.s.trace().real() / est.length();
    CHECK(mean_power > 0.97);
    CHECK(mean_power < 1.03);
}

TEST_CASE("covariance estimates are Hermitian and positive semidefinite")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
    {
        const SnapshotMatrix snap = random_snapshots(3, 64, seed);
        const StcmEstimate est = estimate_stcm(snap, 3);
        CHECK((est.s - est.s.adjoint()).cwiseAbs().maxCoeff() <
              1e-12 * est.s.cwiseAbs().maxCoeff());
        const Eigen::VectorXd lam = hermitian_eig_descending(est.s).values;
        CHECK(lam[lam.size() - 1] > -1e-10 * lam[0]);
    }
}

TEST_CASE("covariance entries sample the source correlation at the stacked lags")
{
    const ArrayGeometry geom = make_ula(4, 0.2, 1500.0);
    const double fs = 10e3;
    const long n = 8192;
    const Eigen::VectorXcd x =
        synthesize_source(PsdSpec::uniform(1.5e3, 4.5e3), fs, static_cast<std::size_t>(n), 17);
    SourceSpec src;
    src.theta_deg = 25.0;
    const SnapshotMatrix snap = propagate({{src, x}}, geom, fs);
    const int m = 4;
    const StcmEstimate est = estimate_stcm(snap, m);

    const StackedModel model = build_stacked_model(geom, deg2rad(25.0), 0.0, m, 1.0 / fs);
    // independent oracle: sample autocorrelation of the raw source,
    // r(tau) = mean of x(t) x*(t - tau)
    auto autocorr = [&](double tau) {
        const Eigen::VectorXcd shifted = delay_series(x, fs, tau);
        return (shifted.adjoint() * x).value() / static_cast<double>(n);
    };
    const double scale = std::abs(autocorr(0.0));
    for (int k = 0; k < est.length(); k += 3)
        for (int l = 0; l < est.length(); l += 3)
        {
            const cxd expected = autocorr(model.h[k] - model.h[l]);
            CHECK(std::abs(est.s(k, l) - expected) < 0.05 * scale);
        }
}

TEST_CASE("eigen split handles canonical cases")
{
    StcmEstimate ident;
    ident.s = Eigen::MatrixXcd::Identity(4, 4);
    ident.n_vectors = 100;
    const SubspaceSplit any = eigen_split(ident, 2);
    CHECK((any.eigenvalues - Eigen::VectorXd::Ones(4)).cwiseAbs().maxCoeff() < 1e-14);

    StcmEstimate diag;
    diag.s = Eigen::Vector4d(4.0, 1.0, 1.0, 1.0).asDiagonal().toDenseMatrix().cast<cxd>();
    const SubspaceSplit split = eigen_split(diag, 1);
    CHECK(std::abs(std::abs(split.signal_basis(0, 0)) - 1.0) < 1e-14);
    CHECK(split.signal_basis.col(0).tail(3).cwiseAbs().maxCoeff() < 1e-14);

    CHECK_THROWS_AS(eigen_split(diag, 0), std::invalid_argument);
    CHECK_THROWS_AS(eigen_split(diag, 4), std::invalid_argument);
}

TEST_CASE("eigen split is unitary and reconstructs the input")
{
    const SnapshotMatrix snap = random_snapshots(4, 256, 9);
    const StcmEstimate est = estimate_stcm(snap, 3);
    const int L = est.length();
    const SubspaceSplit split = eigen_split(est, 5);

    CHECK((split.signal_basis.adjoint() * split.noise_basis).cwiseAbs().maxCoeff() < 1e-9);
    Eigen::MatrixXcd full(L, L);
    full << split.signal_basis, split.noise_basis;
    CHECK((full.adjoint() * full - Eigen::MatrixXcd::Identity(L, L)).cwiseAbs().maxCoeff() <
          1e-9);

    const Eigen::MatrixXcd rebuilt =
        split.signal_basis * split.eigenvalues.head(5).asDiagonal() *
            split.signal_basis.adjoint() +
        split.noise_basis * split.eigenvalues.tail(L - 5).asDiagonal() *
            split.noise_basis.adjoint();
    CHECK((rebuilt - est.s).norm() / est.s.norm() < 1e-9);
}

TEST_CASE("flat spectra carry no detectable sources")
{
    const Eigen::VectorXd lam = Eigen::VectorXd::Constant(16, 2.5);
    CHECK(mdl_order(lam, 4096) == 0);
}

TEST_CASE("two dominant eigenvalues are detected")
{
    Eigen::VectorXd lam = Eigen::VectorXd::Ones(16);
    lam[0] = 100.0;
    lam[1] = 100.0;
    CHECK(mdl_order(lam, 4096) == 2);

    // independent oracle: direct evaluation of the description-length formula
    const double n = 4096.0;
    double best = 1e300;
    int best_k = -1;
    for (int k = 0; k < 16; ++k)
    {
        double geo = 0.0, arith = 0.0;
        for (int i = k; i < 16; ++i)
        {
            geo += std::log(lam[i]) / (16 - k);
            arith += lam[i] / (16 - k);
        }
        const double value = -(16 - k) * n * (geo - std::log(arith)) +
                             0.5 * k * (2 * 16 - k) * std::log(n);
        if (value < best)
        {
            best = value;
            best_k = k;
        }
    }
    CHECK(best_k == 2);
}

TEST_CASE("noiseless wideband order tracks the numerical rank")
{
    const ArrayGeometry geom = make_ula(8, 1.0 / 6.0, 1500.0);
    const double fs = 10e3;
    const long n = 8192;
    const Eigen::VectorXcd x1 =
        synthesize_source(PsdSpec::uniform(1.5e3, 4.5e3), fs, static_cast<std::size_t>(n), 31);
    const Eigen::VectorXcd x2 =
        synthesize_source(PsdSpec::uniform(1.5e3, 4.5e3), fs, static_cast<std::size_t>(n), 32);
    SourceSpec s1, s2;
    s1.theta_deg = 40.0;
    s2.theta_deg = 60.0;
    const SnapshotMatrix snap = propagate({{s1, x1}, {s2, x2}}, geom, fs);
    const StcmEstimate est = estimate_stcm(snap, 5);
    const Eigen::VectorXd lam = hermitian_eig_descending(est.s).values;

    const int p_mdl = mdl_order(lam, est.n_vectors);
    // the noiseless spectrum decays to machine noise; the order lands on the
    // count of eigenvalues above the clamping floor
    int rank = 0;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        if (lam[i] > 1e-15 * lam[0])
            ++rank;
    CHECK(std::abs(p_mdl - rank) <= 1);
}

TEST_CASE("mdl rejects empty input and clamps nonpositive tails")
{
    CHECK_THROWS_AS(mdl_order(Eigen::VectorXd(), 100), std::invalid_argument);
    Eigen::VectorXd lam(4);
    lam << 10.0, 1.0, 0.0, -1e-18; // numerically zero tail
    CHECK_NOTHROW(mdl_order(lam, 1000));
}
