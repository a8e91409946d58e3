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

#include "wimo/common.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace wimo
{

    EigDescending hermitian_eig_descending(const Eigen::MatrixXcd &a)
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("hermitian_eig_descending: eigensolver failed");
        const Eigen::Index n = a.rows();
        EigDescending out;
        out.values.resize(n);
        out.vectors.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            out.values[i] = solver.eigenvalues()[n - 1 - i];
            out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
        }
        return out;
    }

    double max_principal_angle(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b)
    {
        if (a.rows() != b.rows() || a.cols() != b.cols())
            throw std::invalid_argument("max_principal_angle: dimension mismatch");
        const Eigen::MatrixXcd cross = a.adjoint() * b;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(cross);
        const double smin = svd.singularValues().minCoeff();
        return std::acos(std::clamp(smin, -1.0, 1.0));
    }

    void canonicalize_phase(Eigen::MatrixXcd &vectors)
    {
        for (Eigen::Index j = 0; j < vectors.cols(); ++j)
        {
            Eigen::Index imax = 0;
            vectors.col(j).cwiseAbs().maxCoeff(&imax);
            const cxd v = vectors(imax, j);
            if (std::abs(v) > 0.0)
                vectors.col(j) *= std::conj(v) / std::abs(v);
        }
    }

    void parallel_for(std::size_t n, int thread_count, const std::function<void(std::size_t)> &fn)
    {
        if (n == 0)
            return;
        unsigned workers = thread_count > 0 ? static_cast<unsigned>(thread_count)
                                            : std::max(1u, std::thread::hardware_concurrency());
        workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
        if (workers <= 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }

        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto body = [&]() {
            for (;;)
            {
                const std::size_t i = next.fetch_add(1);
                if (i >= n)
                    return;
                try
                {
                    fn(i);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    return;
                }
            }
        };

        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t)
            pool.emplace_back(body);
        for (auto &t : pool)
            t.join();
        if (error)
            std::rethrow_exception(error);
    }

} // namespace wimo
