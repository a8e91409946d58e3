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

#include "wimo/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace wimo
{
    namespace
    {
        // FFTW planner is not thread-safe; execution of a finished plan is.
        std::mutex &planner_mutex()
        {
            static std::mutex m;
            return m;
        }

        void run_fftw(Eigen::VectorXcd &v, int sign)
        {
            const int n = static_cast<int>(v.size());
            if (n == 0)
                throw std::invalid_argument("fft: empty input");
            auto *data = reinterpret_cast<fftw_complex *>(v.data());
            fftw_plan plan;
            {
                std::lock_guard<std::mutex> lock(planner_mutex());
                plan = fftw_plan_dft_1d(n, data, data, sign, FFTW_ESTIMATE);
            }
            if (!plan)
                throw std::runtime_error("fft: FFTW planning failed");
            fftw_execute(plan);
            {
                std::lock_guard<std::mutex> lock(planner_mutex());
                fftw_destroy_plan(plan);
            }
        }
    } // namespace

    void fft_forward_inplace(Eigen::VectorXcd &v) { run_fftw(v, FFTW_FORWARD); }

    void fft_inverse_inplace(Eigen::VectorXcd &v)
    {
        run_fftw(v, FFTW_BACKWARD);
        v /= static_cast<double>(v.size());
    }

    Eigen::VectorXcd fft_forward(Eigen::VectorXcd v)
    {
        fft_forward_inplace(v);
        return v;
    }

    Eigen::VectorXcd fft_inverse(Eigen::VectorXcd v)
    {
        fft_inverse_inplace(v);
        return v;
    }

    double dft_frequency(std::size_t q, std::size_t n, double fs)
    {
        const auto qi = static_cast<long long>(q);
        const auto ni = static_cast<long long>(n);
        return (qi <= ni / 2 ? static_cast<double>(qi) : static_cast<double>(qi - ni)) * fs /
               static_cast<double>(ni);
    }

} // namespace wimo
