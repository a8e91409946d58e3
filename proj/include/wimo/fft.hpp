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

#ifndef WIMO_FFT_HPP
#define WIMO_FFT_HPP

#include "wimo/common.hpp"

namespace wimo
{
    // Complex FFT (FFTW backend, any length). Plan creation is serialized
    // internally, so these are safe to call from worker threads.
    void fft_forward_inplace(Eigen::VectorXcd &v);  // unnormalized
    void fft_inverse_inplace(Eigen::VectorXcd &v);  // scaled by 1/n

    Eigen::VectorXcd fft_forward(Eigen::VectorXcd v);
    Eigen::VectorXcd fft_inverse(Eigen::VectorXcd v);

    // Signed DFT bin frequency in Hz: q <= n/2 maps to q*fs/n, else (q-n)*fs/n.
    double dft_frequency(std::size_t q, std::size_t n, double fs);

} // namespace wimo

#endif
