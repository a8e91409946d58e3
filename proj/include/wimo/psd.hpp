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

#ifndef WIMO_PSD_HPP
#define WIMO_PSD_HPP

#include <string>
#include <utility>
#include <vector>

namespace wimo
{
    enum class PsdKind
    {
        Uniform,
        Gaussian,
        Sinc2,
        Tabulated
    };

    // Source power spectral density. `density(f)` returns the unnormalized
    // shape; consumers normalize so total power over the support equals
    // `power` (synthesis on the DFT grid, approximation by its trace).
    //
    // Gaussian is parameterized by its 3 dB full width: the underlying
    // std dev is s = bw3db / (2 sqrt(2 ln 2)). Sinc^2 by its main-lobe
    // 3 dB width: first null at bw3db / 0.8858929413789047 from center.
    // Both are truncated to [support_lo, support_hi].
    struct PsdSpec
    {
        PsdKind kind = PsdKind::Uniform;
        double power = 1.0; // sigma_x^2

        double f_lo = 0.0; // support edges [Hz]
        double f_hi = 0.0;
        double f_center = 0.0; // Gaussian / Sinc2
        double bw3db = 0.0;

        std::vector<std::pair<double, double>> table; // (f, density), ascending

        static PsdSpec uniform(double f_lo, double f_hi, double power = 1.0);
        // default support: f_center +/- 5 std devs
        static PsdSpec gaussian(double f_center, double bw3db, double power = 1.0);
        static PsdSpec gaussian(double f_center, double bw3db, double f_lo, double f_hi,
                                double power = 1.0);
        // default support: f_center +/- 4 null spacings
        static PsdSpec sinc2(double f_center, double bw3db, double power = 1.0);
        static PsdSpec sinc2(double f_center, double bw3db, double f_lo, double f_hi,
                             double power = 1.0);
        static PsdSpec tabulated(std::vector<std::pair<double, double>> table, double power = 1.0);

        void validate() const;
        double density(double f) const;     // unnormalized, 0 outside support
        double support_lo() const { return f_lo; }
        double support_hi() const { return f_hi; }
        bool is_delta() const { return kind == PsdKind::Tabulated && table.size() == 1; }
        double center() const; // midpoint of support (delta: the tone frequency)
        double gaussian_sigma() const;
        std::string digest() const; // canonical string for cache keys
    };

} // namespace wimo

#endif
