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

#ifndef WIMO_RNG_HPP
#define WIMO_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>

namespace wimo
{
    // splitmix64 output function
    inline std::uint64_t splitmix64(std::uint64_t z)
    {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Stream seed for item `index` under `base`. Independent and
    // order-insensitive, so Monte Carlo trials can run in any schedule.
    inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index)
    {
        return splitmix64(splitmix64(base) ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
    }

    // Small deterministic generator (splitmix64 stream). Value semantics;
    // every consumer owns its own instance, nothing is shared.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed) : state_(seed) {}

        std::uint64_t next_u64()
        {
            state_ += 0x9E3779B97F4A7C15ULL;
            std::uint64_t z = state_;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            return z ^ (z >> 31);
        }

        // uniform in [0, 1)
        double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

        double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

        // standard normal, Box-Muller
        double normal()
        {
            double u1 = uniform();
            double u2 = uniform();
            return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * 3.141592653589793 * u2);
        }

        // circular complex normal with E|z|^2 = 1
        std::complex<double> cnormal()
        {
            double u1 = uniform();
            double u2 = uniform();
            double r = std::sqrt(-std::log1p(-u1));
            return std::polar(r, 2.0 * 3.141592653589793 * u2);
        }

    private:
        std::uint64_t state_;
    };

} // namespace wimo

#endif
