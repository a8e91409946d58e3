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

#include "wimo/psd.hpp"

#include "wimo/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace wimo
{
    namespace
    {
        // half-power abscissa of sinc^2: (sin(pi x)/(pi x))^2 = 1/2
        constexpr double sinc2_half_power_x = 0.44294647068945237;
    }

    PsdSpec PsdSpec::uniform(double f_lo, double f_hi, double power)
    {
        PsdSpec p;
        p.kind = PsdKind::Uniform;
        p.f_lo = f_lo;
        p.f_hi = f_hi;
        p.power = power;
        p.validate();
        return p;
    }

    PsdSpec PsdSpec::gaussian(double f_center, double bw3db, double power)
    {
        const double s = bw3db / (2.0 * std::sqrt(2.0 * std::log(2.0)));
        return gaussian(f_center, bw3db, f_center - 5.0 * s, f_center + 5.0 * s, power);
    }

    PsdSpec PsdSpec::gaussian(double f_center, double bw3db, double f_lo, double f_hi, double power)
    {
        PsdSpec p;
        p.kind = PsdKind::Gaussian;
        p.f_center = f_center;
        p.bw3db = bw3db;
        p.f_lo = f_lo;
        p.f_hi = f_hi;
        p.power = power;
        p.validate();
        return p;
    }

    PsdSpec PsdSpec::sinc2(double f_center, double bw3db, double power)
    {
        const double null_offset = bw3db / (2.0 * sinc2_half_power_x);
        return sinc2(f_center, bw3db, f_center - 4.0 * null_offset, f_center + 4.0 * null_offset,
                     power);
    }

    PsdSpec PsdSpec::sinc2(double f_center, double bw3db, double f_lo, double f_hi, double power)
    {
        PsdSpec p;
        p.kind = PsdKind::Sinc2;
        p.f_center = f_center;
        p.bw3db = bw3db;
        p.f_lo = f_lo;
        p.f_hi = f_hi;
        p.power = power;
        p.validate();
        return p;
    }

    PsdSpec PsdSpec::tabulated(std::vector<std::pair<double, double>> table, double power)
    {
        PsdSpec p;
        p.kind = PsdKind::Tabulated;
        p.table = std::move(table);
        if (p.table.empty())
            throw std::invalid_argument("PsdSpec: empty table");
        if (!std::is_sorted(p.table.begin(), p.table.end(),
                            [](auto &a, auto &b) { return a.first < b.first; }))
            throw std::invalid_argument("PsdSpec: table frequencies must be ascending");
        p.f_lo = p.table.front().first;
        p.f_hi = p.table.back().first;
        p.power = power;
        p.validate();
        return p;
    }

    void PsdSpec::validate() const
    {
        if (!(power > 0.0))
            throw std::invalid_argument("PsdSpec: power must be positive");
        if (kind == PsdKind::Tabulated)
        {
            for (const auto &[f, d] : table)
            {
                (void)f;
                if (d < 0.0)
                    throw std::invalid_argument("PsdSpec: negative density sample");
            }
            return;
        }
        if (!(f_hi >= f_lo))
            throw std::invalid_argument("PsdSpec: support edges out of order");
        if (kind != PsdKind::Uniform && !(bw3db > 0.0))
            throw std::invalid_argument("PsdSpec: bw3db must be positive");
        if (kind == PsdKind::Uniform && !(f_hi > f_lo))
            throw std::invalid_argument("PsdSpec: uniform band must have positive width");
    }

    double PsdSpec::gaussian_sigma() const
    {
        return bw3db / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    }

    double PsdSpec::density(double f) const
    {
        switch (kind)
        {
        case PsdKind::Uniform:
            return (f >= f_lo && f <= f_hi) ? 1.0 : 0.0;
        case PsdKind::Gaussian:
        {
            if (f < f_lo || f > f_hi)
                return 0.0;
            const double s = gaussian_sigma();
            const double d = (f - f_center) / s;
            return std::exp(-0.5 * d * d);
        }
        case PsdKind::Sinc2:
        {
            if (f < f_lo || f > f_hi)
                return 0.0;
            const double null_offset = bw3db / (2.0 * sinc2_half_power_x);
            const double v = sinc((f - f_center) / null_offset);
            return v * v;
        }
        case PsdKind::Tabulated:
        {
            if (f < f_lo || f > f_hi)
                return 0.0;
            if (table.size() == 1)
                return f == table.front().first ? table.front().second : 0.0;
            auto hi = std::lower_bound(table.begin(), table.end(), f,
                                       [](const auto &row, double x) { return row.first < x; });
            if (hi == table.begin())
                return hi->second;
            if (hi == table.end())
                return table.back().second;
            auto lo = std::prev(hi);
            const double w = (f - lo->first) / (hi->first - lo->first);
            return lo->second + w * (hi->second - lo->second);
        }
        }
        return 0.0;
    }

    double PsdSpec::center() const
    {
        if (is_delta())
            return table.front().first;
        return 0.5 * (f_lo + f_hi);
    }

    std::string PsdSpec::digest() const
    {
        char buf[160];
        std::string out;
        switch (kind)
        {
        case PsdKind::Uniform:
            std::snprintf(buf, sizeof(buf), "uniform|%.17g|%.17g|%.17g", f_lo, f_hi, power);
            return buf;
        case PsdKind::Gaussian:
            std::snprintf(buf, sizeof(buf), "gaussian|%.17g|%.17g|%.17g|%.17g|%.17g", f_center,
                          bw3db, f_lo, f_hi, power);
            return buf;
        case PsdKind::Sinc2:
            std::snprintf(buf, sizeof(buf), "sinc2|%.17g|%.17g|%.17g|%.17g|%.17g", f_center, bw3db,
                          f_lo, f_hi, power);
            return buf;
        case PsdKind::Tabulated:
            out = "tabulated";
            for (const auto &[f, d] : table)
            {
                std::snprintf(buf, sizeof(buf), "|%.17g:%.17g", f, d);
                out += buf;
            }
            std::snprintf(buf, sizeof(buf), "|%.17g", power);
            out += buf;
            return out;
        }
        return out;
    }

} // namespace wimo
