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

#include "wimo/modal_cache.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace wimo
{
    namespace
    {
        constexpr char cache_magic[8] = {'W', 'M', 'O', 'D', '0', '0', '0', '1'};

        template <typename T>
        void put(std::ostream &out, const T &value)
        {
            out.write(reinterpret_cast<const char *>(&value), sizeof(T));
        }

        template <typename T>
        T get(std::istream &in)
        {
            T value{};
            in.read(reinterpret_cast<char *>(&value), sizeof(T));
            if (!in)
                throw std::runtime_error("modal cache truncated");
            return value;
        }

        void put_string(std::ostream &out, const std::string &s)
        {
            put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
            out.write(s.data(), static_cast<std::streamsize>(s.size()));
        }

        std::string get_string(std::istream &in)
        {
            const auto n = get<std::uint32_t>(in);
            std::string s(n, '\0');
            in.read(s.data(), n);
            if (!in)
                throw std::runtime_error("modal cache truncated");
            return s;
        }
    } // namespace

    void save_modal_cache(const std::string &path, const ModalTable &table)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot open for writing: " + path);
        out.write(cache_magic, sizeof(cache_magic));
        put<std::uint32_t>(out, 1u);
        put_string(out, table.key());

        put<std::uint32_t>(out, static_cast<std::uint32_t>(table.geometry.n_sensors()));
        put<double>(out, table.geometry.c);
        for (const auto &p : table.geometry.positions)
        {
            put<double>(out, p.x());
            put<double>(out, p.y());
            put<double>(out, p.z());
        }
        put<std::int32_t>(out, table.m);
        put<double>(out, table.dt);
        put<double>(out, table.fc);
        put<double>(out, table.bandwidth);

        put<std::uint8_t>(out, table.psd ? 1 : 0);
        if (table.psd)
        {
            const PsdSpec &psd = *table.psd;
            put<std::uint8_t>(out, static_cast<std::uint8_t>(psd.kind));
            put<double>(out, psd.power);
            put<double>(out, psd.f_lo);
            put<double>(out, psd.f_hi);
            put<double>(out, psd.f_center);
            put<double>(out, psd.bw3db);
            put<std::uint32_t>(out, static_cast<std::uint32_t>(psd.table.size()));
            for (const auto &[f, d] : psd.table)
            {
                put<double>(out, f);
                put<double>(out, d);
            }
        }

        const auto n_grid = static_cast<std::uint32_t>(table.grid_deg.size());
        const auto L = static_cast<std::uint32_t>(table.length());
        put<std::uint32_t>(out, n_grid);
        put<std::uint32_t>(out, L);
        for (std::uint32_t i = 0; i < n_grid; ++i)
            put<double>(out, table.grid_deg[i]);
        for (std::uint32_t i = 0; i < n_grid; ++i)
        {
            const auto &sigma = table.sigma[i];
            const auto &u = table.u[i];
            out.write(reinterpret_cast<const char *>(sigma.data()),
                      static_cast<std::streamsize>(sizeof(double) * L));
            out.write(reinterpret_cast<const char *>(u.data()),
                      static_cast<std::streamsize>(sizeof(cxd) * L * L));
        }
        if (!out)
            throw std::runtime_error("write failed: " + path);
    }

    ModalTable load_modal_cache(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot open: " + path);
        char magic[8];
        in.read(magic, sizeof(magic));
        if (!in || std::memcmp(magic, cache_magic, sizeof(magic)) != 0)
            throw std::runtime_error("not a wimo modal cache: " + path);
        if (get<std::uint32_t>(in) != 1u)
            throw std::runtime_error("unsupported modal cache version: " + path);
        const std::string stored_key = get_string(in);

        ModalTable table;
        const auto ns = get<std::uint32_t>(in);
        table.geometry.c = get<double>(in);
        table.geometry.positions.resize(ns);
        for (auto &p : table.geometry.positions)
        {
            p.x() = get<double>(in);
            p.y() = get<double>(in);
            p.z() = get<double>(in);
        }
        table.m = get<std::int32_t>(in);
        table.dt = get<double>(in);
        table.fc = get<double>(in);
        table.bandwidth = get<double>(in);

        if (get<std::uint8_t>(in))
        {
            PsdSpec psd;
            psd.kind = static_cast<PsdKind>(get<std::uint8_t>(in));
            psd.power = get<double>(in);
            psd.f_lo = get<double>(in);
            psd.f_hi = get<double>(in);
            psd.f_center = get<double>(in);
            psd.bw3db = get<double>(in);
            const auto rows = get<std::uint32_t>(in);
            psd.table.resize(rows);
            for (auto &[f, d] : psd.table)
            {
                f = get<double>(in);
                d = get<double>(in);
            }
            table.psd = psd;
        }

        const auto n_grid = get<std::uint32_t>(in);
        const auto L = get<std::uint32_t>(in);
        table.grid_deg.resize(n_grid);
        for (std::uint32_t i = 0; i < n_grid; ++i)
            table.grid_deg[static_cast<Eigen::Index>(i)] = get<double>(in);
        table.sigma.resize(n_grid);
        table.u.resize(n_grid);
        for (std::uint32_t i = 0; i < n_grid; ++i)
        {
            table.sigma[i].resize(L);
            table.u[i].resize(L, L);
            in.read(reinterpret_cast<char *>(table.sigma[i].data()),
                    static_cast<std::streamsize>(sizeof(double) * L));
            in.read(reinterpret_cast<char *>(table.u[i].data()),
                    static_cast<std::streamsize>(sizeof(cxd) * L * L));
            if (!in)
                throw std::runtime_error("modal cache truncated: " + path);
        }

        if (table.key() != stored_key)
            throw std::runtime_error("modal cache key digest mismatch (corrupt file): " + path);
        return table;
    }

    ModalTable load_modal_cache(const std::string &path, const std::string &expected_key)
    {
        ModalTable table = load_modal_cache(path);
        if (table.key() != expected_key)
            throw std::runtime_error("modal cache key mismatch for " + path);
        return table;
    }

} // namespace wimo
