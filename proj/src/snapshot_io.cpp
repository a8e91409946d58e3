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

#include "wimo/snapshot_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace wimo
{
    namespace
    {
        constexpr char snapshot_magic[8] = {'W', 'S', 'N', 'P', '0', '0', '0', '1'};

        template <typename T>
        void write_raw(std::ostream &out, const T &value)
        {
            out.write(reinterpret_cast<const char *>(&value), sizeof(T));
        }

        template <typename T>
        T read_raw(std::istream &in)
        {
            T value{};
            in.read(reinterpret_cast<char *>(&value), sizeof(T));
            if (!in)
                throw std::runtime_error("snapshot file truncated");
            return value;
        }
    } // namespace

    void write_snapshot(const std::string &path, const SnapshotMatrix &snapshots)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot open for writing: " + path);
        out.write(snapshot_magic, sizeof(snapshot_magic));
        write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(snapshots.n_sensors()));
        write_raw<std::uint32_t>(out, 0u);
        write_raw<std::uint64_t>(out, static_cast<std::uint64_t>(snapshots.n_snapshots()));
        write_raw<double>(out, snapshots.fs);
        for (int k = 0; k < snapshots.n_sensors(); ++k)
            for (long t = 0; t < snapshots.n_snapshots(); ++t)
            {
                const cxd v = snapshots.data(k, t);
                write_raw<float>(out, static_cast<float>(v.real()));
                write_raw<float>(out, static_cast<float>(v.imag()));
            }
        if (!out)
            throw std::runtime_error("write failed: " + path);
    }

    SnapshotMatrix read_snapshot(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot open: " + path);
        char magic[8];
        in.read(magic, sizeof(magic));
        if (!in || std::memcmp(magic, snapshot_magic, sizeof(magic)) != 0)
            throw std::runtime_error("not a wimo snapshot file: " + path);
        const auto ns = read_raw<std::uint32_t>(in);
        read_raw<std::uint32_t>(in); // reserved
        const auto m = read_raw<std::uint64_t>(in);
        const double fs = read_raw<double>(in);
        if (ns == 0 || m == 0)
            throw std::runtime_error("snapshot file has empty dimensions: " + path);

        SnapshotMatrix out;
        out.fs = fs;
        out.data.resize(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(m));
        for (std::uint32_t k = 0; k < ns; ++k)
            for (std::uint64_t t = 0; t < m; ++t)
            {
                const float re = read_raw<float>(in);
                const float im = read_raw<float>(in);
                out.data(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) = cxd(re, im);
            }
        return out;
    }

    void write_snapshot_csv(const std::string &path, const SnapshotMatrix &snapshots)
    {
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot open for writing: " + path);
        char header[96];
        std::snprintf(header, sizeof(header), "# wimo-snapshot ns=%d m=%ld fs=%.17g\n",
                      snapshots.n_sensors(), snapshots.n_snapshots(), snapshots.fs);
        out << header;
        char cell[64];
        for (long t = 0; t < snapshots.n_snapshots(); ++t)
        {
            for (int k = 0; k < snapshots.n_sensors(); ++k)
            {
                const cxd v = snapshots.data(k, t);
                std::snprintf(cell, sizeof(cell), "%s%.9g,%.9g", k ? "," : "", v.real(), v.imag());
                out << cell;
            }
            out << '\n';
        }
        if (!out)
            throw std::runtime_error("write failed: " + path);
    }

    SnapshotMatrix read_snapshot_csv(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open: " + path);
        std::string header;
        std::getline(in, header);
        int ns = 0;
        long m = 0;
        double fs = 0.0;
        if (std::sscanf(header.c_str(), "# wimo-snapshot ns=%d m=%ld fs=%lf", &ns, &m, &fs) != 3 ||
            ns <= 0 || m <= 0)
            throw std::runtime_error("bad snapshot csv header: " + path);

        SnapshotMatrix out;
        out.fs = fs;
        out.data.resize(ns, m);
        std::string line;
        for (long t = 0; t < m; ++t)
        {
            if (!std::getline(in, line))
                throw std::runtime_error("snapshot csv truncated: " + path);
            std::stringstream row(line);
            std::string cell;
            for (int k = 0; k < ns; ++k)
            {
                double re = 0.0, im = 0.0;
                if (!std::getline(row, cell, ','))
                    throw std::runtime_error("snapshot csv row too short: " + path);
                re = std::stod(cell);
                if (!std::getline(row, cell, ','))
                    throw std::runtime_error("snapshot csv row too short: " + path);
                im = std::stod(cell);
                out.data(k, t) = cxd(re, im);
            }
        }
        return out;
    }

    namespace
    {
        bool has_csv_extension(const std::string &path)
        {
            return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
        }
    } // namespace

    void write_snapshot_any(const std::string &path, const SnapshotMatrix &snapshots)
    {
        if (has_csv_extension(path))
            write_snapshot_csv(path, snapshots);
        else
            write_snapshot(path, snapshots);
    }

    SnapshotMatrix read_snapshot_any(const std::string &path)
    {
        return has_csv_extension(path) ? read_snapshot_csv(path) : read_snapshot(path);
    }

} // namespace wimo
