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

#ifndef WIMO_SNAPSHOT_IO_HPP
#define WIMO_SNAPSHOT_IO_HPP

#include "wimo/simulator.hpp"

#include <string>

namespace wimo
{
    // Binary snapshot container, little-endian:
    //   magic  "WSNP0001"                       8 bytes
    //   u32    n_sensors
    //   u32    reserved (0)
    //   u64    n_snapshots
    //   f64    fs [Hz]
    //   data   n_sensors * n_snapshots complex64 (float32 re, float32 im),
    //          row-major sensor x time
    void write_snapshot(const std::string &path, const SnapshotMatrix &snapshots);
    SnapshotMatrix read_snapshot(const std::string &path);

    // CSV fallback: a "# wimo-snapshot ns=<n> m=<M> fs=<fs>" header line, then
    // one row per time sample with re,im pairs per sensor.
    void write_snapshot_csv(const std::string &path, const SnapshotMatrix &snapshots);
    SnapshotMatrix read_snapshot_csv(const std::string &path);

    // Dispatch on extension: ".csv" text, anything else binary.
    void write_snapshot_any(const std::string &path, const SnapshotMatrix &snapshots);
    SnapshotMatrix read_snapshot_any(const std::string &path);

} // namespace wimo

#endif
