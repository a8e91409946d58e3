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

#ifndef WIMO_MODAL_CACHE_HPP
#define WIMO_MODAL_CACHE_HPP

#include "wimo/approx.hpp"

#include <string>

namespace wimo
{
    // Persists a precomputed modal table so the offline grid computation
    // survives process restarts. The file embeds the canonical key string
    // (geometry, m, dt, carrier/bandwidth or PSD digest, grid); loading with
    // a non-matching expected key throws.
    void save_modal_cache(const std::string &path, const ModalTable &table);

    ModalTable load_modal_cache(const std::string &path);
    ModalTable load_modal_cache(const std::string &path, const std::string &expected_key);

} // namespace wimo

#endif
