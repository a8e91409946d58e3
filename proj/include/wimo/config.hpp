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

#ifndef WIMO_CONFIG_HPP
#define WIMO_CONFIG_HPP

#include "wimo/bench.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace wimo::config
{
    // Every config key is declared here; the CLI help text, key validation
    // and override handling are all generated from this one table, so an
    // undocumented key cannot exist.
    struct KeyInfo
    {
        const char *path; // dotted, array elements as "sources[]"
        const char *type;
        const char *doc;
    };

    const std::vector<KeyInfo> &schema();
    std::string schema_help();

    // Throws std::invalid_argument naming the exact unknown key.
    void validate_keys(const nlohmann::json &config);

    nlohmann::json load_config_file(const std::string &path);

    // "key=value" with a dotted key; value parsed as JSON when possible,
    // otherwise taken as a string. The key must exist in the schema.
    void apply_override(nlohmann::json &config, const std::string &assignment);

    ArrayGeometry parse_array(const nlohmann::json &node);
    PsdSpec parse_psd(const nlohmann::json &node);
    EstimatorSpec parse_estimator(const nlohmann::json &node);
    ExperimentSpec parse_experiment(const nlohmann::json &config);

} // namespace wimo::config

#endif
