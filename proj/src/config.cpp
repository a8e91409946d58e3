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

#include "wimo/config.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace wimo::config
{
    namespace
    {
        using nlohmann::json;

        // leaf keys whose values are data arrays, not nested config
        const char *opaque_keys[] = {
            "array.positions",
            "sources[].psd.table",
            "estimator.assumed_psd.table",
            "sweep.values",
        };

        bool is_opaque(const std::string &path)
        {
            return std::any_of(std::begin(opaque_keys), std::end(opaque_keys),
                               [&](const char *k) { return path == k; });
        }
    } // namespace

    const std::vector<KeyInfo> &schema()
    {
        static const std::vector<KeyInfo> keys = {
            {"array.type", "string", "\"ula\" or \"custom\""},
            {"array.sensors", "int", "ULA element count"},
            {"array.spacing", "number", "ULA element spacing [m]"},
            {"array.c", "number", "propagation speed [m/s] (default 1500)"},
            {"array.positions", "[[x,y,z],...]", "custom sensor positions [m]"},
            {"sources[].theta_deg", "number", "source direction [-90, 90] deg"},
            {"sources[].snr_db", "number", "per-source SNR vs unit noise; omit for noiseless"},
            {"sources[].psd.kind", "string", "uniform | gaussian | sinc2 | tabulated"},
            {"sources[].psd.f_lo", "number", "support low edge [Hz]"},
            {"sources[].psd.f_hi", "number", "support high edge [Hz]"},
            {"sources[].psd.f_center", "number", "center frequency [Hz] (gaussian/sinc2)"},
            {"sources[].psd.bw3db", "number", "3 dB bandwidth [Hz] (gaussian/sinc2)"},
            {"sources[].psd.table", "[[f,density],...]", "tabulated PSD samples"},
            {"sources[].coherence_group", "int", "sources sharing a group are correlated"},
            {"sources[].rho", "number", "coherence index toward the group head, [0,1]"},
            {"sampling.fs", "number", "sampling frequency [Hz]"},
            {"sampling.snapshots", "int", "number of time snapshots M"},
            {"sampling.seed", "int", "base seed for reproducible trials"},
            {"estimator.method", "string", "1-wimo | p-wimo | sf-cbf | sf-mvdr | sf-music"},
            {"estimator.m", "int", "temporal lag order"},
            {"estimator.order", "int|\"auto\"", "signal-subspace order P; \"auto\" applies the selection rule"},
            {"estimator.grid.start_deg", "number", "DOA grid start (default -90)"},
            {"estimator.grid.stop_deg", "number", "DOA grid stop (default +90)"},
            {"estimator.grid.step_deg", "number", "DOA grid step (default 1)"},
            {"estimator.assumed_psd", "\"true\"|object", "\"true\" = model the subspace from the source PSD"},
            {"estimator.assumed_psd.kind", "string", "assumed PSD kind (see sources[].psd.kind)"},
            {"estimator.assumed_psd.f_lo", "number", "assumed support low edge [Hz]"},
            {"estimator.assumed_psd.f_hi", "number", "assumed support high edge [Hz]"},
            {"estimator.assumed_psd.f_center", "number", "assumed center frequency [Hz]"},
            {"estimator.assumed_psd.bw3db", "number", "assumed 3 dB bandwidth [Hz]"},
            {"estimator.assumed_psd.table", "[[f,density],...]", "assumed tabulated PSD"},
            {"estimator.min_prominence_db", "number", "peak prominence threshold (default 3)"},
            {"estimator.rank_tol", "number", "numerical rank threshold (default 1e-3)"},
            {"estimator.freq_grid.start_hz", "number", "frequency grid start for sf methods"},
            {"estimator.freq_grid.stop_hz", "number", "frequency grid stop for sf methods"},
            {"estimator.freq_grid.count", "int", "frequency grid point count"},
            {"trials", "int", "Monte Carlo trials per sweep point (default 50)"},
            {"jitter_deg", "number", "uniform truth jitter half-width per source (default 0)"},
            {"sweep.axis", "string", "snr | bandwidth | separation | snapshots | rho"},
            {"sweep.values", "[number,...]", "sweep axis values (bandwidth: eta in percent)"},
            {"checks.min_resolution_prob", "number", "--check: require at every point"},
            {"checks.max_rmse_deg", "number", "--check: require at every point with resolved trials"},
            {"checks.monotonic_resolution", "bool", "--check: require nondecreasing resolution"},
        };
        return keys;
    }

    std::string schema_help()
    {
        std::string out = "Config keys (JSON, overridable with --set key=value):\n";
        for (const auto &key : schema())
        {
            out += "  ";
            out += key.path;
            out += "  (";
            out += key.type;
            out += ")  ";
            out += key.doc;
            out += '\n';
        }
        return out;
    }

    namespace
    {
        bool known_key(const std::string &path)
        {
            return std::any_of(schema().begin(), schema().end(),
                               [&](const KeyInfo &k) { return path == k.path; });
        }

        bool known_prefix(const std::string &path)
        {
            const std::string marker = path + "[].";
            return std::any_of(schema().begin(), schema().end(), [&](const KeyInfo &k) {
                return std::string(k.path).rfind(marker, 0) == 0;
            });
        }

        void walk(const json &node, const std::string &path)
        {
            if (is_opaque(path))
                return;
            if (node.is_object())
            {
                for (auto it = node.begin(); it != node.end(); ++it)
                    walk(it.value(), path.empty() ? it.key() : path + "." + it.key());
                return;
            }
            if (node.is_array())
            {
                if (!node.empty() && node.front().is_object())
                {
                    for (const auto &element : node)
                        walk(element, path + "[]");
                    return;
                }
                if (!known_key(path) && !known_prefix(path))
                    throw std::invalid_argument("unknown config key: " + path);
                return;
            }
            if (!path.empty() && !known_key(path))
                throw std::invalid_argument("unknown config key: " + path);
        }
    } // namespace

    void validate_keys(const json &config)
    {
        if (!config.is_object())
            throw std::invalid_argument("config root must be a JSON object");
        walk(config, "");
    }

    json load_config_file(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open config: " + path);
        json config = json::parse(in);
        validate_keys(config);
        return config;
    }

    void apply_override(json &config, const std::string &assignment)
    {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("override must look like key=value: " + assignment);
        const std::string key = assignment.substr(0, eq);
        const std::string value = assignment.substr(eq + 1);

        // normalize indices for the schema check: sources.0.rho -> sources[].rho
        std::string normalized;
        for (std::size_t i = 0; i < key.size();)
        {
            if (key[i] == '.' && i + 1 < key.size() && std::isdigit(key[i + 1]))
            {
                normalized += "[]";
                ++i;
                while (i < key.size() && std::isdigit(key[i]))
                    ++i;
            }
            else
                normalized += key[i++];
        }
        if (!known_key(normalized))
            throw std::invalid_argument("unknown config key: " + normalized);

        json parsed;
        try
        {
            parsed = json::parse(value);
        }
        catch (...)
        {
            parsed = value; // plain string
        }

        json *node = &config;
        std::size_t start = 0;
        for (;;)
        {
            const auto dot = key.find('.', start);
            const bool last = dot == std::string::npos;
            const std::string part =
                key.substr(start, last ? std::string::npos : dot - start);
            const bool is_index = !part.empty() &&
                                  std::all_of(part.begin(), part.end(), [](unsigned char c) {
                                      return std::isdigit(c);
                                  });
            if (is_index)
            {
                const std::size_t index = std::stoul(part);
                if (!node->is_array() || index >= node->size())
                    throw std::invalid_argument("override index out of range in: " + key);
                if (last)
                {
                    (*node)[index] = parsed;
                    break;
                }
                node = &(*node)[index];
            }
            else
            {
                if (last)
                {
                    (*node)[part] = parsed;
                    break;
                }
                node = &(*node)[part];
            }
            start = dot + 1;
        }
        validate_keys(config);
    }

    ArrayGeometry parse_array(const json &node)
    {
        ArrayGeometry geometry;
        geometry.c = node.value("c", 1500.0);
        const std::string type = node.value("type", "ula");
        if (type == "ula")
        {
            if (!node.contains("sensors") || !node.contains("spacing"))
                throw std::invalid_argument("array: ula needs array.sensors and array.spacing");
            return make_ula(node.at("sensors").get<int>(), node.at("spacing").get<double>(),
                            geometry.c);
        }
        if (type == "custom")
        {
            if (!node.contains("positions"))
                throw std::invalid_argument("array: custom needs array.positions");
            for (const auto &p : node.at("positions"))
            {
                if (!p.is_array() || p.size() != 3)
                    throw std::invalid_argument("array.positions entries must be [x, y, z]");
                geometry.positions.emplace_back(p[0].get<double>(), p[1].get<double>(),
                                                p[2].get<double>());
            }
            geometry.validate();
            return geometry;
        }
        throw std::invalid_argument("array.type must be \"ula\" or \"custom\"");
    }

    PsdSpec parse_psd(const json &node)
    {
        const std::string kind = node.at("kind").get<std::string>();
        if (kind == "uniform")
            return PsdSpec::uniform(node.at("f_lo").get<double>(), node.at("f_hi").get<double>());
        if (kind == "gaussian" || kind == "sinc2")
        {
            const double f_center = node.at("f_center").get<double>();
            const double bw3db = node.at("bw3db").get<double>();
            const bool has_edges = node.contains("f_lo") && node.contains("f_hi");
            if (kind == "gaussian")
                return has_edges ? PsdSpec::gaussian(f_center, bw3db, node.at("f_lo").get<double>(),
                                                     node.at("f_hi").get<double>())
                                 : PsdSpec::gaussian(f_center, bw3db);
            return has_edges ? PsdSpec::sinc2(f_center, bw3db, node.at("f_lo").get<double>(),
                                              node.at("f_hi").get<double>())
                             : PsdSpec::sinc2(f_center, bw3db);
        }
        if (kind == "tabulated")
        {
            std::vector<std::pair<double, double>> table;
            for (const auto &row : node.at("table"))
            {
                if (!row.is_array() || row.size() != 2)
                    throw std::invalid_argument("psd.table entries must be [f, density]");
                table.emplace_back(row[0].get<double>(), row[1].get<double>());
            }
            return PsdSpec::tabulated(std::move(table));
        }
        throw std::invalid_argument("psd.kind must be uniform, gaussian, sinc2 or tabulated");
    }

    EstimatorSpec parse_estimator(const json &node)
    {
        EstimatorSpec est;
        est.method = method_from_string(node.value("method", "1-wimo"));
        est.m = node.value("m", 6);
        if (node.contains("order"))
        {
            const auto &order = node.at("order");
            if (order.is_string())
            {
                if (order.get<std::string>() != "auto")
                    throw std::invalid_argument("estimator.order must be an integer or \"auto\"");
                est.order = 0;
            }
            else
                est.order = order.get<int>();
        }
        if (node.contains("grid"))
        {
            const auto &grid = node.at("grid");
            est.grid.start_deg = grid.value("start_deg", -90.0);
            est.grid.stop_deg = grid.value("stop_deg", 90.0);
            est.grid.step_deg = grid.value("step_deg", 1.0);
        }
        if (node.contains("assumed_psd"))
        {
            const auto &assumed = node.at("assumed_psd");
            if (assumed.is_string())
            {
                if (assumed.get<std::string>() != "true")
                    throw std::invalid_argument(
                        "estimator.assumed_psd must be \"true\" or a psd object");
                est.assume_true_psd = true;
            }
            else
                est.assumed_psd = parse_psd(assumed);
        }
        est.min_prominence_db = node.value("min_prominence_db", 3.0);
        est.rank_tol = node.value("rank_tol", 1e-3);
        if (node.contains("freq_grid"))
        {
            const auto &fg = node.at("freq_grid");
            est.freq_grid.start_hz = fg.value("start_hz", 0.0);
            est.freq_grid.stop_hz = fg.value("stop_hz", 0.0);
            est.freq_grid.count = fg.value("count", 0);
        }
        return est;
    }

    ExperimentSpec parse_experiment(const json &config)
    {
        validate_keys(config);
        ExperimentSpec spec;
        spec.geometry = parse_array(config.at("array"));

        // sources may be absent when estimating from recorded data
        for (const auto &src :
             config.contains("sources") ? config.at("sources") : nlohmann::json::array())
        {
            SourceSpec source;
            source.theta_deg = src.at("theta_deg").get<double>();
            source.psd = parse_psd(src.at("psd"));
            source.coherence_group = src.value("coherence_group", -1);
            source.rho = src.value("rho", 0.0);
            spec.sources.push_back(std::move(source));
            spec.snr_db.push_back(src.contains("snr_db")
                                      ? src.at("snr_db").get<double>()
                                      : std::numeric_limits<double>::infinity());
        }

        const auto &sampling = config.at("sampling");
        spec.sampling.fs = sampling.at("fs").get<double>();
        spec.sampling.snapshots =
            sampling.contains("snapshots") ? sampling.at("snapshots").get<long>() : 8192;
        spec.sampling.seed =
            sampling.contains("seed") ? sampling.at("seed").get<std::uint64_t>() : 1;

        if (config.contains("estimator"))
            spec.estimator = parse_estimator(config.at("estimator"));
        spec.trials = config.value("trials", 50);
        spec.jitter_deg = config.value("jitter_deg", 0.0);

        if (config.contains("sweep"))
        {
            SweepSpec sweep;
            sweep.axis = config.at("sweep").at("axis").get<std::string>();
            for (const auto &v : config.at("sweep").at("values"))
                sweep.values.push_back(v.get<double>());
            spec.sweep = std::move(sweep);
        }
        if (config.contains("checks"))
        {
            const auto &checks = config.at("checks");
            if (checks.contains("min_resolution_prob"))
                spec.checks.min_resolution_prob = checks.at("min_resolution_prob").get<double>();
            if (checks.contains("max_rmse_deg"))
                spec.checks.max_rmse_deg = checks.at("max_rmse_deg").get<double>();
            spec.checks.monotonic_resolution = checks.value("monotonic_resolution", false);
        }
        return spec;
    }

} // namespace wimo::config
