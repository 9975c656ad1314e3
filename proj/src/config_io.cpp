/*
   Copyright 2026 The ehgsc Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "ehgsc/config_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ehgsc/errors.hpp"

namespace ehgsc {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string at_line(int line, const std::string& msg) {
    return line > 0 ? "line " + std::to_string(line) + ": " + msg : msg;
}

double parse_plain(std::string_view s, std::string_view key, int line) {
    s = trim(s);
    double v = 0.0;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
        throw ConfigError(at_line(line, std::string(key) + ": '" + std::string(s) +
                                            "' is not a number"),
                          line);
    }
    return v;
}

double parse_number(std::string_view s, std::string_view key, int line) {
    s = trim(s);
    const auto slash = s.find('/');
    if (slash == std::string_view::npos) return parse_plain(s, key, line);
    const double num = parse_plain(s.substr(0, slash), key, line);
    const double den = parse_plain(s.substr(slash + 1), key, line);
    if (den == 0.0) throw ConfigError(at_line(line, std::string(key) + ": division by zero"), line);
    return num / den;
}

Point parse_point(std::string_view s, std::string_view key, int line) {
    s = trim(s);
    if (!s.empty() && s.front() == '[') {
        if (s.back() != ']') {
            throw ConfigError(at_line(line, std::string(key) + ": missing ']'"), line);
        }
        s = s.substr(1, s.size() - 2);
    }
    const auto comma = s.find(',');
    if (comma == std::string_view::npos) {
        throw ConfigError(at_line(line, std::string(key) + ": expected [x, y]"), line);
    }
    return {parse_number(s.substr(0, comma), key, line), parse_number(s.substr(comma + 1), key, line)};
}

std::size_t parse_count(std::string_view s, std::string_view key, int line) {
    const double v = parse_number(s, key, line);
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) {
        throw ConfigError(at_line(line, std::string(key) + ": expected a non-negative integer"), line);
    }
    return static_cast<std::size_t>(v);
}

void require(bool ok, std::string_view key, const char* what, int line) {
    if (!ok) throw ConfigError(at_line(line, std::string(key) + " " + what), line);
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "pos_s",  "pos_r",          "pos_d",  "alpha",        "p_s_w",         "m_r_mj",
        "n0_w",   "noise_dbm",      "r0",     "gamma_th",     "z",             "n_bins",
        "lambda1", "harvest_mean_db", "slot_duration_s", "relay_policy", "relay_timing",
        "discharge_model"};
    return keys;
}

}  // namespace

std::vector<std::string> mandatory_keys() { return {"pos_s", "pos_r", "pos_d", "m_r_mj", "z"}; }

void apply_setting(NetworkConfig& cfg, std::string_view key, std::string_view value, int line) {
    value = trim(value);
    if (key == "pos_s") {
        cfg.pos_s = parse_point(value, key, line);
    } else if (key == "pos_r") {
        cfg.pos_r = parse_point(value, key, line);
    } else if (key == "pos_d") {
        cfg.pos_d = parse_point(value, key, line);
    } else if (key == "alpha") {
        cfg.alpha = parse_number(value, key, line);
        require(cfg.alpha > 0.0, key, "must be positive", line);
    } else if (key == "p_s_w") {
        cfg.p_s_w = parse_number(value, key, line);
        require(cfg.p_s_w > 0.0, key, "must be positive", line);
    } else if (key == "m_r_mj") {
        cfg.m_r_mj = parse_number(value, key, line);
        require(cfg.m_r_mj > 0.0, key, "must be positive", line);
    } else if (key == "n0_w") {
        cfg.n0_w = parse_number(value, key, line);
        require(cfg.n0_w > 0.0, key, "must be positive", line);
    } else if (key == "noise_dbm") {
        cfg.n0_w = 1e-3 * std::pow(10.0, parse_number(value, key, line) / 10.0);
        require(cfg.n0_w > 0.0 && std::isfinite(cfg.n0_w), key, "out of range", line);
    } else if (key == "r0") {
        cfg.r0 = parse_number(value, key, line);
        require(cfg.r0 > 0.0, key, "must be positive", line);
    } else if (key == "gamma_th") {
        cfg.gamma_th = parse_number(value, key, line);
        require(cfg.gamma_th > 0.0, key, "must be positive", line);
    } else if (key == "z") {
        cfg.z = parse_number(value, key, line);
        require(cfg.z >= 0.0 && cfg.z < 1.0, key, "must lie in [0,1)", line);
    } else if (key == "n_bins") {
        cfg.n_bins = parse_count(value, key, line);
        require(cfg.n_bins >= 2 && cfg.n_bins <= 100000, key, "must lie in [2,100000]", line);
    } else if (key == "lambda1") {
        cfg.lambda1 = parse_number(value, key, line);
        require(cfg.lambda1 > 0.0 && std::isfinite(cfg.lambda1), key, "must be positive", line);
    } else if (key == "harvest_mean_db") {
        // 1/lambda1 in dB relative to 1 mJ.
        cfg.lambda1 = 1.0 / std::pow(10.0, parse_number(value, key, line) / 10.0);
        require(cfg.lambda1 > 0.0 && std::isfinite(cfg.lambda1), key, "out of range", line);
    } else if (key == "slot_duration_s") {
        cfg.slot_duration_s = parse_number(value, key, line);
        require(cfg.slot_duration_s > 0.0, key, "must be positive", line);
    } else if (key == "relay_policy") {
        if (value == "transmit-always") {
            cfg.relay_policy = RelayPolicy::kTransmitAlways;
        } else if (value == "transmit-when-successful") {
            cfg.relay_policy = RelayPolicy::kTransmitWhenSuccessful;
        } else {
            throw ConfigError(at_line(line, "relay_policy: expected transmit-always or "
                                            "transmit-when-successful"),
                              line);
        }
    } else if (key == "relay_timing") {
        if (value == "same-slot") {
            cfg.relay_timing = RelayTiming::kSameSlot;
        } else if (value == "next-slot") {
            cfg.relay_timing = RelayTiming::kNextSlot;
        } else {
            throw ConfigError(at_line(line, "relay_timing: expected same-slot or next-slot"), line);
        }
    } else if (key == "discharge_model") {
        if (value == "held-quantum") {
            cfg.discharge_model = DischargeModel::kHeldQuantum;
        } else if (value == "stationary") {
            cfg.discharge_model = DischargeModel::kStationary;
        } else {
            throw ConfigError(at_line(line, "discharge_model: expected held-quantum or stationary"),
                              line);
        }
    } else {
        throw ConfigError(at_line(line, "unknown key '" + std::string(key) + "'"), line);
    }
}

ParsedConfig parse_config(std::string_view text) {
    ParsedConfig out;
    std::map<std::string, int> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(at_line(line_no, "expected 'key = value'"), line_no);
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
            throw ConfigError(at_line(line_no, "unknown key '" + key + "'"), line_no);
        }
        if (auto it = seen.find(key); it != seen.end()) {
            throw ConfigError(at_line(line_no, "duplicate key '" + key + "' (first on line " +
                                                   std::to_string(it->second) + ")"),
                              line_no);
        }
        if (value.empty()) throw ConfigError(at_line(line_no, key + ": missing value"), line_no);
        auto clash = [&](const char* a, const char* b) {
            if ((key == a && seen.count(b)) || (key == b && seen.count(a))) {
                throw ConfigError(at_line(line_no, std::string(a) + " and " + b +
                                                       " are mutually exclusive"),
                                  line_no);
            }
        };
        clash("lambda1", "harvest_mean_db");
        clash("n0_w", "noise_dbm");
        apply_setting(out.config, key, value, line_no);
        seen.emplace(key, line_no);
    }

    std::vector<std::string> missing;
    for (const auto& k : mandatory_keys()) {
        if (!seen.count(k)) missing.push_back(k);
    }
    if (!seen.count("lambda1") && !seen.count("harvest_mean_db")) {
        missing.push_back("lambda1|harvest_mean_db");
    }
    if (!missing.empty()) {
        std::string msg = "missing mandatory keys:";
        for (const auto& k : missing) msg += " " + k;
        throw ConfigError(msg);
    }

    NetworkConfig& c = out.config;
    if (!seen.count("gamma_th")) c.gamma_th = std::exp2(c.r0) - 1.0;
    auto note = [&](const char* key, const std::string& value) {
        if (!seen.count(key)) out.applied_defaults.push_back(std::string(key) + " = " + value);
    };
    note("alpha", format_double(c.alpha));
    note("p_s_w", format_double(c.p_s_w));
    if (!seen.count("noise_dbm")) note("n0_w", format_double(c.n0_w));
    note("r0", format_double(c.r0));
    note("gamma_th", format_double(c.gamma_th));
    note("n_bins", std::to_string(c.n_bins));
    note("slot_duration_s", format_double(c.slot_duration_s));
    note("relay_policy", std::string(to_string(c.relay_policy)));
    note("relay_timing", std::string(to_string(c.relay_timing)));
    note("discharge_model", std::string(to_string(c.discharge_model)));

    try {
        validate(c);
    } catch (const ConfigError& ex) {
        throw ConfigError(std::string("invalid configuration: ") + ex.what());
    }
    return out;
}

ParsedConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string format_double(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, p);
}

std::string format_config(const NetworkConfig& c) {
    auto pt = [](const Point& p) { return "[" + format_double(p.x) + ", " + format_double(p.y) + "]"; };
    std::ostringstream s;
    s << "pos_s = " << pt(c.pos_s) << "\n"
      << "pos_r = " << pt(c.pos_r) << "\n"
      << "pos_d = " << pt(c.pos_d) << "\n"
      << "alpha = " << format_double(c.alpha) << "\n"
      << "p_s_w = " << format_double(c.p_s_w) << "\n"
      << "m_r_mj = " << format_double(c.m_r_mj) << "\n"
      << "n0_w = " << format_double(c.n0_w) << "\n"
      << "r0 = " << format_double(c.r0) << "\n"
      << "gamma_th = " << format_double(c.gamma_th) << "\n"
      << "z = " << format_double(c.z) << "\n"
      << "n_bins = " << c.n_bins << "\n"
      << "lambda1 = " << format_double(c.lambda1) << "\n"
      << "slot_duration_s = " << format_double(c.slot_duration_s) << "\n"
      << "relay_policy = " << to_string(c.relay_policy) << "\n"
      << "relay_timing = " << to_string(c.relay_timing) << "\n"
      << "discharge_model = " << to_string(c.discharge_model) << "\n";
    return s.str();
}

}  // namespace ehgsc
