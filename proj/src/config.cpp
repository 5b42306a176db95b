// SPDX-License-Identifier: Apache-2.0
//
// csiregion - joint uplink/downlink rate regions under imperfect CSI
// Copyright (C) 2026 csiregion contributors
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

#include "csiregion/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace csiregion::config {

void SystemConfig::validate() const {
    geometry.validate();
    profile.validate();
    if (n_bs == 0 || k == 0)
        throw std::invalid_argument("config: antenna and terminal counts must be positive");
    if (!(budget.sigma_ul > 0.0) || !(budget.sigma_dl > 0.0))
        throw std::invalid_argument("config: receiver noise variances must be positive");
    if (budget.sigma_pilot < 0.0 || budget.p_max_ul < 0.0 || budget.p_tot_dl < 0.0)
        throw std::invalid_argument("config: powers and pilot noise must be nonnegative");
    if (fb.rank == 0 || fb.rank > geometry.block_length())
        throw std::invalid_argument("config: feedback rank must lie in [1, L]");
    if (fb.delay_ttis < 0)
        throw std::invalid_argument("config: feedback delay must be nonnegative");
}

double TomlValue::as_number() const {
    if (kind == Kind::Integer)
        return static_cast<double>(integer);
    if (kind == Kind::Float)
        return real;
    throw std::invalid_argument("config: expected a number");
}

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1;

    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char take() {
        const char c = text[pos++];
        if (c == '\n')
            ++line;
        return c;
    }
    void skip_ws_inline() {
        while (!done() && (peek() == ' ' || peek() == '\t'))
            ++pos;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("config: line " + std::to_string(line) + ": " + what);
    }
};

void skip_ws_and_comments(Cursor& c, bool stop_at_newline) {
    while (!c.done()) {
        const char ch = c.peek();
        if (ch == ' ' || ch == '\t') {
            c.take();
        } else if (ch == '#') {
            while (!c.done() && c.peek() != '\n')
                c.take();
        } else if ((ch == '\n' || ch == '\r') && !stop_at_newline) {
            c.take();
        } else {
            break;
        }
    }
}

std::string parse_bare_key(Cursor& c) {
    std::string key;
    while (!c.done()) {
        const char ch = c.peek();
        if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.')
            key += c.take();
        else
            break;
    }
    if (key.empty())
        c.fail("expected a key");
    return key;
}

TomlValue parse_value(Cursor& c);

TomlValue parse_array(Cursor& c) {
    TomlValue v;
    v.kind = TomlValue::Kind::Array;
    c.take(); // '['
    while (true) {
        skip_ws_and_comments(c, false);
        if (c.done())
            c.fail("unterminated array");
        if (c.peek() == ']') {
            c.take();
            break;
        }
        v.array.push_back(parse_value(c));
        skip_ws_and_comments(c, false);
        if (!c.done() && c.peek() == ',')
            c.take();
        else if (!c.done() && c.peek() == ']') {
            c.take();
            break;
        } else if (c.done()) {
            c.fail("unterminated array");
        }
    }
    return v;
}

TomlValue parse_value(Cursor& c) {
    skip_ws_and_comments(c, true);
    if (c.done())
        c.fail("expected a value");
    const char ch = c.peek();
    if (ch == '[')
        return parse_array(c);
    if (ch == '"') {
        c.take();
        TomlValue v;
        v.kind = TomlValue::Kind::String;
        while (!c.done() && c.peek() != '"') {
            char s = c.take();
            if (s == '\\' && !c.done())
                s = c.take();
            v.text += s;
        }
        if (c.done())
            c.fail("unterminated string");
        c.take();
        return v;
    }
    std::string token;
    while (!c.done()) {
        const char t = c.peek();
        if (t == '\n' || t == '\r' || t == ',' || t == ']' || t == '#' || t == ' ' || t == '\t')
            break;
        token += c.take();
    }
    if (token == "true" || token == "false") {
        TomlValue v;
        v.kind = TomlValue::Kind::Boolean;
        v.boolean = token == "true";
        return v;
    }
    std::string digits;
    for (char t : token)
        if (t != '_')
            digits += t;
    if (digits.empty())
        c.fail("empty value");
    const bool looks_float = digits.find_first_of(".eE") != std::string::npos;
    TomlValue v;
    if (!looks_float) {
        long long out = 0;
        const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), out);
        if (res.ec == std::errc{} && res.ptr == digits.data() + digits.size()) {
            v.kind = TomlValue::Kind::Integer;
            v.integer = out;
            return v;
        }
    }
    double out = 0.0;
    const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), out);
    if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size())
        c.fail("cannot parse value '" + token + "'");
    v.kind = TomlValue::Kind::Float;
    v.real = out;
    return v;
}

} // namespace

std::map<std::string, TomlValue> parse_toml(const std::string& text) {
    std::map<std::string, TomlValue> table;
    Cursor c{text};
    std::string prefix;
    while (true) {
        skip_ws_and_comments(c, false);
        if (c.done())
            break;
        if (c.peek() == '[') {
            c.take();
            prefix.clear();
            while (!c.done() && c.peek() != ']')
                prefix += c.take();
            if (c.done())
                c.fail("unterminated table header");
            c.take();
            continue;
        }
        const std::string key = parse_bare_key(c);
        c.skip_ws_inline();
        if (c.done() || c.peek() != '=')
            c.fail("expected '=' after key '" + key + "'");
        c.take();
        const TomlValue value = parse_value(c);
        const std::string full = prefix.empty() ? key : prefix + "." + key;
        if (table.count(full))
            c.fail("duplicate key '" + full + "'");
        table.emplace(full, value);
    }
    return table;
}

namespace {

class ConfigReader {
  public:
    explicit ConfigReader(std::map<std::string, TomlValue> table) : table_(std::move(table)) {}

    bool has(const std::string& key) {
        const auto it = table_.find(key);
        if (it == table_.end())
            return false;
        seen_.insert(key);
        return true;
    }
    const TomlValue& at(const std::string& key) {
        seen_.insert(key);
        return table_.at(key);
    }
    double number(const std::string& key, double fallback) {
        return has(key) ? at(key).as_number() : fallback;
    }
    std::string text(const std::string& key, const std::string& fallback) {
        if (!has(key))
            return fallback;
        const TomlValue& v = at(key);
        if (v.kind != TomlValue::Kind::String)
            throw std::invalid_argument("config: key '" + key + "' must be a string");
        return v.text;
    }
    std::vector<double> numbers(const std::string& key) {
        std::vector<double> out;
        const TomlValue& v = at(key);
        if (v.kind != TomlValue::Kind::Array)
            throw std::invalid_argument("config: key '" + key + "' must be an array");
        out.reserve(v.array.size());
        for (const TomlValue& e : v.array)
            out.push_back(e.as_number());
        return out;
    }
    std::vector<std::string> texts(const std::string& key) {
        std::vector<std::string> out;
        const TomlValue& v = at(key);
        if (v.kind != TomlValue::Kind::Array)
            throw std::invalid_argument("config: key '" + key + "' must be an array");
        for (const TomlValue& e : v.array) {
            if (e.kind != TomlValue::Kind::String)
                throw std::invalid_argument("config: key '" + key + "' must hold strings");
            out.push_back(e.text);
        }
        return out;
    }

    void reject_unknown() const {
        for (const auto& [key, value] : table_)
            if (!seen_.count(key))
                throw std::invalid_argument("config: unknown key '" + key + "'");
    }

  private:
    std::map<std::string, TomlValue> table_;
    std::set<std::string> seen_;
};

} // namespace

RunConfig apply_toml_text(const std::string& text, RunConfig base) {
    ConfigReader r(parse_toml(text));
    RunConfig cfg = std::move(base);

    cfg.system.n_bs = static_cast<unsigned>(r.number("system.n_bs", cfg.system.n_bs));
    cfg.system.k = static_cast<unsigned>(r.number("system.k", cfg.system.k));
    cfg.system.profile.carrier_freq_hz =
        r.number("system.carrier_freq_ghz", cfg.system.profile.carrier_freq_hz / 1e9) * 1e9;
    cfg.system.profile.coeff_variance =
        r.number("system.coeff_variance", cfg.system.profile.coeff_variance);
    cfg.system.budget.sigma_ul = r.number("system.sigma2_ul", cfg.system.budget.sigma_ul);
    cfg.system.budget.sigma_dl = r.number("system.sigma2_dl", cfg.system.budget.sigma_dl);
    cfg.system.budget.sigma_pilot =
        r.number("system.sigma2_pilot", cfg.system.budget.sigma_pilot);
    cfg.system.budget.p_max_ul = r.number("system.p_max_ul", cfg.system.budget.p_max_ul);
    cfg.system.budget.p_tot_dl = r.number("system.p_tot_dl", cfg.system.budget.p_tot_dl);

    if (r.has("channel.velocity_kmh"))
        cfg.system.profile.set_velocity_kmh(r.at("channel.velocity_kmh").as_number());
    if (r.has("channel.tau_max_us"))
        cfg.system.profile.max_delay_spread_s = r.at("channel.tau_max_us").as_number() * 1e-6;

    cfg.system.geometry.n_symbols =
        static_cast<unsigned>(r.number("geometry.n_symbols", cfg.system.geometry.n_symbols));
    cfg.system.geometry.n_subcarriers = static_cast<unsigned>(
        r.number("geometry.n_subcarriers", cfg.system.geometry.n_subcarriers));
    cfg.system.geometry.symbol_rate_hz =
        r.number("geometry.symbol_rate_hz", cfg.system.geometry.symbol_rate_hz);
    cfg.system.geometry.subcarrier_spacing_hz =
        r.number("geometry.subcarrier_spacing_hz", cfg.system.geometry.subcarrier_spacing_hz);

    cfg.system.fb.rank = static_cast<unsigned>(r.number("feedback.n_rank", cfg.system.fb.rank));
    cfg.system.fb.delay_ttis =
        static_cast<int>(r.number("feedback.delay_ttis", cfg.system.fb.delay_ttis));
    const std::string mode = r.text(
        "feedback.mode",
        cfg.system.fb.mode == feedback::FeedbackMode::Redundant ? "redundant" : "successive");
    if (mode == "redundant")
        cfg.system.fb.mode = feedback::FeedbackMode::Redundant;
    else if (mode == "successive")
        cfg.system.fb.mode = feedback::FeedbackMode::Successive;
    else
        throw std::invalid_argument("config: feedback.mode must be redundant or successive");

    const std::string reduction = r.text(
        "estimation.reduction",
        cfg.system.reduction == estimation::Reduction::Max ? "max" : "mean");
    if (reduction == "max")
        cfg.system.reduction = estimation::Reduction::Max;
    else if (reduction == "mean")
        cfg.system.reduction = estimation::Reduction::Mean;
    else
        throw std::invalid_argument("config: estimation.reduction must be max or mean");

    const std::string ul_csi =
        r.text("estimation.ul_csi", cfg.system.ul_cramer_rao ? "cramer-rao" : "mmse");
    if (ul_csi == "mmse")
        cfg.system.ul_cramer_rao = false;
    else if (ul_csi == "cramer-rao")
        cfg.system.ul_cramer_rao = true;
    else
        throw std::invalid_argument("config: estimation.ul_csi must be mmse or cramer-rao");

    if (r.has("sweep.n_b"))
        cfg.sweep.n_b_grid = r.numbers("sweep.n_b");
    cfg.sweep.realizations =
        static_cast<std::size_t>(r.number("sweep.realizations", cfg.sweep.realizations));
    if (r.has("sweep.catalog")) {
        cfg.sweep.catalog.clear();
        const TomlValue& arr = r.at("sweep.catalog");
        if (arr.kind != TomlValue::Kind::Array)
            throw std::invalid_argument("config: sweep.catalog must be an array of arrays");
        for (const TomlValue& entry : arr.array) {
            if (entry.kind != TomlValue::Kind::Array ||
                (entry.array.size() != 2 && entry.array.size() != 4))
                throw std::invalid_argument(
                    "config: sweep.catalog entries must be [dt, df] or [dt, df, ot, of]");
            PatternSpec spec;
            spec.dt = static_cast<unsigned>(entry.array[0].as_number());
            spec.df = static_cast<unsigned>(entry.array[1].as_number());
            if (entry.array.size() == 4) {
                spec.offset_t = static_cast<unsigned>(entry.array[2].as_number());
                spec.offset_f = static_cast<unsigned>(entry.array[3].as_number());
            }
            cfg.sweep.catalog.push_back(spec);
        }
    }
    if (r.has("sweep.ul_patterns"))
        cfg.sweep.ul_patterns = r.texts("sweep.ul_patterns");
    if (r.has("sweep.dl_patterns"))
        cfg.sweep.dl_patterns = r.texts("sweep.dl_patterns");

    if (r.has("lookup.v_kmh"))
        cfg.lookup.v_kmh = r.numbers("lookup.v_kmh");
    if (r.has("lookup.tau_max_us"))
        cfg.lookup.tau_us = r.numbers("lookup.tau_max_us");

    cfg.point.ul_pattern = r.text("point.ul_pattern", cfg.point.ul_pattern);
    cfg.point.dl_pattern = r.text("point.dl_pattern", cfg.point.dl_pattern);
    cfg.point.n_b = r.number("point.n_b", cfg.point.n_b);
    cfg.point.dl_mode = r.text("point.dl_mode", cfg.point.dl_mode);

    cfg.seed = static_cast<std::uint64_t>(r.number("seed", static_cast<double>(cfg.seed)));
    cfg.threads = static_cast<unsigned>(r.number("threads", cfg.threads));

    r.reject_unknown();
    cfg.system.validate();
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::invalid_argument("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return apply_toml_text(buf.str());
}

} // namespace csiregion::config
