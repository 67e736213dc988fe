#include <algorithm>
#include <fstream>
#include <sstream>

#include "randmoll/errors.hpp"
#include "randmoll/experiment.hpp"
#include "randmoll/report.hpp"

namespace randmoll {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "no") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

double parse_num(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (...) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");

        if (key == "experiment") cfg.experiment = val;
        else if (key == "name") cfg.name = val;
        else if (key == "profile") cfg.profile = val;
        else if (key == "profile.normalize") cfg.profile_normalize = parse_bool(val, key);
        else if (key.rfind("profile.", 0) == 0) cfg.profile_params[key.substr(8)] = parse_num(val, key);
        else if (key == "family") cfg.family = val;
        else if (key.rfind("family.", 0) == 0) cfg.family_params[key.substr(7)] = parse_num(val, key);
        else if (key == "function") cfg.function = val;
        else if (key.rfind("function.", 0) == 0) cfg.function_params[key.substr(9)] = parse_num(val, key);
        else if (key == "dim") cfg.dimension = static_cast<int>(parse_num(val, key));
        else if (key == "box") {
            std::istringstream bs(val);
            if (!(bs >> cfg.box_lo >> cfg.box_hi) || !(cfg.box_hi > cfg.box_lo))
                throw ConfigError("config key 'box': expected two numbers lo hi");
        } else if (key == "resolution") cfg.resolution = static_cast<int>(parse_num(val, key));
        else if (key == "J") cfg.horizon = static_cast<int>(parse_num(val, key));
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_num(val, key));
        else if (key == "path") {
            if (val != "direct" && val != "fft" && val != "monte-carlo")
                throw ConfigError("config key 'path': direct | fft | monte-carlo");
            cfg.path = val;
        } else if (key == "svg") cfg.svg = parse_bool(val, key);
        else if (key == "allow_bounded_control") cfg.allow_bounded_control = parse_bool(val, key);
        else throw ConfigError("unknown config key '" + key + "'");
    }
    if (cfg.dimension < 1) throw ConfigError("config: dim must be >= 1");
    if (cfg.resolution < 2) throw ConfigError("config: resolution must be >= 2");
    if (cfg.horizon < 1) throw ConfigError("config: J must be >= 1");
    return cfg;
}

ExperimentConfig load_config(const std::string& file_path) {
    std::ifstream is(file_path);
    if (!is) throw ConfigError("cannot open config file " + file_path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str());
}

std::string canonical_text(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "experiment=" << cfg.experiment << '\n';
    os << "name=" << cfg.name << '\n';
    os << "profile=" << cfg.profile << '\n';
    os << "profile.normalize=" << cfg.profile_normalize << '\n';
    for (const auto& [k, v] : cfg.profile_params)
        os << "profile." << k << '=' << format_double(v) << '\n';
    os << "family=" << cfg.family << '\n';
    for (const auto& [k, v] : cfg.family_params)
        os << "family." << k << '=' << format_double(v) << '\n';
    os << "function=" << cfg.function << '\n';
    for (const auto& [k, v] : cfg.function_params)
        os << "function." << k << '=' << format_double(v) << '\n';
    os << "dim=" << cfg.dimension << '\n';
    os << "box=" << format_double(cfg.box_lo) << ' ' << format_double(cfg.box_hi) << '\n';
    os << "resolution=" << cfg.resolution << '\n';
    os << "J=" << cfg.horizon << '\n';
    os << "seed=" << cfg.seed << '\n';
    os << "path=" << cfg.path << '\n';
    os << "svg=" << cfg.svg << '\n';
    os << "allow_bounded_control=" << cfg.allow_bounded_control << '\n';
    return os.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    std::string text = canonical_text(cfg);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) h = (h ^ c) * 1099511628211ull;
    return h;
}

}  // namespace randmoll
