#include "nvmag/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>

namespace nvmag {

namespace pt = boost::property_tree;

Params Params::parse_ini(std::istream& is) {
    Params p;
    try {
        pt::read_ini(is, p.tree_);
    } catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return p;
}

Params Params::parse_ini(std::string_view text) {
    std::istringstream is{std::string(text)};
    return parse_ini(is);
}

Params Params::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    return parse_ini(in);
}

std::string Params::to_ini() const {
    std::ostringstream os;
    pt::write_ini(os, tree_);
    return os.str();
}

bool Params::has(std::string_view key) const { return tree_.get_child_optional(std::string(key)).has_value(); }

void Params::set(std::string_view key, std::string value) {
    if (key.find('.') == std::string_view::npos) {
        throw std::invalid_argument("config: key must be section.key: " + std::string(key));
    }
    tree_.put(std::string(key), std::move(value));
}

void Params::set_assignment(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument("config: expected key=value");
    std::string key(assignment.substr(0, eq));
    std::string value(assignment.substr(eq + 1));
    boost::trim(key);
    boost::trim(value);
    set(key, value);
}

std::string Params::get_string(std::string_view key) const {
    auto v = tree_.get_optional<std::string>(std::string(key));
    if (!v) throw std::invalid_argument("config: missing key " + std::string(key));
    return boost::trim_copy(*v);
}

double Params::get_double(std::string_view key) const {
    const std::string s = get_string(key);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw std::invalid_argument("config: " + std::string(key) + " is not a number: " + s);
    }
    return v;
}

long long Params::get_int(std::string_view key) const {
    const std::string s = get_string(key);
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw std::invalid_argument("config: " + std::string(key) + " is not an integer: " + s);
    }
    return v;
}

bool Params::get_bool(std::string_view key) const {
    const std::string s = boost::to_lower_copy(get_string(key));
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw std::invalid_argument("config: " + std::string(key) + " is not a boolean: " + s);
}

std::vector<std::string> Params::get_strings(std::string_view key) const {
    std::vector<std::string> parts;
    const std::string s = get_string(key);
    if (s.empty()) return parts;
    boost::split(parts, s, boost::is_any_of(","));
    for (auto& p : parts) boost::trim(p);
    return parts;
}

std::vector<double> Params::get_doubles(std::string_view key) const {
    std::vector<double> out;
    for (const std::string& p : get_strings(key)) {
        char* end = nullptr;
        const double v = std::strtod(p.c_str(), &end);
        if (p.empty() || end != p.c_str() + p.size()) {
            throw std::invalid_argument("config: " + std::string(key) + " has a non-numeric entry: " + p);
        }
        out.push_back(v);
    }
    return out;
}

void Params::merge_known(const Params& overrides) {
    for (const auto& [section, body] : overrides.tree_) {
        if (body.empty()) throw std::invalid_argument("config: top-level key outside a section: " + section);
        for (const auto& [key, value] : body) {
            const std::string full = section + "." + key;
            if (!has(full)) throw std::invalid_argument("config: unknown key " + full);
            tree_.put(full, value.data());
        }
    }
}

std::vector<std::string> Params::keys() const {
    std::vector<std::string> out;
    for (const auto& [section, body] : tree_) {
        for (const auto& kv : body) out.push_back(section + "." + kv.first);
    }
    return out;
}

}  // namespace nvmag
