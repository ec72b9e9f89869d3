#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ptree.hpp>

namespace nvmag {

/// Flat key-value configuration with one INI section per module, addressed as "section.key".
class Params {
public:
    Params() = default;

    static Params parse_ini(std::istream& is);
    static Params parse_ini(std::string_view text);
    static Params load(const std::string& path);
    std::string to_ini() const;

    bool has(std::string_view key) const;
    void set(std::string_view key, std::string value);
    /// "section.key=value".
    void set_assignment(std::string_view assignment);

    std::string get_string(std::string_view key) const;
    double get_double(std::string_view key) const;  ///< accepts inf / nan
    long long get_int(std::string_view key) const;
    bool get_bool(std::string_view key) const;
    /// Comma-separated list of doubles.
    std::vector<double> get_doubles(std::string_view key) const;
    /// Comma-separated list of strings.
    std::vector<std::string> get_strings(std::string_view key) const;

    /// Every value of `overrides` replaces the value here; keys unknown to *this are rejected.
    void merge_known(const Params& overrides);

    std::vector<std::string> keys() const;
    const boost::property_tree::ptree& tree() const { return tree_; }

    friend bool operator==(const Params& a, const Params& b) { return a.tree_ == b.tree_; }

private:
    boost::property_tree::ptree tree_;
};

}  // namespace nvmag
