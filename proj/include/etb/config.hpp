#ifndef ETB_CONFIG_HPP
#define ETB_CONFIG_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "etb/sim.hpp"

namespace etb {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    Scenario scenario;
    std::filesystem::path out_dir = "out";
    bool plots = true;
    /// Controllers for `run` / `compare`; defaults to the scenario controller alone.
    std::vector<ControllerKind> controllers;
};

/// Parses `key = value` lines. `[section]` prefixes following keys with `section.`.
/// Numbers accept fractions such as `1/60`. Empty input gives the defaults with one agent at the region centroid.
RunConfig parse_config_text(const std::string &text);
RunConfig parse_config(const std::filesystem::path &path);

/// Comma separated controller names.
std::vector<ControllerKind> parse_controller_list(const std::string &list);

}  // namespace etb

#endif  // ETB_CONFIG_HPP
