#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "steinbias/experiment.hpp"
#include "toml.hpp"

namespace steinbias::detail {

toml::table read_config_table(const std::filesystem::path& path);
std::vector<std::pair<toml::table, std::string>> experiment_tables(const std::filesystem::path& path);
ExperimentConfig parse_config_table(const toml::table& t, const std::string& where);
/// Sets root[a][b]...= value for key "a.b...", as an integer when whole.
void set_dotted(toml::table& root, const std::string& key, double value);

}  // namespace steinbias::detail
