#pragma once

#include "roentgen/cli.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace roentgen::cli {

/// Collects the files of one run and their checksums.
class OutputSet {
public:
  explicit OutputSet(std::filesystem::path dir);

  void write_text(const std::string &name, const std::string &content);
  void write_json(const std::string &name, const nlohmann::json &value);
  void write_csv(const std::string &name, const std::vector<std::string> &header,
                 const std::vector<std::vector<std::string>> &rows);

  /// manifest.json: software, subcommand, config hash, seed, tolerance,
  /// resolved parameters and the checksum of every file written so far.
  void write_manifest(const ScenarioConfig &config, const std::string &subcommand,
                      const nlohmann::json &extra);

  const std::map<std::string, std::string> &checksums() const { return sums_; }

private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> sums_;
};

std::string version_string();

} // namespace roentgen::cli
