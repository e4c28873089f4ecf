#include "output.hpp"

#include "roentgen/errors.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#ifndef ROENTGEN_VERSION
#define ROENTGEN_VERSION "0.0.0"
#endif

namespace roentgen::cli {

using nlohmann::json;

std::string version_string() { return ROENTGEN_VERSION; }

std::string format_number(double value) {
  if (std::isnan(value))
    return "nan";
  if (std::isinf(value))
    return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", value);
  return buf;
}

std::string sha256_hex(const std::string &bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw std::runtime_error("sha256 failed");
  static const char *hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

OutputSet::OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec)
    throw ConfigError("output: cannot create " + dir_.string() + ": " + ec.message());
}

void OutputSet::write_text(const std::string &name, const std::string &content) {
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out)
    throw ConfigError("output: cannot write " + path.string());
  sums_[name] = sha256_hex(content);
}

void OutputSet::write_json(const std::string &name, const json &value) {
  write_text(name, value.dump(2) + "\n");
}

void OutputSet::write_csv(const std::string &name, const std::vector<std::string> &header,
                          const std::vector<std::vector<std::string>> &rows) {
  std::string text;
  const auto line = [&text](const std::vector<std::string> &cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i)
        text += ',';
      text += cells[i];
    }
    text += '\n';
  };
  line(header);
  for (const auto &r : rows)
    line(r);
  write_text(name, text);
}

void OutputSet::write_manifest(const ScenarioConfig &config, const std::string &subcommand,
                               const json &extra) {
  json m;
  m["software"] = {{"name", "roentgen-emit"}, {"version", version_string()}};
  m["subcommand"] = subcommand;
  m["config_sha256"] = sha256_hex(config.source_text);
  m["seed"] = config.seed;
  m["tolerance"] = config.tolerance;
  const auto norm = normalization(config.scenario.params, config.physical);
  m["dimensionless"] = {{"epsilon", config.scenario.params.epsilon},
                        {"gamma_tilde", config.scenario.params.gamma_tilde},
                        {"kappa", norm.kappa}};
  if (config.physical) {
    const auto &p = *config.physical;
    json phys = {{"omega0", p.omega0}, {"gamma0", p.gamma0}, {"infinite_mass", p.infinite_mass}};
    if (!p.infinite_mass)
      phys["mass"] = p.mass;
    if (p.dipole_moment)
      phys["dipole_moment"] = *p.dipole_moment;
    if (norm.physical_prefactor)
      phys["probability_prefactor"] = *norm.physical_prefactor;
    if (norm.wigner_weisskopf_gamma0)
      phys["wigner_weisskopf_gamma0"] = *norm.wigner_weisskopf_gamma0;
    m["physical"] = phys;
  }
  m["coupling"] = config.scenario.coupling.describe();
  m["distribution"] = config.scenario.distribution.kind_name();
  m["direction"] = {config.direction[0], config.direction[1], config.direction[2]};
  m["dipole"] = {config.scenario.dipole[0], config.scenario.dipole[1], config.scenario.dipole[2]};
  m["units"] = "spectra and probabilities in kappa = 3 gamma_tilde / (16 pi^2) units per steradian; "
               "rates normalized to 1 for the rest atom at infinite mass perpendicular to the dipole";
  if (!config.warnings.empty())
    m["warnings"] = config.warnings;
  for (const auto &item : extra.items())
    m[item.key()] = item.value();
  m["outputs"] = sums_;

  const std::string text = m.dump(2) + "\n";
  const auto path = dir_ / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out)
    throw ConfigError("output: cannot write " + path.string());
}

} // namespace roentgen::cli
