#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lsep/effective_medium.hpp"
#include "lsep/film.hpp"

namespace lsep::cli {

// Sectioned key = value configuration ("[section]" headers, '#' or ';'
// comment lines). Every key has a documented default; unknown keys are rejected.
class Config {
 public:
  static Config defaults();
  // Reads `path` over the defaults. Relative paths inside it resolve against its directory.
  static Config load(const std::filesystem::path& path);
  static std::string dump_defaults();

  void set(const std::string& key, const std::string& value);  // key is "section.name"

  std::string text(const std::string& key) const;
  double number(const std::string& key) const;
  double positive(const std::string& key) const;
  double non_negative(const std::string& key) const;
  std::size_t count(const std::string& key, std::size_t min = 1) const;
  std::vector<double> list(const std::string& key) const;
  std::filesystem::path path(const std::string& key) const;  // required, must exist

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_;
};

// Physical parameter blocks assembled from a Config and validated here, so
// that every error names the offending key.
medium::MaterialParams material(const Config& c);
medium::LorentzParams lorentz(const Config& c);
std::vector<double> energy_grid(const Config& c);
double drive_amplitude(const Config& c);  // V/m
film::ExtractOptions extract_options(const Config& c);
film::BranchOptions branch_options(const Config& c);

}  // namespace lsep::cli
