#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lsep/effective_medium.hpp"
#include "lsep/film.hpp"
#include "lsep/mie.hpp"

namespace lsep::io {

// Raised for unreadable or malformed input files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numeric CSV with a header row. Blank lines and lines starting with '#' are skipped.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;  // throws InputError when absent
};

Table read_table(const std::filesystem::path& path);

// energy_eV,eps_re,eps_im
medium::PermittivitySpectrum read_permittivity(const std::filesystem::path& path);
// wavelength_nm,R,T
std::vector<film::RTMeasurement> read_measurements(const std::filesystem::path& path);

// Shortest round-trip decimal form (17 significant digits).
std::string fmt(double v);

std::string permittivity_csv(const medium::PermittivitySpectrum& spec);
std::string measurements_csv(std::span<const film::RTMeasurement> meas);
std::string spectrum_csv(std::span<const mie::QSpectrum> spectra);
std::string field_map_csv(std::span<const mie::FieldSample> samples);
std::string streamlines_json(std::span<const mie::Streamline> lines);
// n and kappa from the selected branch; n_kk is Re of the Kramers-Kronig closed `nk`.
std::string nk_csv(const film::BranchSelection& sel, std::span<const std::complex<double>> nk);
std::string candidates_csv(std::span<const film::NkCandidate> cands);

std::string to_string(film::Branch b);
std::string to_string(mie::Termination t);

// Files collected in memory and written together once a command has succeeded.
class OutputSet {
 public:
  void add(const std::string& name, std::string contents);
  const std::map<std::string, std::string>& files() const { return files_; }
  // Each file goes to a temporary name first and is then renamed into place.
  void commit(const std::filesystem::path& dir) const;

 private:
  std::map<std::string, std::string> files_;
};

}  // namespace lsep::io
