#include "lsep/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lsep/units.hpp"

namespace lsep::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  return out;
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw InputError("missing column '" + name + "'");
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  Table t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    auto cells = split(s);
    if (t.columns.empty()) {
      t.columns = std::move(cells);
      continue;
    }
    if (cells.size() != t.columns.size())
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(t.columns.size()) + " fields");
    std::vector<double> row;
    for (const auto& c : cells) {
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || end != c.c_str() + c.size() || errno == ERANGE)
        throw InputError(path.string() + ":" + std::to_string(lineno) + ": not a number: '" + c + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.columns.empty()) throw InputError(path.string() + ": no header");
  return t;
}

medium::PermittivitySpectrum read_permittivity(const std::filesystem::path& path) {
  const Table t = read_table(path);
  const auto ie = t.column("energy_eV"), ir = t.column("eps_re"), ii = t.column("eps_im");
  medium::PermittivitySpectrum s;
  for (const auto& r : t.rows) {
    s.energies.push_back(r[ie]);
    s.epsilon.emplace_back(r[ir], r[ii]);
  }
  if (s.energies.empty()) throw InputError(path.string() + ": no data rows");
  return s;
}

std::vector<film::RTMeasurement> read_measurements(const std::filesystem::path& path) {
  const Table t = read_table(path);
  const auto iw = t.column("wavelength_nm"), ir = t.column("R"), it = t.column("T");
  std::vector<film::RTMeasurement> out;
  for (const auto& r : t.rows) out.push_back({r[iw] * 1e-9, r[ir], r[it]});
  if (out.empty()) throw InputError(path.string() + ": no data rows");
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string permittivity_csv(const medium::PermittivitySpectrum& spec) {
  std::string s = "energy_eV,eps_re,eps_im\n";
  for (std::size_t i = 0; i < spec.energies.size(); ++i)
    s += fmt(spec.energies[i]) + "," + fmt(spec.epsilon[i].real()) + "," + fmt(spec.epsilon[i].imag()) + "\n";
  return s;
}

std::string measurements_csv(std::span<const film::RTMeasurement> meas) {
  std::string s = "wavelength_nm,R,T\n";
  for (const auto& m : meas) s += fmt(m.wavelength * 1e9) + "," + fmt(m.reflectance) + "," + fmt(m.transmittance) + "\n";
  return s;
}

std::string spectrum_csv(std::span<const mie::QSpectrum> spectra) {
  const bool timed = !spectra.empty() && spectra.front().time.has_value();
  std::string s = timed ? "energy_eV,Q_ext,Q_sca,Q_abs,time_fs\n" : "energy_eV,Q_ext,Q_sca,Q_abs\n";
  for (const auto& q : spectra) {
    for (std::size_t i = 0; i < q.energies.size(); ++i) {
      s += fmt(q.energies[i]) + "," + fmt(q.q_ext[i]) + "," + fmt(q.q_sca[i]) + "," + fmt(q.q_abs[i]);
      if (timed) s += "," + fmt(q.time.value_or(0.0) / units::fs);
      s += "\n";
    }
  }
  return s;
}

std::string field_map_csv(std::span<const mie::FieldSample> samples) {
  std::string s = "x_nm,y_nm,z_nm,enhancement\n";
  for (const auto& f : samples)
    s += fmt(f.position[0] * 1e9) + "," + fmt(f.position[1] * 1e9) + "," + fmt(f.position[2] * 1e9) + "," +
         fmt(f.enhancement) + "\n";
  return s;
}

std::string to_string(film::Branch b) {
  switch (b) {
    case film::Branch::Physical:
      return "physical";
    case film::Branch::Spurious:
      return "spurious";
    case film::Branch::Unresolved:
      return "unresolved";
  }
  return "?";
}

std::string to_string(mie::Termination t) {
  switch (t) {
    case mie::Termination::LeftDomain:
      return "left_domain";
    case mie::Termination::EnteredSphereAndAbsorbed:
      return "absorbed";
    case mie::Termination::MaxSteps:
      return "max_steps";
  }
  return "?";
}

std::string streamlines_json(std::span<const mie::Streamline> lines) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& l : lines) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : l.points) pts.push_back({p[0] * 1e9, p[1] * 1e9, p[2] * 1e9});
    out.push_back({{"seed_nm", {l.seed[0] * 1e9, l.seed[1] * 1e9, l.seed[2] * 1e9}},
                   {"terminated", to_string(l.terminated)},
                   {"points_nm", std::move(pts)}});
  }
  return out.dump(1) + "\n";
}

std::string nk_csv(const film::BranchSelection& sel, std::span<const std::complex<double>> nk) {
  std::string s = "wavelength_nm,energy_eV,n,kappa,n_kk,branch,residual\n";
  for (std::size_t k = 0; k < sel.wavelengths.size(); ++k) {
    const double lam_nm = sel.wavelengths[k] * 1e9;
    s += fmt(lam_nm) + "," + fmt(units::wavelength_nm_to_ev(lam_nm)) + "," + fmt(sel.n[k]) + "," +
         fmt(sel.kappa[k]) + "," + fmt(nk[k].real()) + "," + (sel.interpolated[k] ? "interpolated" : "physical") + "," +
         fmt(sel.residual[k]) + "\n";
  }
  return s;
}

std::string candidates_csv(std::span<const film::NkCandidate> cands) {
  std::string s = "wavelength_nm,energy_eV,n,kappa,branch,residual,thickness_nm,reference_nm,kappa_extracted,rank\n";
  for (const auto& c : cands) {
    const double lam_nm = c.wavelength * 1e9;
    s += fmt(lam_nm) + "," + fmt(units::wavelength_nm_to_ev(lam_nm)) + "," + fmt(c.n) + "," + fmt(c.kappa) + "," +
         to_string(c.branch) + "," + fmt(c.residual) + "," + fmt(c.thickness_used * 1e9) + "," +
         fmt(c.thickness_reference * 1e9) + "," + fmt(c.kappa_extracted) + "," + std::to_string(c.rank) + "\n";
  }
  return s;
}

void OutputSet::add(const std::string& name, std::string contents) { files_[name] = std::move(contents); }

void OutputSet::commit(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto& [name, contents] : files_) {
    const auto final_path = dir / name;
    const auto tmp = dir / (name + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) throw InputError("cannot write " + tmp.string());
      out << contents;
      if (!out) throw InputError("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, final_path);
  }
}

}  // namespace lsep::io
