#pragma once

#include <iosfwd>
#include <string>

#include "config.hpp"
#include "lsep/io.hpp"

namespace lsep::cli {

// Each command computes everything in memory; the caller commits the files
// only after the command returns. Progress notes go to `log`.
io::OutputSet fit_permittivity(const Config& c, std::ostream& log);
io::OutputSet qabs_spectrum(const Config& c, std::ostream& log);
io::OutputSet nearfield(const Config& c, std::ostream& log);
io::OutputSet transient(const Config& c, std::ostream& log);
io::OutputSet extract_nk(const Config& c, std::ostream& log);
io::OutputSet lorentz_model(const Config& c, std::ostream& log);

}  // namespace lsep::cli
