#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "lsep/errors.hpp"
#include "lsep/io.hpp"

namespace {

enum Exit { kOk = 0, kNumerical = 3, kUsage = 2, kInternal = 1 };

using Command = std::function<lsep::io::OutputSet(const lsep::cli::Config&, std::ostream&)>;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Light-matter simulations for exciton-polariton films and spheres"};
  app.require_subcommand(0, 1);
  bool dump = false;
  app.add_flag("--dump-defaults", dump, "print every configuration key with its default and exit");

  struct Sub {
    const char* name;
    const char* help;
    Command run;
    bool has_model;
  };
  const Sub subs[] = {
      {"fit-permittivity", "fit the two-level model to a permittivity table", lsep::cli::fit_permittivity, false},
      {"qabs-spectrum", "Mie absorption spectrum of the sphere", lsep::cli::qabs_spectrum, true},
      {"nearfield", "field enhancement map and Poynting streamlines", lsep::cli::nearfield, true},
      {"transient", "time-resolved absorption after the drive turns on", lsep::cli::transient, false},
      {"extract-nk", "complex index from film reflectance and transmittance", lsep::cli::extract_nk, false},
      {"lorentz", "Lorentz permittivity and its two-level equivalent", lsep::cli::lorentz_model, false},
  };

  std::string config_path, out_dir = "out", model;
  std::map<std::string, CLI::App*> apps;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("-c,--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out_dir, "output directory")->capture_default_str();
    if (s.has_model) sub->add_option("--model", model, "quantum, lorentz or data (overrides qabs.model)");
    apps[s.name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (dump) {
    std::cout << lsep::cli::Config::dump_defaults();
    return kOk;
  }

  const Sub* chosen = nullptr;
  for (const auto& s : subs)
    if (apps[s.name]->parsed()) chosen = &s;
  if (chosen == nullptr) {
    std::cerr << app.help();
    return kUsage;
  }

  try {
    auto config = config_path.empty() ? lsep::cli::Config::defaults() : lsep::cli::Config::load(config_path);
    if (!model.empty()) config.set("qabs.model", model);
    const auto outputs = chosen->run(config, std::cerr);
    outputs.commit(out_dir);
    for (const auto& [name, _] : outputs.files()) std::cerr << "wrote " << (std::filesystem::path(out_dir) / name).string() << "\n";
    return kOk;
  } catch (const lsep::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const lsep::io::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const lsep::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
}
