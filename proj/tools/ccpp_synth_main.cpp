// Writes a synthetic power-plant table with the UCI CCPP schema
// (AT,V,AP,RH,PE) for offline runs and tests.
#include <cstdint>
#include <iostream>

#include "CLI11.hpp"
#include "infoteacher/ccpp.hpp"
#include "infoteacher/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic combined-cycle power plant dataset generator"};
  std::string out = "ccpp.csv";
  int rows = 9568;
  std::uint64_t seed = 1;
  app.add_option("--out", out, "Output CSV path");
  app.add_option("--rows", rows, "Number of records");
  app.add_option("--seed", seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 1;
  }

  try {
    infoteacher::data::write_ccpp_surrogate(out, rows, seed);
    std::cerr << "wrote " << out << " (" << rows << " rows)\n";
  } catch (const infoteacher::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
