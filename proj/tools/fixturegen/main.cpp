// Regenerates the replay projects under fixtures/<domain>/project.
#include <iostream>

#include "CLI11.hpp"
#include "llmpddl/fixtures/fixtures.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Rebuild fixture replay projects"};
  std::string fixtures = "fixtures";
  std::vector<std::string> domains = {"logistics", "household", "tyreworld"};
  app.add_option("--fixtures", fixtures, "fixture root")->capture_default_str();
  app.add_option("domains", domains, "domains to rebuild");
  CLI11_PARSE(app, argc, argv);
  try {
    for (const auto& d : domains) {
      std::filesystem::path dir = std::filesystem::path(fixtures) / d;
      llmpddl::fixtures::build_project(dir, dir / "project");
      std::cout << "rebuilt " << (dir / "project").string() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
