#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "llmpddl/pddl/ast.hpp"
#include "llmpddl/pddl/parser.hpp"

namespace testsupport {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::filesystem::path fixture_path(const std::string& rel) {
  return std::filesystem::path(LLMPDDL_FIXTURE_DIR) / rel;
}

inline std::string fixture(const std::string& rel) { return read_file(fixture_path(rel)); }

inline llmpddl::pddl::DomainModel domain(const std::string& name) {
  return llmpddl::pddl::parse_domain(fixture(name + "/domain.pddl"));
}

inline std::string golden(const std::string& name) {
  return read_file(std::filesystem::path(LLMPDDL_GOLDEN_DIR) / name);
}

// Blocksworld task: `towers` lists stacks bottom-up, `goal_on` pairs (x, y)
// meaning x on y.
inline llmpddl::pddl::ProblemSpec blocks_task(const std::vector<std::vector<std::string>>& towers,
                                              const std::vector<std::pair<std::string, std::string>>& goal_on,
                                              const std::vector<std::string>& goal_table = {}) {
  llmpddl::pddl::ProblemSpec p;
  p.name = "bw";
  p.domain = "blocksworld";
  for (const auto& tower : towers) {
    for (std::size_t i = 0; i < tower.size(); ++i) {
      p.objects.push_back({tower[i], "block"});
      if (i == 0) {
        p.init.push_back({"block-on-table", {tower[i]}});
      } else {
        p.init.push_back({"block-on", {tower[i], tower[i - 1]}});
      }
    }
    if (!tower.empty()) p.init.push_back({"block-clear", {tower.back()}});
  }
  p.init.push_back({"robot-hand-empty", {}});
  for (const auto& [x, y] : goal_on) p.goal.push_back({true, {"block-on", {x, y}}});
  for (const auto& x : goal_table) p.goal.push_back({true, {"block-on-table", {x}}});
  return p;
}

// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::path(LLMPDDL_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testsupport
