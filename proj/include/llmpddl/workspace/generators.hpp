#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "llmpddl/pddl/ast.hpp"
#include "llmpddl/workspace/project.hpp"

namespace llmpddl::workspace {

// Parameterized task generators for the fixture domains. Task k of a suite
// is drawn from its own stream seeded with (seed, k), so suites extend
// without changing earlier tasks.

struct LogisticsParams {
  int max_cities = 3;
  int max_packages = 6;
};

std::vector<Task> logistics_tasks(std::uint32_t seed, int count, const LogisticsParams& params = {});
std::vector<Task> household_tasks(std::uint32_t seed, int count);
std::vector<Task> tyreworld_tasks(std::uint32_t seed, int count);

// Dispatches on the domain name; throws std::invalid_argument otherwise.
std::vector<Task> generate_tasks(const std::string& domain, std::uint32_t seed, int count);

}  // namespace llmpddl::workspace
