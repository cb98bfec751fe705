#pragma once

#include <filesystem>
#include <string>

namespace llmpddl::fixtures {

// Builds the replay project for a fixture domain from
// <fixture_dir>/domain.pddl and <fixture_dir>/descriptions.json into
// `out` (replaced). Construction, goal translation, correction and
// LLM-planner exchanges are scripted from the reference domain and
// recorded as cassettes, so the project replays without a live model.
//
// Throws std::runtime_error when a recorded run does not come out as
// scripted (for instance a construction that differs from the reference).
void build_project(const std::filesystem::path& fixture_dir, const std::filesystem::path& out);

}  // namespace llmpddl::fixtures
