#pragma once

#include <memory>

#include "llmpddl/llm/transport.hpp"
#include "llmpddl/workspace/project.hpp"

namespace llmpddl::workspace {

// The transport named by the project config. Cassette paths are relative
// to the project root.
//   scripted: the responses of the cassettes, in file order
//   replay:   responses looked up by prompt digest
//   record:   live calls, appended to the first cassette
//   live:     live calls only
std::unique_ptr<llm::Transport> make_transport(const Project& project);

}  // namespace llmpddl::workspace
