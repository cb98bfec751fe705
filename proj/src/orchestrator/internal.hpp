#pragma once

#include <string>

#include "llmpddl/llm/conversation.hpp"

namespace llmpddl::orchestrator::detail {

// `base`, or `base-N` when the store already has a log with that id.
std::string fresh_id(const llm::ConversationStore* store, const std::string& base);

}  // namespace llmpddl::orchestrator::detail
