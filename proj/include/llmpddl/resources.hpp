#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace llmpddl::resources {

// Template files shipped in data/templates, embedded at build time.
const std::map<std::string, std::string, std::less<>>& builtin_templates();

// Throws std::out_of_range for unknown ids.
inline const std::string& builtin_template(std::string_view id) {
  const auto& all = builtin_templates();
  auto it = all.find(id);
  if (it == all.end()) throw std::out_of_range("no builtin template '" + std::string(id) + "'");
  return it->second;
}

}  // namespace llmpddl::resources
