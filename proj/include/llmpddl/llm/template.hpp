#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace llmpddl::llm {

class UnboundSlot : public std::runtime_error {
 public:
  explicit UnboundSlot(std::string slot);
  const std::string& slot() const { return slot_; }

 private:
  std::string slot_;
};

// A binding for a slot the template does not have, or a malformed
// placeholder in the template body.
class UnknownSlot : public std::runtime_error {
 public:
  explicit UnknownSlot(std::string slot);
  const std::string& slot() const { return slot_; }

 private:
  std::string slot_;
};

using Bindings = std::map<std::string, std::string>;

// Text with `{{slot}}` placeholders. Slot names are [a-z0-9_].
class PromptTemplate {
 public:
  PromptTemplate() = default;
  PromptTemplate(std::string id, std::string body);

  const std::string& id() const { return id_; }
  const std::string& body() const { return body_; }
  // Distinct slots in order of first appearance.
  const std::vector<std::string>& required_slots() const { return slots_; }

  // Substitutes every slot; bound values are inserted verbatim and never
  // rescanned.
  std::string render(const Bindings& bindings) const;

 private:
  std::string id_;
  std::string body_;
  std::vector<std::string> slots_;
};

// Built-in templates, optionally overridden by `<dir>/<id>.txt` files. An
// override must keep the slot set of the template it replaces.
class TemplateSet {
 public:
  TemplateSet();
  static TemplateSet load(const std::filesystem::path& override_dir);

  const PromptTemplate& get(const std::string& id) const;
  std::string render(const std::string& id, const Bindings& bindings) const { return get(id).render(bindings); }
  void set(PromptTemplate t);
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, PromptTemplate> templates_;
};

}  // namespace llmpddl::llm
