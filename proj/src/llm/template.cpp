#include "llmpddl/llm/template.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "llmpddl/resources.hpp"

namespace llmpddl::llm {

UnboundSlot::UnboundSlot(std::string slot)
    : std::runtime_error("template slot '" + slot + "' is not bound"), slot_(std::move(slot)) {}

UnknownSlot::UnknownSlot(std::string slot)
    : std::runtime_error("unknown template slot '" + slot + "'"), slot_(std::move(slot)) {}

namespace {

bool slot_char(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'; }

struct Piece {
  bool slot;
  std::string text;
};

std::vector<Piece> split(const std::string& body) {
  std::vector<Piece> out;
  std::size_t at = 0;
  while (at < body.size()) {
    std::size_t open = body.find("{{", at);
    if (open == std::string::npos) {
      out.push_back({false, body.substr(at)});
      break;
    }
    std::size_t close = body.find("}}", open + 2);
    if (close == std::string::npos) throw UnknownSlot(body.substr(open, std::min<std::size_t>(20, body.size() - open)));
    std::string name = body.substr(open + 2, close - open - 2);
    if (name.empty() || !std::all_of(name.begin(), name.end(), slot_char)) throw UnknownSlot(name);
    if (open > at) out.push_back({false, body.substr(at, open - at)});
    out.push_back({true, name});
    at = close + 2;
  }
  return out;
}

}  // namespace

PromptTemplate::PromptTemplate(std::string id, std::string body) : id_(std::move(id)), body_(std::move(body)) {
  for (const auto& piece : split(body_)) {
    if (piece.slot && std::find(slots_.begin(), slots_.end(), piece.text) == slots_.end()) {
      slots_.push_back(piece.text);
    }
  }
}

std::string PromptTemplate::render(const Bindings& bindings) const {
  for (const auto& [name, value] : bindings) {
    if (std::find(slots_.begin(), slots_.end(), name) == slots_.end()) throw UnknownSlot(name);
  }
  std::string out;
  for (const auto& piece : split(body_)) {
    if (!piece.slot) {
      out += piece.text;
      continue;
    }
    auto it = bindings.find(piece.text);
    if (it == bindings.end()) throw UnboundSlot(piece.text);
    out += it->second;
  }
  return out;
}

TemplateSet::TemplateSet() {
  for (const auto& [id, body] : resources::builtin_templates()) templates_[id] = PromptTemplate(id, body);
}

TemplateSet TemplateSet::load(const std::filesystem::path& override_dir) {
  TemplateSet set;
  if (!std::filesystem::is_directory(override_dir)) return set;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(override_dir)) {
    if (entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::stringstream ss;
    ss << std::ifstream(path).rdbuf();
    PromptTemplate t(path.stem().string(), ss.str());
    auto it = set.templates_.find(t.id());
    if (it != set.templates_.end()) {
      auto want = it->second.required_slots();
      auto got = t.required_slots();
      std::sort(want.begin(), want.end());
      std::sort(got.begin(), got.end());
      if (want != got) {
        throw std::runtime_error("template override " + path.string() + " must use the slots of the built-in '" +
                                 t.id() + "'");
      }
    }
    set.set(std::move(t));
  }
  return set;
}

const PromptTemplate& TemplateSet::get(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw std::out_of_range("no template '" + id + "'");
  return it->second;
}

void TemplateSet::set(PromptTemplate t) {
  std::string id = t.id();
  templates_[id] = std::move(t);
}

std::vector<std::string> TemplateSet::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, t] : templates_) out.push_back(id);
  return out;
}

}  // namespace llmpddl::llm
