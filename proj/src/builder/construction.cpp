#include "llmpddl/builder/construction.hpp"

#include <algorithm>
#include <set>

#include "llmpddl/pddl/action_block.hpp"

namespace llmpddl::builder {

ParseFailureAfterRetries::ParseFailureAfterRetries(std::string action, int attempts, const std::string& last_error)
    : std::runtime_error("no readable model for action '" + action + "' after " + std::to_string(attempts) +
                         " replies; last error: " + last_error),
      action_(std::move(action)) {}

std::string conversation_id(int pass, const std::string& action) {
  return "construct-p" + std::to_string(pass) + "-" + action;
}

bool is_auto_feedback(const audit::Finding& f) {
  switch (f.category) {
    case audit::Category::UnsupportedKeyword:
    case audit::Category::TypeNameClash:
    case audit::Category::PredicateNameClash:
    case audit::Category::InvalidObjectType:
      return true;
    case audit::Category::PredicateUsageMismatch:
      return f.item == "undefined";
    default:
      return false;
  }
}

MergeResult merge_predicates(const PredicateRegistry& reg, const std::vector<pddl::PredicateDef>& proposed,
                             const std::string& action, const pddl::TypeHierarchy& types,
                             const audit::Auditor& auditor) {
  MergeResult out{reg, {}};
  // Clash findings come from the auditor so their wording matches the
  // construction feedback; only the clash categories are relevant here.
  audit::ActionProposal probe;
  probe.model.name = action;
  probe.new_predicates = proposed;
  for (const auto& f : auditor.audit_action(probe, reg, types).findings) {
    if (f.category == audit::Category::TypeNameClash || f.category == audit::Category::PredicateNameClash) {
      out.collisions.push_back(f);
    }
  }
  std::set<std::string> taken;
  for (const auto& p : reg.entries()) taken.insert(p.name);
  for (const auto& t : types.types()) taken.insert(pddl::normalize_symbol(t));
  for (const auto& p : proposed) {
    if (!taken.insert(p.name).second) continue;
    out.registry.append(p, action);
  }
  return out;
}

ConstructionSession::ConstructionSession(workspace::ProjectConfig config, llm::Transport& transport,
                                         llm::TemplateSet templates, const llm::ConversationStore* store)
    : config_(std::move(config)),
      types_(config_.type_hierarchy()),
      transport_(transport),
      templates_(std::move(templates)),
      auditor_(templates_),
      store_(store) {}

std::string ConstructionSession::prompt(const workspace::ActionDescription& action,
                                        const PredicateRegistry& reg) const {
  std::string extra;
  if (!action.extra_info.empty()) extra = action.extra_info + "\n";
  return templates_.render("construct_action", {
                                                   {"instructions", templates_.get("construct_instructions").body()},
                                                   {"examples", templates_.get("blocksworld_examples").body()},
                                                   {"domain_description", config_.domain_description},
                                                   {"action_description", action.text},
                                                   {"extra_info", extra},
                                                   {"predicate_list", reg.render_for_prompt()},
                                               });
}

ConstructedAction ConstructionSession::construct_action(const workspace::ActionDescription& action,
                                                        const PredicateRegistry& reg, int pass) {
  ConstructedAction out;
  out.pass = pass;
  out.conversation_id = conversation_id(pass, pddl::normalize_symbol(action.name));
  llm::Conversation conv{out.conversation_id, {"construction", "pass-" + std::to_string(pass)}, {}};
  conv.add(llm::Role::User, prompt(action, reg), llm::utc_now());

  bool parsed = false;
  std::string last_error;
  for (int round = 0;; ++round) {
    const llm::Message& reply = llm::complete(conv, transport_);
    std::string feedback;
    try {
      auto block = pddl::parse_action_block(reply.content);
      audit::ActionProposal proposal{
          block.to_model(action.name, out.conversation_id + ":" + std::to_string(conv.messages.size() - 1)),
          block.new_predicates, block.unsupported};
      out.remaining = auditor_.audit_action(proposal, reg, types_);
      out.model = std::move(proposal.model);
      out.new_predicates = std::move(proposal.new_predicates);
      parsed = true;
      std::vector<audit::Finding> pending;
      std::copy_if(out.remaining.findings.begin(), out.remaining.findings.end(), std::back_inserter(pending),
                   is_auto_feedback);
      if (pending.empty()) break;
      feedback = auditor_.render_feedback(pending);
    } catch (const pddl::PddlError& e) {
      last_error = e.what();
      feedback = templates_.render("feedback_format_error", {{"error", last_error}});
    }
    if (round >= config_.syntax_rounds) break;
    conv.add(llm::Role::User, feedback, llm::utc_now());
    ++out.syntax_rounds;
  }
  if (store_) store_->persist(conv);
  conversations_[conv.id] = conv;
  if (!parsed) throw ParseFailureAfterRetries(action.name, out.syntax_rounds + 1, last_error);
  return out;
}

BuildResult ConstructionSession::build_domain() {
  BuildResult result;
  std::map<std::string, pddl::ActionModel> final_models;
  for (int pass = 1; pass <= 2; ++pass) {
    for (const auto& action : config_.actions) {
      ConstructedAction step = construct_action(action, result.registry, pass);
      MergeResult merged = merge_predicates(result.registry, step.new_predicates, step.model.name, types_, auditor_);
      result.registry = std::move(merged.registry);
      auto note = [&](const pddl::Atom& a) { result.registry.note_use(a.predicate, step.model.name); };
      for (const auto& l : step.model.precondition) note(l.atom);
      std::for_each(step.model.add_effects.begin(), step.model.add_effects.end(), note);
      std::for_each(step.model.del_effects.begin(), step.model.del_effects.end(), note);
      if (pass == 2) final_models[step.model.name] = step.model;
      result.history.push_back({std::move(step), result.registry});
    }
  }
  result.draft.name = pddl::normalize_symbol(config_.name);
  result.draft.types = types_;
  result.draft.predicates = result.registry.entries();
  for (const auto& action : config_.actions) {
    result.draft.actions.push_back(final_models.at(pddl::normalize_symbol(action.name)));
  }
  return result;
}

}  // namespace llmpddl::builder
