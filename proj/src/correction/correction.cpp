#include "llmpddl/correction/correction.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "llmpddl/builder/construction.hpp"
#include "llmpddl/pddl/action_block.hpp"
#include "llmpddl/pddl/printer.hpp"

namespace llmpddl::correction {

using nlohmann::json;

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::set<std::string> messages_of(const audit::AuditReport& r) {
  std::set<std::string> out;
  for (const auto& f : r.findings) out.insert(f.message);
  return out;
}

}  // namespace

std::string to_string(Source s) {
  switch (s) {
    case Source::Auditor:
      return "auditor";
    case Source::Human:
      return "human";
    case Source::PlanValidation:
      return "plan-validation";
  }
  return "human";
}

Source parse_source(const std::string& s) {
  if (s == "auditor") return Source::Auditor;
  if (s == "human") return Source::Human;
  if (s == "plan-validation") return Source::PlanValidation;
  throw std::invalid_argument("unknown feedback source '" + s + "'");
}

LineDiff diff_lines(const std::string& before, const std::string& after) {
  auto a = split_lines(before);
  auto b = split_lines(after);
  std::vector<std::vector<int>> lcs(a.size() + 1, std::vector<int>(b.size() + 1, 0));
  for (std::size_t i = a.size(); i-- > 0;) {
    for (std::size_t j = b.size(); j-- > 0;) {
      lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    }
  }
  LineDiff d;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++i;
      ++j;
    } else if (lcs[i + 1][j] >= lcs[i][j + 1]) {
      d.removed.push_back(a[i++]);
    } else {
      d.added.push_back(b[j++]);
    }
  }
  while (i < a.size()) d.removed.push_back(a[i++]);
  while (j < b.size()) d.added.push_back(b[j++]);
  return d;
}

FeedbackLedger feedback_ledger(const std::vector<FeedbackEvent>& events) {
  FeedbackLedger l;
  std::map<std::pair<std::string, std::string>, bool> last_resolved;
  std::map<std::string, bool> issue_resolved;
  for (const auto& e : events) {
    auto& counts = l.per_action[e.action];
    switch (e.source) {
      case Source::Auditor:
        ++counts.auditor;
        break;
      case Source::Human:
        ++counts.human;
        ++l.total_human_messages;
        break;
      case Source::PlanValidation:
        ++counts.plan_validation;
        break;
    }
    auto key = std::make_pair(e.action, e.issue);
    if (auto it = last_resolved.find(key); it != last_resolved.end() && !it->second) ++l.extra_rounds;
    last_resolved[key] = e.resolved;
    issue_resolved[e.action + "\n" + e.issue] = e.resolved;
  }
  l.errors_resolved = static_cast<int>(
      std::count_if(issue_resolved.begin(), issue_resolved.end(), [](const auto& kv) { return kv.second; }));
  return l;
}

json to_json(const LineDiff& d) { return {{"removed", d.removed}, {"added", d.added}}; }

json to_json(const ModelRevision& r) {
  json preds = json::array();
  for (const auto& p : r.new_predicates) preds.push_back({{"signature", pddl::signature(p)}, {"description", p.description}});
  return {{"index", r.index},
          {"action", r.action},
          {"before", pddl::print_action(r.before)},
          {"after", pddl::print_action(r.after)},
          {"diff", to_json(r.diff)},
          {"new_predicates", preds},
          {"audit", audit::to_json(r.audit)},
          {"introduced_new_errors", r.introduced_new_errors}};
}

json to_json(const FeedbackEvent& e) {
  return {{"index", e.index},
          {"source", to_string(e.source)},
          {"action", e.action},
          {"text", e.text},
          {"issue", e.issue},
          {"resolved", e.resolved},
          {"revision", e.revision},
          {"introduced_new_errors", e.introduced_new_errors}};
}

FeedbackEvent event_from_json(const json& j) {
  FeedbackEvent e;
  e.index = j.at("index").get<int>();
  e.source = parse_source(j.at("source").get<std::string>());
  e.action = j.at("action").get<std::string>();
  e.text = j.at("text").get<std::string>();
  e.issue = j.value("issue", "");
  e.resolved = j.value("resolved", true);
  e.revision = j.value("revision", -1);
  e.introduced_new_errors = j.value("introduced_new_errors", false);
  return e;
}

json to_json(const FeedbackLedger& l) {
  json per = json::object();
  for (const auto& [action, c] : l.per_action) {
    per[action] = {{"auditor", c.auditor}, {"human", c.human}, {"plan_validation", c.plan_validation}};
  }
  return {{"per_action", per},
          {"total_human_messages", l.total_human_messages},
          {"errors_resolved", l.errors_resolved},
          {"extra_rounds", l.extra_rounds}};
}

CorrectionSession::CorrectionSession(pddl::DomainModel domain, builder::PredicateRegistry registry,
                                     std::map<std::string, llm::Conversation> conversations,
                                     llm::Transport& transport, llm::TemplateSet templates,
                                     const llm::ConversationStore* store, int syntax_rounds)
    : domain_(std::move(domain)),
      registry_(std::move(registry)),
      conversations_(std::move(conversations)),
      transport_(transport),
      templates_(std::move(templates)),
      auditor_(templates_),
      store_(store),
      syntax_rounds_(syntax_rounds) {}

std::string CorrectionSession::conversation_for(const pddl::ActionModel& model) const {
  std::string id = model.provenance.substr(0, model.provenance.rfind(':'));
  if (id.empty() || !conversations_.count(id)) {
    throw std::logic_error("action '" + model.name + "' has no construction dialogue to continue");
  }
  return id;
}

audit::AuditReport CorrectionSession::audit(const std::string& action) const {
  const pddl::ActionModel* model = domain_.find_action(action);
  if (!model) throw std::out_of_range("unknown action '" + action + "'");
  return auditor_.audit_action(*model, registry_, domain_.types);
}

std::string CorrectionSession::render_nl(const std::string& action) const {
  const pddl::ActionModel* model = domain_.find_action(action);
  if (!model) throw std::out_of_range("unknown action '" + action + "'");
  return render_model_nl(*model, registry_);
}

FeedbackRequest CorrectionSession::auditor_feedback(const std::string& action) const {
  auto report = audit(action);
  FeedbackRequest r;
  r.source = Source::Auditor;
  r.text = auditor_.render_feedback(report);
  std::string key = "audit";
  for (const auto& f : report.findings) key += "|" + audit::to_string(f.category) + ":" + f.locus.snippet;
  r.issue = key;
  return r;
}

ModelRevision CorrectionSession::apply_feedback(const std::string& action, const FeedbackRequest& request) {
  if (request.text.empty()) throw std::invalid_argument("feedback text must not be empty");
  pddl::ActionModel* model = domain_.find_action(action);
  if (!model) throw std::out_of_range("unknown action '" + action + "'");
  const std::string conv_id = conversation_for(*model);
  llm::Conversation& conv = conversations_.at(conv_id);
  const audit::AuditReport before_audit = auditor_.audit_action(*model, registry_, domain_.types);

  conv.add(llm::Role::User, request.text, llm::utc_now());
  std::optional<pddl::ActionBlock> block;
  std::size_t reply_index = 0;
  std::string last_error;
  int rounds = 0;
  for (;;) {
    const llm::Message& reply = llm::complete(conv, transport_);
    try {
      block = pddl::parse_action_block(reply.content);
      reply_index = conv.messages.size() - 1;
      break;
    } catch (const pddl::PddlError& e) {
      last_error = e.what();
    }
    if (rounds >= syntax_rounds_) break;
    conv.add(llm::Role::User, templates_.render("feedback_format_error", {{"error", last_error}}), llm::utc_now());
    ++rounds;
  }
  if (store_) store_->persist(conv);
  if (!block) throw builder::ParseFailureAfterRetries(action, rounds + 1, last_error);

  ModelRevision rev;
  rev.index = static_cast<int>(revisions_.size());
  rev.action = action;
  rev.before = *model;
  rev.after = block->to_model(action, conv_id + ":" + std::to_string(reply_index));
  rev.new_predicates = block->new_predicates;
  rev.audit = auditor_.audit_action(audit::ActionProposal{rev.after, block->new_predicates, block->unsupported},
                                    registry_, domain_.types);
  // Provenance changes with every revision; the diff is about the model.
  auto bare = [](pddl::ActionModel m) {
    m.provenance.clear();
    return pddl::print_action(m);
  };
  rev.diff = diff_lines(bare(rev.before), bare(rev.after));
  auto old_messages = messages_of(before_audit);
  rev.introduced_new_errors = std::any_of(rev.audit.findings.begin(), rev.audit.findings.end(),
                                          [&](const audit::Finding& f) { return !old_messages.count(f.message); });

  auto merged = builder::merge_predicates(registry_, block->new_predicates, action, domain_.types, auditor_);
  registry_ = std::move(merged.registry);
  domain_.predicates = registry_.entries();
  *model = rev.after;

  FeedbackEvent e;
  e.index = static_cast<int>(events_.size());
  e.source = request.source;
  e.action = action;
  e.text = request.text;
  e.issue = request.issue.empty() ? "event-" + std::to_string(e.index) : request.issue;
  if (request.source == Source::Auditor) {
    auto now = messages_of(rev.audit);
    e.resolved = std::none_of(old_messages.begin(), old_messages.end(),
                              [&](const std::string& m) { return now.count(m) > 0; });
  } else {
    e.resolved = request.resolved;
  }
  e.revision = rev.index;
  e.introduced_new_errors = rev.introduced_new_errors;
  events_.push_back(e);
  revisions_.push_back(rev);
  return rev;
}

}  // namespace llmpddl::correction
