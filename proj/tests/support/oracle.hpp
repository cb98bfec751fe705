#pragma once

// Reference implementations used as test oracles. They work on plain strings
// and share nothing with the engine or planner beyond the parsed AST.

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "llmpddl/pddl/ast.hpp"

namespace oracle {

using Facts = std::set<std::string>;

inline std::string key(const std::string& pred, const std::vector<std::string>& args) {
  std::string s = "(" + pred;
  for (const auto& a : args) s += " " + a;
  return s + ")";
}

inline bool ancestor(const llmpddl::pddl::DomainModel& d, std::string sub, const std::string& super) {
  auto lower = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  std::string target = lower(super);
  if (target == "object") return true;
  for (int guard = 0; guard < 64; ++guard) {
    if (lower(sub) == target) return true;
    auto parent = d.types.parent(sub);
    if (!parent) return false;
    sub = *parent;
  }
  return false;
}

inline Facts initial(const llmpddl::pddl::ProblemSpec& p) {
  Facts s;
  for (const auto& a : p.init) s.insert(key(a.predicate, a.args));
  return s;
}

struct Step {
  bool applicable = false;
  bool invalid = false;
  Facts next;
};

inline Step step(const llmpddl::pddl::DomainModel& d, const llmpddl::pddl::ProblemSpec& p, const Facts& s,
                 const std::string& name, const std::vector<std::string>& args) {
  Step out;
  const llmpddl::pddl::ActionModel* act = nullptr;
  for (const auto& a : d.actions) {
    if (a.name == name) act = &a;
  }
  if (!act || act->params.size() != args.size()) {
    out.invalid = true;
    return out;
  }
  std::map<std::string, std::string> bind;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const llmpddl::pddl::TypedName* obj = nullptr;
    for (const auto& o : p.objects) {
      if (o.name == args[i]) obj = &o;
    }
    if (!obj || !ancestor(d, obj->type, act->params[i].type)) {
      out.invalid = true;
      return out;
    }
    bind[act->params[i].name] = args[i];
  }
  auto sub = [&](const std::vector<std::string>& xs) {
    std::vector<std::string> ys;
    for (const auto& x : xs) ys.push_back(bind.count(x) ? bind[x] : x);
    return ys;
  };
  for (const auto& l : act->precondition) {
    bool present = s.count(key(l.atom.predicate, sub(l.atom.args))) > 0;
    if (present != l.positive) return out;
  }
  for (const auto& e : act->constraints) {
    bool same = bind[e.lhs] == bind[e.rhs];
    if (same == e.negated) return out;
  }
  out.applicable = true;
  out.next = s;
  for (const auto& a : act->del_effects) out.next.erase(key(a.predicate, sub(a.args)));
  for (const auto& a : act->add_effects) out.next.insert(key(a.predicate, sub(a.args)));
  return out;
}

inline bool goal_holds(const llmpddl::pddl::ProblemSpec& p, const Facts& s) {
  for (const auto& l : p.goal) {
    if ((s.count(key(l.atom.predicate, l.atom.args)) > 0) != l.positive) return false;
  }
  return true;
}

struct Verdict {
  bool valid = false;
  std::size_t fail_step = 0;  // 1-based, plan size for goal failures
  std::string kind;           // "unmet-precondition" | "invalid-parameter" | "unmet-goal" | ""
  Facts final_state;
};

inline Verdict simulate(const llmpddl::pddl::DomainModel& d, const llmpddl::pddl::ProblemSpec& p,
                        const llmpddl::pddl::Plan& plan) {
  Verdict v;
  Facts s = initial(p);
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    Step r = step(d, p, s, plan.steps[i].action, plan.steps[i].args);
    if (r.invalid || !r.applicable) {
      v.fail_step = i + 1;
      v.kind = r.invalid ? "invalid-parameter" : "unmet-precondition";
      return v;
    }
    s = std::move(r.next);
  }
  v.final_state = s;
  if (!goal_holds(p, s)) {
    v.fail_step = plan.steps.size();
    v.kind = "unmet-goal";
    return v;
  }
  v.valid = true;
  return v;
}

// Every type- and constraint-consistent binding, as "(action a b)" strings.
inline std::set<std::string> all_bindings(const llmpddl::pddl::DomainModel& d, const llmpddl::pddl::ProblemSpec& p) {
  std::set<std::string> out;
  for (const auto& a : d.actions) {
    std::vector<std::string> args(a.params.size());
    std::vector<std::size_t> idx(a.params.size(), 0);
    std::size_t n = p.objects.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < a.params.size(); ++i) total *= n;
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t c = code;
      bool ok = true;
      std::map<std::string, std::string> bind;
      for (std::size_t i = 0; i < a.params.size(); ++i) {
        const auto& o = p.objects[c % n];
        c /= n;
        args[i] = o.name;
        bind[a.params[i].name] = o.name;
        ok = ok && ancestor(d, o.type, a.params[i].type);
      }
      for (const auto& e : a.constraints) ok = ok && ((bind[e.lhs] == bind[e.rhs]) != e.negated);
      if (ok) out.insert(key(a.name, args));
    }
  }
  return out;
}

// Shortest plan length by breadth-first search over brute-force successors.
inline std::optional<std::size_t> shortest_plan(const llmpddl::pddl::DomainModel& d,
                                                const llmpddl::pddl::ProblemSpec& p, std::size_t max_states = 200000) {
  std::vector<std::pair<std::string, std::vector<std::string>>> ground;
  for (const auto& a : d.actions) {
    std::size_t n = p.objects.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < a.params.size(); ++i) total *= n;
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t c = code;
      std::vector<std::string> args;
      for (std::size_t i = 0; i < a.params.size(); ++i) {
        args.push_back(p.objects[c % n].name);
        c /= n;
      }
      ground.emplace_back(a.name, args);
    }
  }
  std::map<Facts, std::size_t> dist;
  std::deque<Facts> queue;
  Facts init = initial(p);
  dist[init] = 0;
  queue.push_back(init);
  while (!queue.empty()) {
    Facts s = queue.front();
    queue.pop_front();
    std::size_t ds = dist[s];
    if (goal_holds(p, s)) return ds;
    for (const auto& [name, args] : ground) {
      Step r = step(d, p, s, name, args);
      if (!r.applicable) continue;
      if (dist.emplace(r.next, ds + 1).second) {
        if (dist.size() > max_states) return std::nullopt;
        queue.push_back(std::move(r.next));
      }
    }
  }
  return std::nullopt;
}

}  // namespace oracle
