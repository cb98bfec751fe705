#include <algorithm>
#include <map>
#include <set>

#include "llmpddl/pddl/errors.hpp"
#include "llmpddl/planner/planner.hpp"

namespace llmpddl::planner {

GroundingExplosion::GroundingExplosion(std::size_t cap)
    : std::runtime_error("grounding produced more than " + std::to_string(cap) + " actions") {}

namespace {

std::string fact_key(const pddl::Atom& atom, bool negated) {
  std::string key = negated ? "-" : "+";
  key += atom.predicate;
  for (const auto& a : atom.args) {
    key += ' ';
    key += a;
  }
  return key;
}

// A lifted atom with arguments resolved to parameter positions.
struct Template {
  std::string predicate;
  std::vector<int> slots;
};

struct Builder {
  GroundTask& task;

  int intern(const pddl::Atom& atom, bool negated = false) {
    auto [it, inserted] = task.index.emplace(fact_key(atom, negated), static_cast<int>(task.facts.size()));
    if (inserted) {
      task.facts.push_back(atom);
      task.complement.push_back(negated);
    }
    return it->second;
  }

  int intern(const Template& t, const std::vector<std::string>& binding, bool negated = false) {
    pddl::Atom atom{t.predicate, {}};
    atom.args.reserve(t.slots.size());
    for (int s : t.slots) atom.args.push_back(binding[s]);
    return intern(atom, negated);
  }
};

struct LiftedAction {
  const pddl::ActionModel* model;
  std::vector<Template> pos_pre, neg_pre, add, del;
  std::vector<std::pair<int, int>> differ, equal;
};

Template make_template(const pddl::ActionModel& action, const pddl::Atom& atom) {
  Template t{atom.predicate, {}};
  for (const auto& arg : atom.args) {
    auto it = std::find_if(action.params.begin(), action.params.end(),
                           [&](const pddl::TypedName& p) { return p.name == arg; });
    if (it == action.params.end()) throw pddl::ModelError("undeclared variable " + arg + " in " + action.name);
    t.slots.push_back(static_cast<int>(it - action.params.begin()));
  }
  return t;
}

struct Pending {
  std::size_t action;
  std::vector<std::string> args;
  std::vector<int> pos_pre, neg_pre, add, del;
};

void sort_unique(std::vector<int>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::optional<int> GroundTask::find(const pddl::Atom& atom, bool negated) const {
  auto it = index.find(fact_key(atom, negated));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

GroundTask ground(const pddl::DomainModel& domain, const pddl::ProblemSpec& problem, const GroundOptions& options) {
  GroundTask task;
  Builder b{task};

  std::vector<LiftedAction> lifted;
  for (const auto& action : domain.actions) {
    LiftedAction la{&action, {}, {}, {}, {}, {}, {}};
    for (const auto& l : action.precondition) {
      (l.positive ? la.pos_pre : la.neg_pre).push_back(make_template(action, l.atom));
    }
    for (const auto& a : action.add_effects) la.add.push_back(make_template(action, a));
    for (const auto& a : action.del_effects) la.del.push_back(make_template(action, a));
    for (const auto& e : action.constraints) {
      auto slot = [&](const std::string& v) { return make_template(action, {"", {v}}).slots[0]; };
      (e.negated ? la.differ : la.equal).emplace_back(slot(e.lhs), slot(e.rhs));
    }
    lifted.push_back(std::move(la));
  }

  for (const auto& atom : problem.init) b.intern(atom);

  std::vector<Pending> pending;
  for (std::size_t ai = 0; ai < lifted.size(); ++ai) {
    const LiftedAction& la = lifted[ai];
    const auto& params = la.model->params;
    std::vector<std::vector<const std::string*>> candidates(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (!domain.types.contains(params[i].type)) throw pddl::UnknownType(params[i].type);
      for (const auto& obj : problem.objects) {
        if (domain.types.is_subtype(obj.type, params[i].type)) candidates[i].push_back(&obj.name);
      }
    }
    std::vector<std::string> binding(params.size());
    auto consistent = [&](std::size_t bound) {
      for (auto [x, y] : la.differ) {
        if (static_cast<std::size_t>(std::max(x, y)) == bound && binding[x] == binding[y]) return false;
      }
      for (auto [x, y] : la.equal) {
        if (static_cast<std::size_t>(std::max(x, y)) == bound && binding[x] != binding[y]) return false;
      }
      return true;
    };
    auto emit = [&]() {
      if (pending.size() >= options.max_operators) throw GroundingExplosion(options.max_operators);
      Pending p{ai, binding, {}, {}, {}, {}};
      for (const auto& t : la.pos_pre) p.pos_pre.push_back(b.intern(t, binding));
      for (const auto& t : la.neg_pre) p.neg_pre.push_back(b.intern(t, binding));
      for (const auto& t : la.add) p.add.push_back(b.intern(t, binding));
      for (const auto& t : la.del) p.del.push_back(b.intern(t, binding));
      pending.push_back(std::move(p));
    };
    // Iterative odometer over the candidate lists.
    if (params.empty()) {
      emit();
      continue;
    }
    std::vector<std::size_t> pos(params.size(), 0);
    std::size_t depth = 0;
    while (true) {
      if (pos[depth] >= candidates[depth].size()) {
        if (depth == 0) break;
        pos[depth] = 0;
        --depth;
        ++pos[depth];
        continue;
      }
      binding[depth] = *candidates[depth][pos[depth]];
      if (!consistent(depth)) {
        ++pos[depth];
        continue;
      }
      if (depth + 1 == params.size()) {
        emit();
        ++pos[depth];
      } else {
        ++depth;
      }
    }
  }

  // Goal facts.
  std::vector<int> goal_pos, goal_neg;
  for (const auto& l : problem.goal) (l.positive ? goal_pos : goal_neg).push_back(b.intern(l.atom));

  // Complement facts for every atom used negatively.
  std::set<int> negated(goal_neg.begin(), goal_neg.end());
  for (const auto& p : pending) negated.insert(p.neg_pre.begin(), p.neg_pre.end());
  std::map<int, int> complement;
  for (int f : negated) {
    pddl::Atom atom = task.facts[f];
    complement[f] = b.intern(atom, true);
  }

  std::vector<bool> in_init(task.facts.size(), false);
  for (const auto& atom : problem.init) in_init[*task.find(atom)] = true;
  for (std::size_t f = 0; f < task.facts.size(); ++f) {
    if (in_init[f]) task.init.push_back(static_cast<int>(f));
  }
  for (auto [f, c] : complement) {
    if (!in_init[f]) task.init.push_back(c);
  }
  sort_unique(task.init);

  task.goal = goal_pos;
  for (int f : goal_neg) task.goal.push_back(complement[f]);
  sort_unique(task.goal);
  task.neg_goal = goal_neg;
  sort_unique(task.neg_goal);

  task.operators.reserve(pending.size());
  for (auto& p : pending) {
    GroundOperator op;
    op.schema = lifted[p.action].model->name;
    op.args = std::move(p.args);
    op.pre = p.pos_pre;
    for (int f : p.neg_pre) op.pre.push_back(complement[f]);
    sort_unique(op.pre);
    sort_unique(p.add);
    sort_unique(p.del);
    op.add = p.add;
    for (int f : p.del) {
      if (std::binary_search(p.add.begin(), p.add.end(), f)) continue;
      op.del.push_back(f);
      if (auto it = complement.find(f); it != complement.end()) op.add.push_back(it->second);
    }
    for (int f : p.add) {
      if (auto it = complement.find(f); it != complement.end()) op.del.push_back(it->second);
    }
    sort_unique(op.add);
    sort_unique(op.del);
    task.operators.push_back(std::move(op));
  }

  if (options.prune_unreachable) {
    std::vector<bool> reached(task.facts.size(), false);
    for (int f : task.init) reached[f] = true;
    std::vector<bool> used(task.operators.size(), false);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < task.operators.size(); ++i) {
        if (used[i]) continue;
        const auto& op = task.operators[i];
        if (!std::all_of(op.pre.begin(), op.pre.end(), [&](int f) { return reached[f]; })) continue;
        used[i] = true;
        changed = true;
        for (int f : op.add) reached[f] = true;
      }
    }
    std::vector<GroundOperator> kept;
    for (std::size_t i = 0; i < task.operators.size(); ++i) {
      if (used[i]) kept.push_back(std::move(task.operators[i]));
    }
    task.operators = std::move(kept);
  }
  return task;
}

}  // namespace llmpddl::planner
