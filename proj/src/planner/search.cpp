#include <algorithm>
#include <chrono>
#include <limits>
#include <queue>
#include <tuple>
#include <unordered_map>

#include "llmpddl/planner/planner.hpp"

namespace llmpddl::planner {

namespace {

// Generalized Dijkstra over the delete relaxation.
class RelaxedCost {
 public:
  explicit RelaxedCost(const GroundTask& task) : task_(task), pre_of_(task.facts.size()) {
    for (std::size_t i = 0; i < task.operators.size(); ++i) {
      const auto& op = task.operators[i];
      if (op.pre.empty()) free_.push_back(i);
      for (int f : op.pre) pre_of_[f].push_back(i);
    }
  }

  int evaluate(const std::vector<int>& state, bool additive) {
    using Entry = std::pair<long long, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    cost_.assign(task_.facts.size(), kInfinity);
    op_cost_.assign(task_.operators.size(), 0);
    remaining_.resize(task_.operators.size());
    for (std::size_t i = 0; i < task_.operators.size(); ++i) remaining_[i] = task_.operators[i].pre.size();
    for (int f : state) {
      cost_[f] = 0;
      open.emplace(0, f);
    }
    for (std::size_t o : free_) fire(o, open);
    while (!open.empty()) {
      auto [c, f] = open.top();
      open.pop();
      if (c > cost_[f]) continue;
      for (std::size_t o : pre_of_[f]) {
        op_cost_[o] = additive ? op_cost_[o] + c : std::max(op_cost_[o], c);
        if (--remaining_[o] == 0) fire(o, open);
      }
    }
    long long total = 0;
    for (int g : task_.goal) {
      if (cost_[g] == kInfinity) return kInfiniteCost;
      total = additive ? total + cost_[g] : std::max(total, cost_[g]);
    }
    return total >= kInfiniteCost ? kInfiniteCost - 1 : static_cast<int>(total);
  }

 private:
  static constexpr long long kInfinity = std::numeric_limits<long long>::max();

  template <typename Queue>
  void fire(std::size_t o, Queue& open) {
    long long c = op_cost_[o] + 1;
    for (int g : task_.operators[o].add) {
      if (c < cost_[g]) {
        cost_[g] = c;
        open.emplace(c, g);
      }
    }
  }

  const GroundTask& task_;
  std::vector<std::vector<std::size_t>> pre_of_;
  std::vector<std::size_t> free_;
  std::vector<long long> cost_;
  std::vector<long long> op_cost_;
  std::vector<std::size_t> remaining_;
};

using Bits = std::vector<std::uint64_t>;

struct BitsHash {
  std::size_t operator()(const Bits& b) const {
    std::size_t h = 1469598103934665603ull;
    for (auto w : b) h = (h ^ std::hash<std::uint64_t>{}(w)) * 1099511628211ull;
    return h;
  }
};

bool test(const Bits& b, int f) { return (b[f >> 6] >> (f & 63)) & 1u; }
void set(Bits& b, int f) { b[f >> 6] |= std::uint64_t{1} << (f & 63); }
void reset(Bits& b, int f) { b[f >> 6] &= ~(std::uint64_t{1} << (f & 63)); }

std::vector<int> to_list(const Bits& b, std::size_t n) {
  std::vector<int> out;
  for (std::size_t f = 0; f < n; ++f) {
    if (test(b, static_cast<int>(f))) out.push_back(static_cast<int>(f));
  }
  return out;
}

struct Node {
  Bits state;
  int parent;
  int op;
  int g;
};

}  // namespace

int h_add(const GroundTask& task, const std::vector<int>& state) { return RelaxedCost(task).evaluate(state, true); }
int h_max(const GroundTask& task, const std::vector<int>& state) { return RelaxedCost(task).evaluate(state, false); }

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Solved:
      return "plan";
    case Outcome::Unsolvable:
      return "unsolvable";
    case Outcome::ResourceLimit:
      return "resource-limit";
  }
  return "unknown";
}

std::string to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::AStar:
      return "astar";
    case Strategy::Gbfs:
      return "gbfs";
    case Strategy::Bfs:
      return "bfs";
  }
  return "unknown";
}

std::string to_string(Heuristic heuristic) {
  switch (heuristic) {
    case Heuristic::HAdd:
      return "hadd";
    case Heuristic::HMax:
      return "hmax";
    case Heuristic::Blind:
      return "blind";
  }
  return "unknown";
}

Strategy parse_strategy(const std::string& text) {
  if (text == "astar") return Strategy::AStar;
  if (text == "gbfs") return Strategy::Gbfs;
  if (text == "bfs") return Strategy::Bfs;
  throw std::invalid_argument("unknown search strategy '" + text + "'");
}

Heuristic parse_heuristic(const std::string& text) {
  if (text == "hadd") return Heuristic::HAdd;
  if (text == "hmax") return Heuristic::HMax;
  if (text == "blind") return Heuristic::Blind;
  throw std::invalid_argument("unknown heuristic '" + text + "'");
}

nlohmann::json to_json(const PlanResult& result) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : result.plan.steps) steps.push_back(pddl::to_string(s));
  return {
      {"outcome", to_string(result.outcome)},
      {"plan", steps},
      {"backend", result.backend},
      {"stats",
       {{"expansions", result.stats.expansions},
        {"generated", result.stats.generated},
        {"wall_seconds", result.stats.wall_seconds},
        {"plan_length", result.stats.plan_length}}},
  };
}

PlanResult search(const GroundTask& task, const SearchConfig& config) {
  using Clock = std::chrono::steady_clock;
  auto start = Clock::now();
  PlanResult result;
  const std::size_t n = task.facts.size();
  const std::size_t words = (n + 63) / 64 + 1;

  std::vector<std::vector<int>> by_first(n);
  std::vector<int> unconditional;
  for (std::size_t i = 0; i < task.operators.size(); ++i) {
    const auto& op = task.operators[i];
    if (op.pre.empty()) {
      unconditional.push_back(static_cast<int>(i));
    } else {
      by_first[op.pre.front()].push_back(static_cast<int>(i));
    }
  }

  RelaxedCost relaxed(task);
  auto heuristic = [&](const Bits& s) -> int {
    switch (config.heuristic) {
      case Heuristic::HAdd:
        return relaxed.evaluate(to_list(s, n), true);
      case Heuristic::HMax:
        return relaxed.evaluate(to_list(s, n), false);
      case Heuristic::Blind:
        for (int g : task.goal) {
          if (!test(s, g)) return 1;
        }
        return 0;
    }
    return 0;
  };
  auto is_goal = [&](const Bits& s) {
    return std::all_of(task.goal.begin(), task.goal.end(), [&](int g) { return test(s, g); });
  };

  std::vector<Node> nodes;
  std::unordered_map<Bits, int, BitsHash> seen;
  // Priority, insertion order, node. Equal priorities pop FIFO.
  using Entry = std::tuple<long long, std::size_t, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::size_t counter = 0;

  Bits init(words, 0);
  for (int f : task.init) set(init, f);
  int h0 = config.strategy == Strategy::Bfs ? 0 : heuristic(init);
  auto finish = [&](Outcome outcome) {
    result.outcome = outcome;
    result.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    result.stats.plan_length = result.plan.steps.size();
    return result;
  };
  if (h0 == kInfiniteCost) return finish(Outcome::Unsolvable);
  nodes.push_back({init, -1, -1, 0});
  seen.emplace(init, 0);
  open.emplace(h0, counter++, 0);

  std::vector<int> applicable;
  while (!open.empty()) {
    auto [priority, order, id] = open.top();
    open.pop();
    (void)priority;
    (void)order;
    const Node current = nodes[id];
    // Stale entry: the state was reached again by a cheaper path.
    if (seen.at(current.state) != id) continue;
    if (is_goal(current.state)) {
      for (int at = id; nodes[at].parent >= 0; at = nodes[at].parent) {
        const auto& op = task.operators[nodes[at].op];
        result.plan.steps.push_back({op.schema, op.args});
      }
      std::reverse(result.plan.steps.begin(), result.plan.steps.end());
      return finish(Outcome::Solved);
    }
    if (result.stats.expansions >= config.max_expansions) return finish(Outcome::ResourceLimit);
    if ((result.stats.expansions & 255) == 0 &&
        std::chrono::duration<double>(Clock::now() - start).count() > config.time_limit) {
      return finish(Outcome::ResourceLimit);
    }
    ++result.stats.expansions;

    applicable.assign(unconditional.begin(), unconditional.end());
    for (std::size_t f = 0; f < n; ++f) {
      if (!test(current.state, static_cast<int>(f))) continue;
      for (int o : by_first[f]) {
        const auto& pre = task.operators[o].pre;
        if (std::all_of(pre.begin() + 1, pre.end(), [&](int p) { return test(current.state, p); })) {
          applicable.push_back(o);
        }
      }
    }
    std::sort(applicable.begin(), applicable.end());

    for (int o : applicable) {
      const auto& op = task.operators[o];
      Bits next = current.state;
      for (int f : op.del) reset(next, f);
      for (int f : op.add) set(next, f);
      int g = current.g + 1;
      ++result.stats.generated;
      auto it = seen.find(next);
      if (it != seen.end()) {
        // Reopen only for optimal strategies and only on a strictly better path.
        if (config.strategy == Strategy::Gbfs || nodes[it->second].g <= g) continue;
      }
      int h = 0;
      if (config.strategy != Strategy::Bfs) {
        h = heuristic(next);
        if (h == kInfiniteCost) continue;
      }
      int next_id = static_cast<int>(nodes.size());
      nodes.push_back({next, id, o, g});
      seen[nodes.back().state] = next_id;
      long long priority_value = config.strategy == Strategy::Gbfs ? h
                                 : config.strategy == Strategy::Bfs ? g
                                                                    : static_cast<long long>(g) + h;
      open.emplace(priority_value, counter++, next_id);
    }
  }
  return finish(Outcome::Unsolvable);
}

}  // namespace llmpddl::planner
