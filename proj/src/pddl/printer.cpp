#include "llmpddl/pddl/printer.hpp"

#include <sstream>

namespace llmpddl::pddl {

namespace {

// Groups consecutive names sharing a type: "a b - t c - u".
std::string typed_list(const std::vector<TypedName>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ' ';
    out += names[i].name;
    if (i + 1 == names.size() || names[i + 1].type != names[i].type) out += " - " + names[i].type;
  }
  return out;
}

bool has_negative_precondition(const DomainModel& domain) {
  for (const auto& a : domain.actions) {
    for (const auto& l : a.precondition) {
      if (!l.positive) return true;
    }
  }
  return false;
}

bool has_equality(const DomainModel& domain) {
  for (const auto& a : domain.actions) {
    if (!a.constraints.empty()) return true;
  }
  return false;
}

void print_block(std::ostringstream& out, const std::string& key, const std::vector<std::string>& items) {
  out << "    " << key << " (and";
  if (items.empty()) {
    out << ")\n";
    return;
  }
  out << '\n';
  for (const auto& item : items) out << "      " << item << '\n';
  out << "    )\n";
}

}  // namespace

std::string print_action(const ActionModel& action) {
  std::ostringstream out;
  out << "  (:action " << action.name;
  if (!action.provenance.empty()) out << " ; provenance: " << action.provenance;
  out << "\n    :parameters (" << typed_list(action.params) << ")\n";
  std::vector<std::string> pre;
  for (const auto& l : action.precondition) pre.push_back(to_string(l));
  for (const auto& e : action.constraints) pre.push_back(to_string(e));
  print_block(out, ":precondition", pre);
  std::vector<std::string> eff;
  for (const auto& a : action.add_effects) eff.push_back(to_string(a));
  for (const auto& a : action.del_effects) eff.push_back("(not " + to_string(a) + ")");
  print_block(out, ":effect", eff);
  out << "  )\n";
  return out.str();
}

std::string print_domain(const DomainModel& domain) {
  std::ostringstream out;
  out << "(define (domain " << domain.name << ")\n";
  out << "  (:requirements :strips :typing";
  if (has_negative_precondition(domain)) out << " :negative-preconditions";
  if (has_equality(domain)) out << " :equality";
  out << ")\n";

  if (!domain.types.empty()) {
    out << "  (:types\n";
    const auto& types = domain.types.types();
    std::size_t i = 0;
    while (i < types.size()) {
      std::string parent = *domain.types.parent(types[i]);
      out << "    " << types[i];
      std::size_t j = i + 1;
      for (; j < types.size() && *domain.types.parent(types[j]) == parent; ++j) out << ' ' << types[j];
      out << " - " << parent << '\n';
      i = j;
    }
    out << "  )\n";
  }

  if (!domain.predicates.empty()) {
    out << "  (:predicates\n";
    for (const auto& p : domain.predicates) {
      out << "    " << signature(p);
      if (!p.description.empty()) out << " ; " << p.description;
      out << '\n';
    }
    out << "  )\n";
  }

  for (const auto& action : domain.actions) {
    out << '\n' << print_action(action);
  }
  out << ")\n";
  return out.str();
}

std::string print_problem(const ProblemSpec& problem) {
  std::ostringstream out;
  out << "(define (problem " << problem.name << ")\n";
  out << "  (:domain " << problem.domain << ")\n";
  if (!problem.objects.empty()) {
    out << "  (:objects\n";
    std::size_t i = 0;
    while (i < problem.objects.size()) {
      out << "    " << problem.objects[i].name;
      std::size_t j = i + 1;
      for (; j < problem.objects.size() && problem.objects[j].type == problem.objects[i].type; ++j) {
        out << ' ' << problem.objects[j].name;
      }
      out << " - " << problem.objects[i].type << '\n';
      i = j;
    }
    out << "  )\n";
  }
  if (problem.init.empty()) {
    out << "  (:init)\n";
  } else {
    out << "  (:init\n";
    for (const auto& a : problem.init) out << "    " << to_string(a) << '\n';
    out << "  )\n";
  }
  if (problem.goal.empty()) {
    out << "  (:goal (and))\n";
  } else {
    out << "  (:goal (and\n";
    for (const auto& l : problem.goal) out << "    " << to_string(l) << '\n';
    out << "  ))\n";
  }
  out << ")\n";
  return out.str();
}

std::string print_plan(const Plan& plan) {
  std::string out;
  for (const auto& step : plan.steps) out += to_string(step) + "\n";
  return out;
}

}  // namespace llmpddl::pddl
