#include "llmpddl/workspace/generators.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace llmpddl::workspace {

namespace {

using pddl::Atom;
using pddl::Literal;

// mt19937 and seed_seq are fixed by the standard; distributions are not,
// so draws use plain modulo.
struct Draw {
  std::mt19937 rng;
  Draw(std::uint32_t seed, int k) {
    std::seed_seq seq{seed, static_cast<std::uint32_t>(k)};
    rng.seed(seq);
  }
  int below(int n) { return static_cast<int>(rng() % static_cast<std::uint32_t>(n)); }
  int between(int lo, int hi) { return lo + below(hi - lo + 1); }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[below(static_cast<int>(v.size()))];
  }
};

std::string task_id(const std::string& prefix, int k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%02d", prefix.c_str(), k + 1);
  return buf;
}

std::string join_and(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += i + 1 == parts.size() ? " and " : ", ";
    out += parts[i];
  }
  return out;
}

Task logistics_task(std::uint32_t seed, int k, const LogisticsParams& params) {
  Draw d(seed, k);
  Task t;
  t.id = task_id("lg", k);
  auto& p = t.problem;
  p.name = t.id;
  p.domain = "logistics";
  int cities = d.between(1, params.max_cities);
  std::vector<std::vector<std::string>> locs(cities);
  std::vector<std::string> airports;
  for (int c = 1; c <= cities; ++c) {
    std::string city = "c" + std::to_string(c);
    p.objects.push_back({city, "city"});
    int n = d.between(2, 3);
    for (int i = 1; i <= n; ++i) {
      std::string l = "l" + std::to_string(c) + "-" + std::to_string(i);
      p.objects.push_back({l, "location"});
      p.init.push_back({"location-in-city", {l, city}});
      locs[c - 1].push_back(l);
    }
    airports.push_back(locs[c - 1].front());
    p.init.push_back({"airport", {locs[c - 1].front()}});
  }
  for (int c = 1; c <= cities; ++c) {
    std::string truck = "t" + std::to_string(c);
    p.objects.push_back({truck, "truck"});
    p.init.push_back({"truck-at", {truck, d.pick(locs[c - 1])}});
  }
  int planes = cities == 1 ? 0 : d.between(1, 2);
  for (int a = 1; a <= planes; ++a) {
    std::string plane = "a" + std::to_string(a);
    p.objects.push_back({plane, "plane"});
    p.init.push_back({"plane-at", {plane, d.pick(airports)}});
  }
  std::vector<std::string> all;
  for (const auto& v : locs) all.insert(all.end(), v.begin(), v.end());
  int packages = d.between(1, params.max_packages);
  std::vector<std::string> asks;
  for (int i = 1; i <= packages; ++i) {
    std::string pkg = "p" + std::to_string(i);
    p.objects.push_back({pkg, "package"});
    std::string from = d.pick(all);
    std::string to = d.pick(all);
    if (to == from) to = all[(std::find(all.begin(), all.end(), from) - all.begin() + 1) % all.size()];
    p.init.push_back({"package-at", {pkg, from}});
    p.goal.push_back({true, {"package-at", {pkg, to}}});
    auto airport = std::find(airports.begin(), airports.end(), to);
    if (airport != airports.end()) {
      asks.push_back("package " + pkg + " to the airport of city c" + std::to_string(airport - airports.begin() + 1));
    } else {
      asks.push_back("package " + pkg + " to location " + to);
    }
  }
  t.instruction = "Deliver " + join_and(asks) + ".";
  return t;
}

// A kitchen and living room. Furniture and objects are fixed; where the
// movable objects start is drawn per task.
struct Scene {
  std::vector<std::string> furniture = {"countertop-1", "dining-table-1", "cabinet-1",   "fridge-1",      "drawer-1",
                                        "stove-burner-1", "microwave-1", "sink-1",      "carpet-1",      "trash-can-1"};
  std::vector<std::string> surfaces = {"countertop-1", "dining-table-1", "cabinet-1", "fridge-1", "drawer-1"};
  std::vector<std::string> objects = {"apple-1", "potato-1", "knife-1", "cloth-1", "vacuum-1", "mug-1", "book-1", "book-2"};
  std::vector<std::string> receptacles = {"pan-1", "cutting-board-1", "blender-1", "bowl-1", "lunch-box-1"};
};

// "cutting-board-1" -> "cutting board"; the books keep their number.
std::string spoken(const std::string& name) {
  std::string out = name.starts_with("book-") ? name : name.substr(0, name.rfind('-'));
  std::replace(out.begin(), out.end(), '-', ' ');
  return out;
}

Task household_task(std::uint32_t seed, int k) {
  Draw d(seed, k);
  Scene s;
  Task t;
  t.id = task_id("hh", k);
  auto& p = t.problem;
  p.name = t.id;
  p.domain = "household";
  p.objects.push_back({"robot-1", "robot"});
  for (const auto& f : s.furniture) p.objects.push_back({f, "furnitureAppliance"});
  for (const auto& o : s.objects) p.objects.push_back({o, "householdObject"});
  for (const auto& z : s.receptacles) p.objects.push_back({z, "smallReceptacle"});

  auto& in = p.init;
  in.push_back({"robot-at", {"robot-1", d.pick(s.surfaces)}});
  in.push_back({"robot-hand-empty", {"robot-1"}});
  for (const std::string f : {"countertop-1", "dining-table-1"}) in.push_back({"flat-surface", {f}});
  for (const std::string f : {"cabinet-1", "fridge-1", "drawer-1", "microwave-1"}) {
    in.push_back({"furniture-openable", {f}});
    in.push_back({"furniture-closed", {f}});
  }
  in.push_back({"stove-burner", {"stove-burner-1"}});
  in.push_back({"microwave", {"microwave-1"}});
  in.push_back({"sink", {"sink-1"}});
  in.push_back({"carpet", {"carpet-1"}});
  in.push_back({"trash-can", {"trash-can-1"}});
  for (const auto& o : s.objects) {
    in.push_back({"pickupable", {o}});
    in.push_back({"object-clear", {o}});
  }
  for (const auto& z : s.receptacles) {
    in.push_back({"pickupable", {z}});
    in.push_back({"object-clear", {z}});
  }
  for (const std::string o : {"book-1", "book-2", "mug-1"}) in.push_back({"stackable", {o}});
  in.push_back({"sliceable", {"apple-1"}});
  in.push_back({"knife", {"knife-1"}});
  in.push_back({"cloth", {"cloth-1"}});
  in.push_back({"vacuum-cleaner", {"vacuum-1"}});
  in.push_back({"cutting-board", {"cutting-board-1"}});
  in.push_back({"pan", {"pan-1"}});
  in.push_back({"blender", {"blender-1"}});
  in.push_back({"toggleable", {"blender-1"}});
  in.push_back({"receptacle-openable", {"lunch-box-1"}});
  in.push_back({"receptacle-closed", {"lunch-box-1"}});
  // Food starts in a receptacle or on a surface; everything else on a surface.
  std::vector<std::string> bowls = {"bowl-1", "lunch-box-1"};
  for (const auto& o : s.objects) {
    bool food = o == "apple-1" || o == "potato-1";
    if (food && d.below(2) == 0) {
      in.push_back({"object-in", {o, d.pick(bowls)}});
    } else {
      in.push_back({"object-on", {o, d.pick(s.surfaces)}});
    }
  }
  for (const auto& z : s.receptacles) in.push_back({"object-on", {z, d.pick(s.surfaces)}});

  auto& g = p.goal;
  auto pos = [&](std::string pred, std::vector<std::string> args) { g.push_back({true, {std::move(pred), std::move(args)}}); };
  switch (k % 12) {
    case 0: {
      std::string o = d.pick(std::vector<std::string>{"mug-1", "book-1", "knife-1", "cloth-1"});
      std::string f = d.pick(std::vector<std::string>{"dining-table-1", "countertop-1", "sink-1"});
      pos("object-on", {o, f});
      t.instruction = "Put the " + spoken(o) + " on the " + spoken(f) + ".";
      break;
    }
    case 1: {
      std::string o = d.pick(std::vector<std::string>{"apple-1", "potato-1"});
      pos("object-on", {o, "fridge-1"});
      pos("furniture-closed", {"fridge-1"});
      t.instruction = "Store the " + spoken(o) + " in the fridge and close the fridge door.";
      break;
    }
    case 2:
      pos("sliced", {"apple-1"});
      t.instruction = "Slice the apple.";
      break;
    case 3:
      pos("heated", {"potato-1"});
      t.instruction = "Heat the potato.";
      break;
    case 4:
      pos("heated", {"potato-1"});
      pos("mashed", {"potato-1"});
      t.instruction = "Heat the potato first before mashing it.";
      break;
    case 5: {
      std::string o = d.pick(std::vector<std::string>{"mug-1", "knife-1", "cloth-1"});
      pos("washed", {o});
      t.instruction = "Wash the " + spoken(o) + ".";
      break;
    }
    case 6: {
      std::string f = d.pick(std::vector<std::string>{"dining-table-1", "countertop-1"});
      pos("surface-clean", {f});
      t.instruction = "Wipe the " + spoken(f) + " with the cloth.";
      break;
    }
    case 7:
      pos("carpet-clean", {"carpet-1"});
      g.push_back({false, {"vacuum-full", {"vacuum-1"}}});
      t.instruction = "Vacuum the carpet and empty the vacuum cleaner afterwards.";
      break;
    case 8: {
      std::string top = d.below(2) ? "book-1" : "book-2";
      std::string bottom = top == "book-1" ? "book-2" : "book-1";
      pos("object-stacked", {top, bottom});
      t.instruction = "Stack " + spoken(top) + " on top of " + spoken(bottom) + ".";
      break;
    }
    case 9: {
      std::string o = d.pick(std::vector<std::string>{"apple-1", "potato-1"});
      std::string z = d.pick(std::vector<std::string>{"pan-1", "bowl-1"});
      pos("object-in", {o, z});
      t.instruction = "Put the " + spoken(o) + " into the " + spoken(z) + ".";
      break;
    }
    case 10:
      pos("toggled-on", {"blender-1"});
      pos("object-on", {"blender-1", "countertop-1"});
      t.instruction = "Place the blender on the countertop and switch it on.";
      break;
    default:
      g.push_back({false, {"furniture-closed", {"cabinet-1"}}});
      pos("object-on", {"knife-1", "cabinet-1"});
      t.instruction = "Open the cabinet and leave the knife inside it, with the door open.";
      break;
  }
  return t;
}

Task tyreworld_task(std::uint32_t seed, int k) {
  Draw d(seed, k);
  Task t;
  t.id = task_id("tw", k);
  auto& p = t.problem;
  p.name = t.id;
  p.domain = "tyreworld";
  int hubs = d.between(1, 2);
  p.objects = {{"boot", "container"}, {"wrench", "tool"}, {"jack", "tool"}, {"pump", "tool"}};
  auto& in = p.init;
  in.push_back({"wrench", {"wrench"}});
  in.push_back({"jack", {"jack"}});
  in.push_back({"pump", {"pump"}});
  for (const std::string tool : {"wrench", "jack", "pump"}) in.push_back({"in-container", {tool, "boot"}});
  bool open = d.below(2) == 0;
  if (open) in.push_back({"container-open", {"boot"}});
  std::vector<std::string> asks;
  for (int h = 1; h <= hubs; ++h) {
    std::string hub = "hub" + std::to_string(h), nut = "nut" + std::to_string(h);
    std::string flat = "flat" + std::to_string(h), spare = "spare" + std::to_string(h);
    p.objects.insert(p.objects.end(), {{hub, "hub"}, {nut, "nut"}, {flat, "wheel"}, {spare, "wheel"}});
    in.push_back({"on-ground", {hub}});
    in.push_back({"fastened", {hub}});
    in.push_back({"tight", {nut, hub}});
    in.push_back({"wheel-on", {flat, hub}});
    in.push_back({"in-container", {spare, "boot"}});
    in.push_back({"intact", {spare}});
    p.goal.push_back({true, {"wheel-on", {spare, hub}}});
    p.goal.push_back({true, {"inflated", {spare}}});
    p.goal.push_back({true, {"tight", {nut, hub}}});
    p.goal.push_back({true, {"in-container", {flat, "boot"}}});
    asks.push_back("replace the flat tyre " + flat + " on " + hub + " with the inflated spare " + spare);
  }
  bool close = d.below(2) == 0;
  if (close) p.goal.push_back({false, {"container-open", {"boot"}}});
  std::string text = join_and(asks);
  text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
  t.instruction = text + ", put the flat tyres and all tools back in the boot" + (close ? " and close it." : ".");
  for (const std::string tool : {"wrench", "jack", "pump"}) p.goal.push_back({true, {"in-container", {tool, "boot"}}});
  return t;
}

}  // namespace

std::vector<Task> logistics_tasks(std::uint32_t seed, int count, const LogisticsParams& params) {
  std::vector<Task> out;
  for (int k = 0; k < count; ++k) out.push_back(logistics_task(seed, k, params));
  return out;
}

std::vector<Task> household_tasks(std::uint32_t seed, int count) {
  std::vector<Task> out;
  for (int k = 0; k < count; ++k) out.push_back(household_task(seed, k));
  return out;
}

std::vector<Task> tyreworld_tasks(std::uint32_t seed, int count) {
  std::vector<Task> out;
  for (int k = 0; k < count; ++k) out.push_back(tyreworld_task(seed, k));
  return out;
}

std::vector<Task> generate_tasks(const std::string& domain, std::uint32_t seed, int count) {
  if (domain == "logistics") return logistics_tasks(seed, count);
  if (domain == "household") return household_tasks(seed, count);
  if (domain == "tyreworld") return tyreworld_tasks(seed, count);
  throw std::invalid_argument("no task generator for domain '" + domain + "'");
}

}  // namespace llmpddl::workspace
