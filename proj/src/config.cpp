#include "evykit/config.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace evy {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

struct RawConfig {
  // section -> key -> (value, line)
  std::map<std::string, std::map<std::string, std::pair<std::string, int>>>
      sections;
  std::string source;
};

RawConfig tokenize(const std::string& text, const std::string& source) {
  RawConfig raw;
  raw.source = source;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::string section;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw config_error(source + ":" + std::to_string(line_no) +
                           ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw config_error(source + ":" + std::to_string(line_no) +
                           ": empty section name");
      }
      raw.sections[section];  // a section may legitimately stay empty
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error(source + ":" + std::to_string(line_no) +
                         ": expected 'key = value', got '" + line + "'");
    }
    if (section.empty()) {
      throw config_error(source + ":" + std::to_string(line_no) +
                         ": key outside any [section]");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw config_error(source + ":" + std::to_string(line_no) +
                         ": empty key or value");
    }
    auto& sec = raw.sections[section];
    if (sec.count(key)) {
      throw config_error(source + ":" + std::to_string(line_no) +
                         ": duplicate key '" + key + "' in [" + section + "]");
    }
    sec[key] = {value, line_no};
  }
  return raw;
}

class SectionReader {
 public:
  SectionReader(const RawConfig& raw, const std::string& name)
      : raw_(raw), name_(name) {
    const auto it = raw.sections.find(name);
    if (it != raw.sections.end()) entries_ = &it->second;
  }

  bool present() const { return entries_ != nullptr; }
  bool has(const std::string& key) const {
    return entries_ && entries_->count(key);
  }

  std::string str(const std::string& key) {
    used_.insert(key);
    return entries_->at(key).first;
  }

  double number(const std::string& key) {
    used_.insert(key);
    const auto& [value, line] = entries_->at(key);
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end != value.c_str() + value.size()) {
      throw config_error(raw_.source + ":" + std::to_string(line) +
                         ": value of '" + key + "' is not a number: '" +
                         value + "'");
    }
    return v;
  }

  double require_number(const std::string& key) {
    if (!has(key)) {
      throw config_error(raw_.source + ": missing key '" + key +
                         "' in section [" + name_ + "]");
    }
    return number(key);
  }

  long integer(const std::string& key) {
    const double v = number(key);
    const long i = static_cast<long>(v);
    if (static_cast<double>(i) != v) {
      throw config_error(raw_.source + ": value of '" + key + "' in [" +
                         name_ + "] must be an integer");
    }
    return i;
  }

  void reject_unknown() const {
    if (!entries_) return;
    for (const auto& [key, value] : *entries_) {
      if (!used_.count(key)) {
        throw config_error(raw_.source + ":" +
                           std::to_string(value.second) + ": unknown key '" +
                           key + "' in section [" + name_ + "]");
      }
    }
  }

 private:
  const RawConfig& raw_;
  std::string name_;
  const std::map<std::string, std::pair<std::string, int>>* entries_ = nullptr;
  std::set<std::string> used_;
};

void wrap_invalid(const std::string& source, const char* what,
                  const std::invalid_argument& e) {
  throw config_error(source + ": invalid " + what + ": " + e.what());
}

}  // namespace

RunConfig parse_config(const std::string& text,
                       const std::string& source_name) {
  const RawConfig raw = tokenize(text, source_name);

  static const std::set<std::string> known_sections{
      "model", "constraints", "initial", "grid", "fit", "simulate", "msy"};
  for (const auto& [name, entries] : raw.sections) {
    if (!known_sections.count(name)) {
      throw config_error(source_name + ": unknown section [" + name + "]");
    }
  }

  RunConfig cfg;
  cfg.config_hash = fnv1a_hex(text);

  {
    SectionReader s(raw, "model");
    if (s.present()) {
      LVParams p;
      p.R = s.require_number("R");
      p.L = s.require_number("L");
      p.alpha = s.require_number("alpha");
      p.beta = s.require_number("beta");
      p.K = s.require_number("K");
      s.reject_unknown();
      try {
        p.validate();
      } catch (const std::invalid_argument& e) {
        wrap_invalid(source_name, "[model]", e);
      }
      cfg.model = p;
    }
  }
  {
    SectionReader s(raw, "constraints");
    if (s.present()) {
      const double by = s.require_number("min_biomass_prey");
      const double bz = s.require_number("min_biomass_predator");
      const double cy = s.has("min_catch_prey") ? s.number("min_catch_prey") : 0.0;
      const double cz =
          s.has("min_catch_predator") ? s.number("min_catch_predator") : 0.0;
      s.reject_unknown();
      try {
        cfg.constraints = ConstraintSet({by, bz}, {cy, cz});
      } catch (const std::invalid_argument& e) {
        wrap_invalid(source_name, "[constraints]", e);
      }
    }
  }
  {
    SectionReader s(raw, "initial");
    if (s.present()) {
      const double y = s.require_number("biomass_prey");
      const double z = s.require_number("biomass_predator");
      s.reject_unknown();
      try {
        cfg.initial = BiomassState{y, z};
      } catch (const std::invalid_argument& e) {
        wrap_invalid(source_name, "[initial]", e);
      }
    }
  }
  {
    SectionReader s(raw, "grid");
    if (s.present()) {
      if (s.has("y_min")) cfg.grid.y_min = s.number("y_min");
      if (s.has("y_max")) cfg.grid.y_max = s.number("y_max");
      if (s.has("z_min")) cfg.grid.z_min = s.number("z_min");
      if (s.has("z_max")) cfg.grid.z_max = s.number("z_max");
      if (s.has("y_cells")) {
        const long v = s.integer("y_cells");
        if (v < 2) throw config_error(source_name + ": y_cells must be >= 2");
        cfg.grid.y_cells = static_cast<std::size_t>(v);
      }
      if (s.has("z_cells")) {
        const long v = s.integer("z_cells");
        if (v < 2) throw config_error(source_name + ": z_cells must be >= 2");
        cfg.grid.z_cells = static_cast<std::size_t>(v);
      }
      if (s.has("max_iters")) {
        const long v = s.integer("max_iters");
        if (v < 1) throw config_error(source_name + ": max_iters must be >= 1");
        cfg.grid.max_iters = static_cast<std::size_t>(v);
      }
      s.reject_unknown();
    }
  }
  {
    SectionReader s(raw, "fit");
    if (s.present()) {
      if (s.has("cg_max_iters")) {
        const long v = s.integer("cg_max_iters");
        if (v < 0)
          throw config_error(source_name + ": cg_max_iters must be >= 0");
        cfg.fit.cg_max_iters = static_cast<int>(v);
      }
      if (s.has("grad_step_rel")) {
        cfg.fit.grad_step_rel = s.number("grad_step_rel");
        if (!(cfg.fit.grad_step_rel > 0.0))
          throw config_error(source_name + ": grad_step_rel must be > 0");
      }
      if (s.has("converge_tol")) {
        cfg.fit.converge_tol = s.number("converge_tol");
        if (!(cfg.fit.converge_tol >= 0.0))
          throw config_error(source_name + ": converge_tol must be >= 0");
      }
      if (s.has("grad_tol")) {
        cfg.fit.grad_tol = s.number("grad_tol");
        if (!(cfg.fit.grad_tol >= 0.0))
          throw config_error(source_name + ": grad_tol must be >= 0");
      }
      if (s.has("weight_prey")) {
        cfg.fit.weight_prey = s.number("weight_prey");
        if (!(*cfg.fit.weight_prey >= 0.0))
          throw config_error(source_name + ": weight_prey must be >= 0");
      }
      if (s.has("weight_predator")) {
        cfg.fit.weight_predator = s.number("weight_predator");
        if (!(*cfg.fit.weight_predator >= 0.0))
          throw config_error(source_name + ": weight_predator must be >= 0");
      }
      s.reject_unknown();
    }
  }
  {
    SectionReader s(raw, "simulate");
    if (s.present()) {
      cfg.simulate.present = true;
      if (!s.has("policy")) {
        throw config_error(source_name +
                           ": missing key 'policy' in section [simulate]");
      }
      cfg.simulate.policy = s.str("policy");
      static const std::set<std::string> kinds{
          "constant_effort", "constant_catch", "viable_min", "viable_greedy"};
      if (!kinds.count(cfg.simulate.policy)) {
        throw config_error(source_name + ": unknown policy '" +
                           cfg.simulate.policy + "'");
      }
      if (!s.has("horizon")) {
        throw config_error(source_name +
                           ": missing key 'horizon' in section [simulate]");
      }
      const long h = s.integer("horizon");
      if (h < 1) throw config_error(source_name + ": horizon must be >= 1");
      cfg.simulate.horizon = static_cast<int>(h);
      if (s.has("effort_prey")) cfg.simulate.effort_prey = s.number("effort_prey");
      if (s.has("effort_predator"))
        cfg.simulate.effort_predator = s.number("effort_predator");
      if (s.has("catch_prey")) cfg.simulate.catch_prey = s.number("catch_prey");
      if (s.has("catch_predator"))
        cfg.simulate.catch_predator = s.number("catch_predator");
      s.reject_unknown();
    }
  }
  {
    SectionReader s(raw, "msy");
    if (s.present()) {
      if (s.has("v_max")) {
        cfg.msy.v_max = s.number("v_max");
        if (!(*cfg.msy.v_max >= 0.0))
          throw config_error(source_name + ": v_max must be >= 0");
      }
      if (s.has("w_max")) {
        cfg.msy.w_max = s.number("w_max");
        if (!(*cfg.msy.w_max >= 0.0))
          throw config_error(source_name + ": w_max must be >= 0");
      }
      if (s.has("grid_points")) {
        const long v = s.integer("grid_points");
        if (v < 2)
          throw config_error(source_name + ": grid_points must be >= 2");
        cfg.msy.grid_points = static_cast<std::size_t>(v);
      }
      if (s.has("refine_rounds")) {
        const long v = s.integer("refine_rounds");
        if (v < 0)
          throw config_error(source_name + ": refine_rounds must be >= 0");
        cfg.msy.refine_rounds = static_cast<int>(v);
      }
      s.reject_unknown();
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw io_error("cannot read config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace evy
