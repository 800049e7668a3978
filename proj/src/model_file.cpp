#include "rrcov/model_file.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rrcov/errors.hpp"

namespace rrcov {
namespace {

int line_of(const YAML::Node& node) { return node.Mark().line + 1; }

[[noreturn]] void fail(const YAML::Node& node, const std::string& what) {
  throw ParseError(what, line_of(node));
}

void only_keys(const YAML::Node& node, const std::set<std::string>& allowed,
               const std::string& context) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + context);
  }
}

YAML::Node required(const YAML::Node& node, const std::string& key,
                    const std::string& context) {
  const YAML::Node child = node[key];
  if (!child) fail(node, context + " is missing '" + key + "'");
  return child;
}

double parse_number(const std::string& s, bool& ok) {
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(begin, end, value);
  ok = ec == std::errc() && p == end;
  return value;
}

double number(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) fail(node, what + " must be a number");
  const std::string text = node.Scalar();
  bool ok = false;
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    bool ok_den = false;
    const double num = parse_number(text.substr(0, slash), ok);
    const double den = parse_number(text.substr(slash + 1), ok_den);
    if (ok && ok_den && den != 0.0) return num / den;
  } else {
    const double v = parse_number(text, ok);
    if (ok) return v;
  }
  fail(node, what + " is not a number: '" + text + "'");
}

// Lifts a constraint failure onto the line that caused it.
template <class F>
auto at_line(const YAML::Node& node, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError("line " + std::to_string(line_of(node)) + ": " + e.what());
  }
}

Primitive parse_primitive(const YAML::Node& node, const std::string& name) {
  const std::string kind = required(node, "kind", "component '" + name + "'").as<std::string>();
  auto param = [&](const char* key) {
    return number(required(node, key, "component '" + name + "'"),
                  "component '" + name + "' " + key);
  };
  if (kind == "exponential") {
    only_keys(node, {"name", "kind", "mean"}, "exponential component");
    const double mean = param("mean");
    return at_line(node, [&] { return Primitive::exponential(mean); });
  }
  if (kind == "gamma") {
    only_keys(node, {"name", "kind", "shape", "scale"}, "gamma component");
    const double shape = param("shape");
    const double scale = param("scale");
    return at_line(node, [&] { return Primitive::gamma(shape, scale); });
  }
  if (kind == "uniform") {
    only_keys(node, {"name", "kind", "lo", "hi"}, "uniform component");
    const double lo = param("lo");
    const double hi = param("hi");
    return at_line(node, [&] { return Primitive::uniform(lo, hi); });
  }
  if (kind == "deterministic") {
    only_keys(node, {"name", "kind", "value"}, "deterministic component");
    const double value = param("value");
    return at_line(node, [&] { return Primitive::deterministic(value); });
  }
  fail(node["kind"], "unknown component kind '" + kind + "'");
}

std::vector<Component> parse_components(const YAML::Node& node,
                                        std::map<std::string, std::size_t>& index) {
  if (!node.IsSequence() || node.size() == 0) {
    fail(node, "'components' must be a non-empty list");
  }
  std::vector<Component> out;
  for (const auto& item : node) {
    if (!item.IsMap()) fail(item, "each component must be a mapping");
    const std::string name = required(item, "name", "component").as<std::string>();
    if (index.count(name)) fail(item, "duplicate component name '" + name + "'");
    index[name] = out.size();
    out.push_back({name, parse_primitive(item, name)});
  }
  return out;
}

AffineForm parse_form(const YAML::Node& node, const std::map<std::string, std::size_t>& index,
                      const std::string& context, const std::set<std::string>& extra_keys = {}) {
  if (!node.IsMap()) fail(node, context + " must be a mapping");
  std::set<std::string> allowed{"constant", "terms"};
  allowed.insert(extra_keys.begin(), extra_keys.end());
  only_keys(node, allowed, context);
  AffineForm form;
  form.coefficients.assign(index.size(), 0.0);
  if (node["constant"]) form.constant = number(node["constant"], context + " constant");
  if (const YAML::Node terms = node["terms"]) {
    if (!terms.IsMap()) fail(terms, context + " terms must map component names to coefficients");
    for (const auto& kv : terms) {
      const auto name = kv.first.as<std::string>();
      const auto it = index.find(name);
      if (it == index.end()) {
        fail(kv.first, context + " references unknown component '" + name + "'");
      }
      form.coefficients[it->second] += number(kv.second, context + " coefficient of '" + name + "'");
    }
  }
  return form;
}

struct ParsedCycle {
  CycleSpec cycle;
  std::vector<std::string> names;
};

ParsedCycle parse_cycle(const YAML::Node& root, const std::string& label,
                        const std::set<std::string>& allowed) {
  only_keys(root, allowed, label);
  std::map<std::string, std::size_t> index;
  ParsedCycle out;
  out.cycle.components = parse_components(required(root, "components", label), index);

  const YAML::Node time = required(root, "time", label);
  out.cycle.time = parse_form(time, index, label + " time");
  for (std::size_t k = 0; k < index.size(); ++k) {
    const double c = out.cycle.time.coefficients[k];
    const auto& comp = out.cycle.components[k];
    if (c < 0.0) {
      throw ValidationError("line " + std::to_string(line_of(time)) + ": " + label +
                            " time coefficient of '" + comp.name + "' is negative");
    }
    if (c > 0.0 && !comp.distribution.nonnegative()) {
      throw ValidationError("line " + std::to_string(line_of(time)) + ": " + label +
                            " time uses component '" + comp.name +
                            "' which can take negative values");
    }
  }
  if (out.cycle.time.constant < 0.0) {
    throw ValidationError("line " + std::to_string(line_of(time)) + ": " + label +
                          " time constant is negative");
  }

  const YAML::Node rewards = required(root, "rewards", label);
  if (!rewards.IsSequence() || rewards.size() == 0) {
    fail(rewards, label + " 'rewards' must be a non-empty list");
  }
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    const YAML::Node r = rewards[i];
    const std::string fallback = "R" + std::to_string(i + 1);
    const std::string name = r.IsMap() && r["name"] ? r["name"].as<std::string>() : fallback;
    out.cycle.rewards.push_back(parse_form(r, index, label + " reward '" + name + "'", {"name"}));
    out.names.push_back(name);
  }
  return out;
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void emit_cycle(YAML::Emitter& out, const CycleSpec& cycle,
                const std::vector<std::string>* names) {
  out << YAML::Key << "components" << YAML::Value << YAML::BeginSeq;
  for (const auto& c : cycle.components) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << c.name;
    out << YAML::Key << "kind" << YAML::Value << c.distribution.kind_name();
    std::visit([&out](const auto& p) {
      using P = std::decay_t<decltype(p)>;
      if constexpr (std::is_same_v<P, Exponential>) {
        out << YAML::Key << "mean" << YAML::Value << format_number(p.mean);
      } else if constexpr (std::is_same_v<P, Gamma>) {
        out << YAML::Key << "shape" << YAML::Value << format_number(p.shape);
        out << YAML::Key << "scale" << YAML::Value << format_number(p.scale);
      } else if constexpr (std::is_same_v<P, Uniform>) {
        out << YAML::Key << "lo" << YAML::Value << format_number(p.lo);
        out << YAML::Key << "hi" << YAML::Value << format_number(p.hi);
      } else {
        out << YAML::Key << "value" << YAML::Value << format_number(p.value);
      }
    }, c.distribution.params());
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  auto emit_form = [&](const AffineForm& form, const std::string* name) {
    out << YAML::Flow << YAML::BeginMap;
    if (name) out << YAML::Key << "name" << YAML::Value << *name;
    out << YAML::Key << "constant" << YAML::Value << format_number(form.constant);
    out << YAML::Key << "terms" << YAML::Value << YAML::Flow << YAML::BeginMap;
    for (std::size_t k = 0; k < form.coefficients.size(); ++k) {
      if (form.coefficients[k] != 0.0) {
        out << YAML::Key << cycle.components[k].name << YAML::Value
            << format_number(form.coefficients[k]);
      }
    }
    out << YAML::EndMap << YAML::EndMap;
  };

  out << YAML::Key << "time" << YAML::Value;
  emit_form(cycle.time, nullptr);
  out << YAML::Key << "rewards" << YAML::Value << YAML::BeginSeq;
  for (std::size_t i = 0; i < cycle.rewards.size(); ++i) {
    emit_form(cycle.rewards[i], names ? &(*names)[i] : nullptr);
  }
  out << YAML::EndSeq;
}

}  // namespace

ModelSpec parse_model(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ParseError(e.msg, e.mark.line + 1);
  }
  if (!root.IsMap()) throw ParseError("model file must be a mapping", 1);

  try {
    auto parsed = parse_cycle(root, "model",
                              {"components", "time", "rewards", "delay", "lattice", "notes"});
    ModelSpec spec;
    spec.cycle = std::move(parsed.cycle);
    spec.reward_names = std::move(parsed.names);

    if (const YAML::Node delay = root["delay"]) {
      if (delay.IsScalar()) {
        const auto mode = delay.as<std::string>();
        if (mode == "ordinary") {
          spec.delay_mode = DelayMode::Ordinary;
        } else if (mode == "same-as-cycle") {
          spec.delay_mode = DelayMode::SameAsCycle;
        } else {
          fail(delay, "delay must be 'ordinary', 'same-as-cycle' or a cycle description, got '" +
                          mode + "'");
        }
      } else if (delay.IsMap()) {
        auto d = parse_cycle(delay, "delay", {"components", "time", "rewards"});
        if (d.cycle.rewards.size() != spec.cycle.rewards.size()) {
          fail(delay, "delay has " + std::to_string(d.cycle.rewards.size()) +
                          " rewards but the cycle has " +
                          std::to_string(spec.cycle.rewards.size()));
        }
        spec.delay_mode = DelayMode::Custom;
        spec.delay = std::move(d.cycle);
      } else {
        fail(delay, "delay must be a mode name or a mapping");
      }
    }

    if (const YAML::Node lattice = root["lattice"]) {
      try {
        spec.lattice = lattice.as<bool>();
      } catch (const YAML::Exception&) {
        fail(lattice, "lattice must be true or false");
      }
    }
    if (const YAML::Node notes = root["notes"]) {
      if (!notes.IsSequence()) fail(notes, "notes must be a list of strings");
      for (const auto& n : notes) spec.notes.push_back(n.as<std::string>());
    }

    validate(spec);
    return spec;
  } catch (const YAML::Exception& e) {
    throw ParseError(e.msg, e.mark.line + 1);
  }
}

ModelSpec load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::string to_yaml(const ModelSpec& spec) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  emit_cycle(out, spec.cycle, &spec.reward_names);
  out << YAML::Key << "delay" << YAML::Value;
  switch (spec.delay_mode) {
    case DelayMode::Ordinary:
      out << "ordinary";
      break;
    case DelayMode::SameAsCycle:
      out << "same-as-cycle";
      break;
    case DelayMode::Custom:
      out << YAML::BeginMap;
      emit_cycle(out, *spec.delay, nullptr);
      out << YAML::EndMap;
      break;
  }
  out << YAML::Key << "lattice" << YAML::Value << spec.lattice;
  if (!spec.notes.empty()) {
    out << YAML::Key << "notes" << YAML::Value << YAML::BeginSeq;
    for (const auto& n : spec.notes) out << n;
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace rrcov
