#include "adpnet/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "adpnet/errors.hpp"

namespace adpnet {
namespace {

using nlohmann::json;
using LineMap = std::map<std::string, long>;

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

std::string located(const std::string& path, const LineMap* lines, const std::string& message) {
  std::string out = path;
  if (lines != nullptr) {
    const auto it = lines->find(path);
    if (it != lines->end()) out += " (line " + std::to_string(it->second) + ")";
  }
  return out + ": " + message;
}

// Strict view of one JSON object: reads known keys, rejects the rest.
class Section {
 public:
  Section(const json& j, std::string path, const LineMap* lines) : j_(j), path_(std::move(path)), lines_(lines) {
    if (!j_.is_object()) fail(path_, "expected a table");
  }

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    throw ConfigurationError(located(path.empty() ? "config" : path, lines_, message));
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = get(key)) out = as_number(*v, join(path_, key));
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer()) fail(join(path_, key), "expected an integer");
      const auto value = v->get<long long>();
      if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max()) {
        fail(join(path_, key), "integer out of range");
      }
      out = static_cast<int>(value);
    }
  }

  void seed(const std::string& key, std::uint64_t& out) {
    if (const json* v = get(key)) {
      if (v->is_number_unsigned()) {
        out = v->get<std::uint64_t>();
      } else if (v->is_number_integer() && v->get<long long>() >= 0) {
        out = static_cast<std::uint64_t>(v->get<long long>());
      } else {
        fail(join(path_, key), "expected a non-negative integer");
      }
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) fail(join(path_, key), "expected true or false");
      out = v->get<bool>();
    }
  }

  bool text(const std::string& key, std::string& out) {
    if (const json* v = get(key)) {
      if (!v->is_string()) fail(join(path_, key), "expected a string");
      out = v->get<std::string>();
      return true;
    }
    return false;
  }

  std::vector<double> numbers(const json& v, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

  double as_number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  template <class Fn>
  auto convert(const std::string& key, Fn&& fn) {
    try {
      return fn();
    } catch (const ConfigurationError& e) {
      const std::string message = e.what();
      const auto colon = message.find(": ");
      fail(join(path_, key), colon == std::string::npos ? message : message.substr(colon + 2));
    }
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) fail(join(path_, key), "unknown field");
    }
  }

  const std::string& path() const { return path_; }
  const LineMap* lines() const { return lines_; }

 private:
  const json& j_;
  std::string path_;
  const LineMap* lines_;
  std::set<std::string> seen_;
};

void read_task(Section& s, ReferenceTask& task) {
  std::string kind;
  if (s.text("kind", kind)) task.kind = s.convert("kind", [&] { return parse_task_kind(kind); });
  s.integer("outputs", task.outputs);
  s.number("duration", task.duration);
  s.number("sample_dt", task.sample_dt);
  s.integer("active_label", task.active_label);
  if (const json* list = s.get("components")) {
    const std::string path = join(s.path(), "components");
    if (!list->is_array()) s.fail(path, "expected an array of tables");
    task.components.clear();
    for (std::size_t i = 0; i < list->size(); ++i) {
      Section c((*list)[i], path + "[" + std::to_string(i) + "]", s.lines());
      SineComponent component;
      c.integer("channel", component.channel);
      c.number("amplitude", component.amplitude);
      c.number("frequency", component.frequency);
      c.number("phase", component.phase);
      c.finish();
      task.components.push_back(component);
    }
  }
  if (const json* list = s.get("setpoints")) {
    const std::string path = join(s.path(), "setpoints");
    if (!list->is_array()) s.fail(path, "expected an array of tables");
    task.setpoints.clear();
    for (std::size_t i = 0; i < list->size(); ++i) {
      Section c((*list)[i], path + "[" + std::to_string(i) + "]", s.lines());
      Setpoint setpoint;
      c.integer("label", setpoint.label);
      if (const json* value = c.get("value")) {
        setpoint.value = value->is_number() ? std::vector<double>{c.as_number(*value, join(c.path(), "value"))}
                                            : c.numbers(*value, join(c.path(), "value"));
      }
      c.finish();
      task.setpoints.push_back(setpoint);
    }
  }
  s.finish();
}

void read_network(Section& s, NetworkConfig& n) {
  s.integer("neurons", n.neurons);
  s.integer("fixed", n.fixed);
  s.number("dt", n.dt);
  if (const json* leak = s.get("leak")) {
    n.leak = leak->is_number() ? std::vector<double>{s.as_number(*leak, join(s.path(), "leak"))}
                               : s.numbers(*leak, join(s.path(), "leak"));
  }
  std::string name;
  if (s.text("activation", name)) n.activation = s.convert("activation", [&] { return parse_activation(name); });
  if (s.text("integrator", name)) n.integrator = s.convert("integrator", [&] { return parse_integrator(name); });
  s.number("input_scale", n.input_scale);
  s.number("density", n.density);
  s.number("spectral_radius", n.spectral_radius);
  s.boolean("activate_input", n.activate_input);
  if (s.text("input_mode", name)) n.input_mode = s.convert("input_mode", [&] { return parse_input_mode(name); });
  s.number("decoder_ridge", n.decoder_ridge);
  s.finish();
}

void read_learner(Section& s, LearnerSettings& l) {
  s.number("critic_rate", l.critic_rate);
  s.number("actor_rate", l.actor_rate);
  s.number("exploration_noise", l.exploration_noise);
  s.boolean("normalize", l.normalize);
  s.integer("critic_features", l.critic_features);
  s.integer("actor_features", l.actor_features);
  s.number("feature_leak", l.feature_leak);
  s.number("feature_spectral_radius", l.feature_spectral_radius);
  s.number("feature_input_scale", l.feature_input_scale);
  std::string name;
  if (s.text("plasticity", name)) l.plasticity = s.convert("plasticity", [&] { return parse_plasticity(name); });
  s.number("plasticity_rate", l.plasticity_rate);
  s.number("plasticity_bound", l.plasticity_bound);
  s.finish();
}

std::vector<std::vector<double>> read_rows(Section& s, const std::string& key) {
  std::vector<std::vector<double>> rows;
  if (const json* m = s.get(key)) {
    const std::string path = join(s.path(), key);
    if (!m->is_array()) s.fail(path, "expected an array of rows");
    for (std::size_t i = 0; i < m->size(); ++i) rows.push_back(s.numbers((*m)[i], path + "[" + std::to_string(i) + "]"));
  }
  return rows;
}

void read_cost(Section& s, CostSettings& c) {
  s.number("q", c.q);
  s.number("r", c.r);
  c.Q = read_rows(s, "Q");
  c.R = read_rows(s, "R");
  s.finish();
}

TrainConfig build(const json& j, const LineMap* lines) {
  TrainConfig c;
  Section root(j, "", lines);
  root.seed("seed", c.seed);
  root.integer("episodes", c.episodes);
  root.text("output_dir", c.output_dir);
  if (const json* t = root.get("task")) {
    Section s(*t, "task", lines);
    read_task(s, c.task);
  }
  if (const json* n = root.get("network")) {
    Section s(*n, "network", lines);
    read_network(s, c.network);
  }
  if (const json* l = root.get("learner")) {
    Section s(*l, "learner", lines);
    read_learner(s, c.learner);
  }
  if (const json* k = root.get("cost")) {
    Section s(*k, "cost", lines);
    read_cost(s, c.cost);
  }
  root.finish();
  try {
    c.validate();
  } catch (const ConfigurationError& e) {
    // Validation messages start with the field path; attach its line when known.
    const std::string message = e.what();
    const auto end = message.find_first_of(": ");
    const std::string field = message.substr(0, end);
    if (lines != nullptr && lines->count(field) && end != std::string::npos) {
      throw ConfigurationError(located(field, lines, message.substr(message.find_first_not_of(": ", end))));
    }
    throw;
  }
  return c;
}

json toml_to_json(const toml::node& node, const std::string& path, LineMap& lines) {
  if (!path.empty()) lines[path] = static_cast<long>(node.source().begin.line);
  if (const auto* table = node.as_table()) {
    json out = json::object();
    for (const auto& [key, value] : *table) {
      const std::string name(key.str());
      out[name] = toml_to_json(value, join(path, name), lines);
    }
    return out;
  }
  if (const auto* array = node.as_array()) {
    json out = json::array();
    for (std::size_t i = 0; i < array->size(); ++i) {
      out.push_back(toml_to_json(*array->get(i), path + "[" + std::to_string(i) + "]", lines));
    }
    return out;
  }
  if (const auto* v = node.as_string()) return v->get();
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  throw ConfigurationError(located(path, &lines, "dates and times are not supported"));
}

}  // namespace

TrainConfig config_from_json(const json& j) { return build(j, nullptr); }

TrainConfig parse_toml_config(const std::string& text, const std::string& source_name) {
  toml::table table;
  try {
    table = toml::parse(text, source_name);
  } catch (const toml::parse_error& e) {
    const auto& where = e.source().begin;
    throw ConfigurationError(source_name + ":" + std::to_string(where.line) + ":" + std::to_string(where.column) +
                             ": " + std::string(e.description()));
  }
  LineMap lines;
  const json j = toml_to_json(table, "", lines);
  try {
    return build(j, &lines);
  } catch (const ConfigurationError& e) {
    throw ConfigurationError(source_name + ": " + e.what());
  }
}

TrainConfig parse_json_config(const std::string& text, const std::string& source_name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigurationError(source_name + ": " + e.what());
  }
  try {
    return build(j, nullptr);
  } catch (const ConfigurationError& e) {
    throw ConfigurationError(source_name + ": " + e.what());
  }
}

TrainConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  const bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  return is_json ? parse_json_config(text.str(), path) : parse_toml_config(text.str(), path);
}

}  // namespace adpnet
