#include "esc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <set>

namespace esc
{

using nlohmann::json;

namespace
{

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed)
{
  if (!obj.is_object())
  {
    throw ScenarioError(where + ": expected an object");
  }
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
  {
    if (!keys.contains(key))
    {
      throw ScenarioError(where + ": unknown field '" + key + "'");
    }
  }
}

const json& require(const json& obj, const std::string& where, const char* key)
{
  if (!obj.contains(key))
  {
    throw ScenarioError(where + ": missing field '" + std::string(key) + "'");
  }
  return obj.at(key);
}

double number(const json& obj, const std::string& where, const char* key)
{
  const json& v = require(obj, where, key);
  if (!v.is_number())
  {
    throw ScenarioError(where + "." + key + ": expected a number");
  }
  return v.get<double>();
}

template <int N>
Eigen::Matrix<double, N, 1> vector_of(const json& v, const std::string& where)
{
  if (!v.is_array() || v.size() != N)
  {
    throw ScenarioError(where + ": expected an array of " + std::to_string(N) +
                        " numbers");
  }
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i)
  {
    if (!v[i].is_number())
    {
      throw ScenarioError(where + ": expected numbers");
    }
    out[i] = v[i].get<double>();
  }
  return out;
}

template <int N>
json array_of(const Eigen::Matrix<double, N, 1>& v)
{
  json a = json::array();
  for (int i = 0; i < N; ++i)
  {
    a.push_back(v[i]);
  }
  return a;
}

AntennaParams parse_params(const json& p)
{
  const std::string where = "params";
  reject_unknown(p, where, {"Ix", "Iy", "Iz", "dx", "dy", "dz"});
  AntennaParams params;
  params.Ix = number(p, where, "Ix");
  params.Iy = number(p, where, "Iy");
  params.Iz = number(p, where, "Iz");
  const double dx = number(p, where, "dx");
  const double dy = number(p, where, "dy");
  const double dz = number(p, where, "dz");
  // Body damping is diag{d2, d1, d2}: the x and z entries are the same joint.
  if (dx != dz)
  {
    throw ScenarioError("params: dx and dz both damp the azimuth joint and must be equal");
  }
  params.d1 = dy;
  params.d2 = dx;
  return params;
}

ObjectiveSpec parse_objective(const json& o)
{
  const std::string where = "objective";
  if (!o.is_object())
  {
    throw ScenarioError(where + ": expected an object");
  }
  ObjectiveSpec spec;
  const json& kind = require(o, where, "kind");
  if (!kind.is_string())
  {
    throw ScenarioError(where + ".kind: expected a string");
  }
  spec.kind = kind.get<std::string>();
  spec.theta_d = vector_of<2>(require(o, where, "theta_d"), where + ".theta_d");
  if (spec.kind == "quadratic")
  {
    reject_unknown(o, where, {"kind", "theta_d", "offset"});
    spec.offset = number(o, where, "offset");
  }
  else if (spec.kind == "gaussian")
  {
    reject_unknown(o, where, {"kind", "theta_d", "p_max", "sigma", "p0"});
    spec.p_max = number(o, where, "p_max");
    spec.sigma = number(o, where, "sigma");
    spec.p0 = number(o, where, "p0");
  }
  else
  {
    throw ScenarioError(where + ".kind: unknown objective '" + spec.kind + "'");
  }
  return spec;
}

json objective_json(const ObjectiveSpec& spec)
{
  json o{{"kind", spec.kind}, {"theta_d", array_of<2>(spec.theta_d)}};
  if (spec.kind == "quadratic")
  {
    o["offset"] = spec.offset;
  }
  else
  {
    o["p_max"] = spec.p_max;
    o["sigma"] = spec.sigma;
    o["p0"] = spec.p0;
  }
  return o;
}

}  // namespace

ObjectivePtr ObjectiveSpec::build() const
{
  try
  {
    if (kind == "quadratic")
    {
      return std::make_shared<QuadraticObjective>(theta_d, offset);
    }
    if (kind == "gaussian")
    {
      return std::make_shared<GaussianPowerObjective>(theta_d, p_max, sigma, p0);
    }
  }
  catch (const std::invalid_argument& e)
  {
    throw ScenarioError(std::string("objective: ") + e.what());
  }
  throw ScenarioError("objective: unknown kind '" + kind + "'");
}

DitherPair DitherSpec::build() const
{
  if (kind != "cos_sin")
  {
    throw ScenarioError("dither: unknown kind '" + kind + "'");
  }
  try
  {
    return dither_cos_sin(q);
  }
  catch (const std::invalid_argument& e)
  {
    throw ScenarioError(std::string("dither: ") + e.what());
  }
}

std::string to_string(SystemKind kind)
{
  switch (kind)
  {
    case SystemKind::closed_loop:
      return "closed_loop";
    case SystemKind::averaged:
      return "averaged";
    case SystemKind::frozen:
      return "frozen";
    case SystemKind::averaged_gyroscopic:
      return "averaged_gyroscopic";
  }
  return "unknown";
}

SystemKind system_from_string(const std::string& name)
{
  if (name == "closed_loop")
  {
    return SystemKind::closed_loop;
  }
  if (name == "averaged")
  {
    return SystemKind::averaged;
  }
  if (name == "frozen")
  {
    return SystemKind::frozen;
  }
  if (name == "averaged_gyroscopic")
  {
    return SystemKind::averaged_gyroscopic;
  }
  throw ScenarioError("systems: unknown system '" + name + "'");
}

bool Scenario::runs(SystemKind kind) const
{
  for (SystemKind s : systems)
  {
    if (s == kind)
    {
      return true;
    }
  }
  return false;
}

double Scenario::max_closed_loop_dt() const
{
  return gains.epsilon * dither.build().period() / 50.0;
}

double Scenario::dt_for(SystemKind kind) const
{
  if (dt)
  {
    return *dt;
  }
  if (kind == SystemKind::closed_loop)
  {
    return gains.epsilon * dither.build().period() / 200.0;
  }
  return 1e-3;
}

void Scenario::validate() const
{
  try
  {
    params.validate();
    gains.validate();
  }
  catch (const std::invalid_argument& e)
  {
    throw ScenarioError(e.what());
  }
  objective.build();
  dither.build();
  if (initial_states.empty())
  {
    throw ScenarioError("initial_states: at least one initial state is required");
  }
  for (const auto& ic : initial_states)
  {
    if (!ic.state.finite())
    {
      throw ScenarioError("initial_states: '" + ic.label + "' is not finite");
    }
  }
  if (!(t_end > 0.0) || !std::isfinite(t_end))
  {
    throw ScenarioError("t_end must be finite and > 0");
  }
  if (dt && (!(*dt > 0.0) || !std::isfinite(*dt)))
  {
    throw ScenarioError("dt must be finite and > 0");
  }
  if (stride < 1)
  {
    throw ScenarioError("stride must be >= 1");
  }
  if (systems.empty())
  {
    throw ScenarioError("systems: at least one system is required");
  }
  if (runs(SystemKind::closed_loop) &&
      dt_for(SystemKind::closed_loop) > max_closed_loop_dt())
  {
    throw ScenarioError("dt exceeds eps*T_dither/50; the closed loop would not "
                        "resolve the dither");
  }
  if (runs(SystemKind::frozen) != frozen_lambda_bar.has_value())
  {
    throw ScenarioError(
      "frozen_lambda_bar is required exactly when the frozen system is run");
  }
  if (frozen_lambda_bar && !(frozen_lambda_bar->array() > 0.0).all())
  {
    throw ScenarioError("frozen_lambda_bar must be positive");
  }
}

Scenario parse_scenario(const json& doc)
{
  reject_unknown(doc, "scenario",
                 {"params", "objective", "gains", "dither", "initial_states",
                  "t_end", "dt", "stride", "systems", "frozen_lambda_bar",
                  "record_v_lambda", "output_dir"});
  Scenario s;
  s.params = parse_params(require(doc, "scenario", "params"));
  s.objective = parse_objective(require(doc, "scenario", "objective"));

  const json& g = require(doc, "scenario", "gains");
  reject_unknown(g, "gains", {"epsilon", "k1", "k2"});
  s.gains = EscGains{number(g, "gains", "epsilon"), number(g, "gains", "k1"),
                     number(g, "gains", "k2")};

  if (doc.contains("dither"))
  {
    const json& d = doc.at("dither");
    reject_unknown(d, "dither", {"kind", "q"});
    if (d.contains("kind"))
    {
      if (!d.at("kind").is_string())
      {
        throw ScenarioError("dither.kind: expected a string");
      }
      s.dither.kind = d.at("kind").get<std::string>();
    }
    if (d.contains("q"))
    {
      s.dither.q = number(d, "dither", "q");
    }
  }

  const json& ics = require(doc, "scenario", "initial_states");
  if (!ics.is_array())
  {
    throw ScenarioError("initial_states: expected an array");
  }
  for (std::size_t i = 0; i < ics.size(); ++i)
  {
    const std::string where = "initial_states[" + std::to_string(i) + "]";
    const json& ic = ics[i];
    reject_unknown(ic, where, {"label", "theta", "omega"});
    InitialState state;
    state.label = ic.contains("label") ? ic.at("label").get<std::string>()
                                       : "ic" + std::to_string(i);
    state.state.theta = vector_of<2>(require(ic, where, "theta"), where + ".theta");
    state.state.omega = ic.contains("omega")
                          ? vector_of<3>(ic.at("omega"), where + ".omega")
                          : Vec3::Zero();
    s.initial_states.push_back(state);
  }

  s.t_end = number(doc, "scenario", "t_end");
  if (doc.contains("dt") && !doc.at("dt").is_null())
  {
    s.dt = number(doc, "scenario", "dt");
  }
  if (doc.contains("stride"))
  {
    const json& v = doc.at("stride");
    if (!v.is_number_integer())
    {
      throw ScenarioError("stride: expected an integer");
    }
    s.stride = v.get<int>();
  }
  if (doc.contains("systems"))
  {
    const json& v = doc.at("systems");
    if (!v.is_array())
    {
      throw ScenarioError("systems: expected an array");
    }
    s.systems.clear();
    for (const auto& name : v)
    {
      if (!name.is_string())
      {
        throw ScenarioError("systems: expected strings");
      }
      s.systems.push_back(system_from_string(name.get<std::string>()));
    }
  }
  if (doc.contains("frozen_lambda_bar") && !doc.at("frozen_lambda_bar").is_null())
  {
    s.frozen_lambda_bar = vector_of<2>(doc.at("frozen_lambda_bar"), "frozen_lambda_bar");
  }
  if (doc.contains("record_v_lambda"))
  {
    if (!doc.at("record_v_lambda").is_boolean())
    {
      throw ScenarioError("record_v_lambda: expected a boolean");
    }
    s.record_v_lambda = doc.at("record_v_lambda").get<bool>();
  }
  if (doc.contains("output_dir"))
  {
    if (!doc.at("output_dir").is_string())
    {
      throw ScenarioError("output_dir: expected a string");
    }
    s.output_dir = doc.at("output_dir").get<std::string>();
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ScenarioError("cannot open scenario file '" + path + "'");
  }
  json doc;
  try
  {
    in >> doc;
  }
  catch (const json::parse_error& e)
  {
    throw ScenarioError("'" + path + "': " + e.what());
  }
  return parse_scenario(doc);
}

json to_json(const Scenario& s)
{
  json doc;
  doc["params"] = {{"Ix", s.params.Ix}, {"Iy", s.params.Iy}, {"Iz", s.params.Iz},
                   {"dx", s.params.d2}, {"dy", s.params.d1}, {"dz", s.params.d2}};
  doc["objective"] = objective_json(s.objective);
  doc["gains"] = {{"epsilon", s.gains.epsilon}, {"k1", s.gains.k1}, {"k2", s.gains.k2}};
  doc["dither"] = {{"kind", s.dither.kind}, {"q", s.dither.q}};
  json ics = json::array();
  for (const auto& ic : s.initial_states)
  {
    ics.push_back({{"label", ic.label},
                   {"theta", array_of<2>(ic.state.theta)},
                   {"omega", array_of<3>(ic.state.omega)}});
  }
  doc["initial_states"] = ics;
  doc["t_end"] = s.t_end;
  if (s.dt)
  {
    doc["dt"] = *s.dt;
  }
  doc["stride"] = s.stride;
  json systems = json::array();
  for (SystemKind k : s.systems)
  {
    systems.push_back(to_string(k));
  }
  doc["systems"] = systems;
  if (s.frozen_lambda_bar)
  {
    doc["frozen_lambda_bar"] = array_of<2>(*s.frozen_lambda_bar);
  }
  doc["record_v_lambda"] = s.record_v_lambda;
  doc["output_dir"] = s.output_dir;
  return doc;
}

Scenario preset_paper_sec4()
{
  Scenario s;
  s.params = AntennaParams{0.0833, 0.3083, 0.15, 0.1, 0.1};
  s.objective.kind = "quadratic";
  s.objective.theta_d = {std::numbers::pi / 4.0, std::numbers::pi / 2.0};
  s.objective.offset = 0.2;
  s.gains = EscGains{0.01, 0.2, 0.1};
  s.dither = DitherSpec{"cos_sin", 1.0};
  s.initial_states = {
    {"blue", PlantState{{-0.3849, -0.7422}, Vec3::Zero()}},
    {"red", PlantState{{1.9775, 0.7854}, Vec3::Zero()}},
    {"yellow", PlantState{{-0.4916, 2.6121}, Vec3::Zero()}},
  };
  s.t_end = 40.0;
  s.stride = 10;
  s.systems = {SystemKind::closed_loop, SystemKind::averaged};
  s.output_dir = "out";
  return s;
}

}  // namespace esc
