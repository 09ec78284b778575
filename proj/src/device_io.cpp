// Copyright 2026 The RQU Model Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rqu/device_io.hpp"

#include <fstream>
#include <optional>

#include "rqu/error.hpp"

namespace rqu {
namespace {

using nlohmann::json;

const json& section(const json& doc, const char* name) {
  if (!doc.contains(name))
    throw ConfigError(std::string("missing section '") + name + "'");
  return doc.at(name);
}

double get_num(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key))
    throw ConfigError("missing key '" + where + "." + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number())
    throw ConfigError("key '" + where + "." + key + "' must be a number");
  return v.get<double>();
}

double get_num(const json& obj, const char* key, const std::string& where,
               double fallback) {
  return obj.contains(key) ? get_num(obj, key, where) : fallback;
}

std::optional<double> get_opt(const json& obj, const char* key,
                              const std::string& where) {
  if (!obj.contains(key)) return std::nullopt;
  return get_num(obj, key, where);
}

PhysicalConstants parse_constants(const json& doc) {
  if (!doc.contains("constants")) return PhysicalConstants::si();
  const json& c = doc.at("constants");
  if (c.is_string()) {
    auto s = c.get<std::string>();
    if (s == "si") return PhysicalConstants::si();
    if (s == "natural") return PhysicalConstants::natural();
    throw ConfigError("constants must be \"si\", \"natural\" or an object");
  }
  if (!c.is_object()) throw ConfigError("constants must be an object");
  reject_unknown_keys(c, {"hbar", "k_B", "Phi0"}, "constants");
  PhysicalConstants pc;
  pc.hbar = get_num(c, "hbar", "constants", pc.hbar);
  pc.k_B = get_num(c, "k_B", "constants", pc.k_B);
  pc.Phi0 = get_num(c, "Phi0", "constants", pc.Phi0);
  pc.validate();
  return pc;
}

}  // namespace

void reject_unknown_keys(const json& obj,
                         std::initializer_list<const char*> allowed,
                         const std::string& section_name) {
  if (!obj.is_object())
    throw ConfigError("section '" + section_name + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok)
      throw ConfigError("unknown key '" + section_name + "." + key + "'");
  }
}

DeviceParams device_from_json(const json& doc) {
  reject_unknown_keys(doc, {"constants", "lf", "mw", "jj", "coupling"}, "root");
  DeviceParams d;
  d.constants = parse_constants(doc);

  const json& lf = section(doc, "lf");
  reject_unknown_keys(lf, {"omega_b", "L_b", "Q_b", "M", "bath_T", "n_eq"},
                      "lf");
  d.lf = LowFrequencyMode::make(
      get_num(lf, "omega_b", "lf"), get_num(lf, "L_b", "lf"),
      get_num(lf, "Q_b", "lf"), get_num(lf, "M", "lf"),
      get_num(lf, "bath_T", "lf", 0.0), get_opt(lf, "n_eq", "lf"),
      d.constants);

  const json& mw = section(doc, "mw");
  reject_unknown_keys(
      mw, {"omega_a0", "kappa", "L_a", "C_a", "C_c", "Lambda", "chi"}, "mw");
  d.mw.omega_a0 = get_num(mw, "omega_a0", "mw");
  d.mw.kappa = get_num(mw, "kappa", "mw");
  d.mw.C_a = get_num(mw, "C_a", "mw", 0.0);
  d.mw.C_c = get_num(mw, "C_c", "mw", 0.0);
  d.mw.Lambda = get_num(mw, "Lambda", "mw", 0.0);
  d.mw.chi = get_num(mw, "chi", "mw", 1.0);
  auto L_a = get_opt(mw, "L_a", "mw");

  const json& jj = section(doc, "jj");
  reject_unknown_keys(jj, {"model", "I_c", "flux_margin", "table"}, "jj");
  std::string model = jj.value("model", std::string("dc_squid"));
  if (model == "dc_squid") {
    d.jj = JosephsonElement::dc_squid(get_num(jj, "I_c", "jj"), d.constants,
                                      get_num(jj, "flux_margin", "jj", 0.05));
  } else if (model == "user_table") {
    if (!jj.contains("table") || !jj.at("table").is_array())
      throw ConfigError("jj.table must be an array of [Phi, L_J] pairs");
    std::vector<std::pair<double, double>> samples;
    for (const auto& row : jj.at("table")) {
      if (!row.is_array() || row.size() != 2 || !row[0].is_number() ||
          !row[1].is_number())
        throw ConfigError("jj.table rows must be [Phi, L_J] number pairs");
      samples.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    d.jj = JosephsonElement::user_table(std::move(samples));
  } else {
    throw ConfigError("jj.model must be \"dc_squid\" or \"user_table\"");
  }

  const json& cp = section(doc, "coupling");
  reject_unknown_keys(cp, {"flux_bias", "g0"}, "coupling");
  d.flux_bias = get_num(cp, "flux_bias", "coupling", 0.0);
  if (auto g0 = get_opt(cp, "g0", "coupling")) {
    d.mw.L_a = L_a.value_or(0.0);
    d.coupling = coupling_from_g0(*g0, d.constants, d.lf);
  } else {
    if (!cp.contains("flux_bias"))
      throw ConfigError("coupling needs flux_bias or g0");
    d.mw.L_a = L_a ? *L_a
                   : calibrate_linear_inductance(d.mw, d.jj, d.flux_bias,
                                                 d.constants);
    d.coupling =
        coupling_strength(d.mw, d.jj, d.lf, d.constants, d.flux_bias);
  }
  d.validate();
  return d;
}

DeviceParams load_device(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return device_from_json(doc);
}

json device_to_json(const DeviceParams& d) {
  json j;
  j["constants"] = {{"hbar", d.constants.hbar},
                    {"k_B", d.constants.k_B},
                    {"Phi0", d.constants.Phi0}};
  j["lf"] = {{"omega_b", d.lf.omega_b}, {"L_b", d.lf.L_b},
             {"Q_b", d.lf.Q_b},         {"M", d.lf.M},
             {"bath_T", d.lf.bath_T},   {"n_eq", d.lf.n_eq}};
  j["mw"] = {{"omega_a0", d.mw.omega_a0}, {"kappa", d.mw.kappa},
             {"L_a", d.mw.L_a},           {"C_a", d.mw.C_a},
             {"C_c", d.mw.C_c},           {"Lambda", d.mw.Lambda},
             {"chi", d.mw.chi}};
  if (d.jj.model == JunctionModel::kDcSquid) {
    j["jj"] = {{"model", "dc_squid"},
               {"I_c", d.jj.I_c},
               {"flux_margin", d.jj.flux_margin}};
  } else {
    json table = json::array();
    for (const auto& [phi, l] : d.jj.table) table.push_back({phi, l});
    j["jj"] = {{"model", "user_table"}, {"table", table}};
  }
  j["coupling"] = {{"flux_bias", d.flux_bias}, {"g0", d.coupling.g0}};
  return j;
}

}  // namespace rqu
