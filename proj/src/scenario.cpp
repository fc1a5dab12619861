#include "vlens/scenario.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "vlens/errors.hpp"

namespace vlens {

using nlohmann::json;

namespace {

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }

void only_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw SchemaError(path.empty() ? "/" : path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw SchemaError(child(path, key), "unknown key");
  }
}

const json& need(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) throw SchemaError(child(path, key), "missing required key");
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw SchemaError(where, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError(where, "expected a finite number");
  return d;
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw SchemaError(where, "expected an integer");
  return v.get<int>();
}

double number_or(const json& obj, const std::string& path, const std::string& key, double fallback) {
  return obj.contains(key) ? number(obj.at(key), child(path, key)) : fallback;
}

int integer_or(const json& obj, const std::string& path, const std::string& key, int fallback) {
  return obj.contains(key) ? integer(obj.at(key), child(path, key)) : fallback;
}

double positive(double v, const std::string& where) {
  if (!(v > 0)) throw SchemaError(where, "must be positive");
  return v;
}

double non_negative(double v, const std::string& where) {
  if (!(v >= 0)) throw SchemaError(where, "must be non-negative");
  return v;
}

ScenarioElement parse_element(const json& e, const std::string& path) {
  if (!e.is_object()) throw SchemaError(path, "expected an object");
  const json& type = need(e, path, "type");
  if (!type.is_string()) throw SchemaError(child(path, "type"), "expected a string");
  const std::string t = type.get<std::string>();
  if (t == "drift") {
    only_keys(e, path, {"type", "duration_ns"});
    ScenarioDrift d;
    d.duration_ns = positive(number(need(e, path, "duration_ns"), child(path, "duration_ns")),
                             child(path, "duration_ns"));
    return d;
  }
  if (t == "lens") {
    only_keys(e, path,
              {"type", "H0_gauss", "E0_V_per_m", "kappa_M", "kappa_E", "L_m", "duration_ns", "n_prime"});
    ScenarioLens s;
    s.H0_gauss = positive(number(need(e, path, "H0_gauss"), child(path, "H0_gauss")), child(path, "H0_gauss"));
    s.E0_V_per_m = non_negative(number_or(e, path, "E0_V_per_m", 0), child(path, "E0_V_per_m"));
    s.kappa_M = number_or(e, path, "kappa_M", 0);
    s.kappa_E = number_or(e, path, "kappa_E", 0);
    for (const char* k : {"kappa_M", "kappa_E"}) {
      const double v = k[6] == 'M' ? s.kappa_M : s.kappa_E;
      if (std::abs(v) > kappa_hard_limit) throw SchemaError(child(path, k), "|kappa| must not exceed 0.2");
    }
    s.L_m = positive(number_or(e, path, "L_m", 1), child(path, "L_m"));
    s.duration_ns = positive(number(need(e, path, "duration_ns"), child(path, "duration_ns")),
                             child(path, "duration_ns"));
    s.n_prime = integer_or(e, path, "n_prime", 0);
    if (s.n_prime < 0) throw SchemaError(child(path, "n_prime"), "must be non-negative");
    return s;
  }
  if (t == "transition") {
    only_keys(e, path, {"type", "n"});
    ScenarioTransition tr;
    tr.n = integer(need(e, path, "n"), child(path, "n"));
    if (tr.n < 0) throw SchemaError(child(path, "n"), "must be non-negative");
    return tr;
  }
  throw SchemaError(child(path, "type"), "unknown element type '" + t + "'");
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(line_column(text, e.byte ? e.byte - 1 : 0), "malformed JSON");
  }
  only_keys(doc, "", {"schema_version", "particle", "packet", "p0_eV", "start_time_ns", "beamline", "output"});
  Scenario s;
  s.schema_version = integer(need(doc, "", "schema_version"), "/schema_version");
  if (s.schema_version != 1) throw SchemaError("/schema_version", "only schema_version 1 is supported");

  if (doc.contains("particle")) {
    const json& p = doc.at("particle");
    only_keys(p, "/particle", {"mass_eV", "charge_sign"});
    s.mass_eV = positive(number(need(p, "/particle", "mass_eV"), "/particle/mass_eV"), "/particle/mass_eV");
    s.charge_sign = integer(need(p, "/particle", "charge_sign"), "/particle/charge_sign");
    if (s.charge_sign != -1 && s.charge_sign != 1) throw SchemaError("/particle/charge_sign", "must be -1 or +1");
  }

  const json& pk = need(doc, "", "packet");
  only_keys(pk, "/packet", {"n", "l", "sigma_r_um", "focus_time_ns"});
  s.n = integer(need(pk, "/packet", "n"), "/packet/n");
  if (s.n < 0) throw SchemaError("/packet/n", "must be non-negative");
  s.l = integer(need(pk, "/packet", "l"), "/packet/l");
  s.sigma_r_um = positive(number(need(pk, "/packet", "sigma_r_um"), "/packet/sigma_r_um"), "/packet/sigma_r_um");
  s.focus_time_ns = number_or(pk, "/packet", "focus_time_ns", 0);

  s.p0_eV = number(need(doc, "", "p0_eV"), "/p0_eV");
  s.start_time_ns = number_or(doc, "", "start_time_ns", 0);

  const json& bl = need(doc, "", "beamline");
  if (!bl.is_array()) throw SchemaError("/beamline", "expected an array");
  if (bl.empty()) throw SchemaError("/beamline", "beamline must contain at least one element");
  for (std::size_t i = 0; i < bl.size(); ++i) {
    s.beamline.push_back(parse_element(bl[i], "/beamline/" + std::to_string(i)));
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    only_keys(o, "/output", {"sample_dt_ns", "trajectory_csv"});
    s.sample_dt_ns = positive(number_or(o, "/output", "sample_dt_ns", s.sample_dt_ns), "/output/sample_dt_ns");
    if (o.contains("trajectory_csv")) {
      if (!o.at("trajectory_csv").is_string()) throw SchemaError("/output/trajectory_csv", "expected a string");
      s.trajectory_csv = o.at("trajectory_csv").get<std::string>();
    }
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path, "cannot read scenario file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  json doc = json::object();
  doc["schema_version"] = s.schema_version;
  doc["particle"] = {{"mass_eV", s.mass_eV}, {"charge_sign", s.charge_sign}};
  doc["packet"] = {{"n", s.n}, {"l", s.l}, {"sigma_r_um", s.sigma_r_um}, {"focus_time_ns", s.focus_time_ns}};
  doc["p0_eV"] = s.p0_eV;
  doc["start_time_ns"] = s.start_time_ns;
  json bl = json::array();
  for (const auto& e : s.beamline) {
    if (const auto* d = std::get_if<ScenarioDrift>(&e)) {
      bl.push_back({{"type", "drift"}, {"duration_ns", d->duration_ns}});
    } else if (const auto* l = std::get_if<ScenarioLens>(&e)) {
      bl.push_back({{"type", "lens"},
                    {"H0_gauss", l->H0_gauss},
                    {"E0_V_per_m", l->E0_V_per_m},
                    {"kappa_M", l->kappa_M},
                    {"kappa_E", l->kappa_E},
                    {"L_m", l->L_m},
                    {"duration_ns", l->duration_ns},
                    {"n_prime", l->n_prime}});
    } else {
      bl.push_back({{"type", "transition"}, {"n", std::get<ScenarioTransition>(e).n}});
    }
  }
  doc["beamline"] = bl;
  json out = {{"sample_dt_ns", s.sample_dt_ns}};
  if (s.trajectory_csv) out["trajectory_csv"] = *s.trajectory_csv;
  doc["output"] = out;
  return doc.dump(2) + "\n";
}

LensConfig to_lens(const ScenarioLens& l) {
  return LensConfig::from_lab(l.H0_gauss, l.E0_V_per_m, l.kappa_M, l.kappa_E, l.L_m, l.duration_ns * 1e-9,
                              l.n_prime);
}

ScenarioLens from_lens(const LensConfig& lens) {
  ScenarioLens l;
  l.H0_gauss = units::magnetic_from_natural(lens.field);
  l.E0_V_per_m = units::electric_from_natural(lens.e_field);
  l.kappa_M = lens.kappa_M;
  l.kappa_E = lens.kappa_E;
  l.L_m = units::length_from_natural(lens.length);
  l.duration_ns = units::ns(units::time_from_natural(lens.duration));
  l.n_prime = lens.n_prime;
  return l;
}

Beamline to_beamline(const Scenario& s) {
  Beamline b;
  b.particle = {s.mass_eV, s.charge_sign};
  b.packet = {s.n, s.l, units::length_to_natural(s.sigma_r_um * 1e-6),
              units::time_to_natural(s.focus_time_ns * 1e-9)};
  b.p0 = s.p0_eV;
  b.start_time = units::time_to_natural(s.start_time_ns * 1e-9);
  for (const auto& e : s.beamline) {
    if (const auto* d = std::get_if<ScenarioDrift>(&e)) {
      b.elements.push_back(Drift{units::time_to_natural(d->duration_ns * 1e-9)});
    } else if (const auto* l = std::get_if<ScenarioLens>(&e)) {
      b.elements.push_back(to_lens(*l));
    } else {
      b.elements.push_back(Transition{std::get<ScenarioTransition>(e).n});
    }
  }
  return b;
}

}  // namespace vlens
