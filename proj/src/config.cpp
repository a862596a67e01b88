// SPDX-License-Identifier: Apache-2.0
#include "reclab/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "reclab/error.hpp"

namespace reclab {
namespace {

enum class Field { Int, Number, Numbers, String, Box };

struct ParamSpec {
  Field type;
  bool required;
};

using ParamTable = std::map<std::string, ParamSpec>;

const std::map<ExperimentKind, ParamTable>& param_tables() {
  static const std::map<ExperimentKind, ParamTable> tables = {
      {ExperimentKind::Dichotomy,
       {{"samples", {Field::Int, false}}, {"horizon", {Field::Int, false}},
        {"exact_max_order", {Field::Int, false}}}},
      {ExperimentKind::Mixing,
       {{"F", {Field::Box, true}}, {"G", {Field::Box, true}}, {"n_min", {Field::Int, false}},
        {"n_max", {Field::Int, false}}, {"samples", {Field::Int, false}}}},
      {ExperimentKind::Dimension,
       {{"t", {Field::Numbers, false}}, {"epsilon", {Field::Number, false}},
        {"stride", {Field::Int, false}}, {"n_min", {Field::Int, false}},
        {"n_max", {Field::Int, false}}}},
      {ExperimentKind::BoxDim,
       {{"n0", {Field::Int, true}}, {"n1", {Field::Int, true}}, {"s_min", {Field::Number, false}},
        {"s_max", {Field::Number, false}}, {"s_step", {Field::Number, false}}}},
      {ExperimentKind::Subshift,
       {{"epsilon", {Field::Number, true}}, {"radii", {Field::Numbers, false}},
        {"samples", {Field::Int, false}}}},
      {ExperimentKind::Volume,
       {{"d", {Field::Int, true}}, {"r", {Field::Number, true}},
        {"deltas", {Field::Numbers, true}}, {"samples", {Field::Int, false}}}},
      {ExperimentKind::Sandwich,
       {{"mode", {Field::String, false}}, {"configurations", {Field::Int, false}},
        {"probes", {Field::Int, false}}, {"n_max", {Field::Int, false}}}},
      {ExperimentKind::ScaledMeasure,
       {{"ball", {Field::Box, true}}, {"n_min", {Field::Int, false}},
        {"n_max", {Field::Int, false}}, {"samples", {Field::Int, false}}}},
  };
  return tables;
}

bool needs_map(ExperimentKind k) { return k != ExperimentKind::Volume; }

bool needs_schedule(ExperimentKind k) {
  return k == ExperimentKind::Dichotomy || k == ExperimentKind::BoxDim ||
         k == ExperimentKind::ScaledMeasure;
}

class Checker {
 public:
  explicit Checker(std::vector<std::string>& out) : out_(out) {}

  void add(const std::string& message) { out_.push_back(message); }

  void only(const Json& obj, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
      if (!allowed.count(key)) add(where + ": unknown field \"" + key + "\"");
    }
  }

  bool is_object(const Json& j, const std::string& where) {
    if (j.is_object()) return true;
    add(where + ": expected an object");
    return false;
  }

  std::optional<std::vector<double>> numbers(const Json& j, const std::string& where) {
    if (j.is_number()) return std::vector<double>{j.get<double>()};
    if (!j.is_array() || j.empty()) {
      add(where + ": expected a non-empty number array");
      return std::nullopt;
    }
    std::vector<double> v;
    for (const auto& e : j) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        add(where + ": expected finite numbers");
        return std::nullopt;
      }
      v.push_back(e.get<double>());
    }
    return v;
  }

  void field(const Json& j, const std::string& where, Field type) {
    switch (type) {
      case Field::Int:
        if (!j.is_number_integer() || j.get<std::int64_t>() < 0) add(where + ": expected a non-negative integer");
        break;
      case Field::Number:
        if (!j.is_number() || !std::isfinite(j.get<double>())) add(where + ": expected a finite number");
        break;
      case Field::Numbers:
        numbers(j, where);
        break;
      case Field::String:
        if (!j.is_string()) add(where + ": expected a string");
        break;
      case Field::Box:
        if (is_object(j, where)) {
          only(j, where, {"center", "radii"});
          if (!j.contains("center") || !j.contains("radii")) {
            add(where + ": needs center and radii");
          } else {
            auto c = numbers(j["center"], where + ".center");
            auto r = numbers(j["radii"], where + ".radii");
            if (c && r && c->size() != r->size()) add(where + ": center and radii differ in length");
          }
        }
        break;
    }
  }

  // Runs a constructor, recording its error message as a violation.
  template <typename F>
  auto attempt(F&& make) -> std::optional<decltype(make())> {
    try {
      return make();
    } catch (const Error& e) {
      add(e.what());
    } catch (const std::exception& e) {
      add(e.what());
    }
    return std::nullopt;
  }

 private:
  std::vector<std::string>& out_;
};

std::optional<ExpandingMap> check_map(Checker& ck, const Json& j) {
  if (!ck.is_object(j, "map")) return std::nullopt;
  const std::string kind = j.value("kind", "");
  if (kind == "beta") {
    ck.only(j, "map", {"kind", "beta"});
    if (!j.contains("beta") || !j["beta"].is_number()) {
      ck.add("map.beta: expected a number");
      return std::nullopt;
    }
    return ck.attempt([&] { return ExpandingMap::beta(j["beta"].get<double>()); });
  }
  if (kind == "diagonal") {
    ck.only(j, "map", {"kind", "betas"});
    auto b = j.contains("betas") ? ck.numbers(j["betas"], "map.betas") : std::nullopt;
    if (!j.contains("betas")) ck.add("map.betas: missing");
    if (!b) return std::nullopt;
    return ck.attempt([&] { return ExpandingMap::diagonal(*b); });
  }
  if (kind == "integer_matrix") {
    ck.only(j, "map", {"kind", "rows"});
    if (!j.contains("rows") || !j["rows"].is_array() || j["rows"].empty()) {
      ck.add("map.rows: expected a non-empty array of integer rows");
      return std::nullopt;
    }
    std::vector<std::vector<std::int64_t>> rows;
    for (const auto& row : j["rows"]) {
      if (!row.is_array()) {
        ck.add("map.rows: expected integer rows");
        return std::nullopt;
      }
      std::vector<std::int64_t> r;
      for (const auto& e : row) {
        if (!e.is_number_integer()) {
          ck.add("map.rows: entries must be integers");
          return std::nullopt;
        }
        r.push_back(e.get<std::int64_t>());
      }
      rows.push_back(std::move(r));
    }
    return ck.attempt([&] { return ExpandingMap::integer_matrix(rows); });
  }
  ck.add("map.kind: expected beta, diagonal or integer_matrix");
  return std::nullopt;
}

std::optional<RadiiSchedule> check_schedule(Checker& ck, const Json& j) {
  if (!ck.is_object(j, "schedule")) return std::nullopt;
  const std::string kind = j.value("kind", "");
  auto get = [&](const char* key, bool required) -> std::optional<std::vector<double>> {
    if (!j.contains(key)) {
      if (required) ck.add(std::string("schedule.") + key + ": missing");
      return std::nullopt;
    }
    return ck.numbers(j[key], std::string("schedule.") + key);
  };
  if (kind == "power_law" || kind == "exponential") {
    const char* rate = kind == "power_law" ? "a" : "t";
    ck.only(j, "schedule", {"kind", "c", rate});
    auto c = get("c", true);
    auto p = get(rate, true);
    if (!c || !p) return std::nullopt;
    return ck.attempt([&] {
      return kind == "power_law" ? RadiiSchedule::power_law(*c, *p)
                                 : RadiiSchedule::exponential(*c, *p);
    });
  }
  if (kind == "beta_power") {
    ck.only(j, "schedule", {"kind", "betas", "alpha", "c"});
    auto b = get("betas", true);
    auto a = get("alpha", true);
    auto c = get("c", false);
    if (!b || !a) return std::nullopt;
    return ck.attempt([&] { return RadiiSchedule::beta_power(*b, *a, c.value_or(std::vector<double>{})); });
  }
  if (kind == "table") {
    ck.only(j, "schedule", {"kind", "rows"});
    if (!j.contains("rows") || !j["rows"].is_array() || j["rows"].empty()) {
      ck.add("schedule.rows: expected a non-empty array");
      return std::nullopt;
    }
    std::vector<std::vector<double>> rows;
    for (const auto& row : j["rows"]) {
      auto r = ck.numbers(row, "schedule.rows");
      if (!r) return std::nullopt;
      rows.push_back(*r);
    }
    return ck.attempt([&] { return RadiiSchedule::table(rows); });
  }
  ck.add("schedule.kind: expected power_law, exponential, beta_power or table");
  return std::nullopt;
}

void check_density(Checker& ck, const Json& j, const std::optional<ExpandingMap>& map,
                   const std::string& where = "density", bool allow_product = true) {
  if (!ck.is_object(j, where)) return;
  const std::string kind = j.value("kind", "");
  if (kind == "lebesgue") {
    ck.only(j, where, {"kind"});
  } else if (kind == "parry" || kind == "ulam") {
    const char* key = kind == "parry" ? "n_max" : "bins";
    ck.only(j, where, {"kind", "beta", key});
    if (j.contains(key)) ck.field(j[key], where + "." + key, Field::Int);
    if (j.contains("beta")) {
      ck.field(j["beta"], where + ".beta", Field::Number);
      if (j["beta"].is_number()) {
        const double b = j["beta"].get<double>();
        if (!(std::fabs(b) > 1)) ck.add("expansion requires |beta|>1");
        else if (kind == "parry" && b < 0) ck.add(where + ": parry densities need beta > 1; use ulam");
      }
    } else if (!map || map->kind() == MapKind::IntegerMatrix) {
      ck.add(where + ": beta missing and no beta or diagonal map to take it from");
    } else if (kind == "parry") {
      for (double b : map->betas()) {
        if (b < 0) ck.add(where + ": parry densities need beta > 1; use ulam");
      }
    }
  } else if (kind == "product" && allow_product) {
    ck.only(j, where, {"kind", "factors"});
    if (!j.contains("factors") || !j["factors"].is_array() || j["factors"].empty()) {
      ck.add(where + ".factors: expected a non-empty array");
      return;
    }
    if (map && j["factors"].size() != map->dimension()) {
      ck.add(where + ".factors: one factor per coordinate required");
    }
    for (std::size_t k = 0; k < j["factors"].size(); ++k) {
      const Json& f = j["factors"][k];
      if (f.is_object() && !f.contains("beta") && f.value("kind", "") != "lebesgue") {
        ck.add(where + ".factors[" + std::to_string(k) + "]: beta required");
        continue;
      }
      check_density(ck, f, std::nullopt, where + ".factors[" + std::to_string(k) + "]", false);
    }
  } else {
    ck.add(where + ".kind: expected lebesgue, parry, ulam or product");
  }
}

void check_params(Checker& ck, ExperimentKind kind, const Json& params) {
  if (!ck.is_object(params, "params")) return;
  const auto& table = param_tables().at(kind);
  for (const auto& [key, value] : params.items()) {
    auto it = table.find(key);
    if (it == table.end()) {
      ck.add("params: unknown field \"" + key + "\" for " + to_string(kind));
      continue;
    }
    ck.field(value, "params." + key, it->second.type);
  }
  for (const auto& [key, spec] : table) {
    if (spec.required && !params.contains(key)) ck.add("params." + key + ": missing");
  }
  auto num = [&](const char* key) -> std::optional<double> {
    if (params.contains(key) && params[key].is_number()) return params[key].get<double>();
    return std::nullopt;
  };
  if (auto e = num("epsilon"); e && !(*e > 0 && *e < 1)) ck.add("params.epsilon: must lie in (0,1)");
  if (kind == ExperimentKind::Volume) {
    if (auto r = num("r"); r && !(*r > 0 && *r < 1)) ck.add("params.r: must lie in (0,1)");
    if (auto d = num("d"); d && !(*d >= 1 && *d <= 8)) ck.add("params.d: must lie in 1..8");
  }
  if (kind == ExperimentKind::Sandwich && params.contains("mode")) {
    const auto m = params["mode"];
    if (!(m == "rect" || m == "scaled" || m == "hyperboloid")) {
      ck.add("params.mode: expected rect, scaled or hyperboloid");
    }
  }
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Dichotomy: return "dichotomy";
    case ExperimentKind::Mixing: return "mixing";
    case ExperimentKind::Dimension: return "dimension";
    case ExperimentKind::BoxDim: return "boxdim";
    case ExperimentKind::Subshift: return "subshift";
    case ExperimentKind::Volume: return "volume";
    case ExperimentKind::Sandwich: return "sandwich";
    case ExperimentKind::ScaledMeasure: return "scaled-measure";
  }
  return "?";
}

std::optional<ExperimentKind> experiment_from_string(const std::string& name) {
  for (auto k : {ExperimentKind::Dichotomy, ExperimentKind::Mixing, ExperimentKind::Dimension,
                 ExperimentKind::BoxDim, ExperimentKind::Subshift, ExperimentKind::Volume,
                 ExperimentKind::Sandwich, ExperimentKind::ScaledMeasure}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

namespace {

std::vector<std::string> check_all(const Json& config, ExperimentConfig* out) {
  std::vector<std::string> violations;
  Checker ck(violations);
  if (!config.is_object()) {
    ck.add("config: expected a JSON object");
    return violations;
  }
  ck.only(config, "config",
          {"experiment", "seed", "map", "density", "schedule", "target", "params", "threads", "label"});

  std::optional<ExperimentKind> kind;
  if (!config.contains("experiment") || !config["experiment"].is_string()) {
    ck.add("experiment: missing or not a string");
  } else if (!(kind = experiment_from_string(config["experiment"].get<std::string>()))) {
    ck.add("experiment: unknown kind \"" + config["experiment"].get<std::string>() + "\"");
  }
  if (!config.contains("seed")) {
    ck.add("seed: missing (a seed is mandatory)");
  } else if (!config["seed"].is_number_unsigned()) {
    ck.add("seed: expected an unsigned 64-bit integer");
  }
  if (config.contains("label") && !config["label"].is_string()) ck.add("label: expected a string");
  if (config.contains("threads")) ck.field(config["threads"], "threads", Field::Int);

  std::optional<ExpandingMap> map;
  if (config.contains("map")) {
    map = check_map(ck, config["map"]);
  } else if (kind && needs_map(*kind)) {
    ck.add("map: missing");
  }
  std::optional<RadiiSchedule> schedule;
  if (config.contains("schedule")) {
    schedule = check_schedule(ck, config["schedule"]);
  } else if (kind && needs_schedule(*kind)) {
    ck.add("schedule: missing");
  }
  if (map && schedule && kind != ExperimentKind::Volume) {
    const bool scalar_ok = config.value("target", "rect") == "hyperboloid";
    if (schedule->dimension() != map->dimension() && !(scalar_ok && schedule->dimension() == 1)) {
      ck.add("schedule: dimension does not match the map");
    }
  }
  TargetKind target = TargetKind::Rect;
  if (config.contains("target")) {
    if (config["target"] == "hyperboloid") target = TargetKind::Hyperboloid;
    else if (config["target"] != "rect") ck.add("target: expected rect or hyperboloid");
  }
  if (config.contains("density")) check_density(ck, config["density"], map);
  const Json params = config.value("params", Json::object());
  if (kind) check_params(ck, *kind, params);

  if (kind && map) {
    const bool one_dim_beta = map->kind() == MapKind::Beta;
    const bool coordinatewise = map->kind() != MapKind::IntegerMatrix;
    switch (*kind) {
      case ExperimentKind::Subshift:
        if (!one_dim_beta || map->beta() <= 1) ck.add("map: subshift needs a beta map with beta > 1");
        break;
      case ExperimentKind::BoxDim:
      case ExperimentKind::Dimension:
        if (!coordinatewise) ck.add("map: dimension experiments need a beta or diagonal map");
        break;
      default:
        break;
    }
  }
  if (kind == ExperimentKind::Dimension && !params.contains("t") && !schedule) {
    ck.add("params.t: give t or a schedule");
  }

  if (out && violations.empty()) {
    out->kind = *kind;
    out->seed = config["seed"].get<std::uint64_t>();
    out->source = config;
    out->map = map;
    out->schedule = schedule;
    out->target = target;
    if (config.contains("density")) out->density = config["density"];
    out->params = params;
    out->threads = config.value("threads", 0u);
  }
  return violations;
}

}  // namespace

std::vector<std::string> validate_config(const Json& config) { return check_all(config, nullptr); }

ExperimentConfig parse_config(const Json& config) {
  ExperimentConfig out;
  const auto violations = check_all(config, &out);
  if (!violations.empty()) {
    std::string msg = "invalid config:";
    for (const auto& v : violations) msg += " " + v + ";";
    msg.pop_back();
    fail(ErrorCode::Validation, msg);
  }
  return out;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::Validation, std::string("malformed JSON: ") + e.what());
  }
}

namespace {

DensityModel one_dim_density(const Json& spec, std::optional<double> beta) {
  const std::string kind = spec.value("kind", "lebesgue");
  if (kind == "lebesgue") return DensityModel::lebesgue(1);
  const double b = spec.contains("beta") ? spec["beta"].get<double>() : beta.value();
  if (kind == "parry") return DensityModel::parry(b, spec.value("n_max", 200u));
  return DensityModel::ulam(ExpandingMap::beta(b), spec.value("bins", 10000u));
}

}  // namespace

DensityModel build_density(const ExperimentConfig& config) {
  const Json& spec = config.density;
  const std::string kind = spec.value("kind", "lebesgue");
  const unsigned d = config.map ? config.map->dimension() : 1;
  if (kind == "lebesgue") return DensityModel::lebesgue(d);
  auto beta_of = [&](unsigned i) -> std::optional<double> {
    if (!config.map || config.map->kind() == MapKind::IntegerMatrix) return std::nullopt;
    return config.map->betas()[i];
  };
  std::vector<DensityModel> factors;
  for (unsigned i = 0; i < d; ++i) {
    factors.push_back(kind == "product" ? one_dim_density(spec["factors"][i], std::nullopt)
                                        : one_dim_density(spec, beta_of(i)));
  }
  return d == 1 ? factors.front() : DensityModel::product(std::move(factors));
}

}  // namespace reclab
