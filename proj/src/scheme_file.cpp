#include "cinfty/scheme_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "cinfty/flow.hpp"

namespace cinfty {

namespace {

using nlohmann::json;

const json& require(const json& doc, const char* key) {
  if (!doc.contains(key)) throw SchemeFileError(std::string("missing field '") + key + "'");
  return doc.at(key);
}

std::vector<std::string> string_list(const json& node, const char* key) {
  if (!node.is_array()) throw SchemeFileError(std::string("field '") + key + "' must be a list");
  std::vector<std::string> out;
  for (const auto& v : node) {
    if (!v.is_string()) throw SchemeFileError(std::string("field '") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::vector<Expr> parse_all(const std::vector<std::string>& srcs, const VarList& vars, const char* field) {
  std::vector<Expr> out;
  for (const auto& s : srcs) {
    try {
      out.push_back(parse_expr(s, vars));
    } catch (const ParseError& e) {
      throw SchemeFileError(std::string(field) + " entry \"" + s + "\": " + e.what());
    }
  }
  return out;
}

double positive(const json& opts, const char* key, double fallback) {
  if (!opts.contains(key)) return fallback;
  const auto& v = opts.at(key);
  if (!v.is_number()) throw SchemeFileError(std::string("option '") + key + "' must be a number");
  return v.get<double>();
}

} // namespace

LoadedScheme parse_scheme(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemeFileError(std::string("not a valid scheme document: ") + e.what());
  }
  if (!doc.is_object()) throw SchemeFileError("scheme document must be an object");
  static const std::set<std::string> known = {"variables", "ideal",   "region",        "derivation",
                                              "flow_closed_form", "options", "declared_flags"};
  for (const auto& item : doc.items())
    if (!known.count(item.key())) throw SchemeFileError("unknown field '" + item.key() + "'");

  VarList vars;
  try {
    vars = VarList(string_list(require(doc, "variables"), "variables"));
  } catch (const std::invalid_argument& e) {
    throw SchemeFileError(std::string("variables: ") + e.what());
  }
  const int n = vars.size();

  std::vector<Expr> ideal = parse_all(string_list(require(doc, "ideal"), "ideal"), vars, "ideal");
  std::vector<Expr> region;
  if (doc.contains("region")) region = parse_all(string_list(doc.at("region"), "region"), vars, "region");

  const json& der = require(doc, "derivation");
  if (!der.is_object()) throw SchemeFileError("field 'derivation' must map variable names to expressions");
  std::vector<Expr> coeffs(static_cast<std::size_t>(n), Expr::constant(0));
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (const auto& item : der.items()) {
    const auto idx = vars.index_of(item.key());
    if (!idx) throw SchemeFileError("derivation names unknown variable '" + item.key() + "'");
    if (!item.value().is_string()) throw SchemeFileError("derivation coefficient for '" + item.key() + "' must be a string");
    coeffs[static_cast<std::size_t>(*idx)] =
        parse_all({item.value().get<std::string>()}, vars, "derivation").front();
    seen[static_cast<std::size_t>(*idx)] = true;
  }
  for (int i = 0; i < n; ++i)
    if (!seen[static_cast<std::size_t>(i)]) throw SchemeFileError("derivation has no coefficient for '" + vars.name(i) + "'");

  LoadedScheme out{nullptr, LiftedField(std::make_shared<SchemePresentation>(vars, std::vector<Expr>{}), coeffs),
                   std::nullopt, {}, Box::cube(n, -2.0, 2.0), 9};

  double tol = 1e-9;
  if (doc.contains("options")) {
    const json& o = doc.at("options");
    if (!o.is_object()) throw SchemeFileError("field 'options' must be an object");
    static const std::set<std::string> known_opts = {"tol",       "horizon",   "rel_tol", "abs_tol", "probe_step",
                                                     "event_tol", "max_steps", "box",     "grid"};
    for (const auto& item : o.items())
      if (!known_opts.count(item.key())) throw SchemeFileError("unknown option '" + item.key() + "'");
    tol = positive(o, "tol", tol);
    auto& io = out.integrator;
    io.horizon = positive(o, "horizon", io.horizon);
    io.rel_tol = positive(o, "rel_tol", io.rel_tol);
    io.abs_tol = positive(o, "abs_tol", io.abs_tol);
    io.probe_step = positive(o, "probe_step", io.probe_step);
    io.event_tol = positive(o, "event_tol", io.event_tol);
    io.max_steps = static_cast<long>(positive(o, "max_steps", static_cast<double>(io.max_steps)));
    if (o.contains("grid")) {
      if (!o.at("grid").is_number_integer()) throw SchemeFileError("option 'grid' must be an integer");
      out.grid = o.at("grid").get<int>();
      if (out.grid < 1) throw SchemeFileError("option 'grid' must be positive");
    }
    if (o.contains("box")) {
      const json& b = o.at("box");
      if (!b.is_array() || static_cast<int>(b.size()) != n)
        throw SchemeFileError("option 'box' must list one [lo, hi] pair per variable");
      for (int i = 0; i < n; ++i) {
        const json& pair = b.at(static_cast<std::size_t>(i));
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
          throw SchemeFileError("option 'box' entries must be [lo, hi] number pairs");
        out.box.lower[i] = pair[0].get<double>();
        out.box.upper[i] = pair[1].get<double>();
        if (!(out.box.lower[i] <= out.box.upper[i])) throw SchemeFileError("option 'box' has lo > hi");
      }
    }
    try {
      io.validate();
    } catch (const std::invalid_argument& e) {
      throw SchemeFileError(std::string("options: ") + e.what());
    }
  }

  auto scheme = std::make_shared<SchemePresentation>(vars, std::move(ideal), std::move(region), tol);
  if (doc.contains("declared_flags")) {
    const json& f = doc.at("declared_flags");
    if (!f.is_object()) throw SchemeFileError("field 'declared_flags' must be an object");
    for (const auto& item : f.items()) {
      if (item.key() != "germ_determined") throw SchemeFileError("unknown declared flag '" + item.key() + "'");
      if (!item.value().is_boolean()) throw SchemeFileError("declared flag 'germ_determined' must be a boolean");
      scheme->declare_germ_determined(item.value().get<bool>());
    }
  }
  out.scheme = scheme;
  out.field = LiftedField(scheme, std::move(coeffs));

  if (doc.contains("flow_closed_form") && !doc.at("flow_closed_form").is_null()) {
    VarList xt;
    try {
      xt = flow_vars(vars);
    } catch (const std::invalid_argument& e) {
      throw SchemeFileError(e.what());
    }
    auto srcs = string_list(doc.at("flow_closed_form"), "flow_closed_form");
    if (static_cast<int>(srcs.size()) != n)
      throw SchemeFileError("flow_closed_form needs one expression per variable");
    out.flow_closed_form = parse_all(srcs, xt, "flow_closed_form");
  }
  return out;
}

LoadedScheme load_scheme(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemeFileError("cannot read scheme file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scheme(buf.str());
}

} // namespace cinfty
