#include "padicaut/report.hpp"

#include <algorithm>
#include <cstdio>
#include <utility>

namespace padicaut {

namespace {

Json residue_json(const mpz_class& v) {
  if (v.fits_slong_p()) return v.get_si();
  return v.get_str();
}

Json norm_json(NormExp e) {
  if (!e) return "inf";
  return *e;
}

std::string monomial_key(const Monomial& m) {
  std::string out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(m[i]);
  }
  return out;
}

Json matrix_json(const std::vector<std::vector<std::int64_t>>& m) {
  Json rows = Json::array();
  for (const auto& r : m) rows.push_back(r);
  return rows;
}

}  // namespace

std::string input_digest(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json bounds_json(int d, std::int64_t p, const FieldSpec& field) {
  const CyclotomicData cyc = cyclotomic_data(field, p);
  Json j;
  j["d"] = d;
  j["p"] = p;
  j["field"] = field.to_string();
  j["M"] = schur_bound(d, cyc);
  j["M_prime"] = m_prime_bound(d, cyc);
  j["t"] = cyc.t;
  j["m"] = cyc.m;
  Json prov = {{"M", "schur_bound"}, {"M_prime", "m_prime_bound"}, {"t", "cyclotomic_data"}, {"m", "cyclotomic_data"}};
  if (field.kind == FieldSpec::Kind::Rationals) {
    j["minkowski"] = minkowski_bound(d, p);
    prov["minkowski"] = "minkowski_bound";
  }
  if (p == 2) {
    j["case"] = case_name(cyc.case2);
    prov["case"] = "cyclotomic_data";
  }
  j["provenance"] = prov;
  return j;
}

Json certificate_json(const LinearizationCertificate& cert) {
  Json j;
  j["p"] = cert.p;
  j["ell"] = cert.ell;
  j["q"] = cert.q;
  j["d"] = cert.d;
  j["group_order"] = cert.group_order;
  j["fixed_point"] = cert.fixed_point;
  Json jac = Json::array();
  for (const auto& m : cert.jacobians) jac.push_back(matrix_json(m));
  j["jacobians"] = jac;
  j["reduction_injective"] = cert.reduction_injective;
  j["reduction_homomorphism"] = cert.reduction_homomorphism;
  j["support_condition"] = cert.support_condition;
  j["homomorphism"] = cert.homomorphism;
  j["injective"] = cert.injective;
  j["chain"] = {{"vp_order", cert.vp_order},
                {"gl_order_valuation", cert.gl_order_valuation},
                {"minkowski_bound", cert.minkowski_bound},
                {"m_prime_bound", cert.m_prime_bound},
                {"holds", cert.chain_holds}};
  j["bound_saturated"] = cert.bound_saturated;
  j["passed"] = cert.passed();
  j["provenance"] = {{"ell", "choose_good_prime"},
                     {"fixed_point", "fixed_point"},
                     {"jacobians", "jacobian_mod"},
                     {"vp_order", "group_closure"},
                     {"gl_order_valuation", "gl_order_valuation"},
                     {"minkowski_bound", "minkowski_bound"},
                     {"m_prime_bound", "m_prime_bound"}};
  return j;
}

Json optimal_group_json(const OptimalGroupReport& rep) {
  Json j;
  j["d"] = rep.d;
  j["p"] = rep.p;
  j["t"] = rep.cyc.t;
  j["m"] = rep.cyc.m;
  j["blocks"] = rep.r;
  j["schur_bound"] = rep.schur_bound;
  j["explicit_matrices"] = rep.explicit_matrices;
  if (rep.full_order) j["order"] = rep.full_order->get_str();
  if (rep.group) j["closure_order"] = rep.group->size();
  if (rep.sylow) j["sylow_order"] = rep.sylow->size();
  j["sylow_valuation"] = rep.explicit_matrices ? rep.sylow_valuation : rep.schur_bound;
  j["saturates"] = (rep.explicit_matrices ? rep.sylow_valuation : rep.schur_bound) == rep.schur_bound;
  j["provenance"] = {{"schur_bound", "schur_bound"}, {"closure_order", "group_closure"}, {"sylow_order", "group_closure"}};
  return j;
}

Json series_table(const TateSeries& s) {
  Json t = Json::object();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.residue(i) != 0) t[monomial_key(s.basis().exponent(i))] = residue_json(s.residue(i));
  }
  return t;
}

Json flow_json(const TateFlow& phi) {
  Json j;
  j["p"] = phi.p;
  j["precision"] = phi.precision;
  j["degree"] = phi.degree;
  j["t_degree"] = phi.t_degree;
  j["dim"] = phi.dim;
  j["mahler_terms"] = phi.mahler.size();
  j["iterates_verified"] = phi.iterates_verified;
  j["power_precision"] = phi.power_precision;
  j["power_tail"] = norm_json(phi.power_tail);
  Json comps = Json::array();
  for (int c = 0; c < phi.dim; ++c) {
    Json table = Json::object();
    for (std::size_t k = 0; k < phi.power.size(); ++k) {
      const TateSeries& s = phi.power[k][c];
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.residue(i) == 0) continue;
        table[monomial_key(s.basis().exponent(i)) + "," + std::to_string(k)] = residue_json(s.residue(i));
      }
    }
    comps.push_back(table);
  }
  j["components"] = comps;
  j["provenance"] = {{"components", phi.mahler.empty() ? "integrate_vector_field" : "bell_poonen_flow"}};
  return j;
}

Json field_json(const VectorField& x) {
  Json j;
  j["p"] = x.prime();
  j["precision"] = x.precision();
  j["degree"] = x.degree();
  j["norm"] = norm_json(x.gauss_norm());
  Json comps = Json::array();
  for (const auto& s : x.components()) comps.push_back(series_table(s));
  j["components"] = comps;
  return j;
}

Json lie_json(const LieAlgebraBasis& h) {
  Json j;
  j["dimension"] = h.dim();
  j["ambient_dim"] = h.ambient_dim;
  j["degree"] = h.degree;
  j["zero_threshold"] = h.policy.zero_threshold();
  j["derived_dims"] = h.derived_dims;
  j["lower_central_dims"] = h.lower_central_dims;
  j["dl"] = h.derived_length ? Json(*h.derived_length) : Json("not solvable");
  j["class"] = h.nilpotency_class ? Json(*h.nilpotency_class) : Json("not nilpotent");
  j["precision_warning"] = h.precision_warning;
  j["bound_holds"] = h.derived_length && *h.derived_length <= h.ambient_dim;
  Json basis = Json::array();
  for (const auto& b : h.basis) basis.push_back(field_json(b));
  j["basis"] = basis;
  j["note"] = "bracket-generated subalgebra of the seed fields";
  j["provenance"] = {{"dl", "derived_length"}, {"class", "nilpotency_class"}, {"dimension", "lie_closure"}};
  return j;
}

Json witness_json(const VdlWitness& w) {
  Json j;
  j["n"] = w.n;
  j["faithful"] = w.faithful;
  j["powers_noncommuting"] = w.powers_noncommuting;
  j["power_exponents"] = w.power_exponents;
  j["commutators_are_translations"] = w.commutators_are_translations;
  j["translations_commute"] = w.translations_commute;
  j["generic_commutator_nontrivial"] = w.generic_commutator_nontrivial;
  j["dl"] = w.derived_length;
  j["class"] = w.nilpotency_class;
  j["degenerate_commute"] = w.degenerate_commute;
  j["provenance"] = {{"dl", "derived_length"}, {"class", "nilpotency_class"}, {"powers_noncommuting", "bracket_polynomiality"}};
  return j;
}

Json theorem_b_json(const TheoremBReport& rep) {
  Json j;
  j["d"] = rep.d;
  j["p"] = rep.p;
  j["generator_class"] = rep.generator_class;
  j["had_fixed_point"] = rep.had_fixed_point;
  j["orbit_exponent"] = rep.orbit_exponent;
  j["fixed_point"] = rep.fixed_point;
  j["affine_orders"] = rep.affine_orders;
  j["extra_p_powers"] = rep.extra_p_powers;
  j["congruence_levels"] = rep.congruence_levels;
  Json maps = Json::array();
  for (const auto& g : rep.analytic_generators) maps.push_back(g.to_text());
  j["analytic_generators"] = maps;
  j["flows_verified"] = rep.flows_verified;
  j["lie"] = lie_json(rep.algebra);
  j["dl"] = rep.algebra.derived_length.value_or(-1);
  j["class"] = rep.algebra.nilpotency_class ? Json(*rep.algebra.nilpotency_class) : Json("not nilpotent");
  j["bound_holds"] = rep.bound_holds;
  j["equality"] = rep.equality;
  j["provenance"] = {{"generator_class", "nilpotency_class"},
                     {"fixed_point", "fixed_point"},
                     {"affine_orders", "theorem_b"},
                     {"dl", "derived_length"},
                     {"class", "nilpotency_class"}};
  return j;
}

namespace {

enum class T { Int, Bool, Str, Arr, Obj, IntOrStr, Any };

bool has_type(const Json& v, T t) {
  switch (t) {
    case T::Int: return v.is_number_integer();
    case T::Bool: return v.is_boolean();
    case T::Str: return v.is_string();
    case T::Arr: return v.is_array();
    case T::Obj: return v.is_object();
    case T::IntOrStr: return v.is_number_integer() || v.is_string();
    case T::Any: return true;
  }
  return false;
}

void require(const Json& j, const std::vector<std::pair<std::string, T>>& keys, const std::string& where,
             std::vector<std::string>& errs) {
  if (!j.is_object()) {
    errs.push_back(where + " is not an object");
    return;
  }
  for (const auto& [k, t] : keys) {
    if (!j.contains(k)) errs.push_back(where + " lacks \"" + k + "\"");
    else if (!has_type(j[k], t)) errs.push_back(where + "." + k + " has the wrong type");
  }
}

void check_tables(const Json& comps, std::size_t key_len, const std::string& where, std::vector<std::string>& errs) {
  if (!comps.is_array()) return;
  for (const auto& table : comps) {
    if (!table.is_object()) {
      errs.push_back(where + " entry is not a table");
      continue;
    }
    for (const auto& [k, v] : table.items()) {
      const std::size_t parts = static_cast<std::size_t>(std::count(k.begin(), k.end(), ',')) + 1;
      if (key_len && parts != key_len) errs.push_back(where + " key " + k + " has the wrong arity");
      if (!has_type(v, T::IntOrStr)) errs.push_back(where + " value at " + k + " is not a residue");
    }
  }
}

}  // namespace

std::vector<std::string> validate_report(const std::string& kind, const Json& j) {
  std::vector<std::string> errs;
  if (kind == "bounds") {
    require(j, {{"d", T::Int}, {"p", T::Int}, {"M", T::Int}, {"M_prime", T::Int}, {"t", T::Int}, {"m", T::Int}, {"provenance", T::Obj}},
            kind, errs);
    if (j.is_object() && j.value("p", 0) == 2) require(j, {{"case", T::Str}}, kind, errs);
  } else if (kind == "certificate") {
    require(j, {{"p", T::Int}, {"ell", T::Int}, {"d", T::Int}, {"group_order", T::Int}, {"fixed_point", T::Arr},
                {"jacobians", T::Arr}, {"homomorphism", T::Bool}, {"injective", T::Bool}, {"chain", T::Obj},
                {"bound_saturated", T::Bool}, {"passed", T::Bool}, {"provenance", T::Obj}},
            kind, errs);
    if (j.is_object() && j.contains("chain")) {
      require(j["chain"], {{"vp_order", T::Int}, {"gl_order_valuation", T::Int}, {"m_prime_bound", T::Int}, {"holds", T::Bool}},
              "certificate.chain", errs);
    }
  } else if (kind == "optimal") {
    require(j, {{"d", T::Int}, {"p", T::Int}, {"schur_bound", T::Int}, {"sylow_valuation", T::Int}, {"saturates", T::Bool}}, kind,
            errs);
  } else if (kind == "flow") {
    require(j, {{"p", T::Int}, {"precision", T::Int}, {"degree", T::Int}, {"t_degree", T::Int}, {"dim", T::Int},
                {"components", T::Arr}, {"provenance", T::Obj}},
            kind, errs);
    if (j.is_object() && j.contains("dim") && j.contains("components")) {
      check_tables(j["components"], static_cast<std::size_t>(j["dim"].get<int>()) + 1, "flow.components", errs);
    }
  } else if (kind == "field") {
    require(j, {{"p", T::Int}, {"precision", T::Int}, {"degree", T::Int}, {"components", T::Arr}}, kind, errs);
    if (j.is_object() && j.contains("components") && j["components"].is_array()) {
      check_tables(j["components"], j["components"].size(), "field.components", errs);
    }
  } else if (kind == "lie") {
    require(j, {{"dimension", T::Int}, {"ambient_dim", T::Int}, {"dl", T::Any}, {"class", T::Any}, {"basis", T::Arr},
                {"bound_holds", T::Bool}, {"provenance", T::Obj}},
            kind, errs);
    if (j.is_object() && j.contains("basis") && j["basis"].is_array()) {
      for (const auto& b : j["basis"]) {
        for (const auto& e : validate_report("field", b)) errs.push_back("lie.basis: " + e);
      }
    }
  } else if (kind == "nilpotent") {
    require(j, {{"class", T::Any}, {"dl", T::Any}, {"provenance", T::Obj}}, kind, errs);
  } else if (kind == "theoremB") {
    require(j, {{"d", T::Int}, {"p", T::Int}, {"dl", T::Int}, {"lie", T::Obj}, {"bound_holds", T::Bool}, {"provenance", T::Obj}},
            kind, errs);
    if (j.is_object() && j.contains("lie")) {
      for (const auto& e : validate_report("lie", j["lie"])) errs.push_back("theoremB: " + e);
    }
  } else if (kind == "prime-search") {
    require(j, {{"p", T::Int}, {"ell", T::Int}, {"provenance", T::Obj}}, kind, errs);
  } else {
    errs.push_back("unknown report kind " + kind);
  }
  return errs;
}

}  // namespace padicaut
