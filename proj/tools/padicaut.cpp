#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "padicaut/arith.hpp"
#include "padicaut/error.hpp"
#include "padicaut/report.hpp"

using namespace padicaut;

namespace {

struct Globals {
  std::int64_t p = 3;
  int precision = 12;
  int deg_cap = 8;
  int t_cap = 10;
  int guard = 2;
  std::uint64_t seed = 1;
  std::uint64_t budget = 10000000;
  std::string json_out;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

// "f1 = ...; f2 = ..." or the same with "u" names, one coordinate per entry.
std::vector<Polynomial> parse_components(const std::string& text, char prefix) {
  std::map<int, std::string> parts;
  std::string item;
  std::stringstream ss(text);
  while (std::getline(ss, item, ';')) {
    std::stringstream lines(item);
    std::string line;
    while (std::getline(lines, line)) {
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      const std::string lhs = trim(line.substr(0, eq == std::string::npos ? 0 : eq));
      if (eq == std::string::npos || lhs.size() < 2 || lhs[0] != prefix) {
        throw InputError(std::string("expected '") + prefix + "<i> = <polynomial>' in: " + line);
      }
      const int idx = std::stoi(lhs.substr(1));
      if (idx < 1 || !parts.emplace(idx, line.substr(eq + 1)).second) throw InputError("bad or repeated component " + lhs);
    }
  }
  const int d = parts.empty() ? 0 : parts.rbegin()->first;
  if (d == 0 || static_cast<int>(parts.size()) != d) throw InputError("components must be numbered 1..d without gaps");
  std::vector<Polynomial> out;
  for (const auto& [i, expr] : parts) out.push_back(parse_polynomial(expr, d));
  return out;
}

void emit(const Json& j, const std::string& kind, const Globals& g) {
  const auto errs = validate_report(kind, j);
  if (!errs.empty()) throw CertificateError("report failed its schema: " + errs.front());
  const std::string text = j.dump(2);
  if (!g.json_out.empty()) {
    std::ofstream out(g.json_out);
    if (!out) throw InputError("cannot write " + g.json_out);
    out << text << "\n";
  }
  std::cout << text << "\n";
}

FlowOptions flow_options(const Globals& g) {
  FlowOptions o;
  o.precision = g.precision;
  o.degree = g.deg_cap;
  o.t_degree = g.t_cap;
  o.guard = g.guard;
  return o;
}

std::vector<UniTri> parse_unitri_gens(int n, const std::string& list, std::optional<mpz_class> mod) {
  std::vector<UniTri> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(UniTri::parse(n, item, mod));
  }
  if (out.empty()) throw InputError("no generators given");
  return out;
}

// [[1,1,0],[0,1,0],[0,0,1]] literals, or a JSON list of them.
std::vector<UniTri> parse_matrix_gens(const std::string& text, std::optional<mpz_class> mod) {
  Json j = Json::parse(text);
  if (!j.is_array() || j.empty()) throw InputError("matrix generators must be a JSON list");
  if (j[0].is_array() && !j[0].empty() && j[0][0].is_number()) j = Json::array({j});
  std::vector<UniTri> out;
  for (const auto& m : j) {
    std::vector<std::vector<mpz_class>> rows;
    for (const auto& r : m) {
      std::vector<mpz_class> row;
      for (const auto& v : r) row.emplace_back(v.is_string() ? v.get<std::string>() : std::to_string(v.get<long long>()));
      rows.push_back(std::move(row));
    }
    out.push_back(UniTri::from_rows(rows, mod));
  }
  return out;
}

// [["t", ["b1", ...]], ...] with rational strings or integers.
std::vector<RationalExp> parse_exp_gens(const std::string& text) {
  const Json j = Json::parse(text);
  auto q = [](const Json& v) { return v.is_string() ? mpq_class(v.get<std::string>()) : mpq_class(v.get<long>()); };
  std::vector<RationalExp> out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[1].is_array()) throw InputError("exp generators are [t, [b1, ..., bn]] pairs");
    std::vector<mpq_class> b;
    for (const auto& v : e[1]) b.push_back(q(v));
    out.emplace_back(q(e[0]), std::move(b));
  }
  if (out.empty()) throw InputError("no generators given");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-adic methods for finite and nilpotent groups of polynomial automorphisms"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--p", g.p, "prime")->check(CLI::PositiveNumber);
  app.add_option("--precision", g.precision, "p-adic precision N")->check(CLI::PositiveNumber);
  app.add_option("--deg-cap", g.deg_cap, "total degree cap D")->check(CLI::NonNegativeNumber);
  app.add_option("--t-cap", g.t_cap, "t-degree cap K")->check(CLI::PositiveNumber);
  app.add_option("--guard", g.guard, "guard digits")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", g.seed, "seed for sampled checks");
  app.add_option("--budget", g.budget, "enumeration budget");
  app.add_option("--json-out", g.json_out, "also write the report here");
  app.fallthrough();

  int d = 1;
  std::string field = "Q";
  bool optimal = false;
  auto* bounds = app.add_subcommand("bounds", "Minkowski, Schur and M' bounds");
  bounds->add_option("--d", d, "dimension")->required()->check(CLI::PositiveNumber);
  bounds->add_option("--field", field, "Q, cyclotomic(n) or explicit(t,m[,A|B|C])");
  bounds->add_flag("--optimal", optimal, "attach the optimal group closure");

  std::uint64_t lower = 1;
  auto* prime = app.add_subcommand("prime-search", "smallest prime generator of (Z/p^2)^x above a bound");
  prime->add_option("--lower", lower, "search strictly above this value");

  std::string group_file;
  auto* lin = app.add_subcommand("linearize", "finite p-group pipeline with a linearization certificate");
  lin->add_option("--group", group_file, "file of generators in PolyMap text format")->required();

  std::string map_text, map_file;
  auto* flow = app.add_subcommand("flow", "Bell-Poonen flow of a map");
  flow->add_option("--map", map_text, "\"f1 = ...; f2 = ...\"");
  flow->add_option("--map-file", map_file, "PolyMap text file");

  std::string field_text;
  auto* vf = app.add_subcommand("vf-flow", "flow of a vector field by Picard iteration");
  vf->add_option("--field", field_text, "\"u1 = ...; u2 = ...\"")->required();

  std::vector<std::string> seeds;
  auto* lie = app.add_subcommand("lie", "bracket closure, derived length and class");
  lie->add_option("--field", seeds, "seed field, repeatable")->required();

  int unitri = 0, exp_n = 0;
  std::string gens_text, matrices, exp_gens;
  std::optional<std::string> modulus;
  std::uint64_t power = 0;
  int samples = 0;
  auto* nil = app.add_subcommand("nilpotent", "commutator calculus in unitriangular and exp groups");
  nil->add_option("--unitri", unitri, "matrix size n");
  nil->add_option("--gens", gens_text, "comma list such as E12,E23 or I+2E13");
  nil->add_option("--matrices", matrices, "JSON list of matrices");
  nil->add_option("--exp", exp_n, "use the exp(tA) x| Q^n family of size n");
  nil->add_option("--exp-gens", exp_gens, "JSON list of [t, [b1..bn]] elements");
  nil->add_option("--mod", modulus, "finite quotient modulus");
  nil->add_option("--power", power, "report the index of the m-th power subgroup");
  nil->add_option("--multilinear", samples, "sampled multilinearity checks");

  int family = 0;
  auto* thb = app.add_subcommand("theoremB", "nilpotent group pipeline: flows, Lie algebra, dl <= d");
  thb->add_option("--group", group_file, "file of generators in PolyMap text format");
  thb->add_option("--exp-family", family, "use the exp family of size n acting on the plane");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }

  try {
    if (g.p < 2 || !is_prime(static_cast<std::uint64_t>(g.p))) throw InputError("--p must be prime");
    if (*bounds) {
      Json j = bounds_json(d, g.p, FieldSpec::parse(field));
      if (optimal) j["optimal"] = optimal_group_json(optimal_group(d, g.p, FieldSpec::parse(field)));
      emit(j, "bounds", g);
    } else if (*prime) {
      const std::uint64_t ell = find_prime_generator(g.p, lower, {}, g.budget);
      Json j = {{"p", g.p}, {"ell", ell}, {"lower", lower},
                {"order_mod_p2", multiplicative_order(ell, static_cast<std::uint64_t>(g.p * g.p))},
                {"provenance", {{"ell", "find_prime_generator"}}}};
      emit(j, "prime-search", g);
    } else if (*lin) {
      const std::string text = read_file(group_file);
      const auto gens = parse_polymap_list(text);
      GroupCaps caps;
      const FiniteAutGroup group = group_closure(gens, caps, gens.empty() ? 1 : -1);
      Json j = certificate_json(linearize_group(group, g.p, g.budget));
      j["input_digest"] = input_digest(text);
      emit(j, "certificate", g);
    } else if (*flow) {
      PolyMap f;
      if (!map_file.empty()) f = parse_polymap(read_file(map_file));
      else if (!map_text.empty()) f = PolyMap(Ring::rationals(), parse_components(map_text, 'f'));
      else throw InputError("flow needs --map or --map-file");
      const TateFlow phi = bell_poonen_flow(f, g.p, flow_options(g));
      Json j = flow_json(phi);
      j["vector_field"] = field_json(flow_vector_field(phi));
      emit(j, "flow", g);
    } else if (*vf) {
      const auto u = parse_components(field_text, 'u');
      const auto x = VectorField::from_polynomials(u, g.p, g.precision, g.deg_cap);
      const TateFlow phi = integrate_vector_field(x, flow_options(g));
      Json j = flow_json(phi);
      j["round_trip"] = flow_vector_field(phi) == x.truncate(phi.degree);
      emit(j, "flow", g);
    } else if (*lie) {
      std::vector<VectorField> xs;
      for (const auto& s : seeds) xs.push_back(VectorField::from_polynomials(parse_components(s, 'u'), g.p, g.precision, g.deg_cap));
      emit(lie_json(lie_closure(xs, PrecisionPolicy(g.precision, g.guard))), "lie", g);
    } else if (*nil) {
      Json j;
      std::optional<mpz_class> mod;
      if (modulus) mod = mpz_class(*modulus);
      if (exp_n > 0 || !exp_gens.empty()) {
        const auto gens = exp_gens.empty() ? exp_family_generators(exp_n) : parse_exp_gens(exp_gens);
        const int n = gens.front().n();
        const std::function<std::string(const RationalExp&)> key = [](const RationalExp& e) { return key_of(e); };
        const auto cls = nilpotency_class(gens, n + 1);
        j["class"] = cls ? Json(*cls) : Json("not nilpotent");
        const auto dl = derived_length(gens, n, key);
        j["dl"] = dl ? Json(*dl) : Json("not solvable");
        if (exp_n > 1 && exp_gens.empty()) j["witness"] = witness_json(faithfulness_and_vdl_witness(exp_n));
        if (samples > 0) {
          const auto m = multilinearity_check(gens, samples, g.seed);
          j["multilinearity"] = {{"weight", m.weight}, {"checks", m.checks}, {"violations", m.violations}, {"seed", g.seed}};
        }
      } else {
        if (unitri < 2) throw InputError("nilpotent needs --unitri n, --exp n or --exp-gens");
        const auto gens = matrices.empty() ? parse_unitri_gens(unitri, gens_text, mod) : parse_matrix_gens(matrices, mod);
        if (mod) {
          const SeriesReport r = derived_series_quotient(gens, *mod, g.budget);
          j["class"] = r.nilpotency_class;
          j["dl"] = r.derived_length;
          j["order"] = r.derived_orders.front();
          j["derived_orders"] = r.derived_orders;
          j["lower_central_orders"] = r.lower_central_orders;
          if (power > 0) {
            const auto idx = power_subgroup_index(gens, power, *mod, g.budget);
            j["power_index"] = {{"m", power}, {"index", idx.index}, {"group_order", idx.group_order},
                                {"power_subgroup_order", idx.power_subgroup_order}};
          }
        } else {
          const std::function<std::string(const UniTri&)> key = [](const UniTri& e) { return key_of(e); };
          const auto cls = nilpotency_class(gens, unitri);
          j["class"] = cls ? Json(*cls) : Json("not nilpotent");
          const auto dl = derived_length(gens, unitri - 1, key);
          j["dl"] = dl ? Json(*dl) : Json("not solvable");
        }
        if (samples > 0) {
          const auto m = multilinearity_check(gens, samples, g.seed);
          j["multilinearity"] = {{"weight", m.weight}, {"checks", m.checks}, {"violations", m.violations}, {"seed", g.seed}};
        }
      }
      j["provenance"] = {{"class", "nilpotency_class"}, {"dl", mod ? "derived_series_quotient" : "derived_length"}};
      emit(j, "nilpotent", g);
    } else if (*thb) {
      std::vector<PolyMap> gens;
      std::string text;
      if (family > 0) {
        gens = exp_family_maps(family);
        text = polymaps_to_text(gens);
      } else if (!group_file.empty()) {
        text = read_file(group_file);
        gens = parse_polymap_list(text);
      } else {
        throw InputError("theoremB needs --group or --exp-family");
      }
      TheoremBOptions o;
      o.precision = g.precision;
      o.degree = g.deg_cap;
      o.t_degree = g.t_cap;
      o.guard = g.guard;
      o.budget = g.budget;
      Json j = theorem_b_json(theorem_b(gens, g.p, o));
      j["input_digest"] = input_digest(text);
      if (family > 1) {
        const VdlWitness w = faithfulness_and_vdl_witness(family);
        j["witness"] = witness_json(w);
        j["optimal_instance"] = j["equality"].get<bool>() && w.faithful && w.powers_noncommuting && w.derived_length == 2;
      }
      emit(j, "theoremB", g);
    }
  } catch (const CertificateError& e) {
    std::cerr << "certificate failure: " << e.what() << "\n";
    return 2;
  } catch (const PrecisionError& e) {
    std::cerr << "precision exhausted: " << e.what() << "\n";
    return 3;
  } catch (const BudgetError& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return 3;
  } catch (const InputError& e) {
    std::cerr << "bad input: " << e.what() << "\n";
    return 4;
  } catch (const Json::exception& e) {
    std::cerr << "bad input: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "bad input: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
