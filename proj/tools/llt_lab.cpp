#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "llt/analysis.hpp"
#include "llt/castle.hpp"
#include "llt/construction.hpp"
#include "llt/fourier.hpp"
#include "llt/gaussian.hpp"
#include "llt/monte_carlo.hpp"
#include "llt/pmf_json.hpp"
#include "table.hpp"

namespace {

using lab::num;
using lab::Table;

constexpr int kExitUsage = 2, kExitResource = 3, kExitVerification = 4, kExitIo = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string format = "csv", output = "-", mode, config;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  std::int64_t k = 0, n = 0, j = 0, K = 0;
  std::vector<std::int64_t> n_list, J_override;
  std::size_t grid = 2048;
  double eps = 0.1, second_moment = 0.0;
  std::string noise_law = "three-point";
  std::uint64_t samples = 0;
  int l = 1, xi_atoms = 2, alphabet = 2, levels = 1;
  std::string marginal;
  bool dump_witness = false, corrupt = false;
};

unsigned resolve_threads(unsigned flag) {
  if (const char* env = std::getenv("LLT_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw UsageError("LLT_THREADS must be a positive integer");
    return static_cast<unsigned>(v);
  }
  if (flag > 0) return flag;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(i) for i < count on up to 'threads' workers; rethrows the first failure.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body body) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex m;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < count;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(m);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned w = std::min<std::size_t>(threads, count);
  for (unsigned t = 1; t < w; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string join(const std::vector<std::int64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string flag(bool b) { return b ? "true" : "false"; }
std::string flag(const std::optional<bool>& b) { return b ? flag(*b) : ""; }

std::vector<std::int64_t> sorted_unique(std::vector<std::int64_t> v) {
  if (v.empty()) throw UsageError("--n-list must not be empty");
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

llt::Mode law_mode(const std::string& mode) { return mode == "float" ? llt::Mode::floating : llt::Mode::exact; }

// ---------------------------------------------------------------------------

Table cmd_params(const Options& o) {
  const auto p = llt::params(o.k);
  Table t{{"k", "p", "d", "alpha_sq"}, {}, {}, {}};
  t.rows.push_back({num(p.k), num(p.p), p.d.get_str(),
                    p.alpha_sq.rational ? p.alpha_sq.exact.get_str() : num(p.alpha_sq.value)});
  return t;
}

Table cmd_block_pmf(const Options& o) {
  const auto law = llt::block_pmf(o.k, law_mode(o.mode));
  Table t{{"x", "mass"}, {}, {}, llt::pmf_to_json(law)};
  if (const auto* e = std::get_if<llt::ExactPmf>(&law)) {
    for (std::int64_t x = e->offset(); x <= e->max_point(); ++x) {
      const auto m = e->mass(x);
      if (m != 0) t.rows.push_back({num(x), m.get_str()});
    }
  } else {
    const auto& f = std::get<llt::FloatPmf>(law);
    for (std::int64_t x = f.offset(); x <= f.max_point(); ++x) {
      if (f.mass(x) != 0) t.rows.push_back({num(x), num(f.mass(x))});
    }
  }
  return t;
}

Table cmd_index(const Options& o) {
  if (o.n < 1) throw UsageError("--n must be positive");
  Table t{{"set", "members"}, {}, {}, {}};
  t.rows.push_back({"I", join(llt::index_I(o.n))});
  t.rows.push_back({"J", join(llt::index_J(o.n))});
  return t;
}

Table cmd_variance_scan(const Options& o, unsigned threads) {
  const auto ns = sorted_unique(o.n_list);
  std::vector<llt::SecondMoments> res(ns.size());
  parallel_for(ns.size(), threads, [&](std::size_t i) { res[i] = llt::second_moments(ns[i]); });
  Table t{{"n", "var_Un", "var_Un_over_n", "var_Un_closed", "var_Wn", "var_En", "cov_En_Un", "var_Sn_f", "K",
           "tail_bound"},
          {}, {}, {}};
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const auto& m = res[i];
    t.rows.push_back({num(ns[i]), num(m.var_Un), num(m.var_Un / static_cast<long double>(ns[i])),
                      num(m.var_Un_closed), num(m.var_Wn), num(m.var_En), num(m.cov_En_Un), num(m.var_Sn_f),
                      num(m.K), num(m.tail_bound)});
  }
  t.summary.emplace_back("sigma_sq_limit", num(llt::GaussianRef::limit().sigma_sq()));
  return t;
}

Table cmd_llt_scan(const Options& o, unsigned threads) {
  const auto ns = sorted_unique(o.n_list);
  llt::UnOptions opt;
  if (o.mode == "exact") opt.route = llt::UnRoute::exact;
  if (o.mode == "float") opt.route = llt::UnRoute::factorized;
  struct Row {
    std::string route;
    std::int64_t lo = 0, hi = 0;
    long double limit = 0, matched = 0;
  };
  std::vector<Row> res(ns.size());
  parallel_for(ns.size(), threads, [&](std::size_t i) {
    const auto u = llt::un_pmf(ns[i], opt);
    const auto f = llt::as_float(u.law);
    res[i] = {llt::to_string(u.route), f.offset(), f.max_point(),
              llt::sup_gaussian_distance(u.law, ns[i], llt::gaussian_for(ns[i], llt::GaussianChoice::limit)),
              llt::sup_gaussian_distance(u.law, ns[i], llt::gaussian_for(ns[i], llt::GaussianChoice::matched))};
  });
  Table t{{"n", "route", "support_lo", "support_hi", "sup_error_limit", "sup_error_matched"}, {}, {}, {}};
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const auto& r = res[i];
    t.rows.push_back({num(ns[i]), r.route, num(r.lo), num(r.hi), num(r.limit), num(r.matched)});
  }
  return t;
}

Table cmd_charfn(const Options& o) {
  if (o.n < 1) throw UsageError("--n must be positive");
  if (o.grid < 1) throw UsageError("--grid must be positive");
  Table t{{"t", "phi", "log_abs_phi"}, {}, {}, {}};
  for (long double x : llt::uniform_t_grid(o.grid)) {
    t.rows.push_back({num(x), num(llt::phi_n(o.n, x)), num(llt::log_phi_n(o.n, x))});
  }
  return t;
}

Table bound_table(const llt::BoundReport& r, const char* xname) {
  Table t{{xname, "lhs", "rhs", "log_slack"}, {}, {}, {}};
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    t.rows.push_back({num(r.grid[i]), num(r.lhs[i]), num(r.rhs[i]), num(std::log(r.rhs[i]) - std::log(r.lhs[i]))});
  }
  t.summary = {{"fitted_constant", num(r.fitted_constant)},
               {"min_log_slack", num(r.min_log_slack)},
               {"worst_ratio", num(r.worst_ratio)},
               {"resonance_points", std::to_string(r.resonance_points)},
               {"trig_step_ok", flag(r.trig_step_ok)}};
  return t;
}

Table cmd_upsilon(const Options& o) {
  std::optional<std::vector<std::int64_t>> J;
  if (!o.J_override.empty()) J = o.J_override;
  const auto u = llt::upsilon_moments(o.j, o.n, J);
  Table t{{"j", "n", "J", "active", "m2", "m3", "m4", "m4_formula", "regime", "corrected_bound", "printed_bound"},
          {}, {}, {}};
  t.rows.push_back({num(o.j), num(o.n), join(u.J), join(u.active), num(u.m2), num(u.m3), num(u.m4),
                    num(u.m4_formula), flag(u.regime), flag(u.corrected_bound), flag(u.printed_bound)});
  return t;
}

llt::FloatPmf read_law(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read law file " + path);
  auto j = nlohmann::json::parse(in);
  if (j.contains("data")) j = j["data"];
  return llt::as_float(llt::pmf_from_json(j));
}

Table cmd_noise(const Options& o) {
  if (o.n < 4) throw UsageError("--n must be at least 4");
  const auto g = llt::GaussianRef::limit();
  const auto y = llt::discrete_gaussian(static_cast<long double>(o.n) * g.sigma_sq());
  const llt::NoiseSpec z = [&] {
    if (o.noise_law != "three-point") return llt::make_noise(o.n, read_law(o.noise_law));
    const long double m2 = o.second_moment > 0 ? o.second_moment
                                               : static_cast<long double>(o.n) /
                                                     std::sqrt(std::log2(static_cast<long double>(o.n)));
    return llt::three_point_noise(o.n, m2);
  }();
  const auto r = llt::noise_stability(y, z, o.n, g);
  Table t{{"n", "second_moment", "a_n", "sup_error_before", "sup_error_after", "tail_mass", "markov_bound", "peak",
           "interior_drift", "budget", "within_budget"},
          {}, {}, {}};
  t.rows.push_back({num(o.n), num(z.second_moment), num(z.a_n), num(r.sup_error_before), num(r.sup_error_after),
                    num(r.tail_mass_beyond_a_n), num(r.markov_bound), num(r.peak), num(r.interior_drift),
                    num(r.budget), flag(r.sup_error_after <= r.budget)});
  return t;
}

Table cmd_simulate(const Options& o, unsigned threads) {
  if (o.samples < 1) throw UsageError("--samples must be positive");
  llt::SamplingOptions so;
  so.samples = o.samples;
  so.threads = threads;
  const llt::SeededStream stream(o.seed, 0);
  llt::Histogram h;
  llt::FloatPmf exact = llt::FloatPmf::delta(0);
  long double exact_var = 0;
  if (o.K > 0) {
    h = llt::sample_sn_truncated(o.n, o.K, so, stream);
    exact = llt::as_float(llt::sn_truncated_law(o.n, o.K, llt::Mode::floating));
    exact_var = llt::sn_truncated_variance(o.n, o.K);
  } else {
    h = llt::sample_un(o.n, so, stream);
    exact = llt::as_float(llt::un_pmf(o.n).law);
    exact_var = exact.variance();
  }
  const auto chi = llt::chi_square(h, exact);
  Table t{{"x", "count", "empirical_p", "exact_p"}, {}, {}, {}};
  for (const auto& [x, c] : h.counts) {
    t.rows.push_back({num(x), std::to_string(c),
                      num(static_cast<long double>(c) / static_cast<long double>(h.samples)), num(exact.mass(x))});
  }
  t.summary = {{"samples", std::to_string(h.samples)},
               {"mean", num(h.mean())},
               {"variance", num(h.variance())},
               {"exact_variance", num(exact_var)},
               {"chi_square", num(chi.statistic)},
               {"dof", std::to_string(chi.dof)},
               {"critical", num(chi.critical)},
               {"p_value", num(chi.p_value)},
               {"passed", flag(chi.passed)}};
  return t;
}

std::vector<mpq_class> castle_marginal(const Options& o) {
  if (o.alphabet < 1) throw UsageError("--alphabet must be positive");
  if (o.marginal.empty()) return std::vector<mpq_class>(static_cast<std::size_t>(o.alphabet), mpq_class(1, o.alphabet));
  auto m = llt::castle::parse_marginal(o.marginal);
  if (static_cast<int>(m.size()) != o.alphabet) throw UsageError("--marginal must list --alphabet probabilities");
  return m;
}

std::string word_string(const std::vector<int>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? " " : "") + std::to_string(w[i]);
  return s;
}

Table cmd_castle(const Options& o, int& status) {
  namespace cs = llt::castle;
  auto marginal = castle_marginal(o);
  for (auto& q : marginal) q.canonicalize();
  if (o.levels < 1) throw UsageError("--levels must be positive");
  if (o.levels > 1) {
    std::vector<cs::LevelSpec> specs(static_cast<std::size_t>(o.levels), cs::LevelSpec{o.alphabet, marginal, o.l});
    const auto r = cs::realize_array(specs, o.seed, o.xi_atoms);
    Table t{{"word", "joint", "product"}, {}, {}, {}};
    for (std::size_t i = 0; i < r.joint.size(); ++i) {
      t.rows.push_back({std::to_string(i), r.joint[i].get_str(), r.product[i].get_str()});
    }
    t.summary = {{"factorizes", flag(r.factorizes)},
                 {"castles_independent", flag(r.castles_independent)},
                 {"equalities", std::to_string(r.equalities)}};
    if (!r.factorizes || !r.castles_independent) status = kExitVerification;
    return t;
  }
  const auto c = cs::build_synthetic_castle(o.l, o.xi_atoms, o.seed);
  auto s = cs::code_level(c, marginal, o.l);
  if (o.corrupt) {
    cs::corrupt(s, 0, 0, 1, mpq_class(1, 1000000));
  }
  const auto r = cs::verify_identities(c, s);
  const auto a = cs::audit(c);
  Table t{{"check", "holds"}, {}, {}, {}};
  t.rows = {{"audit", flag(a.ok())}, {"eq1B", flag(r.eq1B)}, {"eq1F", flag(r.eq1F)}, {"eq1All", flag(r.eq1All)},
            {"eq2", flag(r.eq2)},    {"eq3", flag(r.eq3)},   {"main", flag(r.main)}};
  t.summary = {{"top_cells", std::to_string(s.cell_labels.size())},
               {"base_cells", std::to_string(s.base_cells)},
               {"refined_cells", std::to_string(s.refined_cells)},
               {"checks", std::to_string(r.checks)}};
  t.extra = {{"castle", cs::to_json(c)}, {"symbols", cs::to_json(s)}, {"report", cs::to_json(r)}};
  if (!r.all() || !a.ok()) {
    status = kExitVerification;
    if (o.dump_witness) {
      for (const auto& w : r.failures) {
        std::cerr << "witness " << w.identity << " [" << w.cell << "] word (" << word_string(w.word)
                  << ") lhs " << w.lhs.get_str() << " rhs " << w.rhs.get_str() << "\n";
      }
    }
  }
  return t;
}

// ---------------------------------------------------------------------------

const std::set<std::string> kCommands = {"params",    "block-pmf",  "index",    "variance-scan", "llt-scan",
                                         "charfn",    "lemma-away", "lemma-near", "lindeberg",   "upsilon",
                                         "noise",     "simulate",   "castle"};

// Appends settings from a JSON config file for every flag not given on the command line.
std::vector<std::string> merge_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string path;
  std::set<std::string> given;
  bool has_command = false;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const auto& a = args[i];
    if (kCommands.count(a)) has_command = true;
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    const std::string name = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    given.insert(name);
    if (name == "config") path = eq == std::string::npos ? (i + 1 < args.size() ? args[i + 1] : "") : a.substr(eq + 1);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config file: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  if (j.contains("command") && !has_command) args.insert(args.begin() + 1, j["command"].get<std::string>());
  for (const auto& [key, value] : j.items()) {
    if (key == "command" || given.count(key)) continue;
    auto scalar = [](const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back("--" + key);
    } else if (value.is_array()) {
      std::string s;
      for (std::size_t i = 0; i < value.size(); ++i) s += (i ? "," : "") + scalar(value[i]);
      args.push_back("--" + key);
      args.push_back(s);
    } else {
      args.push_back("--" + key);
      args.push_back(scalar(value));
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Local limit theorem laboratory"};
  app.set_version_flag("--version", LLT_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output,-o", o.output, "Output path, - for standard output");
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--mode", o.mode, "Arithmetic mode")->check(CLI::IsMember({"exact", "float"}));
  app.add_option("--threads", o.threads, "Worker threads (LLT_THREADS overrides)")->check(CLI::PositiveNumber);
  app.add_option("--config", o.config, "JSON config file; flags win");

  auto* params = app.add_subcommand("params", "Construction parameters of level k");
  params->add_option("--k", o.k)->required();
  auto* block = app.add_subcommand("block-pmf", "Law of the block variable for even k");
  block->add_option("--k", o.k)->required();
  auto* index = app.add_subcommand("index", "Index sets I_n and J_n");
  index->add_option("--n", o.n)->required();
  auto* vscan = app.add_subcommand("variance-scan", "Second moments over a list of n");
  vscan->add_option("--n-list", o.n_list)->required()->delimiter(',');
  auto* lscan = app.add_subcommand("llt-scan", "Gaussian sup error of U_n over a list of n");
  lscan->add_option("--n-list", o.n_list)->required()->delimiter(',');
  auto* charfn = app.add_subcommand("charfn", "Characteristic function of U_n on a uniform grid");
  charfn->add_option("--n", o.n)->required();
  charfn->add_option("--grid", o.grid);
  auto* away = app.add_subcommand("lemma-away", "Product bound away from the origin");
  away->add_option("--n", o.n)->required();
  away->add_option("--grid", o.grid);
  auto* near = app.add_subcommand("lemma-near", "Gaussian-type bound near the origin");
  near->add_option("--n", o.n)->required();
  auto* lind = app.add_subcommand("lindeberg", "Lindeberg functional");
  lind->add_option("--n", o.n)->required();
  lind->add_option("--eps", o.eps)->required();
  auto* ups = app.add_subcommand("upsilon", "Moments of the auxiliary sum");
  ups->add_option("--j", o.j)->required();
  ups->add_option("--n", o.n)->required();
  ups->add_option("--J-override", o.J_override)->delimiter(',');
  auto* noise = app.add_subcommand("noise", "Stability of the local limit under added noise");
  noise->add_option("--n", o.n)->required();
  noise->add_option("--noise-law", o.noise_law, "three-point or a JSON law file");
  noise->add_option("--second-moment", o.second_moment);
  auto* sim = app.add_subcommand("simulate", "Monte Carlo histogram with chi-square test");
  sim->add_option("--n", o.n)->required();
  sim->add_option("--samples", o.samples)->required();
  sim->add_option("--K", o.K, "Sample the truncated S_n with levels up to K instead of U_n");
  auto* castle = app.add_subcommand("castle", "Code a synthetic castle and verify the identities");
  castle->add_option("--l", o.l)->required();
  castle->add_option("--xi-atoms", o.xi_atoms);
  castle->add_option("--alphabet", o.alphabet);
  castle->add_option("--marginal", o.marginal, "Comma separated probabilities, default uniform");
  castle->add_option("--levels", o.levels);
  castle->add_flag("--dump-witness", o.dump_witness);
  castle->add_flag("--corrupt", o.corrupt, "Shift 1/10^6 of mass inside one top cell");

  try {
    auto args = merge_config(argc, argv);
    std::vector<char*> ptrs;
    for (auto& a : args) ptrs.push_back(a.data());
    app.parse(static_cast<int>(ptrs.size()), ptrs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "llt_lab: " << e.what() << "\n";
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  int status = 0;
  Table table;
  if (o.mode.empty() && (command == "params" || command == "block-pmf" || command == "castle")) o.mode = "exact";
  lab::Provenance prov{command, LLT_VERSION, o.mode.empty() ? "auto" : o.mode, o.seed};
  try {
    const unsigned threads = resolve_threads(o.threads);
    if (command == "params") table = cmd_params(o);
    else if (command == "block-pmf") table = cmd_block_pmf(o);
    else if (command == "index") table = cmd_index(o);
    else if (command == "variance-scan") table = cmd_variance_scan(o, threads);
    else if (command == "llt-scan") table = cmd_llt_scan(o, threads);
    else if (command == "charfn") table = cmd_charfn(o);
    else if (command == "lemma-away") table = bound_table(llt::check_lemma_away(o.n, o.grid), "t");
    else if (command == "lemma-near") table = bound_table(llt::check_lemma_near(o.n), "x");
    else if (command == "lindeberg") {
      table = Table{{"n", "eps", "value"}, {{num(o.n), num(static_cast<long double>(o.eps)),
                                             num(llt::lindeberg(o.n, static_cast<long double>(o.eps)))}}, {}, {}};
    } else if (command == "upsilon") table = cmd_upsilon(o);
    else if (command == "noise") table = cmd_noise(o);
    else if (command == "simulate") table = cmd_simulate(o, threads);
    else if (command == "castle") table = cmd_castle(o, status);
  } catch (const llt::ResourceError& e) {
    std::cerr << "llt_lab: " << e.what() << "\n";
    return kExitResource;
  } catch (const UsageError& e) {
    std::cerr << "llt_lab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::logic_error& e) {
    std::cerr << "llt_lab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "llt_lab: " << e.what() << "\n";
    return kExitIo;
  }

  std::ostringstream buf;
  if (o.format == "json") lab::write_json(buf, prov, table);
  else lab::write_csv(buf, prov, table);
  if (o.output == "-") {
    std::cout << buf.str();
  } else {
    std::ofstream out(o.output);
    if (!out || !(out << buf.str())) {
      std::cerr << "llt_lab: cannot write " << o.output << "\n";
      return kExitIo;
    }
  }
  return status;
}
