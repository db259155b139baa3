#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "geometry.hpp"
#include "llt/castle.hpp"
#include "llt/monte_carlo.hpp"

namespace llt::castle {

namespace {

using detail::Geometry;
using detail::Piece;

std::size_t ipow(std::size_t a, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > kCellCap * 64 / a) throw ResourceError("castle: word table too large");
    r *= a;
  }
  return r;
}

std::vector<mpq_class> product_law(const std::vector<mpq_class>& p, int len) {
  const std::size_t A = p.size();
  std::vector<mpq_class> out(ipow(A, len));
  for (std::size_t w = 0; w < out.size(); ++w) {
    mpq_class v = 1;
    std::size_t x = w;
    for (int i = 0; i < len; ++i) {
      v *= p[x % A];
      x /= A;
    }
    out[w] = v;
  }
  return out;
}

std::vector<int> digits(std::size_t w, std::size_t A, int len) {
  std::vector<int> d(static_cast<std::size_t>(len));
  for (int i = len - 1; i >= 0; --i) {
    d[static_cast<std::size_t>(i)] = static_cast<int>(w % A);
    w /= A;
  }
  return d;
}

void check_marginal(const std::vector<mpq_class>& p) {
  if (p.empty()) throw LawError("castle: empty alphabet");
  mpq_class sum = 0;
  for (const auto& v : p) {
    if (v < 0) throw LawError("castle: negative symbol probability");
    sum += v;
  }
  if (sum != 1) throw LawError("castle: symbol probabilities do not sum to 1");
}

// Distribution of (f o T^i)_{i<L} on elementary pieces, per configuration.
class WindowEngine {
 public:
  WindowEngine(const CastleModel& c, const SymbolAssignment& s) : c_(c), s_(s) {}

  int cell_of(const std::vector<int>& key) const {
    const auto it = s_.cell_ids.find(key);
    if (it == s_.cell_ids.end()) throw std::logic_error("castle: symbols do not match the castle");
    return it->second;
  }

  // Law of the window of length L started on rung r of tower t, column cell 'cell', followed by
  // a column of tower t2 with cell 'cell2' (ignored when the window stays in the column).
  const std::vector<mpq_class>& dist(int t, int r, int L, int cell, int t2, int cell2) {
    const auto key = std::make_tuple(t, r, L, cell, t2, cell2);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const std::size_t A = s_.marginal.size();
    struct Group {
      int column, cell, first_letter, first_pos, count;
    };
    std::vector<int> bottom_pos;
    std::vector<Group> tops;
    for (int i = 0; i < L; ++i) {
      int tt = t, level = r + i, cc = cell, column = 0;
      if (level >= c_.height(t)) {
        level -= c_.height(t);
        tt = t2;
        cc = cell2;
        column = 1;
        if (level >= c_.height(tt)) throw std::logic_error("castle: window crosses the top twice");
      }
      const int bl = detail::bottom_length(c_, tt);
      if (level < bl) {
        bottom_pos.push_back(i);
      } else if (!tops.empty() && tops.back().column == column) {
        ++tops.back().count;
      } else {
        tops.push_back({column, cc, level - bl, i, 1});
      }
    }
    std::vector<const std::vector<mpq_class>*> margs;
    for (const auto& g : tops) margs.push_back(&marginal(g.cell, g.first_letter, g.count));
    std::vector<mpq_class> out(ipow(A, L));
    for (std::size_t w = 0; w < out.size(); ++w) {
      const auto d = digits(w, A, L);
      mpq_class v = 1;
      for (int i : bottom_pos) v *= s_.marginal[static_cast<std::size_t>(d[static_cast<std::size_t>(i)])];
      for (std::size_t g = 0; g < tops.size() && v != 0; ++g) {
        std::size_t idx = 0;
        for (int k = 0; k < tops[g].count; ++k) {
          idx = idx * A + static_cast<std::size_t>(d[static_cast<std::size_t>(tops[g].first_pos + k)]);
        }
        v *= (*margs[g])[idx];
      }
      out[w] = std::move(v);
    }
    return cache_.emplace(key, std::move(out)).first->second;
  }

 private:
  const std::vector<mpq_class>& marginal(int cell, int first, int count) {
    const auto key = std::make_tuple(cell, first, count);
    if (auto it = margs_.find(key); it != margs_.end()) return it->second;
    const std::size_t A = s_.marginal.size();
    const auto& table = s_.top_tables[static_cast<std::size_t>(cell)].p;
    std::vector<mpq_class> out(ipow(A, count));
    const std::size_t below = ipow(A, s_.l - first - count);
    for (std::size_t w = 0; w < table.size(); ++w) out[(w / below) % out.size()] += table[w];
    return margs_.emplace(key, std::move(out)).first->second;
  }

  const CastleModel& c_;
  const SymbolAssignment& s_;
  std::map<std::tuple<int, int, int, int, int, int>, std::vector<mpq_class>> cache_;
  std::map<std::tuple<int, int, int>, std::vector<mpq_class>> margs_;
};

struct Accum {
  mpq_class mass;
  std::vector<mpq_class> law;
};

// Accumulates window laws of length L over rung r of tower t, grouped by top cell or xi atom.
void accumulate(WindowEngine& eng, const CastleModel& c, const Geometry& g, int t, int r, int L, bool by_atom,
                std::map<int, Accum>& acc) {
  std::map<std::tuple<int, int, int, int>, mpq_class> combos;
  const bool crosses = r + L > c.height(t);
  for (const Piece& p : g.pieces[t]) {
    const int cell = eng.cell_of(p.key);
    const int group = by_atom ? p.labels[static_cast<std::size_t>(r)] : cell;
    const int t2 = crosses ? p.next_tower : -1;
    const int cell2 = crosses ? eng.cell_of(p.next_key) : -1;
    combos[std::make_tuple(group, cell, t2, cell2)] += p.len;
  }
  for (const auto& [k, len] : combos) {
    const auto [group, cell, t2, cell2] = k;
    const auto& d = eng.dist(t, r, L, cell, t2, cell2);
    auto& a = acc[group];
    if (a.law.empty()) a.law.assign(d.size(), mpq_class(0));
    a.mass += len;
    for (std::size_t w = 0; w < d.size(); ++w) a.law[w] += len * d[w];
  }
}

std::string tower_name(int t) { return t == B ? "B" : "F"; }

}  // namespace

SymbolAssignment code_level(const CastleModel& c, const std::vector<mpq_class>& input, int l) {
  if (l != c.l) throw std::invalid_argument("code_level: castle heights are not {2l, 2l+1}");
  std::vector<mpq_class> marginal = input;
  for (auto& q : marginal) q.canonicalize();
  check_marginal(marginal);
  const Geometry g = detail::build_geometry(c);
  const std::size_t A = marginal.size();

  SymbolAssignment s;
  s.l = l;
  s.alphabet = static_cast<int>(A);
  s.marginal = marginal;
  std::map<std::vector<int>, mpq_class> mass;
  std::set<std::tuple<int, std::vector<int>, std::vector<int>>> base;
  for (int t : {B, F}) {
    for (const Piece& p : g.pieces[t]) {
      mass[p.key] += p.len;
      base.emplace(t, p.key, p.prev_key);
    }
  }
  s.base_cells = base.size();
  std::size_t refined = 0;
  const std::size_t top_words = ipow(A, l);
  refined += mass.size() * top_words;
  for (const auto& b : base) refined += ipow(A, detail::bottom_length(c, std::get<0>(b)));
  s.refined_cells = refined;
  if (refined > kCellCap) {
    throw ResourceError("castle: " + std::to_string(refined) + " refined cells exceed cap " +
                        std::to_string(kCellCap));
  }
  const auto table = product_law(marginal, l);
  for (const auto& [key, m] : mass) {
    s.cell_ids.emplace(key, static_cast<int>(s.cell_labels.size()));
    s.cell_labels.push_back(key);
    s.cell_mass.push_back(m);
    s.top_tables.push_back({table});
  }
  return s;
}

void corrupt(SymbolAssignment& s, int cell, std::size_t a, std::size_t b, const mpq_class& amount) {
  auto& p = s.top_tables.at(static_cast<std::size_t>(cell)).p;
  if (a >= p.size() || b >= p.size() || a == b) throw std::invalid_argument("corrupt: bad word indices");
  if (p[b] < amount) throw std::invalid_argument("corrupt: amount exceeds the donor mass");
  p[a] += amount;
  p[b] -= amount;
}

IdentityReport verify_identities(const CastleModel& c, const SymbolAssignment& s, int refine) {
  const Geometry g = detail::build_geometry(c, refine);
  WindowEngine eng(c, s);
  const int l = c.l;
  IdentityReport rep;

  auto check = [&](const std::string& name, const std::map<int, Accum>& acc, int L, const std::string& where,
                   bool by_atom) {
    const auto prod = product_law(s.marginal, L);
    for (const auto& [group, a] : acc) {
      for (std::size_t w = 0; w < a.law.size(); ++w) {
        ++rep.checks;
        const mpq_class rhs = a.mass * prod[w];
        if (a.law[w] != rhs) {
          Witness wit{name, where + (by_atom ? " atom " : " cell ") + std::to_string(group),
                      digits(w, s.marginal.size(), L), a.law[w], rhs};
          if (!rep.witness) rep.witness = wit;
          rep.failures.push_back(std::move(wit));
          return false;
        }
      }
    }
    return true;
  };
  auto rung = [&](const std::string& name, int t, int r, int L, bool by_atom) {
    std::map<int, Accum> acc;
    accumulate(eng, c, g, t, r, L, by_atom, acc);
    return check(name, acc, L, "tower " + tower_name(t) + " rung " + std::to_string(r), by_atom);
  };

  rep.eq1B = rung("eq1B", B, 0, 2 * l, false);
  rep.eq1F = rung("eq1F", F, 0, 2 * l + 1, false);
  rep.eq1All = true;
  for (int t : {B, F}) {
    for (int k = 0; k <= l && rep.eq1All; ++k) rep.eq1All = rung("eq1All", t, k, 2 * l - k, false);
  }
  rep.eq2 = true;
  for (int t : {B, F}) {
    for (int k = 0; k < l && rep.eq2; ++k) rep.eq2 = rung("eq2", t, c.height(t) - l + k, 2 * l, false);
  }
  rep.eq3 = true;
  for (int t : {B, F}) {
    for (int r = 0; r < c.height(t) && rep.eq3; ++r) rep.eq3 = rung("eq3", t, r, l, false);
  }
  std::map<int, Accum> atoms;
  for (int t : {B, F}) {
    for (int r = 0; r < c.height(t); ++r) accumulate(eng, c, g, t, r, l, true, atoms);
  }
  rep.main = check("main", atoms, l, "space", true);
  return rep;
}

std::vector<mpq_class> window_law(const CastleModel& c, const SymbolAssignment& s, int L, int atom) {
  if (L < 1 || L > 2 * c.l + 1) throw std::invalid_argument("window_law: length must be in [1, 2l+1]");
  const Geometry g = detail::build_geometry(c);
  WindowEngine eng(c, s);
  std::map<int, Accum> acc;
  for (int t : {B, F}) {
    for (int r = 0; r < c.height(t); ++r) accumulate(eng, c, g, t, r, L, true, acc);
  }
  std::vector<mpq_class> out(ipow(s.marginal.size(), L));
  for (const auto& [d, a] : acc) {
    if (atom >= 0 && d != atom) continue;
    for (std::size_t w = 0; w < out.size(); ++w) out[w] += a.law[w];
  }
  return out;
}

RealizationReport realize_array(const std::vector<LevelSpec>& specs, std::uint64_t seed, int xi_atoms) {
  if (specs.empty()) throw std::invalid_argument("realize_array: no levels");
  RealizationReport rep;
  std::vector<mpq_class> joint{mpq_class(1)}, product{mpq_class(1)};
  std::size_t cells = 1;
  rep.castles_independent = true;
  for (std::size_t n = 0; n < specs.size(); ++n) {
    const auto& sp = specs[n];
    if (static_cast<int>(sp.marginal.size()) != sp.alphabet) {
      throw std::invalid_argument("realize_array: alphabet size does not match the marginal");
    }
    CastleOptions opt;
    opt.l = sp.length;
    opt.xi_atoms = xi_atoms;
    opt.seed = splitmix64(seed + n);
    RealizedLevel lvl{build_synthetic_castle(opt), {}};
    lvl.symbols = code_level(lvl.castle, sp.marginal, sp.length);
    cells *= lvl.symbols.refined_cells;
    if (cells > kCellCap) throw ResourceError("realize_array: refined cells exceed cap");

    // Castle n lives on its own coordinate, so its rungs are independent of every earlier window.
    const Geometry g = detail::build_geometry(lvl.castle);
    WindowEngine eng(lvl.castle, lvl.symbols);
    const CastleModel& c = lvl.castle;
    if (!audit(c).ok()) rep.castles_independent = false;

    std::map<int, Accum> acc;
    for (int t : {B, F}) {
      for (int r = 0; r < c.height(t); ++r) accumulate(eng, c, g, t, r, sp.length, true, acc);
    }
    const std::size_t words = ipow(sp.marginal.size(), sp.length);
    std::vector<mpq_class> next(joint.size() * words);
    for (const auto& [atom, a] : acc) {
      for (std::size_t i = 0; i < joint.size(); ++i) {
        if (joint[i] == 0) continue;
        for (std::size_t w = 0; w < words; ++w) next[i * words + w] += joint[i] * a.law[w];
      }
    }
    joint = std::move(next);
    const auto p = product_law(sp.marginal, sp.length);
    std::vector<mpq_class> np(product.size() * words);
    for (std::size_t i = 0; i < product.size(); ++i) {
      for (std::size_t w = 0; w < words; ++w) np[i * words + w] = product[i] * p[w];
    }
    product = std::move(np);
    rep.levels.push_back(std::move(lvl));
  }
  rep.factorizes = joint.size() == product.size();
  for (std::size_t i = 0; i < joint.size() && rep.factorizes; ++i) {
    ++rep.equalities;
    if (joint[i] != product[i]) rep.factorizes = false;
  }
  rep.joint = std::move(joint);
  rep.product = std::move(product);
  return rep;
}

namespace {

std::vector<std::string> strings(const std::vector<mpq_class>& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& q : v) out.push_back(q.get_str());
  return out;
}

}  // namespace

nlohmann::json to_json(const CastleModel& c) {
  nlohmann::json j;
  j["l"] = c.l;
  j["width"] = {{"B", c.width[B].get_str()}, {"F", c.width[F].get_str()}};
  j["xi_mass"] = strings(c.xi_mass);
  for (int t : {B, F}) {
    auto& arr = j["rungs"][tower_name(t)];
    arr = nlohmann::json::array();
    for (const auto& R : c.rungs[t]) arr.push_back({{"cuts", strings(R.cuts)}, {"labels", R.labels}});
  }
  j["exchange"] = nlohmann::json::array();
  for (const auto& p : c.iet) {
    j["exchange"].push_back(
        {{"top_lo", p.top_lo.get_str()}, {"length", p.length.get_str()}, {"base_lo", p.base_lo.get_str()}});
  }
  return j;
}

nlohmann::json to_json(const SymbolAssignment& s) {
  nlohmann::json j;
  j["l"] = s.l;
  j["alphabet"] = s.alphabet;
  j["marginal"] = strings(s.marginal);
  j["top_cells"] = nlohmann::json::array();
  for (std::size_t i = 0; i < s.cell_labels.size(); ++i) {
    j["top_cells"].push_back({{"id", i},
                              {"tower", tower_name(s.cell_labels[i][0])},
                              {"labels", std::vector<int>(s.cell_labels[i].begin() + 1, s.cell_labels[i].end())},
                              {"mass", s.cell_mass[i].get_str()},
                              {"word_table", strings(s.top_tables[i].p)}});
  }
  j["base_cells"] = s.base_cells;
  j["refined_cells"] = s.refined_cells;
  return j;
}

nlohmann::json to_json(const IdentityReport& r) {
  nlohmann::json j{{"eq1B", r.eq1B}, {"eq1F", r.eq1F}, {"eq1All", r.eq1All}, {"eq2", r.eq2},
                   {"eq3", r.eq3},   {"main", r.main}, {"checks", r.checks}};
  j["failures"] = nlohmann::json::array();
  for (const auto& w : r.failures) {
    j["failures"].push_back({{"identity", w.identity},
                             {"set", w.cell},
                             {"word", w.word},
                             {"lhs", w.lhs.get_str()},
                             {"rhs", w.rhs.get_str()}});
  }
  return j;
}

std::vector<mpq_class> parse_marginal(const std::string& text) {
  std::vector<mpq_class> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw std::invalid_argument("marginal: empty entry");
    item = item.substr(b, e - b + 1);
    mpq_class q;
    if (const auto dot = item.find('.'); dot != std::string::npos) {
      const std::string digits = item.substr(0, dot) + item.substr(dot + 1);
      q = mpq_class(mpz_class(digits, 10), mpz_class("1" + std::string(item.size() - dot - 1, '0'), 10));
    } else if (q.set_str(item, 10) != 0) {
      throw std::invalid_argument("marginal: cannot parse '" + item + "'");
    }
    q.canonicalize();
    out.push_back(q);
  }
  return out;
}

}  // namespace llt::castle
