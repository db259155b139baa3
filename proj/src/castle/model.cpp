#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "geometry.hpp"
#include "llt/castle.hpp"
#include "llt/monte_carlo.hpp"

namespace llt::castle {

namespace {

int draw(SeededStream& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

template <class T>
void shuffle(std::vector<T>& v, SeededStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng() % i]);
  }
}

mpq_class total_width(const CastleModel& c) { return c.width[B] + c.width[F]; }

mpq_class to_line(const CastleModel& c, int t, const mpq_class& u) {
  return t == B ? u : u + c.width[B];
}

std::pair<int, mpq_class> from_line(const CastleModel& c, const mpq_class& s) {
  if (s < c.width[B]) return {B, s};
  return {F, s - c.width[B]};
}

const IetPiece& by_top(const CastleModel& c, const mpq_class& s) {
  for (const auto& p : c.iet) {
    if (p.top_lo <= s && s < p.top_lo + p.length) return p;
  }
  throw std::logic_error("castle: point outside the top");
}

const IetPiece& by_base(const CastleModel& c, const mpq_class& s) {
  for (const auto& p : c.iet) {
    if (p.base_lo <= s && s < p.base_lo + p.length) return p;
  }
  throw std::logic_error("castle: point outside the base");
}

mpq_class forward(const CastleModel& c, const mpq_class& s) {
  const auto& p = by_top(c, s);
  return p.base_lo + (s - p.top_lo);
}

mpq_class backward(const CastleModel& c, const mpq_class& s) {
  const auto& p = by_base(c, s);
  return p.top_lo + (s - p.base_lo);
}

int label_at(const CastleModel& c, int t, int r, const mpq_class& u) {
  const auto& R = c.rungs[t][static_cast<std::size_t>(r)];
  const auto it = std::upper_bound(R.cuts.begin(), R.cuts.end(), u);
  return R.labels[static_cast<std::size_t>(it - R.cuts.begin() - 1)];
}

std::vector<int> top_key(const CastleModel& c, int t, const mpq_class& u) {
  std::vector<int> key{t};
  const int h = c.height(t);
  for (int i = 0; i <= 2 * c.l; ++i) {
    if (i <= h - 1) {
      key.push_back(label_at(c, t, h - 1 - i, u));
    } else {
      const auto [t0, u0] = from_line(c, backward(c, to_line(c, t, u)));
      key.push_back(label_at(c, t0, c.height(t0) - 1, u0));
    }
  }
  return key;
}

}  // namespace

namespace detail {

int bottom_length(const CastleModel& c, int tower) { return tower == B ? c.l : c.l + 1; }

Geometry build_geometry(const CastleModel& c, int refine) {
  if (refine < 1) throw std::invalid_argument("refine must be at least 1");
  const mpq_class W = total_width(c);
  std::set<mpq_class> s0;
  for (int t : {B, F}) {
    for (const auto& R : c.rungs[t]) {
      for (const auto& x : R.cuts) s0.insert(to_line(c, t, x));
    }
  }
  for (const auto& p : c.iet) {
    s0.insert(p.top_lo);
    s0.insert(p.base_lo);
  }
  auto close = [&](const std::set<mpq_class>& in) {
    std::set<mpq_class> out = in;
    for (const auto& s : in) {
      if (s < 0 || s >= W) continue;
      out.insert(forward(c, s));
      out.insert(backward(c, s));
    }
    return out;
  };
  const std::set<mpq_class> s2 = close(close(s0));

  Geometry g;
  for (int t : {B, F}) {
    const mpq_class lo = to_line(c, t, 0), hi = lo + c.width[t];
    std::vector<mpq_class> pts{lo};
    for (const auto& s : s2) {
      if (s > lo && s < hi) pts.push_back(s);
    }
    pts.push_back(hi);
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
      const mpq_class a = pts[j] - lo, len = pts[j + 1] - pts[j];
      const mpq_class mid = a + len / 2;
      Piece base;
      base.len = len / refine;
      for (int r = 0; r < c.height(t); ++r) base.labels.push_back(label_at(c, t, r, mid));
      base.key = top_key(c, t, mid);
      const auto [t2, u2] = from_line(c, forward(c, to_line(c, t, mid)));
      base.next_tower = t2;
      base.next_key = top_key(c, t2, u2);
      const auto [t0, u0] = from_line(c, backward(c, to_line(c, t, mid)));
      base.prev_key = top_key(c, t0, u0);
      for (int k = 0; k < refine; ++k) {
        Piece p = base;
        p.lo = a + base.len * k;
        g.pieces[t].push_back(std::move(p));
      }
    }
  }
  return g;
}

}  // namespace detail

CastleModel build_synthetic_castle(const CastleOptions& opt) {
  if (opt.l < 1) throw std::invalid_argument("castle: l must be at least 1");
  if (opt.iet_pieces < 1) throw std::invalid_argument("castle: need at least one exchange piece");
  SeededStream rng(opt.seed, 0x6361737472ULL);
  CastleModel c;
  c.l = opt.l;
  const int b = draw(rng, 1, 9), f = draw(rng, 1, 9);
  const mpq_class den = 2 * opt.l * b + (2 * opt.l + 1) * f;
  c.width[B] = mpq_class(b) / den;
  c.width[F] = mpq_class(f) / den;

  if (!opt.xi_weights.empty()) {
    mpq_class sum = 0;
    for (const auto& w : opt.xi_weights) {
      if (w <= 0) throw std::invalid_argument("castle: xi weights must be positive");
      sum += w;
    }
    if (sum != 1) throw std::invalid_argument("castle: xi weights must sum to 1");
    c.xi_mass = opt.xi_weights;
  } else {
    if (opt.xi_atoms < 1) throw std::invalid_argument("castle: need at least one xi atom");
    std::vector<int> w(static_cast<std::size_t>(opt.xi_atoms));
    for (auto& v : w) v = draw(rng, 1, 9);
    const int sum = std::accumulate(w.begin(), w.end(), 0);
    for (int v : w) c.xi_mass.push_back(mpq_class(v, sum));
    for (auto& q : c.xi_mass) q.canonicalize();
  }

  const int atoms = static_cast<int>(c.xi_mass.size());
  for (int t : {B, F}) {
    for (int r = 0; r < c.height(t); ++r) {
      std::vector<int> order(static_cast<std::size_t>(atoms));
      std::iota(order.begin(), order.end(), 0);
      shuffle(order, rng);
      RungSplit R;
      R.cuts.push_back(0);
      for (int d : order) {
        R.cuts.push_back(R.cuts.back() + c.xi_mass[static_cast<std::size_t>(d)] * c.width[t]);
        R.labels.push_back(d);
      }
      c.rungs[t].push_back(std::move(R));
    }
  }

  std::vector<int> w(static_cast<std::size_t>(opt.iet_pieces));
  for (auto& v : w) v = draw(rng, 1, 9);
  const int sum = std::accumulate(w.begin(), w.end(), 0);
  const mpq_class W = total_width(c);
  std::vector<mpq_class> len;
  for (int v : w) {
    mpq_class q(v, sum);
    q.canonicalize();
    len.push_back(q * W);
  }
  std::vector<std::size_t> order(len.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(order, rng);
  std::vector<mpq_class> base_lo(len.size());
  mpq_class at = 0;
  for (std::size_t i : order) {
    base_lo[i] = at;
    at += len[i];
  }
  at = 0;
  for (std::size_t i = 0; i < len.size(); ++i) {
    c.iet.push_back({at, len[i], base_lo[i]});
    at += len[i];
  }
  return c;
}

CastleModel build_synthetic_castle(int l, int xi_atoms, std::uint64_t seed) {
  CastleOptions opt;
  opt.l = l;
  opt.xi_atoms = xi_atoms;
  opt.seed = seed;
  return build_synthetic_castle(opt);
}

AuditResult audit(const CastleModel& c) {
  AuditResult a;
  a.mass_balance = 2 * c.l * c.width[B] + (2 * c.l + 1) * c.width[F] == 1;
  a.independence = true;
  for (int t : {B, F}) {
    if (static_cast<int>(c.rungs[t].size()) != c.height(t)) a.independence = false;
    for (const auto& R : c.rungs[t]) {
      std::vector<mpq_class> mass(c.xi_mass.size());
      for (std::size_t j = 0; j < R.labels.size(); ++j) {
        mass[static_cast<std::size_t>(R.labels[j])] += R.cuts[j + 1] - R.cuts[j];
      }
      if (R.cuts.front() != 0 || R.cuts.back() != c.width[t]) a.independence = false;
      for (std::size_t d = 0; d < mass.size(); ++d) {
        if (mass[d] != c.xi_mass[d] * c.width[t]) a.independence = false;
      }
    }
  }
  const mpq_class W = total_width(c);
  auto tiles = [&](auto lo_of) {
    std::vector<std::pair<mpq_class, mpq_class>> iv;
    for (const auto& p : c.iet) {
      if (p.length <= 0) return false;
      iv.emplace_back(lo_of(p), p.length);
    }
    std::sort(iv.begin(), iv.end());
    mpq_class at = 0;
    for (const auto& [lo, len] : iv) {
      if (lo != at) return false;
      at += len;
    }
    return at == W;
  };
  a.bijective_top = tiles([](const IetPiece& p) { return p.top_lo; }) &&
                    tiles([](const IetPiece& p) { return p.base_lo; });
  return a;
}

}  // namespace llt::castle
