#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "llt/errors.hpp"

namespace llt::castle {

inline constexpr std::size_t kCellCap = 10'000'000;

enum Tower : int { B = 0, F = 1 };

/// One rung split into consecutive xi-atom intervals.
struct RungSplit {
  std::vector<mpq_class> cuts;  // lo = 0, ..., hi = width; size = labels.size() + 1
  std::vector<int> labels;      // xi atom of each interval
};

/// Piece of the top->base interval exchange on the line [0, m(B) + m(F)).
struct IetPiece {
  mpq_class top_lo, length, base_lo;
};

/// {2l, 2l+1} castle on [0, m(B)) x {0..2l-1} + [0, m(F)) x {0..2l}. T moves one rung up;
/// the top rungs go to the bases through the interval exchange.
struct CastleModel {
  int l = 1;
  mpq_class width[2];
  std::vector<mpq_class> xi_mass;          // m(D) for each xi atom
  std::vector<RungSplit> rungs[2];         // rungs[t][r]
  std::vector<IetPiece> iet;               // ordered by top_lo

  int height(int t) const { return t == B ? 2 * l : 2 * l + 1; }
};

struct CastleOptions {
  int l = 1;
  int xi_atoms = 1;
  std::uint64_t seed = 0;
  std::vector<mpq_class> xi_weights;  // optional explicit atom masses
  int iet_pieces = 3;
};

CastleModel build_synthetic_castle(const CastleOptions& opt);
CastleModel build_synthetic_castle(int l, int xi_atoms, std::uint64_t seed);

struct AuditResult {
  bool mass_balance = false;   // 2l m(B) + (2l+1) m(F) = 1
  bool independence = false;   // m(R cap D) = m(R) m(D) for every rung R and atom D
  bool bijective_top = false;  // the exchange tiles both top and base
  bool ok() const { return mass_balance && independence && bijective_top; }
};
AuditResult audit(const CastleModel& c);

/// Word law of a top cell C: m(C_a) / m(C) for every a in A^l (lexicographic index).
struct WordTable {
  std::vector<mpq_class> p;
};

/// Output of the coding step.
///
/// Top cells (the partition zeta_1) are label classes of the vector
/// (xi label of T^{-i} x)_{i=0..2l} on the top. Each top cell C is split into C_a, a in A^l,
/// by its word table; the word is written on the l highest rungs of the column below C.
/// Base cells (the partition zeta) are split by product tables into words of length l (B) or
/// l + 1 (F) written on the lowest rungs. Splits are realized as independent word coordinates
/// carried along each column.
struct SymbolAssignment {
  int l = 1;
  int alphabet = 2;
  std::vector<mpq_class> marginal;
  std::map<std::vector<int>, int> cell_ids;  // label vector -> top cell id
  std::vector<std::vector<int>> cell_labels;
  std::vector<mpq_class> cell_mass;          // m(C)
  std::vector<WordTable> top_tables;         // per top cell
  std::size_t base_cells = 0;                // number of zeta cells on B and F
  std::size_t refined_cells = 0;
};

/// Runs the coding construction. Throws ResourceError beyond kCellCap refined cells.
SymbolAssignment code_level(const CastleModel& c, const std::vector<mpq_class>& marginal, int l);

/// Shifts mass 'amount' from word b to word a inside top cell 'cell'.
void corrupt(SymbolAssignment& s, int cell, std::size_t a, std::size_t b, const mpq_class& amount);

struct Witness {
  std::string identity;
  std::string cell;  // description of the set (tower, rung, cell id or atom)
  std::vector<int> word;
  mpq_class lhs, rhs;
};

struct IdentityReport {
  bool eq1B = false, eq1F = false, eq1All = false, eq2 = false, eq3 = false, main = false;
  std::optional<Witness> witness;  // first failure
  std::vector<Witness> failures;   // first failure of each identity
  std::size_t checks = 0;          // number of word equalities evaluated
  bool all() const { return eq1B && eq1F && eq1All && eq2 && eq3 && main; }
};

/// Exact traversal. refine > 1 splits every elementary interval into that many equal parts first.
IdentityReport verify_identities(const CastleModel& c, const SymbolAssignment& s, int refine = 1);

/// Law of (f o T^i)_{i<L} restricted to xi atom D (or the whole space when D < 0), indexed
/// lexicographically over A^L, as exact masses.
std::vector<mpq_class> window_law(const CastleModel& c, const SymbolAssignment& s, int L, int atom = -1);

struct LevelSpec {
  int alphabet = 2;
  std::vector<mpq_class> marginal;
  int length = 1;  // d, the row length
};

struct RealizedLevel {
  CastleModel castle;
  SymbolAssignment symbols;
};

struct RealizationReport {
  std::vector<RealizedLevel> levels;
  std::vector<mpq_class> joint;     // law of all windows, lexicographic, level 1 most significant
  std::vector<mpq_class> product;   // product of the level marginals
  bool factorizes = false;          // joint == product entrywise
  bool castles_independent = false; // each castle's rungs independent of the earlier windows
  std::size_t equalities = 0;
};

/// Levels live on independent coordinates, T = T_1 x T_2 x ...; level n is coded with l = d_n
/// and xi generated by the windows of levels 1..n-1.
RealizationReport realize_array(const std::vector<LevelSpec>& specs, std::uint64_t seed, int xi_atoms = 2);

nlohmann::json to_json(const CastleModel& c);
nlohmann::json to_json(const SymbolAssignment& s);
nlohmann::json to_json(const IdentityReport& r);

/// Parses "1/3,2/3" style marginals.
std::vector<mpq_class> parse_marginal(const std::string& text);

}  // namespace llt::castle
