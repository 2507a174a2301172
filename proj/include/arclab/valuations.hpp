#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arclab/convex.hpp"
#include "arclab/hahn.hpp"
#include "arclab/logic.hpp"
#include "arclab/oag.hpp"
#include "arclab/primes.hpp"

namespace arclab {

/// (p, n) for every p in `primes` and every n in [n_min, n_max]; no n_max means unbounded.
struct PnLabel {
  PrimeSet primes;
  std::uint64_t n_min = 0;
  std::optional<std::uint64_t> n_max;

  bool operator==(const PnLabel&) const = default;
};

std::string to_string(const PnLabel& l);

/// A henselian coarsening of v_K given by a convex subgroup. Bottom is v_K,
/// Top the trivial valuation.
struct ValuationDescriptor {
  LexWord group;
  ConvexCut cut;
  std::vector<PnLabel> labels;
};

/// v_cut(a) >= 0; zero belongs to every ring.
bool ring_member(const ValuationDescriptor& v, const HahnSeries& a);
/// The residue field R((Delta)) is real closed iff Delta is divisible.
bool is_residue_real_closed(const LexWord& g, const ConvexCut& c);

ValuationDescriptor v_p_descriptor(const LexWord& g, std::uint64_t p);
ValuationDescriptor v0_descriptor(const LexWord& g);
ValuationDescriptor v_pn_descriptor(const LexWord& g, std::uint64_t p, std::uint64_t n);

/// One cut of the image of (p, n) -> G_(p,n). A symbolic cut stands for one
/// cut per generic prime p_k (its tower position depends on k).
struct DefinableCut {
  SymCut cut;
  std::vector<PnLabel> labels;
};

struct DefinableImage {
  PrimeClasses classes;
  std::vector<DefinableCut> cuts;  // concrete cuts first, deepest last
  /// Labels realizing a concrete cut, empty when it is outside the image.
  std::vector<PnLabel> labels_of(const LexWord& g, const ConvexCut& c) const;
};

DefinableImage enumerate_definable(const LexWord& g, std::span<const std::uint64_t> display_primes = {});

struct ThmReport {
  bool cond1 = false;  // some definable valuation has real closed residue field
  bool cond2 = false;  // some prime p with G_p = G_0
  bool cond3 = false;  // v_0 is definable
  bool consistent() const { return cond1 == cond2 && cond2 == cond3; }
};

ThmReport verify_thm_defblRCF(const LexWord& g, std::span<const std::uint64_t> display_primes = {});

struct Mismatch {
  std::string check;  // "phi_p", "phi_pn", or "falsified"
  HahnSeries x;
  bool decided = false;
  bool expected = false;
  std::string detail;
};

struct DifferentialReport {
  std::uint64_t p = 0;
  std::uint64_t n = 0;
  std::size_t points = 0;        // sampled plus targeted
  std::size_t falsification_runs = 0;
  std::vector<Mismatch> mismatches;
};

struct DifferentialOptions {
  std::size_t samples = 200;
  std::uint64_t seed = 42;
  std::size_t witness_samples = 200;
  bool parallel = true;
  bool falsify = true;
};

/// Monomials straddling every cut of the word (coefficients +-1, +-3, exponents
/// +-1/2, +-1, +-2 in each coordinate where they exist).
std::vector<HahnSeries> boundary_points(const Group& g);

/// Compares phi_p and phi_(p,n) with ring membership of v_p and v_(p,n) on
/// boundary points plus `samples` random series. Serial and parallel runs
/// return identical reports.
DifferentialReport differential_verify(const LexWord& g, std::uint64_t p, std::uint64_t n,
                                       const DifferentialOptions& options = {});

/// Generic harness: decides `formula` at every point and compares with the ring of `v`.
std::vector<Mismatch> compare_with_ring(const FormulaPtr& formula, const ValuationDescriptor& v,
                                        const std::vector<HahnSeries>& points, const std::string& check,
                                        bool parallel);

enum class CutStatus { Definable, NonDefinable, Undecided };
std::string to_string(CutStatus s);

struct CutEntry {
  ConvexCut cut;
  CutStatus status = CutStatus::Undecided;
  std::vector<PnLabel> labels;            // Definable
  std::optional<Certificate> certificate; // NonDefinable
  bool residue_real_closed = false;
  std::string note;                       // Undecided reason or image-consistency red flag
};

struct ClassificationReport {
  LexWord group;
  std::vector<std::uint64_t> display_primes;
  std::vector<std::pair<std::uint64_t, QuotientExponent>> np_table;
  PrimeSet tail_primes;
  QuotientExponent tail_np;
  std::vector<CutEntry> cuts;
  bool chain_truncated = false;
  DefinableImage image;
  ThmReport thm26;
  bool dp_minimal = false;
  std::vector<DifferentialReport> differential;  // empty for non-effective groups
  std::vector<std::string> notes;
  std::vector<std::string> red_flags;

  bool ok() const;
};

struct ClassificationOptions {
  std::vector<std::uint64_t> display_primes = {2, 3, 5, 7};
  std::vector<std::uint64_t> differential_primes = {2, 3};
  DifferentialOptions differential;
  bool run_differential = true;
};

ClassificationReport classification_report(const LexWord& g, const ClassificationOptions& options = {});

/// Stable-field-order JSON and a plain-text rendering.
std::string report_json(const ClassificationReport& r);
std::string report_text(const ClassificationReport& r);

/// Groups used by the acceptance suite and the examples registry.
struct LibraryGroup {
  std::string name;
  std::string dsl;
};
const std::vector<LibraryGroup>& library_groups();

}  // namespace arclab
