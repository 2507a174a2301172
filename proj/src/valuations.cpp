#include "arclab/valuations.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

#include "json.hpp"

#include "arclab/errors.hpp"
#include "arclab/group_dsl.hpp"

namespace arclab {

namespace {

using Json = nlohmann::ordered_json;

std::string range_text(const PnLabel& l) {
  if (l.n_max && *l.n_max == l.n_min) return std::to_string(l.n_min);
  return std::to_string(l.n_min) + ".." + (l.n_max ? std::to_string(*l.n_max) : std::string("inf"));
}

// Merges labels with the same n-range and orders them by range, then primes.
std::vector<PnLabel> normalize(std::vector<PnLabel> in) {
  std::vector<PnLabel> out;
  for (auto& l : in) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const PnLabel& o) { return o.n_min == l.n_min && o.n_max == l.n_max; });
    if (it == out.end()) {
      out.push_back(std::move(l));
    } else {
      it->primes = it->primes | l.primes;
    }
  }
  std::sort(out.begin(), out.end(), [](const PnLabel& a, const PnLabel& b) {
    if (a.n_min != b.n_min) return a.n_min < b.n_min;
    return a.n_max.value_or(UINT64_MAX) < b.n_max.value_or(UINT64_MAX);
  });
  return out;
}

bool same_cut(const SymCut& a, const ConvexCut& c) {
  auto conc = a.concrete();
  return conc && *conc == c;
}

// n-ranges on which G_(p,n) is constant. The cut can only move while n has
// not yet covered every finite piece below the first infinite one.
std::vector<std::pair<PnLabel, SymCut>> pn_ranges(const LexWord& g, const PrimeArg& p, const PrimeSet& primes) {
  auto np = group_exponent(g, p);
  std::uint64_t last = 0;
  if (np.value) {
    last = *np.value;
  } else {
    for (const auto& piece : nonzero_pieces(g, p)) {
      if (piece.exponent.is_infinite()) break;
      last += *piece.exponent.value;
    }
  }
  std::vector<std::pair<PnLabel, SymCut>> out;
  for (std::uint64_t n = 0; n <= last; ++n) {
    auto c = g_pn(g, p, n);
    if (!out.empty() && out.back().second == c) {
      out.back().first.n_max = n;
    } else {
      out.push_back({PnLabel{primes, n, n}, c});
    }
  }
  if (!np.value) out.back().first.n_max.reset();
  return out;
}

Json cut_json(const LexWord& g, const ConvexCut& c) { return to_string(g, c); }

Json label_json(const PnLabel& l) {
  Json j;
  j["primes"] = l.primes.to_string();
  j["n"] = range_text(l);
  return j;
}

Json labels_json(const std::vector<PnLabel>& ls) {
  Json arr = Json::array();
  for (const auto& l : ls) arr.push_back(label_json(l));
  return arr;
}

std::string labels_text(const std::vector<PnLabel>& ls) {
  std::string out;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (i) out += ", ";
    out += to_string(ls[i]);
  }
  return out;
}

bool has_tower(const LexWord& g) {
  return std::any_of(g.components().begin(), g.components().end(),
                     [](const ComponentKind& c) { return std::holds_alternative<OmegaTower>(c); });
}

bool is_real_pi(const LexWord& g) {
  if (g.size() != 1) return false;
  auto* f = std::get_if<FreeReal>(&g[0]);
  return f && f->gens.size() == 2;
}

}  // namespace

std::string to_string(const PnLabel& l) {
  std::string primes = l.primes.is_all() ? "p" : l.primes.finite() && l.primes.members().size() == 1
                                                      ? std::to_string(l.primes.members()[0])
                                                      : "p";
  std::string out = "(" + primes + "," + range_text(l) + ")";
  if (primes == "p" && !l.primes.is_all()) out += " for p in " + l.primes.to_string();
  if (l.primes.is_all()) out += " for all p";
  return out;
}

bool ring_member(const ValuationDescriptor& v, const HahnSeries& a) {
  if (a.is_zero()) return true;
  if (v.cut.inner) throw NonEffectiveGroup("ring membership at an inner cut");
  return prefix_sign(v.group, v_of(a), v.cut.seg) >= 0;
}

bool is_residue_real_closed(const LexWord& g, const ConvexCut& c) { return suffix_divisible_primes(g, c).is_all(); }

ValuationDescriptor v_p_descriptor(const LexWord& g, std::uint64_t p) { return {g, max_p_divisible(g, p), {}}; }

ValuationDescriptor v0_descriptor(const LexWord& g) { return {g, max_divisible(g), {}}; }

ValuationDescriptor v_pn_descriptor(const LexWord& g, std::uint64_t p, std::uint64_t n) {
  return {g, g_pn(g, p, n), {PnLabel{PrimeSet::of({p}), n, n}}};
}

std::vector<PnLabel> DefinableImage::labels_of(const LexWord& g, const ConvexCut& c) const {
  (void)g;
  std::vector<PnLabel> out;
  for (const auto& d : cuts) {
    if (!d.cut.symbolic()) {
      if (same_cut(d.cut, c)) out.insert(out.end(), d.labels.begin(), d.labels.end());
      continue;
    }
    // inner(k + offset) for the generic prime p_k.
    if (d.cut.seg != c.seg || !c.inner) continue;
    std::int64_t k = static_cast<std::int64_t>(*c.inner) - d.cut.inner->offset;
    if (k < static_cast<std::int64_t>(classes.threshold)) continue;
    auto p = nth_prime(static_cast<std::uint64_t>(k));
    if (!classes.generic_set().contains(p)) continue;
    for (const auto& l : d.labels) out.push_back(PnLabel{PrimeSet::of({p}), l.n_min, l.n_max});
  }
  return normalize(std::move(out));
}

DefinableImage enumerate_definable(const LexWord& g, std::span<const std::uint64_t> display_primes) {
  DefinableImage out;
  out.classes = prime_classes(g, display_primes);
  std::vector<std::pair<SymCut, std::vector<PnLabel>>> acc;
  for (const auto& rep : out.classes.representatives()) {
    for (auto& [label, cut] : pn_ranges(g, rep, out.classes.members(rep))) {
      auto it = std::find_if(acc.begin(), acc.end(), [&](const auto& e) { return e.first == cut; });
      if (it == acc.end()) {
        acc.push_back({cut, {label}});
      } else {
        it->second.push_back(label);
      }
    }
  }
  for (auto& [cut, labels] : acc) out.cuts.push_back({cut, normalize(std::move(labels))});
  // Shallowest first; symbolic cuts after every concrete cut of their component.
  std::stable_sort(out.cuts.begin(), out.cuts.end(), [&](const DefinableCut& a, const DefinableCut& b) {
    if (a.cut.seg != b.cut.seg) return a.cut.seg < b.cut.seg;
    if (a.cut.symbolic() != b.cut.symbolic()) return b.cut.symbolic();
    auto ia = a.cut.inner.value_or(InnerPos{}).offset, ib = b.cut.inner.value_or(InnerPos{}).offset;
    return ia < ib;
  });
  return out;
}

ThmReport verify_thm_defblRCF(const LexWord& g, std::span<const std::uint64_t> display_primes) {
  ThmReport r;
  auto image = enumerate_definable(g, display_primes);
  r.cond2 = !thm_condition_prime(g).is_empty();
  r.cond3 = !image.labels_of(g, max_divisible(g)).empty();
  for (const auto& d : image.cuts) {
    // A symbolic cut is an inner tower cut; its suffix is divisible only by
    // finitely many primes whichever generic prime realizes it.
    auto c = d.cut.symbolic() ? d.cut.realize(image.classes.threshold) : *d.cut.concrete();
    if (is_residue_real_closed(g, c)) r.cond1 = true;
  }
  return r;
}

std::vector<HahnSeries> boundary_points(const Group& g) {
  std::vector<HahnSeries> out;
  const auto dims = g->total_arity();
  const std::vector<Rational> scales = {Rational(1), Rational(-1), Rational(1, 2), Rational(-1, 2), Rational(2),
                                        Rational(-2)};
  for (std::size_t j = 0; j < dims; ++j) {
    for (const auto& s : scales) {
      std::vector<Rational> c(dims, Rational(0));
      c[j] = s;
      GroupElement e;
      try {
        e = make_element(*g, c);
      } catch (const std::invalid_argument&) {
        continue;
      }
      out.push_back(HahnSeries::monomial(g, 1, e));
      out.push_back(HahnSeries::monomial(g, -3, e));
    }
  }
  out.push_back(HahnSeries::constant(g, 1));
  out.push_back(HahnSeries::constant(g, -2));
  out.push_back(HahnSeries::zero(g));
  return out;
}

std::vector<Mismatch> compare_with_ring(const FormulaPtr& formula, const ValuationDescriptor& v,
                                        const std::vector<HahnSeries>& points, const std::string& check,
                                        bool parallel) {
  std::vector<std::optional<Mismatch>> found(points.size());
  const long count = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long i = 0; i < count; ++i) {
    const auto& x = points[i];
    try {
      bool want = ring_member(v, x);
      bool got = eval_decidable(formula, {{"x", x}}, x.group());
      if (got != want) found[i] = Mismatch{check, x, got, want, ""};
    } catch (const std::exception& e) {
      found[i] = Mismatch{check, x, false, false, std::string("error: ") + e.what()};
    }
  }
  std::vector<Mismatch> out;
  for (auto& m : found) {
    if (m) out.push_back(std::move(*m));
  }
  return out;
}

DifferentialReport differential_verify(const LexWord& g, std::uint64_t p, std::uint64_t n,
                                       const DifferentialOptions& options) {
  if (!g.effective()) throw NonEffectiveGroup("differential verification needs an effective group");
  auto group = make_group(g);
  DifferentialReport r;
  r.p = p;
  r.n = n;
  auto points = boundary_points(group);
  for (std::size_t i = 0; i < options.samples; ++i) points.push_back(sample_series(group, options.seed + i));
  r.points = points.size();

  auto phi = build_phi_p(p);
  auto phi_pn = build_phi_pn(p, n, choose_params(group, p, n));
  for (auto& m : compare_with_ring(phi, v_p_descriptor(g, p), points, "phi_p", options.parallel)) {
    r.mismatches.push_back(std::move(m));
  }
  for (auto& m : compare_with_ring(phi_pn, v_pn_descriptor(g, p, n), points, "phi_pn", options.parallel)) {
    r.mismatches.push_back(std::move(m));
  }
  if (!options.falsify) return r;

  std::vector<FormulaPtr> clauses;
  for (const auto& c : universal_clauses(phi_pn)) {
    if (std::none_of(clauses.begin(), clauses.end(), [&](const FormulaPtr& o) { return *o == *c; })) {
      clauses.push_back(c);
    }
  }
  const SampleBudget budget{options.witness_samples, options.seed};
  const long count = static_cast<long>(points.size());
  std::vector<std::vector<Mismatch>> found(points.size());
  std::vector<std::size_t> runs(points.size(), 0);
#pragma omp parallel for schedule(dynamic) if (options.parallel)
  for (long i = 0; i < count; ++i) {
    const Assignment env{{"x", points[i]}};
    for (const auto& c : clauses) {
      try {
        if (!eval_decidable(c, env, group)) continue;
        ++runs[i];
        auto out = eval_sampled(c, env, group, budget);
        if (out.kind == EvalOutcome::Kind::FalsifiedBy) {
          std::string w;
          for (const auto& [name, value] : out.witness) w += name + " = " + to_string(value);
          found[i].push_back(Mismatch{"falsified", points[i], true, false, "clause refuted by " + w});
        }
      } catch (const std::exception& e) {
        found[i].push_back(Mismatch{"falsified", points[i], false, false, std::string("error: ") + e.what()});
      }
    }
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    r.falsification_runs += runs[i];
    for (auto& m : found[i]) r.mismatches.push_back(std::move(m));
  }
  return r;
}

namespace {

// Reports are pure in their inputs (the parallel flag does not change them), so
// repeated classifications in one process share them.
DifferentialReport cached_differential(const LexWord& g, std::uint64_t p, std::uint64_t n, const DifferentialOptions& o) {
  static std::mutex mutex;
  static std::map<std::string, DifferentialReport> cache;
  auto key = to_string(g) + "|" + std::to_string(p) + "|" + std::to_string(n) + "|" + std::to_string(o.samples) + "|" +
             std::to_string(o.seed) + "|" + std::to_string(o.witness_samples) + "|" + (o.falsify ? "f" : "-");
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto r = differential_verify(g, p, n, o);
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(r)).first->second;
}

}  // namespace

std::string to_string(CutStatus s) {
  switch (s) {
    case CutStatus::Definable:
      return "definable";
    case CutStatus::NonDefinable:
      return "non-definable";
    case CutStatus::Undecided:
      return "undecided";
  }
  return "?";
}

bool ClassificationReport::ok() const {
  if (!red_flags.empty() || !thm26.consistent()) return false;
  return std::all_of(differential.begin(), differential.end(),
                     [](const DifferentialReport& d) { return d.mismatches.empty(); });
}

ClassificationReport classification_report(const LexWord& g, const ClassificationOptions& options) {
  ClassificationReport r;
  r.group = g;
  r.display_primes = PrimeSet::of(options.display_primes).members();
  r.image = enumerate_definable(g, r.display_primes);
  for (auto p : r.image.classes.explicit_primes) r.np_table.push_back({p, group_exponent(g, p)});
  r.tail_primes = r.image.classes.generic_set();
  r.tail_np = group_exponent(g, PrimeArg::generic_member());
  r.thm26 = verify_thm_defblRCF(g, r.display_primes);
  r.dp_minimal = is_dp_minimal(g);

  // Inner tower cuts are listed up to one past the first generic position.
  const std::uint64_t window = r.image.classes.threshold + 1;
  auto chain = convex_cuts(g, window);
  std::size_t limit = 0;
  for (const auto& c : g.components()) limit += is_schematic_chain(c) ? window + 1 : 1;
  auto cuts = chain.take(limit + 1);
  r.chain_truncated = has_tower(g);
  for (const auto& c : cuts) {
    CutEntry e;
    e.cut = c;
    e.labels = r.image.labels_of(g, c);
    e.residue_real_closed = is_residue_real_closed(g, c);
    auto cert = non_definability_certificate(g, c, r.display_primes);
    if (!e.labels.empty()) {
      e.status = CutStatus::Definable;
      if (cert) {
        e.note = "image consistency violated: definable cut has a certificate";
        r.red_flags.push_back(to_string(g, c) + ": " + e.note);
      }
    } else if (cert) {
      e.status = CutStatus::NonDefinable;
      e.certificate = std::move(cert);
    } else {
      e.status = CutStatus::Undecided;
      e.note = "outside the definable image but no p-regular straddling pair exists for some prime";
      r.red_flags.push_back(to_string(g, c) + ": " + e.note);
    }
    r.cuts.push_back(std::move(e));
  }

  if (is_real_pi(g)) {
    r.notes.push_back(
        "discrepancy: the expected non-injectivity v_(p,1) = v_(p,2) for all p does not hold; computed here "
        "G_(p,0) = G_(p,1) = Bottom and G_(p,2) = Top, so v_(p,0) = v_(p,1) and v_(p,2) is trivial");
  }
  if (has_tower(g)) {
    r.notes.push_back(
        "ordering assumption: omega_tower is ordered lexicographically with its first summand most significant; "
        "summands are B_k for k >= max(start,1)");
    r.notes.push_back("chain listed up to inner(" + std::to_string(window) + "); deeper inner cuts follow the " +
                      "generic-prime pattern shown in the definable image");
  }

  if (options.run_differential && g.effective()) {
    for (auto p : options.differential_primes) {
      auto np = group_exponent(g, p);
      for (std::uint64_t n = 0; n <= *np.value; ++n) r.differential.push_back(cached_differential(g, p, n, options.differential));
    }
  } else if (options.run_differential) {
    r.notes.push_back("differential verification skipped: the group has no elements (schematic components)");
  }
  return r;
}

std::string report_json(const ClassificationReport& r) {
  const auto& g = r.group;
  Json j;
  j["group"] = to_string(g);
  Json np = Json::array();
  for (const auto& [p, e] : r.np_table) {
    Json row;
    row["p"] = p;
    row["n_p"] = e.to_string();
    row["G_p"] = to_string(g, max_p_divisible(g, p));
    np.push_back(row);
  }
  Json tail;
  tail["primes"] = r.tail_primes.to_string();
  tail["n_p"] = r.tail_np.to_string();
  tail["G_p"] = to_string(g, g_pn(g, PrimeArg::generic_member(), 0));
  np.push_back(tail);
  j["np_table"] = np;
  j["G_0"] = to_string(g, max_divisible(g));

  Json cuts = Json::array();
  for (const auto& e : r.cuts) {
    Json c;
    c["cut"] = cut_json(g, e.cut);
    c["status"] = to_string(e.status);
    if (!e.note.empty()) c["note"] = e.note;
    cuts.push_back(c);
  }
  j["cuts"] = cuts;
  j["chain_truncated"] = r.chain_truncated;

  Json definable = Json::array();
  for (const auto& d : r.image.cuts) {
    Json c;
    c["cut"] = to_string(g, d.cut);
    c["labels"] = labels_json(d.labels);
    c["formula"] = "phi_(p,n)";
    definable.push_back(c);
  }
  j["definable"] = definable;

  Json certs = Json::array();
  for (const auto& e : r.cuts) {
    if (!e.certificate) continue;
    Json c;
    c["target"] = cut_json(g, e.cut);
    Json entries = Json::array();
    for (const auto& x : e.certificate->entries) {
      Json en;
      en["primes"] = x.primes.to_string();
      en["low"] = to_string(g, x.low);
      en["high"] = to_string(g, x.high);
      en["rule"] = to_string(x.rule);
      entries.push_back(en);
    }
    c["entries"] = entries;
    certs.push_back(c);
  }
  j["certificates"] = certs;

  Json flags = Json::array();
  for (const auto& e : r.cuts) {
    Json f;
    f["cut"] = cut_json(g, e.cut);
    f["residue_real_closed"] = e.residue_real_closed;
    flags.push_back(f);
  }
  j["residue_flags"] = flags;

  Json thm;
  thm["cond1"] = r.thm26.cond1;
  thm["cond2"] = r.thm26.cond2;
  thm["cond3"] = r.thm26.cond3;
  thm["consistent"] = r.thm26.consistent();
  j["thm26"] = thm;
  j["dp_minimal"] = r.dp_minimal;

  Json diff = Json::array();
  for (const auto& d : r.differential) {
    Json x;
    x["p"] = d.p;
    x["n"] = d.n;
    x["samples"] = d.points;
    x["falsification_runs"] = d.falsification_runs;
    Json ms = Json::array();
    for (const auto& m : d.mismatches) {
      Json mj;
      mj["check"] = m.check;
      mj["x"] = to_string(m.x);
      mj["decided"] = m.decided;
      mj["expected"] = m.expected;
      if (!m.detail.empty()) mj["detail"] = m.detail;
      ms.push_back(mj);
    }
    x["mismatches"] = ms;
    diff.push_back(x);
  }
  j["differential"] = diff;
  j["notes"] = r.notes;
  j["red_flags"] = r.red_flags;
  return j.dump(2) + "\n";
}

std::string report_text(const ClassificationReport& r) {
  const auto& g = r.group;
  std::ostringstream os;
  os << "group: " << to_string(g) << "\n\n";
  os << "n_p (exponent of |G/pG|) and G_p (maximal p-divisible convex subgroup):\n";
  for (const auto& [p, e] : r.np_table) {
    os << "  p = " << p << ": n_p = " << e.to_string() << ", G_p = " << to_string(g, max_p_divisible(g, p)) << "\n";
  }
  os << "  p in " << r.tail_primes.to_string() << ": n_p = " << r.tail_np.to_string()
     << ", G_p = " << to_string(g, g_pn(g, PrimeArg::generic_member(), 0)) << "\n";
  os << "  G_0 = " << to_string(g, max_divisible(g)) << "\n\n";

  os << "convex subgroups (Top first):\n";
  for (const auto& e : r.cuts) {
    os << "  " << to_string(g, e.cut) << "  " << to_string(e.status);
    if (!e.labels.empty()) os << "  " << labels_text(e.labels);
    if (e.residue_real_closed) os << "  [real closed residue field]";
    os << "\n";
    if (e.certificate) {
      for (const auto& x : e.certificate->entries) {
        os << "      p in " << x.primes.to_string() << ": (" << to_string(g, x.low) << ", " << to_string(g, x.high)
           << ") is p-regular, " << to_string(x.rule) << "\n";
      }
    }
    if (!e.note.empty()) os << "      " << e.note << "\n";
  }
  os << "\ndefinable image of (p,n) -> G_(p,n):\n";
  for (const auto& d : r.image.cuts) os << "  " << to_string(g, d.cut) << ": " << labels_text(d.labels) << "\n";

  os << "\ndefinable real closed residue criterion: cond1 " << (r.thm26.cond1 ? "true" : "false") << ", cond2 "
     << (r.thm26.cond2 ? "true" : "false") << ", cond3 " << (r.thm26.cond3 ? "true" : "false") << ", "
     << (r.thm26.consistent() ? "consistent" : "INCONSISTENT") << "\n";
  os << "dp-minimal: " << (r.dp_minimal ? "true" : "false") << "\n";

  if (!r.differential.empty()) {
    os << "\ndifferential check (formula vs valuation ring):\n";
    for (const auto& d : r.differential) {
      os << "  p = " << d.p << ", n = " << d.n << ": " << d.points << " points, " << d.falsification_runs
         << " falsification runs, " << d.mismatches.size() << " mismatches\n";
      for (const auto& m : d.mismatches) {
        os << "    " << m.check << " at x = " << to_string(m.x) << ": decided " << m.decided << ", ring "
           << m.expected << (m.detail.empty() ? "" : " (" + m.detail + ")") << "\n";
      }
    }
  }
  for (const auto& n : r.notes) os << "\nnote: " << n << "\n";
  for (const auto& f : r.red_flags) os << "\nRED FLAG: " << f << "\n";
  return os.str();
}

const std::vector<LibraryGroup>& library_groups() {
  static const std::vector<LibraryGroup> groups = {
      {"k1", "lex(Z,Q)"},
      {"k2", "lex(omega_tower(start=0))"},
      {"zpluspi", "lex(real(1,pi))"},
      {"c0", "lex(poly_module(Zloc(2),pi))"},
      {"zz", "lex(Z,Z)"},
      {"zloc2q", "lex(Zloc(2),Q)"},
      {"q", "lex(Q)"},
  };
  return groups;
}

}  // namespace arclab
