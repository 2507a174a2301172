// Serial reference vs OpenMP differential_verify on a few effective groups.
// Usage: bench_differential [samples] [repeats]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "arclab/group_dsl.hpp"
#include "arclab/valuations.hpp"

using namespace arclab;

namespace {

double seconds(const LexWord& g, std::uint64_t p, std::uint64_t n, const DifferentialOptions& o, int repeats,
               DifferentialReport& out) {
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < repeats; ++i) out = differential_verify(g, p, n, o);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / repeats;
}

bool same(const DifferentialReport& a, const DifferentialReport& b) {
  if (a.points != b.points || a.falsification_runs != b.falsification_runs ||
      a.mismatches.size() != b.mismatches.size())
    return false;
  for (std::size_t i = 0; i < a.mismatches.size(); ++i) {
    if (!(a.mismatches[i].x == b.mismatches[i].x) || a.mismatches[i].check != b.mismatches[i].check) return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t samples = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 100;
  int repeats = argc > 2 ? std::atoi(argv[2]) : 1;
  std::cout << "threads: " << omp_get_max_threads() << ", samples: " << samples << "\n";
  std::cout << "group               p n   serial s  parallel s  speedup  agree\n";
  bool ok = true;
  struct Case {
    const char* dsl;
    std::uint64_t p, n;
  };
  for (auto c : {Case{"lex(Z,Q)", 2, 1}, Case{"lex(Z,Z)", 3, 1}, Case{"lex(real(1,pi))", 2, 2}, Case{"lex(Q)", 3, 0}}) {
    auto g = parse_group(c.dsl);
    DifferentialOptions o;
    o.samples = samples;
    o.witness_samples = samples;
    DifferentialReport serial, parallel;
    o.parallel = false;
    double ts = seconds(g, c.p, c.n, o, repeats, serial);
    o.parallel = true;
    double tp = seconds(g, c.p, c.n, o, repeats, parallel);
    bool agree = same(serial, parallel);
    ok = ok && agree;
    std::printf("%-18s %2llu %llu %10.3f %11.3f %8.2f  %s\n", c.dsl, static_cast<unsigned long long>(c.p),
                static_cast<unsigned long long>(c.n), ts, tp, ts / tp, agree ? "yes" : "NO");
  }
  return ok ? 0 : 1;
}
