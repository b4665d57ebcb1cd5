// Acceptance suite: one PASS/FAIL line per criterion, with timings.
// Exits nonzero if any criterion fails.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mrt/validation.hpp"

namespace {

using Clock = std::chrono::steady_clock;
using mrt::validation::Criterion;

struct Timed {
  Criterion c;
  double seconds;
};

Timed timed(const std::function<Criterion()>& f) {
  const auto t0 = Clock::now();
  auto c = f();
  return {std::move(c), std::chrono::duration<double>(Clock::now() - t0).count()};
}

}  // namespace

int main() {
  constexpr std::uint64_t seed = 20240611;
  namespace v = mrt::validation;

  // Runtime ceilings in seconds; 0 means none.
  const std::vector<std::pair<std::function<Criterion()>, double>> plan{
      {v::fdt_identity, 1.0},
      {v::shift_crossover, 10.0},
      {v::detailed_balance, 1.0},
      {[] { return v::static_noise_mc(seed); }, 60.0},
      {v::voigt_consistency, 0.0},
      {v::volterra_solver, 0.0},
      {v::nonlocal_peak, 0.0},
      {v::short_time, 0.0},
      {v::multichannel, 0.0},
  };

  std::vector<Timed> results;
  for (const auto& [f, ceiling] : plan) {
    auto r = timed(f);
    if (ceiling > 0.0 && r.seconds >= ceiling) {
      r.c.pass = false;
      r.c.detail += " runtime over " + mrt::csv::format(ceiling) + " s";
    }
    results.push_back(std::move(r));
  }

  // 10: the physics criteria serialize identically on a second run.
  const auto t0 = Clock::now();
  std::ostringstream a, b;
  v::write_csv(a, v::run_physics(seed));
  v::write_csv(b, v::run_physics(seed));
  const bool same = a.str() == b.str();
  results.push_back({v::detail::make(10, "determinism", same ? 0.0 : 1.0, 0.0, "two runs, same seed"),
                     std::chrono::duration<double>(Clock::now() - t0).count()});

  int failed = 0;
  for (const auto& r : results) {
    std::printf("criterion %2d %s %-26s value=%-24s limit=%-8s time=%.3fs  %s\n", r.c.id, r.c.pass ? "PASS" : "FAIL",
                r.c.name.c_str(), mrt::csv::format(r.c.value).c_str(), mrt::csv::format(r.c.limit).c_str(), r.seconds,
                r.c.detail.c_str());
    if (!r.c.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
  return failed == 0 ? 0 : 1;
}
