// Acceptance suite: runs the pinned criteria and prints one line per check.
// Exit code 0 on all-pass, 2 on any failure.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <thread>

#include "windlab/verify.hpp"

using namespace windlab;

int main(int argc, char** argv) {
  int only = 0;
  int threads = 0;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--only") && i + 1 < argc) only = std::atoi(argv[++i]);
    else if (!std::strcmp(argv[i], "--threads") && i + 1 < argc) threads = std::atoi(argv[++i]);
    else {
      std::fprintf(stderr, "usage: %s [--only k] [--threads n]\n", argv[0]);
      return 1;
    }
  }
  if (threads <= 0) {
    unsigned hw = std::thread::hardware_concurrency();
    threads = hw == 0 ? 1 : int(hw);
  }

  bool ok = true;
  for (int k = 1; k <= kAcceptanceCriteria; ++k) {
    if (only != 0 && k != only) continue;
    auto t0 = std::chrono::steady_clock::now();
    std::vector<Check> checks;
    try {
      checks = acceptance_criterion(k, threads);
    } catch (const std::exception& e) {
      std::printf("FAIL criterion %d (%s): exception: %s\n", k, acceptance_criterion_name(k).c_str(),
                  e.what());
      ok = false;
      continue;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool crit_ok = all_pass(checks);
    ok = ok && crit_ok;
    std::printf("%s criterion %d (%s) [%.1fs]\n", crit_ok ? "PASS" : "FAIL", k,
                acceptance_criterion_name(k).c_str(), secs);
    for (const auto& c : checks)
      std::printf("  %s %-44s value=%-13.6g tol=%-10.4g %s\n", c.pass ? "pass" : "FAIL",
                  c.name.c_str(), c.value, c.tol, c.note.c_str());
  }
  return ok ? 0 : 2;
}
