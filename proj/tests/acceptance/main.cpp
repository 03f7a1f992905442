// Prints one PASS/FAIL line per acceptance criterion; exits non-zero on any
// failure. -v adds a line per part; --digest prints the determinism digest.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <string>

#include "criteria.hpp"

namespace {

using estkit::acceptance::Outcome;

std::string capture(const std::string& command) {
  std::string text;
  if (FILE* pipe = popen(command.c_str(), "r")) {
    char buffer[256];
    while (std::fgets(buffer, sizeof buffer, pipe)) text += buffer;
    if (pclose(pipe) != 0) text += " (exit status non-zero)";
  }
  return text;
}

// The seeded run repeated in two fresh processes.
Outcome separate_processes(const std::string& self) {
  Outcome out;
  const std::string command = "'" + self + "' --digest";
  const std::string first = capture(command);
  const std::string second = capture(command);
  const std::string here = estkit::acceptance::determinism_digest() + "\n";
  out.expect(!first.empty() && first == second, "digests of two processes differ");
  out.expect(first == here, "digest differs from this process");
  out.note = "digest " + here.substr(0, here.size() - 1);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using clock = std::chrono::steady_clock;
  const bool verbose = argc > 1 && std::strcmp(argv[1], "-v") == 0;
  if (argc > 1 && std::strcmp(argv[1], "--digest") == 0) {
    std::cout << estkit::acceptance::determinism_digest() << "\n";
    return 0;
  }

  auto criteria = estkit::acceptance::primary_criteria();
  const std::string self = argv[0];
  for (auto& c : criteria) {
    if (c.name == "Determinism") {
      c.parts.emplace_back("separate processes", [self] { return separate_processes(self); });
    }
  }

  bool all = true;
  for (const auto& criterion : criteria) {
    Outcome total;
    std::string parts;
    const auto start = clock::now();
    for (const auto& [name, run] : criterion.parts) {
      const auto part_start = clock::now();
      const auto outcome = run();
      const double secs = std::chrono::duration<double>(clock::now() - part_start).count();
      if (verbose) {
        std::cout << "  " << (outcome.pass() ? "ok  " : "FAIL") << " " << criterion.name << " / "
                  << name << " (" << secs << " s): " << outcome.summary() << "\n";
      }
      if (!outcome.note.empty()) parts += (parts.empty() ? "" : "; ") + name + ": " + outcome.note;
      total.checks += outcome.checks;
      total.failures += outcome.failures;
      for (const auto& m : outcome.messages) {
        if (total.messages.size() < 5) total.messages.push_back(name + ": " + m);
      }
    }
    const double secs = std::chrono::duration<double>(clock::now() - start).count();
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2f s", secs);
    bool pass = total.pass();
    std::string extra;
    if (criterion.name == "Snippet parity" && secs >= 60.0) {
      pass = false;
      extra = " (over the 60 s budget)";
    }
    all = all && pass;
    std::cout << (pass ? "PASS" : "FAIL") << "  " << criterion.name << "  [" << total.checks
              << " checks, " << total.failures << " failures, " << timing << extra << "]";
    if (!parts.empty()) std::cout << "  " << parts;
    std::cout << "\n";
    for (const auto& m : total.messages) std::cout << "    " << m << "\n";
    std::cout.flush();
  }
  return all ? 0 : 1;
}
