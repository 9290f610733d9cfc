#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fwdtd {

struct VerifyReport {
  std::string suite;
  std::vector<std::string> lines;
  std::size_t checks = 0;
  std::size_t failures = 0;

  bool passed() const { return failures == 0 && checks > 0; }
  void check(bool ok, const std::string& what);
  void note(const std::string& what) { lines.push_back("  " + what); }
};

/// Analytic gradients against central differences for every approximator kind,
/// max relative error |a - b| / max(|a|, |b|, 1e-3) below 1e-5.
VerifyReport verify_gradcheck(std::uint64_t seed, std::size_t samples = 100);

/// Incremental horizon extensions, start shifts and the backward recursion
/// against the direct definition on random tapes; weight-sum identity.
VerifyReport verify_return_oracle(std::uint64_t seed, std::size_t tapes = 1000);

/// Reductions between algorithms on seeded episodes, weights equal within 1e-9.
VerifyReport verify_equivalence(std::uint64_t seed);

/// Ratio ||theta_td - theta_lambda|| / ||theta_td - theta_0|| shrinking with alpha.
VerifyReport verify_theorem1(std::uint64_t seed, std::size_t seeds = 20);

/// Simulated one-state end values against the closed forms, plus the divergence boundary.
VerifyReport verify_one_state();

std::vector<std::string> verify_suite_names();
/// Throws ConfigError for an unknown suite.
VerifyReport run_verify(std::string_view suite, std::uint64_t seed);

}  // namespace fwdtd
