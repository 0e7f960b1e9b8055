#include <spoisson/verify.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  spoisson::VerifyOptions options;
  for (int i = 1; i < argc; ++i) options.criteria.push_back(std::atoi(argv[i]));
  const auto run = spoisson::run_verify(options, [](const spoisson::CriterionOutcome& o) {
    std::cout << spoisson::format_outcome(o) << std::endl;
  });
  std::size_t passed = 0;
  for (const auto& o : run.outcomes) passed += o.ok();
  std::cout << passed << "/" << run.outcomes.size() << " criteria passed" << std::endl;
  return run.all_ok() ? 0 : 1;
}
