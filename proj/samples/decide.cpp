// Builds the compatibility matrix of a small formula, runs every depletion
// variant on it and prints the verdicts next to the exhaustive oracle.

#include <iostream>

#include "gridsat/gridsat.hpp"

int main() {
  // (x1 v x2 v -x3) & (-x1 v x3) & (-x2 v x3) & (-x3 v x1)
  const gridsat::Cnf f = gridsat::make_cnf(3, {{1, 2, -3}, {-1, 3}, {-2, 3}, {-3, 1}});

  const gridsat::CompatMatrix c = gridsat::build_matrix(f);
  std::cout << "matrix side " << c.total_dimension() << ", set entries " << c.count() << "\n";

  for (auto v : gridsat::kAllVariants) {
    auto ev = gridsat::run_variant(v, c);
    std::cout << gridsat::to_string(v) << ": " << gridsat::to_string(ev.decision) << " after " << ev.stats.sweeps
              << " sweeps, " << ev.stats.box_updates << " entries cleared\n";
  }

  auto truth = gridsat::brute_force(f, true);
  std::cout << "oracle: " << gridsat::to_string(truth.decision) << ", " << truth.models.size() << " model(s)\n";

  auto ex = gridsat::extract_self_reduce(f, gridsat::Variant::basic);
  if (ex.model) std::cout << gridsat::model_line(*ex.model) << "\n";
  return 0;
}
