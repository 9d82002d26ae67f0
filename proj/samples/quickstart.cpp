// Generates a random 3-XORSAT instance below the threshold, solves it through
// the 2-core and prints the threshold report for k = 3.

#include <iostream>

#include "xorlab/xorlab.hpp"

int main()
{
    using namespace xorlab;
    const double c_star = thresholds::c_star(3);
    std::cout << "c_3* = " << c_star << "\n";

    const Instance inst = gen::gen_unconstrained(3, 850, 1000, {42, 0});
    const auto peeled = peel::two_core(inst);
    std::cout << "2-core: " << peeled.stats.core_vars << " variables, " << peeled.stats.core_eqs << " equations\n";

    const auto sol = gf2::solve(to_matrix(peeled.core), peeled.core.rhs);
    if (!sol.consistent) {
        std::cout << "unsatisfiable\n";
        return 0;
    }
    const Bits x = peel::extend_solution(*sol.one_solution, peeled.trace, inst);
    std::cout << "satisfiable, solution checks: " << std::boolalpha << gf2::satisfies(to_matrix(inst), x, inst.rhs)
              << "\n";
    std::cout << thresholds::to_json(thresholds::make_report(3, 0.85)).dump(2) << "\n";
}
