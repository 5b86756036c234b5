#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <iostream>

#include "hybrid/acceptance.hpp"

using namespace hybrid;

int main(int argc, char** argv) {
    acceptance::Options opt;
    bool verbose = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--strict") == 0) opt.profile = acceptance::ToleranceProfile::strict;
        if (std::strcmp(argv[i], "--verbose") == 0) verbose = true;
    }
    try {
        const Database db = Database::load();
        int failed = 0;
        for (const auto& spec : acceptance::criteria()) {
            const acceptance::CriterionResult r = acceptance::run_criterion(spec.id, db, opt);
            std::cout << acceptance::summary_line(r) << "\n";
            if (!r.pass() || verbose) {
                for (const auto& c : r.checks)
                    std::printf("    %s %s = %.6g in [%.6g, %.6g]\n", c.pass ? "ok  " : "FAIL", c.name.c_str(), c.value,
                                c.lo, c.hi);
                for (const auto& n : r.notes) std::printf("    note: %s\n", n.c_str());
            }
            failed += r.pass() ? 0 : 1;
        }
        std::cout << (14 - failed) << "/14 criteria pass (" << acceptance::to_string(opt.profile) << " profile)\n";
        return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
