#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    spde::cli::RunSpec spec;
    try {
        spec = spde::cli::parse_args(argc, argv);
    } catch (const spde::cli::UsageError& e) {
        std::cerr << "spde-lab: " << e.what() << "\nRun with --help for usage.\n";
        return 1;
    }
    if (spec.help) {
        std::cout << *spec.help;
        return 0;
    }
    return spde::cli::run(spec, std::cout, std::cerr);
}
