#include <filesystem>
#include <iostream>

#include "gridec/cases.hpp"
#include "gridec/scenario.hpp"

// Regenerates the bundled case files from the builders in gridec::cases.
// Run after changing a builder; the data files are checked in.
int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_cases <output-dir>\n";
        return 1;
    }
    try {
        const std::filesystem::path dir(argv[1]);
        std::filesystem::create_directories(dir);
        gridec::save_case(gridec::cases::case5(), (dir / "case5.json").string());
        gridec::save_case(gridec::cases::case30(), (dir / "case30.json").string());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
