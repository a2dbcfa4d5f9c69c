// Regenerates the shipped model documents from the fixture builders.
// Run from the repository root: build/tools/render_fixtures models/
#include <fstream>
#include <iostream>

#include <refopt/fixtures.hpp>

int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? argv[1] : "models";
    {
        std::ofstream out(dir + "/ttbs.json");
        out << refopt::renderModel(refopt::ttbsFixture());
    }
    {
        std::ofstream out(dir + "/cocome.json");
        out << refopt::renderModel(refopt::cocomeFixture());
    }
    std::cout << "wrote " << dir << "/ttbs.json and " << dir << "/cocome.json\n";
    return 0;
}
