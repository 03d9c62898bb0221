#include <iostream>
#include <vector>

#include "relaxwave/io.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        const relaxwave::RunConfig cfg = relaxwave::parse_config(args);
        return relaxwave::run(cfg);
    } catch (const relaxwave::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const relaxwave::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
