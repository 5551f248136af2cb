#include "gencollatz/cli.hpp"

int main(int argc, char** argv) {
    return gencollatz::cli::run(argc, argv);
}
