#include "noisyspell/cli.hpp"

int main(int argc, char** argv) {
    return noisyspell::cli::run(argc, argv);
}
