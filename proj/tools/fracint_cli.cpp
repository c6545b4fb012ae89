#include "commands.hpp"

int main(int argc, char** argv) {
    return fracint::cli::run(argc, argv);
}
