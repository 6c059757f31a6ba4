#include "gwright/cli.hpp"

int main(int argc, char** argv) {
    return gwright::cli::run(argc, argv);
}
