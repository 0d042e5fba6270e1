#include "specscan/cli.hpp"

int main(int argc, char** argv) {
    return specscan::cli::run(argc, argv);
}
