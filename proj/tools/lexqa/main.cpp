#include "lexqa/commands.hpp"

int main(int argc, char** argv) {
    return lexqa::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
