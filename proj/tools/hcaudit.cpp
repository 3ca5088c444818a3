#include <hcaudit/cli.hpp>

int main(int argc, char** argv) {
    hcaudit::cli::RunOptions options;
    if (auto code = hcaudit::cli::parse_command_line(argc, argv, options)) return *code;
    return hcaudit::cli::run(options);
}
