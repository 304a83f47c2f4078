#include "aitrace/cli.hpp"

#include <cstdlib>
#include <iostream>

#include <unistd.h>

int main(int argc, char** argv) {
    const aitrace::ParseOutcome parsed = aitrace::parse_args(argc, argv);
    if (!parsed.config) {
        (parsed.exit_code == 0 ? std::cout : std::cerr) << parsed.message;
        return parsed.exit_code;
    }
    aitrace::RunEnvironment env;
    env.stdout_is_tty = ::isatty(STDOUT_FILENO) == 1;
    const char* no_color = std::getenv("NO_COLOR");
    env.no_color_env = no_color != nullptr && *no_color != '\0';
    return aitrace::run_scan(*parsed.config, std::cout, std::cerr, env);
}
