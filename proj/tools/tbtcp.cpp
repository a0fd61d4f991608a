#include "tbtcp/cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return tbtcp::cli::run_cli(argc, argv, std::cout, std::cerr);
}
