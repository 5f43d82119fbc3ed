#include <iostream>

#include "fairmapf/cli.hpp"

int main(int argc, char** argv)
{
    return fairmapf::run_cli(argc, argv, std::cout, std::cerr);
}
