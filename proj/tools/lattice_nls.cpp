#include "dnls/cli.hpp"

int main(int argc, char** argv)
{
    return dnls::cli::main(argc, argv);
}
