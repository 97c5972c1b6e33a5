#include "horolab/commands.hpp"

int main(int argc, char** argv)
{
    return horolab::run_cli(argc, argv);
}
