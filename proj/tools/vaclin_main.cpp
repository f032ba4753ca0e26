#include "vaclin/io.hpp"

int main(int argc, char** argv)
{
    return vaclin::cli_main(argc, argv);
}
