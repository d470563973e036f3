#include <greenllm/cli.hpp>

int main(int argc, char** argv)
{
    return greenllm::cli::run(argc, argv);
}
