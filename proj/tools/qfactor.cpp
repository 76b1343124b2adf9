#include <cstdio>

int main() {
    std::puts("qfactor: command line interface not wired up yet");
    return 2;
}
