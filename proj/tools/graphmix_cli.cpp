#include <cstdio>

int main() {
    std::puts("graphmix cli placeholder");
    return 0;
}
