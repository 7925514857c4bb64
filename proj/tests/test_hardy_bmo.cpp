#include <cstdio>
int main() {
    std::printf("test_hardy_bmo: not implemented yet\n");
    return 1;
}
