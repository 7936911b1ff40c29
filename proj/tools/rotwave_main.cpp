#include <cstdio>
int main(){ std::puts("rotwave placeholder"); return 0; }
