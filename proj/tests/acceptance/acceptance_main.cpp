#include <iostream>
int main(int, char**) { std::cout << "stub\n"; return 0; }
