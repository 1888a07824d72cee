#include <iostream>

int main() {
  std::cout << "revoke-bd: command wiring in progress\n";
  return 0;
}
