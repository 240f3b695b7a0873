// Prints the diagnostic code table committed as docs/diagnostics.md.

#include <iostream>

#include "rsl/diagnostics.hpp"

int main() {
  std::cout << rsl::render_code_table();
  return 0;
}
