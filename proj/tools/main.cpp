#include <cstdio>

int main() {
  std::puts("talkgen CLI: subcommands land once the pipeline modules are in");
  return 0;
}
