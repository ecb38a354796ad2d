#include "robustkb/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>

namespace robustkb {

int worker_count()
{
  const int hardware = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ROBUSTKB_THREADS")) {
    try {
      const int requested = std::stoi(env);
      if (requested > 0) return requested;
    } catch (const std::exception&) {
    }
  }
  return static_cast<int>(hardware);
}

}  // namespace robustkb
