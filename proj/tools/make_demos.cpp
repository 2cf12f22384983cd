// Regenerates the bundled demo scenes and logs: make_demos <output-dir>

#include <filesystem>
#include <iostream>

#include "demo_scenes.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_demos <output-dir>\n";
    return 2;
  }
  try {
    const std::filesystem::path dir = argv[1];
    std::filesystem::create_directories(dir);
    for (const auto& demo : squidget::demos::build_all()) {
      squidget::save_document(dir / (demo.name + ".scene.json"), demo.initial);
      squidget::save_event_log(dir / (demo.name + ".log.json"), demo.log);
      std::cout << demo.name << ": " << demo.log.events.size() << " events\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
