// Regenerates the bundled replay fixtures, the reviewed CQ file, the
// ground-truth files and the expected report by running the fixture matrix
// against the simulated model in record mode.

#include <filesystem>
#include <iostream>

#include "fixture_pipeline.hpp"
#include "generators.hpp"
#include "kgpipe/error.hpp"
#include "kgpipe/report.hpp"
#include "simulated_backend.hpp"

namespace fs = std::filesystem;
using namespace kgpipe;

int main() {
  try {
    const auto config = testing::fixture_config();
    const fs::path store_dir = config.backend.fixture_dir;
    fs::remove_all(store_dir);
    auto store = std::make_shared<llm::ReplayStore>(store_dir);
    auto simulated = std::make_shared<testing::SimulatedBackend>();
    llm::RecordingBackend recorder(simulated, store);

    testing::TempDir runs("make-fixtures");
    const auto table = testing::run_fixture_matrix(runs.path(), recorder, true);

    const fs::path expected = testing::fixture_path("expected");
    fs::create_directories(expected);
    for (const char* f : {"report.csv", "report.md"}) {
      fs::copy_file(runs.path() / f, expected / f, fs::copy_options::overwrite_existing);
    }
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(store_dir)) files += e.is_regular_file() ? 1 : 0;
    std::cout << report::render_markdown(table) << "\nmodel calls: " << simulated->calls()
              << ", fixtures: " << files << "\n";
  } catch (const std::exception& e) {
    std::cerr << "make_fixtures: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
