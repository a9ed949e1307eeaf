// vsheet: run, batch, compare and validate vortex-sheet scenarios.
//
// Exit codes: 0 success, 1 internal or I/O error, 2 configuration error,
// 3 invariant violation, 4 numerical halt (a stop criterion fired).

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vsheet/errors.hpp"
#include "vsheet/run_io.hpp"
#include "vsheet/scenario.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit : int { kOk = 0, kInternal = 1, kConfig = 2, kInvariant = 3, kHalt = 4 };

fs::path scenario_dir() {
  if (const char* env = std::getenv("VSHEET_SCENARIO_DIR"); env && *env) return env;
  return VSHEET_DEFAULT_SCENARIO_DIR;
}

// Runs fn and maps the library's exception types onto exit codes.
template <class Fn>
int guarded(const std::string& what, Fn&& fn) {
  try {
    return fn();
  } catch (const vsheet::ConfigError& e) {
    std::cerr << what << ": config error: " << e.what() << "\n";
    return kConfig;
  } catch (const vsheet::InvariantViolation& e) {
    std::cerr << what << ": invariant violation: " << e.what() << " (value " << vsheet::format_double(e.value())
              << ")\n";
    return kInvariant;
  } catch (const vsheet::NumericalHalt& e) {
    std::cerr << what << ": numerical halt: " << e.what() << "\n";
    return kHalt;
  } catch (const std::exception& e) {
    std::cerr << what << ": error: " << e.what() << "\n";
    return kInternal;
  }
}

int run_one(const fs::path& config, const fs::path& root) {
  return guarded(config.string(), [&] {
    const vsheet::Scenario sc = vsheet::load_scenario(config);
    const vsheet::RunManifest m = vsheet::execute(sc, root);
    std::cout << m.directory.string() << "  status=" << m.status << "  stop_reason=" << vsheet::to_string(m.stop_reason)
              << "  steps=" << m.steps << "\n";
    if (const auto bad = vsheet::verify_manifest(m); !bad.empty()) {
      for (const auto& b : bad) std::cerr << "manifest: " << b << "\n";
      return int(kInternal);
    }
    if (m.stop_reason != vsheet::StopReason::t_end) {
      std::cerr << config.string() << ": halted: " << m.stop_detail << "\n";
      return int(kHalt);
    }
    return int(kOk);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic vortex-sheet simulations"};
  app.require_subcommand(1);
  fs::path root = vsheet::output_root();
  app.add_option("--output-root", root, "Directory receiving run directories (default $VSHEET_OUTPUT_ROOT or ./runs)");

  auto* run = app.add_subcommand("run", "Run one scenario file");
  fs::path run_config;
  run->add_option("config", run_config, "Scenario JSON file")->required();

  auto* batch = app.add_subcommand("batch", "Run every scenario file in a directory");
  fs::path batch_dir;
  batch->add_option("dir", batch_dir, "Directory of scenario JSON files")->required();

  auto* compare = app.add_subcommand("compare", "Cross-resolution comparison of finished runs");
  std::vector<fs::path> manifests;
  fs::path compare_out;
  compare->add_option("manifests", manifests, "manifest.json files or run directories")->required();
  compare->add_option("--out", compare_out, "Write comparison tables into this directory instead of stdout");

  auto* validate = app.add_subcommand("validate", "Check a scenario file without running it");
  fs::path validate_config;
  validate->add_option("config", validate_config, "Scenario JSON file")->required();

  auto* list = app.add_subcommand("list-scenarios", "List the shipped scenario files");
  fs::path list_dir = scenario_dir();
  list->add_option("--dir", list_dir, "Scenario directory (default $VSHEET_SCENARIO_DIR or the source tree)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInternal;
  }

  if (*run) return run_one(run_config, root);

  if (*batch) {
    const auto files = vsheet::list_scenarios(batch_dir);
    if (files.empty()) {
      std::cerr << batch_dir.string() << ": no scenario files\n";
      return kConfig;
    }
    int worst = kOk;
    for (const fs::path& f : files) worst = std::max(worst, run_one(f, root));
    return worst;
  }

  if (*compare) {
    return guarded("compare", [&] {
      std::vector<vsheet::RunManifest> ms;
      for (const fs::path& p : manifests) ms.push_back(vsheet::read_manifest(p));
      const vsheet::ComparisonReport rep = vsheet::compare_runs(ms);
      if (!compare_out.empty()) {
        fs::create_directories(compare_out);
        vsheet::write_table(compare_out / "comparison.csv", rep.table);
        vsheet::write_table(compare_out / "comparison_growth.csv", rep.growth);
        std::cout << (compare_out / "comparison.csv").string() << "\n";
        return int(kOk);
      }
      for (const vsheet::Table* t : {&rep.table, &rep.growth}) {
        std::cout << "# " << t->name << "\n";
        for (std::size_t c = 0; c < t->columns.size(); ++c) std::cout << (c ? "," : "") << t->columns[c].name;
        std::cout << "\n";
        for (const auto& row : t->rows) {
          for (std::size_t c = 0; c < row.size(); ++c) std::cout << (c ? "," : "") << vsheet::format_double(row[c]);
          std::cout << "\n";
        }
      }
      return int(kOk);
    });
  }

  if (*validate) {
    return guarded(validate_config.string(), [&] {
      const vsheet::Scenario sc = vsheet::load_scenario(validate_config);
      std::cout << validate_config.string() << ": ok (" << sc.name << ", " << vsheet::to_string(sc.mode) << ", N="
                << sc.resolution << ")\n";
      return int(kOk);
    });
  }

  if (*list) {
    for (const fs::path& f : vsheet::list_scenarios(list_dir)) {
      const int code = guarded(f.string(), [&] {
        const vsheet::Scenario sc = vsheet::load_scenario(f);
        std::cout << sc.name << "\t" << vsheet::to_string(sc.mode) << "\tN=" << sc.resolution << "\t" << f.string()
                  << "\n";
        return int(kOk);
      });
      if (code != kOk) return code;
    }
    return kOk;
  }
  return kInternal;
}
