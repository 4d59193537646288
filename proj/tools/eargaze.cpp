// eargaze <command> --config <path> [--seed N] [--out DIR] [--override key=value]...
#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>

#include "eargaze/config.hpp"
#include "eargaze/error.hpp"
#include "eargaze/pipeline.hpp"

namespace {

int fail(eargaze::ErrorCategory category, const std::string& message) {
  nlohmann::json err{{"error", {{"category", eargaze::category_name(category)}, {"message", message}}}};
  std::cerr << err.dump() << '\n';
  return static_cast<int>(category);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"earEOG analysis pipeline"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::vector<std::string> overrides;

  for (const char* name : {"synth", "preprocess", "montages", "saccades", "regress", "pipeline"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--override", overrides, "dotted.key=value, repeatable");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(eargaze::ErrorCategory::validation, e.what());
  }

  try {
    if (seed) overrides.push_back("seed=" + std::to_string(*seed));
    if (!out_dir.empty()) overrides.push_back("paths.output_dir=" + nlohmann::json(out_dir).dump());
    const auto config = eargaze::config::load(config_path, overrides);
    const auto command = eargaze::pipeline::parse_command(app.get_subcommands().front()->get_name());
    const auto files = eargaze::pipeline::run(command, config);
    std::cout << "wrote " << files.size() << " files to " << config.paths.output_dir << '\n';
    return 0;
  } catch (const eargaze::Error& e) {
    return fail(e.category(), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(eargaze::ErrorCategory::data, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(eargaze::ErrorCategory::data, e.what());
  } catch (const std::exception& e) {
    return fail(eargaze::ErrorCategory::internal, e.what());
  }
}
