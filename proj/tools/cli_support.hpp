#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace specden::cli {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr const char* kToolVersion = "0.3.0";

/// Reads `{"subcommand": {"flag": value}}` JSON config files; top-level
/// scalars apply to the main app.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override;
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

std::string sha256_file(const fs::path& path);

/// a:b:step, inclusive of b.
std::vector<double> parse_grid(const std::string& spec);
std::vector<double> parse_list(const std::string& spec);

/// Single-column CSV with a header row.
std::vector<double> read_column_csv(const fs::path& path);

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);

private:
    std::ofstream out_;
    fs::path path_;
};

/// Collects what a subcommand read and wrote, then writes manifest.json
/// next to the outputs.
class Manifest {
public:
    Manifest(std::string subcommand, std::vector<std::string> argv);
    void set_config(json config) { config_ = std::move(config); }
    void add_input(const fs::path& path);
    void add_output(const fs::path& path);
    void add_seed(const std::string& name, std::uint64_t seed) { seeds_[name] = seed; }
    /// Writes the manifest into `dir` and returns its path.
    fs::path write(const fs::path& dir) const;

private:
    std::string subcommand_;
    std::vector<std::string> argv_;
    json config_ = json::object();
    json inputs_ = json::array();
    json outputs_ = json::array();
    json seeds_ = json::object();
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
    std::string started_at_;
};

/// Final values of every option of a (sub)command after flags, config
/// file and defaults have been merged.
json resolved_options(const CLI::App& app);

/// Creates the directory holding `path` when needed.
void ensure_parent(const fs::path& path);

}  // namespace specden::cli
