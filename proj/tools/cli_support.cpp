#include "cli_support.hpp"

#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "specden/errors.hpp"

namespace specden::cli {

namespace {

std::vector<CLI::ConfigItem> flatten(const json& j, const std::string& name, std::vector<std::string> prefix) {
    std::vector<CLI::ConfigItem> out;
    if (j.is_object()) {
        if (!name.empty()) prefix.push_back(name);
        for (const auto& [key, value] : j.items()) {
            auto sub = flatten(value, key, prefix);
            out.insert(out.end(), sub.begin(), sub.end());
        }
        return out;
    }
    if (name.empty()) throw CLI::ConversionError("config file must be a JSON object");
    CLI::ConfigItem item;
    item.name = name;
    item.parents = std::move(prefix);
    const auto scalar = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (j.is_array()) {
        for (const auto& v : j) item.inputs.push_back(scalar(v));
    } else {
        item.inputs.push_back(scalar(j));
    }
    out.push_back(std::move(item));
    return out;
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

}  // namespace

std::string JsonConfig::to_config(const CLI::App* app, bool, bool, std::string) const {
    return resolved_options(*app).dump(2);
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
    json j;
    try {
        input >> j;
    } catch (const json::exception& e) {
        throw CLI::ConversionError(std::string("invalid JSON config: ") + e.what());
    }
    return flatten(j, "", {});
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cli", "sha256", "cannot read " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

std::vector<double> parse_grid(const std::string& spec) {
    const auto parts = CLI::detail::split(spec, ':');
    if (parts.size() != 3) throw DomainError("cli", "parse_grid", "grid must look like a:b:step, got '" + spec + "'");
    double a = 0, b = 0, step = 0;
    try {
        a = std::stod(parts[0]);
        b = std::stod(parts[1]);
        step = std::stod(parts[2]);
    } catch (const std::exception&) {
        throw DomainError("cli", "parse_grid", "non-numeric grid '" + spec + "'");
    }
    if (!(step > 0.0) || !(b >= a)) throw DomainError("cli", "parse_grid", "grid needs a <= b and step > 0");
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 0.5)) + 1;
    if (count > 10'000'000) throw DomainError("cli", "parse_grid", "grid too large");
    std::vector<double> xs(count);
    for (std::size_t i = 0; i < count; ++i) xs[i] = a + static_cast<double>(i) * step;
    return xs;
}

std::vector<double> parse_list(const std::string& spec) {
    std::vector<double> out;
    for (const auto& part : CLI::detail::split(spec, ',')) {
        try {
            out.push_back(std::stod(part));
        } catch (const std::exception&) {
            throw DomainError("cli", "parse_list", "non-numeric entry '" + part + "'");
        }
    }
    return out;
}

std::vector<double> read_column_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cli", "read_csv", "cannot open " + path.string());
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cell = line.substr(0, line.find(','));
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw DomainError("cli", "read_csv", "bad value '" + cell + "' in " + path.string());
        }
    }
    return out;
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path), path_(path) {
    if (!out_) throw DomainError("cli", "write_csv", "cannot write " + path.string());
    out_ << std::setprecision(17);
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
    out_ << '\n';
}

Manifest::Manifest(std::string subcommand, std::vector<std::string> argv)
    : subcommand_(std::move(subcommand)), argv_(std::move(argv)), started_at_(utc_now()) {}

void Manifest::add_input(const fs::path& path) {
    inputs_.push_back({{"path", fs::absolute(path).string()}, {"sha256", sha256_file(path)}});
}

void Manifest::add_output(const fs::path& path) {
    outputs_.push_back({{"path", path.filename().string()}, {"sha256", sha256_file(path)}});
}

fs::path Manifest::write(const fs::path& dir) const {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const json m = {{"tool_version", kToolVersion}, {"subcommand", subcommand_}, {"argv", argv_},
                    {"config", config_},            {"inputs", inputs_},         {"outputs", outputs_},
                    {"seeds", seeds_},              {"started_at", started_at_}, {"wall_clock_seconds", secs}};
    const auto path = dir / "manifest.json";
    std::ofstream out(path);
    if (!out) throw DomainError("cli", "manifest", "cannot write " + path.string());
    out << m.dump(2) << '\n';
    return path;
}

json resolved_options(const CLI::App& app) {
    json out = json::object();
    for (const CLI::Option* opt : app.get_options()) {
        const auto name = opt->get_single_name();
        if (name.empty() || name == "help" || name == "config") continue;
        if (opt->get_expected_min() == 0) {
            out[name] = opt->count() > 0;
            continue;
        }
        const auto& results = opt->results();
        if (!results.empty()) {
            out[name] = results.size() == 1 ? json(results.front()) : json(results);
        } else if (!opt->get_default_str().empty()) {
            out[name] = opt->get_default_str();
        } else {
            out[name] = nullptr;
        }
    }
    return out;
}

void ensure_parent(const fs::path& path) {
    const auto parent = path.parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

}  // namespace specden::cli
