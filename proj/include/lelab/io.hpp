#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lelab/spectrum.hpp"
#include "lelab/verify.hpp"

namespace lelab {

using Json = nlohmann::ordered_json;

/// start:stop:count, inclusive of both ends (count = 1 gives {start}).
std::vector<double> parse_sweep(const std::string& text);

struct RunConfig {
    std::string subcommand;
    std::filesystem::path domain;
    double q = 1.5;
    int level = 6;
    std::filesystem::path out = ".";
    std::uint64_t seed = 1;
    std::vector<double> sweep_beta;
    std::vector<double> sweep_n;
    std::vector<double> sweep_scale;
    bool all = false;
};

void validate(const RunConfig& config);

std::string read_text_file(const std::filesystem::path& path);

/// Writes through a temporary file in the same directory, then renames.
void write_atomic(const std::filesystem::path& path, const std::string& contents);
void write_json(const std::filesystem::path& path, const Json& value);

/// Comma-separated table with a header row; numbers use 17 significant digits.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add_row(const std::vector<double>& values);
    void add_row(const std::vector<std::string>& cells);
    std::string str() const;
    void write(const std::filesystem::path& path) const { write_atomic(path, str()); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string format_number(double v);

Json to_json(const CheckResult& check);
Json to_json(const SolveReport& report, bool include_field = false);
Json to_json(const SpectrumEntry& entry);

/// x, y, value per node.
CsvTable mesh_field_table(const Mesh& mesh, const Vector& values);

} // namespace lelab
