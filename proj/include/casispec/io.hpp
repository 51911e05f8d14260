#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace casispec {

// Shortest decimal that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);  // throws input_error

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling ".tmp" file and renames, so readers never observe
// partial content and failed runs leave no output behind.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

// Minimal CSV: one header row, comma separated, no quoting (no column here
// ever needs it).
struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(std::string_view content);
Csv read_csv(const std::filesystem::path& path);
void expect_header(const Csv& csv, const std::vector<std::string>& expected, const std::string& context);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& value);

// Schema guard: rejects keys outside `allowed`, names the offender.
void reject_unknown_keys(const nlohmann::json& object, const std::vector<std::string>& allowed,
                         const std::string& context);

// FNV-1a over a byte string, as a fixed-width hex string.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace casispec
