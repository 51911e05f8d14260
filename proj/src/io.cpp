#include "casispec/io.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "casispec/errors.hpp"

namespace casispec {

std::string format_double(double value) {
    std::array<char, 64> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last)
        throw input_error("not a number: '" + std::string(text) + "'");
    return value;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open file: " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw input_error("cannot open file for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw input_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw input_error("rename failed: " + tmp.string() + " -> " + path.string());
}

Csv parse_csv(std::string_view content) {
    Csv csv;
    std::size_t pos = 0;
    bool first = true;
    while (pos < content.size()) {
        std::size_t end = content.find('\n', pos);
        if (end == std::string_view::npos) end = content.size();
        std::string_view line = content.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = end + 1;
        if (line.empty()) continue;

        std::vector<std::string> fields;
        std::size_t fpos = 0;
        for (;;) {
            const std::size_t comma = line.find(',', fpos);
            if (comma == std::string_view::npos) {
                fields.emplace_back(line.substr(fpos));
                break;
            }
            fields.emplace_back(line.substr(fpos, comma - fpos));
            fpos = comma + 1;
        }
        if (first) {
            csv.header = std::move(fields);
            first = false;
        } else {
            if (fields.size() != csv.header.size())
                throw input_error("csv row has " + std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(csv.header.size()));
            csv.rows.push_back(std::move(fields));
        }
    }
    if (first) throw input_error("csv is empty");
    return csv;
}

Csv read_csv(const std::filesystem::path& path) {
    try {
        return parse_csv(read_file(path));
    } catch (const input_error& e) {
        throw input_error(path.string() + ": " + e.what());
    }
}

void expect_header(const Csv& csv, const std::vector<std::string>& expected, const std::string& context) {
    if (csv.header != expected) {
        std::string want;
        for (const auto& h : expected) {
            if (!want.empty()) want += ',';
            want += h;
        }
        throw input_error(context + ": expected header '" + want + "'");
    }
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
    if (value.is_discarded()) throw input_error("invalid JSON: " + path.string());
    return value;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& value) {
    atomic_write_file(path, value.dump(2) + "\n");
}

void reject_unknown_keys(const nlohmann::json& object, const std::vector<std::string>& allowed,
                         const std::string& context) {
    if (!object.is_object()) throw config_error(context + ": expected a JSON object");
    for (const auto& item : object.items()) {
        bool known = false;
        for (const auto& key : allowed)
            if (item.key() == key) {
                known = true;
                break;
            }
        if (!known) throw config_error(context + ": unknown key '" + item.key() + "'");
    }
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace casispec
