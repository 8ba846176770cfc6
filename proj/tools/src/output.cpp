#include "output.hpp"

#include <nhent/errors.hpp>

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>

#ifndef NHENT_VERSION
#define NHENT_VERSION "unknown"
#endif

namespace cli {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
    return buf;
}

void Csv::row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw nhent::Error("csv: row width does not match header");
    rows_.push_back(std::move(cells));
}

namespace {

std::string quoted(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw nhent::Error("cannot write " + file.string());
    out << text;
}

} // namespace

void Csv::write(const std::filesystem::path& file) const {
    std::string text;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) text += ',';
            text += quoted(cells[i]);
        }
        text += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    write_text(file, text);
}

void write_json(const std::filesystem::path& file, const json& j) { write_text(file, j.dump(2) + "\n"); }

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw nhent::Error("sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json complex_list(const std::vector<nhent::cplx>& v) {
    json re = json::array(), im = json::array();
    for (const auto& z : v) {
        re.push_back(z.real());
        im.push_back(z.imag());
    }
    return json{{"re", re}, {"im", im}};
}

json warning_json(const nhent::Warning& w) { return json{{"code", w.code}, {"message", w.message}}; }

void Manifest::write(const std::filesystem::path& dir) const {
    json j;
    j["tool"] = "nhent";
    j["version"] = NHENT_VERSION;
    j["command"] = command;
    j["config_digest"] = config_digest.empty() ? json(nullptr) : json("sha256:" + config_digest);
    j["timestamp"] = utc_timestamp();
    j["tolerances"] = tolerances;
    j["outputs"] = outputs;
    j["points"] = points;
    write_json(dir / "manifest.json", j);
}

} // namespace cli
