#pragma once

#include "config.hpp"

#include <nhent/types.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace cli {

// 12 significant digits; non-finite values print as nan / inf / -inf.
std::string num(double v);

class Csv {
public:
    explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}
    void row(std::vector<std::string> cells);
    void write(const std::filesystem::path& file) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

void write_json(const std::filesystem::path& file, const json& j);

std::string sha256_hex(const std::string& data);
std::string utc_timestamp();

json complex_list(const std::vector<nhent::cplx>& v);

struct Manifest {
    std::string command;
    std::string config_digest;
    json tolerances;
    json points = json::array();
    std::vector<std::string> outputs;

    void write(const std::filesystem::path& dir) const;
};

json warning_json(const nhent::Warning& w);

} // namespace cli
