// Copyright 2026 The dehn Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dehn/common.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace dehn
{

using Json = nlohmann::ordered_json;

/// Column order of every CSV the pipeline writes.
inline const std::map<std::string, std::vector<std::string>>& csvSchema()
{
    static const std::map<std::string, std::vector<std::string>> schema = {
        {"twist_profile.csv", {"s", "g", "g_prime", "hk", "h_tilde"}},
        {"binding_profile.csv", {"r", "h1", "h1_prime", "h2", "h2_prime", "det_h", "det_h_over_r"}},
        {"orbit_levels.csv",
         {"p_level", "g_value", "m", "i", "period", "action", "degree", "is_principal", "a",
          "binding_radius"}},
        {"degrees.csv", {"level", "i", "morse_index", "mu", "degree"}},
        {"plane.csv", {"rho", "r", "t"}},
        {"geometry_check.csv", {"check", "samples", "worst", "tolerance", "pass"}},
        {"lincr_shooting.csv",
         {"frequency", "parity", "block", "leg", "rho", "direction", "log_norm"}},
        {"lincr_modes.csv", {"mode", "admissible"}},
        {"energy_levels.csv", {"r", "winding", "action", "e2_density"}},
    };
    return schema;
}

inline std::string schemaText()
{
    std::string out;
    for (const auto& [name, cols] : csvSchema())
    {
        out += name + ":";
        for (std::size_t j = 0; j < cols.size(); ++j)
            out += (j ? "," : " ") + cols[j];
        out += "\n";
    }
    return out;
}

using Cell = std::variant<double, long long, std::string>;

class CsvTable
{
  public:
    explicit CsvTable(std::string name) : name_(std::move(name))
    {
        const auto it = csvSchema().find(name_);
        if (it == csvSchema().end())
            throw Error("no schema for '" + name_ + "'");
        header_ = it->second;
    }

    void add(std::vector<Cell> row)
    {
        if (row.size() != header_.size())
            throw InvariantError(name_ + ": row has " + std::to_string(row.size()) +
                                 " cells, schema has " + std::to_string(header_.size()));
        rows_.push_back(std::move(row));
    }

    const std::string& name() const { return name_; }
    std::size_t size() const { return rows_.size(); }

    std::string str() const
    {
        std::string out;
        for (std::size_t j = 0; j < header_.size(); ++j)
            out += (j ? "," : "") + header_[j];
        out += "\n";
        for (const auto& row : rows_)
        {
            for (std::size_t j = 0; j < row.size(); ++j)
            {
                if (j)
                    out += ",";
                if (const auto* d = std::get_if<double>(&row[j]))
                    out += fmt17(*d);
                else if (const auto* i = std::get_if<long long>(&row[j]))
                    out += std::to_string(*i);
                else
                    out += std::get<std::string>(row[j]);
            }
            out += "\n";
        }
        return out;
    }

  private:
    std::string name_;
    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

/// Writes through a temporary file in the same directory and renames it.
inline void writeAtomic(const std::filesystem::path& path, const std::string& content)
{
    std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out)
            throw Error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

inline void writeJson(const std::filesystem::path& path, const Json& j)
{
    writeAtomic(path, j.dump(2) + "\n");
}

inline void writeCsv(const std::filesystem::path& dir, const CsvTable& t)
{
    writeAtomic(dir / t.name(), t.str());
}

} // namespace dehn
