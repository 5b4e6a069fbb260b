/*
   Copyright 2026 The mosauth Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "mosauth/error.hpp"

namespace mosauth::harness {

/// Nine significant digits, fixed exponent form; the same bytes on every run.
inline std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.8e", v == 0.0 ? 0.0 : v);
    return buf;
}

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : out_(path, std::ios::binary | std::ios::trunc), columns_(header.size())
    {
        if (!out_)
            throw std::runtime_error("cannot write " + path.string());
        write_fields(header);
    }

    template <class... Fields>
    void row(const Fields&... fields)
    {
        if (sizeof...(Fields) != columns_)
            throw std::logic_error("csv row has the wrong number of fields");
        std::vector<std::string> cells;
        (cells.push_back(cell(fields)), ...);
        write_fields(cells);
    }

  private:
    template <class T>
    static std::string cell(const T& v)
    {
        if constexpr (std::is_same_v<T, std::string>)
            return v;
        else if constexpr (std::is_convertible_v<T, const char*>)
            return std::string(v);
        else if constexpr (std::is_floating_point_v<T>)
            return format_number(v);
        else
            return std::to_string(v);
    }

    void write_fields(const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
        if (!out_)
            throw std::runtime_error("csv write failed");
    }

    std::ofstream out_;
    std::size_t columns_;
};

} // namespace mosauth::harness
