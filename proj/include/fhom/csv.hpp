#ifndef FHOM_CSV_HPP
#define FHOM_CSV_HPP

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fhom/errors.hpp"
#include "fhom/forward.hpp"

namespace fhom
{
// 12 significant digits, '.' separator; shared by every emitted CSV so outputs
// round-trip through the ingestion parser bit-exactly.
inline std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct MeasurementRow
{
    CountRates rates;
    std::optional<double> d_u;
    std::optional<double> d_l;
};

struct MeasurementTable
{
    std::vector<MeasurementRow> rows;
    bool has_noise_columns = false;

    std::vector<CountRates> count_rates() const
    {
        std::vector<CountRates> out;
        out.reserve(rows.size());
        for (const auto& r : rows)
            out.push_back(r.rates);
        return out;
    }

    std::vector<std::pair<double, double>> noise_upper() const
    {
        std::vector<std::pair<double, double>> out;
        for (const auto& r : rows)
            if (r.d_u)
                out.emplace_back(r.rates.power_mw, *r.d_u);
        return out;
    }

    std::vector<std::pair<double, double>> noise_lower() const
    {
        std::vector<std::pair<double, double>> out;
        for (const auto& r : rows)
            if (r.d_l)
                out.emplace_back(r.rates.power_mw, *r.d_l);
        return out;
    }
};

namespace detail
{
inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line)
    {
        if (c == ',')
        {
            fields.push_back(cur);
            cur.clear();
        }
        else if (c != '\r')
        {
            cur += c;
        }
    }
    fields.push_back(cur);
    for (auto& f : fields)
    {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
    }
    return fields;
}

[[noreturn]] inline void csv_fail(int line, int column, const std::string& what)
{
    std::ostringstream os;
    os << "measurement csv: line " << line << ", column " << column << ": " << what;
    throw config_error(os.str());
}

inline double parse_csv_number(const std::string& field, int line, int column)
{
    try
    {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used != field.size())
            csv_fail(line, column, "trailing characters in numeric field '" + field + "'");
        return v;
    }
    catch (const std::invalid_argument&)
    {
        csv_fail(line, column, "not a number: '" + field + "'");
    }
    catch (const std::out_of_range&)
    {
        csv_fail(line, column, "number out of range: '" + field + "'");
    }
}
} // namespace detail

// Parse a measurement table: header power_mW,p_ut,p_us,p_lt,p_ls[,d_u,d_l];
// '#' comment lines and blank lines are ignored; powers must be strictly increasing
// and probabilities must lie in [0,1].
inline MeasurementTable parse_measurements(std::istream& in)
{
    MeasurementTable table;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    std::vector<std::string> header;
    while (std::getline(in, line))
    {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        auto fields = detail::split_csv_line(line);
        if (!header_seen)
        {
            static const std::vector<std::string> base = {"power_mW", "p_ut", "p_us", "p_lt",
                                                          "p_ls"};
            static const std::vector<std::string> with_noise = {"power_mW", "p_ut", "p_us",
                                                                "p_lt",     "p_ls", "d_u", "d_l"};
            if (fields == base)
                table.has_noise_columns = false;
            else if (fields == with_noise)
                table.has_noise_columns = true;
            else
                detail::csv_fail(line_no, 1,
                                 "expected header 'power_mW,p_ut,p_us,p_lt,p_ls[,d_u,d_l]'");
            header = fields;
            header_seen = true;
            continue;
        }
        if (fields.size() != header.size())
            detail::csv_fail(line_no, static_cast<int>(fields.size()),
                             "wrong number of fields (expected " +
                                 std::to_string(header.size()) + ")");
        MeasurementRow row;
        row.rates.power_mw = detail::parse_csv_number(fields[0], line_no, 1);
        row.rates.p_ut = detail::parse_csv_number(fields[1], line_no, 2);
        row.rates.p_us = detail::parse_csv_number(fields[2], line_no, 3);
        row.rates.p_lt = detail::parse_csv_number(fields[3], line_no, 4);
        row.rates.p_ls = detail::parse_csv_number(fields[4], line_no, 5);
        if (table.has_noise_columns)
        {
            row.d_u = detail::parse_csv_number(fields[5], line_no, 6);
            row.d_l = detail::parse_csv_number(fields[6], line_no, 7);
        }
        if (!(row.rates.power_mw >= 0.0))
            detail::csv_fail(line_no, 1, "power must be nonnegative");
        if (!table.rows.empty() && !(row.rates.power_mw > table.rows.back().rates.power_mw))
            detail::csv_fail(line_no, 1, "powers must be strictly increasing");
        const double probs[] = {row.rates.p_ut, row.rates.p_us, row.rates.p_lt, row.rates.p_ls,
                                row.d_u.value_or(0.0), row.d_l.value_or(0.0)};
        int col = 2;
        for (double p : probs)
        {
            if (!(p >= 0.0 && p <= 1.0))
                detail::csv_fail(line_no, col, "probability outside [0,1]");
            ++col;
        }
        table.rows.push_back(row);
    }
    if (!header_seen)
        throw config_error("measurement csv: empty file (no header)");
    if (table.rows.empty())
        throw config_error("measurement csv: no data rows");
    return table;
}

inline MeasurementTable load_measurements(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("measurement csv: cannot open '" + path + "'");
    return parse_measurements(in);
}

// Two-column curve with optional '# key = value' footer comments.
inline void write_curve_csv(std::ostream& out, const std::string& col_a, const std::string& col_b,
                            std::span<const std::pair<double, double>> rows,
                            std::span<const std::pair<std::string, double>> footer = {})
{
    out << col_a << ',' << col_b << '\n';
    for (const auto& [a, b] : rows)
        out << format_number(a) << ',' << format_number(b) << '\n';
    for (const auto& [key, value] : footer)
        out << "# " << key << " = " << format_number(value) << '\n';
}

// Read back a two-column curve emitted by write_curve_csv (comments skipped).
inline std::vector<std::pair<double, double>> parse_curve_csv(std::istream& in)
{
    std::vector<std::pair<double, double>> rows;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line))
    {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        if (!header_seen)
        {
            header_seen = true;
            continue;
        }
        auto fields = detail::split_csv_line(line);
        if (fields.size() != 2)
            detail::csv_fail(line_no, static_cast<int>(fields.size()), "expected two fields");
        rows.emplace_back(detail::parse_csv_number(fields[0], line_no, 1),
                          detail::parse_csv_number(fields[1], line_no, 2));
    }
    return rows;
}

} // namespace fhom

#endif
