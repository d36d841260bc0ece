#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>

#include "core.hpp"

// CSV ingestion and calendar alignment.
//
// Input schema: two columns, date then value.  Dates are ISO-8601 days
// (1990-03-05), ISO months (1990-03), or compact months (199003).  Missing
// values are an empty field or ".".  A header row is detected by a
// non-parseable first cell and skipped.

namespace logheston {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

inline bool all_digits(std::string_view s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isdigit(c); });
}

inline std::optional<int> parse_int(std::string_view s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

// Either a full date or a bare month, depending on the file's resolution.
struct ParsedDate {
    YearMonth ym;
    int day = 0;  // 0 when the cell carried no day component
};

inline std::optional<ParsedDate> parse_date(std::string_view s) {
    if (all_digits(s) && s.size() == 6) {  // YYYYMM
        auto y = parse_int(s.substr(0, 4));
        auto m = parse_int(s.substr(4, 2));
        if (!y || !m || *m < 1 || *m > 12) return std::nullopt;
        return ParsedDate{{*y, *m}, 0};
    }
    if (s.size() == 7 && s[4] == '-') {  // YYYY-MM
        auto y = parse_int(s.substr(0, 4));
        auto m = parse_int(s.substr(5, 2));
        if (!y || !m || *m < 1 || *m > 12) return std::nullopt;
        return ParsedDate{{*y, *m}, 0};
    }
    if (s.size() == 10 && s[4] == '-' && s[7] == '-') {  // YYYY-MM-DD
        auto y = parse_int(s.substr(0, 4));
        auto m = parse_int(s.substr(5, 2));
        auto d = parse_int(s.substr(8, 2));
        if (!y || !m || !d || *m < 1 || *m > 12 || *d < 1 || *d > 31)
            return std::nullopt;
        return ParsedDate{{*y, *m}, *d};
    }
    return std::nullopt;
}

inline std::optional<double> parse_value(std::string_view s) {
    if (s.empty() || s == ".")
        return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    std::string buf(s);
    double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

}  // namespace detail

using LoadedSeries = std::variant<DailySeries, MonthlySeries>;

/// Reads a two-column CSV; the date resolution of the first data row decides
/// whether a daily or a monthly series comes back.  Rows must be strictly
/// increasing in time and, for monthly files, gap-free.
inline LoadedSeries load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");

    std::vector<detail::ParsedDate> dates;
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    bool first_content_row = true;
    int resolution = -1;  // 0 = monthly, 1 = daily

    auto fail = [&](const std::string& what) {
        throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": " +
                                    what);
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = detail::trim(line);
        if (sv.empty()) continue;
        auto comma = sv.find(',');
        if (comma == std::string_view::npos) fail("expected 'date,value'");
        auto date_cell = detail::trim(sv.substr(0, comma));
        auto value_cell = detail::trim(sv.substr(comma + 1));

        auto pd = detail::parse_date(date_cell);
        if (!pd) {
            if (first_content_row) {  // header row
                first_content_row = false;
                continue;
            }
            fail("bad date '" + std::string(date_cell) + "'");
        }
        first_content_row = false;

        auto v = detail::parse_value(value_cell);
        if (!v) fail("bad value '" + std::string(value_cell) + "'");

        int res = pd->day > 0 ? 1 : 0;
        if (resolution < 0)
            resolution = res;
        else if (res != resolution)
            fail("mixed daily and monthly dates");

        dates.push_back(*pd);
        values.push_back(*v);
    }
    if (dates.empty())
        throw std::invalid_argument(path + ": no data rows");

    if (resolution == 1) {
        DailySeries out;
        out.dates.reserve(dates.size());
        for (std::size_t i = 0; i < dates.size(); ++i) {
            Date d{dates[i].ym.year, dates[i].ym.month, dates[i].day};
            if (!out.dates.empty() && !(out.dates.back() < d))
                throw std::invalid_argument(path +
                                            ": dates not strictly increasing");
            out.dates.push_back(d);
        }
        out.values = std::move(values);
        return out;
    }

    MonthlySeries out;
    out.months.reserve(dates.size());
    for (std::size_t i = 0; i < dates.size(); ++i) {
        if (std::isnan(values[i]))
            throw std::invalid_argument(path + ": missing monthly value at " +
                                        dates[i].ym.str());
        if (!out.months.empty() && dates[i].ym != out.months.back().next())
            throw std::invalid_argument(path + ": month gap before " +
                                        dates[i].ym.str());
        out.months.push_back(dates[i].ym);
    }
    out.values = std::move(values);
    return out;
}

inline DailySeries load_daily_csv(const std::string& path) {
    auto s = load_csv(path);
    if (auto* d = std::get_if<DailySeries>(&s)) return std::move(*d);
    throw std::invalid_argument(path + ": expected daily dates");
}

inline MonthlySeries load_monthly_csv(const std::string& path) {
    auto s = load_csv(path);
    if (auto* m = std::get_if<MonthlySeries>(&s)) return std::move(*m);
    throw std::invalid_argument(path + ": expected monthly dates");
}

/// Collapses daily observations to monthly arithmetic means over non-missing
/// values.  Every month in the covered range must contribute at least one
/// observation; missing days are skipped, never interpolated.
inline MonthlySeries monthly_average(const DailySeries& daily) {
    if (daily.size() == 0) throw std::invalid_argument("empty daily series");

    MonthlySeries out;
    YearMonth cur = daily.dates.front().year_month();
    double sum = 0.0;
    long count = 0;

    auto flush = [&](const YearMonth& ym) {
        if (count == 0)
            throw precondition_error("month " + ym.str() +
                                     " has no non-missing observations");
        out.months.push_back(ym);
        out.values.push_back(sum / static_cast<double>(count));
        sum = 0.0;
        count = 0;
    };

    for (std::size_t i = 0; i < daily.size(); ++i) {
        YearMonth ym = daily.dates[i].year_month();
        if (ym != cur) {
            flush(cur);
            if (ym != out.months.back().next())
                throw precondition_error("daily series skips month " +
                                         out.months.back().next().str());
            cur = ym;
        }
        if (!std::isnan(daily.values[i])) {
            sum += daily.values[i];
            ++count;
        }
    }
    flush(cur);
    return out;
}

/// Concatenates the early volatility index with its successor: months before
/// switch_month come from vxo, months from switch_month on come from vix.
/// Values are copied untouched; no level rescaling is applied at the seam.
inline MonthlySeries splice_vix(const MonthlySeries& vxo,
                                const MonthlySeries& vix,
                                const YearMonth& switch_month) {
    if (vxo.size() == 0 || vix.size() == 0)
        throw std::invalid_argument("splice inputs must be non-empty");
    if (!(vxo.first() < switch_month))
        throw precondition_error("vxo does not cover any month before " +
                                 switch_month.str());
    if (vxo.last().next() < switch_month)
        throw precondition_error("vxo ends at " + vxo.last().str() +
                                 ", before the splice at " + switch_month.str());
    if (switch_month < vix.first() || vix.last() < switch_month)
        throw precondition_error("vix does not cover the splice month " +
                                 switch_month.str());

    MonthlySeries out;
    for (std::size_t i = 0; i < vxo.size() && vxo.months[i] < switch_month; ++i) {
        out.months.push_back(vxo.months[i]);
        out.values.push_back(vxo.values[i]);
    }
    for (std::size_t i = 0; i < vix.size(); ++i) {
        if (!(vix.months[i] < switch_month)) {
            out.months.push_back(vix.months[i]);
            out.values.push_back(vix.values[i]);
        }
    }
    for (double v : out.values)
        if (!(v > 0.0))
            throw precondition_error("spliced index contains a non-positive value");
    return out;
}

/// Restricts the volatility series and all return series to their common
/// month range.  The intersection must be non-empty.
inline AlignedPanel align(
    const MonthlySeries& vix,
    const std::vector<std::pair<std::string, MonthlySeries>>& returns) {
    YearMonth lo = vix.first();
    YearMonth hi = vix.last();
    for (const auto& [name, s] : returns) {
        if (s.size() == 0)
            throw std::invalid_argument("return series '" + name + "' is empty");
        lo = std::max(lo, s.first());
        hi = std::min(hi, s.last());
    }
    if (hi < lo) throw precondition_error("series have no overlapping months");

    auto slice = [&](const MonthlySeries& s) {
        std::size_t off = static_cast<std::size_t>(months_between(s.first(), lo));
        std::size_t len = static_cast<std::size_t>(months_between(lo, hi)) + 1;
        return std::vector<double>(s.values.begin() + off,
                                   s.values.begin() + off + len);
    };

    AlignedPanel panel;
    for (YearMonth ym = lo;; ym = ym.next()) {
        panel.months.push_back(ym);
        if (ym == hi) break;
    }
    panel.vix = slice(vix);
    for (const auto& [name, s] : returns) {
        panel.names.push_back(name);
        panel.returns.push_back(slice(s));
    }
    return panel;
}

}  // namespace logheston
