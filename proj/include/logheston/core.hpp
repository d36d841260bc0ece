#pragma once

#include <compare>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace logheston {

/// Thrown when inputs are well-formed but violate a documented statistical
/// precondition (e.g. a moment order outside the finite-MGF interval).
struct precondition_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when an iterative routine exhausts its budget without converging.
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Calendar month, the fundamental time index of the toolkit.
struct YearMonth {
    int year = 0;
    int month = 0;  // 1..12

    auto operator<=>(const YearMonth&) const = default;

    /// Months since January year 0; gives cheap distance arithmetic.
    int index() const { return year * 12 + (month - 1); }

    YearMonth next() const {
        return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1};
    }

    std::string str() const {
        char buf[8];
        std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
        return buf;
    }
};

inline int months_between(const YearMonth& a, const YearMonth& b) {
    return b.index() - a.index();
}

/// Calendar day; only ordering and month extraction are needed.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    YearMonth year_month() const { return {year, month}; }

    std::string str() const {
        char buf[12];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
        return buf;
    }
};

/// Daily observations, strictly increasing dates.  Missing values are NaN.
struct DailySeries {
    std::vector<Date> dates;
    std::vector<double> values;

    std::size_t size() const { return dates.size(); }
};

/// One value per month over a gap-free consecutive range.
struct MonthlySeries {
    std::vector<YearMonth> months;
    std::vector<double> values;

    std::size_t size() const { return months.size(); }
    YearMonth first() const { return months.front(); }
    YearMonth last() const { return months.back(); }
};

/// Monthly volatility index plus named return series on a shared month axis.
struct AlignedPanel {
    std::vector<YearMonth> months;
    std::vector<double> vix;
    std::vector<std::string> names;
    std::vector<std::vector<double>> returns;

    std::size_t size() const { return months.size(); }

    const std::vector<double>& series(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return returns[i];
        throw std::invalid_argument("panel has no series named '" + name + "'");
    }
};

}  // namespace logheston
