#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace randmoll {

enum class Verdict { pass, fail, info };

std::string to_string(Verdict v);

/// One evidence line of a condition report. Serializes as
///   check=<name> j=<j> value=<v> bound=<b> verdict=<pass|fail|info>
/// with j/bound omitted when absent.
struct ReportLine {
    std::string check;
    std::optional<int> j;
    double value = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> bound;
    Verdict verdict = Verdict::info;
    std::string note;  // free-form, appended as note=<...> when nonempty
};

/// Outcome of a hypothesis check: overall verdict, headline constant,
/// tolerance used and the per-item evidence lines.
struct ConditionReport {
    std::string check;
    Verdict verdict = Verdict::info;
    double measured = std::numeric_limits<double>::quiet_NaN();
    double tolerance = std::numeric_limits<double>::quiet_NaN();
    std::vector<ReportLine> lines;
    std::string message;
    bool complete = true;

    bool passed() const { return verdict == Verdict::pass; }
};

std::string to_text(const ReportLine& line);
std::string to_text(const ConditionReport& report);

/// Shortest decimal form that round-trips a double (17 significant digits).
std::string format_double(double x);

}  // namespace randmoll
