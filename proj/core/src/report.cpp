#include "randmoll/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace randmoll {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::info: return "info";
    }
    return "info";
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string to_text(const ReportLine& line) {
    std::ostringstream os;
    os << "check=" << line.check;
    if (line.j) os << " j=" << *line.j;
    os << " value=" << format_double(line.value);
    if (line.bound) os << " bound=" << format_double(*line.bound);
    os << " verdict=" << to_string(line.verdict);
    if (!line.note.empty()) os << " note=" << line.note;
    return os.str();
}

std::string to_text(const ConditionReport& report) {
    std::ostringstream os;
    os << "check=" << report.check << " value=" << format_double(report.measured);
    if (!std::isnan(report.tolerance)) os << " tol=" << format_double(report.tolerance);
    os << " verdict=" << to_string(report.verdict);
    if (!report.complete) os << " incomplete=1";
    if (!report.message.empty()) os << " note=" << report.message;
    os << '\n';
    for (const auto& line : report.lines) os << to_text(line) << '\n';
    return os.str();
}

}  // namespace randmoll
