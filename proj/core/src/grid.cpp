#include "randmoll/grid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "randmoll/errors.hpp"
#include "randmoll/report.hpp"

namespace randmoll {

GridFunction::GridFunction(int dim, std::array<double, 2> lo, std::array<double, 2> hi,
                           std::array<int, 2> res)
    : dim_(dim), lo_(lo), hi_(hi), res_(res) {
    if (dim_ < 1 || dim_ > 2) throw ConfigError("grid functions support dimensions 1 and 2");
    if (dim_ == 1) {
        res_[1] = 1;
        lo_[1] = 0;
        hi_[1] = 1;
    }
    for (int a = 0; a < dim_; ++a) {
        if (res_[a] < 1) throw ConfigError("grid resolution must be positive");
        if (!(hi_[a] > lo_[a])) throw ConfigError("grid box must have positive extent");
    }
    values_.assign(static_cast<std::size_t>(res_[0]) * res_[1], 0.0);
}

GridFunction GridFunction::sample(int dim, std::array<double, 2> lo, std::array<double, 2> hi,
                                  std::array<int, 2> res,
                                  const std::function<double(const Point&)>& f) {
    GridFunction g(dim, lo, hi, res);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = f(g.center(k));
    return g;
}

double GridFunction::cell_volume() const {
    double v = 1;
    for (int a = 0; a < dim_; ++a) v *= pitch(a);
    return v;
}

Point GridFunction::center(std::size_t k) const {
    int i0 = static_cast<int>(k) / res_[1];
    int i1 = static_cast<int>(k) % res_[1];
    Point p(dim_);
    p[0] = lo_[0] + (i0 + 0.5) * pitch(0);
    if (dim_ == 2) p[1] = lo_[1] + (i1 + 0.5) * pitch(1);
    return p;
}

double GridFunction::value_at(const Point& x) const {
    int idx[2] = {0, 0};
    for (int a = 0; a < dim_; ++a) {
        if (x[a] < lo_[a] || x[a] >= hi_[a]) return 0.0;
        idx[a] = static_cast<int>((x[a] - lo_[a]) / pitch(a));
        idx[a] = std::clamp(idx[a], 0, res_[a] - 1);
    }
    return values_[index(idx[0], idx[1])];
}

double GridFunction::l1_norm() const {
    double s = 0;
    for (double v : values_) s += std::abs(v);
    return s * cell_volume();
}

double GridFunction::lp_norm(double p) const {
    double s = 0;
    for (double v : values_) s += std::pow(std::abs(v), p);
    return std::pow(s * cell_volume(), 1.0 / p);
}

double GridFunction::sup_norm() const {
    double s = 0;
    for (double v : values_) s = std::max(s, std::abs(v));
    return s;
}

void GridFunction::write_csv(std::ostream& os) const {
    os << "n," << dim_ << '\n';
    os << "box";
    for (int a = 0; a < dim_; ++a)
        os << ',' << format_double(lo_[a]) << ',' << format_double(hi_[a]);
    os << '\n';
    os << "resolution";
    for (int a = 0; a < dim_; ++a) os << ',' << res_[a];
    os << '\n';
    os << "values\n";
    for (double v : values_) os << format_double(v) << '\n';
}

namespace {
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}
}  // namespace

GridFunction GridFunction::read_csv(std::istream& is) {
    std::string line;
    auto next = [&]() {
        if (!std::getline(is, line)) throw ConfigError("grid csv: truncated header");
        return split_csv(line);
    };
    auto hdr = next();
    if (hdr.size() != 2 || hdr[0] != "n") throw ConfigError("grid csv: expected n,<dim>");
    int dim = std::stoi(hdr[1]);
    auto box = next();
    if (box.empty() || box[0] != "box" || box.size() != static_cast<std::size_t>(1 + 2 * dim))
        throw ConfigError("grid csv: bad box line");
    std::array<double, 2> lo{0, 0}, hi{0, 1};
    for (int a = 0; a < dim; ++a) {
        lo[a] = std::stod(box[1 + 2 * a]);
        hi[a] = std::stod(box[2 + 2 * a]);
    }
    auto res_line = next();
    if (res_line.empty() || res_line[0] != "resolution" ||
        res_line.size() != static_cast<std::size_t>(1 + dim))
        throw ConfigError("grid csv: bad resolution line");
    std::array<int, 2> res{1, 1};
    for (int a = 0; a < dim; ++a) res[a] = std::stoi(res_line[1 + a]);
    auto tag = next();
    if (tag.empty() || tag[0] != "values") throw ConfigError("grid csv: missing values tag");
    GridFunction g(dim, lo, hi, res);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!std::getline(is, line)) throw ConfigError("grid csv: truncated values");
        g[k] = std::stod(line);
    }
    return g;
}

CatalogFunction test_function(const std::string& name, int dim, std::array<double, 2> lo,
                              std::array<double, 2> hi, std::array<int, 2> res,
                              const std::map<std::string, double>& params) {
    auto get = [&](const std::string& key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    const double inf = std::numeric_limits<double>::infinity();
    auto smooth = [inf](const Point&) { return inf; };

    if (name == "constant") {
        double c = get("value", 1.0);
        return {GridFunction::sample(dim, lo, hi, res, [c](const Point&) { return c; }), true,
                smooth};
    }
    if (name == "tent") {
        return {GridFunction::sample(dim, lo, hi, res,
                                     [](const Point& x) {
                                         return std::max(0.0, 1.0 - x.norm());
                                     }),
                true, smooth};
    }
    if (name == "cosine-packet") {
        return {GridFunction::sample(dim, lo, hi, res,
                                     [dim](const Point& x) {
                                         double s = 0;
                                         for (int a = 0; a < dim; ++a) s += x[a];
                                         return std::cos(3.0 * s) *
                                                std::exp(-x.norm_sq() / 8.0);
                                     }),
                true, smooth};
    }
    if (name == "ball-indicator") {
        double r = get("radius", 1.0);
        return {GridFunction::sample(dim, lo, hi, res,
                                     [r](const Point& x) { return x.norm() < r ? 1.0 : 0.0; }),
                false, [r](const Point& x) { return std::abs(x.norm() - r); }};
    }
    if (name == "spike") {
        if (dim != 1) throw ConfigError("spike is a one-dimensional test function");
        return {GridFunction::sample(dim, lo, hi, res,
                                     [](const Point& x) {
                                         double a = std::abs(x[0]);
                                         return a > 0 && a < 1 ? 1.0 / std::sqrt(a) : 0.0;
                                     }),
                false,
                [](const Point& x) {
                    double a = std::abs(x[0]);
                    return std::min(a, std::abs(a - 1.0));
                }};
    }
    if (name == "step") {
        return {GridFunction::sample(dim, lo, hi, res,
                                     [](const Point& x) { return x[0] > 0 ? 1.0 : 0.0; }),
                false, [](const Point& x) { return std::abs(x[0]); }};
    }
    throw ConfigError("unknown test function '" + name + "'");
}

std::vector<std::string> test_function_catalog() {
    return {"constant", "tent", "cosine-packet", "ball-indicator", "spike", "step"};
}

}  // namespace randmoll
