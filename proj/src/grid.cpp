#include "switchkit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "switchkit/parallel.hpp"

namespace switchkit {

std::size_t GridSpec::size() const {
    validate();
    return static_cast<std::size_t>(std::llround(t_end / h)) + 1;
}

void GridSpec::validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("grid step must be positive");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("grid end must be positive");
    const double n = t_end / h;
    if (n > 5e7) throw std::invalid_argument("grid too fine: more than 5e7 points");
    if (std::abs(n - std::round(n)) > 1e-6 * std::max(1.0, n))
        throw std::invalid_argument("grid end must be an integer multiple of the step");
}

GridFunction::GridFunction(double h, std::vector<double> values) : h_(h), values_(std::move(values)) {
    if (!(h_ > 0.0) || !std::isfinite(h_)) throw std::invalid_argument("GridFunction: step must be positive");
    if (values_.empty()) throw std::invalid_argument("GridFunction: no values");
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("GridFunction: non-finite value");
    }
}

GridFunction GridFunction::tabulate(const GridSpec& grid, const std::function<double(double)>& fn) {
    const std::size_t n = grid.size();
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = fn(grid.h * static_cast<double>(i));
    return GridFunction(grid.h, std::move(v));
}

GridFunction GridFunction::tabulate_density(const GridSpec& grid, const std::function<double(double)>& fn) {
    const std::size_t n = grid.size();
    std::vector<double> v(n);
    for (std::size_t i = 1; i < n; ++i) v[i] = fn(grid.h * static_cast<double>(i));
    const double origin = fn(0.0);
    bool extrapolated = false;
    if (std::isfinite(origin)) {
        v[0] = origin;
    } else {
        if (n < 3) throw std::invalid_argument("singular density needs at least 3 grid points");
        v[0] = std::max(0.0, 2.0 * v[1] - v[2]);
        extrapolated = true;
    }
    GridFunction out(grid.h, std::move(v));
    out.origin_extrapolated_ = extrapolated;
    return out;
}

GridFunction GridFunction::zeros(const GridSpec& grid) {
    return GridFunction(grid.h, std::vector<double>(grid.size(), 0.0));
}

double GridFunction::at(double t) const {
    if (t <= 0.0) return values_.front();
    const double x = t / h_;
    const auto i = static_cast<std::size_t>(x);
    if (i + 1 >= values_.size()) return values_.back();
    const double w = x - static_cast<double>(i);
    return (1.0 - w) * values_[i] + w * values_[i + 1];
}

bool GridFunction::compatible(const GridFunction& other) const {
    return values_.size() == other.values_.size() &&
           std::abs(h_ - other.h_) <= 1e-12 * std::max(h_, other.h_);
}

double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }
double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }

GridFunction GridFunction::map(const std::function<double(double, double)>& fn) const {
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(time(i), values_[i]);
    return GridFunction(h_, std::move(v));
}

void require_compatible(const GridFunction& a, const GridFunction& b, const char* what) {
    if (!a.compatible(b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    require_compatible(a, b, "operator+");
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
    return GridFunction(a.step(), std::move(v));
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    require_compatible(a, b, "operator-");
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
    return GridFunction(a.step(), std::move(v));
}

GridFunction operator*(double c, const GridFunction& a) {
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = c * a[i];
    return GridFunction(a.step(), std::move(v));
}

namespace {

// sum_{j=0}^{m-1} a[j] * b[j] with four fixed accumulators.
double dot(const double* a, const double* b, std::size_t m) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
        s0 += a[j] * b[j];
        s1 += a[j + 1] * b[j + 1];
        s2 += a[j + 2] * b[j + 2];
        s3 += a[j + 3] * b[j + 3];
    }
    for (; j < m; ++j) s0 += a[j] * b[j];
    return (s0 + s1) + (s2 + s3);
}

}  // namespace

GridFunction convolve(const GridFunction& f, const GridFunction& g, unsigned workers) {
    require_compatible(f, g, "convolve");
    const std::size_t n = f.size();
    const double h = f.step();
    const auto fv = f.values();
    const auto gv = g.values();
    // reversed copy of f so that f[i-j] for j = 0..i is a contiguous run
    std::vector<double> fr(fv.rbegin(), fv.rend());
    std::vector<double> out(n, 0.0);
    parallel_for(n, workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = std::max<std::size_t>(begin, 1); i < end; ++i) {
            const double full = dot(fr.data() + (n - 1 - i), gv.data(), i + 1);
            out[i] = h * (full - 0.5 * (fv[i] * gv[0] + fv[0] * gv[i]));
        }
    });
    return GridFunction(h, std::move(out));
}

GridFunction cumulative_integral(const GridFunction& g) {
    const double h = g.step();
    std::vector<double> v(g.size(), 0.0);
    for (std::size_t i = 1; i < v.size(); ++i) v[i] = v[i - 1] + 0.5 * h * (g[i - 1] + g[i]);
    return GridFunction(h, std::move(v));
}

double integral(const GridFunction& g) {
    if (g.size() < 2) return 0.0;
    const auto v = g.values();
    std::vector<double> inner(v.begin() + 1, v.end() - 1);
    const double s = pairwise_sum(inner.data(), inner.size());
    return g.step() * (s + 0.5 * (v.front() + v.back()));
}

GridFunction derivative(const GridFunction& g) {
    const std::size_t n = g.size();
    if (n < 3) throw std::invalid_argument("derivative: need at least 3 grid points");
    const double h = g.step();
    std::vector<double> d(n);
    d[0] = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (g[i + 1] - g[i - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * g[n - 1] - 4.0 * g[n - 2] + g[n - 3]) / (2.0 * h);
    return GridFunction(h, std::move(d));
}

GridFunction second_derivative(const GridFunction& g) {
    const std::size_t n = g.size();
    if (n < 4) throw std::invalid_argument("second_derivative: need at least 4 grid points");
    const double h = g.step();
    const double h2 = h * h;
    std::vector<double> d(n);
    d[0] = (2.0 * g[0] - 5.0 * g[1] + 4.0 * g[2] - g[3]) / h2;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (g[i + 1] - 2.0 * g[i] + g[i - 1]) / h2;
    d[n - 1] = (2.0 * g[n - 1] - 5.0 * g[n - 2] + 4.0 * g[n - 3] - g[n - 4]) / h2;
    return GridFunction(h, std::move(d));
}

double convolution_tail_bound(double cdf_at_t1, long n) {
    if (n < 1) throw std::invalid_argument("convolution_tail_bound: n must be >= 1");
    if (!(cdf_at_t1 >= 0.0)) throw std::invalid_argument("convolution_tail_bound: F(t1) must be >= 0");
    if (cdf_at_t1 >= 1.0) throw std::domain_error("convolution_tail_bound: F(t1) >= 1, bound is vacuous");
    if (cdf_at_t1 == 0.0) return 0.0;
    return std::pow(cdf_at_t1, static_cast<double>(n)) / (1.0 - cdf_at_t1);
}

double pairwise_sum(const double* data, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

namespace {

std::string sci(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", x);
    return buf;
}

}  // namespace

void write_csv(std::ostream& out, const GridFunction& g) {
    out << "t,value\n";
    for (std::size_t i = 0; i < g.size(); ++i) out << sci(g.time(i)) << ',' << sci(g[i]) << '\n';
}

void write_csv(std::ostream& out, const GridFunction& g, const GridFunction& stderr_column) {
    require_compatible(g, stderr_column, "write_csv");
    out << "t,value,stderr\n";
    for (std::size_t i = 0; i < g.size(); ++i)
        out << sci(g.time(i)) << ',' << sci(g[i]) << ',' << sci(stderr_column[i]) << '\n';
}

void write_csv_file(const std::string& path, const GridFunction& g) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open for writing: " + path);
    write_csv(out, g);
}

GridFunction read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("read_csv: empty input");
    if (line.rfind("t,value", 0) != 0) throw std::invalid_argument("read_csv: expected header 't,value'");
    std::vector<double> ts;
    std::vector<double> vs;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::istringstream row(line);
        std::string a, b;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ','))
            throw std::invalid_argument("read_csv: malformed row '" + line + "'");
        try {
            ts.push_back(std::stod(a));
            vs.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw std::invalid_argument("read_csv: malformed number in row '" + line + "'");
        }
    }
    if (ts.size() < 2) throw std::invalid_argument("read_csv: need at least two rows");
    if (std::abs(ts[0]) > 1e-12) throw std::invalid_argument("read_csv: grid must start at t = 0");
    const double h = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (std::abs(ts[i] - h * static_cast<double>(i)) > 1e-9 * std::max(1.0, ts.back()))
            throw std::invalid_argument("read_csv: non-uniform grid");
    }
    return GridFunction(h, std::move(vs));
}

GridFunction read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open for reading: " + path);
    return read_csv(in);
}

nlohmann::json to_json(const GridFunction& g) {
    return nlohmann::json{{"t0", g.t0()}, {"h", g.step()},
                          {"values", std::vector<double>(g.values().begin(), g.values().end())}};
}

GridFunction grid_from_json(const nlohmann::json& j) {
    if (j.at("t0").get<double>() != 0.0) throw std::invalid_argument("grid_from_json: t0 must be 0");
    return GridFunction(j.at("h").get<double>(), j.at("values").get<std::vector<double>>());
}

}  // namespace switchkit
