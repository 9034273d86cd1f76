#include "projfree/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace projfree {

namespace {

std::ifstream open(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Parse, "cannot open " + path);
    return in;
}

std::string where(const std::string& path, std::size_t line) { return path + ":" + std::to_string(line) + ": "; }

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(std::string_view tok, const std::string& ctx) {
    tok = trim(tok);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
        fail(ErrorKind::Parse, ctx + "not a number: '" + std::string(tok) + "'");
    if (!std::isfinite(v)) fail(ErrorKind::Parse, ctx + "non-finite value '" + std::string(tok) + "'");
    return v;
}

std::size_t parse_positive_id(std::string_view tok, const std::string& ctx) {
    tok = trim(tok);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
        fail(ErrorKind::Parse, ctx + "not an integer id: '" + std::string(tok) + "'");
    if (v <= 0) fail(ErrorKind::Parse, ctx + "ids are 1-based, got " + std::to_string(v));
    return static_cast<std::size_t>(v);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    const bool comma = line.find(',') != std::string_view::npos;
    std::size_t pos = 0;
    if (comma) {
        for (;;) {
            const auto next = line.find(',', pos);
            out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
            if (next == std::string_view::npos) break;
            pos = next + 1;
        }
        return out;
    }
    while (pos < line.size()) {
        const auto b = line.find_first_not_of(" \t", pos);
        if (b == std::string_view::npos) break;
        auto e = line.find_first_of(" \t", b);
        if (e == std::string_view::npos) e = line.size();
        out.push_back(line.substr(b, e - b));
        pos = e;
    }
    return out;
}

}  // namespace

TabularDataset load_delimited(const std::string& path, bool has_header, std::size_t target_column) {
    auto in = open(path);
    std::string line;
    std::size_t lineno = 0, width = 0;
    std::vector<Vec> rows;
    bool header_pending = has_header;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = trim(line);
        if (body.empty()) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        const auto fields = split_fields(body);
        if (width == 0) {
            width = fields.size();
            if (target_column >= width)
                fail(ErrorKind::Parse, where(path, lineno) + "target column " + std::to_string(target_column) +
                                           " missing; rows have " + std::to_string(width) + " fields");
            if (width < 2) fail(ErrorKind::Parse, where(path, lineno) + "need at least one feature besides the target");
        } else if (fields.size() != width) {
            fail(ErrorKind::Parse, where(path, lineno) + "ragged row: " + std::to_string(fields.size()) +
                                       " fields, expected " + std::to_string(width));
        }
        Vec row;
        row.reserve(width);
        for (auto f : fields) row.push_back(parse_double(f, where(path, lineno)));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(ErrorKind::Parse, path + ": no data rows");
    Mat x(rows.size(), width - 1);
    Vec y(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::size_t k = 0;
        for (std::size_t j = 0; j < width; ++j) {
            if (j == target_column) y[i] = rows[i][j];
            else x(i, k++) = rows[i][j];
        }
    }
    return TabularDataset(std::move(x), std::move(y));
}

TabularDataset load_libsvm(const std::string& path) {
    auto in = open(path);
    std::string line;
    std::size_t lineno = 0, max_index = 0;
    std::vector<std::vector<std::pair<std::size_t, double>>> rows;
    Vec labels;
    while (std::getline(in, line)) {
        ++lineno;
        auto body = trim(line);
        if (const auto hash = body.find('#'); hash != std::string_view::npos) body = trim(body.substr(0, hash));
        if (body.empty()) continue;
        const auto toks = split_fields(body);
        const std::string ctx = where(path, lineno);
        double label = parse_double(toks[0], ctx);
        if (label == 0.0) label = -1.0;
        labels.push_back(label);
        std::vector<std::pair<std::size_t, double>> row;
        std::size_t prev = 0;
        for (std::size_t k = 1; k < toks.size(); ++k) {
            const auto colon = toks[k].find(':');
            if (colon == std::string_view::npos) fail(ErrorKind::Parse, ctx + "malformed pair '" + std::string(toks[k]) + "'");
            const std::size_t idx = parse_positive_id(toks[k].substr(0, colon), ctx);
            if (idx <= prev) fail(ErrorKind::Parse, ctx + "feature indices must be strictly ascending");
            prev = idx;
            max_index = std::max(max_index, idx);
            row.emplace_back(idx, parse_double(toks[k].substr(colon + 1), ctx));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(ErrorKind::Parse, path + ": no data rows");
    if (max_index == 0) fail(ErrorKind::Parse, path + ": no features");
    Mat x(rows.size(), max_index);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (const auto& [idx, v] : rows[i]) x(i, idx - 1) = v;
    return TabularDataset(std::move(x), std::move(labels));
}

ObservedMatrix load_ratings(const std::string& path) {
    auto in = open(path);
    std::string line;
    std::size_t lineno = 0, m = 0, n = 0;
    std::map<std::pair<std::size_t, std::size_t>, double> cells;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto f = split_fields(body);
        const std::string ctx = where(path, lineno);
        if (f.size() != 3) fail(ErrorKind::Parse, ctx + "expected user,item,rating");
        const std::size_t u = parse_positive_id(f[0], ctx);
        const std::size_t it = parse_positive_id(f[1], ctx);
        cells[{u - 1, it - 1}] = parse_double(f[2], ctx);
        m = std::max(m, u);
        n = std::max(n, it);
    }
    if (cells.empty()) fail(ErrorKind::Parse, path + ": no ratings");
    std::vector<ObservedEntry> entries;
    entries.reserve(cells.size());
    for (const auto& [ij, v] : cells) entries.push_back({ij.first, ij.second, v});
    return ObservedMatrix(m, n, std::move(entries));
}

// --- generators ----------------------------------------------------------

namespace {

void check_sizes(const SyntheticSpec& s) {
    if (s.n == 0 || s.d == 0) fail(ErrorKind::InvalidArgument, "synthetic sizes must be positive");
    if (s.noise < 0.0) fail(ErrorKind::InvalidArgument, "noise level must be nonnegative");
    if (!(std::fabs(s.correlation) < 1.0)) fail(ErrorKind::InvalidArgument, "feature correlation must lie in (-1, 1)");
}

Vec feature_row(std::size_t d, double rho, Rng& rng) {
    Vec x = gaussian_vec(d, rng);
    if (rho != 0.0) {
        const double c = std::sqrt(1.0 - rho * rho);
        for (std::size_t j = 1; j < d; ++j) x[j] = rho * x[j - 1] + c * x[j];
    }
    return x;
}

}  // namespace

GeneratedTabular gen_regression(const SyntheticSpec& spec) {
    check_sizes(spec);
    Rng rng(spec.seed);
    Vec w = spec.w_true;
    if (w.empty()) {
        w = gaussian_vec(spec.d, rng);
        if (spec.w_norm > 0.0) w = scaled(w, spec.w_norm / norm2(w));
    } else if (w.size() != spec.d) {
        fail(ErrorKind::ShapeMismatch, "w_true has " + std::to_string(w.size()) + " entries, d = " + std::to_string(spec.d));
    }
    Mat x(spec.n, spec.d);
    Vec y(spec.n);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const Vec row = feature_row(spec.d, spec.correlation, rng);
        std::copy(row.begin(), row.end(), x.row(i).begin());
        y[i] = dot(row, w) + spec.bias + spec.noise * nd(rng);
    }
    return {TabularDataset(std::move(x), std::move(y)), std::move(w)};
}

GeneratedTabular gen_classification(const SyntheticSpec& spec) {
    check_sizes(spec);
    if (spec.margin < 0.0) fail(ErrorKind::InvalidArgument, "margin must be nonnegative");
    Rng rng(spec.seed);
    Vec w = spec.w_true.empty() ? gaussian_vec(spec.d, rng) : spec.w_true;
    if (w.size() != spec.d) fail(ErrorKind::ShapeMismatch, "w_true has the wrong dimension");
    w = scaled(w, 1.0 / norm2(w));
    Mat x(spec.n, spec.d);
    Vec y(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        Vec row;
        double s = 0.0;
        for (std::size_t tries = 0;; ++tries) {
            if (tries > 100000) fail(ErrorKind::InvalidArgument, "margin too large to sample separable rows");
            row = feature_row(spec.d, spec.correlation, rng);
            s = dot(row, w);
            if (std::fabs(s) >= spec.margin && s != 0.0) break;
        }
        std::copy(row.begin(), row.end(), x.row(i).begin());
        y[i] = s > 0.0 ? 1.0 : -1.0;
    }
    return {TabularDataset(std::move(x), std::move(y)), std::move(w)};
}

GeneratedMatrix gen_lowrank(const SyntheticSpec& spec) {
    if (spec.m == 0 || spec.n == 0) fail(ErrorKind::InvalidArgument, "low-rank shape must be positive");
    if (spec.rank == 0 || spec.rank > std::min(spec.m, spec.n))
        fail(ErrorKind::InvalidArgument, "rank must lie in [1, min(m, n)]");
    if (!(spec.fraction > 0.0 && spec.fraction <= 1.0)) fail(ErrorKind::InvalidArgument, "observation fraction must lie in (0, 1]");
    Rng rng(spec.seed);
    const Mat a(spec.m, spec.rank, gaussian_vec(spec.m * spec.rank, rng));
    const Mat b(spec.n, spec.rank, gaussian_vec(spec.n * spec.rank, rng));
    Mat full = matmul(a, b.transpose());
    const std::size_t total = spec.m * spec.n;
    const auto k = static_cast<std::size_t>(std::llround(spec.fraction * static_cast<double>(total)));
    if (k == 0) fail(ErrorKind::InvalidArgument, "observation fraction leaves no observed entries");
    auto idx = sample_without_replacement(total, k, rng);
    std::sort(idx.begin(), idx.end());
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<ObservedEntry> entries;
    entries.reserve(k);
    for (std::size_t id : idx) {
        const std::size_t i = id / spec.n, j = id % spec.n;
        entries.push_back({i, j, full(i, j) + spec.noise * nd(rng)});
    }
    return {ObservedMatrix(spec.m, spec.n, std::move(entries)), std::move(full)};
}

Standardizer Standardizer::fit(const Mat& x) {
    Standardizer s;
    const std::size_t n = x.rows(), d = x.cols();
    s.mean_.assign(d, 0.0);
    s.scale_.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) s.mean_[j] += x(i, j);
    for (double& m : s.mean_) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) s.scale_[j] += (x(i, j) - s.mean_[j]) * (x(i, j) - s.mean_[j]);
    for (double& v : s.scale_) {
        v = std::sqrt(v / static_cast<double>(n));
        if (!(v > 0.0)) v = 1.0;
    }
    return s;
}

Mat Standardizer::apply(const Mat& x) const {
    if (x.cols() != mean_.size()) fail(ErrorKind::ShapeMismatch, "standardizer column count mismatch");
    Mat z(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) z(i, j) = (x(i, j) - mean_[j]) / scale_[j];
    return z;
}

Mat Standardizer::invert(const Mat& z) const {
    if (z.cols() != mean_.size()) fail(ErrorKind::ShapeMismatch, "standardizer column count mismatch");
    Mat x(z.rows(), z.cols());
    for (std::size_t i = 0; i < z.rows(); ++i)
        for (std::size_t j = 0; j < z.cols(); ++j) x(i, j) = z(i, j) * scale_[j] + mean_[j];
    return x;
}

}  // namespace projfree
