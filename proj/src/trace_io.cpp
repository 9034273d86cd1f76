#include "projfree/trace_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace projfree {

namespace {

void put_real(std::ostream& out, const std::optional<double>& v) {
    if (!v) return;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    out << buf;
}

std::optional<double> get_real(const std::string& cell, std::size_t line) {
    if (cell.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        fail(ErrorKind::Parse, "trace line " + std::to_string(line) + ": bad number '" + cell + "'");
    return v;
}

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& records) {
    out << kTraceHeader << '\n';
    for (const auto& r : records) {
        out << r.t << ',';
        put_real(out, r.loss_f);
        out << ',';
        put_real(out, r.loss_h);
        out << ',';
        put_real(out, r.fw_gap);
        out << ',';
        put_real(out, r.gamma);
        out << ',';
        if (r.batch) out << *r.batch;
        out << ',';
        put_real(out, r.grad_norm);
        out << ',';
        put_real(out, r.step_ms);
        out << ',';
        put_real(out, r.oracle_ms);
        out << ',';
        put_real(out, r.proj_ms);
        out << '\n';
    }
}

void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Parse, "cannot write trace file " + path);
    write_trace_csv(out, records);
    if (!out) fail(ErrorKind::Parse, "error while writing trace file " + path);
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::Parse, "trace is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTraceHeader) fail(ErrorKind::Parse, "trace header does not match the expected columns");
    std::vector<TraceRecord> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (cells.size() != 10)
            fail(ErrorKind::Parse, "trace line " + std::to_string(lineno) + ": expected 10 columns, got " +
                                       std::to_string(cells.size()));
        TraceRecord r;
        const auto t = get_real(cells[0], lineno);
        const auto loss = get_real(cells[1], lineno);
        if (!t || !loss) fail(ErrorKind::Parse, "trace line " + std::to_string(lineno) + ": t and loss_f are required");
        if (*t < 1 || *t != static_cast<double>(static_cast<std::size_t>(*t)))
            fail(ErrorKind::Parse, "trace line " + std::to_string(lineno) + ": t must be a positive integer");
        r.t = static_cast<std::size_t>(*t);
        if (!out.empty() && r.t <= out.back().t)
            fail(ErrorKind::Parse, "trace line " + std::to_string(lineno) + ": t must increase strictly");
        r.loss_f = *loss;
        r.loss_h = get_real(cells[2], lineno);
        r.fw_gap = get_real(cells[3], lineno);
        r.gamma = get_real(cells[4], lineno);
        if (auto b = get_real(cells[5], lineno)) r.batch = static_cast<std::size_t>(*b);
        r.grad_norm = get_real(cells[6], lineno);
        r.step_ms = get_real(cells[7], lineno);
        r.oracle_ms = get_real(cells[8], lineno);
        r.proj_ms = get_real(cells[9], lineno);
        out.push_back(r);
    }
    return out;
}

std::vector<TraceRecord> read_trace_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Parse, "cannot open trace file " + path);
    return read_trace_csv(in);
}

}  // namespace projfree
