#include "pdfp/io.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pdfp {
namespace io {

namespace {

[[noreturn]] void fail(const std::string& what)
{
    throw std::runtime_error(what);
}

void atomic_write(const std::string& path, const std::string& content)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            fail("cannot open " + tmp + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            fail("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        fail("rename " + tmp + " -> " + path + ": " + std::strerror(errno));
}

double parse_double(const std::string& tok, std::size_t line_no)
{
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        fail("line " + std::to_string(line_no) + ": malformed number '" + tok + "'");
    }
    if (pos != tok.size())
        fail("line " + std::to_string(line_no) + ": trailing characters in '" + tok + "'");
    return v;
}

}  // namespace

std::string format_g12(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

LogRegDataset load_libsvm(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        fail("cannot open " + path);

    struct Row {
        double label;
        std::vector<std::pair<std::size_t, double>> entries;
    };
    std::vector<Row> rows;
    std::size_t max_index = 0;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok))
            continue;  // blank line
        if (tok[0] == '#')
            continue;

        Row row;
        const double raw_label = parse_double(tok, line_no);
        if (raw_label == 0.0)
            row.label = -1.0;  // {0,1} convention remap
        else if (raw_label == 1.0 || raw_label == -1.0)
            row.label = raw_label;
        else
            fail("line " + std::to_string(line_no) + ": label " + tok +
                 " outside {-1, 0, +1}");

        while (ls >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
                fail("line " + std::to_string(line_no) + ": malformed feature token '" + tok + "'");
            const std::string idx_s = tok.substr(0, colon);
            std::size_t pos = 0;
            long idx = 0;
            try {
                idx = std::stol(idx_s, &pos);
            } catch (const std::exception&) {
                pos = std::string::npos;
            }
            if (pos != idx_s.size() || idx < 1)
                fail("line " + std::to_string(line_no) + ": bad feature index '" + idx_s + "'");
            const double val = parse_double(tok.substr(colon + 1), line_no);
            row.entries.emplace_back(static_cast<std::size_t>(idx), val);
            max_index = std::max(max_index, static_cast<std::size_t>(idx));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        fail(path + ": no samples");
    if (max_index == 0)
        fail(path + ": no features");

    LogRegDataset data;
    data.q = max_index;
    for (auto& row : rows) {
        DenseVector a(max_index, 0.0);
        for (const auto& [idx, val] : row.entries)
            a[idx - 1] = val;
        data.features.push_back(std::move(a));
        data.labels.push_back(row.label);
    }
    data.check();
    return data;
}

PgmImage load_pgm(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail("cannot open " + path);

    // header tokens with '#' comments allowed anywhere before the pixel data
    const auto next_token = [&]() -> std::string {
        std::string tok;
        int c;
        while ((c = in.get()) != EOF) {
            if (c == '#') {
                while ((c = in.get()) != EOF && c != '\n') {}
                continue;
            }
            if (std::isspace(c))
                continue;
            tok.push_back(static_cast<char>(c));
            while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#')
                tok.push_back(static_cast<char>(in.get()));
            return tok;
        }
        fail(path + ": truncated PGM header");
    };

    const std::string magic = next_token();
    if (magic != "P2" && magic != "P5")
        fail(path + ": unsupported magic '" + magic + "' (want P2 or P5)");

    const auto parse_size = [&](const std::string& tok) {
        for (char c : tok)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                fail(path + ": bad header token '" + tok + "'");
        return static_cast<std::size_t>(std::stoull(tok));
    };
    PgmImage img;
    img.width = parse_size(next_token());
    img.height = parse_size(next_token());
    const std::size_t maxval = parse_size(next_token());
    if (img.width == 0 || img.height == 0)
        fail(path + ": zero image dimension");
    if (maxval == 0 || maxval > 255)
        fail(path + ": maxval " + std::to_string(maxval) + " out of contract (need <= 255)");
    img.maxval = static_cast<int>(maxval);

    const std::size_t n = img.width * img.height;
    img.pixels.resize(n);
    if (magic == "P2") {
        for (std::size_t i = 0; i < n; ++i) {
            const std::string tok = next_token();
            const std::size_t v = parse_size(tok);
            if (v > maxval)
                fail(path + ": pixel value " + tok + " exceeds maxval");
            img.pixels[i] = static_cast<double>(v);
        }
    } else {
        // single whitespace byte after maxval, then raw bytes
        const int sep = in.get();
        if (sep == EOF || !std::isspace(sep))
            fail(path + ": missing separator before pixel data");
        std::vector<unsigned char> raw(n);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n)
            fail(path + ": truncated pixel data");
        for (std::size_t i = 0; i < n; ++i) {
            if (raw[i] > maxval)
                fail(path + ": pixel value exceeds maxval");
            img.pixels[i] = static_cast<double>(raw[i]);
        }
    }
    return img;
}

void save_pgm(const std::string& path, const PgmImage& image)
{
    if (image.pixels.size() != image.width * image.height)
        fail("save_pgm: pixel count does not match dimensions");
    if (image.maxval <= 0 || image.maxval > 255)
        fail("save_pgm: maxval out of contract");

    std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                      "\n" + std::to_string(image.maxval) + "\n";
    out.reserve(out.size() + image.pixels.size());
    for (double p : image.pixels) {
        double v = std::clamp(p, 0.0, static_cast<double>(image.maxval));
        v = std::nearbyint(v);  // default FE_TONEAREST rounds half to even
        out.push_back(static_cast<char>(static_cast<unsigned char>(v)));
    }
    atomic_write(path, out);
}

DenseMatrixMap load_matrix_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        fail("cannot open " + path);

    std::vector<double> data;
    std::size_t cols = 0, rows = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string cell;
        std::size_t row_cols = 0;
        while (std::getline(ls, cell, ',')) {
            data.push_back(parse_double(cell, line_no));
            ++row_cols;
        }
        if (cols == 0)
            cols = row_cols;
        else if (row_cols != cols)
            fail(path + ": line " + std::to_string(line_no) + " has " + std::to_string(row_cols) +
                 " cells, expected " + std::to_string(cols));
        ++rows;
    }
    if (rows == 0 || cols == 0)
        fail(path + ": empty matrix");
    return DenseMatrixMap(rows, cols, std::move(data));
}

void write_trace_csv(const std::string& path, const std::vector<ConvergenceRecord>& trace)
{
    std::string out = "iter,objective,km_residual_P,primal_change,elapsed_ms\n";
    for (const auto& r : trace) {
        out += std::to_string(r.iter);
        out += ',';
        out += format_g12(r.objective);
        out += ',';
        out += format_g12(r.km_residual_P);
        out += ',';
        out += format_g12(r.primal_change);
        out += ',';
        out += format_g12(r.elapsed_ms);
        out += '\n';
    }
    atomic_write(path, out);
}

void write_summary(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& entries)
{
    std::string out;
    for (const auto& [k, v] : entries)
        out += k + "=" + v + "\n";
    atomic_write(path, out);
}

}  // namespace io
}  // namespace pdfp
