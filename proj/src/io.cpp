#include "lpflow/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lpflow {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ofstream os(path, mode | std::ios::trunc);
    if (!os) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    return os;
}

void print_value(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

}  // namespace

void write_samples_csv(const std::filesystem::path& path, const SampleSet& s) {
    auto os = open_out(path, std::ios::out);
    for (int i = 0; i < s.count; ++i) {
        const auto row = s.row(i);
        for (int j = 0; j < s.dim; ++j) {
            if (j > 0) os << ',';
            print_value(os, row[j]);
        }
        os << '\n';
    }
}

void write_vector_csv(const std::filesystem::path& path, std::span<const double> values,
                      int columns) {
    require(columns >= 1, "write_vector_csv: columns must be >= 1");
    auto os = open_out(path, std::ios::out);
    for (size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            os << (i % columns == 0 ? '\n' : ',');
        }
        print_value(os, values[i]);
    }
    os << '\n';
}

std::vector<double> read_values_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw std::invalid_argument("cannot open input file: " + path.string());
    }
    std::vector<double> out;
    std::string tok;
    auto flush_tok = [&]() {
        if (tok.empty()) return;
        size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) {
            throw std::invalid_argument("bad numeric value '" + tok + "' in " + path.string());
        }
        out.push_back(v);
        tok.clear();
    };
    char c;
    while (is.get(c)) {
        if (c == ',' || c == '\n' || c == '\r' || c == ' ' || c == '\t') {
            flush_tok();
        } else {
            tok.push_back(c);
        }
    }
    flush_tok();
    return out;
}

void write_history_csv(const std::filesystem::path& path, const LossHistory& history) {
    auto os = open_out(path, std::ios::out);
    os << "step,loss\n";
    for (const auto& [step, loss] : history.entries) {
        os << step << ',';
        print_value(os, loss);
        os << '\n';
    }
}

void write_pgm(const std::filesystem::path& path, std::span<const double> values,
               int width, int height) {
    require(width >= 1 && height >= 1, "write_pgm: bad image size");
    require(values.size() == static_cast<size_t>(width) * height, "write_pgm: value count mismatch");
    auto os = open_out(path, std::ios::binary);
    os << "P5\n" << width << ' ' << height << "\n255\n";
    std::vector<unsigned char> bytes(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
        const double v01 = std::clamp((values[i] + 1.0) * 0.5, 0.0, 1.0);
        bytes[i] = static_cast<unsigned char>(std::lround(v01 * 255.0));
    }
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

PgmImage read_pgm(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::invalid_argument("cannot open image: " + path.string());
    }
    auto next_token = [&]() -> std::string {
        std::string tok;
        char c;
        while (is.get(c)) {
            if (c == '#') {
                while (is.get(c) && c != '\n') {
                }
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!tok.empty()) return tok;
                continue;
            }
            tok.push_back(c);
        }
        return tok;
    };

    const std::string magic = next_token();
    if (magic != "P5") {
        throw std::invalid_argument("unsupported image format (want binary P5): " + path.string());
    }
    PgmImage img;
    img.width = std::stoi(next_token());
    img.height = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    require(img.width >= 1 && img.height >= 1, "read_pgm: bad image size");
    require(maxval > 0 && maxval <= 255, "read_pgm: unsupported maxval");

    const size_t n = static_cast<size_t>(img.width) * img.height;
    std::vector<unsigned char> bytes(n);
    is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(n));
    if (!is) {
        throw std::invalid_argument("truncated image: " + path.string());
    }
    img.values.resize(n);
    for (size_t i = 0; i < n; ++i) {
        img.values[i] = static_cast<double>(bytes[i]) / maxval * 2.0 - 1.0;
    }
    return img;
}

}  // namespace lpflow
