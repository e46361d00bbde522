#include "lrdeblur/io.hpp"

#include <png.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace lrd {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed for '" + path + "'");
    return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& bytes) {
    const fs::path target(path);
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp" + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write failed for '" + path + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename into '" + path + "'");
    }
}

namespace {

std::string lower_ext(const std::string& path) {
    std::string e = fs::path(path).extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return e;
}

double luma(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

int quantize(double v, int maxval) {
    return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * maxval));
}

void check_depth(int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) throw std::invalid_argument("bit depth must be 8 or 16");
}

/// Header tokenizer for PGM: whitespace and '#' comments.
class PgmHeader {
public:
    explicit PgmHeader(const std::string& b) : b_(b) {}

    int next_int() {
        skip();
        std::size_t start = pos_;
        while (pos_ < b_.size() && std::isdigit(static_cast<unsigned char>(b_[pos_]))) ++pos_;
        if (start == pos_) throw IoError("pgm: malformed header");
        int v = 0;
        auto [p, ec] = std::from_chars(b_.data() + start, b_.data() + pos_, v);
        if (ec != std::errc() || p != b_.data() + pos_) throw IoError("pgm: header value out of range");
        return v;
    }

    std::size_t pos() const { return pos_; }
    void advance(std::size_t n) { pos_ += n; }

private:
    void skip() {
        while (pos_ < b_.size()) {
            const char c = b_[pos_];
            if (c == '#') {
                while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    const std::string& b_;
    std::size_t pos_ = 2;
};

void png_error_cb(png_structp png, png_const_charp) { std::longjmp(png_jmpbuf(png), 1); }
void png_warning_cb(png_structp, png_const_charp) {}

struct PngReadSource {
    const std::string* bytes;
    std::size_t pos;
};

void png_read_cb(png_structp png, png_bytep out, png_size_t n) {
    auto* src = static_cast<PngReadSource*>(png_get_io_ptr(png));
    if (src->pos + n > src->bytes->size()) png_error(png, "truncated");
    std::copy_n(src->bytes->data() + src->pos, n, out);
    src->pos += n;
}

void png_write_cb(png_structp png, png_bytep data, png_size_t n) {
    static_cast<std::string*>(png_get_io_ptr(png))->append(reinterpret_cast<const char*>(data), n);
}

void png_flush_cb(png_structp) {}

}  // namespace

Image decode_pgm(const std::string& b) {
    if (b.size() < 2 || b[0] != 'P' || (b[1] != '2' && b[1] != '5')) throw IoError("pgm: bad magic");
    const bool binary = b[1] == '5';
    PgmHeader h(b);
    const int w = h.next_int(), ht = h.next_int(), maxval = h.next_int();
    if (w < 1 || ht < 1) throw IoError("pgm: empty image");
    if (maxval < 1 || maxval > 65535) throw IoError("pgm: maxval out of range");
    Matrix px(ht, w);
    if (binary) {
        h.advance(1);
        const std::size_t bpp = maxval < 256 ? 1 : 2;
        const std::size_t need = static_cast<std::size_t>(w) * ht * bpp;
        if (b.size() < h.pos() || b.size() - h.pos() < need) throw IoError("pgm: truncated pixel data");
        const auto* p = reinterpret_cast<const unsigned char*>(b.data() + h.pos());
        for (int r = 0; r < ht; ++r)
            for (int c = 0; c < w; ++c) {
                const std::size_t i = (static_cast<std::size_t>(r) * w + c) * bpp;
                const int v = bpp == 1 ? p[i] : (p[i] << 8) | p[i + 1];
                if (v > maxval) throw IoError("pgm: sample exceeds maxval");
                px(r, c) = static_cast<double>(v) / maxval;
            }
    } else {
        for (int r = 0; r < ht; ++r)
            for (int c = 0; c < w; ++c) {
                int v = 0;
                try {
                    v = h.next_int();
                } catch (const IoError&) {
                    throw IoError("pgm: truncated pixel data");
                }
                if (v > maxval) throw IoError("pgm: sample exceeds maxval");
                px(r, c) = static_cast<double>(v) / maxval;
            }
    }
    return Image(std::move(px));
}

Image decode_png(const std::string& bytes) {
    if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0)
        throw IoError("png: bad signature");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_cb, png_warning_cb);
    if (!png) throw IoError("png: out of memory");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png: out of memory");
    }
    // Everything touched after setjmp is declared here so longjmp skips no destructor.
    PngReadSource src{&bytes, 0};
    std::vector<unsigned char> buf;
    std::vector<png_bytep> rows;
    png_uint_32 w = 0, h = 0;
    int depth = 0, channels = 0;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("png: corrupt or truncated file");
    }
    png_set_read_fn(png, &src, png_read_cb);
    png_read_info(png, info);
    png_set_expand(png);
    png_set_strip_alpha(png);
    if (png_get_bit_depth(png, info) == 16) png_set_swap(png);
    png_read_update_info(png, info);
    w = png_get_image_width(png, info);
    h = png_get_image_height(png, info);
    depth = png_get_bit_depth(png, info);
    channels = png_get_channels(png, info);
    const png_size_t stride = png_get_rowbytes(png, info);
    buf.resize(stride * h);
    rows.resize(h);
    for (png_uint_32 r = 0; r < h; ++r) rows[r] = buf.data() + r * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    if (channels != 1 && channels != 3) throw IoError("png: unsupported channel layout");
    const double maxval = depth == 16 ? 65535.0 : 255.0;
    Matrix px(h, w);
    for (png_uint_32 r = 0; r < h; ++r)
        for (png_uint_32 c = 0; c < w; ++c) {
            double v[3] = {0.0, 0.0, 0.0};
            for (int ch = 0; ch < channels; ++ch) {
                const std::size_t i = static_cast<std::size_t>(c) * channels + ch;
                v[ch] = depth == 16 ? reinterpret_cast<const std::uint16_t*>(rows[r])[i] : rows[r][i];
            }
            px(r, c) = (channels == 1 ? v[0] : luma(v[0], v[1], v[2])) / maxval;
        }
    return Image(std::move(px));
}

Image decode_image(const std::string& bytes) {
    if (bytes.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) == 0)
        return decode_png(bytes);
    if (bytes.size() >= 2 && bytes[0] == 'P') return decode_pgm(bytes);
    throw IoError("unknown image format");
}

Image load_image(const std::string& path) {
    try {
        return decode_image(read_file(path));
    } catch (const IoError& e) {
        throw IoError(path + ": " + e.what());
    }
}

std::string encode_pgm(const Image& img, int bit_depth) {
    check_depth(bit_depth);
    const int maxval = bit_depth == 8 ? 255 : 65535;
    std::string out = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n" +
                      std::to_string(maxval) + "\n";
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c) {
            const int v = quantize(img(r, c), maxval);
            if (bit_depth == 16) out.push_back(static_cast<char>(v >> 8));
            out.push_back(static_cast<char>(v & 0xff));
        }
    return out;
}

std::string encode_png(const Image& img, int bit_depth) {
    check_depth(bit_depth);
    const int maxval = bit_depth == 8 ? 255 : 65535;
    const int w = img.width(), h = img.height();
    const std::size_t bpp = bit_depth / 8;
    std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h * bpp);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const int v = quantize(img(r, c), maxval);
            const std::size_t i = (static_cast<std::size_t>(r) * w + c) * bpp;
            if (bpp == 2) {
                buf[i] = static_cast<unsigned char>(v >> 8);
                buf[i + 1] = static_cast<unsigned char>(v & 0xff);
            } else {
                buf[i] = static_cast<unsigned char>(v);
            }
        }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_cb, png_warning_cb);
    if (!png) throw IoError("png: out of memory");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png: out of memory");
    }
    std::string out;
    std::vector<png_bytep> rows(h);
    for (int r = 0; r < h; ++r) rows[r] = buf.data() + static_cast<std::size_t>(r) * w * bpp;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png: encode failed");
    }
    png_set_write_fn(png, &out, png_write_cb, png_flush_cb);
    png_set_IHDR(png, info, w, h, bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

void save_image(const std::string& path, const Image& img, int bit_depth) {
    const std::string ext = lower_ext(path);
    if (ext == ".pgm")
        write_file_atomic(path, encode_pgm(img, bit_depth));
    else if (ext == ".png")
        write_file_atomic(path, encode_png(img, bit_depth));
    else
        throw IoError("unsupported image extension '" + ext + "' (use .pgm or .png)");
}

Kernel parse_kernel(const std::string& text, bool normalize) {
    std::istringstream in(text);
    int rows = 0, cols = 0;
    if (!(in >> rows >> cols)) throw IoError("kernel: missing 'L K' header");
    if (rows < 1 || cols < 1) throw IoError("kernel: dimensions must be positive");
    Matrix w(rows, cols);
    std::string tok;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (!(in >> tok)) throw IoError("kernel: truncated data");
            double v = 0.0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || p != tok.data() + tok.size()) throw IoError("kernel: bad value '" + tok + "'");
            w(r, c) = v;
        }
    if (in >> tok) throw IoError("kernel: trailing data");
    if (normalize) {
        const double s = w.sum();
        if (!(s > 0.0)) throw IoError("kernel: cannot normalize, non-positive sum");
        w /= s;
    }
    try {
        return Kernel(std::move(w));
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("kernel: ") + e.what());
    }
}

std::string format_kernel(const Kernel& k) {
    std::string out = std::to_string(k.rows()) + " " + std::to_string(k.cols()) + "\n";
    for (int r = 0; r < k.rows(); ++r) {
        for (int c = 0; c < k.cols(); ++c) {
            if (c) out += ' ';
            out += format_double(k.weights()(r, c));
        }
        out += '\n';
    }
    return out;
}

Kernel load_kernel(const std::string& path, bool normalize) {
    try {
        return parse_kernel(read_file(path), normalize);
    } catch (const IoError& e) {
        throw IoError(path + ": " + e.what());
    }
}

void save_kernel(const std::string& path, const Kernel& k) { write_file_atomic(path, format_kernel(k)); }

void save_kernel_png(const std::string& path, const Kernel& k) {
    const double mx = k.weights().maxCoeff();
    Matrix m = mx > 0.0 ? Matrix(k.weights() / mx) : Matrix(k.weights());
    write_file_atomic(path, encode_png(Image(std::move(m)), 8));
}

std::string format_report(const ExperimentReport& r, const std::string& command) {
    std::string out = "# name=" + r.name() + "\n# seed=" + std::to_string(r.seed()) + "\n";
    for (const auto& [k, v] : r.params()) out += "# " + k + "=" + v + "\n";
    if (!command.empty()) out += "# command=" + command + "\n";
    const auto& cols = r.columns();
    for (std::size_t c = 0; c < cols.size(); ++c) out += (c ? "," : "") + cols[c].first;
    out += '\n';
    for (std::size_t i = 0; i < r.rows(); ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) out += ',';
            out += format_double(cols[c].second[i]);
        }
        out += '\n';
    }
    return out;
}

ExperimentReport parse_report(const std::string& text, std::string* command) {
    std::istringstream in(text);
    std::string line, name;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> params;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw IoError("report: metadata line without '='");
            const std::string k = line.substr(2, eq - 2), v = line.substr(eq + 1);
            if (k == "name")
                name = v;
            else if (k == "seed")
                seed = std::stoull(v);
            else if (k == "command") {
                if (command) *command = v;
            } else
                params.emplace_back(k, v);
            continue;
        }
        std::stringstream hs(line);
        std::string col;
        while (std::getline(hs, col, ',')) header.push_back(col);
        break;
    }
    std::vector<std::vector<double>> data(header.size());
    while (std::getline(in, line)) {
        std::stringstream ls(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(ls, cell, ',')) {
            if (c >= header.size()) throw IoError("report: ragged row");
            double v = 0.0;
            auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || p != cell.data() + cell.size()) throw IoError("report: bad number '" + cell + "'");
            data[c++].push_back(v);
        }
        if (c != header.size()) throw IoError("report: ragged row");
    }
    ExperimentReport r(name, seed);
    for (const auto& [k, v] : params) r.set_param(k, v);
    for (std::size_t c = 0; c < header.size(); ++c) r.add_column(header[c], std::move(data[c]));
    return r;
}

void save_report(const std::string& path, const ExperimentReport& r, const std::string& command) {
    write_file_atomic(path, format_report(r, command));
}

}  // namespace lrd
