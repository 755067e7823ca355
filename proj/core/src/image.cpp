#include "qcosamp/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qcosamp/applications.hpp"
#include "qcosamp/circuit.hpp"
#include "qcosamp/errors.hpp"

namespace qcosamp {

namespace {

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

int log2i(int v) {
    int b = 0;
    while ((1 << b) < v) ++b;
    return b;
}

} // namespace

void GrayImage::validate() const {
    if (width < 1 || height < 1) throw SchemaError("image must have positive dimensions");
    if (max_value < 1 || max_value > 65535) throw SchemaError("max_value must be in [1, 65535]");
    if (pixels.size() != static_cast<std::size_t>(width) * height) {
        throw SchemaError("pixel array does not match the image dimensions");
    }
    for (int p : pixels) {
        if (p < 0 || p > max_value) throw SchemaError("pixel intensity out of range");
    }
}

double intensity_to_angle(int intensity, int max_value) {
    return kPi * static_cast<double>(intensity) / static_cast<double>(max_value);
}

int angle_to_intensity(double angle, int max_value) {
    const int v = static_cast<int>(std::lround(angle * max_value / kPi));
    return std::clamp(v, 0, max_value);
}

GrayImage pad_to_pow2(const GrayImage& img) {
    img.validate();
    GrayImage out;
    out.width = 1;
    while (out.width < img.width) out.width <<= 1;
    out.height = 1;
    while (out.height < img.height) out.height <<= 1;
    out.max_value = img.max_value;
    out.pixels.assign(static_cast<std::size_t>(out.width) * out.height, 0);
    for (int w = 0; w < img.width; ++w) {
        for (int g = 0; g < img.height; ++g) out.at(w, g) = img.at(w, g);
    }
    return out;
}

Circuit encode_image_circuit(const GrayImage& img) {
    img.validate();
    if (!is_pow2(img.width) || !is_pow2(img.height)) {
        throw SchemaError("image dimensions must be powers of two (pad_to_pow2 first)");
    }
    std::vector<double> angles(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        angles[i] = intensity_to_angle(img.pixels[i], img.max_value);
    }
    return constant_encode(angles, log2i(img.width) + log2i(img.height));
}

StateVector encode_image(const GrayImage& img) {
    return encode_image_circuit(img).run_from_zero();
}

GrayImage decode_image(const StateVector& state, int width, int height, int max_value) {
    if (!is_pow2(width) || !is_pow2(height) ||
        state.dim() != static_cast<std::uint64_t>(width) * height) {
        throw SchemaError("state dimension does not match the image dimensions");
    }
    const double want = 1.0 / std::sqrt(static_cast<double>(state.dim()));
    GrayImage out;
    out.width = width;
    out.height = height;
    out.max_value = max_value;
    out.pixels.resize(state.dim());
    for (std::uint64_t i = 0; i < state.dim(); ++i) {
        if (std::abs(std::abs(state.amp(i)) - want) > kTolStructural) {
            throw NumericError("phase-image coordinate " + std::to_string(i) +
                               " lost its uniform magnitude");
        }
        out.pixels[i] = angle_to_intensity(std::arg(state.amp(i)), max_value);
    }
    return out;
}

std::vector<double> window_mean_angles(const GrayImage& img, const WindowSpec& win) {
    img.validate();
    if (win.width < 1 || win.height < 1 || win.width > img.width || win.height > img.height) {
        throw SchemaError("window does not fit in the image");
    }
    if (win.shift_right < 1 || win.shift_down < 1) {
        throw SchemaError("window shifts must be >= 1");
    }
    std::vector<double> means(img.pixels.size(), -1.0); // -1 marks copy-through
    const int hr = std::max(1, win.width / 2);
    const int hd = std::max(1, win.height / 2);
    for (int x = hr; x + (win.width - hr) <= img.width; ++x) {
        for (int y = hd; y + (win.height - hd) <= img.height; ++y) {
            double acc = 0.0;
            for (int i = 0; i < win.width; ++i) {
                for (int j = 0; j < win.height; ++j) {
                    acc += intensity_to_angle(img.at(x - hr + i, y - hd + j), img.max_value);
                }
            }
            means[static_cast<std::size_t>(x) * img.height + y] =
                acc / static_cast<double>(win.width * win.height);
        }
    }
    return means;
}

StateVector mean_kernel_filter_state(const GrayImage& img, const WindowSpec& win) {
    if (!is_pow2(img.width) || !is_pow2(img.height)) {
        throw SchemaError("filtering needs power-of-two dimensions (pad_to_pow2 first)");
    }
    const std::vector<double> means = window_mean_angles(img, win);

    // One fused diagonal pass: every valid center's coordinate is rotated
    // from its own phase to the window mean; all centers commute.
    StateVector state = encode_image(img);
    const int qubits = log2i(img.width) + log2i(img.height);
    for (std::uint64_t c = 0; c < means.size(); ++c) {
        if (means[c] < 0.0) continue;
        const double theta = intensity_to_angle(img.pixels[c], img.max_value);
        const Circuit rot =
            twice_permuted_controlled(qubits, {c}, {std::polar(1.0, means[c] - theta)});
        state = rot.run(std::move(state));
    }
    state.check_normalized(kTolComposed);
    return state;
}

GrayImage mean_kernel_filter(const GrayImage& img, const WindowSpec& win) {
    return decode_image(mean_kernel_filter_state(img, win), img.width, img.height,
                        img.max_value);
}

std::vector<double> kernel_phase_table(const QCoSampSpec& kernel_a, const QCoSampSpec& kernel_b,
                                       const WindowSpec& win, int max_value) {
    std::vector<double> table(static_cast<std::size_t>(win.width) * win.height);
    for (int i = 0; i < win.width; ++i) {
        const double x1 = -kPi + 2.0 * kPi * static_cast<double>(i) / win.width;
        for (int j = 0; j < win.height; ++j) {
            const double x2 = -kPi + 2.0 * kPi * static_cast<double>(j) / win.height;
            const double mu2 = closed_form_mu(kernel_a, x1) * closed_form_mu(kernel_b, x2);
            // Render through the intensity quantization so a self-rendered
            // window matches exactly.
            const int intensity = angle_to_intensity(mu2 * kPi, max_value);
            table[static_cast<std::size_t>(i) * win.height + j] =
                intensity_to_angle(intensity, max_value);
        }
    }
    return table;
}

double window_similarity(const GrayImage& img, int center_x, int center_y,
                         const QCoSampSpec& kernel_a, const QCoSampSpec& kernel_b,
                         const WindowSpec& win) {
    img.validate();
    if (!is_pow2(win.width) || !is_pow2(win.height)) {
        throw SchemaError("similarity windows need power-of-two dimensions");
    }
    if (center_x < 0 || center_y < 0 || center_x + win.width > img.width ||
        center_y + win.height > img.height) {
        throw SchemaError("window out of bounds");
    }
    std::vector<double> window_phases(static_cast<std::size_t>(win.width) * win.height);
    for (int i = 0; i < win.width; ++i) {
        for (int j = 0; j < win.height; ++j) {
            window_phases[static_cast<std::size_t>(i) * win.height + j] =
                intensity_to_angle(img.at(center_x + i, center_y + j), img.max_value);
        }
    }
    const std::vector<double> kernel_phases =
        kernel_phase_table(kernel_a, kernel_b, win, img.max_value);
    return 1.0 - compare_phase_states(window_phases, kernel_phases);
}

// ---------------------------------------------------------------------------
// PGM
// ---------------------------------------------------------------------------

namespace {

int next_pgm_token(std::istream& in) {
    // Skips whitespace and # comments.
    while (true) {
        const int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int value = 0;
    if (!(in >> value)) throw SchemaError("truncated PGM header");
    return value;
}

} // namespace

GrayImage pgm_from_text(const std::string& bytes) {
    std::istringstream in(bytes, std::ios::binary);
    std::string magic;
    in >> magic;
    if (magic != "P2" && magic != "P5") throw SchemaError("PGM magic must be P2 or P5");
    GrayImage img;
    img.width = next_pgm_token(in);
    img.height = next_pgm_token(in);
    img.max_value = next_pgm_token(in);
    img.pixels.assign(static_cast<std::size_t>(img.width) * img.height, 0);
    if (magic == "P2") {
        for (int g = 0; g < img.height; ++g) {
            for (int w = 0; w < img.width; ++w) img.at(w, g) = next_pgm_token(in);
        }
    } else {
        if (img.max_value > 255) throw SchemaError("binary PGM supports max_value <= 255 here");
        in.get(); // single whitespace after maxval
        for (int g = 0; g < img.height; ++g) {
            for (int w = 0; w < img.width; ++w) {
                const int c = in.get();
                if (c == EOF) throw SchemaError("truncated PGM raster");
                img.at(w, g) = c;
            }
        }
    }
    img.validate();
    return img;
}

std::string pgm_to_text(const GrayImage& img, bool binary) {
    img.validate();
    std::ostringstream out(std::ios::binary);
    if (binary) {
        if (img.max_value > 255) throw SchemaError("binary PGM supports max_value <= 255 here");
        out << "P5\n" << img.width << ' ' << img.height << '\n' << img.max_value << '\n';
        for (int g = 0; g < img.height; ++g) {
            for (int w = 0; w < img.width; ++w) out.put(static_cast<char>(img.at(w, g)));
        }
    } else {
        out << "P2\n" << img.width << ' ' << img.height << '\n' << img.max_value << '\n';
        for (int g = 0; g < img.height; ++g) {
            for (int w = 0; w < img.width; ++w) {
                out << img.at(w, g) << (w + 1 == img.width ? '\n' : ' ');
            }
        }
    }
    return out.str();
}

GrayImage load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open image file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return pgm_from_text(buf.str());
}

void save_pgm(const std::string& path, const GrayImage& img, bool binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write image file " + path);
    out << pgm_to_text(img, binary);
}

} // namespace qcosamp
