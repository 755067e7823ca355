#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcosamp/builder.hpp"
#include "qcosamp/statevec.hpp"

namespace qcosamp {

/// Grayscale raster with intensities in [0, max_value]. Stored row-major:
/// pixel (column w, row g) sits at index w + g * width... columns first to
/// match the |wg> eigenstate convention: index = w * height + g.
struct GrayImage {
    int width = 0;
    int height = 0;
    int max_value = 255;
    std::vector<int> pixels; // size width * height, index w * height + g

    int& at(int w, int g) { return pixels[static_cast<std::size_t>(w) * height + g]; }
    int at(int w, int g) const { return pixels[static_cast<std::size_t>(w) * height + g]; }
    void validate() const;
};

/// Window geometry for the parallel-window pass; shifts default to the
/// window size (non-overlapping steps are not required, only h = shift/2
/// enters the valid-center bounds).
struct WindowSpec {
    int width = 2;
    int height = 2;
    int shift_right = 2;
    int shift_down = 2;
};

/// Intensity-to-angle map theta = pi * I / max_value (range [0, pi], so
/// decoding is single-valued).
double intensity_to_angle(int intensity, int max_value);
int angle_to_intensity(double angle, int max_value);

/// Phase-encoded image: uniform-magnitude state over log2(W)+log2(H) qubits
/// whose |wg> coordinate carries e^{i pi I(w,g)/I_max}. Built by
/// constant-encoding the angle table. Dimensions must be powers of two
/// (pad with zeros first when they are not).
StateVector encode_image(const GrayImage& img);
Circuit encode_image_circuit(const GrayImage& img);
/// Inverse of encode_image (phases quantize back to intensity bins).
GrayImage decode_image(const StateVector& state, int width, int height, int max_value);

/// Pads to the next powers of two with zero intensities.
GrayImage pad_to_pow2(const GrayImage& img);

/// Quantum mean kernel filter: every valid center's phase becomes the mean
/// of its window's phases, applied as one fused diagonal parallel-window
/// pass; centers outside the valid bounds copy through unfiltered.
GrayImage mean_kernel_filter(const GrayImage& img, const WindowSpec& win);

/// The filtered phase state before intensity decoding (angle-domain output).
StateVector mean_kernel_filter_state(const GrayImage& img, const WindowSpec& win);

/// Mean of window angles per valid center, in the angle domain (the
/// classical reference path used for the decode step and by tests).
std::vector<double> window_mean_angles(const GrayImage& img, const WindowSpec& win);

/// Wavelet-like similarity of an image window against a two-dimensional
/// kernel with fixed direct parameters: theta = P(right ancilla = 0) of the
/// comparison circuit, in [0, 1/2]; 0 iff every window pixel phase matches
/// the kernel's mu-rendered phase. center_x/center_y give the window's
/// top-left... anchor such that the window spans [x, x+w) x [y, y+h).
double window_similarity(const GrayImage& img, int center_x, int center_y,
                         const QCoSampSpec& kernel_a, const QCoSampSpec& kernel_b,
                         const WindowSpec& win);

/// Kernel phase table: the 2-D FCoSamp value at the window's grid angles,
/// rendered as an intensity and re-encoded as a phase.
std::vector<double> kernel_phase_table(const QCoSampSpec& kernel_a, const QCoSampSpec& kernel_b,
                                       const WindowSpec& win, int max_value);

/// Plain PGM files, P2 (ASCII) and P5 (binary); max_value from the header.
GrayImage pgm_from_text(const std::string& bytes);
std::string pgm_to_text(const GrayImage& img, bool binary = false);
GrayImage load_pgm(const std::string& path);
void save_pgm(const std::string& path, const GrayImage& img, bool binary = false);

} // namespace qcosamp
