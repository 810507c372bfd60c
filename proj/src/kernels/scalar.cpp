#include "airkit/kernels.hpp"

namespace airkit::kernels {
namespace {

void magnitude_squared_scalar(const double* iq, std::size_t count, double* out) {
    for (std::size_t k = 0; k < count; ++k) {
        const double re = iq[2 * k];
        const double im = iq[2 * k + 1];
        out[k] = re * re + im * im;
    }
}

double sum_scalar(const double* v, std::size_t count) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
        lane[0] += v[i];
        lane[1] += v[i + 1];
        lane[2] += v[i + 2];
        lane[3] += v[i + 3];
    }
    // same association as the 256-bit reduction: (l0 + l2) + (l1 + l3)
    double total = (lane[0] + lane[2]) + (lane[1] + lane[3]);
    for (; i < count; ++i) total += v[i];
    return total;
}

void clipped_level_scalar(const double* inverse, std::size_t count, double level, double* out) {
    for (std::size_t k = 0; k < count; ++k) {
        const double d = level - inverse[k];
        out[k] = d > 0.0 ? d : 0.0;
    }
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{Isa::Scalar, "scalar", &magnitude_squared_scalar, &sum_scalar,
                                   &clipped_level_scalar};
    return table;
}

}  // namespace airkit::kernels
