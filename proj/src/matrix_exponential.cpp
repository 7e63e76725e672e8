#include "cgad/matrix_exponential.hpp"

#include "cgad/errors.hpp"

#include <cmath>

namespace cgad {

Matrix matrix_exponential(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "matrix exponential needs a square matrix");
    }
    const Index n = m.rows();
    const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();

    int squarings = 0;
    if (norm1 > 1.0) squarings = static_cast<int>(std::ceil(std::log2(norm1)));
    const Matrix scaled = m / std::ldexp(1.0, squarings);

    // 30-term Taylor series; truncation error ~1/31! at unit norm.
    Matrix result = Matrix::Identity(n, n);
    Matrix term = Matrix::Identity(n, n);
    for (int k = 1; k <= 30; ++k) {
        term = (term * scaled) / static_cast<double>(k);
        result += term;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

} // namespace cgad
