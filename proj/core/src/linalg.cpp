#include "cpdcert/linalg.hpp"

namespace cpdcert {

std::optional<std::vector<Rat>> solve_consistent(const Matrix<Rat>& a, const std::vector<Rat>& b) {
    if (a.rows() != static_cast<int>(b.size()))
        throw domain_error("solve_consistent: dimension mismatch");
    const int rows = a.rows(), cols = a.cols();
    // Rational Gauss-Jordan on the augmented system.
    Matrix<Rat> m(rows, cols + 1);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = a(i, j);
        m(i, cols) = b[static_cast<std::size_t>(i)];
    }
    std::vector<int> pivot_of_row;
    int row = 0;
    for (int col = 0; col < cols && row < rows; ++col) {
        int pr = -1;
        for (int i = row; i < rows; ++i)
            if (!(m(i, col) == Rat(0))) { pr = i; break; }
        if (pr < 0) continue;
        if (pr != row)
            for (int j = 0; j <= cols; ++j) std::swap(m(row, j), m(pr, j));
        const Rat inv = Rat(1) / m(row, col);
        for (int j = col; j <= cols; ++j) m(row, j) *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == row || m(i, col) == Rat(0)) continue;
            const Rat f = m(i, col);
            for (int j = col; j <= cols; ++j) m(i, j) -= f * m(row, j);
        }
        pivot_of_row.push_back(col);
        ++row;
    }
    for (int i = row; i < rows; ++i)
        if (!(m(i, cols) == Rat(0))) return std::nullopt; // inconsistent
    std::vector<Rat> x(static_cast<std::size_t>(cols), Rat(0));
    for (int t = 0; t < row; ++t)
        x[static_cast<std::size_t>(pivot_of_row[static_cast<std::size_t>(t)])] = m(t, cols);
    return x;
}

std::optional<std::vector<double>> solve_consistent(const Matrix<double>& a,
                                                    const std::vector<double>& b,
                                                    const NumericOptions& opts) {
    if (a.rows() != static_cast<int>(b.size()))
        throw domain_error("solve_consistent: dimension mismatch");
    Eigen::MatrixXd em(a.rows(), a.cols());
    Eigen::VectorXd eb(a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        eb(i) = b[static_cast<std::size_t>(i)];
        for (int j = 0; j < a.cols(); ++j) em(i, j) = a(i, j);
    }
    Eigen::VectorXd x = em.completeOrthogonalDecomposition().solve(eb);
    const double resid = (em * x - eb).lpNorm<Eigen::Infinity>();
    const double scale = std::max(1.0, eb.lpNorm<Eigen::Infinity>());
    if (resid > opts.tolerance * scale * std::max(a.rows(), a.cols())) return std::nullopt;
    std::vector<double> out(static_cast<std::size_t>(a.cols()));
    for (int j = 0; j < a.cols(); ++j) out[static_cast<std::size_t>(j)] = x(j);
    return out;
}

} // namespace cpdcert
