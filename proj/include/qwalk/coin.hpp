#pragma once

/*
 * Coin operators for the N-dimensional coined walk.
 *
 * Coin space dimension is 2N with basis order |1+>,|1->,...,|N+>,|N->:
 * axis a (0-based) and direction eta=+-1 map to index 2a + (eta<0).
 * The momentum-space coin multiplies row (a,eta) by exp(-i eta k_a).
 */

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qwalk/errors.hpp"

namespace qwalk {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using KPoint = Eigen::VectorXd;

constexpr double kUnitarityTol = 1e-12;

inline int coin_index(int axis, int eta) { return 2 * axis + (eta < 0 ? 1 : 0); }
inline int coin_axis(int idx) { return idx / 2; }
inline int coin_eta(int idx) { return idx % 2 == 0 ? +1 : -1; }

inline double unitarity_residual(const Matrix& m) {
    return (m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

class CoinMatrix {
public:
    CoinMatrix(int dim_n, Matrix entries, std::string id = "custom")
        : dim_n_(dim_n), m_(std::move(entries)), id_(std::move(id)) {
        if (dim_n_ < 1) throw ContractError("invalid-dimension: coin dimension must be >= 1");
        if (m_.rows() != 2 * dim_n_ || m_.cols() != 2 * dim_n_)
            throw ContractError("coin matrix must be square with side 2N");
        const double r = unitarity_residual(m_);
        if (r > kUnitarityTol)
            throw ContractError("coin matrix not unitary (residual " + std::to_string(r) + ")");
    }

    int dim_n() const { return dim_n_; }
    int size() const { return 2 * dim_n_; }
    const Matrix& entries() const { return m_; }
    const std::string& id() const { return id_; }

private:
    int dim_n_;
    Matrix m_;
    std::string id_;
};

struct MomentumCoin {
    KPoint k;
    Matrix entries;
};

// Grover coin: C^{a,eta}_{a',eta'} = 1/N - delta_{a,a'} delta_{eta,eta'}.
inline CoinMatrix grover_coin(int n) {
    if (n < 1) throw ContractError("invalid-dimension: grover_coin requires n >= 1");
    Matrix m = Matrix::Constant(2 * n, 2 * n, cxd(1.0 / n, 0.0));
    m.diagonal().array() -= cxd(1.0, 0.0);
    return CoinMatrix(n, std::move(m), "grover");
}

// 2N-point discrete Fourier coin, entry (a,b) = exp(-2*pi*i*a*b/(2N)) / sqrt(2N).
inline CoinMatrix dft_coin(int n) {
    if (n < 1) throw ContractError("invalid-dimension: dft_coin requires n >= 1");
    const int d = 2 * n;
    Matrix m(d, d);
    const double norm = 1.0 / std::sqrt(double(d));
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            m(a, b) = std::polar(norm, -2.0 * M_PI * a * b / d);
    return CoinMatrix(n, std::move(m), "dft");
}

inline Matrix momentum_coin_entries(const CoinMatrix& c, const KPoint& k) {
    if (k.size() != c.dim_n())
        throw ContractError("invalid-argument: k has wrong length for this coin");
    Matrix m = c.entries();
    for (int row = 0; row < m.rows(); ++row)
        m.row(row) *= std::polar(1.0, -double(coin_eta(row)) * k[coin_axis(row)]);
    return m;
}

inline MomentumCoin momentum_coin(const CoinMatrix& c, const KPoint& k) {
    return {k, momentum_coin_entries(c, k)};
}

// Loads a 2N x 2N complex matrix from CSV rows "re,im,re,im,...".
inline CoinMatrix load_coin_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open coin file: " + path);
    std::vector<std::vector<cxd>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<cxd> row;
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
        if (vals.size() % 2 != 0)
            throw ConfigError("coin file row has odd number of values: " + path);
        for (size_t i = 0; i < vals.size(); i += 2) row.emplace_back(vals[i], vals[i + 1]);
        rows.push_back(std::move(row));
    }
    const size_t d = rows.size();
    if (d == 0 || d % 2 != 0)
        throw ConfigError("coin file must have an even, positive number of rows: " + path);
    Matrix m(d, d);
    for (size_t i = 0; i < d; ++i) {
        if (rows[i].size() != d)
            throw ConfigError("coin file is not square: " + path);
        for (size_t j = 0; j < d; ++j) m(i, j) = rows[i][j];
    }
    return CoinMatrix(int(d / 2), std::move(m), "file:" + path);
}

// Resolves a coin id: "grover", "dft", or "file:<path>".
inline CoinMatrix coin_by_id(const std::string& id, int dim_n) {
    if (id == "grover") return grover_coin(dim_n);
    if (id == "dft") return dft_coin(dim_n);
    if (id.rfind("file:", 0) == 0) {
        CoinMatrix c = load_coin_csv(id.substr(5));
        if (c.dim_n() != dim_n)
            throw ConfigError("coin file dimension mismatch: expected N=" + std::to_string(dim_n));
        return c;
    }
    throw ConfigError("unknown coin id '" + id + "' (available: grover, dft, file:<path>)");
}

}  // namespace qwalk
