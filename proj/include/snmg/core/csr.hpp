#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "snmg/core/index_set.hpp"
#include "snmg/core/vector.hpp"

namespace snmg {

// Values with |v| below this are treated as explicit zeros and never stored.
constexpr double kDropTol = 1e-300;

struct Triplet {
    int row;
    int col;
    double value;
};

// Compressed sparse row matrix. Column indices are sorted and unique within
// each row; explicit zeros are not stored. Immutable after construction by
// convention: kernels take it by const reference and return new matrices.
struct CsrMatrix {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<int> row_ptr;   // length n_rows + 1
    std::vector<int> col_idx;   // length nnz
    std::vector<double> values; // length nnz

    int nnz() const { return static_cast<int>(col_idx.size()); }

    void validate() const
    {
        if (n_rows < 0 || n_cols < 0)
            throw std::invalid_argument("CsrMatrix: negative dimension");
        if (row_ptr.size() != static_cast<std::size_t>(n_rows) + 1)
            throw std::invalid_argument("CsrMatrix: row_ptr has wrong length");
        if (row_ptr.front() != 0)
            throw std::invalid_argument("CsrMatrix: row_ptr[0] must be 0");
        if (col_idx.size() != values.size())
            throw std::invalid_argument("CsrMatrix: col_idx/values length mismatch");
        if (row_ptr.back() != nnz())
            throw std::invalid_argument("CsrMatrix: row_ptr back must equal nnz");
        for (int i = 0; i < n_rows; ++i) {
            if (row_ptr[i + 1] < row_ptr[i])
                throw std::invalid_argument("CsrMatrix: row_ptr must be nondecreasing");
            for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
                if (col_idx[p] < 0 || col_idx[p] >= n_cols)
                    throw std::invalid_argument("CsrMatrix: column index out of range");
                if (p > row_ptr[i] && col_idx[p] <= col_idx[p - 1])
                    throw std::invalid_argument("CsrMatrix: columns must be sorted and unique per row");
            }
        }
    }
};

// Assemble from triplets; duplicate (row, col) entries are summed, near-zero
// results dropped.
inline CsrMatrix from_triplets(int n_rows, int n_cols, std::vector<Triplet> t)
{
    for (const Triplet& e : t) {
        if (e.row < 0 || e.row >= n_rows || e.col < 0 || e.col >= n_cols)
            throw std::invalid_argument("from_triplets: entry out of range");
    }
    std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
        return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });

    CsrMatrix m;
    m.n_rows = n_rows;
    m.n_cols = n_cols;
    m.row_ptr.assign(n_rows + 1, 0);
    std::size_t i = 0;
    while (i < t.size()) {
        const int r = t[i].row;
        const int c = t[i].col;
        double v = 0.0;
        while (i < t.size() && t[i].row == r && t[i].col == c)
            v += t[i++].value;
        if (std::abs(v) >= kDropTol) {
            m.col_idx.push_back(c);
            m.values.push_back(v);
            m.row_ptr[r + 1]++;
        }
    }
    for (int r = 0; r < n_rows; ++r)
        m.row_ptr[r + 1] += m.row_ptr[r];
    return m;
}

inline CsrMatrix csr_identity(int n)
{
    CsrMatrix m;
    m.n_rows = m.n_cols = n;
    m.row_ptr.resize(n + 1);
    m.col_idx.resize(n);
    m.values.assign(n, 1.0);
    for (int i = 0; i <= n; ++i)
        m.row_ptr[i] = i;
    for (int i = 0; i < n; ++i)
        m.col_idx[i] = i;
    return m;
}

inline Vector spmv(const CsrMatrix& a, const Vector& x)
{
    if (x.size() != static_cast<std::size_t>(a.n_cols))
        throw std::invalid_argument("spmv: dimension mismatch");
    Vector y(a.n_rows, 0.0);
    for (int i = 0; i < a.n_rows; ++i) {
        double s = 0.0;
        for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
            s += a.values[p] * x[a.col_idx[p]];
        y[i] = s;
    }
    return y;
}

inline CsrMatrix transpose(const CsrMatrix& a)
{
    CsrMatrix t;
    t.n_rows = a.n_cols;
    t.n_cols = a.n_rows;
    t.row_ptr.assign(a.n_cols + 1, 0);
    for (int p = 0; p < a.nnz(); ++p)
        t.row_ptr[a.col_idx[p] + 1]++;
    for (int j = 0; j < a.n_cols; ++j)
        t.row_ptr[j + 1] += t.row_ptr[j];
    t.col_idx.resize(a.nnz());
    t.values.resize(a.nnz());
    std::vector<int> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (int i = 0; i < a.n_rows; ++i) {
        for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
            const int q = next[a.col_idx[p]]++;
            t.col_idx[q] = i;       // rows of a arrive in order, so cols stay sorted
            t.values[q] = a.values[p];
        }
    }
    return t;
}

// Sparse a*b with a dense accumulator per row; output columns sorted.
inline CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b)
{
    if (a.n_cols != b.n_rows)
        throw std::invalid_argument("multiply: dimension mismatch");
    CsrMatrix c;
    c.n_rows = a.n_rows;
    c.n_cols = b.n_cols;
    c.row_ptr.assign(a.n_rows + 1, 0);

    std::vector<double> acc(b.n_cols, 0.0);
    std::vector<int> mark(b.n_cols, -1);
    std::vector<int> touched;
    touched.reserve(64);
    for (int i = 0; i < a.n_rows; ++i) {
        touched.clear();
        for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
            const int k = a.col_idx[p];
            const double av = a.values[p];
            for (int q = b.row_ptr[k]; q < b.row_ptr[k + 1]; ++q) {
                const int j = b.col_idx[q];
                if (mark[j] != i) {
                    mark[j] = i;
                    acc[j] = 0.0;
                    touched.push_back(j);
                }
                acc[j] += av * b.values[q];
            }
        }
        std::sort(touched.begin(), touched.end());
        for (int j : touched) {
            if (std::abs(acc[j]) >= kDropTol) {
                c.col_idx.push_back(j);
                c.values.push_back(acc[j]);
                c.row_ptr[i + 1]++;
            }
        }
    }
    for (int r = 0; r < a.n_rows; ++r)
        c.row_ptr[r + 1] += c.row_ptr[r];
    return c;
}

// Galerkin triple product interp^T * p * interp, formed in two stages with
// sorted merges. p must be square with as many rows as interp.
inline CsrMatrix triple_product(const CsrMatrix& interp, const CsrMatrix& p)
{
    if (p.n_rows != p.n_cols)
        throw std::invalid_argument("triple_product: p must be square");
    if (p.n_cols != interp.n_rows)
        throw std::invalid_argument("triple_product: dimension mismatch");
    CsrMatrix pi = multiply(p, interp);
    return multiply(transpose(interp), pi);
}

// Principal submatrix on the index set s (same rows and columns).
inline CsrMatrix extract_submatrix(const CsrMatrix& a, const IndexSet& s)
{
    if (a.n_rows != a.n_cols)
        throw std::invalid_argument("extract_submatrix: matrix must be square");
    if (!s.idx.empty() && s.idx.back() >= a.n_rows)
        throw std::invalid_argument("extract_submatrix: index out of range");
    std::vector<int> local(a.n_cols, -1);
    for (std::size_t p = 0; p < s.idx.size(); ++p)
        local[s.idx[p]] = static_cast<int>(p);

    CsrMatrix m;
    m.n_rows = m.n_cols = s.size();
    m.row_ptr.assign(s.size() + 1, 0);
    for (int r = 0; r < s.size(); ++r) {
        const int gi = s.idx[r];
        for (int p = a.row_ptr[gi]; p < a.row_ptr[gi + 1]; ++p) {
            const int lj = local[a.col_idx[p]];
            if (lj >= 0) {
                m.col_idx.push_back(lj); // cols of a sorted => local cols sorted
                m.values.push_back(a.values[p]);
                m.row_ptr[r + 1]++;
            }
        }
    }
    for (int r = 0; r < s.size(); ++r)
        m.row_ptr[r + 1] += m.row_ptr[r];
    return m;
}

inline void write_matrix_market(const CsrMatrix& a, std::ostream& os)
{
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << a.n_rows << " " << a.n_cols << " " << a.nnz() << "\n";
    char buf[64];
    for (int i = 0; i < a.n_rows; ++i) {
        for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
            std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", i + 1, a.col_idx[p] + 1, a.values[p]);
            os << buf;
        }
    }
}

inline void write_matrix_market(const CsrMatrix& a, const std::string& path)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("write_matrix_market: cannot open " + path);
    write_matrix_market(a, f);
}

inline CsrMatrix read_matrix_market(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line.rfind("%%MatrixMarket matrix coordinate real general", 0) != 0)
        throw std::runtime_error("read_matrix_market: unsupported or missing header");
    while (std::getline(is, line)) {
        if (!line.empty() && line[0] != '%')
            break;
    }
    std::istringstream dims(line);
    int nr = -1, nc = -1, nz = -1;
    dims >> nr >> nc >> nz;
    if (nr < 0 || nc < 0 || nz < 0)
        throw std::runtime_error("read_matrix_market: bad size line");
    std::vector<Triplet> t;
    t.reserve(nz);
    for (int k = 0; k < nz; ++k) {
        int i, j;
        double v;
        if (!(is >> i >> j >> v))
            throw std::runtime_error("read_matrix_market: truncated entry list");
        t.push_back({i - 1, j - 1, v});
    }
    return from_triplets(nr, nc, std::move(t));
}

inline CsrMatrix read_matrix_market(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("read_matrix_market: cannot open " + path);
    return read_matrix_market(f);
}

} // namespace snmg
