#include "padmm/lattice.hpp"

#include <utility>

namespace padmm {

Int dot(const IntVec& a, const IntVec& b) {
    Int s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

IntMat integer_kernel(const IntMat& A, std::size_t ncols) {
    IntMat M = A;  // rows of A, transformed by column operations
    IntMat U(ncols, IntVec(ncols, 0));
    for (std::size_t i = 0; i < ncols; ++i) U[i][i] = 1;
    auto colop = [&](std::size_t a, std::size_t b, const Int& x, const Int& y, const Int& z, const Int& w) {
        // (col a, col b) <- (x*a + y*b, z*a + w*b)
        auto apply = [&](IntVec& row) {
            const Int ra = row[a], rb = row[b];
            row[a] = x * ra + y * rb;
            row[b] = z * ra + w * rb;
        };
        for (auto& row : M) apply(row);
        for (auto& row : U) apply(row);
    };
    std::size_t c = 0;
    for (std::size_t r = 0; r < M.size() && c < ncols; ++r) {
        for (std::size_t j = c + 1; j < ncols; ++j) {
            if (M[r][j] == 0) continue;
            if (M[r][c] == 0) {
                colop(c, j, 0, 1, 1, 0);
                continue;
            }
            Int g, s, t;
            mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), M[r][c].get_mpz_t(), M[r][j].get_mpz_t());
            const Int a = M[r][c] / g, b = M[r][j] / g;
            // Unimodular: det [[s, -b], [t, a]] = s a + t b = 1.
            colop(c, j, s, t, -b, a);
        }
        if (M[r][c] != 0) ++c;
    }
    IntMat ker;
    for (std::size_t j = c; j < ncols; ++j) {
        IntVec v(ncols);
        for (std::size_t i = 0; i < ncols; ++i) v[i] = U[i][j];
        ker.push_back(std::move(v));
    }
    return ker;
}

IntMat hermite_basis(IntMat rows) {
    if (rows.empty()) return rows;
    const std::size_t n = rows[0].size();
    std::size_t r = 0;
    std::vector<std::size_t> pivots;
    for (std::size_t c = 0; c < n && r < rows.size(); ++c) {
        for (std::size_t i = r + 1; i < rows.size(); ++i) {
            while (rows[i][c] != 0) {
                if (rows[r][c] == 0) {
                    std::swap(rows[r], rows[i]);
                    continue;
                }
                const Int q = rows[i][c] / rows[r][c];
                for (std::size_t k = 0; k < n; ++k) rows[i][k] -= q * rows[r][k];
                if (rows[i][c] != 0) std::swap(rows[r], rows[i]);
            }
        }
        if (rows[r][c] == 0) continue;
        if (rows[r][c] < 0)
            for (auto& x : rows[r]) x = -x;
        pivots.push_back(c);
        ++r;
    }
    rows.resize(r);
    for (std::size_t i = 0; i < r; ++i) {
        const std::size_t c = pivots[i];
        for (std::size_t j = 0; j < i; ++j) {
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), rows[j][c].get_mpz_t(), rows[i][c].get_mpz_t());
            for (std::size_t k = 0; k < n; ++k) rows[j][k] -= q * rows[i][k];
        }
    }
    return rows;
}

bool in_lattice(const IntMat& H, IntVec v) {
    for (const auto& row : H) {
        std::size_t c = 0;
        while (c < row.size() && row[c] == 0) ++c;
        if (c == row.size()) continue;
        for (std::size_t k = 0; k < c; ++k)
            if (v[k] != 0) return false;
        if (v[c] % row[c] != 0) return false;
        const Int q = v[c] / row[c];
        for (std::size_t k = 0; k < v.size(); ++k) v[k] -= q * row[k];
    }
    for (const auto& x : v)
        if (x != 0) return false;
    return true;
}

IntMat lll_reduce(IntMat b) {
    const std::size_t k = b.size();
    if (k == 0) return b;
    using Q = mpq_class;
    auto gram_schmidt = [&](std::vector<std::vector<Q>>& mu, std::vector<Q>& B) {
        std::vector<std::vector<Q>> bs(k);
        mu.assign(k, std::vector<Q>(k, 0));
        B.assign(k, 0);
        for (std::size_t i = 0; i < k; ++i) {
            bs[i].assign(b[i].begin(), b[i].end());
            for (std::size_t j = 0; j < i; ++j) {
                Q d = 0;
                for (std::size_t t = 0; t < b[i].size(); ++t) d += Q(b[i][t]) * bs[j][t];
                mu[i][j] = d / B[j];
                for (std::size_t t = 0; t < b[i].size(); ++t) bs[i][t] -= mu[i][j] * bs[j][t];
            }
            for (const auto& x : bs[i]) B[i] += x * x;
            require(B[i] != 0, ErrorCode::invalid_argument, "LLL needs linearly independent rows");
        }
    };
    std::vector<std::vector<Q>> mu;
    std::vector<Q> B;
    gram_schmidt(mu, B);
    std::size_t i = 1;
    while (i < k) {
        for (std::size_t j = i; j-- > 0;) {
            const Q& m = mu[i][j];
            if (m > Q(1, 2) || m < Q(-1, 2)) {
                Int q;
                Q h = m + Q(1, 2);
                mpz_fdiv_q(q.get_mpz_t(), h.get_num_mpz_t(), h.get_den_mpz_t());
                for (std::size_t t = 0; t < b[i].size(); ++t) b[i][t] -= q * b[j][t];
                gram_schmidt(mu, B);
            }
        }
        if (B[i] >= (Q(3, 4) - mu[i][i - 1] * mu[i][i - 1]) * B[i - 1]) {
            ++i;
        } else {
            std::swap(b[i], b[i - 1]);
            gram_schmidt(mu, B);
            i = i > 1 ? i - 1 : 1;
        }
    }
    return b;
}

}  // namespace padmm
