/**
 * Exact rational arithmetic, small dense linear algebra over the rationals,
 * and the integer-lattice utilities (primes, factorization, Smith reduction)
 * used by the polyhedral and adelic layers.
 */

#ifndef TORIC_RATIONAL_HPP
#define TORIC_RATIONAL_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace toric {

using Rat = boost::multiprecision::mpq_rational;
using Int = boost::multiprecision::mpz_int;

/// Vector in Q^n.
using QVec = std::vector<Rat>;

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Parses "a/b", plain integers, and decimal literals ("0.25") exactly.
inline Rat parse_rat(const std::string& s) {
    if (s.empty()) throw ParseError("empty rational literal");
    std::string t = s;
    auto dot = t.find('.');
    if (dot != std::string::npos) {
        if (t.find('/') != std::string::npos)
            throw ParseError("rational literal mixes '/' and '.': " + s);
        std::string digits = t.substr(0, dot) + t.substr(dot + 1);
        std::size_t frac_len = t.size() - dot - 1;
        if (frac_len == 0) throw ParseError("trailing '.' in rational literal: " + s);
        // Strip leading zeros so GMP does not read the string as octal.
        std::string sign;
        if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
            sign = digits[0] == '-' ? "-" : "";
            digits.erase(0, 1);
        }
        std::size_t first = digits.find_first_not_of('0');
        digits = first == std::string::npos ? "0" : digits.substr(first);
        digits = sign + digits;
        try {
            Int num(digits);
            Int den = 1;
            for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
            return Rat(num, den);
        } catch (const std::exception&) {
            throw ParseError("bad rational literal: " + s);
        }
    }
    try {
        Rat q(t);
        return q;
    } catch (const std::exception&) {
        throw ParseError("bad rational literal: " + s);
    }
}

inline std::string rat_str(const Rat& q) { return q.str(); }

inline double rat_double(const Rat& q) { return q.convert_to<double>(); }

// ---------------------------------------------------------------------------
// Vector helpers
// ---------------------------------------------------------------------------

inline Rat dot(const QVec& a, const QVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    Rat s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline QVec vadd(const QVec& a, const QVec& b) {
    QVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline QVec vsub(const QVec& a, const QVec& b) {
    QVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline QVec vscale(const Rat& c, const QVec& a) {
    QVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

inline bool is_zero(const QVec& a) {
    for (const auto& x : a)
        if (x != 0) return false;
    return true;
}

/// Lexicographic order; used everywhere determinism matters.
inline bool lex_less(const QVec& a, const QVec& b) {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return a.size() < b.size();
}

/// Scales a rational vector to a primitive integer vector (gcd of entries 1).
/// The direction is preserved; the zero vector stays zero.
inline QVec primitive(const QVec& a) {
    Int lcm_den = 1;
    for (const auto& x : a) lcm_den = boost::multiprecision::lcm(lcm_den, Int(denominator(x)));
    Int g = 0;
    std::vector<Int> ints(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ints[i] = Int(numerator(a[i])) * (lcm_den / Int(denominator(a[i])));
        g = boost::multiprecision::gcd(g, ints[i]);
    }
    if (g == 0) return QVec(a.size(), Rat(0));
    QVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = Rat(ints[i] / g);
    return r;
}

/// Primitive form with the first nonzero entry positive (canonical line direction).
inline QVec primitive_signed(const QVec& a) {
    QVec p = primitive(a);
    for (const auto& x : p) {
        if (x < 0) return vscale(Rat(-1), p);
        if (x > 0) break;
    }
    return p;
}

// ---------------------------------------------------------------------------
// Dense exact linear algebra (row-major, sizes are tiny)
// ---------------------------------------------------------------------------

using QMat = std::vector<QVec>;

inline QMat mat_transpose(const QMat& m) {
    if (m.empty()) return {};
    QMat t(m[0].size(), QVec(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
    return t;
}

/// Reduced row echelon form in place; returns the pivot columns.
inline std::vector<std::size_t> rref(QMat& m) {
    std::vector<std::size_t> pivots;
    if (m.empty()) return pivots;
    std::size_t rows = m.size(), cols = m[0].size(), r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && m[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[r], m[piv]);
        Rat inv = Rat(1) / m[r][c];
        for (std::size_t j = c; j < cols; ++j) m[r][j] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rat f = m[i][c];
            for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline std::size_t mat_rank(QMat m) { return rref(m).size(); }

inline Rat mat_det(QMat m) {
    std::size_t n = m.size();
    Rat det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && m[piv][c] == 0) ++piv;
        if (piv == n) return Rat(0);
        if (piv != c) {
            std::swap(m[c], m[piv]);
            det = -det;
        }
        det *= m[c][c];
        Rat inv = Rat(1) / m[c][c];
        for (std::size_t i = c + 1; i < n; ++i) {
            if (m[i][c] == 0) continue;
            Rat f = m[i][c] * inv;
            for (std::size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
        }
    }
    return det;
}

/// Solves A x = b for square nonsingular A; nullopt when singular or inconsistent.
inline std::optional<QVec> solve_linear(QMat a, QVec b) {
    std::size_t rows = a.size();
    if (rows == 0) return QVec{};
    std::size_t cols = a[0].size();
    for (std::size_t i = 0; i < rows; ++i) a[i].push_back(b[i]);
    auto pivots = rref(a);
    // Inconsistent if a pivot lands in the augmented column.
    for (auto c : pivots)
        if (c == cols) return std::nullopt;
    if (pivots.size() < cols) return std::nullopt;  // underdetermined
    QVec x(cols, Rat(0));
    for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = a[i][cols];
    return x;
}

/// Basis of the kernel {x : A x = 0}.
inline std::vector<QVec> nullspace(QMat a) {
    if (a.empty()) return {};
    std::size_t cols = a[0].size();
    auto pivots = rref(a);
    std::vector<bool> is_pivot(cols, false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<QVec> basis;
    for (std::size_t fc = 0; fc < cols; ++fc) {
        if (is_pivot[fc]) continue;
        QVec v(cols, Rat(0));
        v[fc] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -a[i][fc];
        basis.push_back(v);
    }
    return basis;
}

// ---------------------------------------------------------------------------
// Primes and factorization
// ---------------------------------------------------------------------------

inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    // Deterministic Miller-Rabin for 64-bit inputs.
    auto mulmod = [](std::uint64_t a, std::uint64_t b, std::uint64_t m) -> std::uint64_t {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
    };
    auto powmod = [&](std::uint64_t a, std::uint64_t e, std::uint64_t m) {
        std::uint64_t r = 1;
        a %= m;
        while (e) {
            if (e & 1) r = mulmod(r, a, m);
            a = mulmod(a, a, m);
            e >>= 1;
        }
        return r;
    };
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

class FactorError : public std::runtime_error {
public:
    explicit FactorError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Prime factorization of a positive integer by trial division.  Inputs here
/// are coordinates of user data, so a hard size cutoff with a clear error
/// beats silently spinning on a large semiprime.
inline std::map<std::uint64_t, int> factor_u64(Int n) {
    if (n <= 0) throw FactorError("factorization of non-positive integer");
    std::map<std::uint64_t, int> out;
    for (std::uint64_t p = 2; Int(p) * p <= n && p < (1ull << 21); p = (p == 2 ? 3 : p + 2)) {
        while (n % p == 0) {
            out[p]++;
            n /= p;
        }
    }
    if (n > 1) {
        if (n > Int(std::numeric_limits<std::uint64_t>::max()))
            throw FactorError("factor too large: " + n.str());
        std::uint64_t rem = n.convert_to<std::uint64_t>();
        if (!is_prime_u64(rem))
            throw FactorError("cofactor " + std::to_string(rem) + " is composite and exceeds the trial-division bound");
        out[rem]++;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Integer lattices
// ---------------------------------------------------------------------------

/// Smith-style reduction of an integer matrix A (rows spanning a sublattice of
/// Z^n).  Returns (rank k, W) with W unimodular such that the saturation of the
/// row lattice of A is spanned by the first k rows of W.
inline std::pair<std::size_t, std::vector<std::vector<Int>>> row_lattice_saturation(
    std::vector<std::vector<Int>> d) {
    std::size_t rows = d.size();
    std::size_t cols = rows ? d[0].size() : 0;
    std::vector<std::vector<Int>> w(cols, std::vector<Int>(cols, 0));
    for (std::size_t i = 0; i < cols; ++i) w[i][i] = 1;
    // Invariant: row_lattice(A) = row_lattice(D * W) throughout; column
    // operations on D are mirrored as inverse row operations on W.
    std::size_t t = 0;
    for (std::size_t it = 0; it < std::min(rows, cols); ++it) {
        // Find a nonzero pivot in the remaining block.
        std::size_t pi = rows, pj = cols;
        for (std::size_t i = t; i < rows && pi == rows; ++i)
            for (std::size_t j = t; j < cols; ++j)
                if (d[i][j] != 0) {
                    pi = i;
                    pj = j;
                    break;
                }
        if (pi == rows) break;
        std::swap(d[t], d[pi]);
        if (pj != t) {
            for (std::size_t i = 0; i < rows; ++i) std::swap(d[i][t], d[i][pj]);
            std::swap(w[t], w[pj]);
        }
        bool again = true;
        while (again) {
            again = false;
            // Clear column t below the pivot with euclidean steps.
            for (std::size_t i = t + 1; i < rows; ++i) {
                while (d[i][t] != 0) {
                    if (boost::multiprecision::abs(d[i][t]) < boost::multiprecision::abs(d[t][t])) {
                        std::swap(d[t], d[i]);
                    }
                    Int q = d[i][t] / d[t][t];
                    for (std::size_t j = 0; j < cols; ++j) d[i][j] -= q * d[t][j];
                }
            }
            // Clear row t to the right of the pivot.
            for (std::size_t j = t + 1; j < cols; ++j) {
                while (d[t][j] != 0) {
                    if (boost::multiprecision::abs(d[t][j]) < boost::multiprecision::abs(d[t][t])) {
                        for (std::size_t i = 0; i < rows; ++i) std::swap(d[i][t], d[i][j]);
                        std::swap(w[t], w[j]);
                        again = true;  // column swap may have dirtied the column
                    }
                    Int q = d[t][j] / d[t][t];
                    for (std::size_t i = 0; i < rows; ++i) d[i][j] -= q * d[i][t];
                    for (std::size_t k = 0; k < cols; ++k) w[t][k] += q * w[j][k];
                }
            }
            for (std::size_t i = t + 1; i < rows; ++i)
                if (d[i][t] != 0) again = true;
        }
        ++t;
    }
    return {t, w};
}

}  // namespace toric

#endif  // TORIC_RATIONAL_HPP
