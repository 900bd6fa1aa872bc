/**
 * Exact values of the form q0 + sum_p q_p * log(p) with rational coefficients
 * and prime p.  Equality and the zero test are coefficient-wise (the numbers
 * 1, log 2, log 3, ... are linearly independent over Q), so max/min decisions
 * never depend on floating point.  Sign of a nonzero value is determined by
 * interval evaluation at doubling MPFR precision.
 */

#ifndef TORIC_LOGVALUE_HPP
#define TORIC_LOGVALUE_HPP

#include <cstdint>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <utility>

#include <mpfr.h>

#include "toric/rational.hpp"

namespace toric {

class PrecisionExhausted : public std::runtime_error {
public:
    explicit PrecisionExhausted(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {

/// Tiny RAII interval over MPFR with outward rounding.
class MpfrInterval {
public:
    explicit MpfrInterval(mpfr_prec_t prec) {
        mpfr_init2(lo_, prec);
        mpfr_init2(hi_, prec);
        mpfr_set_zero(lo_, 1);
        mpfr_set_zero(hi_, 1);
    }
    ~MpfrInterval() {
        mpfr_clear(lo_);
        mpfr_clear(hi_);
    }
    MpfrInterval(const MpfrInterval&) = delete;
    MpfrInterval& operator=(const MpfrInterval&) = delete;

    void set_rat(const Rat& q) {
        mpfr_set_q(lo_, q.backend().data(), MPFR_RNDD);
        mpfr_set_q(hi_, q.backend().data(), MPFR_RNDU);
    }

    /// this += q * log(p), p >= 2 prime, q != 0.
    void add_coeff_log(const Rat& q, std::uint64_t p, mpfr_prec_t prec) {
        mpfr_t llo, lhi, t;
        mpfr_init2(llo, prec);
        mpfr_init2(lhi, prec);
        mpfr_init2(t, prec);
        mpfr_set_ui(llo, static_cast<unsigned long>(p), MPFR_RNDN);  // exact
        mpfr_set(lhi, llo, MPFR_RNDN);
        mpfr_log(llo, llo, MPFR_RNDD);
        mpfr_log(lhi, lhi, MPFR_RNDU);
        // log(p) > 0, so the product bounds depend only on the sign of q.
        if (q > 0) {
            mpfr_mul_q(t, llo, q.backend().data(), MPFR_RNDD);
            mpfr_add(lo_, lo_, t, MPFR_RNDD);
            mpfr_mul_q(t, lhi, q.backend().data(), MPFR_RNDU);
            mpfr_add(hi_, hi_, t, MPFR_RNDU);
        } else {
            mpfr_mul_q(t, lhi, q.backend().data(), MPFR_RNDD);
            mpfr_add(lo_, lo_, t, MPFR_RNDD);
            mpfr_mul_q(t, llo, q.backend().data(), MPFR_RNDU);
            mpfr_add(hi_, hi_, t, MPFR_RNDU);
        }
        mpfr_clear(llo);
        mpfr_clear(lhi);
        mpfr_clear(t);
    }

    int sign_or_zero() const {
        if (mpfr_sgn(lo_) > 0) return 1;
        if (mpfr_sgn(hi_) < 0) return -1;
        return 0;  // interval straddles zero
    }

    double lo_d() const { return mpfr_get_d(lo_, MPFR_RNDD); }
    double hi_d() const { return mpfr_get_d(hi_, MPFR_RNDU); }
    double mid_d() const {
        mpfr_t m;
        mpfr_init2(m, mpfr_get_prec(lo_));
        mpfr_add(m, lo_, hi_, MPFR_RNDN);
        mpfr_div_2ui(m, m, 1, MPFR_RNDN);
        double d = mpfr_get_d(m, MPFR_RNDN);
        mpfr_clear(m);
        return d;
    }

private:
    mpfr_t lo_, hi_;
};

}  // namespace detail

class LogValue {
public:
    LogValue() : const_term_(0) {}
    explicit LogValue(const Rat& c) : const_term_(c) {}
    explicit LogValue(long c) : const_term_(c) {}

    /// r * log(q) for positive rational q, distributed over the prime
    /// factorization of q.  const term is zero.
    static LogValue log_of_rational(const Rat& q, const Rat& r = Rat(1)) {
        if (q <= 0) throw std::domain_error("log of non-positive rational");
        LogValue v;
        if (r == 0) return v;
        for (const auto& [p, e] : factor_u64(Int(numerator(q)))) v.add_log_term(p, r * e);
        for (const auto& [p, e] : factor_u64(Int(denominator(q)))) v.add_log_term(p, -r * e);
        return v;
    }

    /// q_p * log(p) for a (checked) prime p.
    static LogValue log_prime(std::uint64_t p, const Rat& coeff) {
        if (!is_prime_u64(p)) throw std::domain_error("log coefficient key " + std::to_string(p) + " is not prime");
        LogValue v;
        v.add_log_term(p, coeff);
        return v;
    }

    const Rat& const_term() const { return const_term_; }
    const std::map<std::uint64_t, Rat>& log_coeffs() const { return log_coeffs_; }

    bool is_zero() const { return const_term_ == 0 && log_coeffs_.empty(); }
    bool is_rational() const { return log_coeffs_.empty(); }

    /// The rational part when no log terms are present; throws otherwise.
    Rat as_rational() const {
        if (!is_rational()) throw std::logic_error("LogValue has log terms");
        return const_term_;
    }

    bool operator==(const LogValue& o) const {
        return const_term_ == o.const_term_ && log_coeffs_ == o.log_coeffs_;
    }
    bool operator!=(const LogValue& o) const { return !(*this == o); }

    LogValue operator+(const LogValue& o) const {
        LogValue r(*this);
        r.const_term_ += o.const_term_;
        for (const auto& [p, c] : o.log_coeffs_) r.add_log_term(p, c);
        return r;
    }
    LogValue operator-(const LogValue& o) const {
        LogValue r(*this);
        r.const_term_ -= o.const_term_;
        for (const auto& [p, c] : o.log_coeffs_) r.add_log_term(p, -c);
        return r;
    }
    LogValue operator-() const { return LogValue() - *this; }
    LogValue& operator+=(const LogValue& o) { return *this = *this + o; }
    LogValue& operator-=(const LogValue& o) { return *this = *this - o; }

    friend LogValue operator*(const Rat& c, const LogValue& a) {
        LogValue r;
        if (c == 0) return r;
        r.const_term_ = c * a.const_term_;
        for (const auto& [p, q] : a.log_coeffs_) r.log_coeffs_[p] = c * q;
        return r;
    }

    /// -1/0/+1.  Zero only for the canonical zero; otherwise interval
    /// evaluation at doubling precision up to max_bits.
    int sign(mpfr_prec_t max_bits = 4096) const {
        if (is_zero()) return 0;
        if (log_coeffs_.empty()) return const_term_ > 0 ? 1 : -1;
        for (mpfr_prec_t prec = 64; prec <= max_bits; prec *= 2) {
            detail::MpfrInterval iv(prec);
            iv.set_rat(const_term_);
            for (const auto& [p, q] : log_coeffs_) iv.add_coeff_log(q, p, prec);
            int s = iv.sign_or_zero();
            if (s != 0) return s;
        }
        throw PrecisionExhausted("sign of " + str() + " undecided at " + std::to_string(max_bits) + " bits");
    }

    /// Enclosing interval at the requested precision (>= 24 bits).
    std::pair<double, double> interval(mpfr_prec_t bits = 64) const {
        if (bits < 24) throw std::domain_error("interval precision below 24 bits");
        detail::MpfrInterval iv(bits);
        iv.set_rat(const_term_);
        for (const auto& [p, q] : log_coeffs_) iv.add_coeff_log(q, p, bits);
        return {iv.lo_d(), iv.hi_d()};
    }

    /// Midpoint double view.
    double approx() const {
        detail::MpfrInterval iv(128);
        iv.set_rat(const_term_);
        for (const auto& [p, q] : log_coeffs_) iv.add_coeff_log(q, p, 128);
        return iv.mid_d();
    }

    /// Canonical text form, e.g. "7/3·log(2)+1/2·log(3)" or "-2+log(5)".
    std::string str() const {
        if (is_zero()) return "0";
        std::ostringstream os;
        bool first = true;
        if (const_term_ != 0) {
            os << const_term_.str();
            first = false;
        }
        for (const auto& [p, q] : log_coeffs_) {
            if (!first && q > 0) os << "+";
            if (q == -1)
                os << "-";
            else if (q != 1)
                os << q.str() << "\xc2\xb7";
            os << "log(" << p << ")";
            first = false;
        }
        return os.str();
    }

    /// Inverse of str(); accepts exactly the canonical form.
    static LogValue parse(const std::string& s);

private:
    void add_log_term(std::uint64_t p, const Rat& c) {
        if (c == 0) return;
        auto it = log_coeffs_.find(p);
        if (it == log_coeffs_.end()) {
            log_coeffs_[p] = c;
        } else {
            it->second += c;
            if (it->second == 0) log_coeffs_.erase(it);
        }
    }

    Rat const_term_;
    std::map<std::uint64_t, Rat> log_coeffs_;  // prime -> nonzero coefficient

    friend class LogValueBuilder;
};

/// Escape hatch for io code that assembles values coefficient by coefficient.
class LogValueBuilder {
public:
    void set_const(const Rat& c) { v_.const_term_ = c; }
    void add_log(std::uint64_t p, const Rat& c) {
        if (!is_prime_u64(p)) throw ParseError("log key " + std::to_string(p) + " is not prime");
        v_.add_log_term(p, c);
    }
    LogValue take() { return std::move(v_); }

private:
    LogValue v_;
};

inline LogValue LogValue::parse(const std::string& s) {
    if (s == "0") return LogValue();
    LogValueBuilder b;
    Rat const_term = 0;
    std::size_t i = 0;
    bool any = false;
    while (i < s.size()) {
        int sign = 1;
        if (s[i] == '+') {
            ++i;
        } else if (s[i] == '-') {
            sign = -1;
            ++i;
        }
        // Coefficient (optional when the term is a bare log).
        std::size_t j = i;
        while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '/')) ++j;
        Rat coeff = 1;
        bool have_coeff = j > i;
        if (have_coeff) coeff = parse_rat(s.substr(i, j - i));
        i = j;
        // Optional middle dot separator (UTF-8, 2 bytes).
        if (i + 1 < s.size() && static_cast<unsigned char>(s[i]) == 0xc2 &&
            static_cast<unsigned char>(s[i + 1]) == 0xb7)
            i += 2;
        if (i + 4 <= s.size() && s.compare(i, 4, "log(") == 0) {
            i += 4;
            std::size_t k = s.find(')', i);
            if (k == std::string::npos) throw ParseError("unterminated log( in: " + s);
            std::uint64_t p = std::stoull(s.substr(i, k - i));
            b.add_log(p, Rat(sign) * coeff);
            i = k + 1;
        } else {
            if (!have_coeff) throw ParseError("bad LogValue literal: " + s);
            const_term += Rat(sign) * coeff;
        }
        any = true;
    }
    if (!any) throw ParseError("empty LogValue literal");
    b.set_const(const_term);
    return b.take();
}

inline int lv_sign(const LogValue& a) { return a.sign(); }

/// Total order consistent with the real embedding.
inline int lv_cmp(const LogValue& a, const LogValue& b) {
    if (a == b) return 0;
    return (a - b).sign();
}

inline const LogValue& lv_max(const LogValue& a, const LogValue& b) { return lv_cmp(a, b) >= 0 ? a : b; }

inline const LogValue& lv_min(const LogValue& a, const LogValue& b) { return lv_cmp(a, b) <= 0 ? a : b; }

/// LogValue extended with -infinity (the value of a roof function outside its
/// polytope).  -infinity absorbs addition and is minimal.
class ExtLogValue {
public:
    static ExtLogValue neg_infinity() { return ExtLogValue(false, LogValue()); }
    ExtLogValue(LogValue v) : finite_(true), v_(std::move(v)) {}  // NOLINT implicit

    bool finite() const { return finite_; }
    const LogValue& value() const {
        if (!finite_) throw std::logic_error("value() on -infinity");
        return v_;
    }

    ExtLogValue operator+(const ExtLogValue& o) const {
        if (!finite_ || !o.finite_) return neg_infinity();
        return ExtLogValue(v_ + o.v_);
    }

    bool operator==(const ExtLogValue& o) const {
        if (finite_ != o.finite_) return false;
        return !finite_ || v_ == o.v_;
    }

    /// cmp with -infinity below everything.
    int cmp(const ExtLogValue& o) const {
        if (!finite_ && !o.finite_) return 0;
        if (!finite_) return -1;
        if (!o.finite_) return 1;
        return lv_cmp(v_, o.v_);
    }

    std::string str() const { return finite_ ? v_.str() : "-inf"; }

private:
    ExtLogValue(bool f, LogValue v) : finite_(f), v_(std::move(v)) {}
    bool finite_;
    LogValue v_;
};

/// Vector with LogValue entries (roof-side gradients, lifted evaluation points).
using LogVec = std::vector<LogValue>;

inline LogValue dot(const QVec& a, const LogVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    LogValue s;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline LogVec to_logvec(const QVec& a) {
    LogVec r;
    r.reserve(a.size());
    for (const auto& x : a) r.emplace_back(x);
    return r;
}

/// Solves A x = b with rational square A and LogValue right-hand side.
inline std::optional<LogVec> solve_linear_lv(QMat a, LogVec b) {
    std::size_t n = a.size();
    if (n == 0) return LogVec{};
    if (a[0].size() != n) throw std::invalid_argument("solve_linear_lv: matrix not square");
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && a[piv][c] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        Rat inv = Rat(1) / a[c][c];
        for (std::size_t j = c; j < n; ++j) a[c][j] *= inv;
        b[c] = inv * b[c];
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a[i][c] == 0) continue;
            Rat f = a[i][c];
            for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
            b[i] -= f * b[c];
        }
    }
    return b;
}

}  // namespace toric

#endif  // TORIC_LOGVALUE_HPP
