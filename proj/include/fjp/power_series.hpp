// Dense truncated power series about 0, templated on the coefficient type
// (long double normally, __float128 where inversion conditioning demands it).
// Just enough arithmetic for building Taylor expansions of the flow maps and
// reverting them order by order: the classical product/quotient/sqrt/exp
// recurrences, all exact in the truncation order.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace fjp {

namespace detail {
inline long double scalar_sqrt(long double x) { return sqrtl(x); }
#ifdef __SIZEOF_FLOAT128__
// Newton refinement from a long double seed; two steps reach full quad
// precision for arguments of moderate scale
inline __float128 scalar_sqrt(__float128 x) {
    __float128 r = sqrtl((long double)x);
    if (r == 0) return 0;
    r = (r + x / r) / 2;
    r = (r + x / r) / 2;
    return r;
}
#endif
}  // namespace detail

template <class T>
class BasicPowerSeries {
public:
    explicit BasicPowerSeries(int order) : c_(order + 1, T(0)) {}
    BasicPowerSeries(std::vector<T> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty()) c_.push_back(T(0));
    }

    int order() const { return (int)c_.size() - 1; }
    T operator[](int i) const { return c_[i]; }
    T& operator[](int i) { return c_[i]; }
    const std::vector<T>& coeffs() const { return c_; }

    static BasicPowerSeries identity(int order) {
        BasicPowerSeries s(order);
        if (order >= 1) s[1] = T(1);
        return s;
    }
    static BasicPowerSeries constant(T v, int order) {
        BasicPowerSeries s(order);
        s[0] = v;
        return s;
    }

    friend BasicPowerSeries operator+(const BasicPowerSeries& a, const BasicPowerSeries& b) {
        BasicPowerSeries r(std::max(a.order(), b.order()));
        for (int i = 0; i <= a.order(); ++i) r[i] += a[i];
        for (int i = 0; i <= b.order(); ++i) r[i] += b[i];
        return r;
    }
    friend BasicPowerSeries operator-(const BasicPowerSeries& a, const BasicPowerSeries& b) {
        BasicPowerSeries r(std::max(a.order(), b.order()));
        for (int i = 0; i <= a.order(); ++i) r[i] += a[i];
        for (int i = 0; i <= b.order(); ++i) r[i] -= b[i];
        return r;
    }
    friend BasicPowerSeries operator*(T s, const BasicPowerSeries& a) {
        BasicPowerSeries r = a;
        for (auto& x : r.c_) x *= s;
        return r;
    }
    friend BasicPowerSeries operator*(const BasicPowerSeries& a, const BasicPowerSeries& b) {
        BasicPowerSeries r(std::max(a.order(), b.order()));
        int n = r.order();
        for (int i = 0; i <= std::min(a.order(), n); ++i) {
            if (a[i] == T(0)) continue;
            for (int j = 0; j <= std::min(b.order(), n - i); ++j) r[i + j] += a[i] * b[j];
        }
        return r;
    }
    friend BasicPowerSeries operator/(const BasicPowerSeries& a, const BasicPowerSeries& b) {
        if (b[0] == T(0))
            throw std::domain_error("PowerSeries: division by series with zero constant term");
        BasicPowerSeries r(std::max(a.order(), b.order()));
        int n = r.order();
        for (int i = 0; i <= n; ++i) {
            T s = i <= a.order() ? a[i] : T(0);
            for (int j = 1; j <= std::min(i, b.order()); ++j) s -= b[j] * r[i - j];
            r[i] = s / b[0];
        }
        return r;
    }

    // principal sqrt, constant term must be positive
    BasicPowerSeries sqrt() const {
        if (!(c_[0] > T(0))) throw std::domain_error("PowerSeries: sqrt needs positive constant term");
        BasicPowerSeries r(order());
        r[0] = detail::scalar_sqrt(c_[0]);
        for (int i = 1; i <= order(); ++i) {
            T s = c_[i];
            for (int j = 1; j < i; ++j) s -= r[j] * r[i - j];
            r[i] = s / (T(2) * r[0]);
        }
        return r;
    }

    // exp of a series with zero constant term (e' = e * s')
    BasicPowerSeries exp0() const {
        if (c_[0] != T(0)) throw std::domain_error("PowerSeries: exp0 needs zero constant term");
        BasicPowerSeries r(order());
        r[0] = T(1);
        for (int i = 1; i <= order(); ++i) {
            T s = T(0);
            for (int j = 1; j <= i; ++j) s += T(j) * c_[j] * r[i - j];
            r[i] = s / T(i);
        }
        return r;
    }

    // compositional inverse of f with f(0)=0, f'(0)!=0: returns c with
    // f(c(w)) = w + O(w^{order+1}), solved order by order
    BasicPowerSeries invert() const {
        if (c_[0] != T(0) || c_[1] == T(0))
            throw std::domain_error("PowerSeries: invert needs f(0)=0, f'(0)!=0");
        int n = order();
        BasicPowerSeries c(n);
        c[1] = T(1) / c_[1];
        for (int ord = 2; ord <= n; ++ord) {
            // f(c(w)) truncated at 'ord' with c[ord] still zero; the w^ord
            // coefficient must be cancelled by f'(0)*c[ord]
            BasicPowerSeries pow = BasicPowerSeries::constant(T(1), ord);
            T acc = T(0);
            for (int k = 1; k <= ord; ++k) {
                BasicPowerSeries next(ord);
                for (int i = 0; i <= ord; ++i) {
                    if (pow[i] == T(0)) continue;
                    for (int j = 1; j <= ord - i; ++j) next[i + j] += pow[i] * c[j];
                }
                pow = next;
                acc += c_[k] * pow[ord];
            }
            c[ord] = -acc / c_[1];
        }
        return c;
    }

    double eval(double x) const {
        T r = T(0);
        for (int i = order(); i >= 0; --i) r = c_[i] + T(x) * r;
        return (double)r;
    }
    std::complex<double> eval(std::complex<double> z) const {
        std::complex<long double> r{0.0L, 0.0L};
        std::complex<long double> zl{(long double)z.real(), (long double)z.imag()};
        for (int i = order(); i >= 0; --i) r = (long double)c_[i] + zl * r;
        return {(double)r.real(), (double)r.imag()};
    }

private:
    std::vector<T> c_;
};

using PowerSeries = BasicPowerSeries<long double>;

}  // namespace fjp
