#pragma once

#include <complex>
#include <vector>

namespace hier {

using cplx = std::complex<double>;

// Truncated multivariate power series sum c_a X^a, |a| <= order.
class Taylor {
public:
    using Index = std::vector<int>;

    Taylor() = default;
    Taylor(int nvars, int order);
    static Taylor constant(int nvars, int order, cplx c);
    // value + X_i
    static Taylor variable(int nvars, int order, int i, cplx value = 0);

    int nvars() const { return nv_; }
    int order() const { return ord_; }
    size_t size() const { return c_.size(); }

    cplx coeff(const Index& a) const;
    void set_coeff(const Index& a, cplx v);
    // d^a f at X = 0, i.e. a! * coeff
    cplx derivative(const Index& a) const;
    cplx value() const { return c_.empty() ? cplx{} : c_[0]; }
    cplx& at(size_t k) { return c_[k]; }
    cplx at(size_t k) const { return c_[k]; }
    const Index& index_of(size_t k) const;

    Taylor& operator+=(const Taylor& o);
    Taylor& operator-=(const Taylor& o);
    Taylor& operator*=(cplx s);
    friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
    friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
    friend Taylor operator*(Taylor a, cplx s) { return a *= s; }
    friend Taylor operator*(cplx s, Taylor a) { return a *= s; }
    friend Taylor operator*(const Taylor& a, const Taylor& b);

    Taylor reflected() const;  // f(-X)
    Taylor inverse() const;
    friend Taylor log(const Taylor& f);
    friend Taylor exp(const Taylor& f);

private:
    struct Layout;
    const Layout& layout() const;
    int nv_ = 0, ord_ = 0;
    mutable const Layout* lay_ = nullptr;
    std::vector<cplx> c_;
};

}  // namespace hier
