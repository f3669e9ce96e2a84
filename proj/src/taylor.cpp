#include "hier/taylor.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace hier {

struct Taylor::Layout {
    std::vector<Index> idx;
    std::map<Index, size_t> pos;
    std::vector<int> degree;
    // (i, j, k): X^{idx[i]} X^{idx[j]} = X^{idx[k]}
    std::vector<std::array<size_t, 3>> products;
    std::vector<double> factorial;  // a! per index
};

namespace {
void enumerate(int nv, int ord, int var, int remaining, Taylor::Index& cur, std::vector<Taylor::Index>& out) {
    if (var == nv) {
        out.push_back(cur);
        return;
    }
    for (int e = 0; e <= remaining; ++e) {
        cur[var] = e;
        enumerate(nv, ord, var + 1, remaining - e, cur, out);
    }
    cur[var] = 0;
}
}  // namespace

const Taylor::Layout& Taylor::layout() const {
    if (lay_) return *lay_;
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<Layout>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{nv_, ord_}];
    if (!slot) {
        auto L = std::make_unique<Layout>();
        std::vector<Index> all;
        Index cur(nv_, 0);
        enumerate(nv_, ord_, 0, ord_, cur, all);
        std::stable_sort(all.begin(), all.end(), [](const Index& a, const Index& b) {
            int da = 0, db = 0;
            for (int x : a) da += x;
            for (int x : b) db += x;
            return da < db;
        });
        L->idx = all;
        for (size_t k = 0; k < all.size(); ++k) {
            L->pos[all[k]] = k;
            int d = 0;
            double f = 1;
            for (int x : all[k]) {
                d += x;
                for (int i = 2; i <= x; ++i) f *= i;
            }
            L->degree.push_back(d);
            L->factorial.push_back(f);
        }
        for (size_t i = 0; i < all.size(); ++i)
            for (size_t j = 0; j < all.size(); ++j) {
                if (L->degree[i] + L->degree[j] > ord_) continue;
                Index s(nv_);
                for (int v = 0; v < nv_; ++v) s[v] = all[i][v] + all[j][v];
                L->products.push_back({i, j, L->pos.at(s)});
            }
        slot = std::move(L);
    }
    lay_ = slot.get();
    return *slot;
}

Taylor::Taylor(int nvars, int order) : nv_(nvars), ord_(order) { c_.assign(layout().idx.size(), cplx{}); }

Taylor Taylor::constant(int nvars, int order, cplx c) {
    Taylor t(nvars, order);
    t.c_[0] = c;
    return t;
}

Taylor Taylor::variable(int nvars, int order, int i, cplx value) {
    Taylor t = constant(nvars, order, value);
    if (order >= 1) {
        Index a(nvars, 0);
        a[i] = 1;
        t.set_coeff(a, 1);
    }
    return t;
}

cplx Taylor::coeff(const Index& a) const {
    auto& L = layout();
    auto it = L.pos.find(a);
    if (it == L.pos.end()) throw std::out_of_range("multi-index beyond series order");
    return c_[it->second];
}

void Taylor::set_coeff(const Index& a, cplx v) {
    auto& L = layout();
    auto it = L.pos.find(a);
    if (it == L.pos.end()) throw std::out_of_range("multi-index beyond series order");
    c_[it->second] = v;
}

cplx Taylor::derivative(const Index& a) const {
    auto& L = layout();
    auto it = L.pos.find(a);
    if (it == L.pos.end()) throw std::out_of_range("multi-index beyond series order");
    return c_[it->second] * L.factorial[it->second];
}

const Taylor::Index& Taylor::index_of(size_t k) const { return layout().idx[k]; }

Taylor& Taylor::operator+=(const Taylor& o) {
    for (size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
}

Taylor& Taylor::operator-=(const Taylor& o) {
    for (size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
}

Taylor& Taylor::operator*=(cplx s) {
    for (auto& x : c_) x *= s;
    return *this;
}

Taylor operator*(const Taylor& a, const Taylor& b) {
    if (a.nv_ != b.nv_ || a.ord_ != b.ord_) throw std::invalid_argument("series shape mismatch");
    Taylor r(a.nv_, a.ord_);
    for (const auto& [i, j, k] : a.layout().products) r.c_[k] += a.c_[i] * b.c_[j];
    return r;
}

Taylor Taylor::reflected() const {
    Taylor r = *this;
    auto& L = layout();
    for (size_t k = 0; k < c_.size(); ++k)
        if (L.degree[k] % 2) r.c_[k] = -r.c_[k];
    return r;
}

namespace {
// sum_{k=0}^{ord} w_k g^k for g with zero constant term
Taylor compose_series(const Taylor& g, const std::vector<cplx>& w) {
    Taylor acc = Taylor::constant(g.nvars(), g.order(), w[0]);
    Taylor pw = Taylor::constant(g.nvars(), g.order(), 1);
    for (size_t k = 1; k < w.size(); ++k) {
        pw = pw * g;
        acc += pw * w[k];
    }
    return acc;
}
}  // namespace

Taylor Taylor::inverse() const {
    cplx f0 = value();
    if (f0 == cplx{}) throw std::domain_error("series has zero constant term");
    Taylor g = *this * (1.0 / f0);
    g.c_[0] = 0;
    std::vector<cplx> w(ord_ + 1);
    for (int k = 0; k <= ord_; ++k) w[k] = (k % 2 ? -1.0 : 1.0) / f0;
    return compose_series(g, w);
}

Taylor log(const Taylor& f) {
    cplx f0 = f.value();
    if (f0 == cplx{}) throw std::domain_error("log of series with zero constant term");
    Taylor g = f * (1.0 / f0);
    g.c_[0] = 0;
    std::vector<cplx> w(f.ord_ + 1);
    w[0] = std::log(f0);
    for (int k = 1; k <= f.ord_; ++k) w[k] = (k % 2 ? 1.0 : -1.0) / k;
    return compose_series(g, w);
}

Taylor exp(const Taylor& f) {
    cplx e0 = std::exp(f.value());
    Taylor g = f;
    g.c_[0] = 0;
    std::vector<cplx> w(f.ord_ + 1);
    double fact = 1;
    for (int k = 0; k <= f.ord_; ++k) {
        if (k) fact *= k;
        w[k] = e0 / fact;
    }
    return compose_series(g, w);
}

}  // namespace hier
