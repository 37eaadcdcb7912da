#pragma once

// Period coordinates: a basis of H1(S, Sigma; Z) made of triangulation edges,
// selected greedily from shortest saddle connections first, plus rational
// expansions of every initial edge over that basis.

#include "saddle.hpp"

#include <memory>

namespace flatsys {

// incremental span of rational column vectors with coefficient tracking
class RationalSpan {
public:
    explicit RationalSpan(int dim) : dim_(dim) {}

    int added() const { return added_; }

    // returns true when v enlarged the span; dependent columns are recorded
    // so later solves can still reference their index
    bool add(const std::vector<Rational>& v) {
        std::vector<Rational> r = v;
        std::vector<Rational> coeff(added_, 0);
        reduce(r, coeff);
        ++added_;
        int pivot = -1;
        for (int i = 0; i < dim_; ++i)
            if (r[i] != 0) {
                pivot = i;
                break;
            }
        if (pivot < 0) return false;
        Rational inv = r[pivot];
        for (auto& x : r) x /= inv;
        for (auto& x : coeff) x = -x / inv;  // v itself enters with weight 1/inv
        coeff.resize(added_, 0);
        coeff[added_ - 1] = Rational(1) / inv;
        cols_.push_back({std::move(r), pivot, std::move(coeff)});
        return true;
    }

    // coefficients over the added columns, or nullopt when v is outside
    std::optional<std::vector<Rational>> solve(const std::vector<Rational>& v) const {
        std::vector<Rational> r = v;
        std::vector<Rational> coeff(added_, 0);
        reduce(r, coeff);
        for (int i = 0; i < dim_; ++i)
            if (r[i] != 0) return std::nullopt;
        return coeff;
    }

private:
    struct Col {
        std::vector<Rational> v;       // reduced, v[pivot] = 1
        int pivot;
        std::vector<Rational> coeff;   // expression over added columns
    };
    int dim_;
    int added_ = 0;
    std::vector<Col> cols_;

    // subtract multiples of stored columns; coeff accumulates the combination
    void reduce(std::vector<Rational>& r, std::vector<Rational>& coeff) const {
        for (const auto& c : cols_) {
            Rational f = r[c.pivot];
            if (f == 0) continue;
            for (int i = 0; i < dim_; ++i)
                if (c.v[i] != 0) r[i] -= f * c.v[i];
            for (size_t i = 0; i < c.coeff.size() && i < coeff.size(); ++i)
                coeff[i] += f * c.coeff[i];
        }
    }
};

template <class R>
struct PeriodBasis {
    struct Element {
        Vec2<R> hol;                    // oriented holonomy (gamma_1 horizontal when possible)
        std::vector<long long> chain;   // oriented chain over initial edges
        int delaunay_edge = -1;
        double length = 0;
    };
    std::vector<Element> elements;                       // k = 2g + r - 1
    std::vector<std::vector<Rational>> initial_coeff;    // E x k: initial edge -> basis coeffs
    int k = 0;

    // expansion of an arbitrary integer chain over the basis
    std::optional<std::vector<Rational>> expand(const std::vector<long long>& chain) const {
        std::vector<Rational> v(chain.begin(), chain.end());
        auto sol = span_->solve(v);
        if (!sol) return std::nullopt;
        std::vector<Rational> out(k, 0);
        for (int j = 0; j < k; ++j) out[j] = (*sol)[boundary_cols_ + j];
        return out;
    }

    std::shared_ptr<RationalSpan> span_;
    int boundary_cols_ = 0;
};

// Build the basis on the Delaunay triangulation TD (flipped from T0), so that
// shortest connections are available as candidate edges (Lemma-style: all of
// them are Delaunay edges).
template <class R>
PeriodBasis<R> build_period_basis(const Triangulation<R>& T0, const Triangulation<R>& TD) {
    const int E = T0.edge_count;
    const int F = T0.triangle_count();
    const int k = E - F + 1;

    // candidate Delaunay edges by (length, id)
    std::vector<int> cand(TD.edge_count);
    std::iota(cand.begin(), cand.end(), 0);
    std::stable_sort(cand.begin(), cand.end(), [&](int x, int y) {
        if constexpr (scalar_traits<R>::exact) {
            int s = (TD.hol(TD.edge_rep[x]).norm2() - TD.hol(TD.edge_rep[y]).norm2()).sign();
            if (s != 0) return s < 0;
        } else {
            double lx = TD.hol(TD.edge_rep[x]).norm2(), ly = TD.hol(TD.edge_rep[y]).norm2();
            if (lx != ly) return lx < ly;
        }
        return x < y;
    });

    // greedy pass just to decide which edges make the basis
    RationalSpan probe(E);
    std::vector<std::vector<Rational>> boundaries;
    for (int t = 0; t < F; ++t) {
        std::vector<Rational> col(E, 0);
        for (int kk = 0; kk < 3; ++kk) {
            auto ch = T0.oriented_chain(HalfEdge{t, kk});
            for (int i = 0; i < E; ++i) col[i] += ch[i];
        }
        boundaries.push_back(col);
        probe.add(col);
    }
    std::vector<int> chosen;
    for (int eid : cand) {
        if (static_cast<int>(chosen.size()) == k) break;
        const auto& ch = TD.edge_chain[eid];
        std::vector<Rational> col(ch.begin(), ch.end());
        if (probe.add(col)) chosen.push_back(eid);
    }
    if (static_cast<int>(chosen.size()) != k)
        throw surface_error("period basis: candidates do not span relative homology");

    // gamma_1 horizontal and left-to-right when achievable
    int horis = -1;
    for (size_t i = 0; i < chosen.size(); ++i) {
        if (scalar_traits<R>::sign(TD.hol(TD.edge_rep[chosen[i]]).y) == 0) {
            horis = static_cast<int>(i);
            break;
        }
    }
    if (horis > 0) std::swap(chosen[0], chosen[horis]);

    PeriodBasis<R> B;
    B.k = k;
    B.span_ = std::make_shared<RationalSpan>(E);
    B.boundary_cols_ = F;
    for (const auto& col : boundaries) B.span_->add(col);
    for (int eid : chosen) {
        typename PeriodBasis<R>::Element el;
        el.chain = TD.edge_chain[eid];
        el.hol = TD.hol(TD.edge_rep[eid]);
        el.delaunay_edge = eid;
        bool neg = false;
        int sy = scalar_traits<R>::sign(el.hol.y);
        if (sy < 0 || (sy == 0 && scalar_traits<R>::sign(el.hol.x) < 0)) neg = true;
        if (neg) {
            el.hol = -el.hol;
            for (auto& c : el.chain) c = -c;
        }
        el.length = el.hol.length();
        std::vector<Rational> col(el.chain.begin(), el.chain.end());
        B.span_->add(col);
        B.elements.push_back(std::move(el));
    }

    B.initial_coeff.resize(E);
    for (int e = 0; e < E; ++e) {
        std::vector<long long> unit(E, 0);
        unit[e] = 1;
        auto c = B.expand(unit);
        if (!c) throw surface_error("period basis: initial edge outside span");
        B.initial_coeff[e] = std::move(*c);
    }
    return B;
}

// ---- small generic dense linear algebra over a field ------------------------

// kernel basis of an m x n matrix; `is_zero` supplies the field's zero test
template <class F, class ZeroTest>
std::vector<std::vector<F>> kernel_basis(std::vector<std::vector<F>> M, int n, ZeroTest is_zero) {
    int m = static_cast<int>(M.size());
    std::vector<int> pivot_col;
    int row = 0;
    for (int col = 0; col < n && row < m; ++col) {
        int pr = -1;
        for (int r = row; r < m; ++r)
            if (!is_zero(M[r][col])) {
                pr = r;
                break;
            }
        if (pr < 0) continue;
        std::swap(M[row], M[pr]);
        F inv = M[row][col];
        for (int c = col; c < n; ++c) M[row][c] = M[row][c] / inv;
        for (int r = 0; r < m; ++r) {
            if (r == row) continue;
            F f = M[r][col];
            if (is_zero(f)) continue;
            for (int c = col; c < n; ++c) M[r][c] = M[r][c] - f * M[row][c];
        }
        pivot_col.push_back(col);
        ++row;
    }
    std::vector<bool> is_pivot(n, false);
    for (int c : pivot_col) is_pivot[c] = true;
    std::vector<std::vector<F>> kernel;
    for (int free = 0; free < n; ++free) {
        if (is_pivot[free]) continue;
        std::vector<F> v(n, F(0));
        v[free] = F(1);
        for (size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = F(0) - M[r][free];
        kernel.push_back(std::move(v));
    }
    return kernel;
}

// solve M x = b over the rationals; inconsistent -> nullopt; free vars -> 0
inline std::optional<std::vector<Rational>> solve_rational(std::vector<std::vector<Rational>> M,
                                                           std::vector<Rational> b, int n) {
    int m = static_cast<int>(M.size());
    std::vector<int> pivot_col;
    int row = 0;
    for (int col = 0; col < n && row < m; ++col) {
        int pr = -1;
        for (int r = row; r < m; ++r)
            if (M[r][col] != 0) {
                pr = r;
                break;
            }
        if (pr < 0) continue;
        std::swap(M[row], M[pr]);
        std::swap(b[row], b[pr]);
        Rational inv = M[row][col];
        for (int c = col; c < n; ++c) M[row][c] /= inv;
        b[row] /= inv;
        for (int r = 0; r < m; ++r) {
            if (r == row) continue;
            Rational f = M[r][col];
            if (f == 0) continue;
            for (int c = col; c < n; ++c) M[r][c] -= f * M[row][c];
            b[r] -= f * b[row];
        }
        pivot_col.push_back(col);
        ++row;
    }
    for (int r = row; r < m; ++r)
        if (b[r] != 0) return std::nullopt;
    // fully reduced: with free variables at zero, each pivot reads off b
    std::vector<Rational> x(n, 0);
    for (int r = 0; r < row; ++r) x[pivot_col[r]] = b[r];
    return x;
}

}  // namespace flatsys
