#include "gflab/wave.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "gflab/errors.hpp"
#include "gflab/parallel.hpp"

namespace gflab {

int IterationLog::total_sweeps() const {
    int n = 0;
    for (const auto& s : slabs) n += s.sweeps;
    return n;
}

double IterationLog::max_contraction_ratio(double floor) const {
    double r = 0.0;
    for (const auto& s : slabs)
        for (std::size_t k = 0; k + 1 < s.sup_changes.size(); ++k)
            if (s.sup_changes[k] >= floor && s.sup_changes[k + 1] >= floor)
                r = std::max(r, s.sup_changes[k + 1] / s.sup_changes[k]);
    return r;
}

double cone_indicator(double x, double t, double tol) {
    const double d = std::abs(t) - std::abs(x);
    if (d > tol) return 1.0;
    if (d < -tol) return 0.0;
    return 0.5;
}

namespace {

using Long = std::ptrdiff_t;

Long ceil_cells(double length, double h) {
    return static_cast<Long>(std::ceil(length / h - 1e-9));
}

/// Index frame of one solve: rectangle columns [0, NX), extended columns
/// [0, NXE) with rect column i at extended column i + NT. At time row n the
/// backward dependence triangle stays inside the extended base exactly for
/// columns j in [n, NXE-1-n].
struct Geometry {
    double h = 1.0;
    Long K = 0;   // rect half-columns, >= kappa/h + pad
    Long NT = 0;  // top row index, >= T/h + pad
    Long NX = 0;  // rect columns
    Long NXE = 0; // extended columns
    double x0e = 0.0, x0r = 0.0;
};

Geometry make_geometry(const Trapezoid& region, double h, std::size_t pad) {
    if (!(h > 0.0)) throw DomainError("solver spacing must be positive");
    Geometry g;
    g.h = h;
    g.K = ceil_cells(region.kappa, h) + static_cast<Long>(pad);
    g.NT = std::max<Long>(ceil_cells(region.T, h), 1) + static_cast<Long>(pad);
    g.NX = 2 * g.K + 1;
    g.NXE = g.NX + 2 * g.NT;
    g.x0e = -static_cast<double>(g.K + g.NT) * h;
    g.x0r = -static_cast<double>(g.K) * h;
    return g;
}

std::vector<double> align_data(const GridFunction1D& f, const Geometry& g, const char* which) {
    if (std::abs(f.spacing() - g.h) > 1e-12 * g.h)
        throw DomainError(std::string(which) + ": data spacing does not match solver spacing");
    const double off = (g.x0e - f.x0()) / g.h;
    const Long o = static_cast<Long>(std::llround(off));
    if (std::abs(off - static_cast<double>(o)) > 1e-9 || o < 0 ||
        o + g.NXE > static_cast<Long>(f.size()))
        throw DomainError(std::string(which) + ": data do not cover the extended base [" +
                          std::to_string(g.x0e) + ", " + std::to_string(-g.x0e) + "]");
    std::vector<double> v(static_cast<std::size_t>(g.NXE));
    for (Long j = 0; j < g.NXE; ++j)
        v[static_cast<std::size_t>(j)] = f[static_cast<std::size_t>(o + j)];
    return v;
}

/// Source lookup by extended column / row, pure index arithmetic.
struct GridSource {
    const GridFunction2D* grid = nullptr;
    Long col_off = 0, row_off = 0, nx = 0;
    bool flip_rows = false;

    double operator()(Long j, Long n) const {
        if (!grid) return 0.0;
        const Long r = flip_rows ? row_off - n : row_off + n;
        return grid->values()[static_cast<std::size_t>(r * nx + col_off + j)];
    }
};

GridSource align_source(const std::optional<GridFunction2D>& src, const Geometry& g,
                        bool flip_rows) {
    GridSource s;
    if (!src) return s;
    const GridFunction2D& f = *src;
    if (std::abs(f.spacing() - g.h) > 1e-12 * g.h)
        throw DomainError("source spacing does not match solver spacing");
    const double coff = (g.x0e - f.x0()) / g.h;
    const Long co = static_cast<Long>(std::llround(coff));
    // Row 0 of the solve reads physical time 0 (or flips to -n*h).
    const double roff = (0.0 - f.t0()) / g.h;
    const Long ro = static_cast<Long>(std::llround(roff));
    if (std::abs(coff - static_cast<double>(co)) > 1e-9 ||
        std::abs(roff - static_cast<double>(ro)) > 1e-9)
        throw DomainError("source grid misaligned with solver grid");
    const Long need_last = flip_rows ? ro - (g.NT - 1) : ro + (g.NT - 1);
    if (co < 0 || co + g.NXE > static_cast<Long>(f.nx()) || ro < 0 ||
        ro >= static_cast<Long>(f.nt()) || need_last < 0 ||
        need_last >= static_cast<Long>(f.nt()))
        throw DomainError("region exceeds source data extent");
    s.grid = &f;
    s.col_off = co;
    s.row_off = ro;
    s.nx = static_cast<Long>(f.nx());
    s.flip_rows = flip_rows;
    return s;
}

/// Rolling state of the triangle-integral recurrence
///   T(j,n+1) = T(j-1,n) + T(j+1,n) - T(j,n-1) + h^2 g(j,n),
/// whose telescoping tiles the dependence triangle exactly (interior
/// diamonds at midpoint weight, base half-diamonds at half weight).
struct TriangleState {
    std::vector<double> prev; // T at row n-1
    std::vector<double> cur;  // T at row n
    Long row = 0;

    explicit TriangleState(Long nxe)
        : prev(static_cast<std::size_t>(nxe), 0.0), cur(static_cast<std::size_t>(nxe), 0.0) {}
};

/// One Picard run on rows (r0, r1]. Rows at and below r0 are already
/// converged; their contribution enters exactly via the saved triangle
/// state at rows (r0-1, r0), so time slabs chain with no re-sampling of
/// data and no finite-difference error. Only the slab's own source rows
/// are re-evaluated per sweep, which keeps the slab contraction bound
/// Lip * (slab height)^2.
template <class SourceAtU>
SlabLog picard_slab(const Geometry& geo, Long r0, Long r1, const TriangleState& base,
                    const std::vector<double>& a, const std::vector<double>& B, double lip,
                    bool linear, SourceAtU&& g_at, const PicardSettings& set,
                    std::vector<double>& u, TriangleState& top) {
    const double h = geo.h;
    const double h2 = h * h;
    const Long NXE = geo.NXE;
    const auto rows_s = static_cast<std::size_t>(r1 - r0 + 1);

    SlabLog log;
    log.first_row = static_cast<std::size_t>(r0);
    log.last_row = static_cast<std::size_t>(r1);
    log.contraction_bound = lip * static_cast<double>(r1 - r0) * h *
                            static_cast<double>(r1 - r0) * h;

    const auto lin_at = [&](Long m, Long j) {
        const Long n = r0 + m;
        return 0.5 * (a[static_cast<std::size_t>(j - n)] + a[static_cast<std::size_t>(j + n)]) +
               0.5 * (B[static_cast<std::size_t>(j + n)] - B[static_cast<std::size_t>(j - n)]);
    };
    const auto idx = [NXE](Long m, Long j) { return static_cast<std::size_t>(m * NXE + j); };

    std::vector<double> prev(rows_s * static_cast<std::size_t>(NXE), 0.0);
    std::vector<double> next(rows_s * static_cast<std::size_t>(NXE), 0.0);
    // seed the fixed base row of this slab
    for (Long j = r0; j <= NXE - 1 - r0; ++j) {
        prev[idx(0, j)] = u[static_cast<std::size_t>(r0 * NXE + j)];
        next[idx(0, j)] = prev[idx(0, j)];
    }
    std::vector<double> t_prev, t_cur, t_next(static_cast<std::size_t>(NXE), 0.0);

    const auto advance = [&](const std::vector<double>& iterate, bool record) {
        t_prev = base.prev;
        t_cur = base.cur;
        for (Long n = r0; n < r1; ++n) {
            const Long m = n - r0;
            if (n == 0) {
                // base half-diamonds of the first level
                for (Long j = 1; j <= NXE - 2; ++j)
                    t_next[static_cast<std::size_t>(j)] =
                        0.5 * h2 * g_at(j, 0, iterate[idx(m, j)]);
            } else {
                for (Long j = n + 1; j <= NXE - 2 - n; ++j)
                    t_next[static_cast<std::size_t>(j)] =
                        t_cur[static_cast<std::size_t>(j - 1)] +
                        t_cur[static_cast<std::size_t>(j + 1)] -
                        t_prev[static_cast<std::size_t>(j)] +
                        h2 * g_at(j, n, iterate[idx(m, j)]);
            }
            if (record)
                for (Long j = n + 1; j <= NXE - 1 - (n + 1); ++j)
                    next[idx(m + 1, j)] = lin_at(m + 1, j) + t_next[static_cast<std::size_t>(j)];
            std::swap(t_prev, t_cur);
            std::swap(t_cur, t_next);
        }
    };

    for (int sweep = 1; sweep <= set.max_iter; ++sweep) {
        ++log.sweeps;
        advance(prev, /*record=*/true);

        double dist = 0.0, sup_u = 0.0;
        for (Long n = r0 + 1; n <= r1; ++n) {
            const Long m = n - r0;
            for (Long j = n; j <= NXE - 1 - n; ++j) {
                dist = std::max(dist, std::abs(next[idx(m, j)] - prev[idx(m, j)]));
                sup_u = std::max(sup_u, std::abs(next[idx(m, j)]));
            }
        }
        const bool done = linear || dist <= set.tol * std::max(1.0, sup_u);
        if (!linear) log.sup_changes.push_back(dist);
        if (done) {
            for (Long n = r0 + 1; n <= r1; ++n)
                for (Long j = n; j <= NXE - 1 - n; ++j)
                    u[static_cast<std::size_t>(n * NXE + j)] = next[idx(n - r0, j)];
            // replay once against the converged iterate so the next slab
            // starts from a clean triangle state
            advance(next, /*record=*/false);
            top.prev = t_prev;
            top.cur = t_cur;
            top.row = r1;
            return log;
        }
        std::swap(prev, next);
    }
    throw ConvergenceError("Picard iteration did not reach tol " + std::to_string(set.tol) +
                               " within " + std::to_string(set.max_iter) + " sweeps",
                           log.sup_changes.empty() ? 0.0 : log.sup_changes.back());
}

template <class SourceAtU>
IterationLog picard_rows(const Geometry& geo, const std::vector<double>& a,
                         const std::vector<double>& b, double lip, bool linear,
                         SourceAtU&& g_at, const PicardSettings& set, Long n_slabs,
                         std::vector<double>& u) {
    const Long NXE = geo.NXE;
    // Antiderivative of b, accumulated once; the linear part is then pure
    // index lookups on a and B.
    std::vector<double> B(static_cast<std::size_t>(NXE), 0.0);
    for (Long j = 1; j < NXE; ++j)
        B[static_cast<std::size_t>(j)] =
            B[static_cast<std::size_t>(j - 1)] +
            0.5 * geo.h * (b[static_cast<std::size_t>(j - 1)] + b[static_cast<std::size_t>(j)]);

    for (Long j = 0; j < NXE; ++j) u[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(j)];

    IterationLog log;
    TriangleState state(NXE);
    for (Long k = 0; k < n_slabs; ++k) {
        const Long r0 = (k * geo.NT) / n_slabs;
        const Long r1 = ((k + 1) * geo.NT) / n_slabs;
        if (r1 == r0) continue;
        TriangleState top(NXE);
        log.slabs.push_back(
            picard_slab(geo, r0, r1, state, a, B, lip, linear, g_at, set, u, top));
        state = std::move(top);
    }
    return log;
}

Long pick_slab_count(const Geometry& geo, double lip) {
    const double height = static_cast<double>(geo.NT) * geo.h;
    if (lip <= 0.0 || lip * height * height < 0.5) return 1;
    const Long slab_rows =
        std::max<Long>(2, static_cast<Long>(std::floor(std::sqrt(0.5 / lip) / geo.h)));
    return (geo.NT + slab_rows - 1) / slab_rows;
}

GridFunction2D extract_rectangle(const Geometry& geo, const std::vector<double>& u) {
    std::vector<double> vals(static_cast<std::size_t>(geo.NX * (geo.NT + 1)));
    for (Long n = 0; n <= geo.NT; ++n)
        for (Long i = 0; i < geo.NX; ++i)
            vals[static_cast<std::size_t>(n * geo.NX + i)] =
                u[static_cast<std::size_t>(n * geo.NXE + i + geo.NT)];
    return GridFunction2D(geo.x0r, 0.0, geo.h, static_cast<std::size_t>(geo.NX),
                          static_cast<std::size_t>(geo.NT + 1), std::move(vals));
}

GridFunction2D flip_time(const GridFunction2D& g) {
    std::vector<double> vals(g.values().size());
    for (std::size_t n = 0; n < g.nt(); ++n) {
        const std::size_t src = g.nt() - 1 - n;
        for (std::size_t i = 0; i < g.nx(); ++i) vals[n * g.nx() + i] = g.at(i, src);
    }
    return GridFunction2D(g.x0(), -g.t(g.nt() - 1), g.spacing(), g.nx(), g.nt(),
                          std::move(vals));
}

Long fallback_slab_count(const Geometry& geo, double lip) {
    const Long slab_rows =
        std::max<Long>(2, static_cast<Long>(std::floor(std::sqrt(0.5 / lip) / geo.h)));
    return (geo.NT + slab_rows - 1) / slab_rows;
}

template <class PlateauFn>
PicardResult run_solver(const GridFunction1D& a, const GridFunction1D& b,
                        const std::optional<GridFunction2D>& source,
                        const NonlinearitySpec& f, bool use_f, PlateauFn&& plateau,
                        const Trapezoid& region, const PicardSettings& set) {
    const bool lower = region.orientation == Trapezoid::Orientation::Lower;
    const Trapezoid upper(region.kappa, region.T, Trapezoid::Orientation::Upper);
    const GridFunction1D b_eff = lower ? b.map([](double v) { return -v; }) : b;

    const Geometry geo = make_geometry(upper, a.spacing(), kSolverPad);
    const GridSource src = align_source(source, geo, /*flip_rows=*/lower);
    const std::vector<double> ae = align_data(a, geo, "a");
    const std::vector<double> be = align_data(b_eff, geo, "b");
    std::vector<double> u(static_cast<std::size_t>(geo.NXE * (geo.NT + 1)), 0.0);

    const double time_sign = lower ? -1.0 : 1.0;
    IterationLog log;
    if (use_f && f.id() != NonlinearitySpec::Id::Zero) {
        const double lip = f.lipschitz_bound();
        auto g = [&](Long j, Long n, double uval) {
            const double x = geo.x0e + static_cast<double>(j) * geo.h;
            const double t = time_sign * static_cast<double>(n) * geo.h;
            return f(plateau(x, t) + uval) + src(j, n);
        };
        const Long n_slabs = pick_slab_count(geo, lip);
        try {
            log = picard_rows(geo, ae, be, lip, false, g, set, n_slabs, u);
        } catch (const ConvergenceError&) {
            if (n_slabs != 1 || lip <= 0.0) throw;
            // Fall back to time-marching over contracting sub-trapezoids.
            std::fill(u.begin(), u.end(), 0.0);
            log = picard_rows(geo, ae, be, lip, false, g, set, fallback_slab_count(geo, lip),
                              u);
        }
    } else {
        auto g = [&](Long j, Long n, double uval) {
            const double x = geo.x0e + static_cast<double>(j) * geo.h;
            const double t = time_sign * static_cast<double>(n) * geo.h;
            const double base = use_f ? 0.0 : plateau(x, t);
            (void)uval;
            return base + src(j, n);
        };
        log = picard_rows(geo, ae, be, 0.0, true, g, set, 1, u);
    }
    GridFunction2D rect = extract_rectangle(geo, u);
    if (lower) rect = flip_time(rect);
    return {std::move(rect), std::move(log)};
}

double zero_plateau(double, double) { return 0.0; }

} // namespace

DataGeometry solver_data_geometry(const Trapezoid& region, double h, std::size_t pad) {
    const Geometry geo = make_geometry(
        Trapezoid(region.kappa, region.T, Trapezoid::Orientation::Upper), h, pad);
    return {geo.x0e, geo.h, static_cast<std::size_t>(geo.NXE)};
}

GridFunction1D sample_solver_data(const std::function<double(double)>& f,
                                  const Trapezoid& region, double h, std::size_t pad) {
    const DataGeometry g = solver_data_geometry(region, h, pad);
    return GridFunction1D::sample(g.x0, g.h, g.n, f);
}

GridFunction2D sample_solver_source(const std::function<double(double, double)>& f,
                                    const Trapezoid& region, double h, std::size_t pad) {
    const DataGeometry g = solver_data_geometry(region, h, pad);
    const Geometry geo = make_geometry(
        Trapezoid(region.kappa, region.T, Trapezoid::Orientation::Upper), h, pad);
    const bool lower = region.orientation == Trapezoid::Orientation::Lower;
    const double t0 = lower ? -static_cast<double>(geo.NT) * h : 0.0;
    return GridFunction2D::sample(g.x0, t0, h, g.n, static_cast<std::size_t>(geo.NT + 1), f);
}

GridFunction2D dalembert_linear(const GridFunction1D& a, const GridFunction1D& b,
                                const std::optional<GridFunction2D>& source,
                                const Trapezoid& region) {
    PicardSettings set;
    return run_solver(a, b, source, NonlinearitySpec::zero(), /*use_f=*/false, zero_plateau,
                      region, set)
        .solution;
}

PicardResult picard_semilinear(const WaveProblem& p, const PicardSettings& s) {
    return run_solver(p.a, p.b, p.source, p.f, /*use_f=*/true, zero_plateau, p.region, s);
}

Family2D solve_family(const Family1D& a, const Family1D& b,
                      const std::optional<Family2D>& source, const NonlinearitySpec& f,
                      const Trapezoid& region, const PicardSettings& s, int parallelism) {
    if (a.ladder() != b.ladder()) throw DomainError("data family ladders differ");
    if (source && source->ladder() != a.ladder())
        throw DomainError("source family ladder differs");
    std::vector<GridFunction2D> members(a.size());
    parallel_for(a.size(), parallelism, [&](std::size_t k) {
        try {
            WaveProblem p{a.member(k), b.member(k),
                          source ? std::optional<GridFunction2D>(source->member(k))
                                 : std::nullopt,
                          f, region};
            members[k] = picard_semilinear(p, s).solution;
        } catch (const Error& e) {
            throw ConvergenceError("ladder index " + std::to_string(k) + " (eps = " +
                                       std::to_string(a.epsilon(k)) + "): " + e.what(),
                                   0.0);
        }
    });
    return Family2D(a.ladder(), std::move(members), Provenance::Solved);
}

PicardResult solve_reference_w(const GridFunction1D& r0, const GridFunction1D& r1,
                               const ReferenceMode& mode, const NonlinearitySpec& f,
                               const Trapezoid& region, const PicardSettings& s) {
    const double tol = 1e-9 * r0.spacing();
    if (mode.kind == ReferenceMode::Kind::BoundedF) {
        if (!f.bounded())
            throw HypothesisError("reference problem with cone plateau needs bounded f");
        const double m = mode.value;
        auto plateau = [m, tol](double x, double t) { return m * cone_indicator(x, t, tol); };
        return run_solver(r0, r1, std::nullopt, f, /*use_f=*/true, plateau, region, s);
    }
    const double L = mode.value;
    auto plateau = [L, tol](double x, double t) { return L * cone_indicator(x, t, tol); };
    return run_solver(r0, r1, std::nullopt, NonlinearitySpec::zero(), /*use_f=*/false,
                      plateau, region, s);
}

PicardResult solve_with_plateau(const GridFunction1D& r0, const GridFunction1D& r1,
                                const std::function<double(double, double)>& plateau,
                                const NonlinearitySpec& f, const Trapezoid& region,
                                const PicardSettings& s) {
    return run_solver(r0, r1, std::nullopt, f, /*use_f=*/true,
                      [&](double x, double t) { return plateau(x, t); }, region, s);
}

double integral_equation_residual(const WaveProblem& p, const GridFunction2D& u) {
    if (p.region.orientation == Trapezoid::Orientation::Lower) {
        WaveProblem q = p;
        q.region.orientation = Trapezoid::Orientation::Upper;
        q.b = p.b.map([](double v) { return -v; });
        if (p.source) q.source = flip_time(*p.source);
        return integral_equation_residual(q, flip_time(u));
    }
    const Geometry geo = make_geometry(p.region, p.a.spacing(), kSolverPad);
    if (u.nx() != static_cast<std::size_t>(geo.NX) ||
        u.nt() != static_cast<std::size_t>(geo.NT + 1) ||
        std::abs(u.x0() - geo.x0r) > 1e-9 * geo.h || std::abs(u.t0()) > 1e-9 * geo.h)
        throw DomainError("solution grid does not match the solver rectangle");
    const GridSource src = align_source(p.source, geo, false);
    const std::vector<double> ae = align_data(p.a, geo, "a");
    const std::vector<double> be = align_data(p.b, geo, "b");

    std::vector<double> B(static_cast<std::size_t>(geo.NXE), 0.0);
    for (Long j = 1; j < geo.NXE; ++j)
        B[static_cast<std::size_t>(j)] =
            B[static_cast<std::size_t>(j - 1)] +
            0.5 * geo.h * (be[static_cast<std::size_t>(j - 1)] + be[static_cast<std::size_t>(j)]);

    const auto g_rect = [&](Long i, Long n) {
        return p.f(u.at(static_cast<std::size_t>(i), static_cast<std::size_t>(n))) +
               src(i + geo.NT, n);
    };
    const double h2 = geo.h * geo.h;
    const Long NX = geo.NX;
    std::vector<double> t_prev(static_cast<std::size_t>(NX), 0.0);
    std::vector<double> t_cur(static_cast<std::size_t>(NX), 0.0);
    std::vector<double> t_next(static_cast<std::size_t>(NX), 0.0);
    double res = 0.0;
    const double tol = 1e-9 * geo.h;
    const auto update = [&](Long i, Long n, double tri) {
        const double x = geo.x0r + static_cast<double>(i) * geo.h;
        const double t = static_cast<double>(n) * geo.h;
        if (!p.region.contains(x, t, tol)) return;
        const Long j = i + geo.NT;
        const double lin =
            0.5 * (ae[static_cast<std::size_t>(j - n)] + ae[static_cast<std::size_t>(j + n)]) +
            0.5 * (B[static_cast<std::size_t>(j + n)] - B[static_cast<std::size_t>(j - n)]);
        res = std::max(res, std::abs(u.at(static_cast<std::size_t>(i),
                                          static_cast<std::size_t>(n)) -
                                     (lin + tri)));
    };
    for (Long i = 0; i < NX; ++i) update(i, 0, 0.0);
    for (Long i = 1; i <= NX - 2; ++i) {
        t_cur[static_cast<std::size_t>(i)] = 0.5 * h2 * g_rect(i, 0);
        update(i, 1, t_cur[static_cast<std::size_t>(i)]);
    }
    for (Long n = 1; n < geo.NT; ++n) {
        for (Long i = n + 1; i <= NX - 2 - n; ++i) {
            t_next[static_cast<std::size_t>(i)] =
                t_cur[static_cast<std::size_t>(i - 1)] + t_cur[static_cast<std::size_t>(i + 1)] -
                t_prev[static_cast<std::size_t>(i)] + h2 * g_rect(i, n);
            update(i, n + 1, t_next[static_cast<std::size_t>(i)]);
        }
        std::swap(t_prev, t_cur);
        std::swap(t_cur, t_next);
    }
    return res;
}

} // namespace gflab
