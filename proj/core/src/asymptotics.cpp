#include "gflab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gflab/errors.hpp"
#include "gflab/norms.hpp"

namespace gflab {
namespace {

std::vector<MultiIndex> alphas_2d(int max_order) {
    std::vector<MultiIndex> v;
    for (int total = 0; total <= max_order; ++total)
        for (int ax = total; ax >= 0; --ax) v.push_back({ax, total - ax});
    return v;
}

std::vector<MultiIndex> alphas_1d(int max_order) {
    std::vector<MultiIndex> v;
    for (int k = 0; k <= max_order; ++k) v.push_back({k, 0});
    return v;
}

// Sup over region nodes that the (possibly shrunk) grid still carries.
double sup_clipped(const GridFunction2D& f, const Trapezoid& region) {
    const double tol = 1e-9 * f.spacing();
    double m = 0.0;
    for (std::size_t n = 0; n < f.nt(); ++n) {
        const double t = f.t(n);
        for (std::size_t i = 0; i < f.nx(); ++i)
            if (region.contains(f.x(i), t, tol)) m = std::max(m, std::abs(f.at(i, n)));
    }
    return m;
}

double sup_clipped(const GridFunction1D& f, const Interval& region) {
    const double tol = 1e-9 * f.spacing();
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f.x(i) >= region.lo - tol && f.x(i) <= region.hi + tol)
            m = std::max(m, std::abs(f[i]));
    return m;
}

// Least squares of log(norm) against log(1/eps) over strictly positive
// entries; callers enforce their own point-count preconditions.
AsymptoticFit least_squares_loglog(const std::vector<std::pair<double, double>>& pts) {
    AsymptoticFit fit;
    fit.points = pts;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (const auto& [eps, n] : pts) {
        if (!(n > 0.0)) continue;
        const double x = std::log(1.0 / eps);
        const double y = std::log(n);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    const double dm = static_cast<double>(m);
    if (m < 2) {
        fit.slope = 0.0;
        fit.intercept = m == 1 ? sy : 0.0;
        fit.r2 = 1.0;
        return fit;
    }
    const double denom = dm * sxx - sx * sx;
    fit.slope = (dm * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / dm;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / dm;
    for (const auto& [eps, n] : pts) {
        if (!(n > 0.0)) continue;
        const double x = std::log(1.0 / eps);
        const double y = std::log(n);
        const double e = y - (fit.slope * x + fit.intercept);
        ss_res += e * e;
        ss_tot += (y - ybar) * (y - ybar);
    }
    fit.r2 = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot)
                          : (ss_res < 1e-20 ? 1.0 : 0.0);
    return fit;
}

// Verdict for one derivative's norms across the ladder: either everything
// sits below the floor, or at least four positive values support a fit.
struct AlphaTrack {
    bool below_floor = false;
    bool tail_collapsed = false; // positive head, floor tail
    AsymptoticFit fit;
};

AlphaTrack track_from_norms(const std::vector<std::pair<double, double>>& norms) {
    AlphaTrack tr;
    std::vector<std::pair<double, double>> positive;
    for (const auto& [eps, n] : norms)
        if (n > kNormFloor) positive.push_back({eps, n});
    if (positive.empty()) {
        tr.below_floor = true;
        tr.fit.identically_zero = true;
        tr.fit.points = norms;
        return tr;
    }
    if (positive.size() < 4) {
        // Values collapse under the floor along the ladder tail: treat as
        // decaying faster than anything the ladder can certify.
        if (norms.back().second <= kNormFloor) {
            tr.tail_collapsed = true;
            tr.fit.identically_zero = false;
            tr.fit.slope = -std::numeric_limits<double>::infinity();
            tr.fit.points = norms;
            return tr;
        }
        throw InsufficientDataError("fewer than 4 positive norms to fit an order");
    }
    tr.fit = fit_order(positive);
    return tr;
}

ModerateReport::Entry make_entry(const MultiIndex& alpha,
                                 const std::vector<std::pair<double, double>>& norms) {
    return {alpha, track_from_norms(norms).fit};
}

bool alpha_negligible(const AlphaTrack& tr, double q_max, double slack) {
    if (tr.below_floor || tr.tail_collapsed) return true;
    return tr.fit.decay_order() >= q_max - slack;
}

NegligibilityVerdict negligible_from_tracks(const std::vector<AlphaTrack>& tracks,
                                            const std::vector<MultiIndex>& alphas,
                                            const ClassificationSettings& s) {
    NegligibilityVerdict v;
    v.q_max = s.q_max;
    v.below_floor = true;
    v.negligible = true;
    for (std::size_t k = 0; k < tracks.size(); ++k) {
        v.fits.entries.push_back({alphas[k], tracks[k].fit});
        if (!tracks[k].below_floor) v.below_floor = false;
        if (!alpha_negligible(tracks[k], s.q_max, s.slope_slack)) v.negligible = false;
    }
    v.fits.identically_zero = v.below_floor;
    return v;
}

} // namespace

AsymptoticFit fit_order(const std::vector<std::pair<double, double>>& norms_per_eps) {
    std::size_t positive = 0;
    for (const auto& [eps, n] : norms_per_eps)
        if (n > 0.0) ++positive;
    if (positive == 0) {
        AsymptoticFit f;
        f.identically_zero = true;
        f.points = norms_per_eps;
        return f;
    }
    if (positive < 4)
        throw InsufficientDataError("order fit needs at least 4 positive norms, got " +
                                    std::to_string(positive));
    AsymptoticFit fit = least_squares_loglog(norms_per_eps);
    fit.points = norms_per_eps;
    return fit;
}

const AsymptoticFit* ModerateReport::fit_for(const MultiIndex& alpha) const {
    for (const auto& e : entries)
        if (e.alpha == alpha) return &e.fit;
    return nullptr;
}

std::string to_string(CellVerdict v) {
    switch (v) {
        case CellVerdict::Ginf: return "Ginf";
        case CellVerdict::Negligible: return "negligible";
        case CellVerdict::ModerateNotGinf: return "moderate-not-Ginf";
        case CellVerdict::NonModerate: return "non-moderate";
    }
    return "?";
}

ModerateReport classify_moderate(const Family2D& u, const Trapezoid& region, int max_order) {
    ModerateReport rep;
    rep.identically_zero = true;
    for (const auto& alpha : alphas_2d(max_order)) {
        std::vector<std::pair<double, double>> norms;
        for (std::size_t k = 0; k < u.size(); ++k) {
            const GridFunction2D d = fd_derivative(u.member(k), alpha);
            norms.push_back({u.epsilon(k), sup_clipped(d, region)});
        }
        auto entry = make_entry(alpha, norms);
        if (!entry.fit.identically_zero) rep.identically_zero = false;
        rep.entries.push_back(std::move(entry));
    }
    return rep;
}

ModerateReport classify_moderate(const Family1D& u, const Interval& region, int max_order) {
    ModerateReport rep;
    rep.identically_zero = true;
    for (const auto& alpha : alphas_1d(max_order)) {
        std::vector<std::pair<double, double>> norms;
        for (std::size_t k = 0; k < u.size(); ++k) {
            const GridFunction1D d = fd_derivative(u.member(k), alpha.x);
            norms.push_back({u.epsilon(k), sup_clipped(d, region)});
        }
        auto entry = make_entry(alpha, norms);
        if (!entry.fit.identically_zero) rep.identically_zero = false;
        rep.entries.push_back(std::move(entry));
    }
    return rep;
}

NegligibilityVerdict classify_negligible(const Family2D& u, const Trapezoid& region,
                                         const ClassificationSettings& s) {
    if (s.q_max < 3.0) throw ConfigError("q_max below 3 certifies nothing useful");
    const auto alphas = alphas_2d(s.max_order);
    std::vector<AlphaTrack> tracks;
    for (const auto& alpha : alphas) {
        std::vector<std::pair<double, double>> norms;
        for (std::size_t k = 0; k < u.size(); ++k)
            norms.push_back({u.epsilon(k), sup_clipped(fd_derivative(u.member(k), alpha), region)});
        tracks.push_back(track_from_norms(norms));
    }
    return negligible_from_tracks(tracks, alphas, s);
}

NegligibilityVerdict classify_negligible(const Family1D& u, const Interval& region,
                                         const ClassificationSettings& s) {
    if (s.q_max < 3.0) throw ConfigError("q_max below 3 certifies nothing useful");
    const auto alphas = alphas_1d(s.max_order);
    std::vector<AlphaTrack> tracks;
    for (const auto& alpha : alphas) {
        std::vector<std::pair<double, double>> norms;
        for (std::size_t k = 0; k < u.size(); ++k)
            norms.push_back(
                {u.epsilon(k), sup_clipped(fd_derivative(u.member(k), alpha.x), region)});
        tracks.push_back(track_from_norms(norms));
    }
    return negligible_from_tracks(tracks, alphas, s);
}

std::string RegularityReport::Cell::label() const {
    return "cell_" + std::to_string(ix) + "_" + std::to_string(it);
}

double RegularityReport::Cell::distance_to_cone() const {
    // Distance from the cell rectangle to the lines x = t and x = -t.
    double best = std::numeric_limits<double>::infinity();
    for (double sign : {1.0, -1.0}) {
        // min over the rectangle of |x - sign*t| / sqrt(2)
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (double x : {x_lo, x_hi})
            for (double t : {t_lo, t_hi}) {
                const double d = x - sign * t;
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
        const double dist = (lo > 0.0 ? lo : (hi < 0.0 ? -hi : 0.0)) / std::sqrt(2.0);
        best = std::min(best, dist);
    }
    return best;
}

RegularityReport ginf_report(const Family2D& u, const Trapezoid& region, double cell_side,
                             const ClassificationSettings& settings) {
    double h_max = 0.0;
    for (const auto& g : u.members()) h_max = std::max(h_max, g.spacing());
    if (cell_side < 4.0 * h_max)
        throw CellizationError("cell side " + std::to_string(cell_side) +
                               " too small for coarsest member spacing " +
                               std::to_string(h_max));

    RegularityReport rep;
    rep.cell_side = cell_side;
    rep.settings = settings;

    const auto ncx = static_cast<std::size_t>(std::ceil(2.0 * region.kappa / cell_side - 1e-9));
    const auto nct = static_cast<std::size_t>(std::ceil(region.T / cell_side - 1e-9));
    const double x_min = -region.kappa;
    const bool lower = region.orientation == Trapezoid::Orientation::Lower;

    struct CellGeom {
        double x_lo, x_hi, t_lo, t_hi;
        bool active;
    };
    std::vector<CellGeom> geom(ncx * std::max<std::size_t>(nct, 1));
    for (std::size_t jt = 0; jt < nct; ++jt)
        for (std::size_t jx = 0; jx < ncx; ++jx) {
            CellGeom g{};
            g.x_lo = x_min + static_cast<double>(jx) * cell_side;
            g.x_hi = g.x_lo + cell_side;
            const double t_abs_lo = static_cast<double>(jt) * cell_side;
            g.t_lo = lower ? -(t_abs_lo + cell_side) : t_abs_lo;
            g.t_hi = lower ? -t_abs_lo : t_abs_lo + cell_side;
            // keep cells that meet the trapezoid
            const double min_abs_x = (g.x_lo <= 0.0 && g.x_hi >= 0.0)
                                         ? 0.0
                                         : std::min(std::abs(g.x_lo), std::abs(g.x_hi));
            g.active = min_abs_x + t_abs_lo <= region.kappa + 1e-12 &&
                       t_abs_lo <= region.T + 1e-12;
            geom[jt * ncx + jx] = g;
        }

    const auto alphas = alphas_2d(settings.max_order);
    // sup per (cell, alpha, member)
    std::vector<std::vector<std::vector<double>>> sups(
        geom.size(), std::vector<std::vector<double>>(
                         alphas.size(), std::vector<double>(u.size(), 0.0)));
    // nodes seen in the coarsest member's undifferentiated bin; cells whose
    // shrunk interior misses the region entirely carry no evidence and are
    // dropped rather than classified
    std::vector<std::size_t> evidence(geom.size(), 0);

    for (std::size_t k = 0; k < u.size(); ++k) {
        const double shrink = u.member(k).spacing();
        for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
            const GridFunction2D d = fd_derivative(u.member(k), alphas[ai]);
            const double tol = 1e-9 * d.spacing();
            for (std::size_t n = 0; n < d.nt(); ++n) {
                const double t = d.t(n);
                const double t_abs = lower ? -t : t;
                if (t_abs < -tol || t_abs > region.T + tol) continue;
                const auto jt = std::min(
                    static_cast<std::size_t>(std::max(0.0, t_abs / cell_side)),
                    nct == 0 ? 0 : nct - 1);
                for (std::size_t i = 0; i < d.nx(); ++i) {
                    const double x = d.x(i);
                    if (!region.contains(x, t, tol)) continue;
                    if (x < x_min || x >= x_min + static_cast<double>(ncx) * cell_side)
                        continue;
                    const auto jx = static_cast<std::size_t>((x - x_min) / cell_side);
                    const CellGeom& c = geom[jt * ncx + jx];
                    if (!c.active) continue;
                    // shrink the open cell interior by one member spacing
                    if (x < c.x_lo + shrink - tol || x > c.x_hi - shrink + tol) continue;
                    if (t < c.t_lo + shrink - tol || t > c.t_hi - shrink + tol) continue;
                    if (ai == 0 && k == 0) ++evidence[jt * ncx + jx];
                    double& slot = sups[jt * ncx + jx][ai][k];
                    slot = std::max(slot, std::abs(d.at(i, n)));
                }
            }
        }
    }

    for (std::size_t jt = 0; jt < nct; ++jt)
        for (std::size_t jx = 0; jx < ncx; ++jx) {
            const CellGeom& g = geom[jt * ncx + jx];
            if (!g.active || evidence[jt * ncx + jx] == 0) continue;
            RegularityReport::Cell cell;
            cell.ix = jx;
            cell.it = jt;
            cell.x_lo = g.x_lo;
            cell.x_hi = g.x_hi;
            cell.t_lo = g.t_lo;
            cell.t_hi = g.t_hi;

            std::vector<AlphaTrack> tracks;
            bool any_nodes = false;
            for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
                std::vector<std::pair<double, double>> norms;
                for (std::size_t k = 0; k < u.size(); ++k)
                    norms.push_back({u.epsilon(k), sups[jt * ncx + jx][ai][k]});
                for (const auto& [e, nv] : norms) any_nodes = any_nodes || nv > 0.0;
                tracks.push_back(track_from_norms(norms));
                cell.orders.entries.push_back({alphas[ai], tracks.back().fit});
            }

            bool all_negligible = true, all_moderate = true;
            double p0 = 0.0, p_max = -std::numeric_limits<double>::infinity();
            for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
                const auto& tr = tracks[ai];
                if (!alpha_negligible(tr, settings.q_max, settings.slope_slack))
                    all_negligible = false;
                if (tr.below_floor || tr.tail_collapsed) continue;
                if (alphas[ai].order() == 0) p0 = tr.fit.slope;
                p_max = std::max(p_max, tr.fit.slope);
                if (tr.fit.slope > settings.moderate_cap) all_moderate = false;
            }
            if (all_negligible) {
                cell.verdict = CellVerdict::Negligible;
            } else if (!all_moderate) {
                cell.verdict = CellVerdict::NonModerate;
            } else {
                const double p_ref = std::max(p0, 0.0);
                bool ginf = true;
                for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
                    const auto& tr = tracks[ai];
                    if (tr.below_floor || tr.tail_collapsed) continue;
                    if (alpha_negligible(tr, settings.q_max, settings.slope_slack)) continue;
                    if (tr.fit.slope > p_ref + settings.order_tolerance) ginf = false;
                }
                cell.verdict = ginf ? CellVerdict::Ginf : CellVerdict::ModerateNotGinf;
                cell.ginf_order = std::max(p_max, 0.0);
            }
            rep.cells.push_back(std::move(cell));
        }
    return rep;
}

double TestFunctionSpec::value1d(double x) const {
    const double s = (x - center) / width;
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double TestFunctionSpec::value2d(double x, double t) const {
    const double st = (t - center_t) / width_t;
    if (std::abs(st) >= 1.0) return 0.0;
    return value1d(x) * std::exp(1.0 - 1.0 / (1.0 - st * st));
}

bool AssociationVerdict::all_converged() const {
    for (const auto& e : entries)
        if (!e.converged) return false;
    return true;
}

namespace {

AssociationVerdict::Entry make_association_entry(const TestFunctionSpec& test,
                                                 std::vector<std::pair<double, double>> pairings) {
    AssociationVerdict::Entry e;
    e.test = test;
    e.pairings = std::move(pairings);
    const std::size_t n = e.pairings.size();
    if (n >= 3) {
        const double p1 = e.pairings[n - 3].second;
        const double p2 = e.pairings[n - 2].second;
        const double p3 = e.pairings[n - 1].second;
        const double scale = std::max(std::abs(p3), 1e-30);
        const auto close = [&](double a, double b) {
            return std::abs(a - b) <= std::max(1e-8, 1e-3 * scale);
        };
        e.converged = close(p1, p2) && close(p2, p3);
        e.limit = p3;
    }
    return e;
}

} // namespace

AssociationVerdict weak_limit(const Family1D& u, const std::vector<TestFunctionSpec>& tests) {
    AssociationVerdict v;
    for (const auto& test : tests) {
        std::vector<std::pair<double, double>> pairings;
        for (std::size_t k = 0; k < u.size(); ++k) {
            const auto& g = u.member(k);
            double sum = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) sum += g[i] * test.value1d(g.x(i));
            pairings.push_back({u.epsilon(k), sum * g.spacing()});
        }
        v.entries.push_back(make_association_entry(test, std::move(pairings)));
    }
    return v;
}

AssociationVerdict weak_limit(const Family2D& u, const Trapezoid& region,
                              const std::vector<TestFunctionSpec>& tests) {
    const double tol_scale = 1e-9;
    AssociationVerdict v;
    for (const auto& test : tests) {
        std::vector<std::pair<double, double>> pairings;
        for (std::size_t k = 0; k < u.size(); ++k) {
            const auto& g = u.member(k);
            const double tol = tol_scale * g.spacing();
            double sum = 0.0;
            for (std::size_t n = 0; n < g.nt(); ++n) {
                const double t = g.t(n);
                for (std::size_t i = 0; i < g.nx(); ++i) {
                    const double psi = test.value2d(g.x(i), t);
                    if (psi == 0.0) continue;
                    if (!region.contains(g.x(i), t, tol)) continue;
                    sum += g.at(i, n) * psi;
                }
            }
            pairings.push_back({u.epsilon(k), sum * g.spacing() * g.spacing()});
        }
        v.entries.push_back(make_association_entry(test, std::move(pairings)));
    }
    return v;
}

GridFunction1D resample_to_coarsest(const GridFunction1D& fine, const GridFunction1D& coarse) {
    std::vector<double> v(coarse.size());
    const auto last = static_cast<double>(fine.size() - 1);
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        const double s = (coarse.x(i) - fine.x0()) / fine.spacing();
        const auto idx = static_cast<std::size_t>(std::clamp(std::round(s), 0.0, last));
        v[i] = fine[idx];
    }
    return GridFunction1D(coarse.x0(), coarse.spacing(), std::move(v));
}

GridFunction2D resample_to_coarsest(const GridFunction2D& fine, const GridFunction2D& coarse) {
    std::vector<double> v(coarse.nx() * coarse.nt());
    const auto last_i = static_cast<double>(fine.nx() - 1);
    const auto last_n = static_cast<double>(fine.nt() - 1);
    for (std::size_t n = 0; n < coarse.nt(); ++n) {
        const double sn = (coarse.t(n) - fine.t0()) / fine.spacing();
        const auto fn = static_cast<std::size_t>(std::clamp(std::round(sn), 0.0, last_n));
        for (std::size_t i = 0; i < coarse.nx(); ++i) {
            const double si = (coarse.x(i) - fine.x0()) / fine.spacing();
            const auto fi = static_cast<std::size_t>(std::clamp(std::round(si), 0.0, last_i));
            v[n * coarse.nx() + i] = fine.at(fi, fn);
        }
    }
    return GridFunction2D(coarse.x0(), coarse.t0(), coarse.spacing(), coarse.nx(), coarse.nt(),
                          std::move(v));
}

namespace {

template <class Grid, class Region>
L1LimitReport l1g_limit_impl(const RepresentativeFamily<Grid>& u, const Region& region) {
    L1LimitReport rep;
    rep.limit_index = u.size() - 1;
    std::vector<Grid> common;
    common.reserve(u.size());
    for (std::size_t k = 0; k < u.size(); ++k)
        common.push_back(resample_to_coarsest(u.member(k), u.member(0)));
    std::vector<std::pair<double, double>> fit_points;
    for (std::size_t k = 0; k + 1 < u.size(); ++k) {
        const Grid diff = zip(common[k], common[k + 1],
                              [](double a, double b) { return a - b; });
        const double d = l1_norm(diff, region);
        rep.pairwise_distances.push_back(d);
        fit_points.push_back({std::sqrt(u.epsilon(k) * u.epsilon(k + 1)), d});
    }
    std::vector<std::pair<double, double>> positive;
    for (const auto& p : fit_points)
        if (p.second > kNormFloor) positive.push_back(p);
    rep.distance_fit.points = fit_points;
    if (positive.empty()) {
        rep.converged = true;
        rep.distance_fit.identically_zero = true;
        return rep;
    }
    if (fit_points.back().second <= kNormFloor) {
        // distances collapse along the tail
        rep.converged = true;
        rep.distance_fit.slope = -std::numeric_limits<double>::infinity();
        return rep;
    }
    // Pairwise tables carry one point fewer than the ladder, so accept
    // short fits here (the public fit_order keeps its 4-point floor).
    rep.distance_fit = least_squares_loglog(positive);
    rep.distance_fit.points = fit_points;
    const double first = rep.pairwise_distances.front();
    const double last = rep.pairwise_distances.back();
    rep.converged = (rep.distance_fit.decay_order() >= 0.4 && last <= first) || last <= 1e-10;
    return rep;
}

} // namespace

L1LimitReport l1g_limit(const Family1D& u, const Interval& region) {
    return l1g_limit_impl(u, region);
}

L1LimitReport l1g_limit(const Family2D& u, const Trapezoid& region) {
    return l1g_limit_impl(u, region);
}

} // namespace gflab
