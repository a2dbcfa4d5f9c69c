// Pareto-frontier quality indicators against a reference frontier:
// hypervolume (WFG recursive slicing), IGD+, additive epsilon, and
// generalized spread, plus reference-front construction and the min-max
// normalization recorded with it. All indicators expect canonical
// all-minimize coordinates.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <refopt/nsga2.hpp>

namespace refopt {

using Point = std::vector<double>;

namespace detail {

inline void checkArity(const std::vector<Point>& points, size_t arity, const char* who) {
    for (const auto& p : points)
        if (p.size() != arity)
            throw std::invalid_argument(std::string(who) + ": objective arity mismatch");
}

inline bool weaklyDominates(const Point& a, const Point& b) {
    for (size_t k = 0; k < a.size(); ++k)
        if (a[k] > b[k]) return false;
    return true;
}

inline double euclid(const Point& a, const Point& b) {
    double sum = 0.0;
    for (size_t k = 0; k < a.size(); ++k) sum += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(sum);
}

}  // namespace detail

inline bool dominatesPoint(const Point& a, const Point& b) {
    bool strict = false;
    for (size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k]) return false;
        if (a[k] < b[k]) strict = true;
    }
    return strict;
}

// Non-dominated subset of the union of the given fronts; exact duplicates
// collapse to one point.
inline std::vector<Point> buildReferenceFront(const std::vector<std::vector<Point>>& fronts) {
    std::vector<Point> pool;
    size_t arity = 0;
    for (const auto& f : fronts)
        for (const auto& p : f) {
            if (arity == 0) arity = p.size();
            if (p.size() != arity)
                throw std::invalid_argument("buildReferenceFront: objective arity mismatch");
            pool.push_back(p);
        }
    std::vector<Point> out;
    for (size_t i = 0; i < pool.size(); ++i) {
        bool keep = true;
        for (size_t j = 0; j < pool.size() && keep; ++j) {
            if (i == j) continue;
            if (dominatesPoint(pool[j], pool[i])) keep = false;
        }
        if (keep && std::find(out.begin(), out.end(), pool[i]) == out.end())
            out.push_back(pool[i]);
    }
    return out;
}

// Min-max map recorded with a reference frontier; degenerate ranges map to 0.
struct Normalization {
    std::vector<double> lo, hi;

    static Normalization fromFront(const std::vector<Point>& front) {
        if (front.empty()) throw std::invalid_argument("Normalization: empty front");
        Normalization n;
        n.lo = front[0];
        n.hi = front[0];
        for (const auto& p : front)
            for (size_t k = 0; k < p.size(); ++k) {
                n.lo[k] = std::min(n.lo[k], p[k]);
                n.hi[k] = std::max(n.hi[k], p[k]);
            }
        return n;
    }

    Point apply(const Point& p) const {
        Point out(p.size());
        for (size_t k = 0; k < p.size(); ++k)
            out[k] = hi[k] > lo[k] ? (p[k] - lo[k]) / (hi[k] - lo[k]) : 0.0;
        return out;
    }

    std::vector<Point> applyAll(const std::vector<Point>& points) const {
        std::vector<Point> out;
        out.reserve(points.size());
        for (const auto& p : points) out.push_back(apply(p));
        return out;
    }
};

namespace detail {

inline double inclusiveVolume(const Point& p, const Point& ref) {
    double v = 1.0;
    for (size_t k = 0; k < p.size(); ++k) v *= ref[k] - p[k];
    return v;
}

// worse(p, q) per coordinate, reduced to its minimal non-dominated set
inline std::vector<Point> limitSet(const Point& p, const std::vector<Point>& rest) {
    std::vector<Point> limited;
    limited.reserve(rest.size());
    for (const auto& q : rest) {
        Point s(q.size());
        for (size_t k = 0; k < q.size(); ++k) s[k] = std::max(p[k], q[k]);
        limited.push_back(std::move(s));
    }
    std::vector<Point> minimal;
    for (size_t i = 0; i < limited.size(); ++i) {
        bool keep = true;
        for (size_t j = 0; j < limited.size() && keep; ++j) {
            if (i == j) continue;
            if (limited[j] == limited[i]) {
                if (j < i) keep = false;  // first duplicate wins
            } else if (weaklyDominates(limited[j], limited[i])) {
                keep = false;
            }
        }
        if (keep) minimal.push_back(limited[i]);
    }
    return minimal;
}

inline double wfgVolume(const std::vector<Point>& points, const Point& ref) {
    double total = 0.0;
    for (size_t i = 0; i < points.size(); ++i) {
        std::vector<Point> rest(points.begin() + i + 1, points.end());
        total += inclusiveVolume(points[i], ref) -
                 wfgVolume(limitSet(points[i], rest), ref);
    }
    return total;
}

}  // namespace detail

// Volume of the union of boxes [point, refPoint]; every point must
// weakly dominate the reference point.
inline double hypervolume(const std::vector<Point>& front, const Point& refPoint) {
    if (front.empty()) return 0.0;
    detail::checkArity(front, refPoint.size(), "hypervolume");
    for (const auto& p : front)
        for (size_t k = 0; k < p.size(); ++k)
            if (p[k] > refPoint[k])
                throw std::invalid_argument(
                    "hypervolume: point does not dominate the reference point");
    return detail::wfgVolume(front, refPoint);
}

// sqrt of summed squared dominance-aware distances from each reference
// point to the front, divided by the reference size.
inline double igdPlus(const std::vector<Point>& front, const std::vector<Point>& ref) {
    if (ref.empty()) throw std::invalid_argument("igdPlus: empty reference front");
    if (front.empty()) throw std::invalid_argument("igdPlus: empty front");
    detail::checkArity(front, ref[0].size(), "igdPlus");
    double sum = 0.0;
    for (const auto& s : ref) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& y : front) {
            double d2 = 0.0;
            for (size_t k = 0; k < s.size(); ++k) {
                const double diff = std::max(y[k] - s[k], 0.0);
                d2 += diff * diff;
            }
            best = std::min(best, d2);
        }
        sum += best;
    }
    return std::sqrt(sum) / static_cast<double>(ref.size());
}

// Additive epsilon: the smallest uniform translation after which the front
// epsilon-dominates every reference point.
inline double epsilon(const std::vector<Point>& front, const std::vector<Point>& ref) {
    if (front.empty() || ref.empty()) throw std::invalid_argument("epsilon: empty front");
    detail::checkArity(front, ref[0].size(), "epsilon");
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& x : ref) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& y : front) {
            double need = -std::numeric_limits<double>::infinity();
            for (size_t k = 0; k < x.size(); ++k) need = std::max(need, y[k] - x[k]);
            best = std::min(best, need);
        }
        worst = std::max(worst, best);
    }
    return worst;
}

// Generalized spread: extent (distance of the reference extremes to the
// front) plus uniformity (deviation of nearest-neighbor distances). Fronts
// of fewer than two points spread worst by definition (1.0).
inline double gspread(const std::vector<Point>& front, const std::vector<Point>& ref) {
    if (ref.empty()) throw std::invalid_argument("gspread: empty reference front");
    if (front.size() < 2) return 1.0;
    const size_t arity = ref[0].size();
    detail::checkArity(front, arity, "gspread");

    double extremeDistance = 0.0;
    for (size_t k = 0; k < arity; ++k) {
        // per-objective extreme of the reference front, ties broken
        // lexicographically for determinism
        const Point* extreme = &ref[0];
        for (const auto& p : ref)
            if (p[k] < (*extreme)[k] || (p[k] == (*extreme)[k] && p < *extreme))
                extreme = &p;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& y : front) best = std::min(best, detail::euclid(*extreme, y));
        extremeDistance += best;
    }

    std::vector<double> nearest(front.size());
    for (size_t i = 0; i < front.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < front.size(); ++j)
            if (i != j) best = std::min(best, detail::euclid(front[i], front[j]));
        nearest[i] = best;
    }
    double meanNearest = 0.0;
    for (double d : nearest) meanNearest += d;
    meanNearest /= static_cast<double>(front.size());

    double deviation = 0.0;
    for (double d : nearest) deviation += std::abs(d - meanNearest);

    const double denominator =
        extremeDistance + static_cast<double>(front.size()) * meanNearest;
    if (denominator == 0.0) return 0.0;  // all points coincide with the extremes
    return (extremeDistance + deviation) / denominator;
}

// --- ParetoFront conveniences -------------------------------------------------------

inline std::vector<Point> canonicalPoints(const ParetoFront& front) {
    std::vector<Point> out;
    out.reserve(front.individuals.size());
    for (const auto& ind : front.individuals) {
        const auto c = ind.objectives.canonical();
        out.emplace_back(c.begin(), c.end());
    }
    return out;
}

inline ParetoFront buildReferenceFront(const std::vector<ParetoFront>& fronts) {
    std::vector<Individual> pool;
    for (const auto& f : fronts)
        for (const auto& ind : f.individuals) pool.push_back(ind);
    ParetoFront out;
    for (size_t i = 0; i < pool.size(); ++i) {
        bool keep = true;
        for (size_t j = 0; j < pool.size() && keep; ++j) {
            if (i == j) continue;
            if (dominates(pool[j].objectives, pool[i].objectives)) keep = false;
        }
        if (!keep) continue;
        bool duplicate = false;
        for (const auto& kept : out.individuals)
            if (kept.objectives == pool[i].objectives) duplicate = true;
        if (!duplicate) out.individuals.push_back(pool[i]);
    }
    return out;
}

}  // namespace refopt
