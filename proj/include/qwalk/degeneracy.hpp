#pragma once

/*
 * Dispersion-surface sampling over the Brillouin zone and location /
 * classification of degeneracy points (conical touchings, flat-band
 * contacts, and degeneracy lines).
 */

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qwalk/eigensystem.hpp"
#include "qwalk/parallel.hpp"

namespace qwalk {

struct DispersionSurface {
    int dim_n = 0;
    int resolution = 0;          // samples per axis, uniform over [-pi, pi)
    int nbranches = 0;
    std::vector<double> omegas;  // site-major over the k-grid, branch fastest

    double k_of(int index) const {
        return -M_PI + 2.0 * M_PI * double(index) / double(resolution);
    }
};

inline DispersionSurface compute_dispersion_surface(const CoinMatrix& c, int resolution,
                                                    int threads = 1) {
    if (resolution < 2) throw ContractError("invalid-argument: resolution must be >= 2");
    DispersionSurface s;
    s.dim_n = c.dim_n();
    s.resolution = resolution;
    s.nbranches = c.size();
    std::size_t cells = 1;
    for (int a = 0; a < s.dim_n; ++a) cells *= std::size_t(resolution);
    s.omegas.resize(cells * std::size_t(s.nbranches));
    parallel_for(cells, threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t cell = b; cell < e; ++cell) {
            std::size_t rest = cell;
            KPoint k(s.dim_n);
            for (int a = s.dim_n - 1; a >= 0; --a) {
                k[a] = s.k_of(int(rest % std::size_t(resolution)));
                rest /= std::size_t(resolution);
            }
            const EigenSystem es = eigensystem_at(c, k);
            for (int j = 0; j < s.nbranches; ++j)
                s.omegas[cell * std::size_t(s.nbranches) + std::size_t(j)] = es.omegas[j];
        }
    });
    return s;
}

enum class DegeneracyClass { kConical, kConicalFlatContact, kLine, kLineFlatContact, kUnclassified };

inline std::string to_string(DegeneracyClass c) {
    switch (c) {
        case DegeneracyClass::kConical: return "conical";
        case DegeneracyClass::kConicalFlatContact: return "conical+flat-contact";
        case DegeneracyClass::kLine: return "line";
        case DegeneracyClass::kLineFlatContact: return "line+flat-contact";
        default: return "unclassified";
    }
}

struct DegeneracyLocation {
    KPoint k;
    std::vector<int> branches;  // 1-based labels of the degenerate set
    int multiplicity = 0;
    DegeneracyClass classification = DegeneracyClass::kUnclassified;
};

struct DegeneracyReport {
    double tolerance = 0;
    std::vector<DegeneracyLocation> locations;

    std::string to_text() const {
        std::ostringstream os;
        os.precision(17);
        for (const auto& loc : locations) {
            os << "k=(";
            for (int a = 0; a < loc.k.size(); ++a) os << (a ? "," : "") << loc.k[a];
            os << ") branches=(";
            for (std::size_t j = 0; j < loc.branches.size(); ++j)
                os << (j ? "," : "") << loc.branches[j];
            os << ") multiplicity=" << loc.multiplicity
               << " class=" << to_string(loc.classification) << "\n";
        }
        return os.str();
    }
};

namespace detail {

// Smallest circular gap between any two eigenphases of C_k, plus the maximal
// tol-degenerate cluster (branch indices, 0-based labeled order).
struct GapInfo {
    double min_gap = 0;
    std::vector<int> cluster;
};

inline GapInfo gap_info(const CoinMatrix& c, const KPoint& k, double tol) {
    const EigenSystem es = eigensystem_at(c, k);
    GapInfo g;
    g.min_gap = 2.0 * M_PI;
    const int d = int(es.omegas.size());
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            g.min_gap = std::min(g.min_gap, circular_distance(es.omegas[i], es.omegas[j]));
    // Union of branches linked by gaps < tol (transitive closure).
    std::vector<int> comp(static_cast<std::size_t>(d), 0);
    for (int i = 0; i < d; ++i) comp[std::size_t(i)] = i;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (circular_distance(es.omegas[i], es.omegas[j]) < tol) {
                const int a = comp[std::size_t(i)], b = comp[std::size_t(j)];
                for (int& x : comp)
                    if (x == b) x = a;
            }
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < d; ++i) groups[comp[std::size_t(i)]].push_back(i);
    for (const auto& [root, members] : groups)
        if (members.size() > g.cluster.size()) g.cluster = members;
    if (g.cluster.size() < 2) g.cluster.clear();
    return g;
}

// Local compass-search minimization of the smallest gap, refining a seed
// degeneracy location; step shrinks geometrically to the requested accuracy.
inline KPoint refine_degeneracy(const CoinMatrix& c, KPoint k, double step, double acc,
                                double tol) {
    double best = gap_info(c, k, tol).min_gap;
    while (step > acc) {
        bool moved = false;
        for (int a = 0; a < k.size() && !moved; ++a) {
            for (double d : {+step, -step}) {
                KPoint kt = k;
                kt[a] += d;
                const double g = gap_info(c, kt, tol).min_gap;
                if (g < best - 1e-15) {
                    best = g;
                    k = kt;
                    moved = true;
                    break;
                }
            }
        }
        if (!moved) step *= 0.5;
    }
    return k;
}

inline bool lex_kpoint_less(const KPoint& a, const KPoint& b) {
    for (int i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > 1e-9) return a[i] < b[i];
    return false;
}

}  // namespace detail

inline DegeneracyReport find_degeneracies(const CoinMatrix& c, int grid_resolution,
                                          double tol = 1e-6, int threads = 1) {
    if (grid_resolution < 16)
        throw ContractError("invalid-argument: grid_resolution must be >= 16");
    const int n = c.dim_n();
    std::size_t cells = 1;
    for (int a = 0; a < n; ++a) cells *= std::size_t(grid_resolution);

    auto k_at = [&](std::size_t cell) {
        KPoint k(n);
        std::size_t rest = cell;
        for (int a = n - 1; a >= 0; --a) {
            k[a] = -M_PI + 2.0 * M_PI * double(rest % std::size_t(grid_resolution)) /
                               double(grid_resolution);
            rest /= std::size_t(grid_resolution);
        }
        return k;
    };

    // Pass 1: find grid cells whose smallest eigenphase gap is below tol.
    std::vector<char> hit(cells, 0);
    std::vector<int> mult(cells, 0);
    parallel_for(cells, threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t cell = b; cell < e; ++cell) {
            const detail::GapInfo g = detail::gap_info(c, k_at(cell), tol);
            if (g.min_gap < tol) {
                hit[cell] = 1;
                mult[cell] = int(g.cluster.size());
            }
        }
    });

    // Pass 2: flood-fill hits into clusters; adjacency is grid-neighbor
    // (periodic) AND equal multiplicity, so a higher-multiplicity point
    // (e.g. the origin) splits off any lines running through it.
    std::vector<int> label(cells, -1);
    std::vector<std::vector<std::size_t>> clusters;
    std::vector<std::size_t> strides(static_cast<std::size_t>(n), 0);
    {
        std::size_t acc = 1;
        for (int a = n - 1; a >= 0; --a) {
            strides[std::size_t(a)] = acc;
            acc *= std::size_t(grid_resolution);
        }
    }
    for (std::size_t seed = 0; seed < cells; ++seed) {
        if (!hit[seed] || label[seed] >= 0) continue;
        const int id = int(clusters.size());
        clusters.push_back({});
        std::vector<std::size_t> stack{seed};
        label[seed] = id;
        while (!stack.empty()) {
            const std::size_t cell = stack.back();
            stack.pop_back();
            clusters[std::size_t(id)].push_back(cell);
            for (int a = 0; a < n; ++a) {
                const std::size_t coord = (cell / strides[std::size_t(a)]) %
                                          std::size_t(grid_resolution);
                for (int d : {+1, -1}) {
                    std::size_t nc = (coord + std::size_t(grid_resolution + d)) %
                                     std::size_t(grid_resolution);
                    const std::size_t next = cell + (nc - coord) * strides[std::size_t(a)];
                    if (hit[next] && label[next] < 0 && mult[next] == mult[cell]) {
                        label[next] = id;
                        stack.push_back(next);
                    }
                }
            }
        }
    }

    const double h = 2.0 * M_PI / double(grid_resolution);
    DegeneracyReport report;
    report.tolerance = tol;

    for (const auto& cl : clusters) {
        const bool extended = cl.size() > 1;
        // Representative: the lexicographically smallest member.
        KPoint kc = k_at(cl[0]);
        for (std::size_t m : cl) {
            const KPoint km = k_at(m);
            if (detail::lex_kpoint_less(km, kc)) kc = km;
        }
        if (!extended) kc = detail::refine_degeneracy(c, kc, h / 2.0, 1e-10, tol);

        const detail::GapInfo g = detail::gap_info(c, kc, tol);
        DegeneracyLocation loc;
        loc.k = kc;
        loc.multiplicity = int(g.cluster.size());
        for (int idx : g.cluster) loc.branches.push_back(idx + 1);

        // Flat-band contact: one of the degenerate phases stays put while the
        // probe moves off the point.
        const EigenSystem es0 = eigensystem_at(c, kc);
        bool flat = false;
        {
            KPoint kp = kc;
            kp[0] += 7 * h / 13.0;  // incommensurate probe offset
            if (n > 1) kp[1] += 5 * h / 17.0;
            const EigenSystem esp = eigensystem_at(c, kp);
            for (int idx : g.cluster)
                if (circular_distance(es0.omegas[idx], esp.omegas[idx]) < tol) flat = true;
        }

        bool conical = false;
        if (!extended) {
            // Linear gap growth along rays: gap(r) ~ a r with small residual.
            const int nrays = 8;
            int linear = 0;
            for (int r = 0; r < nrays; ++r) {
                double dir[3] = {0, 0, 0};
                const double th = 2.0 * M_PI * double(r) / double(nrays);
                dir[0] = std::cos(th);
                if (n >= 2) dir[1] = std::sin(th);
                if (n >= 3) dir[2] = 0.37 * std::sin(2.0 * th);
                double norm = 0;
                for (int a = 0; a < n; ++a) norm += dir[a] * dir[a];
                norm = std::sqrt(norm);
                const double r1 = h / 4.0, r2 = h / 2.0;
                KPoint ka = kc, kb = kc;
                for (int a = 0; a < n; ++a) {
                    ka[a] += r1 * dir[a] / norm;
                    kb[a] += r2 * dir[a] / norm;
                }
                const double g1 = detail::gap_info(c, ka, tol).min_gap;
                const double g2 = detail::gap_info(c, kb, tol).min_gap;
                if (g1 > tol && std::abs(g2 - 2.0 * g1) < 0.1 * g2) ++linear;
            }
            conical = linear >= nrays;
        }

        if (extended)
            loc.classification = flat ? DegeneracyClass::kLineFlatContact : DegeneracyClass::kLine;
        else if (conical)
            loc.classification =
                flat ? DegeneracyClass::kConicalFlatContact : DegeneracyClass::kConical;
        else
            loc.classification = DegeneracyClass::kUnclassified;

        // Zone-boundary points reappear at every +-pi image; report the orbit.
        std::vector<KPoint> images{loc.k};
        for (int a = 0; a < n; ++a) {
            if (extended) break;
            const std::size_t cur = images.size();
            for (std::size_t m = 0; m < cur; ++m) {
                if (std::abs(std::abs(images[m][a]) - M_PI) < 1e-6) {
                    KPoint mirror = images[m];
                    mirror[a] = -mirror[a];
                    images.push_back(mirror);
                }
            }
        }
        for (const KPoint& img : images) {
            DegeneracyLocation copy = loc;
            copy.k = img;
            report.locations.push_back(std::move(copy));
        }
    }

    std::sort(report.locations.begin(), report.locations.end(),
              [](const DegeneracyLocation& a, const DegeneracyLocation& b) {
                  return detail::lex_kpoint_less(a.k, b.k);
              });
    return report;
}

}  // namespace qwalk
