#include "relucert/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "relucert/errors.hpp"
#include "relucert/parallel.hpp"

namespace relucert {

namespace {

// (n-1)-volume weight of the simplex spanned by the given vertices, via the
// Gram determinant of its edge vectors (constant factorials cancel in the
// normalized weights, so they are omitted).
double simplex_weight(const Frame& frame, const IndexSet& verts) {
    int d = static_cast<int>(verts.size()) - 1;
    if (d == 0) return 1.0;
    Matrix edges(d, frame.n);
    auto v0 = frame.row(verts.front());
    for (int i = 1; i <= d; ++i)
        for (int j = 0; j < frame.n; ++j)
            edges.at(i - 1, j) =
                frame.row(verts[static_cast<std::size_t>(i)])[static_cast<std::size_t>(j)] -
                v0[static_cast<std::size_t>(j)];
    Matrix g = gram(transpose(edges));
    try {
        Matrix l = cholesky(g);
        double det_sqrt = 1.0;
        for (int i = 0; i < d; ++i) det_sqrt *= l.at(i, i);
        return det_sqrt;
    } catch (const numeric_error&) {
        return 0.0;  // degenerate simplex
    }
}

std::vector<IndexSet> triangulate_point_set(const Matrix& pts);

std::vector<IndexSet> triangulate_recursive(const Matrix& pts) {
    if (pts.rows == pts.cols + 1) {
        IndexSet all(static_cast<std::size_t>(pts.rows));
        for (int i = 0; i < pts.rows; ++i) all[static_cast<std::size_t>(i)] = i;
        return {all};
    }
    return triangulate_point_set(pts);
}

// Orthonormal coordinates of the points inside their own affine hull.
Matrix affine_coordinates(const Matrix& pts, int target_dim) {
    int count = pts.rows;
    int n = pts.cols;
    Matrix diff(count - 1, n);
    for (int i = 1; i < count; ++i)
        for (int j = 0; j < n; ++j) diff.at(i - 1, j) = pts.at(i, j) - pts.at(0, j);
    EigenResult eig = jacobi_eigen(gram(diff));
    Matrix coords(count, target_dim);
    for (int i = 0; i < count; ++i) {
        for (int d = 0; d < target_dim; ++d) {
            int col = n - 1 - d;  // eigenvalues ascend; take the largest directions
            double c = 0.0;
            for (int j = 0; j < n; ++j)
                c += (pts.at(i, j) - pts.at(0, j)) * eig.vectors.at(j, col);
            coords.at(i, d) = c;
        }
    }
    return coords;
}

// Fan triangulation from vertex 0: cone over the recursively triangulated
// hull faces that do not contain vertex 0.
std::vector<IndexSet> triangulate_point_set(const Matrix& pts) {
    int count = pts.rows;
    int dim = pts.cols;
    if (dim == 1) {
        int lo = 0, hi = 0;
        for (int i = 1; i < count; ++i) {
            if (pts.at(i, 0) < pts.at(lo, 0)) lo = i;
            if (pts.at(i, 0) > pts.at(hi, 0)) hi = i;
        }
        return {IndexSet{std::min(lo, hi), std::max(lo, hi)}};
    }

    Frame local;
    local.m = count;
    local.n = dim;
    local.data = pts.data;
    // Shift away from the origin; hull combinatorics are translation-invariant
    // and enumerate_facets rejects zero rows.
    std::vector<double> shift(static_cast<std::size_t>(dim), 0.0);
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < dim; ++j) shift[static_cast<std::size_t>(j)] += pts.at(i, j);
    for (std::size_t j = 0; j < shift.size(); ++j) shift[j] = shift[j] / count + 3.14159;
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < dim; ++j)
            local.data[static_cast<std::size_t>(i) * dim + j] += shift[static_cast<std::size_t>(j)];

    FacetStructure fs = serial::enumerate_facets(local);
    std::vector<IndexSet> simplices;
    for (const Facet& ridge : fs.facets) {
        if (std::find(ridge.vertices.begin(), ridge.vertices.end(), 0) != ridge.vertices.end())
            continue;
        std::vector<IndexSet> sub;
        if (static_cast<int>(ridge.vertices.size()) == dim) {
            IndexSet all(ridge.vertices.size());
            for (std::size_t i = 0; i < ridge.vertices.size(); ++i) all[i] = static_cast<int>(i);
            sub.push_back(all);
        } else {
            Matrix ridge_pts(static_cast<int>(ridge.vertices.size()), dim);
            for (std::size_t i = 0; i < ridge.vertices.size(); ++i)
                for (int j = 0; j < dim; ++j)
                    ridge_pts.at(static_cast<int>(i), j) = pts.at(ridge.vertices[i], j);
            Matrix rc = affine_coordinates(ridge_pts, dim - 1);
            sub = triangulate_recursive(rc);
        }
        for (const IndexSet& s : sub) {
            IndexSet global{0};
            for (int li : s) global.push_back(ridge.vertices[static_cast<std::size_t>(li)]);
            std::sort(global.begin(), global.end());
            simplices.push_back(std::move(global));
        }
    }
    return simplices;
}

std::vector<BoundarySimplex> boundary_simplices(const Frame& frame, const FacetStructure& fs) {
    std::vector<BoundarySimplex> simplices;
    for (const Facet& f : fs.facets) {
        std::vector<IndexSet> parts;
        if (static_cast<int>(f.vertices.size()) == frame.n) {
            parts.push_back(f.vertices);
        } else {
            Matrix fpts(static_cast<int>(f.vertices.size()), frame.n);
            for (std::size_t i = 0; i < f.vertices.size(); ++i) {
                auto row = frame.row(f.vertices[i]);
                for (int j = 0; j < frame.n; ++j)
                    fpts.at(static_cast<int>(i), j) = row[static_cast<std::size_t>(j)];
            }
            Matrix coords = affine_coordinates(fpts, frame.n - 1);
            for (const IndexSet& local : triangulate_recursive(coords)) {
                IndexSet global;
                for (int li : local) global.push_back(f.vertices[static_cast<std::size_t>(li)]);
                std::sort(global.begin(), global.end());
                parts.push_back(std::move(global));
            }
        }
        for (IndexSet& p : parts) simplices.push_back(BoundarySimplex{std::move(p), 0.0});
    }
    double total = 0.0;
    for (auto& s : simplices) {
        total += simplex_weight(frame, s.verts);
        s.cumulative = total;
    }
    if (total <= 0.0) throw numeric_error("polytope boundary has zero surface measure");
    for (auto& s : simplices) s.cumulative /= total;
    return simplices;
}

}  // namespace

DomainSpec DomainSpec::ball(int n, double r) {
    if (r <= 0.0) throw parse_error("ball: radius must be positive");
    DomainSpec d;
    d.kind = DomainKind::ball;
    d.n = n;
    d.r = r;
    return d;
}

DomainSpec DomainSpec::sphere(int n) {
    DomainSpec d;
    d.kind = DomainKind::sphere;
    d.n = n;
    d.r = 1.0;
    return d;
}

DomainSpec DomainSpec::donut(int n, double r, double s) {
    if (r <= 0.0 || s < 0.0 || s >= r) throw parse_error("donut: requires 0 <= s < r");
    DomainSpec d;
    d.kind = DomainKind::donut;
    d.n = n;
    d.r = r;
    d.s = s;
    return d;
}

DomainSpec DomainSpec::nonneg_ball(int n, double r) {
    if (r <= 0.0) throw parse_error("nonneg_ball: radius must be positive");
    DomainSpec d;
    d.kind = DomainKind::nonneg_ball;
    d.n = n;
    d.r = r;
    return d;
}

DomainSpec DomainSpec::ball_complement(int n, double s) {
    if (s <= 0.0) throw parse_error("ball_complement: inner radius must be positive");
    DomainSpec d;
    d.kind = DomainKind::ball_complement;
    d.n = n;
    d.s = s;
    return d;
}

DomainSpec DomainSpec::polytope_boundary(Frame frame) {
    DomainSpec d;
    d.kind = DomainKind::polytope_boundary;
    d.n = frame.n;
    auto facets = std::make_shared<FacetStructure>(enumerate_facets(frame));
    d.simplices = std::make_shared<std::vector<BoundarySimplex>>(boundary_simplices(frame, *facets));
    d.facets = std::move(facets);
    d.frame = std::make_shared<Frame>(std::move(frame));
    return d;
}

DomainSpec DomainSpec::sample_cloud(Points points) {
    if (points.count == 0) throw parse_error("sample_cloud: point list is empty");
    DomainSpec d;
    d.kind = DomainKind::sample_cloud;
    d.n = points.n;
    d.cloud = std::make_shared<Points>(std::move(points));
    return d;
}

DomainSpec DomainSpec::full_space(int n) {
    DomainSpec d;
    d.kind = DomainKind::full_space;
    d.n = n;
    return d;
}

std::string DomainSpec::label() const {
    std::ostringstream os;
    switch (kind) {
        case DomainKind::ball: os << "ball:" << r; break;
        case DomainKind::sphere: os << "sphere"; break;
        case DomainKind::donut: os << "donut:" << r << ":" << s; break;
        case DomainKind::nonneg_ball: os << "nonneg_ball:" << r; break;
        case DomainKind::ball_complement: os << "ball_complement:" << s; break;
        case DomainKind::polytope_boundary: os << "polytope_boundary"; break;
        case DomainKind::sample_cloud: os << "sample_cloud:" << cloud->count; break;
        case DomainKind::full_space: os << "full_space"; break;
    }
    return os.str();
}

bool DomainSpec::bounded() const {
    return kind != DomainKind::ball_complement && kind != DomainKind::full_space;
}

double DomainSpec::sup_norm() const {
    switch (kind) {
        case DomainKind::ball:
        case DomainKind::donut:
        case DomainKind::nonneg_ball:
            return r;
        case DomainKind::sphere:
            return 1.0;
        case DomainKind::polytope_boundary: {
            double mx = 0.0;
            for (int i = 0; i < frame->m; ++i) mx = std::max(mx, norm2(frame->row(i)));
            return mx;
        }
        case DomainKind::sample_cloud: {
            double mx = 0.0;
            for (std::size_t i = 0; i < cloud->count; ++i) mx = std::max(mx, norm2(cloud->point(i)));
            return mx;
        }
        default:
            throw infeasible_error("sup_norm: domain is unbounded");
    }
}

bool contains(const DomainSpec& domain, std::span<const double> x, double tol) {
    if (static_cast<int>(x.size()) != domain.n) return false;
    double nrm = norm2(x);
    switch (domain.kind) {
        case DomainKind::ball:
            return nrm <= domain.r * (1.0 + tol);
        case DomainKind::sphere:
            return std::abs(nrm - 1.0) <= tol;
        case DomainKind::donut:
            return nrm <= domain.r * (1.0 + tol) && nrm >= domain.s * (1.0 - tol);
        case DomainKind::nonneg_ball: {
            if (nrm > domain.r * (1.0 + tol)) return false;
            for (double v : x)
                if (v < -tol * domain.r) return false;
            return true;
        }
        case DomainKind::ball_complement:
            return nrm >= domain.s * (1.0 - tol);
        case DomainKind::polytope_boundary: {
            // On the boundary: inside every half-space, tight in at least one.
            double mx = -std::numeric_limits<double>::infinity();
            for (const Facet& f : domain.facets->facets) {
                double d = dot(f.normal, x) - f.offset;
                if (d > tol + kFaceTol) return false;
                mx = std::max(mx, d);
            }
            return std::abs(mx) <= tol + kFaceTol;
        }
        case DomainKind::sample_cloud: {
            for (std::size_t i = 0; i < domain.cloud->count; ++i) {
                auto p = domain.cloud->point(i);
                double d2 = 0.0;
                for (std::size_t j = 0; j < x.size(); ++j) {
                    double diff = x[j] - p[j];
                    d2 += diff * diff;
                }
                if (std::sqrt(d2) <= tol * (1.0 + nrm)) return true;
            }
            return false;
        }
        case DomainKind::full_space:
            return true;
    }
    return false;
}

namespace {

void gaussian_direction(CounterRng& rng, std::span<double> out) {
    while (true) {
        for (double& v : out) v = rng.next_gaussian();
        double nrm = norm2({out.data(), out.size()});
        if (nrm > 1e-100) {
            for (double& v : out) v /= nrm;
            return;
        }
    }
}

}  // namespace

void sample_point_at(const DomainSpec& domain, std::uint64_t seed, std::size_t index,
                     std::span<double> out) {
    CounterRng rng(split_seed(seed, static_cast<std::uint64_t>(index)));
    const int n = domain.n;
    switch (domain.kind) {
        case DomainKind::sphere:
            gaussian_direction(rng, out);
            return;
        case DomainKind::ball: {
            gaussian_direction(rng, out);
            double t = domain.r * std::pow(rng.next_double(), 1.0 / n);
            for (double& v : out) v *= t;
            return;
        }
        case DomainKind::donut: {
            gaussian_direction(rng, out);
            double u = rng.next_double();
            double sn = std::pow(domain.s, n);
            double rn = std::pow(domain.r, n);
            double t = std::pow(sn + u * (rn - sn), 1.0 / n);
            for (double& v : out) v *= t;
            return;
        }
        case DomainKind::nonneg_ball: {
            gaussian_direction(rng, out);
            double t = domain.r * std::pow(rng.next_double(), 1.0 / n);
            for (double& v : out) v = std::abs(v) * t;
            return;
        }
        case DomainKind::full_space:
            for (double& v : out) v = rng.next_gaussian();
            return;
        case DomainKind::sample_cloud: {
            std::size_t pick = std::min<std::size_t>(
                domain.cloud->count - 1,
                static_cast<std::size_t>(rng.next_double() * domain.cloud->count));
            auto p = domain.cloud->point(pick);
            std::copy(p.begin(), p.end(), out.begin());
            return;
        }
        case DomainKind::polytope_boundary: {
            const auto& simplices = *domain.simplices;
            double u = rng.next_double();
            auto it = std::lower_bound(
                simplices.begin(), simplices.end(), u,
                [](const BoundarySimplex& s, double v) { return s.cumulative < v; });
            if (it == simplices.end()) it = std::prev(simplices.end());
            // Uniform barycentric coordinates: normalized Exp(1) draws.
            const IndexSet& verts = it->verts;
            std::vector<double> w(verts.size());
            double total = 0.0;
            for (double& wi : w) {
                double u1 = std::max(rng.next_double(), 0x1.0p-53);
                wi = -std::log(u1);
                total += wi;
            }
            std::fill(out.begin(), out.end(), 0.0);
            for (std::size_t k = 0; k < verts.size(); ++k) {
                auto vr = domain.frame->row(verts[k]);
                for (int j = 0; j < n; ++j)
                    out[static_cast<std::size_t>(j)] += (w[k] / total) * vr[static_cast<std::size_t>(j)];
            }
            return;
        }
        case DomainKind::ball_complement:
            throw infeasible_error("sample: ball complement is unbounded");
    }
}

Points sample_block(const DomainSpec& domain, std::uint64_t seed, std::size_t begin,
                    std::size_t count) {
    if (domain.kind == DomainKind::ball_complement)
        throw infeasible_error("sample: unsupported unbounded domain (ball complement)");
    Points pts;
    pts.n = domain.n;
    pts.count = count;
    pts.data.assign(count * static_cast<std::size_t>(domain.n), 0.0);
    const int threads = thread_count();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (long long j = 0; j < static_cast<long long>(count); ++j) {
        std::span<double> out{pts.data.data() + static_cast<std::size_t>(j) * domain.n,
                              static_cast<std::size_t>(domain.n)};
        sample_point_at(domain, seed, begin + static_cast<std::size_t>(j), out);
    }
    return pts;
}

SampleSequence sample(const DomainSpec& domain, std::size_t count, std::uint64_t seed) {
    SampleSequence seq;
    seq.seed = seed;
    seq.generator_id = kGeneratorId;
    seq.points = sample_block(domain, seed, 0, count);
    return seq;
}

double covering_radius_proxy(int n, std::size_t n_samples, double factor) {
    if (n_samples < 2) throw parse_error("covering_radius_proxy: N >= 2 required");
    double ratio = std::log(static_cast<double>(n_samples)) / static_cast<double>(n_samples);
    return factor * std::pow(ratio, 1.0 / n);
}

namespace {

double covering_radius_range(const Points& samples, const Points& probes, std::size_t begin,
                             std::size_t end) {
    double worst = 0.0;
    for (std::size_t p = begin; p < end; ++p) {
        auto probe = probes.point(p);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < samples.count; ++s) {
            auto sp = samples.point(s);
            double d2 = 0.0;
            for (std::size_t j = 0; j < probe.size(); ++j) {
                double diff = probe[j] - sp[j];
                d2 += diff * diff;
            }
            best = std::min(best, d2);
        }
        worst = std::max(worst, best);
    }
    return std::sqrt(worst);
}

}  // namespace

double covering_radius_empirical(const Points& samples, const Points& probes) {
    if (samples.count == 0 || probes.count == 0)
        throw parse_error("covering_radius_empirical: empty input");
    const int threads = thread_count();
    if (threads <= 1 || probes.count < 64)
        return covering_radius_range(samples, probes, 0, probes.count);
    double worst = 0.0;
#pragma omp parallel for schedule(static) num_threads(threads) reduction(max : worst)
    for (int t = 0; t < threads; ++t) {
        std::size_t chunk = (probes.count + threads - 1) / threads;
        std::size_t begin = static_cast<std::size_t>(t) * chunk;
        std::size_t end = std::min(probes.count, begin + chunk);
        if (begin < end) {
            double local = covering_radius_range(samples, probes, begin, end);
            worst = std::max(worst, local);
        }
    }
    return worst;
}

namespace serial {

double covering_radius_empirical(const Points& samples, const Points& probes) {
    if (samples.count == 0 || probes.count == 0)
        throw parse_error("covering_radius_empirical: empty input");
    return covering_radius_range(samples, probes, 0, probes.count);
}

}  // namespace serial

}  // namespace relucert
