use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::{norm, ScalarField};
use crate::levelset::clip::clip_to_ball;
use crate::levelset::domain::Domain;
use crate::levelset::integrand::{GradientNorm, Integrand};

/// Maximum number of bracketed refinement steps per crossing edge.
pub const REFINE_STEPS: u32 = 30;

/// Relative gradient threshold below which a facet is reported as
/// near-critical.
pub const NEAR_CRITICAL: f64 = 1e-6;

/// A segment (n = 2) or triangle (n = 3) of a piecewise-linear level set.
/// Points are stored in three coordinates; the third is zero when n = 2.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub vertices: [[f64; 3]; 3],
    pub area: f64,
    pub centroid: [f64; 3],
    pub gradient: [f64; 3],
    pub weight: f64,
}

impl Facet {
    pub fn vertices(&self, dim: usize) -> &[[f64; 3]] {
        &self.vertices[..dim]
    }

    pub fn gradient_norm(&self) -> f64 {
        norm(&self.gradient)
    }

    /// Longest edge.
    pub fn diameter(&self, dim: usize) -> f64 {
        let v = self.vertices(dim);
        let mut d: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                d = d.max(dist(&v[i], &v[j]));
            }
        }
        d
    }
}

/// Extracted level set `{f = t}` with per-facet weight samples taken at
/// facet centroids.
///
/// Every vertex lies on a grid edge inside one simplex of a cell of side
/// `resolution`, so each centroid is within `sqrt(n)·h` of a point where
/// `f = t` up to refinement error. Consequently
/// `|f(centroid) − t| ≤ C·h·max|∇f|` on the cell with `C = sqrt(n)`
/// ([`LevelSetMesh::centroid_constant`]).
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSetMesh {
    pub dim: usize,
    pub level: f64,
    pub resolution: f64,
    pub facets: Vec<Facet>,
}

impl LevelSetMesh {
    pub fn centroid_constant(dim: usize) -> f64 {
        (dim as f64).sqrt()
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    pub fn len(&self) -> usize {
        self.facets.len()
    }

    /// Total (n−1)-dimensional measure.
    pub fn total_area(&self) -> f64 {
        self.facets.iter().map(|f| f.area).sum()
    }

    /// `Σ area·weight` using the weight samples stored at extraction.
    pub fn weighted_total(&self) -> f64 {
        self.facets.iter().map(|f| f.area * f.weight).sum()
    }

    /// Largest centroid gradient norm.
    pub fn gradient_scale(&self) -> f64 {
        self.facets.iter().map(Facet::gradient_norm).fold(0.0, f64::max)
    }

    /// Number of facets whose centroid gradient is below
    /// `NEAR_CRITICAL · gradient_scale`.
    pub fn near_critical_facets(&self) -> usize {
        let cut = NEAR_CRITICAL * self.gradient_scale();
        self.facets.iter().filter(|f| f.gradient_norm() < cut).count()
    }
}

/// Extracts `{f = t} ∩ domain` with weight `|∇f|`.
pub fn extract<F: ScalarField + ?Sized>(field: &F, t: f64, domain: &Domain, h: f64) -> Result<LevelSetMesh> {
    extract_weighted(field, t, domain, h, &GradientNorm)
}

/// Extracts `{f = t} ∩ domain`, sampling `weight` at every facet centroid.
///
/// Ball domains are meshed on their bounding box and clipped by
/// subdividing boundary facets to a quarter of `h`.
pub fn extract_weighted<F: ScalarField + ?Sized>(
    field: &F,
    t: f64,
    domain: &Domain,
    h: f64,
    weight: &dyn Integrand,
) -> Result<LevelSetMesh> {
    domain.validate()?;
    let n = domain.dim();
    if field.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: field.dim(),
        });
    }
    if n != 2 && n != 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "resolution h must be positive, got {h}"
        )));
    }
    let (lo, hi) = domain.bounds();
    let grid = Grid::new(&lo, &hi, h, domain.is_periodic());
    let raw = march(field, t, &grid)?;
    let facets = match domain {
        Domain::Ball { center, radius } => clip_to_ball(field, weight, raw, n, center, *radius, h / 4.0)?,
        _ => raw
            .into_par_iter()
            .map(|f| finish_facet(field, weight, f, n))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(LevelSetMesh {
        dim: n,
        level: t,
        resolution: h,
        facets,
    })
}

/// Raw facets of `{f = t}` on the grid covering `[lo, hi]`, before weights
/// are sampled.
pub(crate) fn extract_raw<F: ScalarField + ?Sized>(
    field: &F,
    t: f64,
    lo: &[f64],
    hi: &[f64],
    h: f64,
) -> Result<Vec<RawFacet>> {
    march(field, t, &Grid::new(lo, hi, h, false))
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct RawFacet {
    pub vertices: [[f64; 3]; 3],
}

impl RawFacet {
    pub fn centroid(&self, dim: usize) -> [f64; 3] {
        let mut c = [0.0; 3];
        for v in &self.vertices[..dim] {
            for a in 0..3 {
                c[a] += v[a];
            }
        }
        c.map(|x| x / dim as f64)
    }

    pub fn area(&self, dim: usize) -> f64 {
        let v = &self.vertices;
        if dim == 2 {
            dist(&v[0], &v[1])
        } else {
            let a = sub(&v[1], &v[0]);
            let b = sub(&v[2], &v[0]);
            0.5 * norm(&[
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ])
        }
    }
}

/// Samples gradient and weight at the centroid of a raw facet, scaling the
/// area by `fraction`.
pub(crate) fn facet_with_fraction<F: ScalarField + ?Sized>(
    field: &F,
    weight: &dyn Integrand,
    raw: RawFacet,
    dim: usize,
    fraction: f64,
) -> Result<Facet> {
    let centroid = raw.centroid(dim);
    let mut gradient = [0.0; 3];
    field.value_gradient(&centroid[..dim], &mut gradient[..dim]);
    let w = weight.eval(&centroid[..dim], &gradient[..dim])?;
    Ok(Facet {
        vertices: raw.vertices,
        area: raw.area(dim) * fraction,
        centroid,
        gradient,
        weight: w,
    })
}

fn finish_facet<F: ScalarField + ?Sized>(
    field: &F,
    weight: &dyn Integrand,
    raw: RawFacet,
    dim: usize,
) -> Result<Facet> {
    facet_with_fraction(field, weight, raw, dim, 1.0)
}

pub(crate) fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Uniform grid of cells. Periodic grids store `cells` nodes per axis and
/// wrap indices; others store `cells + 1`.
struct Grid {
    dim: usize,
    lo: [f64; 3],
    spacing: [f64; 3],
    cells: [usize; 3],
    nodes: [usize; 3],
}

impl Grid {
    fn new(lo: &[f64], hi: &[f64], h: f64, periodic: bool) -> Self {
        let dim = lo.len();
        let mut g = Grid {
            dim,
            lo: [0.0; 3],
            spacing: [1.0; 3],
            cells: [1; 3],
            nodes: [1; 3],
        };
        for a in 0..dim {
            let extent = hi[a] - lo[a];
            let m = ((extent / h).ceil() as usize).max(1);
            g.lo[a] = lo[a];
            g.cells[a] = m;
            g.spacing[a] = extent / m as f64;
            g.nodes[a] = if periodic { m } else { m + 1 };
        }
        g
    }

    fn point(&self, idx: [usize; 3]) -> [f64; 3] {
        let mut p = [0.0; 3];
        for a in 0..self.dim {
            p[a] = self.lo[a] + idx[a] as f64 * self.spacing[a];
        }
        p
    }

    /// Values of `f − t` on the node layer `k` (the last axis for n = 3).
    fn layer<F: ScalarField + ?Sized>(&self, field: &F, t: f64, k: usize) -> Vec<f64> {
        let (nx, ny) = (self.nodes[0], self.nodes[1]);
        let mut out = vec![0.0; nx * ny];
        out.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
            for (i, v) in row.iter_mut().enumerate() {
                let p = self.point([i, j, k]);
                *v = field.value(&p[..self.dim]) - t;
            }
        });
        out
    }
}

#[derive(Clone, Copy)]
struct Node {
    p: [f64; 3],
    g: f64,
    key: [usize; 3],
}

impl Node {
    fn inside(&self) -> bool {
        self.g >= 0.0
    }
}

// Kuhn triangulation of the unit cube: one tetrahedron per axis permutation.
const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn march<F: ScalarField + ?Sized>(field: &F, t: f64, grid: &Grid) -> Result<Vec<RawFacet>> {
    if grid.dim == 2 {
        let values = grid.layer(field, t, 0);
        let out: Vec<Vec<RawFacet>> = (0..grid.cells[1])
            .into_par_iter()
            .map(|j| {
                let mut facets = Vec::new();
                for i in 0..grid.cells[0] {
                    square(field, t, grid, &values, i, j, &mut facets);
                }
                facets
            })
            .collect();
        return Ok(out.into_iter().flatten().collect());
    }
    let first = grid.layer(field, t, 0);
    let mut cur = first.clone();
    let mut facets = Vec::new();
    for k in 0..grid.cells[2] {
        let next = if k + 1 == grid.nodes[2] {
            first.clone()
        } else {
            grid.layer(field, t, k + 1)
        };
        let slab: Vec<Vec<RawFacet>> = (0..grid.cells[1])
            .into_par_iter()
            .map(|j| {
                let mut out = Vec::new();
                for i in 0..grid.cells[0] {
                    cube(field, t, grid, [&cur, &next], [i, j, k], &mut out);
                }
                out
            })
            .collect();
        facets.extend(slab.into_iter().flatten());
        cur = next;
    }
    Ok(facets)
}

fn node(grid: &Grid, values: &[f64], idx: [usize; 3]) -> Node {
    let (nx, ny) = (grid.nodes[0], grid.nodes[1]);
    let g = values[(idx[1] % ny) * nx + idx[0] % nx];
    Node {
        p: grid.point(idx),
        g,
        key: idx,
    }
}

fn square<F: ScalarField + ?Sized>(
    field: &F,
    t: f64,
    grid: &Grid,
    values: &[f64],
    i: usize,
    j: usize,
    out: &mut Vec<RawFacet>,
) {
    let n00 = node(grid, values, [i, j, 0]);
    let n10 = node(grid, values, [i + 1, j, 0]);
    let n01 = node(grid, values, [i, j + 1, 0]);
    let n11 = node(grid, values, [i + 1, j + 1, 0]);
    for tri in [[n00, n10, n11], [n00, n01, n11]] {
        let inside = tri.iter().filter(|v| v.inside()).count();
        if inside == 0 || inside == 3 {
            continue;
        }
        // The vertex on the minority side is the one whose two edges cross.
        let lone = (0..3).find(|&a| tri[a].inside() == (inside == 1)).unwrap();
        let (b, c) = ((lone + 1) % 3, (lone + 2) % 3);
        let p = crossing(field, t, grid.dim, &tri[lone], &tri[b]);
        let q = crossing(field, t, grid.dim, &tri[lone], &tri[c]);
        if p != q {
            out.push(RawFacet {
                vertices: [p, q, [0.0; 3]],
            });
        }
    }
}

fn cube<F: ScalarField + ?Sized>(
    field: &F,
    t: f64,
    grid: &Grid,
    layers: [&[f64]; 2],
    base: [usize; 3],
    out: &mut Vec<RawFacet>,
) {
    // Corner `c` sits at offset (c & 1, (c >> 1) & 1, (c >> 2) & 1).
    let corners: [Node; 8] = std::array::from_fn(|c| {
        let idx = [base[0] + (c & 1), base[1] + ((c >> 1) & 1), base[2] + ((c >> 2) & 1)];
        let mut nd = node(grid, layers[(c >> 2) & 1], [idx[0], idx[1], 0]);
        nd.p = grid.point(idx);
        nd.key = idx;
        nd
    });
    let inside = corners.iter().filter(|c| c.inside()).count();
    if inside == 0 || inside == 8 {
        return;
    }
    // Kuhn tetrahedra share edges; each crossing is solved once per cube.
    let mut cache = [None; 64];
    let mut cross = |a: usize, b: usize| {
        let slot = &mut cache[a.min(b) * 8 + a.max(b)];
        *slot.get_or_insert_with(|| crossing(field, t, 3, &corners[a], &corners[b]))
    };
    for perm in PERMS {
        let v1 = 1 << perm[0];
        let v2 = v1 | (1 << perm[1]);
        let tet = [0, v1, v2, 7];
        tetra(tet.map(|c| corners[c].inside()), |a, b| cross(tet[a], tet[b]), out);
    }
}

/// Emits the facets of one tetrahedron; `cross(a, b)` is the crossing on
/// the edge between local vertices `a` and `b`.
fn tetra(inside_at: [bool; 4], mut cross: impl FnMut(usize, usize) -> [f64; 3], out: &mut Vec<RawFacet>) {
    let inside: Vec<usize> = (0..4).filter(|&a| inside_at[a]).collect();
    let outside: Vec<usize> = (0..4).filter(|&a| !inside_at[a]).collect();
    let mut emit = |a: [f64; 3], b: [f64; 3], c: [f64; 3]| {
        let f = RawFacet { vertices: [a, b, c] };
        if f.area(3) > 0.0 {
            out.push(f);
        }
    };
    match inside.len() {
        1 | 3 => {
            let (lone, rest) = if inside.len() == 1 {
                (inside[0], outside)
            } else {
                (outside[0], inside)
            };
            let p: Vec<[f64; 3]> = rest.iter().map(|&r| cross(lone, r)).collect();
            emit(p[0], p[1], p[2]);
        }
        2 => {
            let (a, b, c, d) = (inside[0], inside[1], outside[0], outside[1]);
            let ac = cross(a, c);
            let ad = cross(a, d);
            let bd = cross(b, d);
            let bc = cross(b, c);
            emit(ac, ad, bd);
            emit(ac, bd, bc);
        }
        _ => {}
    }
}

/// Point where `f = t` on the edge between nodes of opposite sides.
///
/// Starts from linear interpolation and refines with the Illinois variant
/// of regula falsi, which keeps the root bracketed. Endpoints are ordered
/// by grid index so shared edges resolve to identical points.
fn crossing<F: ScalarField + ?Sized>(field: &F, t: f64, dim: usize, a: &Node, b: &Node) -> [f64; 3] {
    let (a, b) = if a.key <= b.key { (a, b) } else { (b, a) };
    if a.g == 0.0 {
        return a.p;
    }
    if b.g == 0.0 {
        return b.p;
    }
    let at = |s: f64| {
        let mut p = [0.0; 3];
        for i in 0..3 {
            p[i] = a.p[i] + s * (b.p[i] - a.p[i]);
        }
        p
    };
    let tol = 1e-14 * (a.g.abs() + b.g.abs());
    let (mut s0, mut s1, mut g0, mut g1) = (0.0, 1.0, a.g, b.g);
    let mut s = g0 / (g0 - g1);
    let mut side = 0i8;
    for _ in 0..REFINE_STEPS {
        let p = at(s);
        let gs = field.value(&p[..dim]) - t;
        if gs.abs() <= tol {
            break;
        }
        if (gs >= 0.0) == (g0 >= 0.0) {
            s0 = s;
            g0 = gs;
            if side == -1 {
                g1 *= 0.5;
            }
            side = -1;
        } else {
            s1 = s;
            g1 = gs;
            if side == 1 {
                g0 *= 0.5;
            }
            side = 1;
        }
        if s1 - s0 <= 1e-15 {
            break;
        }
        s = (s0 * g1 - s1 * g0) / (g1 - g0);
        if !(s > s0 && s < s1) {
            s = 0.5 * (s0 + s1);
        }
    }
    at(s)
}
