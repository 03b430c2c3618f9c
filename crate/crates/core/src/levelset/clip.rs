//! Clipping of level-set facets against balls.
//!
//! A facet strictly inside the ball is kept whole. A facet that may cross
//! the sphere is split into pieces of diameter at most `h_min`; each piece
//! keeps the fraction of its area on which the linear interpolant of the
//! vertex radii is below the radius. The fraction is non-decreasing in the
//! radius, so cumulative radial profiles are monotone for non-negative
//! weights.

use rayon::prelude::*;

use crate::error::Result;
use crate::fields::ScalarField;
use crate::levelset::integrand::{Integrand, Unit};
use crate::levelset::mesh::{dist, facet_with_fraction, Facet, RawFacet};

const CHUNK: usize = 2048;
const MAX_SPLIT_LEVELS: u32 = 10;

fn radii(f: &RawFacet, dim: usize, center: &[f64; 3]) -> [f64; 3] {
    let mut r = [0.0; 3];
    for (a, v) in f.vertices[..dim].iter().enumerate() {
        r[a] = dist(v, center);
    }
    r
}

fn diameter(f: &RawFacet, dim: usize) -> f64 {
    let v = &f.vertices;
    if dim == 2 {
        dist(&v[0], &v[1])
    } else {
        dist(&v[0], &v[1]).max(dist(&v[1], &v[2])).max(dist(&v[0], &v[2]))
    }
}

fn mid(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])]
}

/// Uniform midpoint refinement until every piece has diameter `≤ h_min`.
pub(crate) fn subdivide(f: &RawFacet, dim: usize, h_min: f64) -> Vec<RawFacet> {
    let d = diameter(f, dim);
    let levels = if d <= h_min {
        0
    } else {
        ((d / h_min).log2().ceil() as u32).min(MAX_SPLIT_LEVELS)
    };
    let mut pieces = vec![*f];
    for _ in 0..levels {
        let mut next = Vec::with_capacity(pieces.len() * if dim == 2 { 2 } else { 4 });
        for p in &pieces {
            let v = &p.vertices;
            if dim == 2 {
                let m = mid(&v[0], &v[1]);
                next.push(RawFacet {
                    vertices: [v[0], m, [0.0; 3]],
                });
                next.push(RawFacet {
                    vertices: [m, v[1], [0.0; 3]],
                });
            } else {
                let (m01, m12, m02) = (mid(&v[0], &v[1]), mid(&v[1], &v[2]), mid(&v[0], &v[2]));
                next.push(RawFacet {
                    vertices: [v[0], m01, m02],
                });
                next.push(RawFacet {
                    vertices: [m01, v[1], m12],
                });
                next.push(RawFacet {
                    vertices: [m02, m12, v[2]],
                });
                next.push(RawFacet {
                    vertices: [m01, m12, m02],
                });
            }
        }
        pieces = next;
    }
    pieces
}

/// Fraction of a simplex on which the linear interpolant of the vertex
/// radii `r` is below `radius`.
pub(crate) fn inside_fraction(r: &[f64], radius: f64) -> f64 {
    let mut s = [0.0; 3];
    s[..r.len()].copy_from_slice(r);
    let s = &mut s[..r.len()];
    s.sort_by(f64::total_cmp);
    let hi = s[s.len() - 1];
    if radius >= hi {
        return 1.0;
    }
    if radius <= s[0] {
        return 0.0;
    }
    if s.len() == 2 {
        return (radius - s[0]) / (s[1] - s[0]);
    }
    let (a, b, c) = (s[0], s[1], s[2]);
    if radius <= b {
        (radius - a).powi(2) / ((b - a) * (c - a))
    } else {
        1.0 - (c - radius).powi(2) / ((c - b) * (c - a))
    }
}

fn center3(center: &[f64]) -> [f64; 3] {
    let mut c = [0.0; 3];
    c[..center.len()].copy_from_slice(center);
    c
}

pub(crate) fn clip_to_ball<F: ScalarField + ?Sized>(
    field: &F,
    weight: &dyn Integrand,
    raw: Vec<RawFacet>,
    dim: usize,
    center: &[f64],
    radius: f64,
    h_min: f64,
) -> Result<Vec<Facet>> {
    let c = center3(center);
    let parts: Vec<Result<Vec<Facet>>> = raw
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut out = Vec::with_capacity(chunk.len());
            for f in chunk {
                let r = radii(f, dim, &c);
                let rmax = r[..dim].iter().cloned().fold(0.0, f64::max);
                let rmin = r[..dim].iter().cloned().fold(f64::INFINITY, f64::min);
                if rmax <= radius {
                    out.push(facet_with_fraction(field, weight, *f, dim, 1.0)?);
                } else if rmin - diameter(f, dim) < radius {
                    for piece in subdivide(f, dim, h_min) {
                        let frac = inside_fraction(&radii(&piece, dim, &c)[..dim], radius);
                        if frac > 0.0 {
                            out.push(facet_with_fraction(field, weight, piece, dim, frac)?);
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let mut facets = Vec::new();
    for p in parts {
        facets.extend(p?);
    }
    Ok(facets)
}

/// Cumulative weighted measures of the facets inside each ball
/// `B(center, r_j)` for increasing `radii`, one profile per weight, plus
/// the centroid gradient norms of all sampled pieces.
pub(crate) fn radial_masses<F: ScalarField + ?Sized>(
    field: &F,
    weights: &[&dyn Integrand],
    raw: &[RawFacet],
    dim: usize,
    center: &[f64],
    radii_grid: &[f64],
    h_min: f64,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let m = radii_grid.len();
    let nw = weights.len();
    let c = center3(center);
    let masses = |f: &Facet| -> Result<Vec<f64>> {
        weights
            .iter()
            .map(|w| Ok(f.area * w.eval(&f.centroid[..dim], &f.gradient[..dim])?))
            .collect()
    };
    type Sums = (Vec<f64>, Vec<f64>, Vec<f64>);
    let parts: Vec<Result<Sums>> = raw
        .par_chunks(CHUNK)
        .map(|chunk| {
            // `whole[j]` collects facets first fully inside at r_j;
            // `partial[j]` collects clipped contributions at exactly r_j.
            // Both are laid out as `[weight][radius]`.
            let mut whole = vec![0.0; nw * m];
            let mut partial = vec![0.0; nw * m];
            let mut grads = Vec::new();
            for f in chunk {
                let r = radii(f, dim, &c);
                let rmax = r[..dim].iter().cloned().fold(0.0, f64::max);
                let rmin = r[..dim].iter().cloned().fold(f64::INFINITY, f64::min) - diameter(f, dim);
                let first_whole = radii_grid.partition_point(|&x| x < rmax);
                let first_partial = radii_grid.partition_point(|&x| x <= rmin);
                if first_partial >= m {
                    continue;
                }
                if first_partial >= first_whole {
                    let facet = facet_with_fraction(field, &Unit, *f, dim, 1.0)?;
                    for (w, v) in masses(&facet)?.into_iter().enumerate() {
                        whole[w * m + first_whole] += v;
                    }
                    grads.push(facet.gradient_norm());
                    continue;
                }
                // Pieces carry both the clipped and the whole contribution so
                // that the facet's mass is non-decreasing in r.
                for p in subdivide(f, dim, h_min) {
                    let piece = facet_with_fraction(field, &Unit, p, dim, 1.0)?;
                    grads.push(piece.gradient_norm());
                    let pr = radii(&p, dim, &c);
                    let vals = masses(&piece)?;
                    for j in first_partial..first_whole.min(m) {
                        let frac = inside_fraction(&pr[..dim], radii_grid[j]);
                        for (w, v) in vals.iter().enumerate() {
                            partial[w * m + j] += frac * v;
                        }
                    }
                    if first_whole < m {
                        for (w, v) in vals.iter().enumerate() {
                            whole[w * m + first_whole] += v;
                        }
                    }
                }
            }
            Ok((whole, partial, grads))
        })
        .collect();
    let mut whole = vec![0.0; nw * m];
    let mut partial = vec![0.0; nw * m];
    let mut grads = Vec::new();
    for p in parts {
        let (w, pa, g) = p?;
        for i in 0..nw * m {
            whole[i] += w[i];
            partial[i] += pa[i];
        }
        grads.extend(g);
    }
    let profiles = (0..nw)
        .map(|w| {
            let mut acc = 0.0;
            (0..m)
                .map(|j| {
                    acc += whole[w * m + j];
                    acc + partial[w * m + j]
                })
                .collect()
        })
        .collect();
    Ok((profiles, grads))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_of_segment_and_triangle() {
        assert_eq!(inside_fraction(&[1.0, 3.0], 2.0), 0.5);
        assert_eq!(inside_fraction(&[1.0, 3.0], 0.5), 0.0);
        assert_eq!(inside_fraction(&[1.0, 3.0], 3.0), 1.0);
        // Linear radii 0, 1, 1 on a triangle: fraction below s is s².
        assert!((inside_fraction(&[0.0, 1.0, 1.0], 0.5) - 0.25).abs() < 1e-15);
        // Radii 0, 0, 1: fraction below s is 1 − (1 − s)².
        assert!((inside_fraction(&[0.0, 0.0, 1.0], 0.5) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn fraction_is_monotone() {
        let r = [0.3, 0.7, 1.1];
        let mut prev = 0.0;
        for i in 0..=100 {
            let f = inside_fraction(&r, 0.2 + i as f64 * 0.01);
            assert!(f >= prev && (0.0..=1.0).contains(&f));
            prev = f;
        }
    }

    #[test]
    fn subdivision_preserves_area() {
        let f = RawFacet {
            vertices: [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.5]],
        };
        let pieces = subdivide(&f, 3, 0.1);
        let total: f64 = pieces.iter().map(|p| p.area(3)).sum();
        assert!((total - f.area(3)).abs() < 1e-12);
        assert!(pieces.iter().all(|p| diameter(p, 3) <= 0.1 + 1e-12));
    }
}
