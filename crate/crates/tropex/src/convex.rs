//! Exact convex hulls in ambient dimension ≤ 3, with primitive integer
//! facet normals, and normal fans of polytopes.

use crate::arith::{rat_int, Rat};
use crate::cone::Cone;
use crate::lattice::{primitive, rat_rank_in_place, rat_solve};
use crate::linprog::System;
use crate::polytope::{AffinePolytope, Constraint, PolytopeError};
use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// A convex hull: vertex list, outer facet normals, and the hull as a
/// constraint-defined polytope (facets plus affine-hull equalities when the
/// hull is lower-dimensional).
#[derive(Clone, Debug)]
pub struct Hull {
    ambient: usize,
    hull_dim: usize,
    vertices: Vec<Vec<Rat>>,
    facets: Vec<Facet>,
    polytope: AffinePolytope,
}

/// One facet `normal·x ≤ offset` with a primitive integer outer normal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: Rat,
}

impl Hull {
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.hull_dim
    }

    pub fn vertices(&self) -> &[Vec<Rat>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn polytope(&self) -> &AffinePolytope {
        &self.polytope
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.polytope.contains(x)
    }

    /// All integer points of the hull (it is bounded by construction).
    pub fn lattice_points(&self) -> Vec<Vec<i64>> {
        let d = self.ambient;
        if self.vertices.is_empty() {
            return Vec::new();
        }
        let mut bounds = Vec::with_capacity(d);
        for j in 0..d {
            let lo = self.vertices.iter().map(|v| v[j].clone()).min().unwrap();
            let hi = self.vertices.iter().map(|v| v[j].clone()).max().unwrap();
            let lo: i64 = lo.floor().to_integer().try_into().expect("desk-scale hull");
            let hi: i64 = hi.ceil().to_integer().try_into().expect("desk-scale hull");
            bounds.push((lo, hi));
        }
        let mut out = Vec::new();
        let mut cursor = vec![0i64; d];
        fn rec(
            bounds: &[(i64, i64)],
            depth: usize,
            cursor: &mut Vec<i64>,
            hull: &Hull,
            out: &mut Vec<Vec<i64>>,
        ) {
            if depth == bounds.len() {
                let q: Vec<Rat> = cursor.iter().map(|&c| rat_int(c)).collect();
                if hull.contains(&q) {
                    out.push(cursor.clone());
                }
                return;
            }
            for v in bounds[depth].0..=bounds[depth].1 {
                cursor[depth] = v;
                rec(bounds, depth + 1, cursor, hull, out);
            }
        }
        rec(&bounds, 0, &mut cursor, self, &mut out);
        out.sort();
        out
    }
}

/// Exact convex hull of rational points. The points may span an affine
/// subspace of lower dimension; the spanned dimension must be at most 3.
pub fn convex_hull(ambient: usize, points: &[Vec<Rat>]) -> Result<Hull, PolytopeError> {
    assert!(points.iter().all(|p| p.len() == ambient));
    let mut pts: Vec<Vec<Rat>> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.is_empty() {
        return Err(PolytopeError::Empty);
    }
    let p0 = pts[0].clone();
    // Independent direction basis of the affine hull.
    let mut basis: Vec<Vec<Rat>> = Vec::new();
    for p in &pts[1..] {
        let dir: Vec<Rat> = p.iter().zip(&p0).map(|(a, b)| a.clone() - b).collect();
        let mut trial = basis.clone();
        trial.push(dir.clone());
        let mut m = trial.clone();
        if rat_rank_in_place(&mut m) == trial.len() {
            basis = trial;
        }
    }
    let r = basis.len();
    if r > 3 {
        return Err(PolytopeError::DimTooLarge { dim: r, max: 3 });
    }

    // Affine-hull equalities: integer kernel of the direction span.
    let mut constraints: Vec<Constraint> = Vec::new();
    for n in direction_complement(ambient, &basis) {
        let c0: Rat = n.iter().zip(&p0).map(|(&a, b)| rat_int(a) * b).sum();
        // n·x = n·p0 as a pair of inequalities.
        constraints.push(Constraint::closed(-c0.clone(), n.clone()));
        constraints.push(Constraint::closed(c0, n.iter().map(|&a| -a).collect()));
    }

    // Coordinates of each point in the direction basis.
    let coords: Vec<Vec<Rat>> = pts
        .iter()
        .map(|p| {
            let dir: Vec<Rat> = p.iter().zip(&p0).map(|(a, b)| a.clone() - b).collect();
            in_basis_coords(&basis, &dir)
        })
        .collect();

    // Facets of the full-dimensional hull in coordinate space.
    let mut facets: Vec<Facet> = Vec::new();
    if r > 0 {
        let mut seen: Vec<(Vec<Rat>, Rat)> = Vec::new();
        for subset in (0..coords.len()).combinations(r) {
            let base = &coords[subset[0]];
            let dirs: Vec<Vec<Rat>> = subset[1..]
                .iter()
                .map(|&i| coords[i].iter().zip(base).map(|(a, b)| a.clone() - b).collect())
                .collect();
            let normal = match hyperplane_normal(&dirs, r) {
                Some(n) => n,
                None => continue,
            };
            let offset: Rat = normal.iter().zip(base).map(|(a, b)| a.clone() * b).sum();
            // Orient outward: all points on the ≤ side.
            let mut pos = false;
            let mut neg = false;
            for c in &coords {
                let v: Rat = normal.iter().zip(c).map(|(a, b)| a.clone() * b).sum();
                if v > offset {
                    pos = true;
                }
                if v < offset {
                    neg = true;
                }
            }
            let (normal, offset) = if pos && neg {
                continue;
            } else if pos {
                (normal.iter().map(|a| -a.clone()).collect::<Vec<Rat>>(), -offset)
            } else {
                (normal, offset)
            };
            if seen.iter().any(|(n, o)| same_halfspace(n, o, &normal, &offset)) {
                continue;
            }
            seen.push((normal.clone(), offset.clone()));
            // Map the normal back to an integer ambient normal.
            let n_amb = ambient_normal(ambient, &basis, &normal);
            let off_amb: Rat = {
                let shift: Rat = n_amb.iter().zip(&p0).map(|(&a, b)| rat_int(a) * b).sum();
                // Rescale the coordinate offset by the same factor used to
                // make the ambient normal integral.
                let scale = rescale_factor(&basis, &n_amb, &normal);
                offset * scale + shift
            };
            facets.push(Facet { normal: n_amb, offset: off_amb });
        }
    }
    facets.sort_by(|a, b| a.normal.cmp(&b.normal).then_with(|| a.offset.cmp(&b.offset)));
    facets.dedup();
    for f in &facets {
        constraints.push(Constraint::closed(f.offset.clone(), f.normal.iter().map(|&a| -a).collect()));
    }
    let polytope = AffinePolytope::new(ambient, constraints)?;

    // Vertices: points admitting a strictly separating functional.
    let mut vertices: Vec<Vec<Rat>> = Vec::new();
    for (i, c) in coords.iter().enumerate() {
        if r == 0 || is_vertex(c, &coords, r) {
            vertices.push(pts[i].clone());
        }
    }
    vertices.sort();
    Ok(Hull { ambient, hull_dim: r, vertices, facets, polytope })
}

/// Integer basis of the orthogonal complement of the span of `dirs`.
fn direction_complement(ambient: usize, dirs: &[Vec<Rat>]) -> Vec<Vec<i64>> {
    // Solve n·d = 0 for all directions: integer kernel of the matrix whose
    // rows are the directions, cleared to integers.
    let rows: Vec<Vec<BigInt>> = dirs
        .iter()
        .map(|d| {
            let lcm = d.iter().fold(BigInt::from(1), |acc, r| acc.lcm(r.denom()));
            d.iter().map(|r| r.numer() * (&lcm / r.denom())).collect()
        })
        .collect();
    let m = crate::lattice::IntMatrix::from_bigint_rows(if rows.is_empty() {
        vec![vec![BigInt::zero(); ambient]]
    } else {
        rows
    });
    m.kernel_basis()
        .into_iter()
        .map(|k| {
            let ints: Vec<i64> =
                k.iter().map(|v| i64::try_from(v).expect("desk-scale kernel")).collect();
            primitive(&ints)
        })
        .filter(|k| k.iter().any(|&x| x != 0))
        .collect()
}

/// Solve `basis·λ = dir` for λ (consistent by construction).
fn in_basis_coords(basis: &[Vec<Rat>], dir: &[Rat]) -> Vec<Rat> {
    let r = basis.len();
    if r == 0 {
        return Vec::new();
    }
    let ambient = dir.len();
    // Pick r coordinate rows making the basis matrix square and invertible.
    for rows in (0..ambient).combinations(r) {
        let mat: Vec<Vec<Rat>> =
            rows.iter().map(|&i| basis.iter().map(|b| b[i].clone()).collect()).collect();
        let rhs: Vec<Rat> = rows.iter().map(|&i| dir[i].clone()).collect();
        if let Some(sol) = rat_solve(&mat, &rhs) {
            return sol;
        }
    }
    unreachable!("direction basis has full rank");
}

/// One-dimensional normal to the span of `dirs` inside ℚ^r; `None` unless
/// the span has dimension exactly r − 1.
fn hyperplane_normal(dirs: &[Vec<Rat>], r: usize) -> Option<Vec<Rat>> {
    let mut m = dirs.to_vec();
    if rat_rank_in_place(&mut m) != r - 1 {
        return None;
    }
    // Kernel of the direction matrix.
    let rows: Vec<Vec<BigInt>> = dirs
        .iter()
        .map(|d| {
            let lcm = d.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
            d.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
        })
        .collect();
    let m = crate::lattice::IntMatrix::from_bigint_rows(if rows.is_empty() {
        vec![vec![BigInt::zero(); r]]
    } else {
        rows
    });
    let kernel = m.kernel_basis();
    if kernel.len() != 1 {
        return None;
    }
    Some(kernel[0].iter().map(|v| Rat::from_integer(v.clone())).collect())
}

/// Integer ambient normal representing the coordinate-space normal `ñ`:
/// a solution of `n·basis_j = ñ_j` scaled to primitive integers.
fn ambient_normal(ambient: usize, basis: &[Vec<Rat>], coord_normal: &[Rat]) -> Vec<i64> {
    let r = basis.len();
    for cols in (0..ambient).combinations(r) {
        let mat: Vec<Vec<Rat>> =
            basis.iter().map(|b| cols.iter().map(|&j| b[j].clone()).collect()).collect();
        if let Some(sol) = rat_solve(&mat, coord_normal) {
            let mut n = vec![Rat::zero(); ambient];
            for (k, &j) in cols.iter().enumerate() {
                n[j] = sol[k].clone();
            }
            let lcm = n.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
            let ints: Vec<i64> = n
                .iter()
                .map(|x| i64::try_from(&(x.numer() * (&lcm / x.denom()))).expect("desk scale"))
                .collect();
            return primitive(&ints);
        }
    }
    unreachable!("basis has full rank");
}

/// Factor relating the primitive ambient normal back to the coordinate
/// normal: `n_amb·basis_j = scale · ñ_j`.
fn rescale_factor(basis: &[Vec<Rat>], n_amb: &[i64], coord_normal: &[Rat]) -> Rat {
    for (b, nc) in basis.iter().zip(coord_normal) {
        if !nc.is_zero() {
            let dot: Rat = n_amb.iter().zip(b).map(|(&a, x)| rat_int(a) * x).sum();
            return dot / nc;
        }
    }
    rat_int(1)
}

fn same_halfspace(n1: &[Rat], o1: &Rat, n2: &[Rat], o2: &Rat) -> bool {
    // Positive proportionality.
    for (a, b) in n1.iter().zip(n2) {
        if a.is_zero() != b.is_zero() {
            return false;
        }
        if !a.is_zero() {
            let k = b.clone() / a;
            if k.is_negative() || k.is_zero() {
                return false;
            }
            let scaled: Vec<Rat> = n1.iter().map(|x| x.clone() * &k).collect();
            return &scaled[..] == n2 && &(o1.clone() * &k) == o2;
        }
    }
    o1.is_zero() == o2.is_zero()
}

/// Whether `p` is a vertex: some functional strictly separates it from the
/// other points.
fn is_vertex(p: &[Rat], all: &[Vec<Rat>], r: usize) -> bool {
    let mut sys = System::new(r + 1); // functional c plus margin δ
    for q in all {
        if q == p {
            continue;
        }
        // c·p − c·q − δ ≥ 0
        let mut coeffs: Vec<Rat> = p.iter().zip(q).map(|(a, b)| a.clone() - b).collect();
        coeffs.push(rat_int(-1));
        sys.add(&coeffs, &Rat::zero(), false);
    }
    let mut margin = vec![Rat::zero(); r + 1];
    margin[r] = rat_int(1);
    sys.add(&margin, &rat_int(-1), false); // δ ≥ 1
    sys.feasible()
}

/// A fan: the maximal cones of a polyhedral decomposition by cones. Rays
/// are primitive.
#[derive(Clone, Debug)]
pub struct Fan {
    dim: usize,
    maximal: Vec<Cone>,
}

impl Fan {
    pub fn from_maximal_cones(dim: usize, maximal: Vec<Cone>) -> Fan {
        Fan { dim, maximal }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn maximal_cones(&self) -> &[Cone] {
        &self.maximal
    }

    /// Sorted primitive ray generators of all maximal cones.
    pub fn rays(&self) -> Vec<Vec<i64>> {
        let mut rays: Vec<Vec<i64>> = self
            .maximal
            .iter()
            .flat_map(|c| c.generators().iter().cloned())
            .collect();
        rays.sort();
        rays.dedup();
        rays
    }

    /// Maximal cones containing the direction.
    pub fn cones_containing(&self, x: &[Rat]) -> Vec<usize> {
        self.maximal
            .iter()
            .enumerate()
            .filter(|(_, c)| c.contains(x))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Normal fan of a polytope of dimension ≤ 3: one maximal cone per vertex,
/// spanned by the outer normals of the facets through that vertex. Complete
/// exactly when the polytope is bounded.
pub fn normal_fan(p: &AffinePolytope) -> Result<Fan, PolytopeError> {
    let m = p.dim();
    if m > 3 {
        return Err(PolytopeError::DimTooLarge { dim: m, max: 3 });
    }
    if !p.is_full_dim() {
        return Err(PolytopeError::BadConstraint { got: p.hull_dim(), want: m });
    }
    let verts = crate::polytope::vertices(p);
    if verts.is_empty() {
        return Err(PolytopeError::NoVertices);
    }
    // Facet-defining constraints: tight sets of dimension m−1.
    let facet_normals: Vec<(usize, Vec<i64>)> = p
        .strata()
        .iter()
        .filter(|s| s.dim + 1 == m)
        .filter_map(|s| s.active.first().map(|&i| (i, primitive(&p.constraints()[i].alpha))))
        .collect();
    let mut maximal = Vec::new();
    for v in &verts {
        let outer: Vec<Vec<i64>> = facet_normals
            .iter()
            .filter(|(i, _)| p.constraints()[*i].value_at(v).is_zero())
            .map(|(_, alpha)| alpha.iter().map(|&a| -a).collect())
            .collect();
        maximal.push(Cone::from_generators(m, &outer));
    }
    Ok(Fan::from_maximal_cones(m, maximal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn pt(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn standard_triangle() {
        let hull = convex_hull(2, &[pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1])]).unwrap();
        assert_eq!(hull.dim(), 2);
        assert_eq!(hull.vertices().len(), 3);
        assert_eq!(hull.facets().len(), 3);
        assert!(hull.contains(&[rat(1, 4), rat(1, 4)]));
        assert!(!hull.contains(&[rat_int(1), rat_int(1)]));
    }

    #[test]
    fn interior_edge_point_is_not_a_vertex() {
        // 2Δ₂ with (1,1) on the hypotenuse.
        let hull =
            convex_hull(2, &[pt(&[0, 0]), pt(&[2, 0]), pt(&[0, 2]), pt(&[1, 1])]).unwrap();
        assert_eq!(hull.vertices().len(), 3);
        assert!(!hull.vertices().contains(&pt(&[1, 1])));
        assert_eq!(hull.facets().len(), 3);
    }

    #[test]
    fn degenerate_segment_in_the_plane() {
        let hull = convex_hull(2, &[pt(&[0, 0]), pt(&[2, 0]), pt(&[1, 0])]).unwrap();
        assert_eq!(hull.dim(), 1);
        assert_eq!(hull.vertices(), &[pt(&[0, 0]), pt(&[2, 0])]);
        assert_eq!(hull.lattice_points(), vec![vec![0, 0], vec![1, 0], vec![2, 0]]);
    }

    #[test]
    fn lattice_points_of_dilated_simplex() {
        let hull = convex_hull(2, &[pt(&[0, 0]), pt(&[2, 0]), pt(&[0, 2])]).unwrap();
        assert_eq!(hull.lattice_points().len(), 6);
    }

    #[test]
    fn triangle_normal_fan() {
        let t = AffinePolytope::from_closed(
            2,
            &[(0, vec![1, 0]), (0, vec![0, 1]), (1, vec![-1, -1])],
        )
        .unwrap();
        let fan = normal_fan(&t).unwrap();
        assert_eq!(fan.maximal_cones().len(), 3);
        assert_eq!(fan.rays(), vec![vec![-1, 0], vec![0, -1], vec![1, 1]]);
    }

    #[test]
    fn square_normal_fan() {
        let sq = AffinePolytope::from_closed(
            2,
            &[(0, vec![1, 0]), (1, vec![-1, 0]), (0, vec![0, 1]), (1, vec![0, -1])],
        )
        .unwrap();
        let fan = normal_fan(&sq).unwrap();
        assert_eq!(fan.maximal_cones().len(), 4);
        assert_eq!(
            fan.rays(),
            vec![vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, 0]]
        );
    }

    #[test]
    fn fan_covers_random_directions() {
        let t = AffinePolytope::from_closed(
            2,
            &[(0, vec![1, 0]), (0, vec![0, 1]), (1, vec![-1, -1])],
        )
        .unwrap();
        let fan = normal_fan(&t).unwrap();
        for (a, b) in [(3i64, 1i64), (-2, 5), (-1, -1), (7, -3), (0, 4)] {
            let x = vec![rat_int(a), rat_int(b)];
            assert!(!fan.cones_containing(&x).is_empty(), "({a},{b}) uncovered");
        }
    }

    #[test]
    fn cube_normal_fan_has_six_rays() {
        let cube = AffinePolytope::from_closed(
            3,
            &[
                (0, vec![1, 0, 0]),
                (1, vec![-1, 0, 0]),
                (0, vec![0, 1, 0]),
                (1, vec![0, -1, 0]),
                (0, vec![0, 0, 1]),
                (1, vec![0, 0, -1]),
            ],
        )
        .unwrap();
        let fan = normal_fan(&cube).unwrap();
        assert_eq!(fan.maximal_cones().len(), 8);
        assert_eq!(fan.rays().len(), 6);
    }
}
