//! Rational polyhedral cones, dualization between generator and constraint
//! descriptions, and Hilbert bases of pointed cones.

use crate::arith::{rat_int, Rat};
use crate::lattice::{primitive, rat_rank_in_place};
use crate::linprog::{Infimum, System};
use itertools::Itertools;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConeError {
    #[error("cone is not pointed")]
    NotPointed,
    #[error("cone dimension {dim} exceeds the supported maximum {max}")]
    DimTooLarge { dim: usize, max: usize },
}

/// A rational polyhedral cone, carrying both a generating set and a
/// constraint description `{x : n·x ≥ 0}`. Both are kept primitive.
#[derive(Clone, Debug)]
pub struct Cone {
    dim: usize,
    generators: Vec<Vec<i64>>,
    normals: Vec<Vec<i64>>,
    pointed: bool,
}

impl Cone {
    /// Cone spanned by integer generators.
    pub fn from_generators(dim: usize, generators: &[Vec<i64>]) -> Cone {
        assert!(generators.iter().all(|g| g.len() == dim));
        let mut gens: Vec<Vec<i64>> = generators
            .iter()
            .map(|g| primitive(g))
            .filter(|g| g.iter().any(|&x| x != 0))
            .collect();
        gens.sort();
        gens.dedup();
        let normals = normals_from_generators(dim, &gens);
        let pointed = grading_functional(dim, &gens).is_some() || gens.is_empty();
        Cone { dim, generators: gens, normals, pointed }
    }

    /// Cone cut out by integer constraint normals. Requires a pointed cone;
    /// generator recovery for cones with lineality is not supported.
    pub fn from_normals(dim: usize, normals: &[Vec<i64>]) -> Result<Cone, ConeError> {
        assert!(normals.iter().all(|n| n.len() == dim));
        let mut norms: Vec<Vec<i64>> = normals
            .iter()
            .map(|n| primitive(n))
            .filter(|n| n.iter().any(|&x| x != 0))
            .collect();
        norms.sort();
        norms.dedup();
        let generators = extreme_rays(dim, &norms);
        // Pointed iff the recovered rays really span the cone.
        let cone = Cone { dim, generators: generators.clone(), normals: norms.clone(), pointed: true };
        if !(grading_functional(dim, &generators).is_some() || generators.is_empty()) {
            return Err(ConeError::NotPointed);
        }
        // Lineality would make some normal-feasible direction unreachable
        // from the rays; detect it via the kernel of the normal matrix.
        let mut rows: Vec<Vec<Rat>> =
            norms.iter().map(|n| n.iter().map(|&c| rat_int(c)).collect()).collect();
        let rank = rat_rank_in_place(&mut rows);
        let lineality = dim - rank;
        if lineality > 0 {
            return Err(ConeError::NotPointed);
        }
        Ok(cone)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn normals(&self) -> &[Vec<i64>] {
        &self.normals
    }

    pub fn is_pointed(&self) -> bool {
        self.pointed
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.normals.iter().all(|n| {
            let mut v = Rat::zero();
            for (c, xi) in n.iter().zip(x) {
                v += rat_int(*c) * xi;
            }
            !v.is_negative()
        })
    }

    pub fn contains_int(&self, x: &[i64]) -> bool {
        self.normals.iter().all(|n| n.iter().zip(x).map(|(&a, &b)| a as i128 * b as i128).sum::<i128>() >= 0)
    }

    /// The unique minimal generating set of the semigroup `C ∩ ℤ^dim`.
    pub fn hilbert_basis(&self) -> Result<Vec<Vec<i64>>, ConeError> {
        if self.dim > 3 {
            return Err(ConeError::DimTooLarge { dim: self.dim, max: 3 });
        }
        hilbert_basis_any_dim(self)
    }
}

/// Hilbert basis without the public dimension cap; homogenization puts
/// chart computations one dimension above the cap.
pub(crate) fn hilbert_basis_any_dim(cone: &Cone) -> Result<Vec<Vec<i64>>, ConeError> {
    if !cone.pointed {
        return Err(ConeError::NotPointed);
    }
    if cone.generators.is_empty() {
        return Ok(Vec::new());
    }
    let dim = cone.dim;
    let grading = grading_functional(dim, &cone.generators).ok_or(ConeError::NotPointed)?;
    let grade = |x: &[i64]| -> i64 { grading.iter().zip(x).map(|(&a, &b)| a * b).sum() };
    // Candidate superset: lattice points of the cone with grading at most
    // the total grading of the generators. This contains the fundamental
    // parallelepiped points of every simplicial subcone, hence generates.
    let budget: i64 = cone.generators.iter().map(|g| grade(g)).sum();
    let bbox = graded_bounding_box(cone, &grading, budget);
    let mut candidates: Vec<Vec<i64>> = Vec::new();
    let mut cursor = vec![0i64; dim];
    enumerate_box(&bbox, 0, &mut cursor, &mut |point| {
        if point.iter().all(|&x| x == 0) {
            return;
        }
        if grade(point) <= budget && cone.contains_int(point) {
            candidates.push(point.to_vec());
        }
    });
    for g in &cone.generators {
        if !candidates.contains(g) {
            candidates.push(g.clone());
        }
    }
    candidates.sort_by_key(|x| (grade(x), x.clone()));
    // Keep the irreducibles: x stays unless x − y lands back in the cone
    // for some already accepted y.
    let mut basis: Vec<Vec<i64>> = Vec::new();
    for x in candidates {
        let reducible = basis.iter().any(|y| {
            let diff: Vec<i64> = x.iter().zip(y).map(|(&a, &b)| a - b).collect();
            diff.iter().any(|&c| c != 0) && cone.contains_int(&diff)
        });
        if !reducible {
            basis.push(x);
        }
    }
    basis.sort();
    Ok(basis)
}

/// An integer functional strictly positive on all generators; exists iff
/// the cone they span is pointed.
fn grading_functional(dim: usize, generators: &[Vec<i64>]) -> Option<Vec<i64>> {
    if generators.is_empty() {
        return Some(vec![0; dim]);
    }
    let mut sys = System::new(dim);
    for g in generators {
        let coeffs: Vec<Rat> = g.iter().map(|&c| rat_int(c)).collect();
        sys.add(&coeffs, &rat_int(-1), false); // g·ℓ ≥ 1
    }
    let point = sys.feasible_point()?;
    // Clear denominators to get an integer functional.
    let lcm = point.iter().fold(num_bigint::BigInt::from(1), |acc, r| {
        num_integer::Integer::lcm(&acc, r.denom())
    });
    let ints: Vec<i64> = point
        .iter()
        .map(|r| {
            let v = r.numer() * (&lcm / r.denom());
            i64::try_from(&v).expect("grading fits i64 at desk scale")
        })
        .collect();
    Some(ints)
}

/// Coordinate bounds of `{x ∈ cone : grading·x ≤ budget}`.
fn graded_bounding_box(cone: &Cone, grading: &[i64], budget: i64) -> Vec<(i64, i64)> {
    let dim = cone.dim;
    let mut sys = System::new(dim);
    for n in &cone.normals {
        let coeffs: Vec<Rat> = n.iter().map(|&c| rat_int(c)).collect();
        sys.add(&coeffs, &Rat::zero(), false);
    }
    let neg: Vec<Rat> = grading.iter().map(|&c| rat_int(-c)).collect();
    sys.add(&neg, &rat_int(budget), false);
    let mut bounds = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut obj = vec![Rat::zero(); dim];
        obj[j] = rat_int(1);
        let lo = match sys.infimum(&obj) {
            Infimum::Value { inf, .. } => inf.floor().to_integer().try_into().unwrap_or(i64::MIN),
            _ => unreachable!("graded slice of a pointed cone is bounded"),
        };
        obj[j] = rat_int(-1);
        let hi = match sys.infimum(&obj) {
            Infimum::Value { inf, .. } => {
                (-inf).ceil().to_integer().try_into().unwrap_or(i64::MAX)
            }
            _ => unreachable!("graded slice of a pointed cone is bounded"),
        };
        bounds.push((lo, hi));
    }
    bounds
}

fn enumerate_box(bounds: &[(i64, i64)], depth: usize, cursor: &mut Vec<i64>, f: &mut impl FnMut(&[i64])) {
    if depth == bounds.len() {
        f(cursor);
        return;
    }
    for v in bounds[depth].0..=bounds[depth].1 {
        cursor[depth] = v;
        enumerate_box(bounds, depth + 1, cursor, f);
    }
}

/// Constraint description of `cone(generators)` via projection of
/// `{x = Σ tᵢ gᵢ, t ≥ 0}` onto the `x` block.
pub(crate) fn normals_from_generators(dim: usize, generators: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let k = generators.len();
    let mut sys = System::new(dim + k);
    for j in 0..dim {
        let mut coeffs = vec![Rat::zero(); dim + k];
        coeffs[j] = rat_int(1);
        for (i, g) in generators.iter().enumerate() {
            coeffs[dim + i] = rat_int(-g[j]);
        }
        sys.add_eq(&coeffs, &Rat::zero());
    }
    for i in 0..k {
        let mut coeffs = vec![Rat::zero(); dim + k];
        coeffs[dim + i] = rat_int(1);
        sys.add(&coeffs, &Rat::zero(), false);
    }
    let projected = sys.project(dim).expect("cone projection is feasible");
    let mut normals: Vec<Vec<i64>> = projected
        .rows_rational()
        .into_iter()
        .filter(|(coeffs, _, _)| coeffs.iter().any(|c| !c.is_zero()))
        .map(|(coeffs, _, _)| {
            let ints: Vec<i64> = coeffs
                .iter()
                .map(|c| {
                    debug_assert!(c.denom() == &num_bigint::BigInt::from(1));
                    i64::try_from(c.numer()).expect("normal fits i64 at desk scale")
                })
                .collect();
            primitive(&ints)
        })
        .collect();
    normals.sort();
    normals.dedup();
    // Drop redundant rows.
    let mut keep: Vec<Vec<i64>> = Vec::new();
    for i in 0..normals.len() {
        let mut sys = System::new(dim);
        for (j, n) in normals.iter().enumerate() {
            if j != i {
                let coeffs: Vec<Rat> = n.iter().map(|&c| rat_int(c)).collect();
                sys.add(&coeffs, &Rat::zero(), false);
            }
        }
        let coeffs: Vec<Rat> = normals[i].iter().map(|&c| rat_int(c)).collect();
        if !sys.implies(&coeffs, &Rat::zero(), false) {
            keep.push(normals[i].clone());
        }
    }
    if keep.is_empty() && !normals.is_empty() {
        keep.push(normals[0].clone());
    }
    keep
}

/// Extreme rays of a pointed cone `{x : n·x ≥ 0}`: one-dimensional kernels
/// of normal subsets, filtered to the cone and reduced to an irredundant
/// generating set.
pub(crate) fn extreme_rays(dim: usize, normals: &[Vec<i64>]) -> Vec<Vec<i64>> {
    if dim == 0 {
        return Vec::new();
    }
    let mut candidates: Vec<Vec<i64>> = Vec::new();
    let mut push_candidate = |ray: Vec<i64>| {
        if ray.iter().any(|&x| x != 0) {
            let p = primitive(&ray);
            for signed in [p.clone(), p.iter().map(|&x| -x).collect()] {
                let ok = normals.iter().all(|n| {
                    n.iter().zip(&signed).map(|(&a, &b)| a as i128 * b as i128).sum::<i128>() >= 0
                });
                if ok && !candidates.contains(&signed) {
                    candidates.push(signed);
                }
            }
        }
    };
    if dim == 1 {
        push_candidate(vec![1]);
        push_candidate(vec![-1]);
    } else {
        for subset in (0..normals.len()).combinations(dim - 1) {
            let rows: Vec<Vec<Rat>> = subset
                .iter()
                .map(|&i| normals[i].iter().map(|&c| rat_int(c)).collect())
                .collect();
            if let Some(kernel) = one_dim_kernel(&rows, dim) {
                push_candidate(kernel);
            }
        }
    }
    candidates.sort();
    // Irredundant subset: drop rays that are conic combinations of the rest.
    let mut keep: Vec<Vec<i64>> = Vec::new();
    for i in 0..candidates.len() {
        let others: Vec<Vec<i64>> = candidates
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, r)| r.clone())
            .collect();
        if !in_conic_hull(dim, &candidates[i], &others) {
            keep.push(candidates[i].clone());
        }
    }
    keep
}

/// Whether `x` is a nonnegative combination of `rays`.
fn in_conic_hull(dim: usize, x: &[i64], rays: &[Vec<i64>]) -> bool {
    let k = rays.len();
    let mut sys = System::new(k);
    for j in 0..dim {
        let coeffs: Vec<Rat> = rays.iter().map(|r| rat_int(r[j])).collect();
        sys.add_eq(&coeffs, &rat_int(-x[j]));
    }
    for i in 0..k {
        let mut coeffs = vec![Rat::zero(); k];
        coeffs[i] = rat_int(1);
        sys.add(&coeffs, &Rat::zero(), false);
    }
    sys.feasible()
}

fn one_dim_kernel(rows: &[Vec<Rat>], dim: usize) -> Option<Vec<i64>> {
    let mut a: Vec<Vec<Rat>> = rows.to_vec();
    let rank = rat_rank_in_place(&mut a);
    if rank != dim - 1 {
        return None;
    }
    // Solve the reduced system for the kernel direction.
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut col = 0;
    for r in 0..rank {
        while col < dim && a[r][col].is_zero() {
            col += 1;
        }
        if col == dim {
            break;
        }
        pivots.push((r, col));
        col += 1;
    }
    let free: usize = (0..dim).find(|c| !pivots.iter().any(|&(_, pc)| pc == *c))?;
    let mut kernel = vec![Rat::zero(); dim];
    kernel[free] = rat_int(1);
    for &(r, pc) in pivots.iter().rev() {
        let mut v = Rat::zero();
        for c in pc + 1..dim {
            v += a[r][c].clone() * &kernel[c];
        }
        kernel[pc] = -v / &a[r][pc];
    }
    // Clear denominators.
    let lcm = kernel.iter().fold(num_bigint::BigInt::from(1), |acc, r| {
        num_integer::Integer::lcm(&acc, r.denom())
    });
    Some(
        kernel
            .iter()
            .map(|r| {
                let v = r.numer() * (&lcm / r.denom());
                i64::try_from(&v).expect("ray fits i64 at desk scale")
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_cone_basis() {
        let c = Cone::from_generators(2, &[vec![1, 0], vec![0, 1]]);
        assert!(c.is_pointed());
        assert_eq!(c.hilbert_basis().unwrap(), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn singular_cone_basis() {
        // cone{(1,0),(1,2)} needs the interior generator (1,1).
        let c = Cone::from_generators(2, &[vec![1, 0], vec![1, 2]]);
        assert_eq!(c.hilbert_basis().unwrap(), vec![vec![1, 0], vec![1, 1], vec![1, 2]]);
        let c = Cone::from_generators(2, &[vec![1, 0], vec![1, 3]]);
        assert_eq!(
            c.hilbert_basis().unwrap(),
            vec![vec![1, 0], vec![1, 1], vec![1, 2], vec![1, 3]]
        );
    }

    #[test]
    fn non_pointed_rejected() {
        let c = Cone::from_generators(2, &[vec![1, 0], vec![-1, 0], vec![0, 1]]);
        assert!(!c.is_pointed());
        assert_eq!(c.hilbert_basis(), Err(ConeError::NotPointed));
    }

    #[test]
    fn dimension_guard() {
        let c = Cone::from_generators(
            4,
            &[vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
        );
        assert_eq!(c.hilbert_basis(), Err(ConeError::DimTooLarge { dim: 4, max: 3 }));
    }

    #[test]
    fn dualization_round_trip() {
        let gens = vec![vec![1, 0], vec![1, 2]];
        let c = Cone::from_generators(2, &gens);
        // The H-description must cut out the same set.
        for x in [vec![1i64, 1], vec![2, 1], vec![1, 2], vec![0, 1], vec![-1, 0], vec![1, 3]] {
            let inside = in_conic_hull(2, &x, &gens);
            assert_eq!(c.contains_int(&x), inside, "{x:?}");
        }
        // Round trip through normals.
        let back = Cone::from_normals(2, c.normals()).unwrap();
        let mut gens_sorted = back.generators().to_vec();
        gens_sorted.sort();
        assert_eq!(gens_sorted, vec![vec![1, 0], vec![1, 2]]);
    }

    #[test]
    fn hilbert_generates_small_lattice_points() {
        // Brute-force oracle: every lattice point with small coordinates is
        // an ℕ-combination of the basis.
        let cone = Cone::from_generators(2, &[vec![1, 0], vec![1, 2]]);
        let basis = cone.hilbert_basis().unwrap();
        for x in 0..=6i64 {
            for y in 0..=12i64 {
                let p = vec![x, y];
                if p.iter().all(|&c| c == 0) || !cone.contains_int(&p) {
                    continue;
                }
                assert!(decomposes(&cone, &p, &basis), "({x},{y}) not generated by {basis:?}");
            }
        }
    }

    fn decomposes(cone: &Cone, p: &[i64], basis: &[Vec<i64>]) -> bool {
        if p.iter().all(|&c| c == 0) {
            return true;
        }
        for b in basis {
            let rest: Vec<i64> = p.iter().zip(b).map(|(&a, &c)| a - c).collect();
            if cone.contains_int(&rest) && decomposes(cone, &rest, basis) {
                return true;
            }
        }
        false
    }

    #[test]
    fn minimality_no_element_is_a_sum() {
        let cone = Cone::from_generators(2, &[vec![1, 0], vec![1, 3]]);
        let basis = cone.hilbert_basis().unwrap();
        for (i, h) in basis.iter().enumerate() {
            for (j, a) in basis.iter().enumerate() {
                for (k, b) in basis.iter().enumerate() {
                    if i == j && i == k {
                        continue;
                    }
                    let sum: Vec<i64> = a.iter().zip(b).map(|(&x, &y)| x + y).collect();
                    assert_ne!(h, &sum, "basis element {h:?} = {a:?} + {b:?} ({i},{j},{k})");
                }
            }
        }
    }
}
