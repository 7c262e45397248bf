//! Integral affine polytopes: rational polyhedra cut out by constraints
//! `a + x·α ≥ 0` (or `> 0`) with integer normals `α`, together with their
//! faces, strata, completeness test, and subdivision validation.
//!
//! The sign convention matches tropical inequalities: a monomial `t^{a+x·α}`
//! is bounded by `t^0` exactly when `a + x·α ≥ 0`.

use crate::arith::{rat_int, rat_to_string, Rat};
use crate::lattice::rat_rank_in_place;
use crate::linprog::{Infimum, System};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("polytope is empty")]
    Empty,
    #[error("ambient dimension {dim} exceeds the supported maximum {max}")]
    DimTooLarge { dim: usize, max: usize },
    #[error("functional is unbounded below on the polytope")]
    Unbounded,
    #[error("infimum is not attained on the polytope (strict constraints)")]
    InfimumNotAttained,
    #[error("point lies outside the polytope")]
    PointOutside,
    #[error("polytope has no vertices")]
    NoVertices,
    #[error("constraint length {got} does not match ambient dimension {want}")]
    BadConstraint { got: usize, want: usize },
}

/// One constraint `a + x·alpha ≥ 0` (`> 0` when `strict`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Constraint {
    pub a: Rat,
    pub alpha: Vec<i64>,
    pub strict: bool,
}

impl Constraint {
    pub fn new(a: Rat, alpha: Vec<i64>, strict: bool) -> Constraint {
        Constraint { a, alpha, strict }
    }

    pub fn closed(a: Rat, alpha: Vec<i64>) -> Constraint {
        Constraint { a, alpha, strict: false }
    }

    /// Exact value of `a + x·alpha` at a rational point.
    pub fn value_at(&self, x: &[Rat]) -> Rat {
        let mut v = self.a.clone();
        for (c, xi) in self.alpha.iter().zip(x) {
            v += rat_int(*c) * xi;
        }
        v
    }

    pub fn holds_at(&self, x: &[Rat]) -> bool {
        let v = self.value_at(x);
        if self.strict {
            v > Rat::zero()
        } else {
            v >= Rat::zero()
        }
    }

    /// gcd-reduce the normal, scaling the offset to match.
    fn normalized(&self) -> Constraint {
        let g = self.alpha.iter().fold(0i64, |acc, &x| num_integer::Integer::gcd(&acc, &x.abs()));
        if g <= 1 {
            return self.clone();
        }
        Constraint {
            a: self.a.clone() / rat_int(g),
            alpha: self.alpha.iter().map(|&x| x / g).collect(),
            strict: self.strict,
        }
    }

    fn rational_alpha(&self) -> Vec<Rat> {
        self.alpha.iter().map(|&c| rat_int(c)).collect()
    }
}

/// A stratum of a polytope: the relative interior of a face, identified by
/// the set of constraints tight on the whole face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    /// Indices of the constraints tight on the face (closed under implication).
    pub active: BTreeSet<usize>,
    /// Dimension of the face.
    pub dim: usize,
    /// An exact point in the relative interior.
    pub sample: Vec<Rat>,
}

/// A face of a polytope: the argmin locus of an integral functional.
#[derive(Clone, Debug)]
pub struct Face {
    /// Selecting functional; the face is where `x·alpha` is minimal.
    pub alpha: Vec<i64>,
    /// Minimum of `x·alpha` over the parent.
    pub min_value: Rat,
    /// Constraints of the parent tight on the face.
    pub active: BTreeSet<usize>,
    /// The face as a polytope (parent constraints plus the tight ones as
    /// equalities).
    pub polytope: AffinePolytope,
}

/// Rational polyhedron `{x : a_i + x·αⁱ ≥ 0 (or > 0)}` with integer normals.
/// Construction rejects empty sets; lower-dimensional (non-full) polyhedra
/// are allowed and report their affine-hull dimension separately.
#[derive(Clone, Debug)]
pub struct AffinePolytope {
    dim: usize,
    constraints: Vec<Constraint>,
    hull_dim: usize,
}

impl AffinePolytope {
    pub fn new(dim: usize, constraints: Vec<Constraint>) -> Result<AffinePolytope, PolytopeError> {
        for c in &constraints {
            if c.alpha.len() != dim {
                return Err(PolytopeError::BadConstraint { got: c.alpha.len(), want: dim });
            }
        }
        let constraints: Vec<Constraint> = constraints
            .iter()
            .map(Constraint::normalized)
            .filter(|c| {
                if c.alpha.iter().any(|&x| x != 0) {
                    return true;
                }
                // Constant constraint: keep it only when violated, so the
                // feasibility check below reports emptiness.
                if c.strict {
                    c.a <= Rat::zero()
                } else {
                    c.a < Rat::zero()
                }
            })
            .collect();
        let mut p = AffinePolytope { dim, constraints, hull_dim: 0 };
        if !p.system().feasible() {
            return Err(PolytopeError::Empty);
        }
        p.hull_dim = p.compute_hull_dim();
        Ok(p)
    }

    /// `ℝ^dim` with no constraints.
    pub fn whole_space(dim: usize) -> AffinePolytope {
        AffinePolytope { dim, constraints: Vec::new(), hull_dim: dim }
    }

    /// Convenience: closed constraints given as `(a, alpha)` integer pairs.
    pub fn from_closed(dim: usize, rows: &[(i64, Vec<i64>)]) -> Result<AffinePolytope, PolytopeError> {
        AffinePolytope::new(
            dim,
            rows.iter().map(|(a, al)| Constraint::closed(rat_int(*a), al.clone())).collect(),
        )
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the affine hull.
    pub fn hull_dim(&self) -> usize {
        self.hull_dim
    }

    pub fn is_full_dim(&self) -> bool {
        self.hull_dim == self.dim
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        x.len() == self.dim && self.constraints.iter().all(|c| c.holds_at(x))
    }

    /// Membership in the relative interior: every constraint not tight on
    /// the whole polytope must hold strictly.
    pub fn relative_interior_contains(&self, x: &[Rat]) -> bool {
        if !self.contains(x) {
            return false;
        }
        let implicit = self.implicit_equalities();
        self.constraints
            .iter()
            .enumerate()
            .all(|(i, c)| implicit.contains(&i) || c.value_at(x) > Rat::zero())
    }

    /// The same point set with all strict constraints relaxed.
    pub fn closure(&self) -> AffinePolytope {
        let constraints = self
            .constraints
            .iter()
            .map(|c| Constraint { strict: false, ..c.clone() })
            .collect();
        AffinePolytope { dim: self.dim, constraints, hull_dim: self.hull_dim }
    }

    /// Whether the polytope equals its closure, i.e. no strict constraint
    /// actually removes boundary.
    pub fn is_complete(&self) -> bool {
        let closed = self.closure();
        for c in &self.constraints {
            if !c.strict {
                continue;
            }
            // Complete iff the closure never touches the strict hyperplane.
            let mut sys = closed.system();
            sys.add_eq(&c.rational_alpha(), &c.a);
            if sys.feasible() {
                return false;
            }
        }
        true
    }

    pub(crate) fn system(&self) -> System {
        let mut sys = System::new(self.dim);
        for c in &self.constraints {
            sys.add(&c.rational_alpha(), &c.a, c.strict);
        }
        sys
    }

    /// An exact point of the polytope.
    pub fn sample_point(&self) -> Vec<Rat> {
        self.system().feasible_point().expect("constructed polytopes are nonempty")
    }

    /// Indices of constraints that are tight on the entire polytope.
    pub fn implicit_equalities(&self) -> BTreeSet<usize> {
        let sys = self.system();
        self.constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.strict && sys.implies_eq(&c.rational_alpha(), &c.a))
            .map(|(i, _)| i)
            .collect()
    }

    fn compute_hull_dim(&self) -> usize {
        let implicit = self.implicit_equalities();
        if implicit.is_empty() {
            return self.dim;
        }
        let mut rows: Vec<Vec<Rat>> =
            implicit.iter().map(|&i| self.constraints[i].rational_alpha()).collect();
        self.dim - rat_rank_in_place(&mut rows)
    }

    /// System describing the slice where the constraints in `active` hold
    /// with equality; the remaining non-strict constraints are kept strict
    /// when `relative_interior` is set.
    fn slice_system(&self, active: &BTreeSet<usize>, relative_interior: bool) -> System {
        let mut sys = System::new(self.dim);
        for (i, c) in self.constraints.iter().enumerate() {
            if active.contains(&i) {
                sys.add_eq(&c.rational_alpha(), &c.a);
            } else {
                sys.add(&c.rational_alpha(), &c.a, c.strict || relative_interior);
            }
        }
        sys
    }

    /// Close an active set under implication: add every constraint forced
    /// tight on the slice.
    fn close_active(&self, active: &BTreeSet<usize>) -> Option<BTreeSet<usize>> {
        let sys = self.slice_system(active, false);
        if !sys.feasible() {
            return None;
        }
        let mut closed = BTreeSet::new();
        for (i, c) in self.constraints.iter().enumerate() {
            if c.strict {
                continue;
            }
            if active.contains(&i) || sys.implies_eq(&c.rational_alpha(), &c.a) {
                closed.insert(i);
            }
        }
        Some(closed)
    }

    fn stratum_from_active(&self, active: BTreeSet<usize>) -> Stratum {
        let mut rows: Vec<Vec<Rat>> =
            active.iter().map(|&i| self.constraints[i].rational_alpha()).collect();
        let rank = rat_rank_in_place(&mut rows);
        let sample = self
            .slice_system(&active, true)
            .feasible_point()
            .expect("face relative interiors are nonempty");
        Stratum { active, dim: self.dim - rank, sample }
    }

    /// All strata (relative interiors of faces), sorted by ascending face
    /// dimension and then by active set. They partition the polytope.
    pub fn strata(&self) -> Vec<Stratum> {
        let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        let root = match self.close_active(&BTreeSet::new()) {
            Some(r) => r,
            None => return Vec::new(),
        };
        let mut queue = vec![root.clone()];
        seen.insert(root);
        while let Some(active) = queue.pop() {
            for i in 0..self.constraints.len() {
                if self.constraints[i].strict || active.contains(&i) {
                    continue;
                }
                let mut bigger = active.clone();
                bigger.insert(i);
                if let Some(closed) = self.close_active(&bigger) {
                    if seen.insert(closed.clone()) {
                        queue.push(closed);
                    }
                }
            }
        }
        let mut strata: Vec<Stratum> =
            seen.into_iter().map(|active| self.stratum_from_active(active)).collect();
        strata.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.active.cmp(&b.active)));
        strata
    }

    /// The face on which `x·alpha` attains its minimum.
    pub fn face_of(&self, alpha: &[i64]) -> Result<Face, PolytopeError> {
        assert_eq!(alpha.len(), self.dim);
        let obj: Vec<Rat> = alpha.iter().map(|&c| rat_int(c)).collect();
        let min_value = match self.system().infimum(&obj) {
            Infimum::Infeasible => return Err(PolytopeError::Empty),
            Infimum::Unbounded => return Err(PolytopeError::Unbounded),
            Infimum::Value { attained: false, .. } => {
                return Err(PolytopeError::InfimumNotAttained)
            }
            Infimum::Value { inf, .. } => inf,
        };
        // Slice by x·alpha = min and read off the constraints tight there.
        let mut sys = self.system();
        sys.add_eq(&obj, &(-min_value.clone()));
        let mut active = BTreeSet::new();
        for (i, c) in self.constraints.iter().enumerate() {
            if !c.strict && sys.implies_eq(&c.rational_alpha(), &c.a) {
                active.insert(i);
            }
        }
        let mut constraints = self.constraints.clone();
        constraints.push(Constraint::closed(-min_value.clone(), alpha.to_vec()));
        constraints.push(Constraint::closed(
            min_value.clone(),
            alpha.iter().map(|&c| -c).collect(),
        ));
        let polytope = AffinePolytope::new(self.dim, constraints)?;
        Ok(Face { alpha: alpha.to_vec(), min_value, active, polytope })
    }

    /// The stratum containing a point of the polytope.
    pub fn stratum_of_point(&self, x: &[Rat]) -> Result<Stratum, PolytopeError> {
        if !self.contains(x) {
            return Err(PolytopeError::PointOutside);
        }
        let active: BTreeSet<usize> = self
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.strict && c.value_at(x).is_zero())
            .map(|(i, _)| i)
            .collect();
        Ok(self.stratum_from_active(active))
    }

    /// Set equality as polyhedra, decided exactly.
    pub fn same_set_as(&self, other: &AffinePolytope) -> bool {
        self.dim == other.dim && self.subset_of(other) && other.subset_of(self)
    }

    /// Whether every point of `self` lies in `other`.
    pub fn subset_of(&self, other: &AffinePolytope) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let sys = self.system();
        other.constraints.iter().all(|c| sys.implies(&c.rational_alpha(), &c.a, c.strict))
    }

    /// Intersection, `None` when empty.
    pub fn intersect(&self, other: &AffinePolytope) -> Option<AffinePolytope> {
        assert_eq!(self.dim, other.dim);
        let mut constraints = self.constraints.clone();
        constraints.extend(other.constraints.iter().cloned());
        AffinePolytope::new(self.dim, constraints).ok()
    }

    /// Whether `candidate` (a subset of `self`) is a face of `self`.
    pub fn has_face(&self, candidate: &AffinePolytope) -> bool {
        if !candidate.subset_of(self) {
            return false;
        }
        // Constraints of self tight on the candidate.
        let cand_sys = candidate.system();
        let active: BTreeSet<usize> = self
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.strict && cand_sys.implies_eq(&c.rational_alpha(), &c.a))
            .map(|(i, _)| i)
            .collect();
        // The face generated by that active set must not exceed the candidate.
        let face_sys = self.slice_system(&active, false);
        candidate
            .constraints
            .iter()
            .all(|c| face_sys.implies(&c.rational_alpha(), &c.a, c.strict))
    }

    /// Deterministic key used to sort cells of a complex.
    pub(crate) fn sort_key(&self) -> (usize, Vec<String>) {
        let mut rows: Vec<String> = self
            .constraints
            .iter()
            .map(|c| format!("{:?}|{}|{}", c.alpha, rat_to_string(&c.a), c.strict))
            .collect();
        rows.sort();
        (self.hull_dim, rows)
    }
}

/// Outcome of checking a claimed subdivision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdivisionReport {
    pub valid: bool,
    /// Human-readable description of the first violation found.
    pub diagnostic: Option<String>,
}

impl SubdivisionReport {
    fn ok() -> SubdivisionReport {
        SubdivisionReport { valid: true, diagnostic: None }
    }

    fn fail(msg: String) -> SubdivisionReport {
        SubdivisionReport { valid: false, diagnostic: Some(msg) }
    }
}

/// Check that `pieces` form a subdivision of `parent`: closed sub-polytopes
/// of full dimension covering the parent, meeting pairwise along common
/// faces.
pub fn validate_subdivision(parent: &AffinePolytope, pieces: &[AffinePolytope]) -> SubdivisionReport {
    if pieces.is_empty() {
        return SubdivisionReport::fail("no pieces given".to_string());
    }
    for (k, piece) in pieces.iter().enumerate() {
        if piece.dim() != parent.dim() {
            return SubdivisionReport::fail(format!(
                "piece {k} has ambient dimension {} but the parent has {}",
                piece.dim(),
                parent.dim()
            ));
        }
        if piece.hull_dim() != parent.hull_dim() {
            return SubdivisionReport::fail(format!(
                "piece {k} has dimension {} but the parent has {}",
                piece.hull_dim(),
                parent.hull_dim()
            ));
        }
        if !piece.is_complete() {
            return SubdivisionReport::fail(format!("piece {k} is not closed"));
        }
        if !piece.subset_of(parent) {
            return SubdivisionReport::fail(format!("piece {k} is not contained in the parent"));
        }
    }
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            if pieces[i].same_set_as(&pieces[j]) {
                return SubdivisionReport::fail(format!("pieces {i} and {j} coincide"));
            }
            let inter = match pieces[i].intersect(&pieces[j]) {
                None => continue,
                Some(q) => q,
            };
            if !pieces[i].has_face(&inter) {
                return SubdivisionReport::fail(format!(
                    "intersection of pieces {i} and {j} is not a face of piece {i}"
                ));
            }
            if !pieces[j].has_face(&inter) {
                return SubdivisionReport::fail(format!(
                    "intersection of pieces {i} and {j} is not a face of piece {j}"
                ));
            }
        }
    }
    // Covering: a facet point of a piece interior to the parent must be
    // shared with some other piece, otherwise there is a gap beyond it.
    for (k, piece) in pieces.iter().enumerate() {
        let facet_dim = piece.hull_dim().saturating_sub(1);
        for stratum in piece.strata() {
            if stratum.dim != facet_dim || piece.hull_dim() == 0 {
                continue;
            }
            let x = &stratum.sample;
            if !parent.relative_interior_contains(x) {
                continue;
            }
            let covered = pieces.iter().enumerate().filter(|(_, p)| p.contains(x)).count();
            if covered < 2 {
                return SubdivisionReport::fail(format!(
                    "gap beyond a facet of piece {k} at an interior point of the parent"
                ));
            }
        }
    }
    SubdivisionReport::ok()
}

/// Serde mirror of the JSON wire format for polytopes.
#[derive(Serialize, Deserialize)]
pub struct PolytopeJson {
    pub dim: usize,
    pub constraints: Vec<ConstraintJson>,
}

#[derive(Serialize, Deserialize)]
pub struct ConstraintJson {
    pub a: String,
    pub alpha: Vec<i64>,
    #[serde(default)]
    pub strict: bool,
}

impl AffinePolytope {
    pub fn to_json(&self) -> PolytopeJson {
        PolytopeJson {
            dim: self.dim,
            constraints: self
                .constraints
                .iter()
                .map(|c| ConstraintJson {
                    a: rat_to_string(&c.a),
                    alpha: c.alpha.clone(),
                    strict: c.strict,
                })
                .collect(),
        }
    }

    pub fn from_json(json: &PolytopeJson) -> Result<AffinePolytope, PolytopeError> {
        let mut constraints = Vec::new();
        for c in &json.constraints {
            let a = crate::arith::rat_from_str(&c.a).ok_or(PolytopeError::BadConstraint {
                got: c.alpha.len(),
                want: json.dim,
            })?;
            constraints.push(Constraint::new(a, c.alpha.clone(), c.strict));
        }
        AffinePolytope::new(json.dim, constraints)
    }
}

/// Vertices of a polytope: points where the tight constraints have full
/// rank. Brute-force over constraint subsets; intended for low dimension.
pub fn vertices(p: &AffinePolytope) -> Vec<Vec<Rat>> {
    use itertools::Itertools;
    let m = p.dim();
    let n = p.constraints().len();
    let mut found: Vec<Vec<Rat>> = Vec::new();
    if m == 0 {
        found.push(Vec::new());
        return found;
    }
    for subset in (0..n).combinations(m) {
        let mat: Vec<Vec<Rat>> =
            subset.iter().map(|&i| p.constraints()[i].rational_alpha()).collect();
        let rhs: Vec<Rat> = subset.iter().map(|&i| -p.constraints()[i].a.clone()).collect();
        let x = match crate::lattice::rat_solve(&mat, &rhs) {
            Some(x) => x,
            None => continue,
        };
        if p.contains(&x) && !found.contains(&x) {
            found.push(x);
        }
    }
    found.sort();
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn quadrant2() -> AffinePolytope {
        AffinePolytope::from_closed(2, &[(0, vec![1, 0]), (0, vec![0, 1])]).unwrap()
    }

    fn triangle() -> AffinePolytope {
        // conv{(0,0),(1,0),(0,1)}: x ≥ 0, y ≥ 0, 1 − x − y ≥ 0
        AffinePolytope::from_closed(2, &[(0, vec![1, 0]), (0, vec![0, 1]), (1, vec![-1, -1])])
            .unwrap()
    }

    #[test]
    fn construction_rejects_empty() {
        let err = AffinePolytope::from_closed(1, &[(0, vec![1]), (-1, vec![-1])]);
        assert_eq!(err.unwrap_err(), PolytopeError::Empty);
    }

    #[test]
    fn strata_counts() {
        assert_eq!(triangle().strata().len(), 7);
        let ray = AffinePolytope::from_closed(1, &[(0, vec![1])]).unwrap();
        assert_eq!(ray.strata().len(), 2);
        let square = AffinePolytope::from_closed(
            2,
            &[(0, vec![1, 0]), (1, vec![-1, 0]), (0, vec![0, 1]), (1, vec![0, -1])],
        )
        .unwrap();
        assert_eq!(square.strata().len(), 9);
        // Dimension census for the triangle: one 2-stratum, three edges,
        // three vertices.
        let dims: Vec<usize> = triangle().strata().iter().map(|s| s.dim).collect();
        assert_eq!(dims.iter().filter(|&&d| d == 2).count(), 1);
        assert_eq!(dims.iter().filter(|&&d| d == 1).count(), 3);
        assert_eq!(dims.iter().filter(|&&d| d == 0).count(), 3);
    }

    #[test]
    fn strata_partition_sample_points() {
        let p = triangle();
        let strata = p.strata();
        // Interior points of every stratum land back in that stratum.
        for s in &strata {
            let found = p.stratum_of_point(&s.sample).unwrap();
            assert_eq!(found.active, s.active);
        }
        // A few explicit points.
        let inside = vec![rat(1, 4), rat(1, 4)];
        assert_eq!(p.stratum_of_point(&inside).unwrap().dim, 2);
        let vertex = vec![rat_int(0), rat_int(0)];
        assert_eq!(p.stratum_of_point(&vertex).unwrap().dim, 0);
        let outside = vec![rat_int(2), rat_int(2)];
        assert_eq!(p.stratum_of_point(&outside), Err(PolytopeError::PointOutside));
    }

    #[test]
    fn face_selection() {
        let q = quadrant2();
        // α = (1,0) selects the face x₁ = 0.
        let f = q.face_of(&[1, 0]).unwrap();
        assert_eq!(f.min_value, rat_int(0));
        assert_eq!(f.polytope.hull_dim(), 1);
        // The zero functional selects the whole polytope.
        let whole = q.face_of(&[0, 0]).unwrap();
        assert_eq!(whole.polytope.hull_dim(), 2);
        assert!(whole.active.is_empty());
        // Minimizing −x on [0,l] picks the endpoint x = l.
        let seg = AffinePolytope::from_closed(1, &[(0, vec![1]), (5, vec![-1])]).unwrap();
        let top = seg.face_of(&[-1]).unwrap();
        assert_eq!(top.min_value, rat_int(-5));
        assert!(top.polytope.contains(&[rat_int(5)]));
        assert_eq!(top.polytope.hull_dim(), 0);
        // Unbounded functional errors.
        assert_eq!(q.face_of(&[-1, 0]).unwrap_err(), PolytopeError::Unbounded);
    }

    #[test]
    fn completeness() {
        let closed = AffinePolytope::from_closed(1, &[(0, vec![1])]).unwrap();
        assert!(closed.is_complete());
        let open = AffinePolytope::new(
            1,
            vec![Constraint::new(rat_int(0), vec![1], true)],
        )
        .unwrap();
        assert!(!open.is_complete());
        // x ≥ 0 together with the redundant strict x > −1 is still complete.
        let redundant = AffinePolytope::new(
            1,
            vec![
                Constraint::closed(rat_int(0), vec![1]),
                Constraint::new(rat_int(1), vec![1], true),
            ],
        )
        .unwrap();
        assert!(redundant.is_complete());
    }

    #[test]
    fn subdivision_accepts_and_rejects() {
        let seg = AffinePolytope::from_closed(1, &[(0, vec![1]), (2, vec![-1])]).unwrap();
        let left = AffinePolytope::from_closed(1, &[(0, vec![1]), (1, vec![-1])]).unwrap();
        let right = AffinePolytope::from_closed(1, &[(-1, vec![1]), (2, vec![-1])]).unwrap();
        assert!(validate_subdivision(&seg, &[left.clone(), right.clone()]).valid);

        // Overlapping pieces [0, 3/2] and [1, 2]: the overlap is not a face.
        let wide = AffinePolytope::new(
            1,
            vec![
                Constraint::closed(rat_int(0), vec![1]),
                Constraint::closed(rat(3, 2), vec![-1]),
            ],
        )
        .unwrap();
        let report = validate_subdivision(&seg, &[wide, right.clone()]);
        assert!(!report.valid);
        assert!(report.diagnostic.unwrap().contains("pieces 0 and 1"));

        // A gap: pieces [0,1] alone do not cover [0,2].
        let report = validate_subdivision(&seg, &[left]);
        assert!(!report.valid);
        assert!(report.diagnostic.unwrap().contains("gap"));
    }

    #[test]
    fn subdivision_of_quadrant_by_diagonal() {
        let q = quadrant2();
        let below =
            AffinePolytope::from_closed(2, &[(0, vec![0, 1]), (0, vec![1, -1])]).unwrap();
        let above =
            AffinePolytope::from_closed(2, &[(0, vec![1, 0]), (0, vec![-1, 1])]).unwrap();
        assert!(validate_subdivision(&q, &[below, above]).valid);
    }

    #[test]
    fn vertex_enumeration() {
        let t = triangle();
        let vs = vertices(&t);
        assert_eq!(vs.len(), 3);
        assert!(vs.contains(&vec![rat_int(0), rat_int(0)]));
        assert!(vs.contains(&vec![rat_int(1), rat_int(0)]));
        assert!(vs.contains(&vec![rat_int(0), rat_int(1)]));
        // The quadrant has one vertex at the origin.
        assert_eq!(vertices(&quadrant2()), vec![vec![rat_int(0), rat_int(0)]]);
    }

    #[test]
    fn json_round_trip() {
        let p = triangle();
        let json = serde_json::to_string(&p.to_json()).unwrap();
        let parsed: PolytopeJson = serde_json::from_str(&json).unwrap();
        let q = AffinePolytope::from_json(&parsed).unwrap();
        assert!(p.same_set_as(&q));
    }
}
