//! Exploded polynomials: semiring evaluation, tropicalization, Newton
//! polytopes, regular subdivisions from coefficient lifts, weighted corner
//! loci, and the balancing check.
//!
//! The corner locus of `f = Σ c_α t^{a_α} z^α` is the set where the minimum
//! of the affine forms `a_α + x·α` is attained at least twice. Cells are
//! enumerated exactly by their sets of minimizing terms; the weight of a
//! codimension-one cell is the lattice length of the dual edge in the
//! regular subdivision of the Newton polytope.

use crate::arith::{rat_int, Gaussian, Rat};
use crate::charts::{eval_monomial, ChartPoint, Monomial};
use crate::complex::{direction_lattice, PolyhedralComplex, WeightedComplex};
use crate::convex::{convex_hull, Hull};
use crate::lattice::primitive;
use crate::linprog::System;
use crate::polytope::{AffinePolytope, Constraint, PolytopeError};
use crate::semiring::ExplodedValue;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("terms share the exponent vector {alpha:?} but have different t-exponents")]
    DuplicateExponentConflict { alpha: Vec<i64> },
    #[error("polynomial has no terms")]
    EmptyPolynomial,
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("balancing is implemented for one-complexes and for codimension-one complexes in 3-space")]
    UnsupportedDimension,
}

/// A finite sum of exploded monomials `c · t^a · z^α` in `m` variables.
/// No two terms share an exponent vector; construction merges duplicates.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplodedPolynomial {
    m: usize,
    terms: Vec<Monomial>,
}

impl ExplodedPolynomial {
    pub fn new(m: usize, raw_terms: Vec<Monomial>) -> Result<ExplodedPolynomial, PolyError> {
        let mut merged: Vec<Monomial> = Vec::new();
        for term in raw_terms {
            assert_eq!(term.alpha.len(), m, "term arity mismatch");
            match merged.iter_mut().find(|t| t.alpha == term.alpha) {
                None => merged.push(term),
                Some(existing) => {
                    if existing.a != term.a {
                        return Err(PolyError::DuplicateExponentConflict { alpha: term.alpha });
                    }
                    existing.coeff += term.coeff;
                }
            }
        }
        merged.retain(|t| !(t.coeff.re.is_zero() && t.coeff.im.is_zero()));
        if merged.is_empty() {
            return Err(PolyError::EmptyPolynomial);
        }
        merged.sort_by(|s, t| s.alpha.cmp(&t.alpha).then_with(|| s.a.cmp(&t.a)));
        Ok(ExplodedPolynomial { m, terms: merged })
    }

    pub fn variables(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    /// Semiring sum of the term values at a point.
    pub fn evaluate(&self, point: &ChartPoint) -> ExplodedValue {
        assert_eq!(point.exp_coords.len(), self.m, "point arity mismatch");
        self.terms
            .iter()
            .map(|t| eval_monomial(point, t))
            .reduce(|a, b| a + b)
            .expect("polynomials are nonempty")
    }

    /// Whether the value at the point has zero coefficient (the point lies
    /// in the locus of non-invertibility).
    pub fn in_zero_locus(&self, point: &ChartPoint) -> bool {
        self.evaluate(point).has_zero_coeff()
    }

    /// The exponent-only shadow: `x ↦ min_α (a_α + x·α)`.
    pub fn tropicalize(&self) -> TropicalPLFunction {
        TropicalPLFunction {
            pieces: self.terms.iter().map(|t| (t.a.clone(), t.alpha.clone())).collect(),
        }
    }

    /// Convex hull of the exponent vectors.
    pub fn newton_polytope(&self) -> Result<Hull, PolyError> {
        if self.m > 3 {
            return Err(PolytopeError::DimTooLarge { dim: self.m, max: 3 }.into());
        }
        let points: Vec<Vec<Rat>> = self
            .terms
            .iter()
            .map(|t| t.alpha.iter().map(|&c| rat_int(c)).collect())
            .collect();
        Ok(convex_hull(self.m, &points)?)
    }
}

/// A piecewise-linear convex function `min_i (a_i + x·αⁱ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TropicalPLFunction {
    pub pieces: Vec<(Rat, Vec<i64>)>,
}

impl TropicalPLFunction {
    pub fn value(&self, x: &[Rat]) -> Rat {
        self.pieces.iter().map(|p| piece_value(p, x)).min().expect("nonempty")
    }

    /// Indices of the pieces attaining the minimum at `x`.
    pub fn argmin(&self, x: &[Rat]) -> Vec<usize> {
        let v = self.value(x);
        self.pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| piece_value(p, x) == v)
            .map(|(i, _)| i)
            .collect()
    }
}

fn piece_value(piece: &(Rat, Vec<i64>), x: &[Rat]) -> Rat {
    let mut v = piece.0.clone();
    for (&c, xi) in piece.1.iter().zip(x) {
        v += rat_int(c) * xi;
    }
    v
}

/// A cell of the decomposition of the ambient region by minimizing-term
/// pattern: the closed set where every term in `terms` attains the minimum.
#[derive(Clone, Debug)]
pub struct ArgminCell {
    /// The full set of terms tying for the minimum on the cell.
    pub terms: BTreeSet<usize>,
    pub cell: AffinePolytope,
}

/// All nonempty argmin cells of `f` over the ambient region, keyed by their
/// maximal tying set.
pub fn argmin_complex(f: &ExplodedPolynomial, ambient: &AffinePolytope) -> Vec<ArgminCell> {
    assert_eq!(ambient.dim(), f.variables());
    let n = f.terms.len();
    let base = ambient.system();
    let mut found: BTreeMap<BTreeSet<usize>, AffinePolytope> = BTreeMap::new();
    let mut chosen: Vec<usize> = Vec::new();
    enumerate_tying_sets(f, &base, 0, n, &mut chosen, &mut |subset| {
        if let Some(cell) = argmin_cell_polytope(f, ambient, subset) {
            let closure = maximal_tying_set(f, &cell, subset);
            found.entry(closure).or_insert(cell);
        }
    });
    found
        .into_iter()
        .map(|(terms, cell)| ArgminCell { terms, cell })
        .collect()
}

/// Recursively extend tying sets, pruning whenever the equalities alone are
/// already infeasible (a monotone condition).
fn enumerate_tying_sets(
    f: &ExplodedPolynomial,
    base: &System,
    idx: usize,
    n: usize,
    chosen: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if idx == n {
        if !chosen.is_empty() {
            visit(chosen);
        }
        return;
    }
    enumerate_tying_sets(f, base, idx + 1, n, chosen, visit);
    if let Some(&first) = chosen.first() {
        let mut sys = base.clone();
        for &i in chosen.iter().skip(1).chain(std::iter::once(&idx)) {
            let (coeffs, constant) = difference_form(f, i, first);
            sys.add_eq(&coeffs, &constant);
        }
        if !sys.feasible() {
            return;
        }
    }
    chosen.push(idx);
    enumerate_tying_sets(f, base, idx + 1, n, chosen, visit);
    chosen.pop();
}

/// `f_i − f_j` as an affine form `(coeffs, constant)`.
fn difference_form(f: &ExplodedPolynomial, i: usize, j: usize) -> (Vec<Rat>, Rat) {
    let ti = &f.terms[i];
    let tj = &f.terms[j];
    let coeffs: Vec<Rat> =
        ti.alpha.iter().zip(&tj.alpha).map(|(&a, &b)| rat_int(a - b)).collect();
    (coeffs, ti.a.clone() - &tj.a)
}

/// The closed cell where exactly the given terms tie for the minimum;
/// `None` when empty.
fn argmin_cell_polytope(
    f: &ExplodedPolynomial,
    ambient: &AffinePolytope,
    subset: &[usize],
) -> Option<AffinePolytope> {
    let first = subset[0];
    let mut constraints: Vec<Constraint> = ambient.constraints().to_vec();
    for &i in &subset[1..] {
        let (coeffs, constant) = difference_form(f, i, first);
        let alpha: Vec<i64> = coeffs.iter().map(|c| i64::try_from(c.numer()).unwrap()).collect();
        constraints.push(Constraint::closed(constant.clone(), alpha.clone()));
        constraints.push(Constraint::closed(-constant, alpha.iter().map(|&a| -a).collect()));
    }
    for k in 0..f.terms.len() {
        if subset.contains(&k) {
            continue;
        }
        let (coeffs, constant) = difference_form(f, k, first);
        let alpha: Vec<i64> = coeffs.iter().map(|c| i64::try_from(c.numer()).unwrap()).collect();
        constraints.push(Constraint::closed(constant, alpha));
    }
    AffinePolytope::new(f.variables(), constraints).ok()
}

/// All terms tying with the given ones on the whole cell.
fn maximal_tying_set(
    f: &ExplodedPolynomial,
    cell: &AffinePolytope,
    subset: &[usize],
) -> BTreeSet<usize> {
    let first = subset[0];
    let sys = cell.system();
    let mut closure: BTreeSet<usize> = subset.iter().copied().collect();
    for k in 0..f.terms.len() {
        if closure.contains(&k) {
            continue;
        }
        let (coeffs, constant) = difference_form(f, k, first);
        if sys.implies_eq(&coeffs, &constant) {
            closure.insert(k);
        }
    }
    closure
}

/// The corner locus of `f` over the ambient region: the polyhedral complex
/// of points where the tropical minimum is attained at least twice, with
/// lattice-length weights on its top-dimensional cells.
pub fn corner_locus(
    f: &ExplodedPolynomial,
    ambient: &AffinePolytope,
) -> Result<WeightedComplex, PolyError> {
    if f.variables() > 3 {
        return Err(PolytopeError::DimTooLarge { dim: f.variables(), max: 3 }.into());
    }
    let cells: Vec<ArgminCell> = argmin_complex(f, ambient)
        .into_iter()
        .filter(|c| c.terms.len() >= 2)
        .collect();
    let complex = PolyhedralComplex::geometric(cells.iter().map(|c| c.cell.clone()).collect());
    let top_dim = complex.max_dim();
    let mut weights: BTreeMap<usize, u64> = BTreeMap::new();
    if !cells.is_empty() {
        for argmin in &cells {
            if argmin.cell.hull_dim() != top_dim {
                continue;
            }
            let idx = complex
                .cells()
                .iter()
                .position(|c| c.same_set_as(&argmin.cell))
                .expect("cell present in complex");
            weights.insert(idx, dual_edge_lattice_length(f, &argmin.terms));
        }
    }
    Ok(WeightedComplex { complex, weights })
}

/// Lattice length of the dual edge `conv{α_k : k ∈ terms}`: the number of
/// lattice points on the segment minus one.
fn dual_edge_lattice_length(f: &ExplodedPolynomial, terms: &BTreeSet<usize>) -> u64 {
    let alphas: Vec<&Vec<i64>> = terms.iter().map(|&k| &f.terms[k].alpha).collect();
    let base = alphas[0];
    // The dual cell of a codimension-one corner cell is one-dimensional:
    // project every exponent onto the primitive direction.
    let dir = alphas
        .iter()
        .map(|a| {
            let d: Vec<i64> = a.iter().zip(base).map(|(&x, &y)| x - y).collect();
            d
        })
        .find(|d| d.iter().any(|&x| x != 0))
        .map(|d| primitive(&d))
        .unwrap_or_else(|| vec![0; base.len()]);
    if dir.iter().all(|&x| x == 0) {
        return 1;
    }
    let param = |a: &[i64]| -> i64 {
        // a = base + t·dir along the segment; recover t from any nonzero slot.
        let j = dir.iter().position(|&x| x != 0).unwrap();
        (a[j] - base[j]) / dir[j]
    };
    let ts: Vec<i64> = alphas.iter().map(|a| param(a)).collect();
    let min = ts.iter().min().unwrap();
    let max = ts.iter().max().unwrap();
    u64::try_from(max - min).unwrap_or(0).max(1)
}

/// The regular subdivision of the Newton polytope induced by the lift
/// `α ↦ a_α`: projections of the lower faces of the lifted hull, realized
/// as the convex hulls of maximal tying sets.
pub fn regular_subdivision(f: &ExplodedPolynomial) -> Result<Vec<AffinePolytope>, PolyError> {
    if f.variables() > 3 {
        return Err(PolytopeError::DimTooLarge { dim: f.variables(), max: 3 }.into());
    }
    let ambient = AffinePolytope::whole_space(f.variables());
    let cells = argmin_complex(f, &ambient);
    let mut pieces: Vec<AffinePolytope> = Vec::new();
    for argmin in &cells {
        let pts: Vec<Vec<Rat>> = argmin
            .terms
            .iter()
            .map(|&k| f.terms[k].alpha.iter().map(|&c| rat_int(c)).collect())
            .collect();
        let hull = convex_hull(f.variables(), &pts)?;
        let poly = hull.polytope().clone();
        if !pieces.iter().any(|p| poly.subset_of(p)) {
            pieces.retain(|p| !p.subset_of(&poly));
            pieces.push(poly);
        }
    }
    pieces.sort_by_key(|p| p.sort_key());
    Ok(pieces)
}

/// Report from the balancing check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceReport {
    pub balanced: bool,
    pub violation: Option<String>,
}

/// Check the balancing condition of a weighted complex: for a one-complex,
/// the weighted primitive outgoing directions at every vertex sum to zero;
/// for a codimension-one complex in 3-space, the weighted primitive normal
/// generators around every 1-cell sum to zero modulo the cell direction.
pub fn is_balanced(w: &WeightedComplex) -> Result<BalanceReport, PolyError> {
    let top: Vec<usize> = w.top_cells();
    if top.is_empty() {
        return Ok(BalanceReport { balanced: true, violation: None });
    }
    let top_dim = top.iter().map(|&i| w.complex.cells()[i].hull_dim()).max().unwrap();
    let ambient = w.complex.cells()[top[0]].dim();
    if top_dim == 1 {
        balance_curve(w)
    } else if top_dim == 2 && ambient == 3 {
        balance_surface(w)
    } else {
        Err(PolyError::UnsupportedDimension)
    }
}

fn balance_curve(w: &WeightedComplex) -> Result<BalanceReport, PolyError> {
    let cells = w.complex.cells();
    for v_idx in w.complex.cells_of_dim(0) {
        let vertex = &cells[v_idx];
        let v = vertex.sample_point();
        let mut sum = vec![Rat::zero(); vertex.dim()];
        for (&e_idx, &weight) in &w.weights {
            let edge = &cells[e_idx];
            if edge.hull_dim() != 1 || !edge.contains(&v) {
                continue;
            }
            let dir = outgoing_direction(edge, &v).ok_or(PolyError::UnsupportedDimension)?;
            for (s, d) in sum.iter_mut().zip(&dir) {
                *s += rat_int(*d) * rat_int(weight as i64);
            }
        }
        if sum.iter().any(|s| !s.is_zero()) {
            return Ok(BalanceReport {
                balanced: false,
                violation: Some(format!(
                    "vertex at {:?} has weighted direction sum {:?}",
                    v.iter().map(crate::arith::rat_to_string).collect::<Vec<_>>(),
                    sum.iter().map(crate::arith::rat_to_string).collect::<Vec<_>>()
                )),
            });
        }
    }
    Ok(BalanceReport { balanced: true, violation: None })
}

/// Primitive direction of a one-dimensional cell pointing away from `v`.
fn outgoing_direction(edge: &AffinePolytope, v: &[Rat]) -> Option<Vec<i64>> {
    let basis = direction_lattice(edge);
    if basis.len() != 1 {
        return None;
    }
    let d = primitive(&basis[0]);
    // d points into the edge iff every constraint tight at v stays
    // nonnegative along it.
    let into = |dir: &[i64]| -> bool {
        edge.constraints().iter().all(|c| {
            if !c.value_at(v).is_zero() {
                return true;
            }
            let slope: i64 = c.alpha.iter().zip(dir).map(|(&a, &b)| a * b).sum();
            slope >= 0
        })
    };
    let neg: Vec<i64> = d.iter().map(|&x| -x).collect();
    match (into(&d), into(&neg)) {
        (true, false) => Some(d),
        (false, true) => Some(neg),
        _ => None,
    }
}

fn balance_surface(w: &WeightedComplex) -> Result<BalanceReport, PolyError> {
    let cells = w.complex.cells();
    for e_idx in w.complex.cells_of_dim(1) {
        let edge = &cells[e_idx];
        let e_dir = {
            let basis = direction_lattice(edge);
            if basis.len() != 1 {
                return Err(PolyError::UnsupportedDimension);
            }
            primitive(&basis[0])
        };
        let x = edge.sample_point();
        let mut sum = vec![Rat::zero(); 3];
        for (&f_idx, &weight) in &w.weights {
            let facet = &cells[f_idx];
            if facet.hull_dim() != 2 || !edge.subset_of(facet) {
                continue;
            }
            let u = facet_normal_generator(facet, &e_dir, &x)
                .ok_or(PolyError::UnsupportedDimension)?;
            for (s, d) in sum.iter_mut().zip(&u) {
                *s += rat_int(*d) * rat_int(weight as i64);
            }
        }
        // The sum must be proportional to the edge direction.
        let mut ok = true;
        for i in 0..3 {
            for j in i + 1..3 {
                let cross =
                    sum[i].clone() * rat_int(e_dir[j]) - sum[j].clone() * rat_int(e_dir[i]);
                if !cross.is_zero() {
                    ok = false;
                }
            }
        }
        if !ok {
            return Ok(BalanceReport {
                balanced: false,
                violation: Some(format!(
                    "1-cell through {:?} has unbalanced normal sum",
                    x.iter().map(crate::arith::rat_to_string).collect::<Vec<_>>()
                )),
            });
        }
    }
    Ok(BalanceReport { balanced: true, violation: None })
}

/// A lattice vector of the facet direction space completing the edge
/// direction to a ℤ-basis, oriented from the edge into the facet.
fn facet_normal_generator(
    facet: &AffinePolytope,
    e_dir: &[i64],
    edge_point: &[Rat],
) -> Option<Vec<i64>> {
    let basis = direction_lattice(facet);
    if basis.len() != 2 {
        return None;
    }
    // Integer coordinates of the edge direction in the facet lattice.
    let (p, q) = express_in_basis(e_dir, &basis)?;
    // Complete (p, q) to a basis of ℤ².
    let g = p.extended_gcd(&q);
    if g.gcd != 1 {
        return None;
    }
    // p·s − q·r = 1 with (r, s) = (−y, x) from p·x + q·y = 1.
    let (r, s) = (-g.y, g.x);
    let u: Vec<i64> = (0..3).map(|j| r * basis[0][j] + s * basis[1][j]).collect();
    // Orient into the facet.
    let into = |dir: &[i64]| -> bool {
        facet.constraints().iter().all(|c| {
            if !c.value_at(edge_point).is_zero() {
                return true;
            }
            let slope: i64 = c.alpha.iter().zip(dir).map(|(&a, &b)| a * b).sum();
            slope >= 0
        })
    };
    let neg: Vec<i64> = u.iter().map(|&x| -x).collect();
    match (into(&u), into(&neg)) {
        (true, false) => Some(u),
        (false, true) => Some(neg),
        (true, true) => Some(u),
        _ => None,
    }
}

fn express_in_basis(v: &[i64], basis: &[Vec<i64>]) -> Option<(i64, i64)> {
    // Solve v = p·b0 + q·b1 over the rationals and require integers.
    let b0 = &basis[0];
    let b1 = &basis[1];
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let det = b0[i] * b1[j] - b0[j] * b1[i];
            if det == 0 {
                continue;
            }
            let p_num = v[i] * b1[j] - v[j] * b1[i];
            let q_num = b0[i] * v[j] - b0[j] * v[i];
            if p_num % det != 0 || q_num % det != 0 {
                continue;
            }
            let (p, q) = (p_num / det, q_num / det);
            // Verify on all coordinates.
            if (0..3).all(|k| v[k] == p * b0[k] + q * b1[k]) {
                return Some((p, q));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{gauss_int, rat};
    use num_traits::One;

    fn poly(m: usize, terms: &[(i64, i64, &[i64])]) -> ExplodedPolynomial {
        ExplodedPolynomial::new(
            m,
            terms
                .iter()
                .map(|&(c, a, alpha)| Monomial::new(gauss_int(c), rat_int(a), alpha.to_vec()))
                .collect(),
        )
        .unwrap()
    }

    fn tropical_line() -> ExplodedPolynomial {
        // z₁ + z₂ + 1
        poly(2, &[(1, 0, &[1, 0]), (1, 0, &[0, 1]), (1, 0, &[0, 0])])
    }

    #[test]
    fn construction_merges_terms() {
        let f = poly(1, &[(1, 0, &[1]), (1, 0, &[1])]);
        assert_eq!(f.terms().len(), 1);
        assert_eq!(f.terms()[0].coeff, gauss_int(2));
        let conflict = ExplodedPolynomial::new(
            1,
            vec![
                Monomial::new(Gaussian::one(), rat_int(0), vec![1]),
                Monomial::new(Gaussian::one(), rat_int(1), vec![1]),
            ],
        );
        assert_eq!(
            conflict.unwrap_err(),
            PolyError::DuplicateExponentConflict { alpha: vec![1] }
        );
        let empty = ExplodedPolynomial::new(
            1,
            vec![
                Monomial::new(gauss_int(1), rat_int(0), vec![1]),
                Monomial::new(gauss_int(-1), rat_int(0), vec![1]),
            ],
        );
        assert_eq!(empty.unwrap_err(), PolyError::EmptyPolynomial);
    }

    #[test]
    fn evaluation_cases() {
        let f = tropical_line();
        // Exponents 1, 2, 0: the constant term has the unique minimum.
        let p = ChartPoint::from_ints(&[(2, 1), (3, 2)]);
        assert_eq!(f.evaluate(&p), ExplodedValue::from_ints(1, 0));
        // With a negative exponent the z₁ term dominates instead.
        let p = ChartPoint::from_ints(&[(2, -1), (3, 2)]);
        assert_eq!(f.evaluate(&p), ExplodedValue::from_ints(2, -1));
        // Tie at exponent 0 with cancelling coefficients: on the curve.
        let q = ChartPoint::from_ints(&[(-1, 0), (5, 1)]);
        assert_eq!(f.evaluate(&q), ExplodedValue::from_ints(0, 0));
        assert!(f.in_zero_locus(&q));
        // Constant term dominates.
        let r = ChartPoint::from_ints(&[(1, 1), (1, 1)]);
        assert_eq!(f.evaluate(&r), ExplodedValue::from_ints(1, 0));
        assert!(!f.in_zero_locus(&r));
    }

    #[test]
    fn tropicalization() {
        let f = tropical_line();
        let t = f.tropicalize();
        assert_eq!(t.value(&[rat_int(2), rat_int(3)]), rat_int(0));
        assert_eq!(t.value(&[rat_int(-1), rat_int(3)]), rat_int(-1));
        assert_eq!(t.value(&[rat(-1, 2), rat(-1, 2)]), rat(-1, 2));
        assert_eq!(t.argmin(&[rat_int(0), rat_int(0)]).len(), 3);
        // Single-term polynomial: one affine piece.
        let g = poly(1, &[(1, 2, &[3])]);
        assert_eq!(g.tropicalize().value(&[rat_int(1)]), rat_int(5));
    }

    #[test]
    fn newton_polytopes() {
        let f = tropical_line();
        let hull = f.newton_polytope().unwrap();
        assert_eq!(hull.dim(), 2);
        assert_eq!(hull.vertices().len(), 3);
        let g = poly(1, &[(1, 0, &[0]), (1, 0, &[4])]);
        let hull = g.newton_polytope().unwrap();
        assert_eq!(hull.dim(), 1);
        assert_eq!(hull.lattice_points().len(), 5);
    }

    #[test]
    fn corner_locus_of_tropical_line() {
        let f = tropical_line();
        let w = corner_locus(&f, &AffinePolytope::whole_space(2)).unwrap();
        // Three rays and the origin.
        assert_eq!(w.complex.cells_of_dim(1).len(), 3);
        assert_eq!(w.complex.cells_of_dim(0).len(), 1);
        assert_eq!(w.weights.len(), 3);
        assert!(w.weights.values().all(|&wt| wt == 1));
        // Ray directions are the primitive generators (1,0), (0,1), (−1,−1).
        let origin = vec![rat_int(0), rat_int(0)];
        let mut dirs: Vec<Vec<i64>> = w
            .complex
            .cells_of_dim(1)
            .into_iter()
            .map(|i| outgoing_direction(&w.complex.cells()[i], &origin).unwrap())
            .collect();
        dirs.sort();
        assert_eq!(dirs, vec![vec![-1, -1], vec![0, 1], vec![1, 0]]);
        let report = is_balanced(&w).unwrap();
        assert!(report.balanced, "{:?}", report.violation);
    }

    #[test]
    fn corner_locus_brute_force_agreement() {
        // Exact agreement with a grid scan of "minimum attained twice".
        let f = poly(2, &[(1, 0, &[1, 0]), (2, 1, &[0, 1]), (3, 0, &[0, 0]), (1, 2, &[1, 1])]);
        let w = corner_locus(&f, &AffinePolytope::whole_space(2)).unwrap();
        let t = f.tropicalize();
        for i in -24..=24 {
            for j in -24..=24 {
                let x = vec![rat(i, 4), rat(j, 4)];
                let scanned = t.argmin(&x).len() >= 2;
                let in_complex = w.complex.contains_point(&x);
                assert_eq!(scanned, in_complex, "at ({i}/4, {j}/4)");
            }
        }
    }

    #[test]
    fn weight_two_line() {
        // 1 + z₁² in two variables: the locus is the line x₁ = 0 with weight 2.
        let f = poly(2, &[(1, 0, &[0, 0]), (1, 0, &[2, 0])]);
        let w = corner_locus(&f, &AffinePolytope::whole_space(2)).unwrap();
        assert_eq!(w.complex.cells().len(), 1);
        assert_eq!(w.weights.values().copied().collect::<Vec<u64>>(), vec![2]);
        let line = &w.complex.cells()[0];
        assert!(line.contains(&[rat_int(0), rat_int(7)]));
        assert!(!line.contains(&[rat_int(1), rat_int(0)]));
    }

    #[test]
    fn single_term_has_empty_locus() {
        let f = poly(2, &[(5, 1, &[2, 3])]);
        let w = corner_locus(&f, &AffinePolytope::whole_space(2)).unwrap();
        assert!(w.is_empty());
        assert!(is_balanced(&w).unwrap().balanced);
    }

    #[test]
    fn unbalanced_complex_detected() {
        // Two rays (1,0) and (0,1) from the origin, both weight 1.
        let ray = |alpha: Vec<Vec<i64>>| {
            AffinePolytope::from_closed(
                2,
                &alpha.into_iter().map(|a| (0, a)).collect::<Vec<_>>(),
            )
            .unwrap()
        };
        let e1 = ray(vec![vec![1, 0], vec![0, 1], vec![0, -1]]);
        let e2 = ray(vec![vec![0, 1], vec![1, 0], vec![-1, 0]]);
        let origin = ray(vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]]);
        let complex = PolyhedralComplex::geometric(vec![e1.clone(), e2.clone(), origin]);
        let mut weights = BTreeMap::new();
        for (i, c) in complex.cells().iter().enumerate() {
            if c.hull_dim() == 1 {
                weights.insert(i, 1);
            }
        }
        let w = WeightedComplex { complex, weights };
        let report = is_balanced(&w).unwrap();
        assert!(!report.balanced);
        assert!(report.violation.unwrap().contains("vertex"));
    }

    #[test]
    fn trivial_subdivision_for_flat_lift() {
        let f = tropical_line();
        let pieces = regular_subdivision(&f).unwrap();
        assert_eq!(pieces.len(), 1);
        assert!(pieces[0].same_set_as(f.newton_polytope().unwrap().polytope()));
    }

    #[test]
    fn lower_hull_subdivision_of_three_lifted_points() {
        // 1 + z + t·z²: lift (0,0), (1,0), (2,1) → pieces [0,1] and [1,2].
        let f = poly(1, &[(1, 0, &[0]), (1, 0, &[1]), (1, 1, &[2])]);
        let pieces = regular_subdivision(&f).unwrap();
        assert_eq!(pieces.len(), 2);
        let newton = f.newton_polytope().unwrap();
        let report = crate::polytope::validate_subdivision(newton.polytope(), &pieces);
        assert!(report.valid, "{:?}", report.diagnostic);
        let covers = |p: &AffinePolytope, a: i64, b: i64| {
            p.contains(&[rat_int(a)]) && p.contains(&[rat_int(b)])
        };
        assert!(pieces.iter().any(|p| covers(p, 0, 1) && !p.contains(&[rat_int(2)])));
        assert!(pieces.iter().any(|p| covers(p, 1, 2) && !p.contains(&[rat_int(0)])));
    }

    #[test]
    fn tropical_part_of_evaluation_matches_minimum() {
        let f = poly(2, &[(1, 0, &[1, 0]), (-1, 0, &[0, 1]), (2, 1, &[1, 1])]);
        let t = f.tropicalize();
        for (c1, x1, c2, x2) in [(1i64, 0i64, 1i64, 0i64), (3, -1, 2, 5), (-1, 2, 7, 2)] {
            let p = ChartPoint::from_ints(&[(c1, x1), (c2, x2)]);
            let v = f.evaluate(&p);
            assert_eq!(*v.exponent(), t.value(&p.tropical_part()));
        }
    }

    #[test]
    fn zero_locus_points_lie_in_corner_locus() {
        let f = tropical_line();
        let w = corner_locus(&f, &AffinePolytope::whole_space(2)).unwrap();
        let p = ChartPoint::from_ints(&[(-1, 0), (5, 1)]);
        assert!(f.in_zero_locus(&p));
        assert!(w.complex.contains_point(&p.tropical_part()));
    }
}
