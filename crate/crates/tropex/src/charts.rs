//! Coordinate charts `ℝⁿ × T^m_P`: smooth-monomial bases, binomial
//! relations, evaluation of monomials at points, and stratum location.
//!
//! A monomial `t^a z^α` is admissible on `T^m_P` when `a + x·α ≥ 0`
//! everywhere on `P`. Admissible pairs `(a, α)` form the dual cone of the
//! homogenization of `P`, so a minimal generating set for the smooth
//! monomials is a Hilbert-basis computation one dimension up. The pure-`t`
//! generator is dropped because generation is only required up to extra
//! `t^{a'}` factors with `a' ≥ 0`.

use crate::arith::{gauss_pow, rat_int, Gaussian, Rat};
use crate::cone::{extreme_rays, hilbert_basis_any_dim, Cone, ConeError};
use crate::lattice::IntMatrix;
use crate::polytope::{AffinePolytope, PolytopeError, Stratum};
use crate::semiring::ExplodedValue;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChartError {
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error("chart polytope must be full-dimensional")]
    NotFullDim,
    #[error("point lies outside the chart polytope")]
    PointOutsidePolytope,
    #[error("chart point coefficients must be nonzero")]
    ZeroCoefficient,
    #[error("point dimension {got} does not match chart dimension {want}")]
    WrongDimension { got: usize, want: usize },
}

/// A basis element `ζ = ⌈t^a z^α⌉` with `a` minimal for its `α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothMonomial {
    pub a: Rat,
    pub alpha: Vec<i64>,
}

/// An exploded monomial `c · t^a · z^α`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: Gaussian,
    pub a: Rat,
    pub alpha: Vec<i64>,
}

impl Monomial {
    pub fn new(coeff: Gaussian, a: Rat, alpha: Vec<i64>) -> Monomial {
        Monomial { coeff, a, alpha }
    }
}

/// A multiplicative relation among basis monomials:
/// `∏ ζ_i^{r_i⁺} = ⌈t^a⌉ · ∏ ζ_i^{r_i⁻}` where `r = r⁺ − r⁻`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    /// Signed exponent vector over the basis.
    pub exponents: Vec<i64>,
    /// The exponent `a ≥ 0` of the constant side.
    pub t_exponent: Rat,
}

impl Relation {
    pub fn lhs(&self) -> Vec<i64> {
        self.exponents.iter().map(|&r| r.max(0)).collect()
    }

    pub fn rhs(&self) -> Vec<i64> {
        self.exponents.iter().map(|&r| (-r).max(0)).collect()
    }

    /// The constant `1·t^a` appearing on the right-hand side.
    pub fn constant(&self) -> ExplodedValue {
        ExplodedValue::new(Gaussian::one(), self.t_exponent.clone())
    }
}

/// A point of `T^m_P`: coordinates `c_i t^{x_i}` with nonzero coefficients
/// whose tropical part lies in `P`. Real `ℝⁿ` coordinates ride along as
/// plain rational data.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint {
    pub real_coords: Vec<Rat>,
    pub exp_coords: Vec<(Gaussian, Rat)>,
}

impl ChartPoint {
    pub fn new(real_coords: Vec<Rat>, exp_coords: Vec<(Gaussian, Rat)>) -> Result<ChartPoint, ChartError> {
        if exp_coords.iter().any(|(c, _)| c.re.is_zero() && c.im.is_zero()) {
            return Err(ChartError::ZeroCoefficient);
        }
        Ok(ChartPoint { real_coords, exp_coords })
    }

    /// Purely exploded point (no ℝⁿ factor), integer data.
    pub fn from_ints(coords: &[(i64, i64)]) -> ChartPoint {
        ChartPoint::new(
            Vec::new(),
            coords
                .iter()
                .map(|&(c, x)| (crate::arith::gauss_int(c), rat_int(x)))
                .collect(),
        )
        .expect("nonzero integer coefficients")
    }

    pub fn tropical_part(&self) -> Vec<Rat> {
        self.exp_coords.iter().map(|(_, x)| x.clone()).collect()
    }
}

/// Evaluate `c t^a z^α` at a point: coefficient `c·∏ c_i^{α_i}`, exponent
/// `a + Σ α_i x_i`.
pub fn eval_monomial(point: &ChartPoint, mono: &Monomial) -> ExplodedValue {
    let mut coeff = mono.coeff.clone();
    let mut exponent = mono.a.clone();
    for (&ai, (ci, xi)) in mono.alpha.iter().zip(&point.exp_coords) {
        coeff *= gauss_pow(ci, ai).expect("chart point coefficients are nonzero");
        exponent += rat_int(ai) * xi;
    }
    ExplodedValue::new(coeff, exponent)
}

/// Minimal generating set for the smooth monomials on `T^m_P`, computed as
/// the Hilbert basis of the dual of the homogenization cone of `P`, with
/// the pure-`t` generator removed.
pub fn smooth_monomial_basis(p: &AffinePolytope) -> Result<Vec<SmoothMonomial>, ChartError> {
    let m = p.dim();
    if m > 3 {
        return Err(PolytopeError::DimTooLarge { dim: m, max: 3 }.into());
    }
    if !p.is_full_dim() {
        return Err(ChartError::NotFullDim);
    }
    let closed = p.closure();

    // V-description of the homogenization cone C_P ⊂ ℝ^{1+m}: one generator
    // (1, v) per minimal face of P, plus (0, r) for recession rays and
    // (0, ±l) for lineality directions.
    let mut gens: Vec<Vec<Rat>> = Vec::new();
    let verts = crate::polytope::vertices(&closed);
    if verts.is_empty() {
        let strata = closed.strata();
        let min_dim = strata.iter().map(|s| s.dim).min().unwrap_or(0);
        for s in strata.iter().filter(|s| s.dim == min_dim) {
            let mut g = vec![Rat::one()];
            g.extend(s.sample.iter().cloned());
            gens.push(g);
        }
    } else {
        for v in &verts {
            let mut g = vec![Rat::one()];
            g.extend(v.iter().cloned());
            gens.push(g);
        }
    }
    let normals: Vec<Vec<i64>> = closed.constraints().iter().map(|c| c.alpha.clone()).collect();
    for ray in extreme_rays(m, &normals) {
        let mut g = vec![Rat::zero()];
        g.extend(ray.iter().map(|&c| rat_int(c)));
        gens.push(g);
    }
    let lineality = {
        let mat = if normals.is_empty() {
            IntMatrix::from_rows(&[vec![0; m]])
        } else {
            IntMatrix::from_rows(&normals)
        };
        mat.kernel_basis()
    };
    for l in &lineality {
        for sign in [1i64, -1] {
            let mut g = vec![Rat::zero()];
            g.extend(l.iter().map(|v| Rat::from_integer(v * BigInt::from(sign))));
            gens.push(g);
        }
    }

    // Exponent denominators divide the lcm of the generator denominators.
    let mut denom_lcm = BigInt::one();
    for g in &gens {
        for c in g {
            denom_lcm = denom_lcm.lcm(c.denom());
        }
    }
    let n_scale = i64::try_from(&denom_lcm).expect("desk-scale denominators");

    // Dual cone D = {(a, α) : (a, α)·g ≥ 0 ∀ g}, in the scaled coordinates
    // (N·a, α) where it is cut out by integer data.
    let dual_normals: Vec<Vec<i64>> = gens
        .iter()
        .map(|g| {
            let mut lcm = BigInt::one();
            for c in g {
                lcm = lcm.lcm(c.denom());
            }
            let row: Vec<BigInt> = g.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
            // Pairing in the scaled coordinates (N·a, α):
            // a·g₀ + α·g' = (h₀·g₀ + N·(α·g'))/N.
            let mut scaled: Vec<BigInt> = Vec::with_capacity(row.len());
            scaled.push(row[0].clone());
            for entry in &row[1..] {
                scaled.push(entry * &denom_lcm);
            }
            let ints: Vec<i64> =
                scaled.iter().map(|v| i64::try_from(v).expect("desk scale")).collect();
            crate::lattice::primitive(&ints)
        })
        .collect();
    let dual = Cone::from_normals(1 + m, &dual_normals)?;
    let basis_scaled = hilbert_basis_any_dim(&dual)?;

    let mut basis: Vec<SmoothMonomial> = basis_scaled
        .into_iter()
        .filter(|h| h[1..].iter().any(|&c| c != 0))
        .map(|h| SmoothMonomial {
            a: rat_int(h[0]) / rat_int(n_scale),
            alpha: h[1..].to_vec(),
        })
        .collect();
    basis.sort_by(|x, y| x.alpha.cmp(&y.alpha).then_with(|| x.a.cmp(&y.a)));
    Ok(basis)
}

/// Generating set of the lattice of integer relations among the basis
/// monomials, each normalized so the constant exponent is nonnegative.
pub fn monomial_relations(basis: &[SmoothMonomial]) -> Vec<Relation> {
    if basis.is_empty() {
        return Vec::new();
    }
    let m = basis[0].alpha.len();
    let rows: Vec<Vec<i64>> =
        (0..m).map(|j| basis.iter().map(|b| b.alpha[j]).collect()).collect();
    let mat = IntMatrix::from_rows(&rows);
    let mut relations: Vec<Relation> = mat
        .kernel_basis()
        .into_iter()
        .map(|k| {
            let mut exps: Vec<i64> =
                k.iter().map(|v| i64::try_from(v).expect("desk scale")).collect();
            let mut a: Rat = basis
                .iter()
                .zip(&exps)
                .map(|(b, &r)| b.a.clone() * rat_int(r))
                .sum();
            let flip = if a < Rat::zero() {
                true
            } else if a.is_zero() {
                exps.iter().find(|&&r| r != 0).is_some_and(|&r| r < 0)
            } else {
                false
            };
            if flip {
                for r in &mut exps {
                    *r = -*r;
                }
                a = -a;
            }
            Relation { exponents: exps, t_exponent: a }
        })
        .collect();
    relations.sort_by(|x, y| x.exponents.cmp(&y.exponents));
    relations
}

/// A chart `ℝⁿ × T^m_P` with its basis and relations computed eagerly.
#[derive(Clone, Debug)]
pub struct Chart {
    n: usize,
    polytope: AffinePolytope,
    basis: Vec<SmoothMonomial>,
    relations: Vec<Relation>,
    strata: Vec<Stratum>,
}

impl Chart {
    pub fn new(n: usize, polytope: AffinePolytope) -> Result<Chart, ChartError> {
        let basis = smooth_monomial_basis(&polytope)?;
        let relations = monomial_relations(&basis);
        let strata = polytope.strata();
        Ok(Chart { n, polytope, basis, relations, strata })
    }

    pub fn real_factor(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.polytope.dim()
    }

    /// Real dimension `n + 2m`.
    pub fn real_dimension(&self) -> usize {
        self.n + 2 * self.polytope.dim()
    }

    pub fn polytope(&self) -> &AffinePolytope {
        &self.polytope
    }

    pub fn basis(&self) -> &[SmoothMonomial] {
        &self.basis
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    fn check_point(&self, point: &ChartPoint) -> Result<Vec<Rat>, ChartError> {
        if point.exp_coords.len() != self.polytope.dim() {
            return Err(ChartError::WrongDimension {
                got: point.exp_coords.len(),
                want: self.polytope.dim(),
            });
        }
        let trop = point.tropical_part();
        if !self.polytope.contains(&trop) {
            return Err(ChartError::PointOutsidePolytope);
        }
        Ok(trop)
    }

    /// Values of the basis monomials under the smooth-part homomorphism.
    pub fn smooth_part_coords(&self, point: &ChartPoint) -> Result<Vec<Gaussian>, ChartError> {
        self.check_point(point)?;
        Ok(self
            .basis
            .iter()
            .map(|b| {
                let mono = Monomial::new(Gaussian::one(), b.a.clone(), b.alpha.clone());
                eval_monomial(point, &mono)
                    .smooth_part()
                    .expect("basis monomials are admissible on P")
            })
            .collect())
    }

    /// Index (into `strata()`) of the stratum containing the point.
    pub fn stratum_of_point(&self, point: &ChartPoint) -> Result<usize, ChartError> {
        let trop = self.check_point(point)?;
        let stratum = self.polytope.stratum_of_point(&trop)?;
        Ok(self
            .strata
            .iter()
            .position(|s| s.active == stratum.active)
            .expect("strata enumeration is complete"))
    }

    /// Whether a basis monomial vanishes identically on a stratum (its
    /// tropical part is strictly below `t^0` there). On any stratum every
    /// admissible monomial either vanishes identically or is nowhere zero,
    /// so one exact sample decides.
    pub fn monomial_vanishes_on(&self, mono_index: usize, stratum: &Stratum) -> bool {
        let b = &self.basis[mono_index];
        let mut v = b.a.clone();
        for (&ai, xi) in b.alpha.iter().zip(&stratum.sample) {
            v += rat_int(ai) * xi;
        }
        !v.is_zero()
    }

    /// Strata on which at least one basis monomial vanishes. The operators
    /// `e_S` act as the identity on the remaining (zero) strata.
    pub fn nonzero_strata(&self) -> Vec<usize> {
        (0..self.strata.len())
            .filter(|&s| {
                (0..self.basis.len()).any(|i| self.monomial_vanishes_on(i, &self.strata[s]))
            })
            .collect()
    }
}
