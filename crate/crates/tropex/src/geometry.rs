//! The explosion functor on combinatorial normal-crossing and toric data,
//! refinements of complexes, tropical-level fiber products with
//! ℤ-transversality, and Newton-polytope degeneration families.

use crate::arith::{rat_int, Gaussian, Rat};
use crate::charts::Monomial;
use crate::complex::{AffineEmbedding, Incidence, PolyhedralComplex, WeightedComplex};
use crate::convex::{convex_hull, normal_fan, Fan};
use crate::lattice::{IntMatrix, LatticeError};
use crate::linprog::System;
use crate::polytope::{validate_subdivision, AffinePolytope, PolytopeError};
use crate::troppoly::{corner_locus, regular_subdivision, ExplodedPolynomial, PolyError};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpsError {
    #[error("invalid normal-crossing configuration: {0}")]
    InvalidConfiguration(String),
    #[error("not a fan: {0}")]
    NotAFan(String),
    #[error("fan does not match the normal fan of the moment polytope: {0}")]
    MomentPolytopeMismatch(String),
    #[error("invalid subdivision of cell {cell}: {diagnostic}")]
    InvalidSubdivision { cell: usize, diagnostic: String },
    #[error("subdivisions of cells {sub} and {sup} disagree on their shared face")]
    IncompatibleOnSharedFace { sub: usize, sup: usize },
    #[error("linear parts do not span the target")]
    NotTransverse,
    #[error("fiber product is empty")]
    FiberEmpty,
    #[error("lift is not convex at {point:?}")]
    NotConvexLift { point: Vec<i64> },
    #[error("lower face {cell} is not a unimodular simplex")]
    NotUnimodular { cell: String },
    #[error("support is missing the lattice point {point:?} of its hull")]
    MissingLatticePoint { point: Vec<i64> },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Combinatorial shadow of a complex manifold with transversely
/// intersecting divisors: named components and divisors, plus one record
/// per stratum of the intersection poset.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NCConfiguration {
    pub components: Vec<String>,
    pub divisors: Vec<String>,
    pub strata: Vec<NCStratum>,
}

/// A stratum: a connected piece of the mutual intersection of a divisor
/// subset inside one component. `count` is the number of such pieces.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NCStratum {
    pub divisors: Vec<String>,
    pub component: String,
    pub count: usize,
}

struct ResolvedStratum {
    divisors: BTreeSet<usize>,
    component: usize,
    count: usize,
}

fn resolve(cfg: &NCConfiguration) -> Result<Vec<ResolvedStratum>, OpsError> {
    let comp_index = |name: &str| {
        cfg.components
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| OpsError::InvalidConfiguration(format!("unknown component {name:?}")))
    };
    let div_index = |name: &str| {
        cfg.divisors
            .iter()
            .position(|d| d == name)
            .ok_or_else(|| OpsError::InvalidConfiguration(format!("unknown divisor {name:?}")))
    };
    let mut out = Vec::new();
    for s in &cfg.strata {
        let mut divisors = BTreeSet::new();
        for d in &s.divisors {
            divisors.insert(div_index(d)?);
        }
        if divisors.len() != s.divisors.len() {
            return Err(OpsError::InvalidConfiguration(format!(
                "repeated divisor in stratum {:?}",
                s.divisors
            )));
        }
        if s.count == 0 {
            return Err(OpsError::InvalidConfiguration("stratum count must be ≥ 1".into()));
        }
        out.push(ResolvedStratum { divisors, component: comp_index(&s.component)?, count: s.count });
    }
    Ok(out)
}

/// Dual intersection complex of a normal-crossing configuration: one
/// quadrant `[0,∞)^k` per stratum copy, glued along coordinate-plane
/// embeddings induced by divisor-subset inclusions.
pub fn explode_ncd(cfg: &NCConfiguration) -> Result<PolyhedralComplex, OpsError> {
    let strata = resolve(cfg)?;
    // Subset closure: every nonempty subset of a listed set must be listed
    // for the same component, and each component owns exactly one vertex.
    for s in &strata {
        for &drop in &s.divisors {
            let mut sub = s.divisors.clone();
            sub.remove(&drop);
            if !sub.is_empty()
                && !strata.iter().any(|t| t.component == s.component && t.divisors == sub)
            {
                let names: Vec<&str> =
                    sub.iter().map(|&i| cfg.divisors[i].as_str()).collect();
                return Err(OpsError::InvalidConfiguration(format!(
                    "missing stratum for divisor subset {names:?}"
                )));
            }
        }
    }
    for (ci, name) in cfg.components.iter().enumerate() {
        let vertices: Vec<&ResolvedStratum> =
            strata.iter().filter(|s| s.component == ci && s.divisors.is_empty()).collect();
        if vertices.len() != 1 || vertices[0].count != 1 {
            return Err(OpsError::InvalidConfiguration(format!(
                "component {name:?} must have exactly one empty-subset stratum with count 1"
            )));
        }
    }
    // Attachment of a quadrant to its faces is along the unique stratum per
    // divisor subset; reject configurations where a proper sub-stratum is
    // duplicated, since the gluing target would be ambiguous.
    for s in &strata {
        if s.count > 1
            && strata.iter().any(|t| {
                t.component == s.component
                    && s.divisors.is_subset(&t.divisors)
                    && s.divisors.len() < t.divisors.len()
            })
        {
            let names: Vec<&str> = s.divisors.iter().map(|&i| cfg.divisors[i].as_str()).collect();
            return Err(OpsError::InvalidConfiguration(format!(
                "stratum {names:?} has count > 1 but deeper strata attach to it"
            )));
        }
    }

    // Cells: count copies of [0,∞)^k per stratum.
    let mut cells: Vec<AffinePolytope> = Vec::new();
    let mut owner: Vec<usize> = Vec::new(); // cell → stratum index
    for (si, s) in strata.iter().enumerate() {
        let k = s.divisors.len();
        let quadrant = if k == 0 {
            AffinePolytope::whole_space(0)
        } else {
            let rows: Vec<(i64, Vec<i64>)> = (0..k)
                .map(|i| (0, (0..k).map(|j| i64::from(i == j)).collect()))
                .collect();
            AffinePolytope::from_closed(k, &rows).expect("quadrants are nonempty")
        };
        for _ in 0..s.count {
            cells.push(quadrant.clone());
            owner.push(si);
        }
    }
    // Incidences: coordinate-plane embeddings for proper subset pairs.
    let mut incidences = Vec::new();
    for (sub_cell, &sub_stratum) in owner.iter().enumerate() {
        for (sup_cell, &sup_stratum) in owner.iter().enumerate() {
            let sub = &strata[sub_stratum];
            let sup = &strata[sup_stratum];
            if sub.component != sup.component
                || sub.divisors.len() >= sup.divisors.len()
                || !sub.divisors.is_subset(&sup.divisors)
            {
                continue;
            }
            let sup_order: Vec<usize> = sup.divisors.iter().copied().collect();
            let matrix: Vec<Vec<i64>> = sup_order
                .iter()
                .map(|d| {
                    sub.divisors
                        .iter()
                        .map(|sd| i64::from(sd == d))
                        .collect()
                })
                .collect();
            incidences.push(Incidence {
                sub: sub_cell,
                sup: sup_cell,
                embedding: AffineEmbedding {
                    matrix,
                    offset: vec![Rat::zero(); sup_order.len()],
                },
            });
        }
    }
    Ok(PolyhedralComplex::from_parts(cells, incidences))
}

/// The tropical part of the explosion of a toric manifold: the fan itself,
/// validated, and optionally cross-checked against the normal fan of a
/// moment polytope.
pub fn explode_toric(
    fan: &Fan,
    moment: Option<&AffinePolytope>,
) -> Result<PolyhedralComplex, OpsError> {
    let cones_as_polytopes: Vec<AffinePolytope> = fan
        .maximal_cones()
        .iter()
        .map(|c| {
            let rows: Vec<(i64, Vec<i64>)> =
                c.normals().iter().map(|n| (0, n.clone())).collect();
            AffinePolytope::from_closed(fan.dim(), &rows)
                .map_err(|e| OpsError::NotAFan(e.to_string()))
        })
        .collect::<Result<_, _>>()?;
    let complex = PolyhedralComplex::geometric_closed(cones_as_polytopes);
    if let Some(violation) = complex.check_geometric() {
        return Err(OpsError::NotAFan(violation));
    }
    if let Some(p) = moment {
        let nf = normal_fan(p)?;
        if nf.rays() != fan.rays() {
            return Err(OpsError::MomentPolytopeMismatch(format!(
                "moment polytope rays {:?} vs fan rays {:?}",
                nf.rays(),
                fan.rays()
            )));
        }
        let matches = fan.maximal_cones().iter().all(|c| {
            nf.maximal_cones().iter().any(|d| {
                let mut a = c.generators().to_vec();
                let mut b = d.generators().to_vec();
                a.sort();
                b.sort();
                a == b
            })
        });
        if !matches || fan.maximal_cones().len() != nf.maximal_cones().len() {
            return Err(OpsError::MomentPolytopeMismatch(
                "maximal cones differ".to_string(),
            ));
        }
    }
    Ok(complex)
}

/// Refine a geometric complex by per-cell subdivisions. Cells without an
/// entry are kept as they are. Subdivisions must agree on shared faces.
pub fn refine(
    complex: &PolyhedralComplex,
    subdivisions: &[(usize, Vec<AffinePolytope>)],
) -> Result<PolyhedralComplex, OpsError> {
    let cells = complex.cells();
    let mut pieces_per_cell: Vec<Vec<AffinePolytope>> =
        cells.iter().map(|c| vec![c.clone()]).collect();
    for (cell, pieces) in subdivisions {
        let report = validate_subdivision(&cells[*cell], pieces);
        if !report.valid {
            return Err(OpsError::InvalidSubdivision {
                cell: *cell,
                diagnostic: report.diagnostic.unwrap_or_default(),
            });
        }
        pieces_per_cell[*cell] = pieces.clone();
    }
    // Shared faces: the subdivision induced on a face by any bigger cell
    // must agree with the face's own subdivision.
    for i in 0..cells.len() {
        for j in 0..cells.len() {
            if i == j || !cells[i].subset_of(&cells[j]) || cells[i].same_set_as(&cells[j]) {
                continue;
            }
            let face_dim = cells[i].hull_dim();
            let induced: Vec<AffinePolytope> = pieces_per_cell[j]
                .iter()
                .filter_map(|q| q.intersect(&cells[i]))
                .filter(|q| q.hull_dim() == face_dim)
                .collect();
            let own = &pieces_per_cell[i];
            let covered = own.iter().all(|p| induced.iter().any(|q| q.same_set_as(p)))
                && induced.iter().all(|q| own.iter().any(|p| p.same_set_as(q)));
            if !covered {
                return Err(OpsError::IncompatibleOnSharedFace { sub: i, sup: j });
            }
        }
    }
    let mut all: Vec<AffinePolytope> = Vec::new();
    for pieces in pieces_per_cell {
        all.extend(pieces);
    }
    Ok(PolyhedralComplex::geometric(all))
}

/// An integral affine map on a polytope: `x ↦ matrix·x + offset`.
#[derive(Clone, Debug)]
pub struct AffineMap {
    /// k×m integer matrix, rows indexing the target.
    pub matrix: Vec<Vec<i64>>,
    pub offset: Vec<Rat>,
    pub domain: AffinePolytope,
}

impl AffineMap {
    pub fn new(matrix: Vec<Vec<i64>>, offset: Vec<Rat>, domain: AffinePolytope) -> AffineMap {
        assert_eq!(matrix.len(), offset.len());
        assert!(matrix.iter().all(|r| r.len() == domain.dim()));
        AffineMap { matrix, offset, domain }
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.len()
    }
}

/// Result of a tropical-level fiber product.
#[derive(Clone, Debug)]
pub struct FiberProduct {
    /// `{(p, q) : f(p) = g(q)}` inside the product of the domains.
    pub polytope: AffinePolytope,
    /// Lattice index of the combined integral map; the number of smooth
    /// copies the exploded fiber splits into.
    pub multiplicity: BigInt,
    /// Whether the joint image lattice is saturated. Implies multiplicity 1
    /// and the subspace topology on the fiber product.
    pub z_transverse: bool,
}

/// Fiber product of two integral affine maps at the tropical level, with
/// multiplicity and ℤ-transversality read off from the lattice data.
pub fn tropical_fiber_product(
    f: &AffineMap,
    g: &AffineMap,
    f_lattice: &IntMatrix,
    g_lattice: &IntMatrix,
) -> Result<FiberProduct, OpsError> {
    let k = f.target_dim();
    if g.target_dim() != k {
        return Err(OpsError::NotTransverse);
    }
    // Transversality: the linear parts must jointly span the target.
    let span_rows: Vec<Vec<i64>> = (0..k)
        .map(|i| {
            let mut row = f.matrix[i].clone();
            row.extend(g.matrix[i].iter().copied());
            row
        })
        .collect();
    let span = IntMatrix::from_rows(&span_rows);
    if span.rank() != k {
        return Err(OpsError::NotTransverse);
    }
    // Combined lattice map into ℤ^k: columns of both lattices.
    assert_eq!(f_lattice.nrows(), k, "f lattice target mismatch");
    assert_eq!(g_lattice.nrows(), k, "g lattice target mismatch");
    let combined_rows: Vec<Vec<BigInt>> = (0..k)
        .map(|i| {
            let mut row: Vec<BigInt> =
                (0..f_lattice.ncols()).map(|j| f_lattice[(i, j)].clone()).collect();
            row.extend((0..g_lattice.ncols()).map(|j| g_lattice[(i, j)].clone()));
            row
        })
        .collect();
    let combined = IntMatrix::from_bigint_rows(combined_rows);
    let multiplicity = combined.transpose().lattice_index()?;
    let z_transverse = combined.is_saturated();

    // The fiber polytope {(p, q) : f(p) = g(q)} ⊂ P × Q.
    let mp = f.domain.dim();
    let mq = g.domain.dim();
    let mut constraints = Vec::new();
    for c in f.domain.constraints() {
        let mut alpha = c.alpha.clone();
        alpha.extend(std::iter::repeat(0).take(mq));
        constraints.push(crate::polytope::Constraint::new(c.a.clone(), alpha, c.strict));
    }
    for c in g.domain.constraints() {
        let mut alpha = vec![0; mp];
        alpha.extend(c.alpha.iter().copied());
        constraints.push(crate::polytope::Constraint::new(c.a.clone(), alpha, c.strict));
    }
    for i in 0..k {
        let mut alpha = f.matrix[i].clone();
        alpha.extend(g.matrix[i].iter().map(|&c| -c));
        let a = f.offset[i].clone() - &g.offset[i];
        constraints.push(crate::polytope::Constraint::new(a.clone(), alpha.clone(), false));
        constraints.push(crate::polytope::Constraint::new(
            -a,
            alpha.iter().map(|&c| -c).collect(),
            false,
        ));
    }
    let polytope = AffinePolytope::new(mp + mq, constraints).map_err(|e| match e {
        PolytopeError::Empty => OpsError::FiberEmpty,
        other => OpsError::Polytope(other),
    })?;
    Ok(FiberProduct { polytope, multiplicity, z_transverse })
}

/// A degeneration family over `T¹₁` defined by a convex unimodular lift of
/// a Newton polytope: `p̂ = Σ c_α t^{v(α)·w} z^α`.
#[derive(Clone, Debug)]
pub struct DegenerationFamily {
    n: usize,
    support: Vec<Vec<i64>>,
    coeffs: Vec<Gaussian>,
    lift: Vec<i64>,
    subdivision: Vec<AffinePolytope>,
}

impl DegenerationFamily {
    pub fn variables(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &[Vec<i64>] {
        &self.support
    }

    pub fn lift(&self) -> &[i64] {
        &self.lift
    }

    /// The cached lower-hull subdivision of the Newton polytope.
    pub fn subdivision(&self) -> &[AffinePolytope] {
        &self.subdivision
    }

    /// The polynomial of the fiber at `t^w` on the base.
    pub fn fiber_polynomial(&self, w: &Rat) -> ExplodedPolynomial {
        let terms: Vec<Monomial> = self
            .support
            .iter()
            .zip(&self.coeffs)
            .zip(&self.lift)
            .map(|((alpha, c), &v)| Monomial::new(c.clone(), rat_int(v) * w, alpha.clone()))
            .collect();
        ExplodedPolynomial::new(self.n, terms).expect("family terms have distinct exponents")
    }
}

/// Validate and build a degeneration family from support, coefficients and
/// an integer lift.
pub fn make_family(
    support: &[Vec<i64>],
    coeffs: &[Gaussian],
    lift: &[i64],
) -> Result<DegenerationFamily, OpsError> {
    assert_eq!(support.len(), coeffs.len());
    assert_eq!(support.len(), lift.len());
    let n = support.first().map_or(0, Vec::len);
    if n > 3 {
        return Err(OpsError::Polytope(PolytopeError::DimTooLarge { dim: n, max: 3 }));
    }
    assert!(support.iter().all(|a| a.len() == n));
    if coeffs.iter().any(|c| c.re.is_zero() && c.im.is_zero()) {
        return Err(OpsError::InvalidConfiguration("zero coefficient in family".into()));
    }

    // Every lattice point of the hull must be in the support.
    let points: Vec<Vec<Rat>> =
        support.iter().map(|a| a.iter().map(|&c| rat_int(c)).collect()).collect();
    let hull = convex_hull(n, &points)?;
    for p in hull.lattice_points() {
        if !support.contains(&p) {
            return Err(OpsError::MissingLatticePoint { point: p });
        }
    }

    // Convexity: every lifted point must lie on the lower hull, i.e. attain
    // the tropical minimum somewhere.
    for (alpha, &v) in support.iter().zip(lift) {
        let mut sys = System::new(n);
        for (beta, &u) in support.iter().zip(lift) {
            let coeffs_row: Vec<Rat> =
                beta.iter().zip(alpha).map(|(&b, &a)| rat_int(b - a)).collect();
            sys.add(&coeffs_row, &rat_int(u - v), false);
        }
        if !sys.feasible() {
            return Err(OpsError::NotConvexLift { point: alpha.clone() });
        }
    }

    // Lower faces must project to unimodular simplices.
    let family = DegenerationFamily {
        n,
        support: support.to_vec(),
        coeffs: coeffs.to_vec(),
        lift: lift.to_vec(),
        subdivision: Vec::new(),
    };
    let lifted = family.fiber_polynomial(&Rat::one());
    let subdivision = regular_subdivision(&lifted)?;
    if hull.dim() == n {
        for piece in &subdivision {
            let verts = crate::polytope::vertices(piece);
            let describe = || format!("{verts:?}");
            if verts.len() != n + 1 {
                return Err(OpsError::NotUnimodular { cell: describe() });
            }
            let rows: Vec<Vec<i64>> = verts[1..]
                .iter()
                .map(|v| {
                    v.iter()
                        .zip(&verts[0])
                        .map(|(a, b)| {
                            let d = a.clone() - b;
                            debug_assert!(d.denom().is_one());
                            i64::try_from(d.numer()).expect("desk scale")
                        })
                        .collect()
                })
                .collect();
            let det = IntMatrix::from_rows(&rows).determinant();
            if det.abs() != BigInt::one() {
                return Err(OpsError::NotUnimodular { cell: describe() });
            }
        }
    }
    Ok(DegenerationFamily { subdivision, ..family })
}

/// The fiber of the family over `t^w`: the weighted corner locus of the
/// lifted polynomial specialized at `w`. At `w = 0` this is the corner
/// locus of the unlifted polynomial.
pub fn family_fiber(family: &DegenerationFamily, w: &Rat) -> Result<WeightedComplex, OpsError> {
    assert!(!w.is_negative(), "family parameter must be ≥ 0");
    let poly = family.fiber_polynomial(w);
    Ok(corner_locus(&poly, &AffinePolytope::whole_space(family.variables()))?)
}

/// Counts of the pieces of a positive-time fiber: each vertex is dual to a
/// maximal simplex of the triangulation (a pair of pants), each bounded
/// edge to an interior facet, each ray to a boundary facet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusRecord {
    pub vertices: usize,
    pub bounded_edges: usize,
    pub rays: usize,
}

pub fn pants_census(family: &DegenerationFamily, w: &Rat) -> Result<CensusRecord, OpsError> {
    assert!(w.is_positive(), "census requires w > 0");
    let fiber = family_fiber(family, w)?;
    let vertices = fiber.complex.cells_of_dim(0).len();
    let mut bounded_edges = 0;
    let mut rays = 0;
    for idx in fiber.complex.cells_of_dim(1) {
        let nverts = crate::polytope::vertices(&fiber.complex.cells()[idx]).len();
        match nverts {
            2 => bounded_edges += 1,
            1 => rays += 1,
            _ => {}
        }
    }
    Ok(CensusRecord { vertices, bounded_edges, rays })
}
