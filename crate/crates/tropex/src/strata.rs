//! Strata calculus on charts: the operators `e_S` and `Δ_I`, weight
//! functions `w_I`, and grid estimation of the `|·|_{k,δ}` seminorm.
//!
//! Test functions live in the smooth-part coordinates of a chart. On the
//! polynomial subclass (polynomials in the coordinates and their
//! conjugates) the operator algebra is exact: `e_S` kills exactly the
//! coordinates that vanish on `S`, so `e_S` and `Δ_I` act by filtering
//! monomials and all the §-operator identities can be checked by exact
//! coefficient comparison. Black-box functions only support sampled
//! estimation.

use crate::arith::{rat_to_f64, Gaussian, Rat};
use crate::charts::Chart;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrataError {
    #[error("index {0} is not a stratum of the chart polytope")]
    NotAStratum(usize),
    #[error("delta must satisfy 0 < delta < 1")]
    BadDelta,
    #[error("estimation region is empty")]
    EmptyRegion,
    #[error("collection of strata must be nonempty")]
    EmptyCollection,
}

/// A polynomial in the smooth coordinates `ζ_i` and their conjugates with
/// Gaussian-rational coefficients, keyed by (holomorphic, antiholomorphic)
/// exponent vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct CPoly {
    nvars: usize,
    terms: BTreeMap<(Vec<u8>, Vec<u8>), Gaussian>,
}

impl CPoly {
    pub fn zero(nvars: usize) -> CPoly {
        CPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Gaussian) -> CPoly {
        let mut p = CPoly::zero(nvars);
        p.add_term(vec![0; nvars], vec![0; nvars], c);
        p
    }

    /// The coordinate `ζ_j`.
    pub fn var(nvars: usize, j: usize) -> CPoly {
        let mut z = vec![0u8; nvars];
        z[j] = 1;
        let mut p = CPoly::zero(nvars);
        p.add_term(z, vec![0; nvars], Gaussian::one());
        p
    }

    /// The conjugate coordinate `ζ̄_j`.
    pub fn conj_var(nvars: usize, j: usize) -> CPoly {
        let mut zb = vec![0u8; nvars];
        zb[j] = 1;
        let mut p = CPoly::zero(nvars);
        p.add_term(vec![0; nvars], zb, Gaussian::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<(Vec<u8>, Vec<u8>), Gaussian> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, z: Vec<u8>, zbar: Vec<u8>, c: Gaussian) {
        assert_eq!(z.len(), self.nvars);
        assert_eq!(zbar.len(), self.nvars);
        let key = (z, zbar);
        let entry = self.terms.entry(key.clone()).or_insert_with(Gaussian::zero);
        *entry += c;
        if entry.re.is_zero() && entry.im.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &CPoly) -> CPoly {
        let mut out = self.clone();
        for ((z, zb), c) in &other.terms {
            out.add_term(z.clone(), zb.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &CPoly) -> CPoly {
        let mut out = self.clone();
        for ((z, zb), c) in &other.terms {
            out.add_term(z.clone(), zb.clone(), -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &CPoly) -> CPoly {
        let mut out = CPoly::zero(self.nvars);
        for ((z1, zb1), c1) in &self.terms {
            for ((z2, zb2), c2) in &other.terms {
                let z: Vec<u8> = z1.iter().zip(z2).map(|(a, b)| a + b).collect();
                let zb: Vec<u8> = zb1.iter().zip(zb2).map(|(a, b)| a + b).collect();
                out.add_term(z, zb, c1 * c2);
            }
        }
        out
    }

    /// Keep only the terms the predicate accepts (exponents as (z, z̄)).
    fn filter(&self, keep: impl Fn(&[u8], &[u8]) -> bool) -> CPoly {
        CPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|((z, zb), _)| keep(z, zb))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((ze, zbe), c) in &self.terms {
            let mut term = Complex64::new(rat_to_f64(&c.re), rat_to_f64(&c.im));
            for j in 0..self.nvars {
                for _ in 0..ze[j] {
                    term *= z[j];
                }
                for _ in 0..zbe[j] {
                    term *= z[j].conj();
                }
            }
            acc += term;
        }
        acc
    }

    /// The radial derivative `r_j ∂/∂r_j` (the real part of `z_j ∂/∂z_j`
    /// doubled to the full radial field): multiplies each term by
    /// `β_j + γ_j`.
    pub fn radial_derivative(&self, j: usize) -> CPoly {
        let mut out = CPoly::zero(self.nvars);
        for ((z, zb), c) in &self.terms {
            let factor = i64::from(z[j]) + i64::from(zb[j]);
            if factor != 0 {
                out.add_term(z.clone(), zb.clone(), c * crate::arith::gauss_int(factor));
            }
        }
        out
    }

    /// The angular derivative `∂/∂θ_j`: multiplies each term by
    /// `i(β_j − γ_j)`.
    pub fn angular_derivative(&self, j: usize) -> CPoly {
        let mut out = CPoly::zero(self.nvars);
        for ((z, zb), c) in &self.terms {
            let factor = i64::from(z[j]) - i64::from(zb[j]);
            if factor != 0 {
                out.add_term(z.clone(), zb.clone(), c * crate::arith::gauss_parts(0, factor));
            }
        }
        out
    }
}

impl fmt::Display for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let rendered: Vec<String> = self
            .terms
            .iter()
            .map(|((z, zb), c)| {
                let mut s = format!("({})", crate::arith::gauss_to_string(c));
                for (j, &e) in z.iter().enumerate() {
                    if e > 0 {
                        s.push_str(&format!(" z{}^{}", j + 1, e));
                    }
                }
                for (j, &e) in zb.iter().enumerate() {
                    if e > 0 {
                        s.push_str(&format!(" ~z{}^{}", j + 1, e));
                    }
                }
                s
            })
            .collect();
        f.write_str(&rendered.join(" + "))
    }
}

type BlackBoxFn = Arc<dyn Fn(&[Complex64]) -> Complex64 + Send + Sync>;

/// A test function on a chart: exact polynomial data or a sampled black box.
#[derive(Clone)]
pub enum TestFunction {
    Poly(CPoly),
    BlackBox { nvars: usize, f: BlackBoxFn },
}

impl TestFunction {
    pub fn nvars(&self) -> usize {
        match self {
            TestFunction::Poly(p) => p.nvars(),
            TestFunction::BlackBox { nvars, .. } => *nvars,
        }
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        match self {
            TestFunction::Poly(p) => p.eval(z),
            TestFunction::BlackBox { f, .. } => f(z),
        }
    }
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Poly(p) => write!(f, "Poly({p})"),
            TestFunction::BlackBox { nvars, .. } => write!(f, "BlackBox({nvars} vars)"),
        }
    }
}

/// Which coordinates `e_S` sends to zero: exactly the basis monomials
/// vanishing on the stratum.
pub fn kill_mask(chart: &Chart, stratum: usize) -> Result<Vec<bool>, StrataError> {
    let strata = chart.strata();
    if stratum >= strata.len() {
        return Err(StrataError::NotAStratum(stratum));
    }
    Ok((0..chart.basis().len())
        .map(|i| chart.monomial_vanishes_on(i, &strata[stratum]))
        .collect())
}

fn term_killed(z: &[u8], zb: &[u8], mask: &[bool]) -> bool {
    mask.iter()
        .enumerate()
        .any(|(j, &killed)| killed && (z[j] > 0 || zb[j] > 0))
}

/// The operator `e_S`: substitute 0 for every coordinate vanishing on the
/// stratum; exact on polynomials, precomposition for black boxes.
pub fn e_s(f: &TestFunction, stratum: usize, chart: &Chart) -> Result<TestFunction, StrataError> {
    let mask = kill_mask(chart, stratum)?;
    Ok(apply_mask(f, &mask))
}

fn apply_mask(f: &TestFunction, mask: &[bool]) -> TestFunction {
    match f {
        TestFunction::Poly(p) => {
            TestFunction::Poly(p.filter(|z, zb| !term_killed(z, zb, mask)))
        }
        TestFunction::BlackBox { nvars, f } => {
            let mask = mask.to_vec();
            let inner = f.clone();
            TestFunction::BlackBox {
                nvars: *nvars,
                f: Arc::new(move |z: &[Complex64]| {
                    let masked: Vec<Complex64> = z
                        .iter()
                        .zip(&mask)
                        .map(|(v, &k)| if k { Complex64::new(0.0, 0.0) } else { *v })
                        .collect();
                    inner(&masked)
                }),
            }
        }
    }
}

/// The operator `Δ_I = ∏_{S∈I} (id − e_S)`: on polynomials it keeps
/// exactly the terms containing, for every `S ∈ I`, at least one
/// coordinate vanishing on `S`.
pub fn delta_i(
    f: &TestFunction,
    collection: &[usize],
    chart: &Chart,
) -> Result<TestFunction, StrataError> {
    if collection.is_empty() {
        return Err(StrataError::EmptyCollection);
    }
    let masks: Vec<Vec<bool>> = collection
        .iter()
        .map(|&s| kill_mask(chart, s))
        .collect::<Result<_, _>>()?;
    match f {
        TestFunction::Poly(p) => Ok(TestFunction::Poly(
            p.filter(|z, zb| masks.iter().all(|mask| term_killed(z, zb, mask))),
        )),
        TestFunction::BlackBox { nvars, f } => {
            let inner = f.clone();
            let masks = masks.clone();
            let nvars = *nvars;
            Ok(TestFunction::BlackBox {
                nvars,
                f: Arc::new(move |z: &[Complex64]| {
                    // Inclusion–exclusion over subsets of the collection.
                    let mut acc = Complex64::new(0.0, 0.0);
                    for subset in 0u32..(1 << masks.len()) {
                        let mut point: Vec<Complex64> = z.to_vec();
                        let mut sign = 1.0;
                        for (b, mask) in masks.iter().enumerate() {
                            if subset & (1 << b) != 0 {
                                sign = -sign;
                                for (v, &k) in point.iter_mut().zip(mask) {
                                    if k {
                                        *v = Complex64::new(0.0, 0.0);
                                    }
                                }
                            }
                        }
                        acc += sign * inner(&point);
                    }
                    acc
                }),
            })
        }
    }
}

/// The weight `w_I = Σ |ζ_gen|`: generator monomials of the set of smooth
/// monomials killed by every stratum in the collection, minimal under
/// divisibility in the admissible monoid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightFunction {
    /// Exponent vectors over the chart basis.
    pub generators: Vec<Vec<u8>>,
}

impl WeightFunction {
    pub fn eval(&self, z: &[Complex64]) -> f64 {
        self.generators
            .iter()
            .map(|g| {
                let mut m = 1.0;
                for (j, &e) in g.iter().enumerate() {
                    for _ in 0..e {
                        m *= z[j].norm();
                    }
                }
                m
            })
            .sum()
    }
}

pub fn weight_w_i(
    collection: &[usize],
    chart: &Chart,
) -> Result<WeightFunction, StrataError> {
    if collection.is_empty() {
        return Err(StrataError::EmptyCollection);
    }
    let masks: Vec<Vec<bool>> = collection
        .iter()
        .map(|&s| kill_mask(chart, s))
        .collect::<Result<_, _>>()?;
    let n = chart.basis().len();
    let budget = chart.m() + 1;
    // Candidate products of basis monomials of bounded multidegree that
    // vanish on every stratum of the collection, deduplicated by the
    // underlying (a, α) data.
    let mut candidates: Vec<(Vec<u8>, Rat, Vec<i64>)> = Vec::new();
    let mut stack = vec![0u8; n];
    collect_candidates(chart, &masks, budget, 0, &mut stack, &mut candidates);
    candidates.sort_by(|x, y| {
        let dx: u32 = x.0.iter().map(|&e| u32::from(e)).sum();
        let dy: u32 = y.0.iter().map(|&e| u32::from(e)).sum();
        dx.cmp(&dy).then_with(|| x.0.cmp(&y.0))
    });
    candidates.dedup_by(|a, b| a.1 == b.1 && a.2 == b.2);
    // Minimality: drop any candidate divisible by another (quotient an
    // admissible monomial on P).
    let closed = chart.polytope().closure();
    let sys = closed.system();
    let mut generators: Vec<(Vec<u8>, Rat, Vec<i64>)> = Vec::new();
    'next: for cand in candidates {
        for g in &generators {
            let da = cand.1.clone() - &g.1;
            let dalpha: Vec<Rat> = cand
                .2
                .iter()
                .zip(&g.2)
                .map(|(&x, &y)| crate::arith::rat_int(x - y))
                .collect();
            if sys.implies(&dalpha, &da, false) {
                continue 'next;
            }
        }
        generators.push(cand);
    }
    Ok(WeightFunction { generators: generators.into_iter().map(|g| g.0).collect() })
}

fn collect_candidates(
    chart: &Chart,
    masks: &[Vec<bool>],
    budget: usize,
    var: usize,
    stack: &mut Vec<u8>,
    out: &mut Vec<(Vec<u8>, Rat, Vec<i64>)>,
) {
    let n = chart.basis().len();
    if var == n {
        if stack.iter().all(|&e| e == 0) {
            return;
        }
        // Vanishes on a stratum iff it contains a killed variable.
        let zb = vec![0u8; n];
        if masks.iter().all(|mask| term_killed(stack, &zb, mask)) {
            let mut a = Rat::zero();
            let mut alpha = vec![0i64; chart.m()];
            for (j, &e) in stack.iter().enumerate() {
                let b = &chart.basis()[j];
                a += b.a.clone() * crate::arith::rat_int(i64::from(e));
                for (slot, &c) in alpha.iter_mut().zip(&b.alpha) {
                    *slot += c * i64::from(e);
                }
            }
            out.push((stack.clone(), a, alpha));
        }
        return;
    }
    let used: usize = stack.iter().map(|&e| usize::from(e)).sum();
    for e in 0..=(budget - used) {
        stack[var] = e as u8;
        collect_candidates(chart, masks, budget, var + 1, stack, out);
    }
    stack[var] = 0;
}

/// Grid of sample points in smooth-part coordinates: per complex
/// coordinate, radii `r·k/g` for `k = 0..g` and the four quarter-turn
/// phases. Refining doubles the radial resolution; the refined grid
/// contains the coarse one.
#[derive(Clone, Debug)]
pub struct Region {
    pub radii: Vec<Rat>,
}

impl Region {
    pub fn polydisc(nvars: usize, radius: Rat) -> Region {
        Region { radii: vec![radius; nvars] }
    }
}

fn grid_axis(radius: &Rat, resolution: usize) -> Vec<Complex64> {
    let r = rat_to_f64(radius);
    let mut axis = Vec::with_capacity(4 * resolution + 1);
    axis.push(Complex64::new(0.0, 0.0));
    for k in 1..=resolution {
        let rho = r * k as f64 / resolution as f64;
        axis.push(Complex64::new(rho, 0.0));
        axis.push(Complex64::new(0.0, rho));
        axis.push(Complex64::new(-rho, 0.0));
        axis.push(Complex64::new(0.0, -rho));
    }
    axis
}

fn for_each_grid_point(
    region: &Region,
    resolution: usize,
    mut visit: impl FnMut(&[Complex64]),
) {
    let axes: Vec<Vec<Complex64>> =
        region.radii.iter().map(|r| grid_axis(r, resolution)).collect();
    let mut point = vec![Complex64::new(0.0, 0.0); axes.len()];
    fn rec(
        axes: &[Vec<Complex64>],
        depth: usize,
        point: &mut Vec<Complex64>,
        visit: &mut impl FnMut(&[Complex64]),
    ) {
        if depth == axes.len() {
            visit(point);
            return;
        }
        for &v in &axes[depth] {
            point[depth] = v;
            rec(axes, depth + 1, point, visit);
        }
    }
    rec(&axes, 0, &mut point, &mut visit);
}

/// Estimate of `sup |Δ_I f| / w_I` over the region, from two nested grids.
#[derive(Clone, Debug)]
pub struct DeltaBoundReport {
    /// Estimate on the coarse grid.
    pub coarse: f64,
    /// Estimate on the refined (doubled) grid; this is the reported ratio.
    pub sup_ratio: Rat,
    /// Whether the two estimates agree within 5%.
    pub monotone: bool,
}

/// Grid estimate of the constant in the bound `|Δ_I f| ≤ C·w_I`, with a
/// stability flag from one grid doubling. Points where the weight vanishes
/// are excluded (the ratio extends continuously by zero there).
pub fn verify_delta_bound(
    f: &TestFunction,
    collection: &[usize],
    chart: &Chart,
    region: &Region,
    grid_resolution: usize,
) -> Result<DeltaBoundReport, StrataError> {
    if region.radii.is_empty() || region.radii.iter().any(|r| r.is_negative()) {
        return Err(StrataError::EmptyRegion);
    }
    let delta = delta_i(f, collection, chart)?;
    let weight = weight_w_i(collection, chart)?;
    let sup_at = |resolution: usize| -> f64 {
        let mut sup = 0.0f64;
        for_each_grid_point(region, resolution, |z| {
            let w = weight.eval(z);
            if w == 0.0 {
                return;
            }
            let v = delta.eval(z).norm() / w;
            if v > sup {
                sup = v;
            }
        });
        sup
    };
    let g = grid_resolution.max(1);
    let coarse = sup_at(g);
    let fine = sup_at(2 * g);
    let monotone = (fine - coarse).abs() <= 0.05 * fine.max(f64::MIN_POSITIVE);
    let sup_ratio = Rat::from_float(fine).unwrap_or_else(Rat::zero);
    Ok(DeltaBoundReport { coarse, sup_ratio, monotone })
}

/// Components of the seminorm estimate.
#[derive(Clone, Debug)]
pub struct SeminormEstimate {
    /// Estimate of `|f|_{k,δ}`.
    pub total: Rat,
    /// Per-collection suprema `sup w_I^{−δ} |Δ_I f|` at the top level.
    pub per_collection: Vec<(Vec<usize>, Rat)>,
}

/// Grid estimate of `|f|_{k,δ} = |∇f|_{k−1,δ} + sup Σ_{|I|≤k}
/// w_I^{−δ}|Δ_I f|`, with the gradient in the standard basis (radial and
/// angular fields), exact for polynomials and by central differences for
/// black boxes.
pub fn seminorm_estimate(
    f: &TestFunction,
    k: usize,
    delta: &Rat,
    chart: &Chart,
    region: &Region,
    grid_resolution: usize,
) -> Result<SeminormEstimate, StrataError> {
    if !(delta.is_positive() && delta < &Rat::one()) {
        return Err(StrataError::BadDelta);
    }
    if region.radii.len() != chart.basis().len() || region.radii.iter().any(|r| r.is_negative()) {
        return Err(StrataError::EmptyRegion);
    }
    let g = grid_resolution.max(1);
    let collections = collections_up_to(chart, k);
    let mut per_collection = Vec::new();
    let total = seminorm_rec(&[f.clone()], k, delta, chart, region, g, &collections, &mut per_collection)?;
    Ok(SeminormEstimate {
        total: Rat::from_float(total).unwrap_or_else(Rat::zero),
        per_collection,
    })
}

/// Nonempty collections of distinct nonzero strata of size ≤ k.
fn collections_up_to(chart: &Chart, k: usize) -> Vec<Vec<usize>> {
    let nonzero = chart.nonzero_strata();
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        nonzero: &[usize],
        start: usize,
        k: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if !current.is_empty() {
            out.push(current.clone());
        }
        if current.len() == k {
            return;
        }
        for i in start..nonzero.len() {
            current.push(nonzero[i]);
            rec(nonzero, i + 1, k, current, out);
            current.pop();
        }
    }
    rec(&nonzero, 0, k, &mut current, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn seminorm_rec(
    components: &[TestFunction],
    k: usize,
    delta: &Rat,
    chart: &Chart,
    region: &Region,
    g: usize,
    collections: &[Vec<usize>],
    per_collection: &mut Vec<(Vec<usize>, Rat)>,
) -> Result<f64, StrataError> {
    let delta_f = rat_to_f64(delta);
    // sup over the grid of Σ_{|I| ≤ k} w_I^{−δ}|Δ_I f|, plus the plain sup
    // (the empty collection).
    let level: Vec<Vec<usize>> =
        collections.iter().filter(|c| c.len() <= k).cloned().collect();
    let mut deltas: Vec<(Vec<usize>, Vec<TestFunction>, WeightFunction)> = Vec::new();
    for c in &level {
        let df: Vec<TestFunction> = components
            .iter()
            .map(|f| delta_i(f, c, chart))
            .collect::<Result<_, _>>()?;
        deltas.push((c.clone(), df, weight_w_i(c, chart)?));
    }
    let mut sup_sum = 0.0f64;
    let mut per_sup = vec![0.0f64; deltas.len()];
    for_each_grid_point(region, g, |z| {
        let plain: f64 = components.iter().map(|f| f.eval(z).norm_sqr()).sum::<f64>().sqrt();
        let mut total = plain;
        for (slot, (_, df, w)) in per_sup.iter_mut().zip(&deltas) {
            let wv = w.eval(z);
            if wv == 0.0 {
                continue;
            }
            let dv: f64 = df.iter().map(|f| f.eval(z).norm_sqr()).sum::<f64>().sqrt();
            let weighted = dv / wv.powf(delta_f);
            if weighted > *slot {
                *slot = weighted;
            }
            total += weighted;
        }
        if total > sup_sum {
            sup_sum = total;
        }
    });
    if components.len() == 1 {
        for ((c, _, _), sup) in deltas.iter().zip(&per_sup) {
            per_collection.push((c.clone(), Rat::from_float(*sup).unwrap_or_else(Rat::zero)));
        }
    }
    if k == 0 {
        return Ok(sup_sum);
    }
    // Gradient components in the standard basis: radial and angular fields
    // per coordinate, applied to every component of the current tensor.
    let n = chart.basis().len();
    let mut grad: Vec<TestFunction> = Vec::with_capacity(components.len() * 2 * n);
    for f in components {
        for j in 0..n {
            match f {
                TestFunction::Poly(p) => {
                    grad.push(TestFunction::Poly(p.radial_derivative(j)));
                    grad.push(TestFunction::Poly(p.angular_derivative(j)));
                }
                TestFunction::BlackBox { nvars, f } => {
                    let h = 1.0 / (4.0 * g as f64);
                    for angular in [false, true] {
                        let inner = f.clone();
                        grad.push(TestFunction::BlackBox {
                            nvars: *nvars,
                            f: Arc::new(move |z: &[Complex64]| {
                                let mut plus = z.to_vec();
                                let mut minus = z.to_vec();
                                let (fp, fm) = if angular {
                                    let rot = Complex64::from_polar(1.0, h);
                                    plus[j] *= rot;
                                    minus[j] *= rot.conj();
                                    (plus, minus)
                                } else {
                                    plus[j] *= 1.0 + h;
                                    minus[j] *= 1.0 - h;
                                    (plus, minus)
                                };
                                (inner(&fp) - inner(&fm)) / (2.0 * h)
                            }),
                        });
                    }
                }
            }
        }
    }
    let grad_norm =
        seminorm_rec(&grad, k - 1, delta, chart, region, g, collections, per_collection)?;
    Ok(grad_norm + sup_sum)
}

/// The smallest stratum of the chart polytope whose closure contains both
/// given strata (their join in the face lattice).
pub fn join_stratum(chart: &Chart, s1: usize, s2: usize) -> Result<usize, StrataError> {
    let strata = chart.strata();
    if s1 >= strata.len() {
        return Err(StrataError::NotAStratum(s1));
    }
    if s2 >= strata.len() {
        return Err(StrataError::NotAStratum(s2));
    }
    let joint: std::collections::BTreeSet<usize> =
        strata[s1].active.intersection(&strata[s2].active).copied().collect();
    strata
        .iter()
        .position(|s| s.active == joint)
        .ok_or(StrataError::NotAStratum(s1))
}

/// Exact equality of two test functions; only defined for polynomials.
pub fn poly_eq(f: &TestFunction, g: &TestFunction) -> bool {
    match (f, g) {
        (TestFunction::Poly(p), TestFunction::Poly(q)) => p == q,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{gauss_int, rat, rat_int};
    use crate::polytope::AffinePolytope;

    fn t22() -> Chart {
        let p = AffinePolytope::from_closed(2, &[(0, vec![1, 0]), (0, vec![0, 1])]).unwrap();
        Chart::new(0, p).unwrap()
    }

    /// Stratum index with the given dimension and vanishing pattern.
    fn stratum_where(chart: &Chart, dim: usize, vanishing: &[bool]) -> usize {
        (0..chart.strata().len())
            .find(|&s| {
                chart.strata()[s].dim == dim
                    && (0..chart.basis().len())
                        .all(|i| chart.monomial_vanishes_on(i, &chart.strata()[s]) == vanishing[i])
            })
            .expect("stratum exists")
    }

    #[test]
    fn e_s_substitutes_zero() {
        let chart = t22();
        // Basis is sorted [z₂, z₁] by exponent; find strata by pattern.
        // S₁ = (0,∞)×0 kills z₁ only.
        let z1_pos = chart.basis().iter().position(|b| b.alpha == vec![1, 0]).unwrap();
        let z2_pos = chart.basis().iter().position(|b| b.alpha == vec![0, 1]).unwrap();
        let mut vanish_s1 = vec![false; 2];
        vanish_s1[z1_pos] = true;
        let s1 = stratum_where(&chart, 1, &vanish_s1);
        // f = z₁² + z₁z₂ + z₂ + 3
        let n = 2;
        let f = {
            let z1 = CPoly::var(n, z1_pos);
            let z2 = CPoly::var(n, z2_pos);
            let sq = z1.mul(&z1);
            TestFunction::Poly(
                sq.add(&z1.mul(&z2)).add(&z2).add(&CPoly::constant(n, gauss_int(3))),
            )
        };
        let ef = e_s(&f, s1, &chart).unwrap();
        // e_{S₁} f = f(0, z₂) = z₂ + 3.
        let expected = TestFunction::Poly(
            CPoly::var(n, z2_pos).add(&CPoly::constant(n, gauss_int(3))),
        );
        assert!(poly_eq(&ef, &expected));
        // The interior stratum kills both: f(0,0) = 3.
        let interior = stratum_where(&chart, 2, &[true, true]);
        let ef = e_s(&f, interior, &chart).unwrap();
        assert!(poly_eq(&ef, &TestFunction::Poly(CPoly::constant(n, gauss_int(3)))));
        // The vertex stratum kills nothing.
        let vertex = stratum_where(&chart, 0, &[false, false]);
        let ef = e_s(&f, vertex, &chart).unwrap();
        assert!(poly_eq(&ef, &f));
    }

    #[test]
    fn delta_inclusion_exclusion() {
        let chart = t22();
        let z1_pos = chart.basis().iter().position(|b| b.alpha == vec![1, 0]).unwrap();
        let z2_pos = chart.basis().iter().position(|b| b.alpha == vec![0, 1]).unwrap();
        let mut v1 = vec![false; 2];
        v1[z1_pos] = true;
        let mut v2 = vec![false; 2];
        v2[z2_pos] = true;
        let s1 = stratum_where(&chart, 1, &v1);
        let s2 = stratum_where(&chart, 1, &v2);
        let n = 2;
        let z1 = CPoly::var(n, z1_pos);
        let z2 = CPoly::var(n, z2_pos);
        // f = z₁z₂: all corrections vanish, Δ f = f.
        let f = TestFunction::Poly(z1.mul(&z2));
        let df = delta_i(&f, &[s1, s2], &chart).unwrap();
        assert!(poly_eq(&df, &f));
        // f = 1: Δ f = 0.
        let one = TestFunction::Poly(CPoly::constant(n, gauss_int(1)));
        let dof = delta_i(&one, &[s1, s2], &chart).unwrap();
        match dof {
            TestFunction::Poly(p) => assert!(p.is_zero()),
            _ => unreachable!(),
        }
        // Δ_{S₁,S₂}(z₁ + z₂ + z₁z₂) = z₁z₂.
        let g = TestFunction::Poly(z1.add(&z2).add(&z1.mul(&z2)));
        let dg = delta_i(&g, &[s1, s2], &chart).unwrap();
        assert!(poly_eq(&dg, &TestFunction::Poly(z1.mul(&z2))));
    }

    #[test]
    fn operator_identities() {
        let chart = t22();
        let n = 2;
        let z1 = CPoly::var(n, 0);
        let z2 = CPoly::var(n, 1);
        let zb1 = CPoly::conj_var(n, 0);
        let f = TestFunction::Poly(
            z1.mul(&z1)
                .add(&z1.mul(&z2))
                .add(&zb1.mul(&z2))
                .add(&CPoly::constant(n, gauss_int(2))),
        );
        let strata: Vec<usize> = chart.nonzero_strata();
        // Idempotence.
        for &s in &strata {
            let once = e_s(&f, s, &chart).unwrap();
            let twice = e_s(&once, s, &chart).unwrap();
            assert!(poly_eq(&once, &twice));
        }
        // Commutation with the join stratum.
        for &si in &strata {
            for &sj in &strata {
                let both = e_s(&e_s(&f, sj, &chart).unwrap(), si, &chart).unwrap();
                let join = join_stratum(&chart, si, sj).unwrap();
                let joined = e_s(&f, join, &chart).unwrap();
                assert!(poly_eq(&both, &joined), "strata {si}, {sj}");
            }
        }
        // Annihilation: e_S Δ_I = 0 for S ∈ I.
        let i_all: Vec<usize> = strata.clone();
        let df = delta_i(&f, &i_all, &chart).unwrap();
        for &s in &i_all {
            let ed = e_s(&df, s, &chart).unwrap();
            match ed {
                TestFunction::Poly(p) => assert!(p.is_zero(), "stratum {s}"),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn product_expansion() {
        let chart = t22();
        let n = 2;
        let z1 = CPoly::var(n, 0);
        let z2 = CPoly::var(n, 1);
        let f = z1.mul(&z1).add(&z2).add(&CPoly::constant(n, gauss_int(1)));
        let g = z1.mul(&z2).add(&z1).add(&CPoly::constant(n, gauss_int(-2)));
        let strata = chart.nonzero_strata();
        // Δ_I(fg) = Σ_{I'⊆I} (e_{I'}Δ_{I−I'}f)(Δ_{I'}g) over every collection.
        for mask in 1u32..(1 << strata.len()) {
            let collection: Vec<usize> = strata
                .iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, &s)| s)
                .collect();
            let lhs = match delta_i(&TestFunction::Poly(f.mul(&g)), &collection, &chart).unwrap()
            {
                TestFunction::Poly(p) => p,
                _ => unreachable!(),
            };
            let mut rhs = CPoly::zero(n);
            for sub in 0u32..(1 << collection.len()) {
                let inner: Vec<usize> = collection
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| sub & (1 << b) != 0)
                    .map(|(_, &s)| s)
                    .collect();
                let outer: Vec<usize> = collection
                    .iter()
                    .filter(|s| !inner.contains(s))
                    .copied()
                    .collect();
                let mut part = TestFunction::Poly(f.clone());
                if !outer.is_empty() {
                    part = delta_i(&part, &outer, &chart).unwrap();
                }
                for &s in &inner {
                    part = e_s(&part, s, &chart).unwrap();
                }
                let gpart = if inner.is_empty() {
                    TestFunction::Poly(g.clone())
                } else {
                    delta_i(&TestFunction::Poly(g.clone()), &inner, &chart).unwrap()
                };
                let (pf, pg) = match (part, gpart) {
                    (TestFunction::Poly(a), TestFunction::Poly(b)) => (a, b),
                    _ => unreachable!(),
                };
                rhs = rhs.add(&pf.mul(&pg));
            }
            assert_eq!(lhs, rhs, "collection {collection:?}");
        }
    }

    #[test]
    fn weights_on_t22() {
        let chart = t22();
        let z1_pos = chart.basis().iter().position(|b| b.alpha == vec![1, 0]).unwrap();
        let z2_pos = chart.basis().iter().position(|b| b.alpha == vec![0, 1]).unwrap();
        let mut v1 = vec![false; 2];
        v1[z1_pos] = true;
        let mut v2 = vec![false; 2];
        v2[z2_pos] = true;
        let s1 = stratum_where(&chart, 1, &v1);
        let s2 = stratum_where(&chart, 1, &v2);
        let interior = stratum_where(&chart, 2, &[true, true]);
        // w_{S₁} = |z₁|.
        let w = weight_w_i(&[s1], &chart).unwrap();
        let mut expect = vec![0u8; 2];
        expect[z1_pos] = 1;
        assert_eq!(w.generators, vec![expect]);
        // w_{S₁,S₂} = |z₁z₂|.
        let w = weight_w_i(&[s1, s2], &chart).unwrap();
        assert_eq!(w.generators, vec![vec![1, 1]]);
        // w_{interior} = |z₁| + |z₂|.
        let w = weight_w_i(&[interior], &chart).unwrap();
        assert_eq!(w.generators.len(), 2);
        assert!(w.generators.contains(&vec![1, 0]) && w.generators.contains(&vec![0, 1]));
    }

    #[test]
    fn delta_bound_closed_forms() {
        let chart = t22();
        let z1_pos = chart.basis().iter().position(|b| b.alpha == vec![1, 0]).unwrap();
        let z2_pos = chart.basis().iter().position(|b| b.alpha == vec![0, 1]).unwrap();
        let mut v1 = vec![false; 2];
        v1[z1_pos] = true;
        let mut v2 = vec![false; 2];
        v2[z2_pos] = true;
        let s1 = stratum_where(&chart, 1, &v1);
        let s2 = stratum_where(&chart, 1, &v2);
        let region = Region::polydisc(2, rat_int(1));
        // f = z₁²: |Δ_{S₁} f| / |z₁| = |z₁| ≤ 1 on the unit polydisc.
        let z1 = CPoly::var(2, z1_pos);
        let f = TestFunction::Poly(z1.mul(&z1));
        let report = verify_delta_bound(&f, &[s1], &chart, &region, 2).unwrap();
        assert!(report.monotone);
        let sup = report.sup_ratio.to_f64().unwrap();
        assert!((sup - 1.0).abs() < 1e-9, "sup {sup}");
        // f = z₂ is independent of S₁: the ratio vanishes.
        let g = TestFunction::Poly(CPoly::var(2, z2_pos));
        let report = verify_delta_bound(&g, &[s1], &chart, &region, 2).unwrap();
        assert_eq!(report.sup_ratio, Rat::zero());
        // f = z₁z₂ against w = |z₁z₂|: ratio is 1 off the axes.
        let h = TestFunction::Poly(CPoly::var(2, z1_pos).mul(&CPoly::var(2, z2_pos)));
        let report = verify_delta_bound(&h, &[s1, s2], &chart, &region, 2).unwrap();
        let sup = report.sup_ratio.to_f64().unwrap();
        assert!((sup - 1.0).abs() < 1e-9, "sup {sup}");
        assert!(report.monotone);
    }

    #[test]
    fn seminorm_simple_cases() {
        // T¹₁: f = z₁, k = 0: the estimate is sup |z₁| = 1.
        let p = AffinePolytope::from_closed(1, &[(0, vec![1])]).unwrap();
        let chart = Chart::new(0, p).unwrap();
        let f = TestFunction::Poly(CPoly::var(1, 0));
        let region = Region::polydisc(1, rat_int(1));
        let est = seminorm_estimate(&f, 0, &rat(1, 2), &chart, &region, 4).unwrap();
        let v = est.total.to_f64().unwrap();
        assert!((v - 1.0).abs() < 1e-9, "total {v}");
        // Constants: all Δ terms vanish; only the plain sup contributes at
        // every level of the gradient recursion (gradients vanish).
        let c = TestFunction::Poly(CPoly::constant(1, gauss_int(7)));
        let est = seminorm_estimate(&c, 2, &rat(1, 2), &chart, &region, 2).unwrap();
        let v = est.total.to_f64().unwrap();
        assert!((v - 7.0).abs() < 1e-9, "total {v}");
        for (_, sup) in &est.per_collection {
            assert_eq!(sup, &Rat::zero());
        }
        // Bad delta rejected.
        assert_eq!(
            seminorm_estimate(&f, 0, &rat_int(1), &chart, &region, 2).unwrap_err(),
            StrataError::BadDelta
        );
    }

    #[test]
    fn seminorm_z1z2_term_is_bounded() {
        let chart = t22();
        let z1_pos = chart.basis().iter().position(|b| b.alpha == vec![1, 0]).unwrap();
        let z2_pos = chart.basis().iter().position(|b| b.alpha == vec![0, 1]).unwrap();
        let f = TestFunction::Poly(CPoly::var(2, z1_pos).mul(&CPoly::var(2, z2_pos)));
        let region = Region::polydisc(2, rat_int(1));
        let est = seminorm_estimate(&f, 2, &rat(1, 2), &chart, &region, 2).unwrap();
        // The w_{S₁,S₂}^{−1/2}Δ_{S₁,S₂}f term equals |z₁z₂|^{1/2} ≤ 1.
        let mut v1 = vec![false; 2];
        v1[z1_pos] = true;
        let mut v2 = vec![false; 2];
        v2[z2_pos] = true;
        let s1 = stratum_where(&chart, 1, &v1);
        let s2 = stratum_where(&chart, 1, &v2);
        let pair: Vec<usize> = {
            let mut p = vec![s1, s2];
            p.sort();
            p
        };
        let entry = est
            .per_collection
            .iter()
            .find(|(c, _)| *c == pair)
            .expect("pair collection present");
        let sup = entry.1.to_f64().unwrap();
        assert!(sup <= 1.0 + 1e-9 && sup > 0.9, "sup {sup}");
        assert!(est.total.to_f64().unwrap().is_finite());
    }

    #[test]
    fn black_box_agrees_with_polynomial() {
        let chart = t22();
        let z1 = CPoly::var(2, 0);
        let z2 = CPoly::var(2, 1);
        let poly = z1.mul(&z1).add(&z2).add(&CPoly::constant(2, gauss_int(1)));
        let f_poly = TestFunction::Poly(poly.clone());
        let f_bb = TestFunction::BlackBox {
            nvars: 2,
            f: Arc::new(move |z: &[Complex64]| z[0] * z[0] + z[1] + 1.0),
        };
        let strata = chart.nonzero_strata();
        let collection = vec![strata[0], strata[1]];
        let dp = delta_i(&f_poly, &collection, &chart).unwrap();
        let db = delta_i(&f_bb, &collection, &chart).unwrap();
        for (a, b) in [(0.5, 0.25), (1.0, -0.75), (0.0, 0.3)] {
            let z = [Complex64::new(a, 0.1), Complex64::new(b, -0.2)];
            let vp = dp.eval(&z);
            let vb = db.eval(&z);
            assert!((vp - vb).norm() < 1e-9, "{vp} vs {vb}");
        }
    }
}
