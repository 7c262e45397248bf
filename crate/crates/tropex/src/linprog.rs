//! Exact linear programming over the rationals via Fourier–Motzkin
//! elimination.
//!
//! All polyhedral predicates in this crate (feasibility, redundancy, face
//! computations, bounded-below tests) reduce to queries on a [`System`] of
//! affine inequalities `constant + coeffs·x ≥ 0` (or `> 0`). Fourier–Motzkin
//! is quadratic per eliminated variable, which is fine at the dimensions
//! (≤ 4) and constraint counts this crate works at, and it handles strict
//! inequalities exactly.

use crate::arith::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// One inequality `constant + coeffs·x ≥ 0` (`> 0` when `strict`).
/// Stored with integer entries in lowest terms so rows can be deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Row {
    coeffs: Vec<BigInt>,
    constant: BigInt,
    strict: bool,
}

impl Row {
    fn from_rational(coeffs: &[Rat], constant: &Rat, strict: bool) -> Row {
        let mut lcm = constant.denom().clone();
        for c in coeffs {
            lcm = lcm.lcm(c.denom());
        }
        let scale = |r: &Rat| -> BigInt { r.numer() * (&lcm / r.denom()) };
        let mut row = Row {
            coeffs: coeffs.iter().map(scale).collect(),
            constant: scale(constant),
            strict,
        };
        row.reduce();
        row
    }

    fn reduce(&mut self) {
        let mut g = self.constant.abs();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        if g > BigInt::one() {
            for c in &mut self.coeffs {
                *c /= &g;
            }
            self.constant /= &g;
        }
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// For a constant row, whether it holds.
    fn constant_holds(&self) -> bool {
        if self.strict {
            self.constant.is_positive()
        } else {
            !self.constant.is_negative()
        }
    }
}

/// A finite system of affine inequalities in `nvars` rational variables.
#[derive(Clone, Debug)]
pub(crate) struct System {
    nvars: usize,
    rows: Vec<Row>,
}

/// Result of minimizing a linear functional over a system.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Infimum {
    Infeasible,
    Unbounded,
    /// Greatest lower bound, and whether some feasible point attains it.
    Value { inf: Rat, attained: bool },
}

impl System {
    pub fn new(nvars: usize) -> System {
        System { nvars, rows: Vec::new() }
    }


    /// Add `constant + coeffs·x ≥ 0` (or `> 0`).
    pub fn add(&mut self, coeffs: &[Rat], constant: &Rat, strict: bool) {
        assert_eq!(coeffs.len(), self.nvars);
        self.rows.push(Row::from_rational(coeffs, constant, strict));
    }

    /// Add the equality `constant + coeffs·x = 0` as two inequalities.
    pub fn add_eq(&mut self, coeffs: &[Rat], constant: &Rat) {
        self.add(coeffs, constant, false);
        let neg: Vec<Rat> = coeffs.iter().map(|c| -c.clone()).collect();
        self.add(&neg, &(-constant.clone()), false);
    }

    /// Drop duplicate rows, keep only the strongest of rows sharing a
    /// coefficient vector, and drop trivially true constant rows.
    /// Returns `false` if a constant row is violated (system infeasible).
    fn prune(&mut self) -> bool {
        let mut best: BTreeMap<Vec<BigInt>, (BigInt, bool)> = BTreeMap::new();
        for row in &self.rows {
            if row.is_constant() {
                if !row.constant_holds() {
                    return false;
                }
                continue;
            }
            match best.get_mut(&row.coeffs) {
                None => {
                    best.insert(row.coeffs.clone(), (row.constant.clone(), row.strict));
                }
                Some((c, s)) => {
                    // Smaller constant is the tighter bound; on ties strict wins.
                    if row.constant < *c {
                        *c = row.constant.clone();
                        *s = row.strict;
                    } else if row.constant == *c {
                        *s = *s || row.strict;
                    }
                }
            }
        }
        self.rows = best
            .into_iter()
            .map(|(coeffs, (constant, strict))| Row { coeffs, constant, strict })
            .collect();
        true
    }

    /// Eliminate the variable with the highest index; `None` when a constant
    /// row already witnesses infeasibility.
    fn eliminate_last(&self) -> Option<System> {
        let j = self.nvars - 1;
        let mut out = System::new(j);
        let mut lower: Vec<&Row> = Vec::new(); // coeff j > 0
        let mut upper: Vec<&Row> = Vec::new(); // coeff j < 0
        for row in &self.rows {
            let cj = &row.coeffs[j];
            if cj.is_zero() {
                out.rows.push(Row {
                    coeffs: row.coeffs[..j].to_vec(),
                    constant: row.constant.clone(),
                    strict: row.strict,
                });
            } else if cj.is_positive() {
                lower.push(row);
            } else {
                upper.push(row);
            }
        }
        for lo in &lower {
            for up in &upper {
                let a = &lo.coeffs[j]; // > 0
                let b = -up.coeffs[j].clone(); // > 0
                let mut coeffs = Vec::with_capacity(j);
                for i in 0..j {
                    coeffs.push(&lo.coeffs[i] * &b + &up.coeffs[i] * a);
                }
                let mut row = Row {
                    coeffs,
                    constant: &lo.constant * &b + &up.constant * a,
                    strict: lo.strict || up.strict,
                };
                row.reduce();
                out.rows.push(row);
            }
        }
        if out.prune() {
            Some(out)
        } else {
            None
        }
    }

    /// The elimination tower: `stages[k]` is the projection onto the first
    /// `k` variables. `None` when infeasibility surfaces along the way.
    fn stages(&self) -> Option<Vec<System>> {
        let mut cur = self.clone();
        if !cur.prune() {
            return None;
        }
        let mut stages = vec![cur.clone()];
        while cur.nvars > 0 {
            cur = cur.eliminate_last()?;
            stages.push(cur.clone());
        }
        stages.reverse(); // stages[k] has k variables
        Some(stages)
    }

    pub fn feasible(&self) -> bool {
        self.stages().is_some()
    }

    /// An exact feasible point, if one exists.
    pub fn feasible_point(&self) -> Option<Vec<Rat>> {
        let stages = self.stages()?;
        let mut point: Vec<Rat> = Vec::with_capacity(self.nvars);
        for k in 1..=self.nvars {
            let sys = &stages[k];
            let j = k - 1;
            // Bounds on x_j induced by the already chosen x_0..x_{j-1}.
            let mut lower: Option<(Rat, bool)> = None;
            let mut upper: Option<(Rat, bool)> = None;
            for row in &sys.rows {
                let cj = &row.coeffs[j];
                if cj.is_zero() {
                    continue;
                }
                let mut rest = Rat::from_integer(row.constant.clone());
                for i in 0..j {
                    rest += Rat::from_integer(row.coeffs[i].clone()) * &point[i];
                }
                let bound = -rest / Rat::from_integer(cj.clone());
                if cj.is_positive() {
                    // x_j ≥ bound
                    if lower.as_ref().map_or(true, |(b, s)| {
                        bound > *b || (bound == *b && row.strict && !s)
                    }) {
                        lower = Some((bound, row.strict));
                    }
                } else if upper.as_ref().map_or(true, |(b, s)| {
                    bound < *b || (bound == *b && row.strict && !s)
                }) {
                    upper = Some((bound, row.strict));
                }
            }
            let x = match (&lower, &upper) {
                (None, None) => Rat::zero(),
                (Some((l, ls)), None) => {
                    if *ls {
                        l + Rat::one()
                    } else {
                        l.clone()
                    }
                }
                (None, Some((u, us))) => {
                    if *us {
                        u - Rat::one()
                    } else {
                        u.clone()
                    }
                }
                (Some((l, _)), Some((u, _))) => {
                    if l == u {
                        l.clone()
                    } else {
                        (l + u) / Rat::from_integer(BigInt::from(2))
                    }
                }
            };
            point.push(x);
        }
        Some(point)
    }

    /// Infimum of `obj·x` over the solution set.
    pub fn infimum(&self, obj: &[Rat]) -> Infimum {
        assert_eq!(obj.len(), self.nvars);
        // Append the variable t with t = obj·x and eliminate everything else.
        let mut sys = System::new(self.nvars + 1);
        for row in &self.rows {
            let mut coeffs: Vec<Rat> = row
                .coeffs
                .iter()
                .map(|c| Rat::from_integer(c.clone()))
                .collect();
            coeffs.push(Rat::zero());
            sys.add(&coeffs, &Rat::from_integer(row.constant.clone()), row.strict);
        }
        let mut teq: Vec<Rat> = obj.iter().map(|c| -c.clone()).collect();
        teq.push(Rat::one());
        sys.add_eq(&teq, &Rat::zero());
        // Move t to index 0 so the elimination order removes the x's.
        let mut swapped = System::new(self.nvars + 1);
        swapped.rows = sys
            .rows
            .iter()
            .map(|row| {
                let mut coeffs = row.coeffs.clone();
                coeffs.rotate_right(1);
                Row { coeffs, constant: row.constant.clone(), strict: row.strict }
            })
            .collect();
        let stages = match swapped.stages() {
            None => return Infimum::Infeasible,
            Some(s) => s,
        };
        let t_sys = &stages[1];
        let mut best: Option<(Rat, bool)> = None;
        for row in &t_sys.rows {
            let c0 = &row.coeffs[0];
            if c0.is_positive() {
                let bound = -Rat::from_integer(row.constant.clone())
                    / Rat::from_integer(c0.clone());
                match &mut best {
                    None => best = Some((bound, row.strict)),
                    Some((b, s)) => {
                        if bound > *b {
                            *b = bound;
                            *s = row.strict;
                        } else if bound == *b {
                            *s = *s || row.strict;
                        }
                    }
                }
            }
        }
        match best {
            None => Infimum::Unbounded,
            Some((inf, strict)) => Infimum::Value { inf, attained: !strict },
        }
    }

    /// Whether every solution satisfies `constant + coeffs·x ≥ 0` (`> 0`
    /// when `strict`). Vacuously true on infeasible systems.
    pub fn implies(&self, coeffs: &[Rat], constant: &Rat, strict: bool) -> bool {
        let mut sys = self.clone();
        // Negation: ¬(e ≥ 0) is −e > 0, ¬(e > 0) is −e ≥ 0.
        let neg: Vec<Rat> = coeffs.iter().map(|c| -c.clone()).collect();
        sys.add(&neg, &(-constant.clone()), !strict);
        !sys.feasible()
    }

    /// Whether `constant + coeffs·x = 0` on the whole solution set.
    pub fn implies_eq(&self, coeffs: &[Rat], constant: &Rat) -> bool {
        self.implies(coeffs, constant, false) && {
            let neg: Vec<Rat> = coeffs.iter().map(|c| -c.clone()).collect();
            self.implies(&neg, &(-constant.clone()), false)
        }
    }

    /// Project onto the first `keep` variables by eliminating the rest.
    /// `None` when the system is infeasible.
    pub fn project(&self, keep: usize) -> Option<System> {
        assert!(keep <= self.nvars);
        let mut cur = self.clone();
        if !cur.prune() {
            return None;
        }
        while cur.nvars > keep {
            cur = cur.eliminate_last()?;
        }
        Some(cur)
    }

    /// Rows as rational `(coeffs, constant, strict)` triples.
    pub fn rows_rational(&self) -> Vec<(Vec<Rat>, Rat, bool)> {
        self.rows
            .iter()
            .map(|row| {
                (
                    row.coeffs.iter().map(|c| Rat::from_integer(c.clone())).collect(),
                    Rat::from_integer(row.constant.clone()),
                    row.strict,
                )
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int};

    fn r(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn square_feasibility() {
        // 0 ≤ x ≤ 1, 0 ≤ y ≤ 1
        let mut sys = System::new(2);
        sys.add(&r(&[1, 0]), &rat_int(0), false);
        sys.add(&r(&[-1, 0]), &rat_int(1), false);
        sys.add(&r(&[0, 1]), &rat_int(0), false);
        sys.add(&r(&[0, -1]), &rat_int(1), false);
        assert!(sys.feasible());
        let p = sys.feasible_point().unwrap();
        assert!(p[0] >= rat_int(0) && p[0] <= rat_int(1));
        assert_eq!(sys.infimum(&r(&[1, 1])), Infimum::Value { inf: rat_int(0), attained: true });
        assert_eq!(
            sys.infimum(&r(&[-1, -1])),
            Infimum::Value { inf: rat_int(-2), attained: true }
        );
    }

    #[test]
    fn strict_inequalities() {
        // x > 0, x < 1
        let mut sys = System::new(1);
        sys.add(&r(&[1]), &rat_int(0), true);
        sys.add(&r(&[-1]), &rat_int(1), true);
        assert!(sys.feasible());
        let p = sys.feasible_point().unwrap();
        assert!(p[0] > rat_int(0) && p[0] < rat_int(1));
        assert_eq!(sys.infimum(&r(&[1])), Infimum::Value { inf: rat_int(0), attained: false });
        // x > 0, x < 0 is empty
        let mut empty = System::new(1);
        empty.add(&r(&[1]), &rat_int(0), true);
        empty.add(&r(&[-1]), &rat_int(0), true);
        assert!(!empty.feasible());
    }

    #[test]
    fn unbounded_ray() {
        let mut sys = System::new(2);
        sys.add(&r(&[1, 0]), &rat_int(0), false);
        sys.add(&r(&[0, 1]), &rat_int(0), false);
        assert_eq!(sys.infimum(&r(&[-1, 0])), Infimum::Unbounded);
        assert_eq!(sys.infimum(&r(&[1, 1])), Infimum::Value { inf: rat_int(0), attained: true });
    }

    #[test]
    fn implication_and_redundancy() {
        // x ≥ 0 implies x > −1
        let mut sys = System::new(1);
        sys.add(&r(&[1]), &rat_int(0), false);
        assert!(sys.implies(&r(&[1]), &rat_int(1), true));
        assert!(!sys.implies(&r(&[1]), &rat_int(0), true));
        // On the segment {x = 1/2} the expression 2x − 1 vanishes.
        let mut seg = System::new(1);
        seg.add_eq(&r(&[2]), &rat_int(-1));
        assert!(seg.implies_eq(&r(&[2]), &rat_int(-1)));
        assert_eq!(seg.feasible_point().unwrap()[0], rat(1, 2));
    }

    #[test]
    fn equality_slice() {
        // x + y = 1 inside the unit square; minimize x.
        let mut sys = System::new(2);
        sys.add(&r(&[1, 0]), &rat_int(0), false);
        sys.add(&r(&[-1, 0]), &rat_int(1), false);
        sys.add(&r(&[0, 1]), &rat_int(0), false);
        sys.add(&r(&[0, -1]), &rat_int(1), false);
        sys.add_eq(&r(&[1, 1]), &rat_int(-1));
        assert_eq!(sys.infimum(&r(&[1, 0])), Infimum::Value { inf: rat_int(0), attained: true });
        let p = sys.feasible_point().unwrap();
        assert_eq!(p[0].clone() + &p[1], rat_int(1));
    }
}
