//! Integer-lattice linear algebra: Smith normal form, lattice indices,
//! saturation, kernels, and the small exact rational solvers the polyhedral
//! code leans on.

use crate::arith::Rat;
use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("matrix does not have full column rank (rank {rank} < {cols})")]
    RankDeficient { rank: usize, cols: usize },
}

/// Dense integer matrix with exact entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>, // row major
}

/// Smith normal form `u * m * v = d` with `u`, `v` unimodular and the
/// diagonal of `d` a divisibility chain.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> IntMatrix {
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        IntMatrix {
            rows: rows.len(),
            cols: ncols,
            entries: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn from_bigint_rows(rows: Vec<Vec<BigInt>>) -> IntMatrix {
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        IntMatrix { rows: rows.len(), cols: ncols, entries: rows.into_iter().flatten().collect() }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = BigInt::zero();
                for k in 0..self.cols {
                    acc += &self[(i, k)] * &other[(k, j)];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    /// Determinant of a square matrix (Bareiss fraction-free elimination).
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> =
            (0..n).map(|i| (0..n).map(|j| self[(i, j)].clone()).collect()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<Rat>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| Rat::from_integer(self[(i, j)].clone())).collect())
            .collect();
        rat_rank_in_place(&mut a)
    }

    /// Smith normal form. `u * self * v = d`.
    pub fn smith_normal_form(&self) -> Snf {
        let mut d = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut v = IntMatrix::identity(self.cols);
        let steps = self.rows.min(self.cols);

        for t in 0..steps {
            // Find a smallest-magnitude nonzero pivot in the trailing block.
            let pivot = (t..d.rows)
                .cartesian_product(t..d.cols)
                .filter(|&(i, j)| !d[(i, j)].is_zero())
                .min_by_key(|&(i, j)| d[(i, j)].abs());
            let (pi, pj) = match pivot {
                Some(p) => p,
                None => break,
            };
            d.swap_rows(t, pi, &mut u);
            d.swap_cols(t, pj, &mut v);

            loop {
                // Clear column t below the pivot.
                let mut clean = true;
                for i in t + 1..d.rows {
                    if !d[(i, t)].is_zero() {
                        let q = d[(i, t)].div_floor(&d[(t, t)]);
                        d.row_sub(i, t, &q, &mut u);
                        if !d[(i, t)].is_zero() {
                            d.swap_rows(t, i, &mut u);
                            clean = false;
                        }
                    }
                }
                // Clear row t right of the pivot.
                for j in t + 1..d.cols {
                    if !d[(t, j)].is_zero() {
                        let q = d[(t, j)].div_floor(&d[(t, t)]);
                        d.col_sub(j, t, &q, &mut v);
                        if !d[(t, j)].is_zero() {
                            d.swap_cols(t, j, &mut v);
                            clean = false;
                        }
                    }
                }
                if !clean {
                    continue;
                }
                // Enforce divisibility of the trailing block by the pivot.
                let offender = (t + 1..d.rows)
                    .cartesian_product(t + 1..d.cols)
                    .find(|&(i, j)| !(&d[(i, j)] % &d[(t, t)]).is_zero());
                match offender {
                    None => break,
                    Some((i, _)) => {
                        let one = BigInt::from(-1);
                        d.row_sub(t, i, &one, &mut u); // row_t += row_i
                    }
                }
            }
            if d[(t, t)].is_negative() {
                d.negate_row(t, &mut u);
            }
        }
        Snf { u, d, v }
    }

    /// Diagonal entries of the Smith form, zeros dropped.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let snf = self.smith_normal_form();
        (0..self.rows.min(self.cols))
            .map(|i| snf.d[(i, i)].clone())
            .filter(|x| !x.is_zero())
            .collect()
    }

    /// Index of the column lattice inside its saturation: the gcd of all
    /// maximal minors. Requires full column rank.
    pub fn lattice_index(&self) -> Result<BigInt, LatticeError> {
        let n = self.cols;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let rank = self.rank();
        if rank < n {
            return Err(LatticeError::RankDeficient { rank, cols: n });
        }
        let mut g = BigInt::zero();
        for rows in (0..self.rows).combinations(n) {
            let mut sub = IntMatrix::zero(n, n);
            for (a, &i) in rows.iter().enumerate() {
                for j in 0..n {
                    sub[(a, j)] = self[(i, j)].clone();
                }
            }
            g = g.gcd(&sub.determinant());
            if g.is_one() {
                break;
            }
        }
        Ok(g)
    }

    /// Whether the column lattice is saturated: equal to the intersection of
    /// its real span with the ambient integer lattice. Equivalently, all
    /// Smith invariant factors are 1.
    pub fn is_saturated(&self) -> bool {
        self.invariant_factors().iter().all(|d| d.is_one())
    }

    /// A basis of the integer kernel `{x : self · x = 0}`, read off from the
    /// Smith form. The basis spans a saturated sublattice.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        let snf = self.smith_normal_form();
        let rank = (0..self.rows.min(self.cols))
            .filter(|&i| !snf.d[(i, i)].is_zero())
            .count();
        (rank..self.cols).map(|j| snf.v.column(j)).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize, u: &mut IntMatrix) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
        for j in 0..u.cols {
            u.entries.swap(a * u.cols + j, b * u.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize, v: &mut IntMatrix) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
        for i in 0..v.rows {
            v.entries.swap(i * v.cols + a, i * v.cols + b);
        }
    }

    /// `row_a -= q * row_b`, mirrored in `u`.
    fn row_sub(&mut self, a: usize, b: usize, q: &BigInt, u: &mut IntMatrix) {
        for j in 0..self.cols {
            let x = q * &self[(b, j)];
            self[(a, j)] -= x;
        }
        for j in 0..u.cols {
            let x = q * &u[(b, j)];
            u[(a, j)] -= x;
        }
    }

    /// `col_a -= q * col_b`, mirrored in `v`.
    fn col_sub(&mut self, a: usize, b: usize, q: &BigInt, v: &mut IntMatrix) {
        for i in 0..self.rows {
            let x = q * &self[(i, b)];
            self[(i, a)] -= x;
        }
        for i in 0..v.rows {
            let x = q * &v[(i, b)];
            v[(i, a)] -= x;
        }
    }

    fn negate_row(&mut self, a: usize, u: &mut IntMatrix) {
        for j in 0..self.cols {
            let x = -self[(a, j)].clone();
            self[(a, j)] = x;
        }
        for j in 0..u.cols {
            let x = -u[(a, j)].clone();
            u[(a, j)] = x;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

/// gcd-reduced copy of an integer vector, sign preserved. Zero stays zero.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x.abs()));
    if g <= 1 {
        return v.to_vec();
    }
    v.iter().map(|&x| x / g).collect()
}

/// Rank of a rational matrix; consumes the buffer.
pub(crate) fn rat_rank_in_place(a: &mut [Vec<Rat>]) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut rank = 0;
    for col in 0..cols {
        let pivot = (rank..rows).find(|&i| !a[i][col].is_zero());
        let pivot = match pivot {
            Some(p) => p,
            None => continue,
        };
        a.swap(rank, pivot);
        let inv = a[rank][col].clone();
        for i in 0..rows {
            if i != rank && !a[i][col].is_zero() {
                let factor = a[i][col].clone() / &inv;
                for j in col..cols {
                    let x = a[rank][j].clone() * &factor;
                    a[i][j] -= x;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Solve a square rational system exactly; `None` when singular.
pub(crate) fn rat_solve(matrix: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let n = matrix.len();
    assert!(matrix.iter().all(|r| r.len() == n) && rhs.len() == n);
    let mut a: Vec<Vec<Rat>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].clone();
        for j in col..=n {
            a[col][j] = a[col][j].clone() / &inv;
        }
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let factor = a[i][col].clone();
                for j in col..=n {
                    let x = a[col][j].clone() * &factor;
                    a[i][j] -= x;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(m: &IntMatrix) {
        let snf = m.smith_normal_form();
        assert_eq!(snf.u.mul(m).mul(&snf.v), snf.d, "u m v = d");
        assert_eq!(snf.u.determinant().abs(), BigInt::one(), "u unimodular");
        assert_eq!(snf.v.determinant().abs(), BigInt::one(), "v unimodular");
        // Off-diagonal zeros and divisibility chain.
        for i in 0..snf.d.nrows() {
            for j in 0..snf.d.ncols() {
                if i != j {
                    assert!(snf.d[(i, j)].is_zero());
                }
            }
        }
        let diag: Vec<BigInt> =
            (0..m.nrows().min(m.ncols())).map(|i| snf.d[(i, i)].clone()).collect();
        for w in diag.windows(2) {
            if !w[0].is_zero() && !w[1].is_zero() {
                assert!((&w[1] % &w[0]).is_zero(), "divisibility chain");
            }
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            }
        }
    }

    #[test]
    fn snf_small_cases() {
        check_snf(&IntMatrix::from_rows(&[vec![2]]));
        check_snf(&IntMatrix::identity(3));
        check_snf(&IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]));
        check_snf(&IntMatrix::from_rows(&[vec![0, 0], vec![0, 0]]));
        check_snf(&IntMatrix::from_rows(&[vec![1, 2, 3], vec![4, 5, 6]]));
        check_snf(&IntMatrix::from_rows(&[vec![6, 10], vec![15, 4], vec![3, -9]]));
    }

    #[test]
    fn snf_invariant_factors() {
        let m = IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(m.invariant_factors(), vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(IntMatrix::identity(4).invariant_factors(), vec![BigInt::one(); 4]);
    }

    #[test]
    fn lattice_index_examples() {
        // The doubling map on a one-dimensional lattice has index 2.
        let m = IntMatrix::from_rows(&[vec![2]]);
        assert_eq!(m.lattice_index().unwrap(), BigInt::from(2));
        assert_eq!(IntMatrix::identity(3).lattice_index().unwrap(), BigInt::one());
        let m = IntMatrix::from_rows(&[vec![1, 0], vec![0, 2], vec![1, 1]]);
        assert_eq!(m.lattice_index().unwrap(), BigInt::one());
        let deficient = IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(
            deficient.lattice_index(),
            Err(LatticeError::RankDeficient { rank: 1, cols: 2 })
        );
    }

    #[test]
    fn index_equals_product_of_invariant_factors() {
        let cases = [
            vec![vec![2, 0], vec![0, 3]],
            vec![vec![1, 1], vec![1, -1]],
            vec![vec![4, 2], vec![2, 4]],
            vec![vec![5]],
        ];
        for rows in cases {
            let m = IntMatrix::from_rows(&rows);
            let product: BigInt = m.invariant_factors().into_iter().product();
            assert_eq!(m.lattice_index().unwrap(), product);
        }
    }

    #[test]
    fn saturation() {
        assert!(IntMatrix::from_rows(&[vec![1, 0], vec![0, 1]]).is_saturated());
        assert!(!IntMatrix::from_rows(&[vec![2]]).is_saturated());
        assert!(!IntMatrix::from_rows(&[vec![1, 1], vec![1, -1]]).is_saturated());
        // A rank-one sublattice generated by a primitive vector is saturated.
        assert!(IntMatrix::from_rows(&[vec![2], vec![3]]).is_saturated());
    }

    #[test]
    fn kernel() {
        let m = IntMatrix::from_rows(&[vec![1, 1, 1], vec![0, 1, 2]]);
        let basis = m.kernel_basis();
        assert_eq!(basis.len(), 1);
        let k = &basis[0];
        // In the kernel and primitive.
        assert!((&k[0] + &k[1] + &k[2]).is_zero());
        assert!((&k[1] + BigInt::from(2) * &k[2]).is_zero());
        let g = k[0].gcd(&k[1]).gcd(&k[2]);
        assert!(g.is_one());
    }

    #[test]
    fn primitive_vectors() {
        assert_eq!(primitive(&[2, 4, -6]), vec![1, 2, -3]);
        assert_eq!(primitive(&[0, 0]), vec![0, 0]);
        assert_eq!(primitive(&[3, 5]), vec![3, 5]);
    }
}
