//! Polyhedral complexes: collections of cells with a face-incidence
//! relation, either geometric (all cells in one ambient space, inclusions as
//! incidence) or abstract (cells glued along integral affine embeddings, as
//! in dual intersection complexes).

use crate::arith::{rat_int, Rat};
use crate::cone::extreme_rays;
use crate::lattice::IntMatrix;
use crate::polytope::{AffinePolytope, Constraint, Stratum};
use num_traits::Zero;
use std::collections::BTreeMap;

/// An integral affine embedding `x ↦ matrix·x + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineEmbedding {
    /// Rows index the target space, columns the source.
    pub matrix: Vec<Vec<i64>>,
    pub offset: Vec<Rat>,
}

impl AffineEmbedding {
    pub fn identity(dim: usize) -> AffineEmbedding {
        let matrix = (0..dim)
            .map(|i| (0..dim).map(|j| i64::from(i == j)).collect())
            .collect();
        AffineEmbedding { matrix, offset: vec![Rat::zero(); dim] }
    }

    pub fn apply(&self, x: &[Rat]) -> Vec<Rat> {
        self.matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, b)| {
                let mut v = b.clone();
                for (c, xi) in row.iter().zip(x) {
                    v += rat_int(*c) * xi;
                }
                v
            })
            .collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineEmbedding) -> AffineEmbedding {
        let matrix: Vec<Vec<i64>> = self
            .matrix
            .iter()
            .map(|row| {
                (0..inner.matrix.first().map_or(0, Vec::len))
                    .map(|j| row.iter().zip(&inner.matrix).map(|(&a, irow)| a * irow[j]).sum())
                    .collect()
            })
            .collect();
        let offset = self.apply(&inner.offset);
        AffineEmbedding { matrix, offset }
    }
}

/// `sub` maps onto a face of `sup` via `embedding`.
#[derive(Clone, Debug)]
pub struct Incidence {
    pub sub: usize,
    pub sup: usize,
    pub embedding: AffineEmbedding,
}

/// A polyhedral complex.
#[derive(Clone, Debug)]
pub struct PolyhedralComplex {
    cells: Vec<AffinePolytope>,
    incidences: Vec<Incidence>,
}

impl PolyhedralComplex {
    /// Build a geometric complex from cells in a shared ambient space. The
    /// incidence relation is inclusion; coincident cells are merged.
    pub fn geometric(cells: Vec<AffinePolytope>) -> PolyhedralComplex {
        let mut unique: Vec<AffinePolytope> = Vec::new();
        for cell in cells {
            if !unique.iter().any(|c| c.same_set_as(&cell)) {
                unique.push(cell);
            }
        }
        unique.sort_by_key(|c| c.sort_key());
        let mut incidences = Vec::new();
        for i in 0..unique.len() {
            for j in 0..unique.len() {
                if i != j
                    && unique[i].hull_dim() < unique[j].hull_dim()
                    && unique[i].subset_of(&unique[j])
                {
                    let dim = unique[i].dim();
                    incidences.push(Incidence {
                        sub: i,
                        sup: j,
                        embedding: AffineEmbedding::identity(dim),
                    });
                }
            }
        }
        PolyhedralComplex { cells: unique, incidences }
    }

    /// Geometric complex closed under faces: each cell contributes the
    /// closures of all its strata.
    pub fn geometric_closed(cells: Vec<AffinePolytope>) -> PolyhedralComplex {
        let mut all = Vec::new();
        for cell in cells {
            for stratum in cell.strata() {
                all.push(face_closure(&cell, &stratum));
            }
            all.push(cell);
        }
        PolyhedralComplex::geometric(all)
    }

    /// Build an abstract complex from explicit cells and incidences.
    pub fn from_parts(cells: Vec<AffinePolytope>, incidences: Vec<Incidence>) -> PolyhedralComplex {
        PolyhedralComplex { cells, incidences }
    }

    pub fn cells(&self) -> &[AffinePolytope] {
        &self.cells
    }

    pub fn incidences(&self) -> &[Incidence] {
        &self.incidences
    }

    pub fn max_dim(&self) -> usize {
        self.cells.iter().map(|c| c.hull_dim()).max().unwrap_or(0)
    }

    pub fn cells_of_dim(&self, d: usize) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].hull_dim() == d).collect()
    }

    /// For geometric complexes: whether a point lies in some cell.
    pub fn contains_point(&self, x: &[Rat]) -> bool {
        self.cells.iter().any(|c| c.contains(x))
    }

    /// First violation of the complex axioms for geometric complexes:
    /// pairwise intersections must be faces of both cells.
    pub fn check_geometric(&self) -> Option<String> {
        for i in 0..self.cells.len() {
            for j in i + 1..self.cells.len() {
                let inter = match self.cells[i].intersect(&self.cells[j]) {
                    None => continue,
                    Some(q) => q,
                };
                if !self.cells[i].has_face(&inter) {
                    return Some(format!(
                        "intersection of cells {i} and {j} is not a face of cell {i}"
                    ));
                }
                if !self.cells[j].has_face(&inter) {
                    return Some(format!(
                        "intersection of cells {i} and {j} is not a face of cell {j}"
                    ));
                }
            }
        }
        None
    }

    /// Multiset equality of cells (and nothing else), decided exactly.
    pub fn same_cells_as(&self, other: &PolyhedralComplex) -> bool {
        if self.cells.len() != other.cells.len() {
            return false;
        }
        let mut used = vec![false; other.cells.len()];
        for cell in &self.cells {
            let found = other
                .cells
                .iter()
                .enumerate()
                .find(|(k, c)| !used[*k] && c.dim() == cell.dim() && c.same_set_as(cell));
            match found {
                Some((k, _)) => used[k] = true,
                None => return false,
            }
        }
        true
    }
}

/// The closure of a stratum as a standalone polytope.
pub fn face_closure(parent: &AffinePolytope, stratum: &Stratum) -> AffinePolytope {
    let mut constraints: Vec<Constraint> = parent.constraints().to_vec();
    for &i in &stratum.active {
        let c = &parent.constraints()[i];
        constraints.push(Constraint::closed(
            -c.a.clone(),
            c.alpha.iter().map(|&a| -a).collect(),
        ));
    }
    AffinePolytope::new(parent.dim(), constraints).expect("faces of nonempty polytopes are nonempty")
}

/// V-shaped description of a cell for rendering and JSON: vertices, primitive
/// recession rays, primitive lineality directions, and a base point for
/// cells without vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct CellShape {
    pub dim: usize,
    pub vertices: Vec<Vec<Rat>>,
    pub rays: Vec<Vec<i64>>,
    pub lines: Vec<Vec<i64>>,
    pub base: Vec<Rat>,
}

/// Shape of a cell: exact V-description data.
pub fn cell_shape(cell: &AffinePolytope) -> CellShape {
    let vertices = crate::polytope::vertices(cell);
    // Recession directions: homogeneous solutions of the constraints.
    let normals: Vec<Vec<i64>> = cell.constraints().iter().map(|c| c.alpha.clone()).collect();
    let lines: Vec<Vec<i64>> = {
        let m = IntMatrix::from_rows(&normals);
        m.kernel_basis()
            .iter()
            .map(|k| {
                let v: Vec<i64> =
                    k.iter().map(|x| i64::try_from(x).expect("desk-scale direction")).collect();
                crate::lattice::primitive(&v)
            })
            .filter(|v| v.iter().any(|&x| x != 0))
            .collect()
    };
    let rays = if lines.is_empty() {
        extreme_rays(cell.dim(), &normals)
    } else {
        Vec::new()
    };
    CellShape {
        dim: cell.hull_dim(),
        vertices,
        rays,
        lines,
        base: cell.sample_point(),
    }
}

/// Saturated integer basis of the direction space of a cell (the lattice of
/// integral vectors parallel to the cell).
pub fn direction_lattice(cell: &AffinePolytope) -> Vec<Vec<i64>> {
    let implicit = cell.implicit_equalities();
    let rows: Vec<Vec<i64>> =
        implicit.iter().map(|&i| cell.constraints()[i].alpha.clone()).collect();
    let m = if rows.is_empty() {
        IntMatrix::from_rows(&[vec![0; cell.dim()]])
    } else {
        IntMatrix::from_rows(&rows)
    };
    m.kernel_basis()
        .iter()
        .map(|k| k.iter().map(|x| i64::try_from(x).expect("desk-scale lattice")).collect())
        .collect()
}

/// A polyhedral complex with positive integer weights on chosen cells
/// (typically the top-dimensional ones).
#[derive(Clone, Debug)]
pub struct WeightedComplex {
    pub complex: PolyhedralComplex,
    /// Cell index → weight.
    pub weights: BTreeMap<usize, u64>,
}

impl WeightedComplex {
    pub fn top_cells(&self) -> Vec<usize> {
        self.weights.keys().copied().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.complex.cells().is_empty()
    }

    /// Equality up to cell ordering: cells match as sets with equal weights.
    pub fn equivalent_to(&self, other: &WeightedComplex) -> bool {
        if self.complex.cells().len() != other.complex.cells().len()
            || self.weights.len() != other.weights.len()
        {
            return false;
        }
        let mut used = vec![false; other.complex.cells().len()];
        for (i, cell) in self.complex.cells().iter().enumerate() {
            let w = self.weights.get(&i);
            let found = other.complex.cells().iter().enumerate().find(|(k, c)| {
                !used[*k]
                    && other.weights.get(k) == w
                    && c.dim() == cell.dim()
                    && c.same_set_as(cell)
            });
            match found {
                Some((k, _)) => used[k] = true,
                None => return false,
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_int;

    #[test]
    fn geometric_complex_from_fan_cells() {
        let quad = AffinePolytope::from_closed(2, &[(0, vec![1, 0]), (0, vec![0, 1])]).unwrap();
        let complex = PolyhedralComplex::geometric_closed(vec![quad]);
        // Quadrant, two rays, origin.
        assert_eq!(complex.cells().len(), 4);
        assert_eq!(complex.cells_of_dim(2).len(), 1);
        assert_eq!(complex.cells_of_dim(1).len(), 2);
        assert_eq!(complex.cells_of_dim(0).len(), 1);
        assert!(complex.check_geometric().is_none());
        // The origin is incident to everything above it.
        let origin = complex.cells_of_dim(0)[0];
        let sups: Vec<usize> = complex
            .incidences()
            .iter()
            .filter(|inc| inc.sub == origin)
            .map(|inc| inc.sup)
            .collect();
        assert_eq!(sups.len(), 3);
    }

    #[test]
    fn shape_of_a_ray() {
        let ray = AffinePolytope::from_closed(2, &[(0, vec![1, 0]), (0, vec![0, 1]), (0, vec![0, -1])])
            .unwrap();
        let shape = cell_shape(&ray);
        assert_eq!(shape.dim, 1);
        assert_eq!(shape.vertices, vec![vec![rat_int(0), rat_int(0)]]);
        assert_eq!(shape.rays, vec![vec![1, 0]]);
        assert!(shape.lines.is_empty());
    }

    #[test]
    fn shape_of_a_line() {
        let line = AffinePolytope::from_closed(2, &[(0, vec![1, 0]), (0, vec![-1, 0])]).unwrap();
        let shape = cell_shape(&line);
        assert_eq!(shape.dim, 1);
        assert!(shape.vertices.is_empty());
        assert_eq!(shape.lines, vec![vec![0, 1]]);
    }

    #[test]
    fn direction_lattice_of_diagonal() {
        let diag = AffinePolytope::from_closed(
            2,
            &[(0, vec![1, -1]), (0, vec![-1, 1]), (0, vec![1, 0])],
        )
        .unwrap();
        let basis = direction_lattice(&diag);
        assert_eq!(basis.len(), 1);
        let d = &basis[0];
        assert_eq!(d[0], d[1]);
        assert_eq!(d[0].abs(), 1);
    }

    #[test]
    fn embedding_composition() {
        let inc = AffineEmbedding {
            matrix: vec![vec![1], vec![0]],
            offset: vec![rat_int(0), rat_int(0)],
        };
        let shift = AffineEmbedding {
            matrix: vec![vec![1, 0], vec![0, 1]],
            offset: vec![rat_int(1), rat_int(2)],
        };
        let both = shift.compose(&inc);
        assert_eq!(both.apply(&[rat_int(3)]), vec![rat_int(4), rat_int(2)]);
    }
}
