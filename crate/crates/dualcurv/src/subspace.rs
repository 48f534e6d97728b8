//! Proper linear subspaces of the ambient space.
//!
//! A [`Subspace`] stores an orthonormal basis (as rows) of a k-dimensional
//! subspace of R^n with 1 <= k <= n-1, built by modified Gram–Schmidt from
//! whatever spanning set the caller provides. It converts between ambient
//! and subspace coordinates and can extend itself to an orthonormal basis
//! of the complement.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const RANK_TOL: f64 = 1e-10;
/// Orthonormality defect tolerated in a finished basis.
const ORTHO_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Subspace {
    /// k x n matrix with orthonormal rows.
    basis: DMatrix<f64>,
}

/// Modified Gram–Schmidt; returns the orthonormalized rows that survived.
fn gram_schmidt(rows: &[DVector<f64>], ambient: usize) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for r in rows {
        let mut v = r.clone();
        for b in &basis {
            let c = b.dot(&v);
            v -= b * c;
        }
        // Second pass for numerical hygiene on nearly dependent input.
        for b in &basis {
            let c = b.dot(&v);
            v -= b * c;
        }
        let len = v.norm();
        if len > RANK_TOL {
            basis.push(v / len);
        }
        if basis.len() == ambient {
            break;
        }
    }
    basis
}

impl Subspace {
    /// Span of the given rows. Fails when the span is trivial, not proper
    /// (k = n), or the rows are rank-deficient relative to their count.
    pub fn from_rows(rows: &[DVector<f64>], ambient: usize) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::config("subspace needs at least one spanning vector"));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != ambient {
                return Err(Error::config(format!(
                    "spanning vector {i} has length {} in ambient dimension {ambient}",
                    r.len()
                )));
            }
        }
        let basis = gram_schmidt(rows, ambient);
        if basis.len() != rows.len() {
            return Err(Error::config(format!(
                "spanning vectors are linearly dependent: rank {} from {} rows",
                basis.len(),
                rows.len()
            )));
        }
        let k = basis.len();
        if k >= ambient {
            return Err(Error::config(format!(
                "subspace must be proper: dimension {k} in ambient {ambient}"
            )));
        }
        let mut m = DMatrix::zeros(k, ambient);
        for (i, b) in basis.iter().enumerate() {
            m.set_row(i, &b.transpose());
        }
        let s = Subspace { basis: m };
        debug_assert!(s.orthonormality_defect() <= ORTHO_TOL);
        Ok(s)
    }

    /// Coordinate subspace spanned by the listed axes (0-based).
    pub fn from_axes(axes: &[usize], ambient: usize) -> Result<Self> {
        let mut seen = vec![false; ambient];
        let mut rows = Vec::with_capacity(axes.len());
        for &i in axes {
            if i >= ambient {
                return Err(Error::config(format!(
                    "axis {i} out of range for ambient dimension {ambient}"
                )));
            }
            if seen[i] {
                return Err(Error::config(format!("axis {i} listed twice")));
            }
            seen[i] = true;
            let mut e = DVector::zeros(ambient);
            e[i] = 1.0;
            rows.push(e);
        }
        Subspace::from_rows(&rows, ambient)
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn ambient(&self) -> usize {
        self.basis.ncols()
    }

    /// The orthonormal basis, one row per basis vector.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<DVector<f64>> {
        (0..self.dim()).map(|i| self.basis.row(i).transpose()).collect()
    }

    /// Max deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = &self.basis * self.basis.transpose();
        let mut worst = 0.0f64;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// Subspace coordinates of an ambient vector (orthogonal projection).
    pub fn to_coords(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.basis * x
    }

    /// Ambient vector with the given subspace coordinates.
    pub fn embed(&self, c: &DVector<f64>) -> DVector<f64> {
        self.basis.transpose() * c
    }

    /// Orthogonal projection onto the subspace, in ambient coordinates.
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        self.embed(&self.to_coords(x))
    }

    /// Distance from `x` to the subspace.
    pub fn distance(&self, x: &DVector<f64>) -> f64 {
        (x - self.project(x)).norm()
    }

    /// Orthonormal basis of the orthogonal complement, derived by extending
    /// this basis with coordinate vectors in index order (deterministic).
    pub fn complement(&self) -> Subspace {
        let n = self.ambient();
        let mut rows = self.basis_rows();
        let mut comp: Vec<DVector<f64>> = Vec::with_capacity(n - self.dim());
        for i in 0..n {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            let mut v = e;
            for b in rows.iter().chain(comp.iter()) {
                let c = b.dot(&v);
                v -= b * c;
            }
            for b in rows.iter().chain(comp.iter()) {
                let c = b.dot(&v);
                v -= b * c;
            }
            let len = v.norm();
            if len > RANK_TOL {
                comp.push(v / len);
            }
            if self.dim() + comp.len() == n {
                break;
            }
        }
        rows.clear();
        let mut m = DMatrix::zeros(comp.len(), n);
        for (i, b) in comp.iter().enumerate() {
            m.set_row(i, &b.transpose());
        }
        Subspace { basis: m }
    }

    /// If every basis row is (plus or minus) a coordinate vector, the axis
    /// indices in row order.
    pub fn coordinate_axes(&self) -> Option<Vec<usize>> {
        let mut axes = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let row = self.basis.row(i);
            let mut axis = None;
            for j in 0..self.ambient() {
                let v = row[j].abs();
                if v > 1.0 - 1e-12 {
                    axis = Some(j);
                } else if v > 1e-12 {
                    return None;
                }
            }
            axes.push(axis?);
        }
        Some(axes)
    }
}

/// Parse a comma-separated axis list like "0,2" into a coordinate subspace.
pub fn parse_axis_list(text: &str, ambient: usize) -> Result<Subspace> {
    let mut axes = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let idx: usize = part
            .parse()
            .map_err(|_| Error::config(format!("bad axis index {part:?} in {text:?}")))?;
        axes.push(idx);
    }
    if axes.is_empty() {
        return Err(Error::config(format!("no axes in subspace spec {text:?}")));
    }
    Subspace::from_axes(&axes, ambient)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn coordinate_subspace_round_trips() {
        let l = Subspace::from_axes(&[0, 2], 3).unwrap();
        assert_eq!(l.dim(), 2);
        let x = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let c = l.to_coords(&x);
        assert_relative_eq!(c[0], 1.0);
        assert_relative_eq!(c[1], 3.0);
        let p = l.project(&x);
        assert_relative_eq!(p[1], 0.0);
        assert_relative_eq!(l.distance(&x), 2.0, epsilon = 1e-14);
        assert_eq!(l.coordinate_axes(), Some(vec![0, 2]));
    }

    #[test]
    fn skew_subspace_is_orthonormalized() {
        let rows = vec![
            DVector::from_vec(vec![1.0, 1.0, 0.0]),
            DVector::from_vec(vec![1.0, 0.0, 1.0]),
        ];
        let l = Subspace::from_rows(&rows, 3).unwrap();
        assert!(l.orthonormality_defect() <= 1e-12);
        assert_eq!(l.coordinate_axes(), None);
        // Complement is 1-dimensional and orthogonal to both rows.
        let c = l.complement();
        assert_eq!(c.dim(), 1);
        for r in rows {
            assert!(c.basis_rows()[0].dot(&r).abs() <= 1e-12);
        }
    }

    #[test]
    fn complement_of_an_axis_plane() {
        let l = Subspace::from_axes(&[1], 4).unwrap();
        let c = l.complement();
        assert_eq!(c.dim(), 3);
        // Deterministic order: e0, e2, e3.
        assert_eq!(c.coordinate_axes(), Some(vec![0, 2, 3]));
    }

    #[test]
    fn rejects_improper_or_dependent_spans() {
        // Full space is not a proper subspace.
        let full: Vec<DVector<f64>> = (0..2)
            .map(|i| {
                let mut e = DVector::zeros(2);
                e[i] = 1.0;
                e
            })
            .collect();
        assert!(Subspace::from_rows(&full, 2).is_err());
        // Dependent rows.
        let dep = vec![
            DVector::from_vec(vec![1.0, 0.0, 0.0]),
            DVector::from_vec(vec![2.0, 0.0, 0.0]),
        ];
        assert!(Subspace::from_rows(&dep, 3).is_err());
        // Axis parsing errors.
        assert!(parse_axis_list("0,9", 3).is_err());
        assert!(parse_axis_list("0,0", 3).is_err());
        assert!(parse_axis_list("a", 3).is_err());
        assert!(parse_axis_list("0,1,2", 3).is_err());
    }
}
