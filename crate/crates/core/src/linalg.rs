//! Dense complex linear algebra on top of nalgebra.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub use num_complex::Complex64 as C64;

pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> Mat {
    Mat::identity(n, n)
}

/// `I_{left} ⊗ op ⊗ I_{right}`.
pub fn sandwich(left: usize, op: &Mat, right: usize) -> Mat {
    let mut m = op.clone();
    if left > 1 {
        m = identity(left).kronecker(&m);
    }
    if right > 1 {
        m = m.kronecker(&identity(right));
    }
    m
}

pub fn frobenius(m: &Mat) -> f64 {
    m.norm()
}

/// Largest singular value.
pub fn operator_norm(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

/// `‖M² − M‖` and `‖M − M*‖` in Frobenius norm.
pub fn projection_defect(m: &Mat) -> (f64, f64) {
    let idem = (m * m - m).norm();
    let herm = (m - m.adjoint()).norm();
    (idem, herm)
}

/// Outcome of snapping a nearly-projection to an exact one.
#[derive(Debug, Clone)]
pub struct Rounded {
    pub matrix: Mat,
    pub eigenvalues: Vec<f64>,
    /// Frobenius distance between the input's hermitian part and the output;
    /// zero when no rounding was needed.
    pub rounding: f64,
    /// Largest distance of an eigenvalue from `{0, 1}` before snapping.
    pub max_eigen_offset: f64,
}

/// Hermitian part plus spectral rounding to `{0, 1}`; rounding only happens
/// when `‖M² − M‖ > 1e−12`. Eigenvalues farther than `snap` from `{0, 1}`
/// are left unchanged and show up in `max_eigen_offset`.
pub fn round_projection(m: &Mat, snap: f64) -> Rounded {
    let h = (m + m.adjoint()) * c(0.5);
    let eig = SymmetricEigen::new(h.clone());
    let eigenvalues: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    let max_eigen_offset = eigenvalues.iter().map(|&e| e.abs().min((e - 1.0).abs())).fold(0.0, f64::max);
    if (&h * &h - &h).norm() <= 1e-12 {
        return Rounded { matrix: h, eigenvalues, rounding: 0.0, max_eigen_offset };
    }
    let snapped: Vec<f64> = eigenvalues
        .iter()
        .map(|&e| {
            if e.abs() < snap {
                0.0
            } else if (e - 1.0).abs() < snap {
                1.0
            } else {
                e
            }
        })
        .collect();
    let u = &eig.eigenvectors;
    let d = Mat::from_diagonal(&Vector::from_iterator(snapped.len(), snapped.iter().map(|&e| c(e))));
    let out = u * d * u.adjoint();
    let rounding = (&out - &h).norm();
    Rounded { matrix: out, eigenvalues, rounding, max_eigen_offset }
}

/// Rank at an absolute eigenvalue threshold, and the ratio between the
/// smallest retained and largest discarded eigenvalue (`∞` if none is
/// discarded or the discarded ones are exactly zero).
pub fn rank_and_gap(eigenvalues: &[f64], threshold: f64) -> (usize, f64) {
    let above: Vec<f64> = eigenvalues.iter().cloned().filter(|e| e.abs() > threshold).collect();
    let below = eigenvalues.iter().map(|e| e.abs()).filter(|e| *e <= threshold).fold(0.0, f64::max);
    let smallest = above.iter().map(|e| e.abs()).fold(f64::INFINITY, f64::min);
    let gap = if below == 0.0 { f64::INFINITY } else { smallest / below };
    (above.len(), gap)
}

/// Incremental Gram–Schmidt with one reorthogonalisation pass.
#[derive(Debug, Clone)]
pub struct GramSchmidt {
    basis: Vec<Vector>,
    threshold: f64,
    /// Largest input norm seen, for relative thresholds.
    scale: f64,
    relative: bool,
}

impl GramSchmidt {
    /// Keeps a vector when its residual norm exceeds `threshold`.
    pub fn absolute(threshold: f64) -> Self {
        GramSchmidt { basis: Vec::new(), threshold, scale: 1.0, relative: false }
    }

    /// Keeps a vector when its residual norm exceeds `threshold` times the
    /// largest norm offered so far.
    pub fn relative(threshold: f64) -> Self {
        GramSchmidt { basis: Vec::new(), threshold, scale: 0.0, relative: true }
    }

    /// Orthogonalises `v` against the basis and keeps it if independent.
    pub fn offer(&mut self, mut v: Vector) -> bool {
        let n0 = v.norm();
        if self.relative {
            self.scale = self.scale.max(n0);
        }
        if n0 == 0.0 {
            return false;
        }
        for _ in 0..2 {
            for b in &self.basis {
                let proj = b.dotc(&v);
                v.axpy(-proj, b, c(1.0));
            }
        }
        let r = v.norm();
        if r > self.threshold * self.scale {
            v /= c(r);
            self.basis.push(v);
            true
        } else {
            false
        }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// The basis as the columns of a matrix with `rows` rows.
    pub fn to_matrix(&self, rows: usize) -> Mat {
        let mut m = Mat::zeros(rows, self.basis.len());
        for (j, b) in self.basis.iter().enumerate() {
            m.set_column(j, b);
        }
        m
    }
}

/// Flattens a matrix into a column vector (column-major).
pub fn vectorize(m: &Mat) -> Vector {
    Vector::from_column_slice(m.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sandwich_dims() {
        let op = Mat::from_element(2, 2, c(1.0));
        let m = sandwich(3, &op, 4);
        assert_eq!(m.shape(), (24, 24));
        assert_eq!(sandwich(1, &op, 1), op);
    }

    #[test]
    fn rounding_snaps() {
        let mut p = Mat::zeros(3, 3);
        p[(0, 0)] = c(1.0 + 1e-9);
        p[(1, 1)] = c(1e-9);
        let r = round_projection(&p, 1e-6);
        assert!(r.rounding > 0.0 && r.rounding < 1e-8);
        let (idem, herm) = projection_defect(&r.matrix);
        assert!(idem < 1e-14 && herm < 1e-14);
        let (rank, gap) = rank_and_gap(&r.eigenvalues, 1e-8);
        assert_eq!(rank, 1);
        assert!(gap > 1e3);
    }

    #[test]
    fn gram_schmidt_rank() {
        let mut gs = GramSchmidt::relative(1e-8);
        let e = |v: [f64; 3]| Vector::from_iterator(3, v.iter().map(|&x| c(x)));
        assert!(gs.offer(e([1.0, 1.0, 0.0])));
        assert!(gs.offer(e([1.0, 0.0, 0.0])));
        assert!(!gs.offer(e([0.0, 3.0, 0.0])));
        assert_eq!(gs.len(), 2);
        let m = gs.to_matrix(3);
        assert!((m.adjoint() * &m - identity(2)).norm() < 1e-14);
    }

    #[test]
    fn operator_norm_of_projection() {
        let p = Mat::from_diagonal(&Vector::from_vec(alloc::vec![c(1.0), c(0.0)]));
        assert!((operator_norm(&p) - 1.0).abs() < 1e-14);
    }
}
