//! Small dense complex matrix helpers: just enough for Uhlmann fidelity on
//! ≤ 9×9 density matrices and for exponentiating truncated mode-pair
//! generators in the dense oracle. Row-major storage.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;

use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Mat {
    pub dim: usize,
    pub data: Vec<C64>,
}

impl Mat {
    pub fn zeros(dim: usize) -> Self {
        Mat { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Mat::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Mat::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Mat) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn scaled(&self, f: C64) -> Self {
        Mat { dim: self.dim, data: self.data.iter().map(|v| v * f).collect() }
    }

    pub fn add(&self, rhs: &Mat) -> Self {
        assert_eq!(self.dim, rhs.dim);
        Mat {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    fn off_diag_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }
}

impl core::ops::Index<(usize, usize)> for Mat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Returns (eigenvalues, V) with A = V diag(λ) V†; columns of V
/// are the eigenvectors. Panics if the input is visibly non-Hermitian.
pub(crate) fn hermitian_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    assert!(
        a.hermiticity_defect() <= 1e-9 * (1.0 + a.max_abs()),
        "hermitian_eigen: input not Hermitian"
    );
    let n = a.dim;
    let mut m = a.clone();
    // Symmetrize away representation noise.
    for i in 0..n {
        for j in 0..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = avg;
        }
    }
    let mut v = Mat::identity(n);
    let scale = m.max_abs().max(1.0);
    for _sweep in 0..100 {
        if m.off_diag_norm() <= 1e-14 * scale * n as f64 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let z = m[(p, q)];
                let r = z.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phi = z.arg();
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // Rotation angle zeroing the (p,q) element: tan 2θ = 2r/(app−aqq).
                let t = if (app - aqq).abs() <= 1e-300 {
                    1.0
                } else {
                    let tau = (app - aqq) / (2.0 * r);
                    let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
                    sign / (tau.abs() + (tau * tau + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let u_pq = C64::from_polar(-s, phi);
                let u_qp = C64::from_polar(s, -phi);
                // m ← U† m U with U embedding [[c, u_pq],[u_qp, c]] at (p,q).
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * c + mkq * u_qp;
                    m[(k, q)] = mkp * u_pq + mkq * c;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = mpk * c + mqk * u_qp.conj();
                    m[(q, k)] = mpk * u_pq.conj() + mqk * c;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * c;
                }
            }
        }
    }
    let eig = (0..n).map(|i| m[(i, i)].re).collect();
    (eig, v)
}

/// Rebuilds V f(diag) V† for a scalar function of the eigenvalues.
pub(crate) fn hermitian_apply(eigs: &[f64], v: &Mat, f: impl Fn(f64) -> f64) -> Mat {
    let n = v.dim;
    let mut scaled = v.clone();
    for j in 0..n {
        let fj = C64::new(f(eigs[j]), 0.0);
        for i in 0..n {
            scaled[(i, j)] *= fj;
        }
    }
    scaled.matmul(&v.adjoint())
}

/// Matrix exponential by scaling-and-squaring with a Taylor series.
pub(crate) fn expm(a: &Mat) -> Mat {
    let n = a.dim;
    let norm = a.max_abs() * n as f64;
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let b = a.scaled(C64::new(scale, 0.0));
    let mut term = Mat::identity(n);
    let mut sum = Mat::identity(n);
    for k in 1..=24 {
        term = term.matmul(&b).scaled(C64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}
