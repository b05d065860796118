//! Dense 4x4 complex matrices and a cyclic Jacobi eigensolver for the
//! Hermitian case.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

pub const DIM: usize = 4;

const JACOBI_TOLERANCE: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix4(pub [[Complex64; DIM]; DIM]);

impl Default for Matrix4 {
    fn default() -> Self {
        Matrix4::zeros()
    }
}

impl Matrix4 {
    pub fn zeros() -> Self {
        Matrix4([[Complex64::new(0.0, 0.0); DIM]; DIM])
    }

    pub fn identity() -> Self {
        Matrix4::from_diagonal([1.0; DIM])
    }

    pub fn from_diagonal(d: [f64; DIM]) -> Self {
        let mut m = Matrix4::zeros();
        for (i, v) in d.into_iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn from_real(rows: [[f64; DIM]; DIM]) -> Self {
        let mut m = Matrix4::zeros();
        for i in 0..DIM {
            for j in 0..DIM {
                m[(i, j)] = Complex64::new(rows[i][j], 0.0);
            }
        }
        m
    }

    /// `|i><j|`.
    pub fn projector(i: usize, j: usize) -> Self {
        let mut m = Matrix4::zeros();
        m[(i, j)] = Complex64::new(1.0, 0.0);
        m
    }

    /// `a (x) b` with `a` acting on the first (most significant) qubit.
    pub fn kron(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> Self {
        let mut m = Matrix4::zeros();
        for (ia, row_a) in a.iter().enumerate() {
            for (ja, &x) in row_a.iter().enumerate() {
                for (ib, row_b) in b.iter().enumerate() {
                    for (jb, &y) in row_b.iter().enumerate() {
                        m[(2 * ia + ib, 2 * ja + jb)] = x * y;
                    }
                }
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Matrix4::zeros();
        for i in 0..DIM {
            for j in 0..DIM {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|z| *z *= s);
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..DIM).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> [f64; DIM] {
        std::array::from_fn(|i| self[(i, i)].re)
    }

    /// `U A U^dagger`.
    pub fn conjugate_by(&self, u: &Matrix4) -> Self {
        *u * *self * u.adjoint()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Matrix4) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                if i != j {
                    sum += self[(i, j)].norm_sqr();
                }
            }
        }
        sum.sqrt()
    }

    fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for Matrix4 {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Matrix4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Mul for Matrix4 {
    type Output = Matrix4;

    fn mul(self, rhs: Matrix4) -> Matrix4 {
        let mut m = Matrix4::zeros();
        for i in 0..DIM {
            for k in 0..DIM {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..DIM {
                    m[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        m
    }
}

impl Add for Matrix4 {
    type Output = Matrix4;

    fn add(self, rhs: Matrix4) -> Matrix4 {
        let mut m = self;
        for i in 0..DIM {
            for j in 0..DIM {
                m[(i, j)] += rhs[(i, j)];
            }
        }
        m
    }
}

impl Sub for Matrix4 {
    type Output = Matrix4;

    fn sub(self, rhs: Matrix4) -> Matrix4 {
        let mut m = self;
        for i in 0..DIM {
            for j in 0..DIM {
                m[(i, j)] -= rhs[(i, j)];
            }
        }
        m
    }
}

/// Eigen-decomposition `A = V diag(values) V^dagger` of a Hermitian matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianEigen {
    /// Unsorted.
    pub values: [f64; DIM],
    /// Columns are the eigenvectors.
    pub vectors: Matrix4,
    pub sweeps: usize,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> Matrix4 {
        self.vectors * Matrix4::from_diagonal(self.values) * self.vectors.adjoint()
    }
}

/// Cyclic Jacobi: for each off-diagonal pair, strip the phase of `a_pq`
/// and apply the real symmetric rotation that annihilates it. Stops once the
/// off-diagonal Frobenius norm is below `1e-13` relative to the matrix norm.
///
/// Only the Hermitian part of `a` is used.
pub fn hermitian_eigen(a: &Matrix4) -> HermitianEigen {
    let mut a = {
        let h = (*a + a.adjoint()).scale(0.5);
        let mut h = h;
        for i in 0..DIM {
            h[(i, i)].im = 0.0;
        }
        h
    };
    let mut v = Matrix4::identity();
    let scale = a.frobenius_norm();
    let mut sweeps = 0;

    while sweeps < JACOBI_MAX_SWEEPS && a.off_diagonal_norm() > JACOBI_TOLERANCE * scale {
        sweeps += 1;
        for p in 0..DIM - 1 {
            for q in p + 1..DIM {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = apq / r;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // U = diag(1, conj(phase)) on (p, q) followed by the real rotation
                // [[c, s], [-s, c]].
                let u_pp = Complex64::new(c, 0.0);
                let u_pq = Complex64::new(s, 0.0);
                let u_qp = -phase.conj() * s;
                let u_qq = phase.conj() * c;

                for k in 0..DIM {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u_pp + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * u_qq;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u_pp + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * u_qq;
                }
                for k in 0..DIM {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }

    HermitianEigen {
        values: a.diagonal(),
        vectors: v,
        sweeps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hermitian_from(entries: &[f64]) -> Matrix4 {
        let mut m = Matrix4::zeros();
        let mut it = entries.iter().copied();
        for i in 0..DIM {
            m[(i, i)] = c(it.next().unwrap(), 0.0);
            for j in i + 1..DIM {
                let z = c(it.next().unwrap(), it.next().unwrap());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn diagonal_input_needs_no_sweeps() {
        let d = Matrix4::from_diagonal([0.4, -0.1, 0.2, 0.5]);
        let e = hermitian_eigen(&d);
        assert_eq!(e.sweeps, 0);
        assert_eq!(e.values, [0.4, -0.1, 0.2, 0.5]);
    }

    #[test]
    fn known_spectrum() {
        // Pauli Y (x) I has eigenvalues +-1, each twice.
        let y = [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]];
        let id = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        let m = Matrix4::kron(&y, &id);
        let mut vals = hermitian_eigen(&m).values;
        vals.sort_by(f64::total_cmp);
        for (got, want) in vals.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn kron_layout() {
        let x = [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
        let id = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        // X on the first qubit swaps |00> <-> |10>.
        let m = Matrix4::kron(&x, &id);
        assert_eq!(m[(2, 0)], c(1.0, 0.0));
        assert_eq!(m[(0, 2)], c(1.0, 0.0));
        assert_eq!(m[(1, 0)], c(0.0, 0.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn reconstruction(entries in proptest::collection::vec(-1.0f64..1.0, 16)) {
            let m = hermitian_from(&entries);
            let e = hermitian_eigen(&m);
            prop_assert!(e.reconstruct().max_abs_diff(&m) < 1e-11);
            let vv = e.vectors * e.vectors.adjoint();
            prop_assert!(vv.max_abs_diff(&Matrix4::identity()) < 1e-12);
            let trace: f64 = e.values.iter().sum();
            prop_assert!((trace - m.trace().re).abs() < 1e-12);
        }
    }
}
