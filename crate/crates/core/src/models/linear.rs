use num_complex::Complex64;

use super::{ModelKind, ModelParams};

/// Dense `(d+1) x (d+1)` linear action on `(û, η̂)` at one wavevector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMatrix {
    dim: usize,
    data: [Complex64; 16],
}

const I: Complex64 = Complex64::new(0.0, 1.0);

impl ModeMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim <= 4);
        Self {
            dim,
            data: [Complex64::default(); 16],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * 4 + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * 4 + c] = v;
    }

    pub fn perturbation(k: &[f64], kind: ModelKind) -> Self {
        let d = k.len();
        let mut m = Self::zeros(d + 1);
        let ksq: f64 = k.iter().map(|x| x * x).sum();
        let k1 = k[0];
        for i in 0..d {
            for j in 0..d {
                let mut v = Complex64::new(-k[i] * k[j], 0.0);
                if i == j {
                    v += -ksq - I * k1;
                    if kind == ModelKind::Tt {
                        v -= k1 * k1;
                    }
                }
                if i == 0 && j == 0 {
                    v -= 2.0;
                }
                m.set(i, j, v);
            }
            m.set(i, d, -I * k[i]);
            m.set(d, i, -I * k[i]);
        }
        let mut dd = -I * k1;
        if kind == ModelKind::Pptt {
            dd -= ksq;
        }
        m.set(d, d, dd);
        m
    }

    pub fn primitive(k: &[f64], kind: ModelKind, p: &ModelParams) -> Self {
        let d = k.len();
        let mut m = Self::zeros(d + 1);
        let ksq: f64 = k.iter().map(|x| x * x).sum();
        for i in 0..d {
            for j in 0..d {
                let mut v = Complex64::new(-k[i] * k[j], 0.0);
                if i == j {
                    v += p.alpha - ksq;
                }
                m.set(i, j, v);
            }
            m.set(i, d, -I * p.pressure * k[i]);
        }
        if kind == ModelKind::Pptt {
            m.set(d, d, Complex64::new(-ksq, 0.0));
        }
        m
    }

    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for r in 0..self.dim {
            let mut acc = Complex64::default();
            for c in 0..self.dim {
                acc += self.data[r * 4 + c] * x[c];
            }
            y[r] = acc;
        }
    }

    pub fn conj(&self) -> Self {
        let mut out = *self;
        out.data.iter_mut().for_each(|c| *c = c.conj());
        out
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = *self;
        out.data.iter_mut().for_each(|c| *c *= a);
        out
    }

    /// `I - a M`.
    pub fn shifted_identity(&self, a: f64) -> Self {
        let mut out = self.scaled(-a);
        for i in 0..self.dim {
            out.data[i * 4 + i] += 1.0;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_fn(self.dim, self.dim, |r, c| self.get(r, c))
    }

    pub fn from_nalgebra(m: &nalgebra::DMatrix<Complex64>) -> Self {
        let mut out = Self::zeros(m.nrows());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                out.set(r, c, m[(r, c)]);
            }
        }
        out
    }

    /// Inverse by Gaussian elimination with partial pivoting; `None` when a
    /// pivot falls below `tol` times the largest entry.
    pub fn inverse(&self, tol: f64) -> Option<Self> {
        let n = self.dim;
        let mut a = self.data;
        let mut inv = Self::zeros(n).shifted_identity(0.0).data;
        let scale = self.max_abs().max(1.0);
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| a[x * 4 + col].norm().total_cmp(&a[y * 4 + col].norm()))
                .unwrap();
            if a[piv * 4 + col].norm() <= tol * scale {
                return None;
            }
            if piv != col {
                for c in 0..4 {
                    a.swap(piv * 4 + c, col * 4 + c);
                    inv.swap(piv * 4 + c, col * 4 + c);
                }
            }
            let p = a[col * 4 + col].inv();
            for c in 0..n {
                a[col * 4 + c] *= p;
                inv[col * 4 + c] *= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * 4 + col];
                if f == Complex64::default() {
                    continue;
                }
                for c in 0..n {
                    let ac = a[col * 4 + c];
                    let ic = inv[col * 4 + c];
                    a[r * 4 + c] -= f * ac;
                    inv[r * 4 + c] -= f * ic;
                }
            }
        }
        Some(Self { dim: n, data: inv })
    }

    /// Smallest pivot magnitude met while factoring, used in error reports.
    pub fn min_pivot(&self) -> f64 {
        let n = self.dim;
        let mut a = self.data;
        let mut smallest = f64::INFINITY;
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| a[x * 4 + col].norm().total_cmp(&a[y * 4 + col].norm()))
                .unwrap();
            smallest = smallest.min(a[piv * 4 + col].norm());
            if a[piv * 4 + col].norm() == 0.0 {
                return 0.0;
            }
            for c in 0..4 {
                a.swap(piv * 4 + c, col * 4 + c);
            }
            for r in col + 1..n {
                let f = a[r * 4 + col] / a[col * 4 + col];
                for c in col..n {
                    let ac = a[col * 4 + c];
                    a[r * 4 + c] -= f * ac;
                }
            }
        }
        smallest
    }

    /// Largest eigenvalue of the Hermitian part `(M + M*)/2`.
    pub fn hermitian_part_max_eigenvalue(&self) -> f64 {
        let m = self.to_nalgebra();
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `exp(t M)` by Padé scaling and squaring.
    pub fn exp(&self, t: f64) -> Self {
        Self::from_nalgebra(&(self.to_nalgebra() * Complex64::new(t, 0.0)).exp())
    }
}
