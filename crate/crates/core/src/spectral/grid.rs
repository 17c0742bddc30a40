use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Anti-aliasing rule used when forming nonlinear products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dealias {
    TwoThirds,
    OneHalf,
    None,
}

impl Dealias {
    pub fn name(self) -> &'static str {
        match self {
            Dealias::TwoThirds => "two-thirds",
            Dealias::OneHalf => "one-half",
            Dealias::None => "none",
        }
    }
}

impl std::str::FromStr for Dealias {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-thirds" | "2/3" => Ok(Dealias::TwoThirds),
            "one-half" | "1/2" => Ok(Dealias::OneHalf),
            "none" => Ok(Dealias::None),
            other => Err(Error::InvalidParameter(format!(
                "unknown dealias rule {other:?}"
            ))),
        }
    }
}

/// Periodic box `[0, L)^d` sampled on `n` points per axis.
#[derive(Debug, Clone)]
pub struct GridSpec {
    d: usize,
    n: usize,
    box_length: f64,
    dealias: Dealias,
    kscale: f64,
    ksq: OnceLock<Vec<f64>>,
}

impl PartialEq for GridSpec {
    fn eq(&self, o: &Self) -> bool {
        self.d == o.d
            && self.n == o.n
            && self.box_length == o.box_length
            && self.dealias == o.dealias
    }
}

pub type Grid = Arc<GridSpec>;

pub fn make_grid(d: usize, n: usize, box_length: f64, dealias: Dealias) -> Result<Grid> {
    GridSpec::new(d, n, box_length, dealias).map(Arc::new)
}

impl GridSpec {
    pub fn new(d: usize, n: usize, box_length: f64, dealias: Dealias) -> Result<Self> {
        if !(2..=3).contains(&d) {
            return Err(Error::InvalidGrid(format!("d = {d}, need d ∈ {{2,3}}")));
        }
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("n = {n}, need an even n >= 4")));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length {box_length} must be positive"
            )));
        }
        Ok(Self {
            d,
            n,
            box_length,
            dealias,
            kscale: 2.0 * PI / box_length,
            ksq: OnceLock::new(),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn dealias(&self) -> Dealias {
        self.dealias
    }

    /// Number of coefficients (and collocation points), `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `L^d`.
    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.d as i32)
    }

    /// Quadrature weight of one collocation point.
    pub fn cell_volume(&self) -> f64 {
        (self.box_length / self.n as f64).powi(self.d as i32)
    }

    pub fn fundamental(&self) -> f64 {
        self.kscale
    }

    /// Signed integer index of FFT position `j`; the Nyquist position maps to `-n/2`.
    pub fn signed(&self, j: usize) -> i64 {
        signed_index(j, self.n)
    }

    pub fn wavenumber(&self, j: usize) -> f64 {
        self.kscale * self.signed(j) as f64
    }

    pub fn axis_index(&self, flat: usize, axis: usize) -> usize {
        let stride = self.n.pow((self.d - 1 - axis) as u32);
        (flat / stride) % self.n
    }

    pub fn multi_index(&self, flat: usize) -> [i64; 3] {
        let mut m = [0i64; 3];
        for (a, slot) in m.iter_mut().enumerate().take(self.d) {
            *slot = self.signed(self.axis_index(flat, a));
        }
        m
    }

    /// Flat position of a signed multi-index, if it lies on the grid.
    pub fn flat_of(&self, m: &[i64]) -> Option<usize> {
        let half = (self.n / 2) as i64;
        let mut flat = 0usize;
        for &mi in m.iter().take(self.d) {
            if mi < -half || mi >= half {
                return None;
            }
            flat = flat * self.n + mi.rem_euclid(self.n as i64) as usize;
        }
        Some(flat)
    }

    pub fn kvec(&self, flat: usize) -> [f64; 3] {
        let m = self.multi_index(flat);
        [
            self.kscale * m[0] as f64,
            self.kscale * m[1] as f64,
            self.kscale * m[2] as f64,
        ]
    }

    pub fn ksq(&self, flat: usize) -> f64 {
        self.ksq_table()[flat]
    }

    /// `|k|^2` for every flat position.
    pub fn ksq_table(&self) -> &[f64] {
        self.ksq.get_or_init(|| {
            (0..self.len())
                .map(|i| {
                    let k = self.kvec(i);
                    k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
                })
                .collect()
        })
    }

    /// True when any axis sits on the Nyquist position.
    pub fn is_nyquist(&self, flat: usize) -> bool {
        (0..self.d).any(|a| self.axis_index(flat, a) == self.n / 2)
    }

    /// Flat position of `-k`.
    pub fn conj_index(&self, flat: usize) -> usize {
        let mut out = 0usize;
        for a in 0..self.d {
            let j = self.axis_index(flat, a);
            out = out * self.n + (self.n - j) % self.n;
        }
        out
    }

    /// Product-grid size per axis for a nonlinearity of the given polynomial order.
    pub fn padded_size(&self, order: usize) -> usize {
        padded_size(self.n, order, self.dealias)
    }

    /// Largest retained |index| along an axis after dealiased products.
    pub fn retained_max(&self) -> usize {
        self.n / 2 - 1
    }

    pub fn same_as(&self, other: &GridSpec) -> bool {
        self == other
    }

    pub fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "(d={}, n={}, L={}) vs (d={}, n={}, L={})",
                self.d, self.n, self.box_length, other.d, other.n, other.box_length
            )))
        }
    }
}

pub(crate) fn signed_index(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

fn even_ceil(x: usize, num: usize, den: usize) -> usize {
    let m = (x * num).div_ceil(den);
    m + (m % 2)
}

pub fn padded_size(n: usize, order: usize, rule: Dealias) -> usize {
    match rule {
        Dealias::None => n,
        Dealias::TwoThirds => even_ceil(n, 3, 2),
        Dealias::OneHalf => even_ceil(n, order.max(1) + 1, 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_dimensions() {
        assert!(make_grid(4, 8, 1.0, Dealias::OneHalf).is_err());
        assert!(make_grid(2, 7, 1.0, Dealias::OneHalf).is_err());
        assert!(make_grid(2, 8, -1.0, Dealias::OneHalf).is_err());
    }

    #[test]
    fn padded_sizes() {
        assert_eq!(padded_size(8, 2, Dealias::OneHalf), 12);
        assert_eq!(padded_size(8, 3, Dealias::OneHalf), 16);
        assert_eq!(padded_size(8, 3, Dealias::TwoThirds), 12);
        assert_eq!(padded_size(10, 2, Dealias::TwoThirds), 16);
        assert_eq!(padded_size(8, 3, Dealias::None), 8);
    }

    #[test]
    fn index_roundtrip() {
        let g = make_grid(3, 6, 2.0, Dealias::OneHalf).unwrap();
        for f in 0..g.len() {
            let m = g.multi_index(f);
            assert_eq!(g.flat_of(&m), Some(f));
            let c = g.conj_index(f);
            let mc = g.multi_index(c);
            for a in 0..3 {
                if m[a] != -3 {
                    assert_eq!(mc[a], -m[a]);
                }
            }
        }
    }
}
