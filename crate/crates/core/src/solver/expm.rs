use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{clamp_row, SolveError};
use crate::generator::GeneratorMatrix;

/// Minimal row-major square matrix for the exponential kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_generator(q: &GeneratorMatrix, scale: f64) -> Self {
        DenseMatrix {
            n: q.n(),
            data: q.entries().iter().map(|x| x * scale).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        let n = self.n;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// `sum_i c_i * M_i` over matrices of equal size.
    fn combine(terms: &[(f64, &DenseMatrix)], n: usize) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(n);
        for (c, m) in terms {
            for (o, x) in out.data.iter_mut().zip(&m.data) {
                *o += c * x;
            }
        }
        out
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Solves `self * X = rhs` by LU with partial pivoting.
    fn solve(&self, rhs: &DenseMatrix) -> Result<DenseMatrix, SolveError> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut b = rhs.data.clone();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs()))
                .unwrap_or(col);
            let pv = a[pivot * n + col];
            if pv == 0.0 || !pv.is_finite() {
                return Err(SolveError::NumericFailure(format!(
                    "singular Padé denominator at column {col}"
                )));
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                    b.swap(col * n + j, pivot * n + j);
                }
            }
            for r in col + 1..n {
                let f = a[r * n + col] / pv;
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
                for j in 0..n {
                    b[r * n + j] -= f * b[col * n + j];
                }
            }
        }
        for col in (0..n).rev() {
            let pv = a[col * n + col];
            for j in 0..n {
                let mut s = b[col * n + j];
                for k in col + 1..n {
                    s -= a[col * n + k] * b[k * n + j];
                }
                b[col * n + j] = s / pv;
            }
        }
        Ok(DenseMatrix { n, data: b })
    }
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by degree-13 Padé approximation with scaling and squaring.
pub fn expm(a: &DenseMatrix) -> Result<DenseMatrix, SolveError> {
    let n = a.n();
    let norm = a.norm1();
    if !norm.is_finite() {
        return Err(SolveError::NumericFailure("matrix has non-finite entries".into()));
    }
    let s = if norm > THETA13 {
        libm::ceil(libm::log2(norm / THETA13)) as i32
    } else {
        0
    };
    let scale = libm::exp2(-s as f64);
    let a = DenseMatrix::combine(&[(scale, a)], n);
    let ident = DenseMatrix::identity(n);
    let a2 = a.mul(&a);
    let a4 = a2.mul(&a2);
    let a6 = a4.mul(&a2);
    let b = &PADE13;

    let inner_u = DenseMatrix::combine(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], n);
    let u_poly = DenseMatrix::combine(
        &[
            (1.0, &a6.mul(&inner_u)),
            (b[7], &a6),
            (b[5], &a4),
            (b[3], &a2),
            (b[1], &ident),
        ],
        n,
    );
    let u = a.mul(&u_poly);
    let inner_v = DenseMatrix::combine(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], n);
    let v = DenseMatrix::combine(
        &[
            (1.0, &a6.mul(&inner_v)),
            (b[6], &a6),
            (b[4], &a4),
            (b[2], &a2),
            (b[0], &ident),
        ],
        n,
    );

    let denom = DenseMatrix::combine(&[(1.0, &v), (-1.0, &u)], n);
    let numer = DenseMatrix::combine(&[(1.0, &v), (1.0, &u)], n);
    let mut r = denom.solve(&numer)?;
    for _ in 0..s {
        r = r.mul(&r);
    }
    Ok(r)
}

/// `p0 * exp(Q t)`, clamped into `[0, 1]`.
pub(crate) fn transient(q: &GeneratorMatrix, p0: &[f64], t: f64) -> Result<Vec<f64>, SolveError> {
    if t == 0.0 {
        return Ok(p0.to_vec());
    }
    let e = expm(&DenseMatrix::from_generator(q, t))?;
    let n = q.n();
    let mut out = vec![0.0; n];
    for (i, &pi) in p0.iter().enumerate() {
        if pi == 0.0 {
            continue;
        }
        for (j, o) in out.iter_mut().enumerate() {
            *o += pi * e.get(i, j);
        }
    }
    clamp_row(&mut out);
    Ok(out)
}
