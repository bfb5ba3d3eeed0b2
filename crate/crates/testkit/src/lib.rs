//! Reference computations kept apart from the library's solver code paths.
//!
//! The matrix exponential here is a plain Taylor series with scaling and
//! squaring on nested `Vec`s. It shares no code with the library's Padé kernel
//! or its uniformization series, so agreement between them is meaningful.

pub mod fixtures;

pub type Matrix = Vec<Vec<f64>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

/// `exp(A)` via Taylor series on `A / 2^s` (infinity norm <= 1/2), then `s` squarings.
pub fn taylor_expm(a: &Matrix) -> Matrix {
    let n = a.len();
    let norm = a
        .iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.5 {
        s += 1;
    }
    let scale = 2f64.powi(-s);
    let scaled: Matrix = a
        .iter()
        .map(|row| row.iter().map(|x| x * scale).collect())
        .collect();
    let mut sum = identity(n);
    let mut term = identity(n);
    for k in 1..=30 {
        term = matmul(&term, &scaled);
        for row in term.iter_mut() {
            for x in row.iter_mut() {
                *x /= k as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        sum = matmul(&sum, &sum);
    }
    sum
}

/// `p0 * exp(Q t)` for a generator given as nested rows.
pub fn transient(q: &Matrix, p0: &[f64], t: f64) -> Vec<f64> {
    let qt: Matrix = q
        .iter()
        .map(|row| row.iter().map(|x| x * t).collect())
        .collect();
    let e = taylor_expm(&qt);
    let n = q.len();
    (0..n)
        .map(|j| (0..n).map(|i| p0[i] * e[i][j]).sum())
        .collect()
}

/// Hand-assembled generator of the DFWCS model, written out from its 13 arcs
/// with the diagonal as the negated row sum. Independent of the model parser.
pub fn dfwcs_generator(c: f64) -> Matrix {
    let (l1, l2, l3, l4, mu) = (3.3e-6, 3.3e-6, 1e-6, 1e-6, 1.0 / 72.0);
    let u = 1.0 - c;
    let mut q = vec![vec![0.0; 7]; 7];
    let arcs = [
        (1, 2, l1 * c),
        (1, 7, l1 * u),
        (2, 1, mu),
        (2, 3, l2 * c),
        (2, 7, l2 * u),
        (3, 2, 2.0 * mu),
        (3, 6, l2 * c),
        (3, 7, l2 * u),
        (4, 5, 2.0 * l3 * c),
        (4, 7, 2.0 * l3 * u),
        (5, 4, mu),
        (5, 6, 2.0 * l4 * c),
        (5, 7, 2.0 * l4 * u),
    ];
    for (from, to, r) in arcs {
        q[from - 1][to - 1] += r;
    }
    for (i, row) in q.iter_mut().enumerate() {
        let off: f64 = row.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| x).sum();
        row[i] = -off;
    }
    q
}

/// Coverage grid of the published reliability/safety table.
pub const COVERAGE_GRID: [f64; 9] = [0.900, 0.920, 0.940, 0.950, 0.960, 0.980, 0.990, 0.999, 1.0];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_scalar() {
        for x in [-30.0, -1.0, 0.0, 0.7, 5.0] {
            let e = taylor_expm(&vec![vec![x]])[0][0];
            assert!(((e - f64::exp(x)) / f64::exp(x)).abs() < 1e-12, "{x}");
        }
    }

    #[test]
    fn generator_rows_sum_to_zero() {
        for c in COVERAGE_GRID {
            for row in dfwcs_generator(c) {
                assert!(row.iter().sum::<f64>().abs() < 1e-15);
            }
        }
    }
}
