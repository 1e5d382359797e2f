//! Dense linear algebra on the source form ẋ = Ax + bu of the problem.
//!
//! Eigenvalues come from Householder reduction to Hessenberg form followed by
//! Francis double-shift QR sweeps. Eigenvectors needed for the oscillator-sum
//! extraction are obtained by complex inverse iteration.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::oscillator::{OscillatorSum, Term};

pub const MAX_DIMENSION: usize = 64;
pub const DEFAULT_TOL_SPEC: f64 = 1e-8;
pub const DEFAULT_TOL_RANK: f64 = 1e-10;

/// QR sweeps allowed per eigenvalue before giving up.
const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Single-input linear system ẋ = Ax + bu with costate direction p.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    a: DMatrix<f64>,
    b: DVector<f64>,
    p: DVector<f64>,
}

impl LinearSystem {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, p: DVector<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(invalid(format!("A must be square, got {}×{}", n, a.ncols())));
        }
        if n < 2 || n > MAX_DIMENSION || n % 2 != 0 {
            return Err(invalid(format!(
                "dimension n must be even with 2 ≤ n ≤ {MAX_DIMENSION}, got {n}"
            )));
        }
        if b.len() != n || p.len() != n {
            return Err(invalid(format!(
                "b and p must have length {n}, got {} and {}",
                b.len(),
                p.len()
            )));
        }
        if a.iter().chain(b.iter()).chain(p.iter()).any(|v| !v.is_finite()) {
            return Err(invalid("system entries must be finite"));
        }
        if b.norm() == 0.0 {
            return Err(invalid("b must be nonzero"));
        }
        if p.norm() == 0.0 {
            return Err(invalid("p must be nonzero"));
        }
        Ok(Self { a, b, p })
    }

    /// Build from row-major nested vectors.
    pub fn from_rows(a: &[Vec<f64>], b: &[f64], p: &[f64]) -> Result<Self> {
        let n = a.len();
        if a.iter().any(|row| row.len() != n) {
            return Err(invalid("A must be given as n rows of length n"));
        }
        let a = DMatrix::from_fn(n, n, |i, j| a[i][j]);
        Self::new(a, DVector::from_column_slice(b), DVector::from_column_slice(p))
    }

    /// Block-diagonal A = diag(B₁, …, B_k) with B_i = [[0, λ_i], [−λ_i, 0]].
    pub fn from_blocks(freqs: &[f64], b: &[f64], p: &[f64]) -> Result<Self> {
        Self::new(block_diagonal(freqs), DVector::from_column_slice(b), DVector::from_column_slice(p))
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn p(&self) -> &DVector<f64> {
        &self.p
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// Switching function pᵀ e^{−At} b evaluated through the matrix exponential.
    pub fn switching_value(&self, t: f64) -> Result<f64> {
        let e = matrix_exponential(&self.a, -t)?;
        Ok(self.p.dot(&(e * &self.b)))
    }
}

/// diag(B₁, …, B_k) with rotation generators B_i = [[0, λ_i], [−λ_i, 0]].
pub fn block_diagonal(freqs: &[f64]) -> DMatrix<f64> {
    let n = 2 * freqs.len();
    let mut a = DMatrix::zeros(n, n);
    for (k, &lambda) in freqs.iter().enumerate() {
        a[(2 * k, 2 * k + 1)] = lambda;
        a[(2 * k + 1, 2 * k)] = -lambda;
    }
    a
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex64>,
    pub max_real_part: f64,
    pub purely_imaginary: bool,
    /// One positive representative per conjugate pair, ascending.
    pub frequencies: Vec<f64>,
}

/// Eigenvalues of a real square matrix, with a purely-imaginary test.
///
/// The spectrum counts as purely imaginary when every |Re λ| ≤ `tol_spec`·‖A‖_F.
pub fn eigen_decompose(a: &DMatrix<f64>, tol_spec: f64) -> Result<SpectrumReport> {
    let n = a.nrows();
    if a.ncols() != n || n == 0 {
        return Err(invalid("eigen_decompose needs a nonempty square matrix"));
    }
    if n > MAX_DIMENSION {
        return Err(invalid(format!("dimension {n} exceeds {MAX_DIMENSION}")));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(invalid("matrix entries must be finite"));
    }
    let eigenvalues = eigenvalues(a)?;
    let scale = a.norm();
    let max_real_part = eigenvalues.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    let purely_imaginary = max_real_part <= tol_spec * scale;
    let threshold = tol_spec * scale;
    let mut frequencies: Vec<f64> = eigenvalues
        .iter()
        .filter(|z| z.im > threshold)
        .map(|z| z.im)
        .collect();
    frequencies.sort_by(f64::total_cmp);
    Ok(SpectrumReport {
        eigenvalues,
        max_real_part,
        purely_imaginary,
        frequencies,
    })
}

/// Eigenvalues of a real matrix, conjugate pairs adjacent with positive imaginary part first.
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let mut h = a.clone();
    hessenberg_in_place(&mut h);
    francis_qr(h)
}

/// Householder reduction to upper Hessenberg form (similarity transform).
fn hessenberg_in_place(h: &mut DMatrix<f64>) {
    let n = h.nrows();
    for k in 0..n.saturating_sub(2) {
        let alpha_norm = (k + 1..n).map(|i| h[(i, k)] * h[(i, k)]).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let alpha = if h[(k + 1, k)] > 0.0 { -alpha_norm } else { alpha_norm };
        let mut v: Vec<f64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H ← (I − 2vvᵀ/vᵀv) H (I − 2vvᵀ/vᵀv)
        for j in 0..n {
            let s: f64 = v.iter().enumerate().map(|(i, vi)| vi * h[(k + 1 + i, j)]).sum();
            let f = 2.0 * s / vnorm2;
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= f * vi;
            }
        }
        for i in 0..n {
            let s: f64 = v.iter().enumerate().map(|(j, vj)| vj * h[(i, k + 1 + j)]).sum();
            let f = 2.0 * s / vnorm2;
            for (j, vj) in v.iter().enumerate() {
                h[(i, k + 1 + j)] -= f * vj;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (eigenvalues only).
fn francis_qr(mut a: DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut shift = 0.0;
    let mut total_sweeps = 0usize;
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            let nu = nn as usize;
            // Look for a negligible subdiagonal element.
            let mut l = nu;
            while l >= 1 {
                let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[(l, l - 1)].abs() + s == s {
                    a[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[(nu, nu)];
            if l == nu {
                wr[nu] = x + shift;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[(nu - 1, nu - 1)];
            let mut w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += shift;
                if q >= 0.0 {
                    let z = p + sign(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = if z != 0.0 { x - w / z } else { x + z };
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = z;
                    wi[nu] = -z;
                }
                nn -= 2;
                break;
            }
            if its >= MAX_SWEEPS_PER_EIGENVALUE {
                return Err(Error::NoConvergence {
                    iterations: total_sweeps,
                });
            }
            if its == 10 || its == 20 || its == 40 {
                // Exceptional shift.
                shift += x;
                for i in 0..=nu {
                    a[(i, i)] -= x;
                }
                let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total_sweeps += 1;

            // Find two consecutive small subdiagonal elements.
            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - rr - ss;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[(i, i - 2)] = 0.0;
                if i != m + 2 {
                    a[(i, i - 3)] = 0.0;
                }
            }
            // Double QR step on rows l..=nu and columns m..=nu.
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = if k != nu - 1 { a[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[(k, k - 1)] = -a[(k, k - 1)];
                        }
                    } else {
                        a[(k, k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                        if k != nu - 1 {
                            pp += r * a[(k + 2, j)];
                            a[(k + 2, j)] -= pp * z;
                        }
                        a[(k + 1, j)] -= pp * y;
                        a[(k, j)] -= pp * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = x * a[(i, k)] + y * a[(i, k + 1)];
                        if k != nu - 1 {
                            pp += z * a[(i, k + 2)];
                            a[(i, k + 2)] -= pp * r;
                        }
                        a[(i, k + 1)] -= pp * q;
                        a[(i, k)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr.into_iter().zip(wi).map(|(re, im)| Complex64::new(re, im)).collect())
}

/// e^{At} by Padé(13) scaling and squaring.
pub fn matrix_exponential(a: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    const THETA_13: f64 = 5.371_920_351_148_152;
    const B: [f64; 14] = [
        64_764_752_532_480_000.0,
        32_382_376_266_240_000.0,
        7_771_770_303_897_600.0,
        1_187_353_796_428_800.0,
        129_060_195_264_000.0,
        10_559_470_521_600.0,
        670_442_572_800.0,
        33_522_128_640.0,
        1_323_241_920.0,
        40_840_800.0,
        960_960.0,
        16_380.0,
        182.0,
        1.0,
    ];
    let n = a.nrows();
    if a.ncols() != n {
        return Err(invalid("matrix_exponential needs a square matrix"));
    }
    if !t.is_finite() || a.iter().any(|v| !v.is_finite()) {
        return Err(invalid("matrix_exponential needs finite entries and time"));
    }
    let at = a * t;
    let norm = at.column_iter().map(|c| c.lp_norm(1)).fold(0.0, f64::max);
    // e^{‖At‖} overflows beyond ~709; squaring would not recover.
    if norm > 700.0 * (n as f64).max(1.0) {
        return Err(Error::Overflow { norm });
    }
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let x = at / 2f64.powi(squarings);
    let id = DMatrix::<f64>::identity(n, n);
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let x6 = &x4 * &x2;
    let u_inner = &x6 * (&x6 * B[13] + &x4 * B[11] + &x2 * B[9])
        + &x6 * B[7]
        + &x4 * B[5]
        + &x2 * B[3]
        + &id * B[1];
    let u = &x * u_inner;
    let v = &x6 * (&x6 * B[12] + &x4 * B[10] + &x2 * B[8]) + &x6 * B[6] + &x4 * B[4] + &x2 * B[2] + &id * B[0];
    let numer = &v + &u;
    let denom = &v - &u;
    let mut r = denom
        .lu()
        .solve(&numer)
        .ok_or_else(|| Error::Internal("singular Padé denominator".into()))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if r.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow { norm });
    }
    Ok(r)
}

/// Result of the Kalman rank test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Controllability {
    pub controllable: bool,
    pub kalman_rank: usize,
    /// det [b, Ab, …, A^{n−1}b].
    pub kalman_determinant: f64,
}

/// [b, Ab, …, A^{n−1}b].
pub fn kalman_matrix(sys: &LinearSystem) -> DMatrix<f64> {
    let n = sys.dim();
    let mut k = DMatrix::zeros(n, n);
    let mut col = sys.b.clone();
    for j in 0..n {
        k.set_column(j, &col);
        col = &sys.a * col;
    }
    k
}

/// Numerical rank of the Kalman matrix from a column-pivoted QR factorization.
///
/// Diagonal entries of R below `tol_rank`·(largest column norm) count as zero.
pub fn controllability_check(sys: &LinearSystem, tol_rank: f64) -> Controllability {
    let k = kalman_matrix(sys);
    let n = k.nrows();
    let largest = k.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let r = k.clone().col_piv_qr().unpack_r();
    let threshold = tol_rank * largest;
    let kalman_rank = (0..n).filter(|&i| r[(i, i)].abs() > threshold).count();
    Controllability {
        controllable: kalman_rank == n,
        kalman_rank,
        kalman_determinant: k.determinant(),
    }
}

/// Solve (M − μI)x = rhs repeatedly to converge on the eigenvector for μ.
fn inverse_iteration(m: &DMatrix<f64>, mu: Complex64) -> Result<DVector<Complex64>> {
    let n = m.nrows();
    let scale = m.norm().max(1.0);
    // Offset keeps the shifted matrix numerically invertible.
    let shift = mu + Complex64::new(1e-11, 1e-11) * scale;
    let shifted = DMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { shift } else { Complex64::new(0.0, 0.0) };
        Complex64::new(m[(i, j)], 0.0) - d
    });
    let lu = shifted.lu();
    let mut v = DVector::from_fn(n, |i, _| Complex64::new(1.0 + 0.1 * i as f64, 0.3 - 0.01 * i as f64));
    for _ in 0..3 {
        v = lu
            .solve(&v)
            .ok_or_else(|| Error::Internal("inverse iteration hit a singular system".into()))?;
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Internal("inverse iteration diverged".into()));
        }
        v /= Complex64::new(norm, 0.0);
    }
    Ok(v)
}

/// Rewrite pᵀe^{−At}b as Re Σ a_k e^{iλ_k t}.
///
/// Requires a purely imaginary, simple, nonzero spectrum. Each conjugate pair
/// ±iλ_k contributes a_k = 2·(pᵀv)(wᵀb)/(wᵀv) where v, w are the right and
/// left eigenvectors for −iλ_k. The result is checked against the matrix
/// exponential on a 200-point grid over [0, 20π/λ_min].
pub fn extract_oscillator_sum(sys: &LinearSystem, tol_spec: f64) -> Result<OscillatorSum> {
    let spectrum = eigen_decompose(&sys.a, tol_spec)?;
    let scale = sys.a.norm();
    if !spectrum.purely_imaginary {
        return Err(Error::NotPurelyImaginary {
            max_real_part: spectrum.max_real_part,
            tolerance: tol_spec * scale,
        });
    }
    let n = sys.dim();
    let freqs = &spectrum.frequencies;
    if 2 * freqs.len() != n {
        return Err(Error::SpectrumNotSimple(
            "A has a zero eigenvalue; every eigenvalue must be ±iλ with λ > 0".into(),
        ));
    }
    for w in freqs.windows(2) {
        if w[1] - w[0] <= tol_spec * scale.max(1.0) {
            return Err(Error::SpectrumNotSimple(format!(
                "repeated frequency {} (gap {:e})",
                w[0],
                w[1] - w[0]
            )));
        }
    }

    let at = sys.a.transpose();
    let pc = sys.p.map(|v| Complex64::new(v, 0.0));
    let bc = sys.b.map(|v| Complex64::new(v, 0.0));
    let mut terms = Vec::with_capacity(freqs.len());
    for &lambda in freqs {
        let mu = Complex64::new(0.0, -lambda);
        let v = inverse_iteration(&sys.a, mu)?;
        let w = inverse_iteration(&at, mu)?;
        let wv = w.dot(&v);
        if wv.norm() < 1e-13 {
            return Err(Error::SpectrumNotSimple(format!(
                "eigenvalue −i{lambda} is defective"
            )));
        }
        let amplitude = Complex64::new(2.0, 0.0) * pc.dot(&v) * w.dot(&bc) / wv;
        terms.push(Term::new(amplitude, lambda));
    }

    let pb = sys.p.norm() * sys.b.norm();
    let cutoff = 1e-12 * pb.max(terms.iter().map(|t| t.amplitude.norm()).fold(0.0, f64::max));
    let sum = OscillatorSum::with_drop_threshold(terms, cutoff).map_err(|e| match e {
        Error::InvalidInput(_) => invalid("switching function is identically zero (p orthogonal to every mode)"),
        other => other,
    })?;

    verify_against_exponential(sys, &sum, freqs[0])?;
    Ok(sum)
}

fn verify_against_exponential(sys: &LinearSystem, sum: &OscillatorSum, lambda_min: f64) -> Result<()> {
    let horizon = 20.0 * std::f64::consts::PI / lambda_min;
    let pb = sys.p.norm() * sys.b.norm();
    let tol = 1e-9 * pb.max(sum.total_amplitude());
    let points = 200;
    for i in 0..points {
        let t = horizon * i as f64 / (points - 1) as f64;
        let direct = sys.switching_value(t)?;
        let via_sum = sum.eval_m(t);
        if (direct - via_sum).abs() > tol {
            return Err(Error::Internal(format!(
                "oscillator sum deviates from pᵀe^(−At)b by {:e} at t = {t}",
                (direct - via_sum).abs()
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation(lambda: f64) -> DMatrix<f64> {
        block_diagonal(&[lambda])
    }

    #[test]
    fn rotation_block_spectrum() {
        let rep = eigen_decompose(&rotation(1.0), DEFAULT_TOL_SPEC).unwrap();
        assert!(rep.purely_imaginary);
        assert_eq!(rep.frequencies.len(), 1);
        assert!((rep.frequencies[0] - 1.0).abs() < 1e-14);
        let mut ims: Vec<f64> = rep.eigenvalues.iter().map(|z| z.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-14 && (ims[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn real_spectrum_is_flagged() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let rep = eigen_decompose(&a, DEFAULT_TOL_SPEC).unwrap();
        assert!(!rep.purely_imaginary);
        assert!(rep.frequencies.is_empty());
    }

    #[test]
    fn two_block_frequencies() {
        let rep = eigen_decompose(&block_diagonal(&[2.0, 1.0]), DEFAULT_TOL_SPEC).unwrap();
        assert!(rep.purely_imaginary);
        assert!((rep.frequencies[0] - 1.0).abs() < 1e-12);
        assert!((rep.frequencies[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn general_nonsymmetric_eigenvalues() {
        // Companion matrix of (x−1)(x−2)(x−3)(x²+1) = x⁵ − 6x⁴ + 12x³ − 12x² + 11x − 6.
        let mut a = DMatrix::zeros(5, 5);
        let first = [6.0, -12.0, 12.0, -11.0, 6.0];
        for j in 0..5 {
            a[(0, j)] = first[j];
        }
        for i in 1..5 {
            a[(i, i - 1)] = 1.0;
        }
        let mut ev = eigenvalues(&a).unwrap();
        ev.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        let expected = [
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(3.0, 0.0),
        ];
        for (got, want) in ev.iter().zip(expected) {
            assert!((got - want).norm() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn exponential_of_zero_is_identity() {
        let z = DMatrix::zeros(4, 4);
        assert_eq!(matrix_exponential(&z, 3.7).unwrap(), DMatrix::identity(4, 4));
    }

    #[test]
    fn exponential_of_rotation_generator() {
        let lambda = 1.3;
        for &t in &[0.0, 0.4, 5.0, -17.0] {
            let e = matrix_exponential(&rotation(lambda), t).unwrap();
            let (s, c) = (lambda * t).sin_cos();
            let want = DMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
            assert!((e - want).amax() < 1e-13);
        }
    }

    #[test]
    fn exponential_overflow_is_reported() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        assert!(matches!(matrix_exponential(&a, 1e6), Err(Error::Overflow { .. })));
    }

    #[test]
    fn coupled_oscillators_are_controllable() {
        let sys = LinearSystem::from_blocks(&[2.0, 1.0], &[0.0, 1.0, 0.0, 1.0], &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let c = controllability_check(&sys, DEFAULT_TOL_RANK);
        assert!(c.controllable);
        assert_eq!(c.kalman_rank, 4);
        assert!((c.kalman_determinant - 18.0).abs() < 1e-9 * 18.0);
    }

    #[test]
    fn equal_blocks_are_not_controllable() {
        let sys = LinearSystem::from_blocks(&[1.5, 1.5], &[0.0, 1.0, 0.0, 1.0], &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let c = controllability_check(&sys, DEFAULT_TOL_RANK);
        assert!(!c.controllable);
        assert_eq!(c.kalman_rank, 2);
    }

    #[test]
    fn zero_b_rejected() {
        let err = LinearSystem::from_blocks(&[1.0], &[0.0, 0.0], &[1.0, 0.0]).unwrap_err();
        assert!(err.is_validation());
    }

    #[test]
    fn odd_dimension_rejected() {
        let a = vec![vec![0.0; 3]; 3];
        assert!(LinearSystem::from_rows(&a, &[1.0; 3], &[1.0; 3]).is_err());
    }

    #[test]
    fn single_rotation_extraction() {
        let (lambda, p1, p2) = (1.7, 0.6, -1.1);
        let sys = LinearSystem::from_blocks(&[lambda], &[0.0, 1.0], &[p1, p2]).unwrap();
        let sum = extract_oscillator_sum(&sys, DEFAULT_TOL_SPEC).unwrap();
        assert_eq!(sum.len(), 1);
        let term = sum.terms()[0];
        assert!((term.frequency - lambda).abs() < 1e-12);
        assert!((term.amplitude.norm() - (p1 * p1 + p2 * p2).sqrt()).abs() < 1e-10);
        // By hand: m(t) = p₂ cos λt − p₁ sin λt.
        for i in 0..20 {
            let t = 0.37 * i as f64;
            let want = p2 * (lambda * t).cos() - p1 * (lambda * t).sin();
            assert!((sum.eval_m(t) - want).abs() < 1e-10);
        }
    }

    #[test]
    fn coupled_oscillator_amplitudes() {
        let p = [0.3, -0.8, 1.2, 0.5];
        let sys = LinearSystem::from_blocks(&[2.0, 1.0], &[0.0, 1.0, 0.0, 1.0], &p).unwrap();
        let sum = extract_oscillator_sum(&sys, DEFAULT_TOL_SPEC).unwrap();
        // Ascending frequencies: ζ₂ = 1 first, then ζ₁ = 2.
        let t = sum.terms();
        assert!((t[0].frequency - 1.0).abs() < 1e-12);
        assert!((t[0].amplitude.norm() - (p[2] * p[2] + p[3] * p[3]).sqrt()).abs() < 1e-10);
        assert!((t[1].amplitude.norm() - (p[0] * p[0] + p[1] * p[1]).sqrt()).abs() < 1e-10);
        for i in 0..30 {
            let s = 0.21 * i as f64;
            let want = -p[0] * (2.0 * s).sin() - p[2] * s.sin() + p[1] * (2.0 * s).cos() + p[3] * s.cos();
            assert!((sum.eval_m(s) - want).abs() < 1e-10);
        }
    }

    #[test]
    fn orthogonal_block_is_dropped() {
        let sys = LinearSystem::from_blocks(&[2.0, 1.0], &[0.0, 1.0, 0.0, 1.0], &[1.0, 0.5, 0.0, 0.0]).unwrap();
        let sum = extract_oscillator_sum(&sys, DEFAULT_TOL_SPEC).unwrap();
        assert_eq!(sum.len(), 1);
        assert!((sum.terms()[0].frequency - 2.0).abs() < 1e-12);
    }

    #[test]
    fn extraction_rejects_real_and_repeated_spectra() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let sys = LinearSystem::new(a, DVector::from_vec(vec![1.0, 1.0]), DVector::from_vec(vec![1.0, 0.0])).unwrap();
        let err = extract_oscillator_sum(&sys, DEFAULT_TOL_SPEC).unwrap_err();
        assert!(err.to_string().contains("purely imaginary"));

        let sys = LinearSystem::from_blocks(&[1.0, 1.0], &[0.0, 1.0, 0.0, 1.0], &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let err = extract_oscillator_sum(&sys, DEFAULT_TOL_SPEC).unwrap_err();
        assert!(matches!(err, Error::SpectrumNotSimple(_)));
    }
}
