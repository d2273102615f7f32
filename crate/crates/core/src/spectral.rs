//! Spectral radius of nonnegative integer matrices.
//!
//! The primary route is power iteration; an exact characteristic polynomial
//! with Sturm-sequence root isolation is kept as a fallback for matrices where
//! iteration does not settle within its budget.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
// `Float` supplies sqrt/sin/round without std.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Sparse row representation: `rows[i]` lists `(j, value)` with nonzero `value`.
pub type SparseRows = [Vec<(usize, f64)>];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerIteration {
    /// Successive Rayleigh quotients must differ by less than this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PowerIteration {
    fn default() -> Self {
        PowerIteration {
            tolerance: 1e-12,
            max_iterations: 10_000,
        }
    }
}

fn mul(rows: &SparseRows, v: &[f64], out: &mut [f64]) {
    for (o, row) in out.iter_mut().zip(rows) {
        *o = row.iter().map(|&(j, x)| x * v[j]).sum();
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Largest eigenvalue of a nonnegative matrix by power iteration on `A + I`.
///
/// The identity shift makes the iteration aperiodic, so bipartite or cyclic
/// fusion matrices converge to the Perron-Frobenius root instead of
/// oscillating. Starts from the all-ones vector. Returns `None` when the
/// iteration budget runs out.
pub fn power_iteration(rows: &SparseRows, cfg: PowerIteration) -> Option<f64> {
    let n = rows.len();
    if n == 0 {
        return Some(0.0);
    }
    let mut v = vec![1.0; n];
    normalize(&mut v);
    let mut w = vec![0.0; n];
    let mut previous = f64::NAN;
    for _ in 0..cfg.max_iterations {
        mul(rows, &v, &mut w);
        w.iter_mut().zip(&v).for_each(|(y, x)| *y += x);
        let rayleigh = dot(&v, &w);
        let residual = w
            .iter()
            .zip(&v)
            .map(|(y, x)| {
                let r = y - rayleigh * x;
                r * r
            })
            .sum::<f64>()
            .sqrt();
        if (rayleigh - previous).abs() < cfg.tolerance && residual < 1e3 * cfg.tolerance {
            return Some(rayleigh - 1.0);
        }
        previous = rayleigh;
        if normalize(&mut w) == 0.0 {
            return Some(0.0);
        }
        core::mem::swap(&mut v, &mut w);
    }
    None
}

/// Perron-Frobenius eigenvector of a primitive nonnegative matrix, scaled so
/// that entry `anchor` equals 1.
pub fn perron_vector(rows: &SparseRows, anchor: usize, cfg: PowerIteration) -> Option<Vec<f64>> {
    let n = rows.len();
    let mut v = vec![1.0; n];
    normalize(&mut v);
    let mut w = vec![0.0; n];
    for _ in 0..cfg.max_iterations {
        mul(rows, &v, &mut w);
        let lambda = dot(&v, &w);
        if normalize(&mut w) == 0.0 || !lambda.is_finite() {
            return None;
        }
        let change = v
            .iter()
            .zip(&w)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        core::mem::swap(&mut v, &mut w);
        if change < cfg.tolerance {
            let scale = v[anchor];
            if scale <= 0.0 {
                return None;
            }
            return Some(v.iter().map(|x| x / scale).collect());
        }
    }
    None
}

/// Polynomial with rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(pub Vec<BigRational>);

impl Poly {
    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
        .trim()
    }

    /// Euclidean division `self = q * d + r`.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.0[dd].clone();
        let mut r = self.0.clone();
        let mut q = vec![BigRational::zero(); r.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let coeff = r[r.len() - 1].clone() / &lead;
            for (i, c) in d.0.iter().enumerate() {
                let t = &coeff * c;
                r[k + i] -= t;
            }
            q[k] = coeff;
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        (Poly(q).trim(), Poly(r).trim())
    }

    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a
    }
}

/// Characteristic polynomial `det(xI - A)` of an integer matrix by the
/// Faddeev-LeVerrier recursion, exact.
pub fn characteristic_polynomial(a: &[Vec<BigInt>]) -> Poly {
    let n = a.len();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut m: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = matmul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        m = next;
        let am = matmul(a, &m);
        let trace: BigInt = (0..n).map(|i| am[i][i].clone()).sum();
        coeffs[n - k] = -(trace / BigInt::from(k));
    }
    Poly(coeffs.into_iter().map(BigRational::from_integer).collect()).trim()
}

fn matmul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

fn sturm_chain(p: &Poly) -> Vec<Poly> {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let len = chain.len();
        if chain[len - 1].is_zero() {
            chain.pop();
            break;
        }
        if chain[len - 1].degree() == Some(0) {
            break;
        }
        let (_, r) = chain[len - 2].div_rem(&chain[len - 1]);
        let neg = Poly(r.0.into_iter().map(|c| -c).collect());
        chain.push(neg);
    }
    chain
}

fn sign_changes(chain: &[Poly], x: &BigRational) -> usize {
    let mut changes = 0;
    let mut last = 0i8;
    for p in chain {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

/// Largest real root of `p`, located by bisection on a Sturm chain of its
/// square-free part. Returns `None` when `p` has no real root.
pub fn largest_real_root(p: &Poly) -> Option<f64> {
    let deg = p.degree()?;
    if deg == 0 {
        return None;
    }
    let squarefree = {
        let g = Poly::gcd(p, &p.derivative());
        if g.degree().unwrap_or(0) == 0 {
            p.clone()
        } else {
            p.div_rem(&g).0
        }
    };
    let chain = sturm_chain(&squarefree);
    // Cauchy bound on root magnitudes.
    let lead = squarefree.0.last()?.abs();
    let bound = squarefree
        .0
        .iter()
        .map(|c| c.abs() / &lead)
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a })
        + BigRational::one();
    let mut lo = -bound.clone();
    let mut hi = bound;
    let count = |a: &BigRational, b: &BigRational| sign_changes(&chain, a) - sign_changes(&chain, b);
    if count(&lo, &hi) == 0 {
        return None;
    }
    let two = BigRational::from_integer(BigInt::from(2));
    for _ in 0..200 {
        if (&hi - &lo).to_f64().unwrap_or(0.0) < 1e-15 {
            break;
        }
        let mid = (&lo + &hi) / &two;
        if count(&mid, &hi) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ((lo + hi) / two).to_f64()
}

/// Spectral radius of a nonnegative integer matrix: power iteration first,
/// characteristic polynomial if the iteration does not converge.
pub fn spectral_radius(dense: &[Vec<BigInt>], cfg: PowerIteration) -> Option<f64> {
    let rows: Vec<Vec<(usize, f64)>> = dense
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(j, x)| (j, x.to_f64().unwrap_or(f64::INFINITY)))
                .collect()
        })
        .collect();
    power_iteration(&rows, cfg).or_else(|| largest_real_root(&characteristic_polynomial(dense)))
}
