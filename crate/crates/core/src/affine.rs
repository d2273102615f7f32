//! Modular data of the affine VOAs `L_{sl_n}(k, 0)` and a closed-form sl2
//! fusion rule that never touches an S-matrix.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
// `Float` supplies sqrt/sin/round without std.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::One;
use thiserror::Error;

use crate::exact::ratio;
use crate::fusion_ring::FusionRing;
use crate::label::Label;
use crate::modular_data::ModularData;
use crate::tolerance::Tolerances;

/// Largest supported rank; the Weyl sum costs `n!` terms per entry.
pub const MAX_RANK: u32 = 8;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AffineError {
    #[error("level must be at least 1, got {0}")]
    InvalidLevel(i64),
    #[error("rank n of sl_n must be in 2..={MAX_RANK}, got {0}")]
    InvalidRank(i64),
}

/// `(n, k)` for `L_{sl_n}(k, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AffineSpec {
    pub n: u32,
    pub k: u32,
}

impl AffineSpec {
    pub fn new(n: i64, k: i64) -> Result<Self, AffineError> {
        if !(2..=MAX_RANK as i64).contains(&n) {
            return Err(AffineError::InvalidRank(n));
        }
        if k < 1 {
            return Err(AffineError::InvalidLevel(k));
        }
        Ok(AffineSpec {
            n: n as u32,
            k: k as u32,
        })
    }

    /// Level-`k` dominant weights in Dynkin labels, ordered by total level and
    /// then descending, so the vacuum comes first and `ω_1, ω_2, …` follow.
    pub fn weights(&self) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut current = vec![0u32; (self.n - 1) as usize];
        collect_weights(&mut current, 0, self.k, &mut out);
        out.sort_by(|a, b| {
            let (sa, sb): (u32, u32) = (a.iter().sum(), b.iter().sum());
            sa.cmp(&sb).then_with(|| b.cmp(a))
        });
        out
    }

    /// `h_λ = <λ, λ + 2ρ> / (2(k + n))`.
    pub fn conformal_weight(&self, lambda: &[u32]) -> BigRational {
        let n = self.n as i64;
        // <ω_i, ω_j> = min(i,j) (n - max(i,j)) / n, so scale everything by n.
        let mut scaled = 0i64;
        for (i, &li) in lambda.iter().enumerate() {
            let i1 = i as i64 + 1;
            for (j, &lj) in lambda.iter().enumerate() {
                let j1 = j as i64 + 1;
                scaled += li as i64 * lj as i64 * i1.min(j1) * (n - i1.max(j1));
            }
            scaled += n * li as i64 * i1 * (n - i1);
        }
        ratio(scaled, 2 * n * (self.k as i64 + n))
    }

    /// `c = k (n^2 - 1) / (k + n)`.
    pub fn central_charge(&self) -> BigRational {
        let (n, k) = (self.n as i64, self.k as i64);
        ratio(k * (n * n - 1), k + n)
    }
}

fn collect_weights(current: &mut Vec<u32>, pos: usize, budget: u32, out: &mut Vec<Vec<u32>>) {
    if pos == current.len() {
        out.push(current.clone());
        return;
    }
    for v in 0..=budget {
        current[pos] = v;
        collect_weights(current, pos + 1, budget - v, out);
    }
    current[pos] = 0;
}

fn weight_name(lambda: &[u32]) -> String {
    let parts: Vec<String> = lambda.iter().map(|x| format!("{}", x)).collect();
    format!("({})", parts.join(","))
}

/// Kac-Peterson data for `L_{sl_2}(k, 0)` in doubled-spin labels `l0..lk`.
pub fn sl2_modular(k: i64) -> Result<ModularData, AffineError> {
    if k < 1 {
        return Err(AffineError::InvalidLevel(k));
    }
    let kk = (k + 2) as f64;
    let n = (k + 1) as usize;
    let norm = (2.0 / kk).sqrt();
    let s = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let x = norm * (PI * ((a + 1) * (b + 1)) as f64 / kk).sin();
                    let x = if x.abs() < Tolerances::DEFAULT.snap { 0.0 } else { x };
                    Complex64::new(x, 0.0)
                })
                .collect()
        })
        .collect();
    let h = (0..n as i64).map(|l| ratio(l * (l + 2), 4 * (k + 2))).collect();
    let names = (0..n).map(|l| format!("l{}", l)).collect();
    Ok(ModularData::new(names, s, h, ratio(3 * k, k + 2), Label(0))
        .expect("well-formed sl2 data"))
}

/// All permutations of `0..n` with their signs (Heap's algorithm).
fn signed_permutations(n: usize) -> Vec<(Vec<usize>, i8)> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut counters = vec![0usize; n];
    let mut sign = 1i8;
    let mut out = vec![(perm.clone(), sign)];
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            sign = -sign;
            out.push((perm.clone(), sign));
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    out
}

/// Coordinates of `λ + ρ` in the `ε`-basis before removing the trace:
/// `p_a = Σ_{i ≥ a} (λ_i + 1)`, `p_n = 0`.
pub fn shifted_partition(lambda: &[u32]) -> Vec<i64> {
    let n = lambda.len() + 1;
    let mut p = vec![0i64; n];
    for a in (0..n - 1).rev() {
        p[a] = p[a + 1] + lambda[a] as i64 + 1;
    }
    p
}

/// Kac-Peterson data for `L_{sl_n}(k, 0)`, S-matrix from the alternating
/// Weyl-group sum
/// `S_λμ ∝ Σ_w ε(w) exp(-2πi <w(λ+ρ), μ+ρ> / (k+n))`,
/// normalized so the vacuum row is a positive unit vector.
pub fn sln_modular(n: i64, k: i64) -> Result<ModularData, AffineError> {
    let spec = AffineSpec::new(n, k)?;
    sln_modular_with(spec, &Tolerances::DEFAULT)
}

pub fn sln_modular_with(spec: AffineSpec, tol: &Tolerances) -> Result<ModularData, AffineError> {
    let n = spec.n as usize;
    let level_shift = (spec.k + spec.n) as i64;
    let weights = spec.weights();
    let partitions: Vec<Vec<i64>> = weights.iter().map(|w| shifted_partition(w)).collect();
    let perms = signed_permutations(n);
    let m = weights.len();
    let modulus = n as i64 * level_shift;
    let mut raw = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    for a in 0..m {
        for b in a..m {
            let (p, q) = (&partitions[a], &partitions[b]);
            let trace = p.iter().sum::<i64>() * q.iter().sum::<i64>();
            let mut acc = Complex64::new(0.0, 0.0);
            for (w, sign) in &perms {
                let t: i64 = w.iter().zip(q).map(|(&wa, qa)| p[wa] * qa).sum();
                // <w(λ+ρ), μ+ρ> (k+n)^{-1} = (n t - P Q) / (n (k+n)), reduced exactly mod 1
                let num = (n as i64 * t - trace).rem_euclid(modulus);
                let angle = -2.0 * PI * num as f64 / modulus as f64;
                acc += Complex64::from_polar(*sign as f64, angle);
            }
            raw[a][b] = acc;
            raw[b][a] = acc;
        }
    }
    let norm = raw[0].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let phase = raw[0][0].conj() / raw[0][0].norm();
    let scale = phase / norm;
    let snap = |x: f64| if x.abs() < tol.snap { 0.0 } else { x };
    let s = raw
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| {
                    let y = x * scale;
                    Complex64::new(snap(y.re), snap(y.im))
                })
                .collect()
        })
        .collect();
    let h = weights.iter().map(|w| spec.conformal_weight(w)).collect();
    let names = weights.iter().map(|w| weight_name(w)).collect();
    Ok(ModularData::new(names, s, h, spec.central_charge(), Label(0))
        .expect("well-formed sl_n data"))
}

/// Truncated Clebsch-Gordan rule for `sl_2` at level `k`:
/// `N_{ab}^c = 1` iff `|a-b| ≤ c ≤ min(a+b, 2k-a-b)` and `a+b+c` is even.
pub fn sl2_fusion_oracle(k: i64) -> Result<FusionRing, AffineError> {
    if k < 1 {
        return Err(AffineError::InvalidLevel(k));
    }
    let names = (0..=k).map(|l| format!("l{}", l)).collect();
    let mut entries = Vec::new();
    for a in 0..=k {
        for b in 0..=k {
            for c in 0..=k {
                if (a - b).abs() <= c && c <= (a + b).min(2 * k - a - b) && (a + b + c) % 2 == 0 {
                    entries.push((
                        Label(a as usize),
                        Label(b as usize),
                        Label(c as usize),
                        BigUint::one(),
                    ));
                }
            }
        }
    }
    Ok(FusionRing::new(names, Label(0), entries).expect("truncated sl2 rule is a fusion ring"))
}

/// Ising modular data: labels `1, eps, sigma`, `h = 0, 1/2, 1/16`, `c = 1/2`.
pub fn ising() -> ModularData {
    let r = 2f64.sqrt();
    let s = [[1.0, 1.0, r], [1.0, 1.0, -r], [r, -r, 0.0]]
        .iter()
        .map(|row| row.iter().map(|&x| Complex64::new(x / 2.0, 0.0)).collect())
        .collect();
    ModularData::new(
        vec!["1".into(), "eps".into(), "sigma".into()],
        s,
        vec![ratio(0, 1), ratio(1, 2), ratio(1, 16)],
        ratio(1, 2),
        Label(0),
    )
    .expect("well-formed Ising data")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_start_with_vacuum_then_fundamentals() {
        let w = AffineSpec::new(4, 1).unwrap().weights();
        assert_eq!(w, vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn signed_permutations_cover_the_group() {
        let perms = signed_permutations(4);
        assert_eq!(perms.len(), 24);
        assert_eq!(perms.iter().map(|(_, s)| *s as i32).sum::<i32>(), 0);
        let mut seen: Vec<_> = perms.iter().map(|(p, _)| p.clone()).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 24);
        // sign agrees with inversion parity
        for (p, s) in &perms {
            let inversions = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            assert_eq!(*s, if inversions % 2 == 0 { 1 } else { -1 });
        }
    }

    #[test]
    fn shifted_partition_of_vacuum_is_rho() {
        assert_eq!(shifted_partition(&[0, 0, 0]), vec![3, 2, 1, 0]);
        assert_eq!(shifted_partition(&[1, 0, 2]), vec![6, 4, 3, 0]);
    }

    #[test]
    fn conformal_weight_matches_casimir_for_sl2() {
        let spec = AffineSpec::new(2, 5).unwrap();
        for l in 0..=5u32 {
            assert_eq!(spec.conformal_weight(&[l]), ratio((l * (l + 2)) as i64, 28));
        }
    }

    #[test]
    fn ising_weights() {
        let md = ising();
        assert_eq!(md.weights(), &[ratio(0, 1), ratio(1, 2), ratio(1, 16)]);
        assert_eq!(md.central_charge(), &ratio(1, 2));
    }
}
