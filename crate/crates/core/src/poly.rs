//! Univariate polynomials with real or complex coefficients, root finding
//! with multiplicity clustering, and the two-double-roots test for monic
//! quartics.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("root finding needs degree >= 1, got {0:?}")]
    ConstantPolynomial(Option<usize>),
    #[error("eigenvalue iteration did not converge for degree {0}")]
    NoConvergence(usize),
}

/// Tolerances for root finding and clustering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootConfig {
    /// Roots closer than `cluster_radius * (1 + |z|)` are merged outright.
    pub cluster_radius: f64,
    /// Candidate merges beyond the base radius are considered up to
    /// `merge_radius * (1 + |z|)` and accepted only if the derivative test passes.
    pub merge_radius: f64,
    /// Relative bound on `|p^(j)(c)|` for `j < m` when accepting a multiplicity-`m` cluster at `c`.
    pub multiplicity_tol: f64,
    pub max_schur_iterations: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self {
            cluster_radius: 1e-7,
            merge_radius: 1e-3,
            multiplicity_tol: 1e-12,
            max_schur_iterations: 10_000,
        }
    }
}

/// A group of numerically coincident roots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootCluster {
    pub value: Complex64,
    pub multiplicity: usize,
    /// Largest `|p|` over the computed members and the polished centre.
    pub residual: f64,
}

impl RootCluster {
    pub fn is_real(&self) -> bool {
        self.value.im == 0.0
    }
}

/// Real polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

/// Complex polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

fn trim<T: Copy>(mut coeffs: Vec<T>, is_zero: impl Fn(T) -> bool) -> Vec<T> {
    while coeffs.last().is_some_and(|&c| is_zero(c)) {
        coeffs.pop();
    }
    coeffs
}

impl RealPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self {
            coeffs: trim(coeffs, |c| c == 0.0),
        }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `prod (x - r)` over the given roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots.iter().fold(Self::constant(1.0), |acc, &r| {
            acc * Self::new(vec![-r, 1.0])
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn evaluate_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn to_complex(&self) -> ComplexPolynomial {
        ComplexPolynomial::new(
            self.coeffs
                .iter()
                .map(|&c| Complex64::new(c, 0.0))
                .collect(),
        )
    }
}

impl ComplexPolynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self {
            coeffs: trim(coeffs, |c| c == Complex64::new(0.0, 0.0)),
        }
    }

    /// Drops leading coefficients whose modulus is at most `rel_tol` times
    /// the largest coefficient modulus, and zeroes small interior ones.
    pub fn new_trimmed(coeffs: Vec<Complex64>, rel_tol: f64) -> Self {
        let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let cut = rel_tol * max;
        Self::new(
            coeffs
                .into_iter()
                .map(|c| {
                    if c.norm() <= cut {
                        Complex64::new(0.0, 0.0)
                    } else {
                        c
                    }
                })
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `sum |c_k| |z|^k`, the natural scale of rounding error in `evaluate(z)`.
    pub fn evaluate_abs(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Number of vanishing low-order coefficients, i.e. the multiplicity of 0 as a root.
    pub fn trailing_zeros(&self) -> usize {
        self.coeffs
            .iter()
            .take_while(|c| **c == Complex64::new(0.0, 0.0))
            .count()
    }
}

macro_rules! impl_ring_ops {
    ($ty:ty, $zero:expr) => {
        impl Add for $ty {
            type Output = $ty;
            fn add(self, rhs: $ty) -> $ty {
                let n = self.coeffs.len().max(rhs.coeffs.len());
                let mut out = vec![$zero; n];
                for (k, c) in self.coeffs.iter().enumerate() {
                    out[k] += *c;
                }
                for (k, c) in rhs.coeffs.iter().enumerate() {
                    out[k] += *c;
                }
                <$ty>::new(out)
            }
        }

        impl Neg for $ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                <$ty>::new(self.coeffs.iter().map(|c| -*c).collect())
            }
        }

        impl Sub for $ty {
            type Output = $ty;
            fn sub(self, rhs: $ty) -> $ty {
                self + (-rhs)
            }
        }

        impl Mul for $ty {
            type Output = $ty;
            fn mul(self, rhs: $ty) -> $ty {
                if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
                    return <$ty>::new(Vec::new());
                }
                let mut out = vec![$zero; self.coeffs.len() + rhs.coeffs.len() - 1];
                for (i, a) in self.coeffs.iter().enumerate() {
                    for (j, b) in rhs.coeffs.iter().enumerate() {
                        out[i + j] += *a * *b;
                    }
                }
                <$ty>::new(out)
            }
        }
    };
}

impl_ring_ops!(RealPolynomial, 0.0);
impl_ring_ops!(ComplexPolynomial, Complex64::new(0.0, 0.0));

/// Shifts tried when the QR iteration stalls on a structured companion matrix.
const RETRY_SHIFTS: [f64; 4] = [0.0, 0.3187, -0.2713, 0.5779];

/// Coefficients of `p(x + s)`.
fn taylor_shift<T>(coeffs: &[T], s: T) -> Vec<T>
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<Output = T>,
{
    let mut c = coeffs.to_vec();
    let n = c.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            c[j] = c[j] + s * c[j + 1];
        }
    }
    c
}

fn real_companion_roots(p: &RealPolynomial, cfg: &RootConfig) -> Result<Vec<Complex64>, PolyError> {
    let scale = 1.0
        + p.coeffs
            .iter()
            .map(|c| (c / p.leading()).abs())
            .fold(0.0, f64::max);
    for shift in RETRY_SHIFTS {
        let s = shift * scale.min(10.0);
        let shifted = RealPolynomial::new(taylor_shift(&p.coeffs, s));
        if let Ok(roots) = real_companion_roots_once(&shifted, cfg) {
            return Ok(roots.into_iter().map(|z| z + s).collect());
        }
    }
    Err(PolyError::NoConvergence(p.degree().unwrap_or(0)))
}

fn complex_companion_roots(
    p: &ComplexPolynomial,
    cfg: &RootConfig,
) -> Result<Vec<Complex64>, PolyError> {
    let scale = 1.0
        + p.coeffs
            .iter()
            .map(|c| (c / p.leading()).norm())
            .fold(0.0, f64::max);
    for shift in RETRY_SHIFTS {
        let s = Complex64::new(shift, 0.5 * shift) * scale.min(10.0);
        let shifted = ComplexPolynomial::new(taylor_shift(&p.coeffs, s));
        if let Ok(roots) = complex_companion_roots_once(&shifted, cfg) {
            return Ok(roots.into_iter().map(|z| z + s).collect());
        }
    }
    Err(PolyError::NoConvergence(p.degree().unwrap_or(0)))
}

fn real_companion_roots_once(
    p: &RealPolynomial,
    cfg: &RootConfig,
) -> Result<Vec<Complex64>, PolyError> {
    let n = p.degree().unwrap_or(0);
    let lead = p.leading();
    if n == 1 {
        return Ok(vec![Complex64::new(-p.coeffs[0] / lead, 0.0)]);
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -p.coeffs[i] / lead;
    }
    let schur = Schur::try_new(m, f64::EPSILON, cfg.max_schur_iterations)
        .ok_or(PolyError::NoConvergence(n))?;
    let (_, t) = schur.unpack();
    Ok(quasi_triangular_eigenvalues(&t))
}

/// Eigenvalues of a real upper quasi-triangular matrix, reading 2x2 blocks directly.
fn quasi_triangular_eigenvalues(t: &DMatrix<f64>) -> Vec<Complex64> {
    let n = t.nrows();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let mean = 0.5 * (a + d);
            let disc = 0.25 * (a - d) * (a - d) + b * c;
            if disc >= 0.0 {
                let r = disc.sqrt();
                out.push(Complex64::new(mean - r, 0.0));
                out.push(Complex64::new(mean + r, 0.0));
            } else {
                let r = (-disc).sqrt();
                out.push(Complex64::new(mean, r));
                out.push(Complex64::new(mean, -r));
            }
            i += 2;
        } else {
            out.push(Complex64::new(t[(i, i)], 0.0));
            i += 1;
        }
    }
    out
}

fn complex_companion_roots_once(
    p: &ComplexPolynomial,
    cfg: &RootConfig,
) -> Result<Vec<Complex64>, PolyError> {
    let n = p.degree().unwrap_or(0);
    let lead = p.leading();
    if n == 1 {
        return Ok(vec![-p.coeffs[0] / lead]);
    }
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -p.coeffs[i] / lead;
    }
    let schur = Schur::try_new(m, f64::EPSILON, cfg.max_schur_iterations)
        .ok_or(PolyError::NoConvergence(n))?;
    schur
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or(PolyError::NoConvergence(n))
}

fn newton_step(p: &ComplexPolynomial, dp: &ComplexPolynomial, z: Complex64) -> Complex64 {
    let d = dp.evaluate(z);
    if d.norm() == 0.0 {
        return z;
    }
    let next = z - p.evaluate(z) / d;
    if next.is_finite() && p.evaluate(next).norm() <= p.evaluate(z).norm() {
        next
    } else {
        z
    }
}

/// Repeated derivatives `p, p', p'', ...` up to order `count - 1`.
fn derivative_chain(p: &ComplexPolynomial, count: usize) -> Vec<ComplexPolynomial> {
    let mut out = vec![p.clone()];
    for _ in 1..count {
        let next = out
            .last()
            .map(ComplexPolynomial::derivative)
            .unwrap_or_default();
        out.push(next);
    }
    out
}

struct Group {
    members: Vec<Complex64>,
    centre: Complex64,
}

/// Centre of a multiplicity-`m` group: Newton on `p^(m-1)` from the centroid.
fn polish_centre(
    chain: &[ComplexPolynomial],
    members: &[Complex64],
    real_input: bool,
) -> Complex64 {
    let m = members.len();
    let mut c = members.iter().sum::<Complex64>() / m as f64;
    if real_input && c.im.abs() <= 1e-7 * (1.0 + c.norm()) {
        c.im = 0.0;
    }
    let q = &chain[m - 1];
    let dq = &chain[m];
    for _ in 0..8 {
        let next = newton_step(q, dq, c);
        if next == c {
            break;
        }
        c = next;
    }
    if real_input && c.im.abs() <= 1e-7 * (1.0 + c.norm()) {
        c.im = 0.0;
    }
    c
}

fn multiplicity_consistent(chain: &[ComplexPolynomial], c: Complex64, m: usize, tol: f64) -> bool {
    chain[..m].iter().all(|q| {
        let scale = q.evaluate_abs(c);
        scale == 0.0 || q.evaluate(c).norm() <= tol * scale
    })
}

fn cluster(
    p: &ComplexPolynomial,
    raw: Vec<Complex64>,
    real_input: bool,
    cfg: &RootConfig,
) -> Vec<RootCluster> {
    let n = raw.len();
    let chain = derivative_chain(p, n + 1);
    let dp = &chain[1];
    let polished: Vec<Complex64> = raw.into_iter().map(|z| newton_step(p, dp, z)).collect();

    // single-linkage at the base radius
    let mut groups: Vec<Group> = Vec::new();
    for z in polished {
        let near: Vec<usize> = groups
            .iter()
            .enumerate()
            .filter(|(_, g)| {
                g.members
                    .iter()
                    .any(|w| (z - w).norm() <= cfg.cluster_radius * (1.0 + z.norm().max(w.norm())))
            })
            .map(|(i, _)| i)
            .collect();
        let mut members = vec![z];
        for &i in near.iter().rev() {
            members.extend(groups.remove(i).members);
        }
        groups.push(Group {
            members,
            centre: Complex64::new(0.0, 0.0),
        });
    }
    for g in &mut groups {
        g.centre = polish_centre(&chain, &g.members, real_input);
    }

    // derivative-verified merges at the loose radius
    loop {
        let mut best: Option<(f64, usize, usize, Complex64)> = None;
        for i in 0..groups.len() {
            for j in (i + 1)..groups.len() {
                let (a, b) = (groups[i].centre, groups[j].centre);
                let d = (a - b).norm();
                if d > cfg.merge_radius * (1.0 + a.norm().max(b.norm())) {
                    continue;
                }
                if best.is_some_and(|(bd, ..)| bd <= d) {
                    continue;
                }
                let mut members = groups[i].members.clone();
                members.extend(groups[j].members.iter().copied());
                let m = members.len();
                let c = polish_centre(&chain, &members, real_input);
                if multiplicity_consistent(&chain, c, m, cfg.multiplicity_tol) {
                    best = Some((d, i, j, c));
                }
            }
        }
        let Some((_, i, j, c)) = best else { break };
        let absorbed = groups.remove(j).members;
        groups[i].members.extend(absorbed);
        groups[i].centre = c;
    }

    let mut out: Vec<RootCluster> = groups
        .into_iter()
        .map(|g| {
            let residual = g
                .members
                .iter()
                .chain(std::iter::once(&g.centre))
                .map(|z| p.evaluate(*z).norm())
                .fold(0.0, f64::max);
            RootCluster {
                value: g.centre,
                multiplicity: g.members.len(),
                residual,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
    out
}

/// All complex roots of a real polynomial, clustered by multiplicity.
pub fn all_roots(p: &RealPolynomial, cfg: &RootConfig) -> Result<Vec<RootCluster>, PolyError> {
    match p.degree() {
        None | Some(0) => return Err(PolyError::ConstantPolynomial(p.degree())),
        _ => {}
    }
    let raw = real_companion_roots(p, cfg)?;
    Ok(cluster(&p.to_complex(), raw, true, cfg))
}

/// Real root clusters only; conjugate pairs are dropped.
pub fn real_roots_with_multiplicity(
    p: &RealPolynomial,
    cfg: &RootConfig,
) -> Result<Vec<RootCluster>, PolyError> {
    Ok(all_roots(p, cfg)?
        .into_iter()
        .filter(RootCluster::is_real)
        .collect())
}

/// All roots of a complex polynomial, clustered by multiplicity. Exact zero
/// low-order coefficients produce an exact cluster at the origin.
pub fn complex_roots(
    p: &ComplexPolynomial,
    cfg: &RootConfig,
) -> Result<Vec<RootCluster>, PolyError> {
    match p.degree() {
        None | Some(0) => return Err(PolyError::ConstantPolynomial(p.degree())),
        _ => {}
    }
    let z = p.trailing_zeros();
    let mut out = Vec::new();
    if z > 0 {
        out.push(RootCluster {
            value: Complex64::new(0.0, 0.0),
            multiplicity: z,
            residual: 0.0,
        });
    }
    let reduced = ComplexPolynomial::new(p.coeffs[z..].to_vec());
    if reduced.degree().unwrap_or(0) >= 1 {
        let raw = complex_companion_roots(&reduced, cfg)?;
        out.extend(cluster(&reduced, raw, false, cfg).into_iter().map(|mut c| {
            c.residual = p.evaluate(c.value).norm().max(c.residual);
            c
        }));
    }
    Ok(out)
}

fn close(lhs: Complex64, rhs: Complex64, scale: f64, tol: f64) -> bool {
    (lhs - rhs).norm() <= tol * scale
}

/// The two-double-roots criterion for the monic quartic `x^4 + a1 x^3 + a2 x^2 + a3 x + a4`
/// over the complex numbers. Each identity is compared relative to the summed
/// magnitude of its terms; `a1` counts as zero below `tol` times the root scale.
pub fn has_two_double_roots_complex(
    a1: Complex64,
    a2: Complex64,
    a3: Complex64,
    a4: Complex64,
    tol: f64,
) -> bool {
    let root_scale = 1.0_f64
        .max(a2.norm().sqrt())
        .max(a3.norm().cbrt())
        .max(a4.norm().sqrt().sqrt());
    if a1.norm() > tol * root_scale {
        let first = close(
            4.0 * a1 * a2,
            a1 * a1 * a1 + 8.0 * a3,
            (4.0 * a1 * a2).norm() + (a1 * a1 * a1).norm() + (8.0 * a3).norm(),
            tol,
        );
        let second = close(
            a1 * a1 * a4,
            a3 * a3,
            (a1 * a1 * a4).norm() + (a3 * a3).norm(),
            tol,
        );
        first && second
    } else {
        let scale3 = root_scale.powi(3);
        let a3_zero = a3.norm() <= tol * scale3;
        let square = close(4.0 * a4, a2 * a2, (4.0 * a4).norm() + (a2 * a2).norm(), tol);
        a3_zero && square
    }
}

/// Real-coefficient form of [`has_two_double_roots_complex`].
pub fn has_two_double_roots(a1: f64, a2: f64, a3: f64, a4: f64, tol: f64) -> bool {
    let c = |x: f64| Complex64::new(x, 0.0);
    has_two_double_roots_complex(c(a1), c(a2), c(a3), c(a4), tol)
}
