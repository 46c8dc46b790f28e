//! Real touching conics in the invariant planes `H_λ = {y0 = λ y1}`, written in
//! the plane coordinates `(y1 : y2 : y3)`.
//!
//! Three families are constructed: the generic family over `f > 0`, the
//! special family over `f < 0`, and the `U(1)`-orbit conics `y2 y3 = α y1^2`.
//! [`verify_touching`] recomputes the contact structure with the branch curve
//! from scratch, and [`min_real_form`] certifies absence of real points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{
    complex_roots, has_two_double_roots_complex, ComplexPolynomial, PolyError, RootConfig,
};
use crate::surface::{branch_pair, IntervalLabel, OpenInterval, Surface, SurfaceParams};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConicError {
    #[error("no generic touching conic over λ = {lambda}: {reason}")]
    NoGenericFamily { lambda: f64, reason: &'static str },
    #[error("no special touching conic over λ = {lambda}: f(λ) = {f} is not negative")]
    NoSpecialFamily { lambda: f64, f: f64 },
    #[error("λ = {lambda} is the double root λ0; the branch curve is a double conic there")]
    DegeneratePlane { lambda: f64 },
    #[error("orbit conic needs α != 0")]
    ZeroAlpha,
    #[error("coefficient matrix is zero or not symmetric")]
    BadMatrix,
    #[error("conic is degenerate (normalized determinant {det:.3e}): it splits into a line pair or a double line")]
    Degenerate { det: f64 },
    #[error("conic is not invariant under the real structure")]
    NotReal,
    #[error("λ = {lambda} lies outside the domain of the l∞ radii (f > 0, λ != λ0)")]
    OutOfDomain { lambda: f64 },
    #[error("orbit conics are parametrised by α, not by (λ, θ)")]
    OrbitFamily,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Symmetric complex coefficient matrix over `(y1, y2, y3)`, scaled so the
/// largest entry has modulus one. `scale` is the modulus that was divided out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConicCoeffs {
    m: [[C; 3]; 3],
    scale: f64,
}

/// Coefficients of `a x1^2 + b x1 x2 + c x2^2 + d x1 + e x2 + h` in the chart `y3 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineConic {
    pub a: C,
    pub b: C,
    pub c: C,
    pub d: C,
    pub e: C,
    pub h: C,
}

fn det3(m: &[[C; 3]; 3]) -> C {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

impl ConicCoeffs {
    pub fn from_matrix(m: [[C; 3]; 3]) -> Result<Self, ConicError> {
        let scale = m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        let symmetric = (0..3).all(|i| (0..3).all(|j| (m[i][j] - m[j][i]).norm() <= 1e-14 * scale));
        if !(scale > 0.0) || !scale.is_finite() || !symmetric {
            return Err(ConicError::BadMatrix);
        }
        let mut n = m;
        for row in &mut n {
            for z in row.iter_mut() {
                *z /= scale;
            }
        }
        Ok(Self { m: n, scale })
    }

    /// Conic `a x1^2 + b x1 x2 + c x2^2 + d x1 + e x2 + h = 0` of the affine chart.
    pub fn from_affine(q: AffineConic) -> Result<Self, ConicError> {
        let half = 0.5;
        Self::from_matrix([
            [q.a, q.b * half, q.d * half],
            [q.b * half, q.c, q.e * half],
            [q.d * half, q.e * half, q.h],
        ])
    }

    pub fn matrix(&self) -> &[[C; 3]; 3] {
        &self.m
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Determinant of the normalized matrix.
    pub fn det(&self) -> C {
        det3(&self.m)
    }

    /// Determinant of the matrix before normalization.
    pub fn raw_det(&self) -> C {
        self.det() * self.scale.powi(3)
    }

    pub fn affine(&self) -> AffineConic {
        let m = &self.m;
        AffineConic {
            a: m[0][0],
            b: 2.0 * m[0][1],
            c: m[1][1],
            d: 2.0 * m[0][2],
            e: 2.0 * m[1][2],
            h: m[2][2],
        }
    }

    /// `y^T m y`.
    pub fn evaluate(&self, y: [C; 3]) -> C {
        let mut s = ZERO;
        for i in 0..3 {
            for j in 0..3 {
                s += self.m[i][j] * y[i] * y[j];
            }
        }
        s
    }

    /// The scalar `κ` with `swap(conj(m)) = κ m`, if it exists within `tol`.
    pub fn reality_factor(&self, tol: f64) -> Option<C> {
        let swap = |i: usize| match i {
            1 => 2,
            2 => 1,
            k => k,
        };
        let (pi, pj) = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .max_by(|a, b| self.m[a.0][a.1].norm().total_cmp(&self.m[b.0][b.1].norm()))?;
        let kappa = self.m[swap(pi)][swap(pj)].conj() / self.m[pi][pj];
        let ok = (0..3).all(|i| {
            (0..3).all(|j| (self.m[swap(i)][swap(j)].conj() - kappa * self.m[i][j]).norm() <= tol)
        });
        ok.then_some(kappa)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.reality_factor(tol).is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConicType {
    Generic,
    Special,
    Orbit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TouchingKind {
    Generic,
    Special,
    Orbit,
    NotTouching,
    ContainedInB,
}

impl TouchingKind {
    pub fn conic_type(self) -> Option<ConicType> {
        match self {
            Self::Generic => Some(ConicType::Generic),
            Self::Special => Some(ConicType::Special),
            Self::Orbit => Some(ConicType::Orbit),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `g = Q - sqrt(f)`
    Minus,
    /// `g = Q + sqrt(f)`
    Plus,
}

/// The branch `y2 y3 + g y1^2 = 0` of the plane section of the surface.
pub fn branch_factors(surface: &Surface, lambda: f64, tol: f64) -> Result<(C, C), ConicError> {
    let l0 = surface.lambda0();
    if (lambda - l0).abs() <= tol * (1.0 + l0.abs()) {
        return Err(ConicError::DegeneratePlane { lambda });
    }
    Ok(branch_pair(surface.params(), lambda))
}

pub fn generic_conic(
    surface: &Surface,
    lambda: f64,
    theta: f64,
) -> Result<ConicCoeffs, ConicError> {
    let f = surface.f(lambda);
    if !(f > 0.0) {
        return Err(ConicError::NoGenericFamily {
            lambda,
            reason: "f(λ) is not positive",
        });
    }
    let d = surface.disc(lambda);
    if !(d > 0.0) || lambda == surface.lambda0() {
        return Err(ConicError::NoGenericFamily {
            lambda,
            reason: "Q^2 - f vanishes",
        });
    }
    let q = surface.q(lambda);
    let s = f.sqrt();
    let rot = C::from_polar(1.0, theta);
    ConicCoeffs::from_matrix([
        [C::new(2.0 * d, 0.0), ZERO, ZERO],
        [ZERO, s * rot, C::new(q, 0.0)],
        [ZERO, C::new(q, 0.0), s * rot.conj()],
    ])
}

/// `B(λ) = sqrt((sqrt(Q^2 - f) - Q) / 2)`, evaluated without cancellation; needs `f < 0`.
pub fn b_value(params: &SurfaceParams, lambda: f64) -> Option<f64> {
    let f = params.f(lambda);
    if !(f < 0.0) {
        return None;
    }
    let q = params.q(lambda);
    let root = (q * q - f).sqrt();
    let twice_b2 = if q > 0.0 { -f / (root + q) } else { root - q };
    Some((0.5 * twice_b2).sqrt())
}

pub fn special_conic(
    params: &SurfaceParams,
    lambda: f64,
    theta: f64,
) -> Result<ConicCoeffs, ConicError> {
    let f = params.f(lambda);
    let bb = b_value(params, lambda).ok_or(ConicError::NoSpecialFamily { lambda, f })?;
    let root = params.disc(lambda).sqrt();
    let rot = C::from_polar(1.0, theta);
    let half_b = 0.5 * bb;
    ConicCoeffs::from_matrix([
        [C::new(root, 0.0), half_b * rot, half_b * rot.conj()],
        [half_b * rot, ZERO, C::new(0.5, 0.0)],
        [half_b * rot.conj(), C::new(0.5, 0.0), ZERO],
    ])
}

/// The conic `y2 y3 - α y1^2 = 0`.
pub fn orbit_conic(alpha: f64) -> Result<ConicCoeffs, ConicError> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(ConicError::ZeroAlpha);
    }
    ConicCoeffs::from_matrix([
        [C::new(-alpha, 0.0), ZERO, ZERO],
        [ZERO, ZERO, C::new(0.5, 0.0)],
        [ZERO, C::new(0.5, 0.0), ZERO],
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TouchConfig {
    pub roots: RootConfig,
    /// Coefficients of a restriction below `coeff_tol * (1 + |g|)^2` are treated as zero.
    pub coeff_tol: f64,
    /// Normalized determinants below this are rejected as degenerate.
    pub degenerate_tol: f64,
    /// Relative tolerance for the closed-form contact identities.
    pub equality_tol: f64,
}

impl Default for TouchConfig {
    fn default() -> Self {
        Self {
            roots: RootConfig::default(),
            coeff_tol: 1e-12,
            degenerate_tol: 1e-10,
            equality_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "at", rename_all = "snake_case")]
pub enum ContactPoint {
    PInf,
    PInfBar,
    Affine { x1: C, x2: C },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contact {
    pub point: ContactPoint,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub branch: Branch,
    pub g: C,
    /// Restriction polynomial in `x1`, ascending degree; empty when the conic lies on the branch.
    pub restriction: Vec<C>,
    pub contacts: Vec<Contact>,
    /// Largest root-cluster residual relative to the largest coefficient.
    pub residual: f64,
    /// Two-double-roots criterion on the monic quartic (quartic restrictions only).
    pub two_double_roots: Option<bool>,
    /// Relative size of `(g e - a)^2 + 4 g b d` (cubic restrictions through `P∞` only).
    pub cubic_discriminant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangencyReport {
    pub branches: Vec<BranchRecord>,
    pub kind: TouchingKind,
    pub pinf_multiplicity: usize,
    pub pinfbar_multiplicity: usize,
}

impl TangencyReport {
    pub fn max_residual(&self) -> f64 {
        self.branches.iter().map(|b| b.residual).fold(0.0, f64::max)
    }
}

fn analyse_branch(
    q: &AffineConic,
    branch: Branch,
    g: C,
    cfg: &TouchConfig,
) -> Result<BranchRecord, ConicError> {
    // substitute x2 = -g x1^2
    let raw = vec![q.h, q.d, q.a - g * q.e, -g * q.b, g * g * q.c];
    let cut = cfg.coeff_tol * (1.0 + g.norm()).powi(2);
    let coeffs: Vec<C> = raw
        .into_iter()
        .map(|z| if z.norm() <= cut { ZERO } else { z })
        .collect();
    let poly = ComplexPolynomial::new(coeffs);
    let mut record = BranchRecord {
        branch,
        g,
        restriction: poly.coeffs().to_vec(),
        contacts: Vec::new(),
        residual: 0.0,
        two_double_roots: None,
        cubic_discriminant: None,
    };
    let Some(deg) = poly.degree() else {
        return Ok(record);
    };
    let at_infinity = 4 - deg;
    if at_infinity > 0 {
        record.contacts.push(Contact {
            point: ContactPoint::PInfBar,
            multiplicity: at_infinity,
        });
    }
    if deg >= 1 {
        let top = poly.coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max);
        for c in complex_roots(&poly, &cfg.roots)? {
            record.residual = record.residual.max(c.residual / top);
            let at_origin = c.value.norm() <= cfg.roots.cluster_radius;
            record.contacts.push(Contact {
                point: if at_origin {
                    ContactPoint::PInf
                } else {
                    ContactPoint::Affine {
                        x1: c.value,
                        x2: -g * c.value * c.value,
                    }
                },
                multiplicity: c.multiplicity,
            });
        }
    }
    let k = poly.coeffs();
    if deg == 4 {
        let lead = k[4];
        record.two_double_roots = Some(has_two_double_roots_complex(
            k[3] / lead,
            k[2] / lead,
            k[1] / lead,
            k[0] / lead,
            cfg.equality_tol,
        ));
    }
    if deg == 3 && poly.trailing_zeros() == 1 {
        // x1 (g b x1^2 + (g e - a) x1 - d) up to sign
        let lin = g * q.e - q.a;
        let disc = lin * lin + 4.0 * g * q.b * q.d;
        let size = (lin * lin).norm() + (4.0 * g * q.b * q.d).norm();
        record.cubic_discriminant = Some(if size > 0.0 { disc.norm() / size } else { 0.0 });
    }
    Ok(record)
}

/// Intersects the conic with both branches of the plane section over `λ` and
/// classifies the contact structure.
pub fn verify_touching(
    conic: &ConicCoeffs,
    params: &SurfaceParams,
    lambda: f64,
    cfg: &TouchConfig,
) -> Result<TangencyReport, ConicError> {
    let det = conic.det().norm();
    if det < cfg.degenerate_tol {
        return Err(ConicError::Degenerate { det });
    }
    let q = conic.affine();
    let (gm, gp) = branch_pair(params, lambda);
    let branches = vec![
        analyse_branch(&q, Branch::Minus, gm, cfg)?,
        analyse_branch(&q, Branch::Plus, gp, cfg)?,
    ];
    let count = |want: fn(&ContactPoint) -> bool| -> usize {
        branches
            .iter()
            .flat_map(|b| b.contacts.iter())
            .filter(|c| want(&c.point))
            .map(|c| c.multiplicity)
            .sum()
    };
    let pinf = count(|p| matches!(p, ContactPoint::PInf));
    let pinfbar = count(|p| matches!(p, ContactPoint::PInfBar));
    let kind = if branches.iter().any(|b| b.restriction.is_empty()) {
        TouchingKind::ContainedInB
    } else {
        let affine_ok = branches
            .iter()
            .flat_map(|b| b.contacts.iter())
            .filter(|c| matches!(c.point, ContactPoint::Affine { .. }))
            .all(|c| c.multiplicity >= 2);
        match (affine_ok, pinf, pinfbar) {
            (true, 0, 0) => TouchingKind::Generic,
            (true, 2, 2) => TouchingKind::Special,
            (true, 4, 4) => TouchingKind::Orbit,
            _ => TouchingKind::NotTouching,
        }
    };
    Ok(TangencyReport {
        branches,
        kind,
        pinf_multiplicity: pinf,
        pinfbar_multiplicity: pinfbar,
    })
}

/// Resolution of the search for the minimum of the real form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub polar_steps: usize,
    pub azimuth_steps: usize,
    pub descent_rounds: usize,
    pub reality_tol: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            polar_steps: 48,
            azimuth_steps: 96,
            descent_rounds: 24,
            reality_tol: 1e-9,
        }
    }
}

/// Two unit vectors completing `x` to an orthonormal frame.
fn tangent_frame(x: [f64; 3]) -> [[f64; 3]; 2] {
    let axis = if x[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let dot: f64 = (0..3).map(|k| axis[k] * x[k]).sum();
    let u: [f64; 3] = std::array::from_fn(|k| axis[k] - dot * x[k]);
    let n = u.iter().map(|c| c * c).sum::<f64>().sqrt();
    let u = u.map(|c| c / n);
    let w = [
        x[1] * u[2] - x[2] * u[1],
        x[2] * u[0] - x[0] * u[2],
        x[0] * u[1] - x[1] * u[0],
    ];
    [u, w]
}

/// Minimum over the real slice `{y1 real, y3 = conj(y2), y1^2 + |y2|^2 = 1}` of the
/// real-valued form `y^T m y / ω`, for whichever sign of `ω` makes the minimum
/// larger. A positive value certifies that the conic has no real point.
pub fn min_real_form(conic: &ConicCoeffs, sampler: &SamplerConfig) -> Result<f64, ConicError> {
    let kappa = conic
        .reality_factor(sampler.reality_tol)
        .ok_or(ConicError::NotReal)?;
    let omega = kappa.conj().sqrt();
    // real coordinates x = (y1, Re y2, Im y2) on the unit sphere
    let form = |x: [f64; 3]| -> f64 {
        let y2 = C::new(x[1], x[2]);
        (conic.evaluate([C::new(x[0], 0.0), y2, y2.conj()]) / omega).re
    };
    let pi = std::f64::consts::PI;
    let np = sampler.polar_steps.max(4);
    let na = sampler.azimuth_steps.max(4);
    let (dp, da) = (pi / np as f64, 2.0 * pi / na as f64);
    let best = |sign: f64| -> f64 {
        let g = |x: [f64; 3]| sign * form(x);
        let mut start = ([1.0, 0.0, 0.0], f64::INFINITY);
        for i in 0..=np {
            for j in 0..na {
                let (phi, psi) = (i as f64 * dp, j as f64 * da);
                let x = [phi.cos(), phi.sin() * psi.cos(), phi.sin() * psi.sin()];
                let v = g(x);
                if v < start.1 {
                    start = (x, v);
                }
            }
        }
        // Along a great circle the form is A + B cos 2s + C sin 2s, so each line
        // search is exact. Each round follows the steepest-descent direction and the
        // least-curvature tangent direction; the latter escapes saddle points.
        let (mut x, mut v) = start;
        for _ in 0..sampler.descent_rounds {
            let before = v;
            let [u, w] = tangent_frame(x);
            let comb =
                |p: f64, q: f64| -> [f64; 3] { std::array::from_fn(|k| p * u[k] + q * w[k]) };
            let shifted =
                |t: [f64; 3], e: f64| -> [f64; 3] { std::array::from_fn(|k| x[k] + e * t[k]) };
            // the form is a homogeneous quadratic, so these differences are exact
            let grad = [u, w].map(|t| 0.5 * (g(shifted(t, 1.0)) - g(shifted(t, -1.0))));
            let (huu, hww) = (g(u) - v, g(w) - v);
            let huw = 0.25 * (g(comb(1.0, 1.0)) - g(comb(1.0, -1.0)));
            let angle = 0.5 * (2.0 * huw).atan2(huu - hww) + 0.5 * pi;
            for dir in [comb(-grad[0], -grad[1]), comb(angle.cos(), angle.sin())] {
                // x may have moved since the frame was built
                let along: f64 = (0..3).map(|k| dir[k] * x[k]).sum();
                let dir: [f64; 3] = std::array::from_fn(|k| dir[k] - along * x[k]);
                let n = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
                if !(n > 0.0) {
                    continue;
                }
                let t = dir.map(|c| c / n);
                let at = |s: f64| -> [f64; 3] {
                    std::array::from_fn(|k| s.cos() * x[k] + s.sin() * t[k])
                };
                let (h0, h1, h2) = (v, g(at(0.25 * pi)), g(at(0.5 * pi)));
                let mean = 0.5 * (h0 + h2);
                let (cb, cs) = (0.5 * (h0 - h2), h1 - mean);
                let cand = at(0.5 * (cs.atan2(cb) + pi));
                let vc = g(cand);
                if vc < v {
                    x = cand;
                    v = vc;
                }
            }
            if !(v < before) {
                break;
            }
        }
        v
    };
    Ok(best(1.0).max(best(-1.0)))
}

/// Closed-form minimum of the generic real form `(Q^2-f) y1^2 + Q|y2|^2 + sqrt(f) Re(e^{iθ} y2^2)`
/// on the unit real slice: `min(Q^2 - f, Q - sqrt(f))`.
pub fn generic_form_bound(params: &SurfaceParams, lambda: f64) -> f64 {
    let f = params.f(lambda);
    params.disc(lambda).min(params.q(lambda) - f.sqrt())
}

/// Closed-form minimum of the special real form
/// `sqrt(Q^2-f) y1^2 + 2B y1 Re(e^{iθ} y2) + |y2|^2` on the unit real slice, from the
/// completed square: the least eigenvalue of `[[sqrt(Q^2-f), -B], [-B, 1]]`.
pub fn special_form_bound(params: &SurfaceParams, lambda: f64) -> Option<f64> {
    let bb = b_value(params, lambda)?;
    let r = params.disc(lambda).sqrt();
    let mean = 0.5 * (r + 1.0);
    let gap = (0.25 * (r - 1.0) * (r - 1.0) + bb * bb).sqrt();
    // product of eigenvalues is r - B^2 = (r + Q) / 2 > 0
    Some((0.5 * (r + params.q(lambda))) / (mean + gap))
}

/// The two radii `(h0, 1/h0)` of the circles in which the generic family meets `y1 = 0`.
pub fn linf_radii(surface: &Surface, lambda: f64) -> Result<(f64, f64), ConicError> {
    let f = surface.f(lambda);
    let d = surface.disc(lambda);
    if !(f > 0.0) || !(d > 0.0) || lambda == surface.lambda0() {
        return Err(ConicError::OutOfDomain { lambda });
    }
    let s = f.sqrt();
    let big = surface.q(lambda) + d.sqrt();
    Ok((big / s, s / big))
}

/// The two points `x2 = ((-Q ± sqrt(Q^2-f)) / sqrt(f)) e^{-iθ}` on `y1 = 0`.
pub fn linf_points(surface: &Surface, lambda: f64, theta: f64) -> Result<(C, C), ConicError> {
    let (h, hinv) = linf_radii(surface, lambda)?;
    let rot = C::from_polar(1.0, -theta);
    Ok((-hinv * rot, -h * rot))
}

/// Flat export of one conic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConicRecord {
    pub lambda: f64,
    pub theta_or_alpha: f64,
    #[serde(rename = "type")]
    pub kind: TouchingKind,
    /// Row-major `(re, im)` pairs of the normalized matrix.
    pub entries: Vec<[f64; 2]>,
    pub det: [f64; 2],
    pub min_real_form: Option<f64>,
}

impl ConicRecord {
    pub fn new(
        conic: &ConicCoeffs,
        lambda: f64,
        theta_or_alpha: f64,
        kind: TouchingKind,
        min_form: Option<f64>,
    ) -> Self {
        let det = conic.det();
        Self {
            lambda,
            theta_or_alpha,
            kind,
            entries: conic
                .matrix()
                .iter()
                .flatten()
                .map(|z| [z.re, z.im])
                .collect(),
            det: [det.re, det.im],
            min_real_form: min_form,
        }
    }
}

/// Sample sizes and acceptance tolerances for sweeping the generic and special families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub lambda_samples: usize,
    pub theta_samples: usize,
    pub residual_tol: f64,
    pub det_tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            lambda_samples: 8,
            theta_samples: 24,
            residual_tol: 1e-8,
            det_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: ConicType,
    pub interval: IntervalLabel,
    pub lambda: f64,
    pub theta: f64,
    pub kind: TouchingKind,
    /// Both branch restrictions have the contact pattern of the family.
    pub structure_ok: bool,
    pub max_residual: f64,
    pub det_rel_error: f64,
    pub min_real_form: f64,
    pub pass: bool,
}

/// `n` interior sample points of an interval; unbounded ends are sampled at
/// distances `0.1 * 2^k` from the finite end.
pub fn interval_samples(iv: &OpenInterval, n: usize) -> Vec<f64> {
    match (iv.lo.is_finite(), iv.hi.is_finite()) {
        (true, true) => (0..n)
            .map(|k| iv.lo + (iv.hi - iv.lo) * (k as f64 + 0.5) / n as f64)
            .collect(),
        (true, false) => (0..n).map(|k| iv.lo + 0.1 * 2f64.powi(k as i32)).collect(),
        (false, true) => (0..n).map(|k| iv.hi - 0.1 * 2f64.powi(k as i32)).collect(),
        (false, false) => Vec::new(),
    }
}

fn structure_ok(family: ConicType, report: &TangencyReport, tol: f64) -> bool {
    match family {
        ConicType::Generic => {
            report.kind == TouchingKind::Generic
                && report
                    .branches
                    .iter()
                    .all(|b| b.two_double_roots == Some(true))
        }
        ConicType::Special => {
            report.kind == TouchingKind::Special
                && report.branches.iter().all(|b| {
                    let affine: Vec<usize> = b
                        .contacts
                        .iter()
                        .filter(|c| matches!(c.point, ContactPoint::Affine { .. }))
                        .map(|c| c.multiplicity)
                        .collect();
                    affine == [2] && b.cubic_discriminant.is_some_and(|d| d < tol)
                })
        }
        ConicType::Orbit => report.kind == TouchingKind::Orbit,
    }
}

/// Builds one generic or special conic and certifies its contact structure,
/// determinant and absence of real points.
#[allow(clippy::too_many_arguments)]
pub fn sweep_row(
    surface: &Surface,
    family: ConicType,
    interval: IntervalLabel,
    lambda: f64,
    theta: f64,
    sweep: &SweepConfig,
    touch: &TouchConfig,
    sampler: &SamplerConfig,
) -> Result<SweepRow, ConicError> {
    let params = surface.params();
    let (conic, expected_det) = match family {
        ConicType::Generic => {
            let d = surface.disc(lambda);
            (generic_conic(surface, lambda, theta)?, -2.0 * d * d)
        }
        ConicType::Special => (
            special_conic(params, lambda, theta)?,
            -(surface.q(lambda) + surface.disc(lambda).sqrt()) / 8.0,
        ),
        ConicType::Orbit => return Err(ConicError::OrbitFamily),
    };
    let report = verify_touching(&conic, params, lambda, touch)?;
    let det_rel_error = (conic.raw_det() - expected_det).norm() / expected_det.abs();
    let min_form = min_real_form(&conic, sampler)?;
    let ok = structure_ok(family, &report, sweep.residual_tol);
    let max_residual = report.max_residual();
    Ok(SweepRow {
        family,
        interval,
        lambda,
        theta,
        kind: report.kind,
        structure_ok: ok,
        max_residual,
        det_rel_error,
        min_real_form: min_form,
        pass: ok
            && max_residual < sweep.residual_tol
            && det_rel_error < sweep.det_tol
            && min_form > 0.0,
    })
}

/// Builds every generic conic over `I2, I4-, I4+` and every special conic over
/// `I1, I3` on a `(λ, θ)` grid and certifies contact structure, determinant and
/// absence of real points.
pub fn family_sweep(
    surface: &Surface,
    sweep: &SweepConfig,
    touch: &TouchConfig,
    sampler: &SamplerConfig,
) -> Result<Vec<SweepRow>, ConicError> {
    use rayon::prelude::*;
    let families = [
        (ConicType::Special, IntervalLabel::I1),
        (ConicType::Orbit, IntervalLabel::I2),
        (ConicType::Special, IntervalLabel::I3),
        (ConicType::Generic, IntervalLabel::I4Minus),
        (ConicType::Generic, IntervalLabel::I4Plus),
    ];
    let thetas: Vec<f64> = (0..sweep.theta_samples)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / sweep.theta_samples as f64)
        .collect();
    let mut tasks = Vec::new();
    for (family, label) in families {
        // the generic family also lives over I2
        let family = if label == IntervalLabel::I2 {
            ConicType::Generic
        } else {
            family
        };
        for lambda in interval_samples(&surface.interval(label), sweep.lambda_samples) {
            for &theta in &thetas {
                tasks.push((family, label, lambda, theta));
            }
        }
    }
    tasks
        .par_iter()
        .map(|&(family, interval, lambda, theta)| {
            sweep_row(
                surface, family, interval, lambda, theta, sweep, touch, sampler,
            )
        })
        .collect()
}

/// Certificate sign of the orbit conic for each `α`: `true` when no real point is certified.
pub fn orbit_certificates(
    alphas: &[f64],
    sampler: &SamplerConfig,
) -> Result<Vec<(f64, bool)>, ConicError> {
    alphas
        .iter()
        .map(|&a| Ok((a, min_real_form(&orbit_conic(a)?, sampler)? > 0.0)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{find_valid_params, SearchConfig, ValidationConfig};
    use nalgebra::{Matrix3, SymmetricEigen};
    use proptest::prelude::*;
    use std::f64::consts::PI;
    use std::sync::OnceLock;

    fn surface() -> &'static Surface {
        static S: OnceLock<Surface> = OnceLock::new();
        S.get_or_init(|| {
            let p = find_valid_params(&SearchConfig::default()).unwrap();
            Surface::new(p, &ValidationConfig::default()).unwrap()
        })
    }

    /// Independent oracle: the real form is a real quadratic form in
    /// `(y1, Re y2, Im y2)`; its least eigenvalue is the exact minimum on the sphere.
    fn exact_min(conic: &ConicCoeffs) -> f64 {
        let kappa = conic.reality_factor(1e-9).unwrap();
        let omega = kappa.conj().sqrt();
        let basis = [
            [C::new(1.0, 0.0), ZERO, ZERO],
            [ZERO, C::new(1.0, 0.0), C::new(1.0, 0.0)],
            [ZERO, C::new(0.0, 1.0), C::new(0.0, -1.0)],
        ];
        let bilinear = |u: [C; 3], v: [C; 3]| {
            let s: C = (0..3)
                .flat_map(|i| (0..3).map(move |j| (i, j)))
                .map(|(i, j)| conic.matrix()[i][j] * u[i] * v[j])
                .sum();
            (s / omega).re
        };
        let s = Matrix3::from_fn(|i, j| bilinear(basis[i], basis[j]));
        let lo = SymmetricEigen::new(s).eigenvalues.min();
        let hi = SymmetricEigen::new(-s).eigenvalues.min();
        lo.max(hi)
    }

    #[test]
    fn branch_factors_on_i2_are_positive() {
        let s = surface();
        let (gm, gp) = branch_factors(s, -0.5, 1e-12).unwrap();
        assert!(gm.im == 0.0 && gp.im == 0.0 && gm.re > 0.0 && gp.re > 0.0);
        let (gm, gp) = branch_factors(s, -2.0, 1e-12).unwrap();
        assert_eq!(gp, gm.conj());
        assert!(matches!(
            branch_factors(s, s.lambda0(), 1e-12),
            Err(ConicError::DegeneratePlane { .. })
        ));
    }

    #[test]
    fn generic_determinant_closed_form() {
        let s = surface();
        for lambda in [-0.7, -0.2, 1.3, 3.0] {
            let c = generic_conic(s, lambda, 0.4).unwrap();
            let d = s.disc(lambda);
            let expected = -2.0 * d * d;
            assert!((c.raw_det() - expected).norm() <= 1e-9 * expected.abs());
        }
    }

    #[test]
    fn generic_conic_domain() {
        let s = surface();
        assert!(matches!(
            generic_conic(s, -2.0, 0.0),
            Err(ConicError::NoGenericFamily { .. })
        ));
        assert!(matches!(
            generic_conic(s, s.lambda0(), 0.0),
            Err(ConicError::NoGenericFamily { .. })
        ));
    }

    #[test]
    fn generic_periodic_in_theta() {
        let s = surface();
        let a = generic_conic(s, 1.5, 0.3).unwrap();
        let b = generic_conic(s, 1.5, 0.3 + 2.0 * PI).unwrap();
        for (x, y) in a.matrix().iter().flatten().zip(b.matrix().iter().flatten()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn generic_conic_touches() {
        let s = surface();
        let c = generic_conic(s, 1.5, 0.0).unwrap();
        let r = verify_touching(&c, s.params(), 1.5, &TouchConfig::default()).unwrap();
        assert_eq!(r.kind, TouchingKind::Generic);
        for b in &r.branches {
            assert_eq!(b.two_double_roots, Some(true));
            assert_eq!(b.contacts.len(), 2);
            assert!(b.contacts.iter().all(|c| c.multiplicity == 2));
        }
    }

    #[test]
    fn special_conic_properties() {
        let s = surface();
        for lambda in [-3.0, -1.5, 0.3, 0.8] {
            let c = special_conic(s.params(), lambda, 1.1).unwrap();
            let m = c.matrix();
            assert_eq!(m[1][1], ZERO);
            assert_eq!(m[2][2], ZERO);
            let expected = -(s.q(lambda) + s.disc(lambda).sqrt()) / 8.0;
            assert!(expected < 0.0);
            assert!((c.raw_det() - expected).norm() <= 1e-9 * expected.abs());
            let r = verify_touching(&c, s.params(), lambda, &TouchConfig::default()).unwrap();
            assert_eq!(r.kind, TouchingKind::Special);
            assert_eq!(r.pinf_multiplicity, 2);
            for b in &r.branches {
                assert!(b.cubic_discriminant.unwrap() < 1e-9);
                let doubles: Vec<_> = b
                    .contacts
                    .iter()
                    .filter(|c| matches!(c.point, ContactPoint::Affine { .. }))
                    .collect();
                assert_eq!(doubles.len(), 1);
                assert_eq!(doubles[0].multiplicity, 2);
            }
        }
        assert!(matches!(
            special_conic(s.params(), -0.5, 0.0),
            Err(ConicError::NoSpecialFamily { .. })
        ));
    }

    #[test]
    fn orbit_conic_reality() {
        let neg = orbit_conic(-1.0).unwrap();
        assert!(min_real_form(&neg, &SamplerConfig::default()).unwrap() > 0.0);
        let pos = orbit_conic(1.0).unwrap();
        assert!(min_real_form(&pos, &SamplerConfig::default()).unwrap() <= 0.0);
        // the point (1 : 1 : 1) is real and on y2 y3 = y1^2
        assert_eq!(pos.evaluate([C::new(1.0, 0.0); 3]), ZERO);
        assert!(matches!(orbit_conic(0.0), Err(ConicError::ZeroAlpha)));
    }

    #[test]
    fn orbit_conic_is_rotation_invariant() {
        let c = orbit_conic(0.7).unwrap();
        let y = [C::new(0.3, 0.0), C::new(0.2, 0.9), C::new(-1.1, 0.4)];
        let rot = C::from_polar(1.0, 0.77);
        let yr = [y[0], y[1] * rot, y[2] * rot.conj()];
        assert!((c.evaluate(y) - c.evaluate(yr)).norm() < 1e-14);
    }

    #[test]
    fn orbit_containment_boundary() {
        let s = surface();
        let lambda = -0.5;
        let (q, sf) = (s.q(lambda), s.f(lambda).sqrt());
        let cfg = TouchConfig::default();
        for alpha in [-q + sf, -q - sf] {
            let r =
                verify_touching(&orbit_conic(alpha).unwrap(), s.params(), lambda, &cfg).unwrap();
            assert_eq!(r.kind, TouchingKind::ContainedInB);
        }
        for alpha in [-q + sf + 1e-6, -q + sf - 1e-6, 0.5, -q] {
            let r =
                verify_touching(&orbit_conic(alpha).unwrap(), s.params(), lambda, &cfg).unwrap();
            assert_eq!(r.kind, TouchingKind::Orbit);
            assert_eq!((r.pinf_multiplicity, r.pinfbar_multiplicity), (4, 4));
        }
    }

    #[test]
    fn random_conics_do_not_touch() {
        use rand::{Rng, SeedableRng};
        let s = surface();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let mut r = || C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let q = AffineConic {
                a: r(),
                b: r(),
                c: r(),
                d: r(),
                e: r(),
                h: r(),
            };
            let c = ConicCoeffs::from_affine(q).unwrap();
            let rep = verify_touching(&c, s.params(), 1.5, &TouchConfig::default()).unwrap();
            assert_eq!(rep.kind, TouchingKind::NotTouching);
        }
    }

    #[test]
    fn two_branch_tangency_forces_double_line() {
        use rand::{Rng, SeedableRng};
        let s = surface();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for lambda in [-0.6, 1.4, 3.5] {
            let (gm, gp) = branch_pair(s.params(), lambda);
            for _ in 0..10 {
                let mut r = || C::new(rng.random_range(0.2..1.0), rng.random_range(-1.0..1.0));
                let (b, c, d) = (r(), r(), r());
                // 4bc(a - g e) = b^3 - 8 g c^2 d for both g, solved as a linear system in (a, e)
                let rhs = |g: C| b * b * b - 8.0 * g * c * c * d;
                let (m11, m12, m21, m22) = (
                    4.0 * b * c,
                    -4.0 * b * c * gm,
                    4.0 * b * c,
                    -4.0 * b * c * gp,
                );
                let det = m11 * m22 - m12 * m21;
                let a = (rhs(gm) * m22 - m12 * rhs(gp)) / det;
                let e = (m11 * rhs(gp) - m21 * rhs(gm)) / det;
                let h = c * d * d / (b * b);
                let conic = ConicCoeffs::from_affine(AffineConic { a, b, c, d, e, h }).unwrap();
                assert!(conic.det().norm() < 1e-10, "det {}", conic.det());
            }
        }
    }

    #[test]
    fn sweep_certifies_both_families() {
        let s = surface();
        let sweep = SweepConfig {
            lambda_samples: 3,
            theta_samples: 4,
            ..SweepConfig::default()
        };
        let rows = family_sweep(
            s,
            &sweep,
            &TouchConfig::default(),
            &SamplerConfig::default(),
        )
        .unwrap();
        assert_eq!(rows.len(), 5 * 3 * 4);
        assert!(
            rows.iter().all(|r| r.pass),
            "{:?}",
            rows.iter().find(|r| !r.pass)
        );
    }

    #[test]
    fn samples_stay_inside() {
        for iv in [
            OpenInterval::new(-1.0, 0.0),
            OpenInterval::new(f64::NEG_INFINITY, -1.0),
            OpenInterval::new(2.0, f64::INFINITY),
        ] {
            let xs = interval_samples(&iv, 8);
            assert_eq!(xs.len(), 8);
            assert!(xs.iter().all(|&x| iv.contains(x)));
        }
    }

    #[test]
    fn non_real_conic_rejected() {
        let c = ConicCoeffs::from_affine(AffineConic {
            a: C::new(1.0, 0.0),
            b: ZERO,
            c: C::new(2.0, 0.0),
            d: ZERO,
            e: ZERO,
            h: C::new(1.0, 0.0),
        })
        .unwrap();
        assert!(matches!(
            min_real_form(&c, &SamplerConfig::default()),
            Err(ConicError::NotReal)
        ));
    }

    #[test]
    fn linf_radii_examples() {
        let s = surface();
        for lambda in [-0.9, -0.3, 1.2, 5.0] {
            let (h, hinv) = linf_radii(s, lambda).unwrap();
            assert!((h * hinv - 1.0).abs() < 1e-14);
            assert!(h > 1.0 && hinv < 1.0 && hinv > 0.0);
            let gamma = s.q(lambda).powi(2) / s.f(lambda);
            assert!((h - (gamma.sqrt() + (gamma - 1.0).sqrt())).abs() < 1e-9 * h);
            // the points lie on the conic's intersection with y1 = 0
            let theta = 0.9;
            let c = generic_conic(s, lambda, theta).unwrap();
            let (p, q) = linf_points(s, lambda, theta).unwrap();
            for x in [p, q] {
                assert!(
                    c.evaluate([ZERO, x, C::new(1.0, 0.0)]).norm() < 1e-9 * (1.0 + x.norm_sqr())
                );
            }
        }
        assert!(linf_radii(s, -2.0).is_err());
        let near = linf_radii(s, -1.0 + 1e-8).unwrap().0;
        assert!(near > 1e3);
    }

    #[test]
    fn min_real_form_escapes_pole_saddle() {
        // near λ0 the pole y1 = ±1 is a saddle of the generic form lying below every
        // coarse-grid sample of the true minimum on y1 = 0
        let s = surface();
        let lambda = 1.0 + (s.lambda0() - 1.0) * 0.968747097097695;
        let c = generic_conic(s, lambda, 3.578844392407366).unwrap();
        let m = min_real_form(&c, &SamplerConfig::default()).unwrap();
        let bound = 2.0 * generic_form_bound(s.params(), lambda) / c.scale();
        assert!(bound < 2.0 * s.disc(lambda) / c.scale());
        assert!((m - bound).abs() <= 1e-9 * (1.0 + bound));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn generic_family_certified(t in 0.02f64..0.98, theta in 0.0f64..(2.0 * PI), piece in 0usize..3) {
            let s = surface();
            let l0 = s.lambda0();
            let lambda = match piece {
                0 => -1.0 + t,
                1 => 1.0 + (l0 - 1.05) * t,
                _ => l0 + 0.05 + 6.0 * t,
            };
            let c = generic_conic(s, lambda, theta).unwrap();
            prop_assert!(c.is_real(1e-12));
            let r = verify_touching(&c, s.params(), lambda, &TouchConfig::default()).unwrap();
            prop_assert_eq!(r.kind, TouchingKind::Generic);
            let m = min_real_form(&c, &SamplerConfig::default()).unwrap();
            let exact = exact_min(&c);
            let bound = 2.0 * generic_form_bound(s.params(), lambda) / c.scale();
            prop_assert!(m > 0.0);
            prop_assert!((m - exact).abs() <= 1e-9 * (1.0 + exact.abs()), "m {} exact {}", m, exact);
            prop_assert!((exact - bound).abs() <= 1e-9 * (1.0 + bound.abs()));
        }

        #[test]
        fn special_family_certified(t in 0.02f64..0.98, theta in 0.0f64..(2.0 * PI), left in any::<bool>()) {
            let s = surface();
            let lambda = if left { -1.0 - 8.0 * t } else { t };
            let c = special_conic(s.params(), lambda, theta).unwrap();
            prop_assert!(c.is_real(1e-12));
            let r = verify_touching(&c, s.params(), lambda, &TouchConfig::default()).unwrap();
            prop_assert_eq!(r.kind, TouchingKind::Special);
            let m = min_real_form(&c, &SamplerConfig::default()).unwrap();
            let bound = special_form_bound(s.params(), lambda).unwrap() / c.scale();
            prop_assert!(m > 0.0);
            prop_assert!((m - exact_min(&c)).abs() <= 1e-9);
            prop_assert!((m - bound).abs() <= 1e-9);
        }

        #[test]
        fn orbit_certificate_sign(alpha in -5.0f64..5.0) {
            prop_assume!(alpha.abs() > 1e-9);
            let m = min_real_form(&orbit_conic(alpha).unwrap(), &SamplerConfig::default()).unwrap();
            prop_assert_eq!(m > 0.0, alpha < 0.0);
        }
    }
}
