//! The quartic branch surface
//! `(y2 y3 + Q(y0, y1))^2 - y0 y1 (y0 + y1)(a y0 - b y1) = 0`,
//! its restriction to the invariant planes `y0 = λ y1`, parameter validation
//! and the singular-locus report.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{golden_min, refined_minima};
use crate::poly::{all_roots, PolyError, RealPolynomial, RootCluster, RootConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("a and b must be positive and all parameters finite (a = {a}, b = {b})")]
    InvalidParameters { a: f64, b: f64 },
    #[error("the discriminant Q^2 - f has no unique real double root: {0}")]
    NoDoubleRoot(String),
    #[error("parameters fail validation: {0}")]
    NotValid(String),
    #[error("parameter search exhausted without an admissible candidate{}", near_miss_text(.0))]
    NotFound(Option<NearMiss>),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

fn near_miss_text(n: &Option<NearMiss>) -> String {
    match n {
        Some(n) => format!(
            "; best near miss {:?} with margin {:.3e} violated at λ = {}",
            n.params, n.margin, n.violating_lambda
        ),
        None => String::new(),
    }
}

/// Coefficients of `Q(y0, y1) = q0 y0^2 + q1 y0 y1 + q2 y1^2` and the positive constants `a`, `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceParams {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
    pub a: f64,
    pub b: f64,
}

impl SurfaceParams {
    pub fn new(q0: f64, q1: f64, q2: f64, a: f64, b: f64) -> Result<Self, SurfaceError> {
        let p = Self { q0, q1, q2, a, b };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<(), SurfaceError> {
        let finite = [self.q0, self.q1, self.q2, self.a, self.b]
            .iter()
            .all(|x| x.is_finite());
        if !finite || self.a <= 0.0 || self.b <= 0.0 {
            return Err(SurfaceError::InvalidParameters {
                a: self.a,
                b: self.b,
            });
        }
        Ok(())
    }

    /// `f(λ) = λ(λ+1)(aλ-b)`, evaluated in factored form.
    pub fn f(&self, lambda: f64) -> f64 {
        lambda * (lambda + 1.0) * (self.a * lambda - self.b)
    }

    pub fn f_prime(&self, lambda: f64) -> f64 {
        (3.0 * self.a * lambda + 2.0 * (self.a - self.b)) * lambda - self.b
    }

    /// `Q(λ, 1)`.
    pub fn q(&self, lambda: f64) -> f64 {
        (self.q0 * lambda + self.q1) * lambda + self.q2
    }

    pub fn q_prime(&self, lambda: f64) -> f64 {
        2.0 * self.q0 * lambda + self.q1
    }

    /// `Q(λ,1)^2 - f(λ)`.
    pub fn disc(&self, lambda: f64) -> f64 {
        let q = self.q(lambda);
        q * q - self.f(lambda)
    }

    pub fn disc_prime(&self, lambda: f64) -> f64 {
        2.0 * self.q(lambda) * self.q_prime(lambda) - self.f_prime(lambda)
    }

    pub fn b_over_a(&self) -> f64 {
        self.b / self.a
    }
}

pub fn f_poly(p: &SurfaceParams) -> RealPolynomial {
    RealPolynomial::new(vec![0.0, -p.b, p.a - p.b, p.a])
}

pub fn q_restricted(p: &SurfaceParams) -> RealPolynomial {
    RealPolynomial::new(vec![p.q2, p.q1, p.q0])
}

pub fn discriminant_poly(p: &SurfaceParams) -> RealPolynomial {
    let q = q_restricted(p);
    q.clone() * q - f_poly(p)
}

mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("bad bound {other}"))),
            },
        }
    }
}

/// An open interval of the real line; either bound may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpenInterval {
    #[serde(with = "extended_f64")]
    pub lo: f64,
    #[serde(with = "extended_f64")]
    pub hi: f64,
}

impl OpenInterval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

/// Labels for the pieces of the λ-line cut at `-1, 0, b/a, λ0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IntervalLabel {
    I1,
    I2,
    I3,
    /// `(b/a, ∞)` as a whole.
    I4,
    I4Minus,
    I4Plus,
}

impl IntervalLabel {
    pub fn name(self) -> &'static str {
        match self {
            Self::I1 => "I1",
            Self::I2 => "I2",
            Self::I3 => "I3",
            Self::I4 => "I4",
            Self::I4Minus => "I4minus",
            Self::I4Plus => "I4plus",
        }
    }
}

impl std::fmt::Display for IntervalLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalPartition {
    pub lambda0: f64,
    pub i1: OpenInterval,
    pub i2: OpenInterval,
    pub i3: OpenInterval,
    pub i4_minus: OpenInterval,
    pub i4_plus: OpenInterval,
}

impl IntervalPartition {
    pub fn new(params: &SurfaceParams, lambda0: f64) -> Self {
        let r = params.b_over_a();
        Self {
            lambda0,
            i1: OpenInterval::new(f64::NEG_INFINITY, -1.0),
            i2: OpenInterval::new(-1.0, 0.0),
            i3: OpenInterval::new(0.0, r),
            i4_minus: OpenInterval::new(r, lambda0),
            i4_plus: OpenInterval::new(lambda0, f64::INFINITY),
        }
    }

    pub fn get(&self, label: IntervalLabel) -> OpenInterval {
        match label {
            IntervalLabel::I1 => self.i1,
            IntervalLabel::I2 => self.i2,
            IntervalLabel::I3 => self.i3,
            IntervalLabel::I4 => OpenInterval::new(self.i4_minus.lo, f64::INFINITY),
            IntervalLabel::I4Minus => self.i4_minus,
            IntervalLabel::I4Plus => self.i4_plus,
        }
    }

    /// The fine label (never `I4`) containing `λ`, if any.
    pub fn locate(&self, lambda: f64) -> Option<IntervalLabel> {
        [
            IntervalLabel::I1,
            IntervalLabel::I2,
            IntervalLabel::I3,
            IntervalLabel::I4Minus,
            IntervalLabel::I4Plus,
        ]
        .into_iter()
        .find(|&l| self.get(l).contains(lambda))
    }
}

/// Grid settings for the validation oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Largest allowed grid spacing.
    pub spacing: f64,
    /// The grid covers `[-margin, max(λ0, b/a) + margin]`.
    pub margin: f64,
    /// Values of `Q^2 - f` above `-floor` count as nonnegative.
    pub floor: f64,
    /// Half-width of the neighbourhood of λ0 where `Q - sqrt(f)` is certified through `Q > 0`.
    pub lambda0_exclusion: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            spacing: 1e-4,
            margin: 10.0,
            floor: 1e-9,
            lambda0_exclusion: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationConfig {
    pub roots: RootConfig,
    pub grid: GridConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// The unique double root, reported on success.
    DoubleRoot {
        lambda: f64,
    },
    NegativeDiscriminant {
        lambda: f64,
        value: f64,
    },
    /// Real roots of `Q^2 - f` do not form a single double root.
    RootStructure {
        real_roots: Vec<(f64, usize)>,
    },
    ReducedDegree {
        q0: f64,
    },
    BelowSqrtF {
        lambda: f64,
        q: f64,
        sqrt_f: f64,
    },
    NegativeLeading {
        q0: f64,
    },
    Lambda0Outside {
        lambda0: f64,
        b_over_a: f64,
        hint: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub passed: bool,
    pub witness: Option<Witness>,
}

impl Check {
    fn pass(witness: Option<Witness>) -> Self {
        Self {
            passed: true,
            witness,
        }
    }

    fn fail(witness: Witness) -> Self {
        Self {
            passed: false,
            witness: Some(witness),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub condition_i: Check,
    pub condition_star: Check,
    pub lambda0_in_i4: Check,
    pub lambda0: Option<f64>,
    pub f_at_lambda0: Option<f64>,
    pub q_at_lambda0: Option<f64>,
    /// Smallest value of `Q^2 - f` at refined local minima away from λ0.
    pub discriminant_margin: f64,
    /// Smallest value of `Q - sqrt(f)` over `f >= 0` away from λ0.
    pub star_margin: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.condition_i.passed && self.condition_star.passed && self.lambda0_in_i4.passed
    }

    fn first_failure(&self) -> String {
        [
            ("condition (i)", &self.condition_i),
            ("condition (*)", &self.condition_star),
            ("λ0 in I4", &self.lambda0_in_i4),
        ]
        .iter()
        .find(|(_, c)| !c.passed)
        .map(|(name, c)| format!("{name} fails: {:?}", c.witness))
        .unwrap_or_default()
    }
}

fn grid_points(lo: f64, hi: f64, spacing: f64) -> usize {
    (((hi - lo) / spacing).ceil() as usize + 1).max(3)
}

fn polish_double_root(params: &SurfaceParams, mut x: f64) -> f64 {
    let dpoly = discriminant_poly(params).derivative();
    let ddpoly = dpoly.derivative();
    for _ in 0..20 {
        let d2 = ddpoly.evaluate(x);
        if d2 == 0.0 {
            break;
        }
        let next = x - dpoly.evaluate(x) / d2;
        if !next.is_finite() || next == x {
            break;
        }
        x = next;
    }
    x
}

struct DoubleRootSearch {
    lambda0: Option<f64>,
    real_roots: Vec<(f64, usize)>,
}

fn find_double_root(
    params: &SurfaceParams,
    cfg: &RootConfig,
) -> Result<DoubleRootSearch, SurfaceError> {
    let d = discriminant_poly(params);
    if d.degree().unwrap_or(0) == 0 {
        return Ok(DoubleRootSearch {
            lambda0: None,
            real_roots: Vec::new(),
        });
    }
    let real: Vec<(f64, usize)> = all_roots(&d, cfg)?
        .into_iter()
        .filter(RootCluster::is_real)
        .map(|c| (c.value.re, c.multiplicity))
        .collect();
    let lambda0 = match real.as_slice() {
        [(x, 2)] => Some(polish_double_root(params, *x)),
        _ => None,
    };
    Ok(DoubleRootSearch {
        lambda0,
        real_roots: real,
    })
}

fn check_condition_i(
    params: &SurfaceParams,
    cfg: &ValidationConfig,
    search: &DoubleRootSearch,
    top: f64,
) -> (Check, f64) {
    let g = &cfg.grid;
    let lo = -g.margin;
    let hi = top + g.margin;
    let n = grid_points(lo, hi, g.spacing);
    let minima = refined_minima(|x| params.disc(x), lo, hi, n);
    let away: Vec<(f64, f64)> = minima
        .iter()
        .copied()
        .filter(|(x, _)| {
            search
                .lambda0
                .is_none_or(|l0| (x - l0).abs() > g.lambda0_exclusion)
        })
        .collect();
    let margin = away.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
    let worst = minima
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((lo, params.disc(lo)));

    if params.q0 == 0.0 {
        let w = if worst.1 < 0.0 {
            Witness::NegativeDiscriminant {
                lambda: worst.0,
                value: worst.1,
            }
        } else {
            Witness::ReducedDegree { q0: params.q0 }
        };
        return (Check::fail(w), margin);
    }
    if worst.1 < -g.floor {
        return (
            Check::fail(Witness::NegativeDiscriminant {
                lambda: worst.0,
                value: worst.1,
            }),
            margin,
        );
    }
    let Some(l0) = search.lambda0 else {
        return (
            Check::fail(Witness::RootStructure {
                real_roots: search.real_roots.clone(),
            }),
            margin,
        );
    };
    // away from the double root the discriminant must stay strictly positive
    if let Some(&(x, v)) = away.iter().find(|m| m.1 <= g.floor) {
        return (
            Check::fail(Witness::NegativeDiscriminant {
                lambda: x,
                value: v,
            }),
            margin,
        );
    }
    (
        Check::pass(Some(Witness::DoubleRoot { lambda: l0 })),
        margin,
    )
}

fn check_condition_star(
    params: &SurfaceParams,
    cfg: &ValidationConfig,
    lambda0: Option<f64>,
    top: f64,
) -> (Check, f64) {
    let g = &cfg.grid;
    let r = params.b_over_a();
    let hi = top + g.margin;
    let margin_fn = |x: f64| params.q(x) - params.f(x).max(0.0).sqrt();

    // pieces of {f >= 0} with the λ0 neighbourhood cut out
    let mut pieces: Vec<(f64, f64)> = vec![(-1.0, 0.0)];
    let mut near: Option<(f64, f64)> = None;
    match lambda0 {
        Some(l0) if l0 - g.lambda0_exclusion > r && l0 + g.lambda0_exclusion < hi => {
            pieces.push((r, l0 - g.lambda0_exclusion));
            pieces.push((l0 + g.lambda0_exclusion, hi));
            near = Some((l0 - g.lambda0_exclusion, l0 + g.lambda0_exclusion));
        }
        _ => pieces.push((r, hi)),
    }

    let mut worst = (f64::NAN, f64::INFINITY);
    for (lo, hi) in pieces {
        let n = grid_points(lo, hi, g.spacing);
        for (x, v) in refined_minima(margin_fn, lo, hi, n) {
            if v < worst.1 {
                worst = (x, v);
            }
        }
    }
    // the roots of f themselves and their immediate neighbourhoods
    for root in [-1.0, 0.0, r] {
        for x in [root, root - 1e-9, root + 1e-9] {
            if params.f(x) >= 0.0 {
                let v = margin_fn(x);
                if v < worst.1 {
                    worst = (x, v);
                }
            }
        }
    }
    let margin = worst.1;
    let fail_at = |x: f64| {
        Check::fail(Witness::BelowSqrtF {
            lambda: x,
            q: params.q(x),
            sqrt_f: params.f(x).max(0.0).sqrt(),
        })
    };
    if !(worst.1 > 0.0) {
        return (fail_at(worst.0), margin);
    }
    if let Some((lo, hi)) = near {
        let (x, v) = golden_min(|x| params.q(x), lo, hi, 1e-12);
        let v = v.min(params.q(lo)).min(params.q(hi));
        if v <= 0.0 {
            return (fail_at(x), margin);
        }
    }
    if params.q0 <= 0.0 {
        return (
            Check::fail(Witness::NegativeLeading { q0: params.q0 }),
            margin,
        );
    }
    (Check::pass(None), margin)
}

/// Checks the admissibility conditions on a parameter set.
pub fn validate(
    params: &SurfaceParams,
    cfg: &ValidationConfig,
) -> Result<ValidationReport, SurfaceError> {
    params.check()?;
    let search = find_double_root(params, &cfg.roots)?;
    let r = params.b_over_a();
    let top = search
        .real_roots
        .iter()
        .map(|x| x.0)
        .fold(r.max(0.0), f64::max);
    let (condition_i, discriminant_margin) = check_condition_i(params, cfg, &search, top);
    let lambda0 = if condition_i.passed {
        search.lambda0
    } else {
        None
    };
    let (condition_star, star_margin) = check_condition_star(params, cfg, lambda0, top);
    let lambda0_in_i4 = match lambda0 {
        Some(l0) if l0 > r => Check::pass(None),
        Some(l0) => Check::fail(Witness::Lambda0Outside {
            lambda0: l0,
            b_over_a: r,
            hint: "apply a real projective change of (y0, y1) permuting the zeros of \
                   y0 y1 (y0 + y1)(a y0 - b y1) so that the double root lies beyond b/a"
                .into(),
        }),
        None => Check {
            passed: false,
            witness: None,
        },
    };
    Ok(ValidationReport {
        condition_i,
        condition_star,
        lambda0_in_i4,
        lambda0,
        f_at_lambda0: lambda0.map(|l| params.f(l)),
        q_at_lambda0: lambda0.map(|l| params.q(l)),
        discriminant_margin,
        star_margin,
    })
}

/// The unique real double root of `Q^2 - f`.
pub fn lambda0(params: &SurfaceParams, cfg: &RootConfig) -> Result<f64, SurfaceError> {
    params.check()?;
    let search = find_double_root(params, cfg)?;
    search.lambda0.ok_or_else(|| {
        SurfaceError::NoDoubleRoot(format!(
            "real roots with multiplicity {:?}",
            search.real_roots
        ))
    })
}

/// A validated parameter set together with its interval partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Surface {
    params: SurfaceParams,
    partition: IntervalPartition,
    report: ValidationReport,
}

impl Surface {
    pub fn new(params: SurfaceParams, cfg: &ValidationConfig) -> Result<Self, SurfaceError> {
        let report = validate(&params, cfg)?;
        if !report.passed() {
            return Err(SurfaceError::NotValid(report.first_failure()));
        }
        let l0 = report.lambda0.expect("passed report carries λ0");
        Ok(Self {
            params,
            partition: IntervalPartition::new(&params, l0),
            report,
        })
    }

    pub fn params(&self) -> &SurfaceParams {
        &self.params
    }

    pub fn partition(&self) -> &IntervalPartition {
        &self.partition
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn lambda0(&self) -> f64 {
        self.partition.lambda0
    }

    pub fn interval(&self, label: IntervalLabel) -> OpenInterval {
        self.partition.get(label)
    }

    pub fn f(&self, lambda: f64) -> f64 {
        self.params.f(lambda)
    }

    pub fn q(&self, lambda: f64) -> f64 {
        self.params.q(lambda)
    }

    pub fn disc(&self, lambda: f64) -> f64 {
        self.params.disc(lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "at", rename_all = "snake_case")]
pub enum SingularLocation {
    PInf,
    PInfBar,
    /// The point `(λ : 1 : 0 : 0)`.
    APoint {
        lambda: f64,
    },
    /// The point `(1 : 0 : 0 : 0)`, present only when `q0 = 0`.
    APointAtInfinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SingularType {
    EllipticE7,
    OrdinaryDoublePoint,
    NonOdp { multiplicity: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularPoint {
    pub location: SingularLocation,
    pub kind: SingularType,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularLocus {
    pub points: Vec<SingularPoint>,
    /// Multiple roots of `Q^2 - f` off the real line; they give no real A-point.
    pub complex_multiple_roots: Vec<RootCluster>,
}

fn a_point_type(multiplicity: usize) -> SingularType {
    if multiplicity == 2 {
        SingularType::OrdinaryDoublePoint
    } else {
        SingularType::NonOdp { multiplicity }
    }
}

pub fn singular_locus(
    params: &SurfaceParams,
    cfg: &RootConfig,
) -> Result<SingularLocus, SurfaceError> {
    params.check()?;
    let mut points = vec![
        SingularPoint {
            location: SingularLocation::PInf,
            kind: SingularType::EllipticE7,
        },
        SingularPoint {
            location: SingularLocation::PInfBar,
            kind: SingularType::EllipticE7,
        },
    ];
    let d = discriminant_poly(params);
    let mut complex_multiple_roots = Vec::new();
    if let Some(deg) = d.degree().filter(|&k| k >= 1) {
        for c in all_roots(&d, cfg)? {
            if c.multiplicity < 2 {
                continue;
            }
            if c.is_real() {
                let lambda = if c.multiplicity == 2 {
                    polish_double_root(params, c.value.re)
                } else {
                    c.value.re
                };
                points.push(SingularPoint {
                    location: SingularLocation::APoint { lambda },
                    kind: a_point_type(c.multiplicity),
                });
            } else {
                complex_multiple_roots.push(c);
            }
        }
        let at_infinity = 4 - deg.min(4);
        if at_infinity >= 2 {
            points.push(SingularPoint {
                location: SingularLocation::APointAtInfinity,
                kind: a_point_type(at_infinity),
            });
        }
    }
    Ok(SingularLocus {
        points,
        complex_multiple_roots,
    })
}

/// Inclusive sweep `lo..=hi` with `steps` samples; empty when `steps == 0` or `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Sweep {
    pub const fn fixed(x: f64) -> Self {
        Self {
            lo: x,
            hi: x,
            steps: 1,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 0 || !(self.lo <= self.hi) {
            return Vec::new();
        }
        crate::numeric::linspace(self.lo, self.hi, self.steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub a: Sweep,
    pub b: Sweep,
    /// Target double root; candidates with `λ0 <= b/a` are skipped.
    pub lambda0: f64,
    /// Sweep of the free coefficient `q0`.
    pub q0: Sweep,
    pub validation: ValidationConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            a: Sweep::fixed(1.0),
            b: Sweep::fixed(1.0),
            lambda0: 2.0,
            q0: Sweep {
                lo: 0.25,
                hi: 8.0,
                steps: 32,
            },
            validation: ValidationConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NearMiss {
    pub params: SurfaceParams,
    pub margin: f64,
    pub violating_lambda: f64,
}

/// The parameter set with `Q` tangent to `sqrt(f)` at `lambda0`, leaving `q0` free.
pub fn tangent_params(a: f64, b: f64, lambda0: f64, q0: f64) -> Option<SurfaceParams> {
    let base = SurfaceParams {
        q0: 0.0,
        q1: 0.0,
        q2: 0.0,
        a,
        b,
    };
    let f0 = base.f(lambda0);
    if !(f0 > 0.0) || base.check().is_err() {
        return None;
    }
    let c = f0.sqrt();
    let s = base.f_prime(lambda0) / (2.0 * c);
    Some(SurfaceParams {
        q0,
        q1: s - 2.0 * q0 * lambda0,
        q2: q0 * lambda0 * lambda0 - s * lambda0 + c,
        a,
        b,
    })
}

fn violating_lambda(report: &ValidationReport) -> f64 {
    [&report.condition_i, &report.condition_star]
        .iter()
        .filter(|c| !c.passed)
        .find_map(|c| match &c.witness {
            Some(Witness::NegativeDiscriminant { lambda, .. }) => Some(*lambda),
            Some(Witness::BelowSqrtF { lambda, .. }) => Some(*lambda),
            _ => None,
        })
        .unwrap_or(f64::NAN)
}

/// Sweeps the one-parameter family of tangent candidates in fixed order and
/// returns the first one that validates.
pub fn find_valid_params(search: &SearchConfig) -> Result<SurfaceParams, SurfaceError> {
    let mut candidates = Vec::new();
    for a in search.a.values() {
        for b in search.b.values() {
            if search.lambda0 <= b / a {
                continue;
            }
            for q0 in search.q0.values() {
                if let Some(p) = tangent_params(a, b, search.lambda0, q0) {
                    candidates.push(p);
                }
            }
        }
    }
    let found = candidates.par_iter().find_map_first(|p| {
        validate(p, &search.validation)
            .ok()
            .filter(ValidationReport::passed)
            .map(|_| *p)
    });
    if let Some(p) = found {
        return Ok(p);
    }
    let best = candidates
        .par_iter()
        .enumerate()
        .filter_map(|(k, p)| {
            let r = validate(p, &search.validation).ok()?;
            let margin = r.discriminant_margin.min(r.star_margin);
            Some((
                k,
                NearMiss {
                    params: *p,
                    margin,
                    violating_lambda: violating_lambda(&r),
                },
            ))
        })
        .reduce_with(|x, y| {
            if y.1.margin > x.1.margin || (y.1.margin == x.1.margin && y.0 < x.0) {
                y
            } else {
                x
            }
        })
        .map(|x| x.1);
    Err(SurfaceError::NotFound(best))
}

/// `Q(λ,1) ± sqrt(f(λ))` as complex numbers, minus branch first.
pub fn branch_pair(params: &SurfaceParams, lambda: f64) -> (Complex64, Complex64) {
    let q = Complex64::new(params.q(lambda), 0.0);
    let s = Complex64::new(params.f(lambda), 0.0).sqrt();
    (q - s, q + s)
}
