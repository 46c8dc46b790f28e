//! Critical points and endpoint limits of the radius functions, the tables
//! they are expected to reproduce, and the normal-bundle verdicts read off them.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::bisect;
use crate::resolution::{DomainError, LinearForm, RadiusFn, ResolutionChoice};
use crate::surface::{IntervalLabel, OpenInterval, Surface, SurfaceParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("only {valid} usable samples on ({lo}, {hi})")]
    InsufficientDomain { lo: f64, hi: f64, valid: usize },
    #[error("critical-point count did not stabilise under grid doubling: {counts:?}")]
    Unstable { counts: Vec<usize> },
    #[error("limit {approach} is not classifiable from {values:?}")]
    Unclassifiable { approach: String, values: Vec<f64> },
    #[error("expected a unique critical point of h0 on I2, found {0}")]
    NoUniqueCritical(usize),
    #[error("no partner found for λ = {0}")]
    NoPartner(f64),
    #[error("λ = {lambda} is outside the domain of {function}")]
    OutsideDomain { function: RadiusFn, lambda: f64 },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Base number of uniform samples; doubled until the count is stable.
    pub grid: usize,
    /// Width to which sign changes of the derivative are bisected.
    pub tol: f64,
    /// Central-difference step relative to `1 + |λ|`.
    pub step_rel: f64,
    pub max_doublings: usize,
    /// Largest `|λ|` sampled on unbounded intervals.
    pub tail: f64,
    /// Geometric samples at distances `10^-2 .. 10^-edge_decades` from finite endpoints.
    pub edge_decades: u32,
    pub lambda0_exclusion: f64,
    /// A `λ` this close to a critical point gets a degenerate verdict.
    pub verdict_tol: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            grid: 400,
            tol: 1e-9,
            step_rel: 1e-6,
            max_doublings: 3,
            tail: 1e6,
            edge_decades: 9,
            lambda0_exclusion: 1e-3,
            verdict_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    pub interval: OpenInterval,
    pub count: usize,
    pub locations: Vec<f64>,
    pub brackets: Vec<[f64; 2]>,
    /// `|h'|` at each location.
    pub derivative_residuals: Vec<f64>,
    /// Uniform grid size at which the count was accepted.
    pub grid: usize,
}

fn sample_points(iv: &OpenInterval, n: usize, cfg: &ScanConfig) -> Vec<f64> {
    let (lo, hi) = (iv.lo, iv.hi);
    let mut pts = Vec::with_capacity(n + 64);
    if iv.is_bounded() {
        pts.extend((1..=n).map(|k| lo + (hi - lo) * k as f64 / (n + 1) as f64));
    } else {
        let (tl, th) = (lo.atan(), hi.atan());
        pts.extend((1..=n).map(|k| (tl + (th - tl) * k as f64 / (n + 1) as f64).tan()));
    }
    let width = if iv.is_bounded() {
        (hi - lo).min(1.0)
    } else {
        1.0
    };
    for j in 2..=cfg.edge_decades {
        let d = width * 10f64.powi(-(j as i32));
        if lo.is_finite() {
            pts.push(lo + d);
        }
        if hi.is_finite() {
            pts.push(hi - d);
        }
    }
    let quarter_decades = (4.0 * cfg.tail.max(1.0).log10()).ceil() as i32;
    for j in 0..=quarter_decades {
        let r = 10f64.powf(j as f64 / 4.0);
        if lo == f64::NEG_INFINITY {
            pts.push(-r);
        }
        if hi == f64::INFINITY {
            pts.push(r);
        }
    }
    pts.retain(|&x| iv.contains(x));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Sign of a central-difference derivative; `None` when invalid or lost in rounding noise.
fn derivative_sign(
    h: &impl Fn(f64) -> f64,
    iv: &OpenInterval,
    x: f64,
    cfg: &ScanConfig,
) -> Option<(f64, f64)> {
    let dist = (x - iv.lo).min(iv.hi - x);
    let step = (cfg.step_rel * (1.0 + x.abs())).min(dist / 4.0);
    let (a, b) = (h(x - step), h(x + step));
    if !a.is_finite() || !b.is_finite() {
        return None;
    }
    let d = (b - a) / (2.0 * step);
    let noise = 64.0 * f64::EPSILON * a.abs().max(b.abs()) / step;
    (d.abs() > noise).then_some((d.signum(), d))
}

fn scan_once(
    h: &impl Fn(f64) -> f64,
    iv: &OpenInterval,
    n: usize,
    cfg: &ScanConfig,
) -> Result<CriticalReport, AnalysisError> {
    let pts = sample_points(iv, n, cfg);
    let signs: Vec<(f64, f64)> = pts
        .iter()
        .filter_map(|&x| derivative_sign(h, iv, x, cfg).map(|(s, _)| (x, s)))
        .collect();
    if signs.len() < 3 {
        return Err(AnalysisError::InsufficientDomain {
            lo: iv.lo,
            hi: iv.hi,
            valid: signs.len(),
        });
    }
    let mut report = CriticalReport {
        interval: *iv,
        count: 0,
        locations: Vec::new(),
        brackets: Vec::new(),
        derivative_residuals: Vec::new(),
        grid: n,
    };
    for w in signs.windows(2) {
        let ((x0, s0), (x1, s1)) = (w[0], w[1]);
        if s0 == s1 {
            continue;
        }
        let sign_at = |x: f64| derivative_sign(h, iv, x, cfg).map_or(0.0, |(s, _)| s * s0);
        let loc = bisect(sign_at, x0, x1, cfg.tol);
        let residual = derivative_sign(h, iv, loc, cfg).map_or(0.0, |(_, d)| d.abs());
        report.locations.push(loc);
        report.brackets.push([x0, x1]);
        report.derivative_residuals.push(residual);
    }
    report.count = report.locations.len();
    Ok(report)
}

/// Critical points of `h` on the open interval. Non-finite values mark points
/// outside the domain. The count is accepted once two successive grid
/// doublings agree.
pub fn critical_points(
    h: impl Fn(f64) -> f64,
    interval: OpenInterval,
    cfg: &ScanConfig,
) -> Result<CriticalReport, AnalysisError> {
    let mut n = cfg.grid.max(16);
    let mut prev = scan_once(&h, &interval, n, cfg)?;
    let mut counts = vec![prev.count];
    for _ in 0..=cfg.max_doublings {
        n *= 2;
        let next = scan_once(&h, &interval, n, cfg)?;
        counts.push(next.count);
        if next.count == prev.count {
            return Ok(next);
        }
        prev = next;
    }
    Err(AnalysisError::Unstable { counts })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EndpointLabel {
    NegInfinity,
    MinusOne,
    Zero,
    BOverA,
    PosInfinity,
}

impl EndpointLabel {
    pub fn value(self, params: &SurfaceParams) -> f64 {
        match self {
            Self::NegInfinity => f64::NEG_INFINITY,
            Self::MinusOne => -1.0,
            Self::Zero => 0.0,
            Self::BOverA => params.b_over_a(),
            Self::PosInfinity => f64::INFINITY,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::NegInfinity => "-inf",
            Self::MinusOne => "-1",
            Self::Zero => "0",
            Self::BOverA => "b/a",
            Self::PosInfinity => "inf",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    /// `λ ↑ p`
    FromBelow,
    /// `λ ↓ p`
    FromAbove,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Approach {
    pub at: EndpointLabel,
    pub side: Side,
}

impl Approach {
    pub const fn new(at: EndpointLabel, side: Side) -> Self {
        Self { at, side }
    }

    /// The two ends of a labelled interval, left end first.
    pub fn ends_of(label: IntervalLabel) -> [Approach; 2] {
        use EndpointLabel::*;
        use Side::*;
        let (l, r) = match label {
            IntervalLabel::I1 => (NegInfinity, MinusOne),
            IntervalLabel::I2 => (MinusOne, Zero),
            IntervalLabel::I3 => (Zero, BOverA),
            _ => (BOverA, PosInfinity),
        };
        [Approach::new(l, FromAbove), Approach::new(r, FromBelow)]
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = match self.side {
            Side::FromBelow => "↑",
            Side::FromAbove => "↓",
        };
        write!(f, "λ{}{}", arrow, self.at.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitConfig {
    pub first_decade: u32,
    pub last_decade: u32,
    /// Samples (one per decade) that must move monotonically for a 0 or ∞ verdict.
    pub trend: usize,
    pub zero: f64,
    pub infinity: f64,
    /// Relative tolerance for reciprocal finite limits.
    pub finite_rel: f64,
}

impl Default for LimitConfig {
    fn default() -> Self {
        Self {
            first_decade: 1,
            last_decade: 12,
            trend: 5,
            zero: 1e-4,
            infinity: 1e4,
            finite_rel: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", content = "value")]
pub enum LimitClass {
    Zero,
    Finite(f64),
    Infinity,
}

impl LimitClass {
    pub fn same_class(&self, other: &LimitClass) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }

    /// `self = 1 / other` at class level, with reciprocal values for finite limits.
    pub fn is_reciprocal_of(&self, other: &LimitClass, rel: f64) -> bool {
        match (self, other) {
            (Self::Zero, Self::Infinity) | (Self::Infinity, Self::Zero) => true,
            (Self::Finite(a), Self::Finite(b)) => (a * b - 1.0).abs() <= rel,
            _ => false,
        }
    }
}

impl fmt::Display for LimitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => f.write_str("0"),
            Self::Infinity => f.write_str("∞"),
            Self::Finite(v) => write!(f, "{v:.6e}"),
        }
    }
}

fn approach_points(point: f64, side: Side, cfg: &LimitConfig) -> Vec<f64> {
    (cfg.first_decade..=cfg.last_decade)
        .map(|j| {
            let d = 10f64.powi(j as i32);
            match (point.is_finite(), side) {
                (true, Side::FromBelow) => point - 1.0 / d,
                (true, Side::FromAbove) => point + 1.0 / d,
                (false, _) => point.signum() * d,
            }
        })
        .collect()
}

/// Classifies `lim h(λ)` along a geometric approach sequence.
pub fn endpoint_limit(
    h: impl Fn(f64) -> f64,
    point: f64,
    side: Side,
    cfg: &LimitConfig,
) -> Result<LimitClass, AnalysisError> {
    let describe = || {
        let arrow = if side == Side::FromBelow {
            "↑"
        } else {
            "↓"
        };
        format!("λ{arrow}{point}")
    };
    let values: Vec<f64> = approach_points(point, side, cfg)
        .into_iter()
        .map(&h)
        .skip_while(|v| !v.is_finite())
        .collect();
    let trend = cfg.trend.max(3);
    if values.len() < trend || values.iter().any(|v| !v.is_finite()) {
        return Err(AnalysisError::Unclassifiable {
            approach: describe(),
            values,
        });
    }
    let tail = &values[values.len() - trend..];
    let last = tail[trend - 1];
    let decreasing = tail.windows(2).all(|w| w[1] < w[0]);
    let increasing = tail.windows(2).all(|w| w[1] > w[0]);
    if decreasing && last.abs() < cfg.zero {
        return Ok(LimitClass::Zero);
    }
    if increasing && last > cfg.infinity {
        return Ok(LimitClass::Infinity);
    }
    let diffs: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
    let flat = diffs
        .iter()
        .all(|d| d.abs() <= 1e-12 * last.abs().max(f64::MIN_POSITIVE));
    let contracting = diffs.windows(2).all(|w| w[1].abs() <= 0.5 * w[0].abs());
    if flat || contracting {
        let (d1, d2) = (diffs[diffs.len() - 2], diffs[diffs.len() - 1]);
        let denom = d2 - d1;
        let estimate = if flat || denom == 0.0 {
            last
        } else {
            last - d2 * d2 / denom
        };
        return Ok(LimitClass::Finite(estimate));
    }
    Err(AnalysisError::Unclassifiable {
        approach: describe(),
        values,
    })
}

/// Every radius function that depends on a distinct set of forms: `h0`, four
/// `h1`, six `h2` and four `h3`.
pub fn all_radius_fns() -> Vec<RadiusFn> {
    let f = LinearForm::ALL;
    let mut out = vec![RadiusFn::H0];
    out.extend(f.iter().map(|&a| RadiusFn::H1(a)));
    for i in 0..4 {
        for j in (i + 1)..4 {
            out.push(RadiusFn::h2(f[i], f[j]));
        }
    }
    for skip in 0..4 {
        let t: Vec<LinearForm> = (0..4).filter(|&k| k != skip).map(|k| f[k]).collect();
        out.push(RadiusFn::h3(t[0], t[1], t[2]));
    }
    out
}

/// The two intervals on which the function is defined.
pub fn domain_of(function: &RadiusFn) -> [IntervalLabel; 2] {
    if function.needs_positive_f() {
        [IntervalLabel::I2, IntervalLabel::I4]
    } else {
        [IntervalLabel::I1, IntervalLabel::I3]
    }
}

fn as_real_fn<'a>(surface: &'a Surface, function: RadiusFn) -> impl Fn(f64) -> f64 + 'a {
    move |x| function.eval(surface, x).unwrap_or(f64::NAN)
}

/// Critical points of a radius function on one of its intervals; `h0` on
/// `I4` skips a neighbourhood of `λ0`.
pub fn scan_radius(
    surface: &Surface,
    function: RadiusFn,
    label: IntervalLabel,
    cfg: &ScanConfig,
) -> Result<CriticalReport, AnalysisError> {
    let h = as_real_fn(surface, function);
    let iv = surface.interval(label);
    let l0 = surface.lambda0();
    if function == RadiusFn::H0 && iv.contains(l0) {
        let ex = cfg.lambda0_exclusion;
        let left = critical_points(
            &h,
            OpenInterval {
                lo: iv.lo,
                hi: l0 - ex,
            },
            cfg,
        )?;
        let right = critical_points(
            &h,
            OpenInterval {
                lo: l0 + ex,
                hi: iv.hi,
            },
            cfg,
        )?;
        let mut merged = left;
        merged.interval = iv;
        merged.count += right.count;
        merged.grid = merged.grid.max(right.grid);
        merged.locations.extend(right.locations);
        merged.brackets.extend(right.brackets);
        merged
            .derivative_residuals
            .extend(right.derivative_residuals);
        return Ok(merged);
    }
    critical_points(&h, iv, cfg)
}

pub fn radius_limit(
    surface: &Surface,
    function: RadiusFn,
    approach: Approach,
    cfg: &LimitConfig,
) -> Result<LimitClass, AnalysisError> {
    let h = as_real_fn(surface, function);
    endpoint_limit(h, approach.at.value(surface.params()), approach.side, cfg).map_err(
        |e| match e {
            AnalysisError::Unclassifiable { values, .. } => AnalysisError::Unclassifiable {
                approach: format!("{function} at {approach}"),
                values,
            },
            other => other,
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub scan: ScanConfig,
    pub limits: LimitConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub function: RadiusFn,
    pub interval: IntervalLabel,
    pub report: CriticalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LimitOutcome {
    Classified { limit: LimitClass },
    Unclassifiable { reason: String },
}

impl LimitOutcome {
    pub fn class(&self) -> Result<LimitClass, AnalysisError> {
        match self {
            Self::Classified { limit } => Ok(*limit),
            Self::Unclassifiable { reason } => Err(AnalysisError::Unclassifiable {
                approach: reason.clone(),
                values: Vec::new(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEntry {
    pub function: RadiusFn,
    pub approach: Approach,
    pub outcome: LimitOutcome,
}

/// Critical-point scans and endpoint limits of every radius function on every
/// interval of its domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HAtlas {
    pub scans: Vec<ScanEntry>,
    pub limits: Vec<LimitEntry>,
}

impl HAtlas {
    pub fn build(surface: &Surface, cfg: &AnalysisConfig) -> Result<Self, AnalysisError> {
        let tasks: Vec<(RadiusFn, IntervalLabel)> = all_radius_fns()
            .into_iter()
            .flat_map(|f| domain_of(&f).into_iter().map(move |l| (f, l)))
            .collect();
        let scans = tasks
            .par_iter()
            .map(|&(function, interval)| {
                scan_radius(surface, function, interval, &cfg.scan).map(|report| ScanEntry {
                    function,
                    interval,
                    report,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let limits = tasks
            .par_iter()
            .flat_map_iter(|&(function, interval)| {
                Approach::ends_of(interval)
                    .into_iter()
                    .map(move |a| (function, a))
            })
            .map(|(function, approach)| LimitEntry {
                function,
                approach,
                outcome: match radius_limit(surface, function, approach, &cfg.limits) {
                    Ok(limit) => LimitOutcome::Classified { limit },
                    Err(e) => LimitOutcome::Unclassifiable {
                        reason: e.to_string(),
                    },
                },
            })
            .collect();
        Ok(Self { scans, limits })
    }

    pub fn scan(&self, function: RadiusFn, interval: IntervalLabel) -> Option<&CriticalReport> {
        self.scans
            .iter()
            .find(|e| e.function == function && e.interval == interval)
            .map(|e| &e.report)
    }

    pub fn limit(&self, function: RadiusFn, approach: Approach) -> Option<&LimitOutcome> {
        self.limits
            .iter()
            .find(|e| e.function == function && e.approach == approach)
            .map(|e| &e.outcome)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectedCount {
    pub function: RadiusFn,
    pub interval: IntervalLabel,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectedLimit {
    pub function: RadiusFn,
    pub approach: Approach,
    pub limit: LimitClass,
}

/// Critical-point counts every admissible surface must show.
pub fn expected_counts() -> Vec<ExpectedCount> {
    use IntervalLabel::*;
    use LinearForm::*;
    let mut out = Vec::new();
    let mut push = |function, interval, count| {
        out.push(ExpectedCount {
            function,
            interval,
            count,
        })
    };
    push(RadiusFn::H0, I2, 1);
    push(RadiusFn::H0, I4, 0);
    // (count on I1, count on I3), keyed by ℓ1 for h1 and by the missing form for h3
    let by_form = [
        (X1, (0, 1)),
        (X0, (1, 0)),
        (X0plusX1, (0, 1)),
        (AX0minusBX1, (1, 0)),
    ];
    for (form, (c1, c3)) in by_form {
        push(RadiusFn::H1(form), I1, c1);
        push(RadiusFn::H1(form), I3, c3);
    }
    for (missing, (c1, c3)) in by_form {
        let t: Vec<LinearForm> = LinearForm::ALL
            .into_iter()
            .filter(|&f| f != missing)
            .collect();
        push(RadiusFn::h3(t[0], t[1], t[2]), I1, c1);
        push(RadiusFn::h3(t[0], t[1], t[2]), I3, c3);
    }
    for (a, b, c) in [
        (X0, X1, 0),
        (X0plusX1, AX0minusBX1, 0),
        (X1, X0plusX1, 0),
        (X0, AX0minusBX1, 0),
        (X0, X0plusX1, 1),
        (X1, AX0minusBX1, 1),
    ] {
        push(RadiusFn::h2(a, b), I2, c);
        push(RadiusFn::h2(a, b), I4, c);
    }
    out
}

/// Endpoint limits every admissible surface must show.
pub fn expected_limits() -> Vec<ExpectedLimit> {
    use EndpointLabel::*;
    use LimitClass::{Infinity as Inf, Zero as Z};
    use LinearForm::*;
    use Side::*;
    let mut out = Vec::new();
    let mut push = |function, at, side, limit| {
        out.push(ExpectedLimit {
            function,
            approach: Approach::new(at, side),
            limit,
        })
    };
    push(RadiusFn::H0, MinusOne, FromAbove, Inf);
    push(RadiusFn::H0, Zero, FromBelow, Inf);
    let h1 = [
        (
            X1,
            [(NegInfinity, FromAbove, Inf), (MinusOne, FromBelow, Z)],
        ),
        (X0, [(Zero, FromAbove, Inf), (BOverA, FromBelow, Z)]),
        (
            X0plusX1,
            [(NegInfinity, FromAbove, Z), (MinusOne, FromBelow, Inf)],
        ),
        (
            AX0minusBX1,
            [(Zero, FromAbove, Z), (BOverA, FromBelow, Inf)],
        ),
    ];
    for (form, rows) in h1 {
        for (at, side, l) in rows {
            push(RadiusFn::H1(form), at, side, l);
        }
    }
    let h3 = [
        (
            [X0, X0plusX1, AX0minusBX1],
            [(NegInfinity, FromAbove, Z), (MinusOne, FromBelow, Inf)],
        ),
        (
            [X1, X0plusX1, AX0minusBX1],
            [(Zero, FromAbove, Z), (BOverA, FromBelow, Inf)],
        ),
        (
            [X0, X1, AX0minusBX1],
            [(NegInfinity, FromAbove, Inf), (MinusOne, FromBelow, Z)],
        ),
        (
            [X0, X1, X0plusX1],
            [(Zero, FromAbove, Inf), (BOverA, FromBelow, Z)],
        ),
    ];
    for (t, rows) in h3 {
        for (at, side, l) in rows {
            push(RadiusFn::h3(t[0], t[1], t[2]), at, side, l);
        }
    }
    let ends = [
        (MinusOne, FromAbove),
        (Zero, FromBelow),
        (BOverA, FromAbove),
        (PosInfinity, FromBelow),
    ];
    let h2: [(LinearForm, LinearForm, &[LimitClass]); 4] = [
        (X0, X1, &[Z, Inf, Z, Inf]),
        (X0plusX1, AX0minusBX1, &[Inf, Z, Inf, Z]),
        (X1, X0plusX1, &[Inf, Z, Z, Inf]),
        (X0, AX0minusBX1, &[Z, Inf, Inf]),
    ];
    for (a, b, limits) in h2 {
        for ((at, side), l) in ends.iter().zip(limits.iter()) {
            push(RadiusFn::h2(a, b), *at, *side, *l);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub function: RadiusFn,
    pub label: String,
    pub interval: IntervalLabel,
    pub expected: usize,
    pub computed: usize,
    pub locations: Vec<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub function: RadiusFn,
    pub label: String,
    pub approach: Approach,
    pub expected: LimitClass,
    pub computed: LimitClass,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HTableReport {
    pub counts: Vec<CountRow>,
    pub limits: Vec<LimitRow>,
    pub passed: bool,
}

/// Compares an atlas against [`expected_counts`] and [`expected_limits`].
pub fn check_h_tables(atlas: &HAtlas) -> Result<HTableReport, AnalysisError> {
    let mut counts = Vec::new();
    for e in expected_counts() {
        let report = atlas
            .scan(e.function, e.interval)
            .expect("atlas covers every domain interval");
        counts.push(CountRow {
            function: e.function,
            label: e.function.label(),
            interval: e.interval,
            expected: e.count,
            computed: report.count,
            locations: report.locations.clone(),
            pass: report.count == e.count,
        });
    }
    let mut limits = Vec::new();
    for e in expected_limits() {
        let computed = atlas
            .limit(e.function, e.approach)
            .expect("atlas covers every domain endpoint")
            .class()?;
        limits.push(LimitRow {
            function: e.function,
            label: e.function.label(),
            approach: e.approach,
            expected: e.limit,
            computed,
            pass: computed.same_class(&e.limit),
        });
    }
    let passed = counts.iter().all(|r| r.pass) && limits.iter().all(|r| r.pass);
    Ok(HTableReport {
        counts,
        limits,
        passed,
    })
}

pub fn verify_h_tables(
    surface: &Surface,
    cfg: &AnalysisConfig,
) -> Result<HTableReport, AnalysisError> {
    check_h_tables(&HAtlas::build(surface, cfg)?)
}

/// Which family of real conics a preimage component comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    GenPlus,
    GenMinus,
    SpPlus,
    SpMinus,
    Orbit,
}

impl FamilyKind {
    /// The radius function whose critical points mark degenerate normal bundles.
    pub fn governing(self, choice: &ResolutionChoice) -> RadiusFn {
        use crate::resolution::HKind;
        let kind = match self {
            Self::GenPlus | Self::GenMinus => HKind::H0,
            Self::SpPlus => HKind::H1,
            Self::SpMinus => HKind::H3,
            Self::Orbit => HKind::H2,
        };
        RadiusFn::for_choice(kind, choice)
    }
}

/// `Balanced` is `O(1) ⊕ O(1)`, `Degenerate` is `O ⊕ O(2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalBundleVerdict {
    Balanced,
    Degenerate,
}

fn domain_label(
    surface: &Surface,
    function: RadiusFn,
    lambda: f64,
) -> Result<IntervalLabel, AnalysisError> {
    let outside = AnalysisError::OutsideDomain { function, lambda };
    let label = match surface.partition().locate(lambda).ok_or(outside.clone())? {
        IntervalLabel::I4Minus | IntervalLabel::I4Plus | IntervalLabel::I4 => IntervalLabel::I4,
        l => l,
    };
    if !domain_of(&function).contains(&label) {
        return Err(outside);
    }
    function.eval(surface, lambda)?;
    Ok(label)
}

pub fn normal_bundle_at(
    kind: FamilyKind,
    choice: &ResolutionChoice,
    surface: &Surface,
    lambda: f64,
    cfg: &ScanConfig,
) -> Result<NormalBundleVerdict, AnalysisError> {
    let function = kind.governing(choice);
    let label = domain_label(surface, function, lambda)?;
    let report = scan_radius(surface, function, label, cfg)?;
    Ok(verdict_from(&report, lambda, cfg))
}

/// Verdict at `λ` given a scan of the governing function.
pub fn verdict_from(report: &CriticalReport, lambda: f64, cfg: &ScanConfig) -> NormalBundleVerdict {
    if report
        .locations
        .iter()
        .any(|c| (c - lambda).abs() <= cfg.verdict_tol)
    {
        NormalBundleVerdict::Degenerate
    } else {
        NormalBundleVerdict::Balanced
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FakePairing {
    pub lambda: f64,
    pub mu: f64,
    pub critical: f64,
    pub h0_lambda: f64,
    pub h0_mu: f64,
    pub gap: f64,
}

/// For `λ ∈ I2` away from the critical point `λ'` of `h0`, the unique `μ` on
/// the other side of `λ'` with `h0(μ) = h0(λ)`.
pub fn fake_line_partner(
    surface: &Surface,
    lambda: f64,
    cfg: &ScanConfig,
) -> Result<FakePairing, AnalysisError> {
    let report = scan_radius(surface, RadiusFn::H0, IntervalLabel::I2, cfg)?;
    if report.count != 1 {
        return Err(AnalysisError::NoUniqueCritical(report.count));
    }
    let critical = report.locations[0];
    let h = as_real_fn(surface, RadiusFn::H0);
    let target = h(lambda);
    if !target.is_finite()
        || (lambda - critical).abs() <= cfg.verdict_tol
        || !(-1.0 < lambda && lambda < 0.0)
    {
        return Err(AnalysisError::NoPartner(lambda));
    }
    let end = if lambda < critical { 0.0 } else { -1.0 };
    let gap = |x: f64| h(x) - target;
    let mut far = None;
    for j in 1..=15 {
        let x = end + (critical - end) * 10f64.powi(-j);
        if gap(x) > 0.0 {
            far = Some(x);
            break;
        }
    }
    let far = far.ok_or(AnalysisError::NoPartner(lambda))?;
    if !(gap(critical) < 0.0) {
        return Err(AnalysisError::NoPartner(lambda));
    }
    let mu = bisect(gap, critical, far, 0.0);
    let h0_mu = h(mu);
    Ok(FakePairing {
        lambda,
        mu,
        critical,
        h0_lambda: target,
        h0_mu,
        gap: (h0_mu - target).abs(),
    })
}

/// `k(r) = r / (1 + sqrt(1 + r^2))`.
pub fn psi_radial(r: f64) -> f64 {
    r / (1.0 + (1.0 + r * r).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiReport {
    pub samples: usize,
    pub monotone: bool,
    pub k_at_zero: f64,
    pub k_at_1e6: f64,
    pub sup_below_one: bool,
    /// `d/ds k(1/s)` at `s = 0`, from a one-sided difference.
    pub boundary_derivative: f64,
    pub passed: bool,
}

pub fn psi_check(samples: usize) -> PsiReport {
    let n = samples.max(10);
    let grid: Vec<f64> = std::iter::once(0.0)
        .chain((0..n).map(|k| 10f64.powf(-6.0 + 12.0 * k as f64 / (n - 1) as f64)))
        .collect();
    let values: Vec<f64> = grid.iter().map(|&r| psi_radial(r)).collect();
    let monotone = values.windows(2).all(|w| w[1] > w[0]);
    let sup_below_one = values.iter().all(|&k| k < 1.0);
    let inverted = |s: f64| 1.0 / (s + (1.0 + s * s).sqrt());
    let h = 1e-6;
    let boundary_derivative = (inverted(h) - inverted(0.0)) / h;
    let k_at_zero = psi_radial(0.0);
    let k_at_1e6 = psi_radial(1e6);
    PsiReport {
        samples: n,
        monotone,
        k_at_zero,
        k_at_1e6,
        sup_below_one,
        boundary_derivative,
        passed: monotone
            && sup_below_one
            && k_at_zero == 0.0
            && k_at_1e6 > 1.0 - 1e-5
            && boundary_derivative.abs() > 1e-3,
    }
}
