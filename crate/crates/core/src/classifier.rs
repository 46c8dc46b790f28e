//! Conic types per interval and the elimination of small resolutions.
//!
//! Each resolution is tested under two hypotheses: the `Plus` or the `Minus`
//! preimage component of the special conics is taken over `I1` (the other one
//! is then forced over `I3`). Three constraints can rule a hypothesis out:
//!
//! * `A`: `h2` of `{ℓ1, ℓ2}` has a critical point on `I2`;
//! * `B`: the function governing the component over `I1` or `I3` has a critical point there;
//! * `C`: the radii do not glue across `λ = -1` or `λ = 0`, where the limit on
//!   one side must be the reciprocal of the limit on the other.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    radius_limit, scan_radius, AnalysisConfig, AnalysisError, Approach, EndpointLabel, HAtlas,
    LimitClass, Side,
};
use crate::conics::{
    generic_conic, orbit_conic, special_conic, verify_touching, ConicType, TouchConfig,
};
use crate::resolution::{all_resolutions, Component, LinearForm, RadiusFn, ResolutionChoice};
use crate::surface::{IntervalLabel, Surface};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("{0} with this hypothesis is not a survivor")]
    NotSurvivor(ResolutionChoice),
    #[error("component schedule undetermined: {0}")]
    Undetermined(String),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeEntry {
    pub interval: IntervalLabel,
    #[serde(rename = "type")]
    pub kind: ConicType,
    pub reason: String,
    /// A member of the family at the interval's sample point was rebuilt and
    /// classified with the stated type.
    pub confirmed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeAssignment {
    pub entries: Vec<TypeEntry>,
    pub lambda0: f64,
    /// Image of a real line through the node in the `λ0` plane.
    pub lambda0_plane: String,
}

impl TypeAssignment {
    pub fn get(&self, interval: IntervalLabel) -> Option<ConicType> {
        self.entries
            .iter()
            .find(|e| e.interval == interval)
            .map(|e| e.kind)
    }
}

fn sample_in(surface: &Surface, label: IntervalLabel) -> f64 {
    let iv = surface.interval(label);
    match (iv.lo.is_finite(), iv.hi.is_finite()) {
        (true, true) => 0.5 * (iv.lo + iv.hi),
        (false, true) => iv.hi - 1.0,
        (true, false) => iv.lo + 1.0,
        (false, false) => 0.0,
    }
}

fn confirm(surface: &Surface, label: IntervalLabel, kind: ConicType) -> bool {
    let lambda = sample_in(surface, label);
    let params = surface.params();
    let conic = match kind {
        ConicType::Generic => generic_conic(surface, lambda, 0.0),
        ConicType::Special => special_conic(params, lambda, 0.0),
        ConicType::Orbit => orbit_conic(-params.q(lambda)),
    };
    conic
        .and_then(|c| verify_touching(&c, params, lambda, &TouchConfig::default()))
        .is_ok_and(|r| r.kind.conic_type() == Some(kind))
}

pub fn assign_types(surface: &Surface) -> TypeAssignment {
    let table = [
        (
            IntervalLabel::I1,
            ConicType::Special,
            "f < 0: only the special family is real and touching",
        ),
        (
            IntervalLabel::I2,
            ConicType::Orbit,
            "real preimage components of generic conics are not fibres; orbit conics remain",
        ),
        (
            IntervalLabel::I3,
            ConicType::Special,
            "f < 0: only the special family is real and touching",
        ),
        (
            IntervalLabel::I4Minus,
            ConicType::Generic,
            "f > 0 off λ0: generic conics with no critical point of h0",
        ),
        (
            IntervalLabel::I4Plus,
            ConicType::Generic,
            "f > 0 off λ0: generic conics with no critical point of h0",
        ),
    ];
    TypeAssignment {
        entries: table
            .into_iter()
            .map(|(interval, kind, reason)| TypeEntry {
                interval,
                kind,
                reason: reason.to_string(),
                confirmed: confirm(surface, interval, kind),
            })
            .collect(),
        lambda0: surface.lambda0(),
        lambda0_plane: "Line".to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintLabel {
    A,
    B,
    C,
}

/// One check of the elimination, in application order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum Constraint {
    /// The function must have no critical point on the interval.
    NoCritical {
        function: RadiusFn,
        interval: IntervalLabel,
    },
    /// `lim_{λ↑p} below = 1 / lim_{λ↓p} above`.
    Glue {
        at: EndpointLabel,
        below: RadiusFn,
        above: RadiusFn,
    },
}

impl Constraint {
    fn label(&self) -> ConstraintLabel {
        match self {
            Self::NoCritical {
                interval: IntervalLabel::I2,
                ..
            } => ConstraintLabel::A,
            Self::NoCritical { .. } => ConstraintLabel::B,
            Self::Glue { .. } => ConstraintLabel::C,
        }
    }
}

/// The functions governing the component chosen over `I1` and the forced one over `I3`.
fn governing(choice: &ResolutionChoice, over_i1: Component) -> (RadiusFn, RadiusFn) {
    let h1 = RadiusFn::H1(choice.ell1);
    let h3 = RadiusFn::h3(choice.ell1, choice.ell2, choice.ell3);
    match over_i1 {
        Component::Plus => (h1, h3),
        Component::Minus => (h3, h1),
    }
}

pub fn constraints(choice: &ResolutionChoice, over_i1: Component) -> Vec<Constraint> {
    let h2 = RadiusFn::h2(choice.ell1, choice.ell2);
    let (g1, g3) = governing(choice, over_i1);
    vec![
        Constraint::NoCritical {
            function: h2,
            interval: IntervalLabel::I2,
        },
        Constraint::NoCritical {
            function: g1,
            interval: IntervalLabel::I1,
        },
        Constraint::NoCritical {
            function: g3,
            interval: IntervalLabel::I3,
        },
        Constraint::Glue {
            at: EndpointLabel::MinusOne,
            below: g1,
            above: h2,
        },
        Constraint::Glue {
            at: EndpointLabel::Zero,
            below: h2,
            above: g3,
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Critical {
        function: RadiusFn,
        interval: IntervalLabel,
        lambda: f64,
        bracket: [f64; 2],
    },
    LimitMismatch {
        at: EndpointLabel,
        below: RadiusFn,
        below_limit: LimitClass,
        above: RadiusFn,
        above_limit: LimitClass,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reason {
    pub constraint: ConstraintLabel,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq)]
enum Outcome {
    Holds,
    Fires(Witness),
    Unresolved(String),
}

fn check(atlas: &HAtlas, c: &Constraint, rel: f64) -> Outcome {
    match *c {
        Constraint::NoCritical { function, interval } => {
            let report = atlas
                .scan(function, interval)
                .expect("atlas covers every domain interval");
            match report.locations.first() {
                None => Outcome::Holds,
                Some(&lambda) => Outcome::Fires(Witness::Critical {
                    function,
                    interval,
                    lambda,
                    bracket: report.brackets[0],
                }),
            }
        }
        Constraint::Glue { at, below, above } => {
            let get = |f: RadiusFn, side| {
                atlas
                    .limit(f, Approach::new(at, side))
                    .expect("atlas covers every domain endpoint")
                    .class()
            };
            match (get(below, Side::FromBelow), get(above, Side::FromAbove)) {
                (Ok(b), Ok(a)) if b.is_reciprocal_of(&a, rel) => Outcome::Holds,
                (Ok(below_limit), Ok(above_limit)) => Outcome::Fires(Witness::LimitMismatch {
                    at,
                    below,
                    below_limit,
                    above,
                    above_limit,
                }),
                (Err(e), _) | (_, Err(e)) => Outcome::Unresolved(e.to_string()),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Survives,
    Eliminated,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliminationTrace {
    pub choice: ResolutionChoice,
    /// Component taken over `I1`.
    pub over_i1: Component,
    pub verdict: Verdict,
    pub reasons: Vec<Reason>,
    pub unresolved: Vec<String>,
}

fn run_constraints(
    atlas: &HAtlas,
    choice: ResolutionChoice,
    over_i1: Component,
    list: &[Constraint],
    rel: f64,
) -> EliminationTrace {
    let mut trace = EliminationTrace {
        choice,
        over_i1,
        verdict: Verdict::Survives,
        reasons: Vec::new(),
        unresolved: Vec::new(),
    };
    for c in list {
        match check(atlas, c, rel) {
            Outcome::Holds => {}
            Outcome::Fires(witness) => trace.reasons.push(Reason {
                constraint: c.label(),
                witness,
            }),
            Outcome::Unresolved(msg) => trace.unresolved.push(msg),
        }
    }
    trace.verdict = if !trace.reasons.is_empty() {
        Verdict::Eliminated
    } else if !trace.unresolved.is_empty() {
        Verdict::Inconclusive
    } else {
        Verdict::Survives
    };
    trace
}

/// Verdicts after applying the first `k` constraints, for `k = 0..=5`.
pub fn replay(
    atlas: &HAtlas,
    choice: ResolutionChoice,
    over_i1: Component,
    rel: f64,
) -> Vec<Verdict> {
    let list = constraints(&choice, over_i1);
    (0..=list.len())
        .map(|k| run_constraints(atlas, choice, over_i1, &list[..k], rel).verdict)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Survivor {
    pub choice: ResolutionChoice,
    pub over_i1: Component,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Elimination {
    /// `None` when some hypothesis could not be decided.
    pub survivors: Option<Vec<Survivor>>,
    pub traces: Vec<EliminationTrace>,
}

impl Elimination {
    pub fn is_inconclusive(&self) -> bool {
        self.survivors.is_none()
    }
}

pub fn eliminate_with(atlas: &HAtlas, rel: f64) -> Elimination {
    let traces: Vec<EliminationTrace> = all_resolutions()
        .into_iter()
        .flat_map(|choice| {
            [Component::Plus, Component::Minus]
                .into_iter()
                .map(move |c| run_constraints(atlas, choice, c, &constraints(&choice, c), rel))
        })
        .collect();
    let survivors = if traces.iter().any(|t| t.verdict == Verdict::Inconclusive) {
        None
    } else {
        Some(
            traces
                .iter()
                .filter(|t| t.verdict == Verdict::Survives)
                .map(|t| Survivor {
                    choice: t.choice,
                    over_i1: t.over_i1,
                })
                .collect(),
        )
    };
    Elimination { survivors, traces }
}

pub fn eliminate(surface: &Surface, cfg: &AnalysisConfig) -> Result<Elimination, ClassifyError> {
    let atlas = HAtlas::build(surface, cfg)?;
    Ok(eliminate_with(&atlas, cfg.limits.finite_rel))
}

/// Recomputes a witness from scratch (with a doubled base grid for critical points).
pub fn verify_witness(
    surface: &Surface,
    witness: &Witness,
    cfg: &AnalysisConfig,
) -> Result<bool, AnalysisError> {
    match witness {
        Witness::Critical {
            function,
            interval,
            lambda,
            bracket,
        } => {
            let mut scan = cfg.scan;
            scan.grid *= 2;
            let report = scan_radius(surface, *function, *interval, &scan)?;
            let (lo, hi) = (bracket[0].min(bracket[1]), bracket[0].max(bracket[1]));
            Ok(report.locations.iter().any(|x| {
                (x - lambda).abs() <= 1e3 * scan.tol.max(1e-9) && (lo..=hi).contains(lambda)
            }))
        }
        Witness::LimitMismatch {
            at,
            below,
            below_limit,
            above,
            above_limit,
        } => {
            let b = radius_limit(
                surface,
                *below,
                Approach::new(*at, Side::FromBelow),
                &cfg.limits,
            )?;
            let a = radius_limit(
                surface,
                *above,
                Approach::new(*at, Side::FromAbove),
                &cfg.limits,
            )?;
            Ok(b.same_class(below_limit)
                && a.same_class(above_limit)
                && !b.is_reciprocal_of(&a, cfg.limits.finite_rel))
        }
    }
}

/// The two resolutions and hypotheses that no constraint rules out.
pub fn expected_survivors() -> [Survivor; 2] {
    use LinearForm::*;
    [
        Survivor {
            choice: ResolutionChoice {
                ell1: X1,
                ell2: X0plusX1,
                ell3: X0,
            },
            over_i1: Component::Plus,
        },
        Survivor {
            choice: ResolutionChoice {
                ell1: AX0minusBX1,
                ell2: X0,
                ell3: X0plusX1,
            },
            over_i1: Component::Minus,
        },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Selection {
    Plus,
    Minus,
    Both,
}

impl From<Component> for Selection {
    fn from(c: Component) -> Self {
        match c {
            Component::Plus => Self::Plus,
            Component::Minus => Self::Minus,
        }
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Plus => "Plus",
            Self::Minus => "Minus",
            Self::Both => "Both",
        })
    }
}

/// Exceptional curves `Γ1, Γ2, Γ3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gamma {
    Gamma1,
    Gamma2,
    Gamma3,
}

fn gamma_of(f: &RadiusFn) -> Gamma {
    match f {
        RadiusFn::H1(_) => Gamma::Gamma1,
        RadiusFn::H3(_) => Gamma::Gamma3,
        _ => Gamma::Gamma2,
    }
}

/// How the `I4-` component was matched across `λ = b/a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkMatch {
    /// Function governing the component over `I3`, and its limit as `λ ↑ b/a`.
    pub i3_function: RadiusFn,
    pub i3_limit: LimitClass,
    /// Limit of `h0` as `λ ↓ b/a`; the `Plus` circle has radius `h0`, the `Minus` circle `1/h0`.
    pub h0_limit: LimitClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSchedule {
    pub choice: ResolutionChoice,
    pub entries: Vec<(IntervalLabel, Selection)>,
    /// Exceptional curve met over `I1`, `I2`, `I3` in turn.
    pub path: [Gamma; 3],
    pub shrink: ShrinkMatch,
}

impl ComponentSchedule {
    pub fn get(&self, interval: IntervalLabel) -> Option<Selection> {
        self.entries
            .iter()
            .find(|(l, _)| *l == interval)
            .map(|(_, s)| *s)
    }
}

pub fn component_schedule(
    survivor: &Survivor,
    elimination: &Elimination,
    atlas: &HAtlas,
) -> Result<ComponentSchedule, ClassifyError> {
    let listed = elimination
        .survivors
        .as_ref()
        .is_some_and(|s| s.contains(survivor));
    if !listed {
        return Err(ClassifyError::NotSurvivor(survivor.choice));
    }
    let choice = survivor.choice;
    let h2 = RadiusFn::h2(choice.ell1, choice.ell2);
    let (g1, g3) = governing(&choice, survivor.over_i1);
    let over_i3 = survivor.over_i1.opposite();
    let i3_limit = atlas
        .limit(g3, Approach::new(EndpointLabel::BOverA, Side::FromBelow))
        .expect("atlas covers every domain endpoint")
        .class()?;
    let h0_limit = atlas
        .limit(
            RadiusFn::H0,
            Approach::new(EndpointLabel::BOverA, Side::FromAbove),
        )
        .expect("atlas covers every domain endpoint")
        .class()?;
    let inverse = match h0_limit {
        LimitClass::Zero => LimitClass::Infinity,
        LimitClass::Infinity => LimitClass::Zero,
        LimitClass::Finite(v) => LimitClass::Finite(1.0 / v),
    };
    let i4_minus = match (
        i3_limit.same_class(&h0_limit),
        i3_limit.same_class(&inverse),
    ) {
        (true, false) => Component::Plus,
        (false, true) => Component::Minus,
        _ => {
            return Err(ClassifyError::Undetermined(format!(
                "{g3} → {i3_limit} at b/a cannot be matched with h0 → {h0_limit}"
            )))
        }
    };
    Ok(ComponentSchedule {
        choice,
        entries: vec![
            (IntervalLabel::I1, survivor.over_i1.into()),
            (IntervalLabel::I2, Selection::Both),
            (IntervalLabel::I3, over_i3.into()),
            (IntervalLabel::I4Minus, i4_minus.into()),
            (IntervalLabel::I4Plus, i4_minus.opposite().into()),
        ],
        path: [gamma_of(&g1), gamma_of(&h2), gamma_of(&g3)],
        shrink: ShrinkMatch {
            i3_function: g3,
            i3_limit,
            h0_limit,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub status: Status,
    pub types: TypeAssignment,
    pub survivors: Option<Vec<Survivor>>,
    pub traces: Vec<EliminationTrace>,
    pub schedules: Vec<ComponentSchedule>,
}

pub fn classify_with(
    surface: &Surface,
    atlas: &HAtlas,
    cfg: &AnalysisConfig,
) -> Result<ClassificationReport, ClassifyError> {
    let types = assign_types(surface);
    let elimination = eliminate_with(atlas, cfg.limits.finite_rel);
    let schedules = match &elimination.survivors {
        Some(list) => list
            .iter()
            .map(|s| component_schedule(s, &elimination, atlas))
            .collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    let status = match &elimination.survivors {
        None => Status::Inconclusive,
        Some(list) => {
            let mut got = list.clone();
            got.sort();
            let mut want = expected_survivors().to_vec();
            want.sort();
            let types_ok = types.entries.iter().all(|e| e.confirmed);
            if got == want && types_ok {
                Status::Pass
            } else {
                Status::Fail
            }
        }
    };
    Ok(ClassificationReport {
        status,
        types,
        survivors: elimination.survivors,
        traces: elimination.traces,
        schedules,
    })
}

pub fn classify(
    surface: &Surface,
    cfg: &AnalysisConfig,
) -> Result<ClassificationReport, ClassifyError> {
    let atlas = HAtlas::build(surface, cfg)?;
    classify_with(surface, &atlas, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{find_valid_params, SearchConfig, ValidationConfig};
    use std::sync::OnceLock;

    struct Fixture {
        surface: Surface,
        atlas: HAtlas,
        report: ClassificationReport,
    }

    fn fixture() -> &'static Fixture {
        static F: OnceLock<Fixture> = OnceLock::new();
        F.get_or_init(|| {
            let p = find_valid_params(&SearchConfig::default()).unwrap();
            let surface = Surface::new(p, &ValidationConfig::default()).unwrap();
            let cfg = AnalysisConfig::default();
            let atlas = HAtlas::build(&surface, &cfg).unwrap();
            let report = classify_with(&surface, &atlas, &cfg).unwrap();
            Fixture {
                surface,
                atlas,
                report,
            }
        })
    }

    fn choice(s: &str) -> ResolutionChoice {
        s.parse().unwrap()
    }

    #[test]
    fn types_per_interval() {
        let t = &fixture().report.types;
        assert_eq!(t.get(IntervalLabel::I1), Some(ConicType::Special));
        assert_eq!(t.get(IntervalLabel::I2), Some(ConicType::Orbit));
        assert_eq!(t.get(IntervalLabel::I3), Some(ConicType::Special));
        assert_eq!(t.get(IntervalLabel::I4Minus), Some(ConicType::Generic));
        assert_eq!(t.lambda0_plane, "Line");
        assert!(t.entries.iter().all(|e| e.confirmed));
    }

    #[test]
    fn exactly_two_survivors() {
        let r = &fixture().report;
        assert_eq!(r.status, Status::Pass);
        let mut got = r.survivors.clone().unwrap();
        got.sort();
        let mut want = expected_survivors().to_vec();
        want.sort();
        assert_eq!(got, want);
        assert_eq!(r.traces.len(), 48);
        for t in &r.traces {
            assert_eq!(t.verdict == Verdict::Eliminated, !t.reasons.is_empty());
        }
    }

    #[test]
    fn pair_x0_x0plusx1_fails_a() {
        for t in &fixture().report.traces {
            let pair = [t.choice.ell1, t.choice.ell2];
            if pair.contains(&LinearForm::X0) && pair.contains(&LinearForm::X0plusX1) {
                assert_eq!(t.verdict, Verdict::Eliminated);
                assert_eq!(t.reasons[0].constraint, ConstraintLabel::A);
            }
        }
    }

    #[test]
    fn x0plusx1_first_fails_c_at_minus_one() {
        for t in &fixture().report.traces {
            if t.choice.ell1 == LinearForm::X0plusX1 && t.over_i1 == Component::Plus {
                assert!(t.reasons.iter().any(|r| matches!(
                    r.witness,
                    Witness::LimitMismatch {
                        at: EndpointLabel::MinusOne,
                        below_limit: LimitClass::Infinity,
                        ..
                    }
                )));
            }
        }
    }

    #[test]
    fn elimination_is_monotone() {
        let f = fixture();
        for t in &f.report.traces {
            let steps = replay(&f.atlas, t.choice, t.over_i1, 1e-3);
            assert_eq!(steps[0], Verdict::Survives);
            assert_eq!(*steps.last().unwrap(), t.verdict);
            let first = steps
                .iter()
                .position(|v| *v == Verdict::Eliminated)
                .unwrap_or(steps.len());
            assert!(steps[first..].iter().all(|v| *v == Verdict::Eliminated));
        }
    }

    #[test]
    fn witnesses_reverify() {
        let f = fixture();
        let cfg = AnalysisConfig::default();
        for t in f
            .report
            .traces
            .iter()
            .filter(|t| t.verdict == Verdict::Eliminated)
        {
            for r in &t.reasons {
                assert!(
                    verify_witness(&f.surface, &r.witness, &cfg).unwrap(),
                    "{:?}",
                    r.witness
                );
            }
        }
    }

    #[test]
    fn schedules_of_survivors() {
        let r = &fixture().report;
        let first = r
            .schedules
            .iter()
            .find(|s| s.choice == choice("X1,X0plusX1,X0"))
            .unwrap();
        let second = r
            .schedules
            .iter()
            .find(|s| s.choice == choice("AX0minusBX1,X0,X0plusX1"))
            .unwrap();
        assert_eq!(first.get(IntervalLabel::I1), Some(Selection::Plus));
        assert_eq!(first.get(IntervalLabel::I2), Some(Selection::Both));
        assert_eq!(first.get(IntervalLabel::I3), Some(Selection::Minus));
        assert_eq!(second.get(IntervalLabel::I1), Some(Selection::Minus));
        assert_eq!(second.get(IntervalLabel::I3), Some(Selection::Plus));
        for s in [first, second] {
            assert_ne!(s.get(IntervalLabel::I4Minus), s.get(IntervalLabel::I4Plus));
        }
        assert_ne!(
            first.get(IntervalLabel::I4Minus),
            second.get(IntervalLabel::I4Minus)
        );
        assert_eq!(first.path, [Gamma::Gamma1, Gamma::Gamma2, Gamma::Gamma3]);
        assert_eq!(second.path, [Gamma::Gamma3, Gamma::Gamma2, Gamma::Gamma1]);
    }

    #[test]
    fn non_survivor_has_no_schedule() {
        let f = fixture();
        let elimination = eliminate_with(&f.atlas, 1e-3);
        let s = Survivor {
            choice: choice("X0,X0plusX1,X1"),
            over_i1: Component::Plus,
        };
        assert!(matches!(
            component_schedule(&s, &elimination, &f.atlas),
            Err(ClassifyError::NotSurvivor(_))
        ));
    }

    #[test]
    fn unclassifiable_limit_makes_report_inconclusive() {
        let f = fixture();
        let mut atlas = f.atlas.clone();
        for e in &mut atlas.limits {
            e.outcome = crate::analysis::LimitOutcome::Unclassifiable {
                reason: "forced".into(),
            };
        }
        let e = eliminate_with(&atlas, 1e-3);
        assert!(e.is_inconclusive());
        assert!(e.traces.iter().all(|t| t.verdict != Verdict::Survives));
    }
}
