//! One function per subcommand; each fills a [`Report`].

use twistlab_core::analysis::{check_h_tables, domain_of, psi_check, AnalysisError};
use twistlab_core::classifier::classify_with;
use twistlab_core::conics::{
    min_real_form, orbit_certificates, orbit_conic, sweep_row, verify_touching, ConicRecord,
    SweepRow,
};
use twistlab_core::resolution::{all_resolutions, HKind};
use twistlab_core::surface::{find_valid_params, singular_locus, validate, OpenInterval};
use twistlab_core::{
    conics, ConicType, HAtlas, IntervalLabel, RadiusFn, ResolutionChoice, Surface, SurfaceError,
    SurfaceParams, TouchingKind,
};

use crate::args::{Command, RunConfig, UsageError};
use crate::report::{
    ConicSection, HscanRow, HscanSection, OrbitCertificate, OrbitRow, Report, Status,
    TangencySection, Timer,
};

pub fn run(command: Command, cfg: RunConfig) -> anyhow::Result<Report> {
    let mut timer = Timer::default();
    let timings = cfg.timings;
    let mut report = Report::new(command.name(), cfg);
    let mut ctx = Ctx {
        report: &mut report,
        timer: &mut timer,
    };
    match command {
        Command::Validate => ctx.validate_cmd(),
        Command::SearchParams => ctx.search_cmd(),
        Command::Conic => ctx.conic_cmd()?,
        Command::Tangency => ctx.tangency_cmd(),
        Command::Hscan => ctx.hscan_cmd(),
        Command::Critical => ctx.critical_cmd(),
        Command::Classify => ctx.classify_cmd(),
        Command::Psi => ctx.psi_cmd(),
        Command::Report => ctx.full_cmd(),
    }
    if timings {
        report.timings = Some(timer.into_stages());
    }
    Ok(report)
}

struct Ctx<'a> {
    report: &'a mut Report,
    timer: &'a mut Timer,
}

impl Ctx<'_> {
    fn cfg(&self) -> &RunConfig {
        &self.report.config
    }

    /// Explicit parameters, or the first admissible member of the tangent family.
    fn params(&mut self) -> Option<SurfaceParams> {
        if let Some(p) = self.cfg().params.values() {
            self.report.params = Some(p);
            return Some(p);
        }
        let search = self.cfg().lab.search();
        match self.timer.time("search", || find_valid_params(&search)) {
            Ok(p) => {
                self.report.params = Some(p);
                Some(p)
            }
            Err(e) => {
                if let SurfaceError::NotFound(near_miss) = &e {
                    self.report.search = Some(crate::report::SearchSection {
                        found: false,
                        near_miss: *near_miss,
                    });
                }
                self.report.fail(Status::Fail, e);
                None
            }
        }
    }

    /// Records the validation report and returns the surface when it passes.
    fn surface(&mut self) -> Option<Surface> {
        let params = self.params()?;
        let validation = self.cfg().lab.validation();
        let outcome = self
            .timer
            .time("validate", || validate(&params, &validation));
        match outcome {
            Ok(r) => {
                let passed = r.passed();
                self.report.validation = Some(r);
                if !passed {
                    self.report.degrade(Status::Fail);
                    return None;
                }
            }
            Err(e) => {
                self.report.fail(Status::Fail, e);
                return None;
            }
        }
        match Surface::new(params, &validation) {
            Ok(s) => Some(s),
            Err(e) => {
                self.report.fail(Status::Fail, e);
                None
            }
        }
    }

    fn singular_locus(&mut self, params: &SurfaceParams) {
        let roots = self.cfg().lab.roots();
        match self
            .timer
            .time("singular_locus", || singular_locus(params, &roots))
        {
            Ok(locus) => self.report.singular_locus = Some(locus),
            Err(e) => self.report.fail(Status::Fail, e),
        }
    }

    fn validate_cmd(&mut self) {
        let _ = self.surface();
        if let Some(p) = self.report.params {
            self.singular_locus(&p);
        }
    }

    fn search_cmd(&mut self) {
        let search = self.cfg().lab.search();
        match self.timer.time("search", || find_valid_params(&search)) {
            Ok(p) => {
                self.report.params = Some(p);
                self.report.search = Some(crate::report::SearchSection {
                    found: true,
                    near_miss: None,
                });
                match validate(&p, &search.validation) {
                    Ok(r) => self.report.validation = Some(r),
                    Err(e) => self.report.fail(Status::Fail, e),
                }
            }
            Err(e) => {
                let near_miss = match &e {
                    SurfaceError::NotFound(n) => *n,
                    _ => None,
                };
                self.report.search = Some(crate::report::SearchSection {
                    found: false,
                    near_miss,
                });
                self.report.fail(Status::Fail, e);
            }
        }
    }

    fn conic_cmd(&mut self) -> anyhow::Result<()> {
        let (lambda, theta, alpha) = (
            self.cfg().lambda,
            self.cfg().theta.unwrap_or(0.0),
            self.cfg().alpha,
        );
        if lambda.is_none() && alpha.is_none() {
            return Err(UsageError(
                "conic needs --lambda (generic or special family) or --alpha (orbit family)".into(),
            )
            .into());
        }
        let Some(surface) = self.surface() else {
            return Ok(());
        };
        let lab = self.cfg().lab;
        let section = match (alpha, lambda) {
            (Some(alpha), lambda) => self.orbit_conic_section(&surface, alpha, lambda),
            (None, Some(lambda)) => {
                let Some(family) = family_at(&surface, lambda) else {
                    self.report.fail(
                        Status::Fail,
                        format!("f vanishes at λ = {lambda}; no touching conic family there"),
                    );
                    return Ok(());
                };
                let interval = surface
                    .partition()
                    .locate(lambda)
                    .unwrap_or(IntervalLabel::I4);
                let built = match family {
                    ConicType::Generic => conics::generic_conic(&surface, lambda, theta),
                    _ => conics::special_conic(surface.params(), lambda, theta),
                };
                built.and_then(|conic| {
                    let row = sweep_row(
                        &surface,
                        family,
                        interval,
                        lambda,
                        theta,
                        &lab.sweep(),
                        &lab.touch(),
                        &lab.sampler(),
                    )?;
                    let touching = verify_touching(&conic, surface.params(), lambda, &lab.touch())?;
                    Ok(ConicSection {
                        record: ConicRecord::new(
                            &conic,
                            lambda,
                            theta,
                            row.kind,
                            Some(row.min_real_form),
                        ),
                        check: Some(row),
                        touching: Some(touching),
                    })
                })
            }
            (None, None) => unreachable!("checked above"),
        };
        match section {
            Ok(s) => {
                if s.check.as_ref().is_some_and(|r| !r.pass) {
                    self.report.degrade(Status::Fail);
                }
                if s.check.is_none()
                    && s.touching
                        .as_ref()
                        .is_some_and(|t| t.kind != TouchingKind::Orbit)
                {
                    self.report.degrade(Status::Fail);
                }
                self.report.conic = Some(s);
            }
            Err(e) => self.report.fail(Status::Fail, e),
        }
        Ok(())
    }

    fn orbit_conic_section(
        &mut self,
        surface: &Surface,
        alpha: f64,
        lambda: Option<f64>,
    ) -> Result<ConicSection, conics::ConicError> {
        let lab = self.cfg().lab;
        let conic = orbit_conic(alpha)?;
        let min_form = min_real_form(&conic, &lab.sampler())?;
        let touching = lambda
            .map(|l| verify_touching(&conic, surface.params(), l, &lab.touch()))
            .transpose()?;
        let kind = touching.as_ref().map_or(TouchingKind::Orbit, |t| t.kind);
        Ok(ConicSection {
            record: ConicRecord::new(
                &conic,
                lambda.unwrap_or(f64::NAN),
                alpha,
                kind,
                Some(min_form),
            ),
            check: None,
            touching,
        })
    }

    fn tangency_cmd(&mut self) {
        let Some(surface) = self.surface() else {
            return;
        };
        let section = match self.cfg().lambda {
            Some(lambda) => self.timer.time("tangency", || {
                tangency_at(&surface, lambda, self.report.config.clone())
            }),
            None => {
                let cfg = self.cfg().clone();
                self.timer.time("tangency", || tangency_all(&surface, &cfg))
            }
        };
        self.record_tangency(section);
    }

    fn record_tangency(&mut self, section: Result<TangencySection, conics::ConicError>) {
        match section {
            Ok(s) => {
                if s.failures > 0 {
                    self.report.degrade(Status::Fail);
                }
                self.report.tangency = Some(s);
            }
            Err(e) => self.report.fail(Status::Fail, e),
        }
    }

    fn hscan_cmd(&mut self) {
        let Some(surface) = self.surface() else {
            return;
        };
        let choices = match self.cfg().choice {
            Some(c) => vec![c],
            None => all_resolutions(),
        };
        let n = self.cfg().hscan_samples;
        let rows = self
            .timer
            .time("hscan", || hscan_rows(&surface, &choices, n));
        self.report.hscan = Some(HscanSection { rows });
    }

    fn atlas(&mut self, surface: &Surface) -> Option<HAtlas> {
        let analysis = self.cfg().lab.analysis();
        match self
            .timer
            .time("atlas", || HAtlas::build(surface, &analysis))
        {
            Ok(a) => Some(a),
            Err(e) => {
                self.report.fail(analysis_status(&e), e);
                None
            }
        }
    }

    fn h_tables(&mut self, atlas: &HAtlas) {
        match self.timer.time("h_tables", || check_h_tables(atlas)) {
            Ok(t) => {
                if !t.passed {
                    self.report.degrade(Status::Fail);
                }
                self.report.h_tables = Some(t);
            }
            Err(e) => self.report.fail(analysis_status(&e), e),
        }
    }

    fn classification(&mut self, surface: &Surface, atlas: &HAtlas) {
        let analysis = self.cfg().lab.analysis();
        match self
            .timer
            .time("classify", || classify_with(surface, atlas, &analysis))
        {
            Ok(c) => {
                self.report.degrade(c.status.into());
                self.report.classification = Some(c);
            }
            Err(e) => self.report.fail(Status::Inconclusive, e),
        }
    }

    fn critical_cmd(&mut self) {
        let Some(surface) = self.surface() else {
            return;
        };
        if let Some(atlas) = self.atlas(&surface) {
            self.h_tables(&atlas);
        }
    }

    fn classify_cmd(&mut self) {
        let Some(surface) = self.surface() else {
            return;
        };
        if let Some(atlas) = self.atlas(&surface) {
            self.classification(&surface, &atlas);
        }
    }

    fn psi_cmd(&mut self) {
        let n = self.cfg().lab.psi_samples;
        let psi = self.timer.time("psi", || psi_check(n));
        if !psi.passed {
            self.report.degrade(Status::Fail);
        }
        self.report.psi = Some(psi);
    }

    fn full_cmd(&mut self) {
        let surface = self.surface();
        if let Some(p) = self.report.params {
            self.singular_locus(&p);
        }
        if let Some(surface) = surface {
            let cfg = self.cfg().clone();
            let tangency = self.timer.time("tangency", || tangency_all(&surface, &cfg));
            self.record_tangency(tangency);
            if let Some(atlas) = self.atlas(&surface) {
                self.h_tables(&atlas);
                self.classification(&surface, &atlas);
            }
        }
        self.psi_cmd();
    }
}

fn analysis_status(e: &AnalysisError) -> Status {
    match e {
        AnalysisError::Unclassifiable { .. }
        | AnalysisError::Unstable { .. }
        | AnalysisError::NoUniqueCritical { .. } => Status::Inconclusive,
        _ => Status::Fail,
    }
}

fn family_at(surface: &Surface, lambda: f64) -> Option<ConicType> {
    let f = surface.f(lambda);
    if f > 0.0 {
        Some(ConicType::Generic)
    } else if f < 0.0 {
        Some(ConicType::Special)
    } else {
        None
    }
}

fn cell_midpoints(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * (k as f64 + 0.5) / n as f64)
        .collect()
}

/// θ sweep of the family over `λ`, plus the orbit conics inside the reality window when `f(λ) > 0`.
fn tangency_at(
    surface: &Surface,
    lambda: f64,
    cfg: RunConfig,
) -> Result<TangencySection, conics::ConicError> {
    let lab = cfg.lab;
    let family =
        family_at(surface, lambda).ok_or(conics::ConicError::NoSpecialFamily { lambda, f: 0.0 })?;
    let interval = surface
        .partition()
        .locate(lambda)
        .unwrap_or(IntervalLabel::I4);
    let n = lab.theta_samples;
    let rows = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            sweep_row(
                surface,
                family,
                interval,
                lambda,
                theta,
                &lab.sweep(),
                &lab.touch(),
                &lab.sampler(),
            )
        })
        .collect::<Result<Vec<SweepRow>, _>>()?;
    let mut orbit_rows = Vec::new();
    if family == ConicType::Generic {
        let (q, s) = (surface.q(lambda), surface.f(lambda).sqrt());
        for alpha in cell_midpoints(-q - s, -q + s, lab.alpha_samples) {
            if alpha == 0.0 {
                continue;
            }
            let kind =
                verify_touching(&orbit_conic(alpha)?, surface.params(), lambda, &lab.touch())?.kind;
            orbit_rows.push(OrbitRow {
                lambda,
                alpha,
                kind,
                pass: kind == TouchingKind::Orbit,
            });
        }
    }
    let failures =
        rows.iter().filter(|r| !r.pass).count() + orbit_rows.iter().filter(|r| !r.pass).count();
    Ok(TangencySection {
        rows,
        orbit_rows,
        orbit_certificates: Vec::new(),
        failures,
    })
}

/// Every legal interval of both families, plus the sign flip of the orbit certificate.
fn tangency_all(surface: &Surface, cfg: &RunConfig) -> Result<TangencySection, conics::ConicError> {
    let lab = cfg.lab;
    let rows = conics::family_sweep(surface, &lab.sweep(), &lab.touch(), &lab.sampler())?;
    let alphas: Vec<f64> = cell_midpoints(-2.0, 2.0, lab.alpha_samples)
        .into_iter()
        .filter(|a| *a != 0.0)
        .collect();
    let orbit_certificates: Vec<OrbitCertificate> = orbit_certificates(&alphas, &lab.sampler())?
        .into_iter()
        .map(|(alpha, no_real_points)| OrbitCertificate {
            alpha,
            no_real_points,
            pass: no_real_points == (alpha < 0.0),
        })
        .collect();
    let failures = rows.iter().filter(|r| !r.pass).count()
        + orbit_certificates.iter().filter(|c| !c.pass).count();
    Ok(TangencySection {
        rows,
        orbit_rows: Vec::new(),
        orbit_certificates,
        failures,
    })
}

/// `n` points of an interval: cell midpoints when bounded, otherwise
/// log-spaced distances `1e-4 ..= 1e4` from the finite end.
fn scan_points(iv: &OpenInterval, n: usize) -> Vec<f64> {
    let dist = |k: usize| 10f64.powf(-4.0 + 8.0 * k as f64 / (n - 1) as f64);
    match (iv.lo.is_finite(), iv.hi.is_finite()) {
        (true, true) => cell_midpoints(iv.lo, iv.hi, n),
        (true, false) => (0..n).map(|k| iv.lo + dist(k)).collect(),
        (false, true) => (0..n).rev().map(|k| iv.hi - dist(k)).collect(),
        (false, false) => Vec::new(),
    }
}

fn hscan_rows(surface: &Surface, choices: &[ResolutionChoice], n: usize) -> Vec<HscanRow> {
    let mut rows = Vec::new();
    for choice in choices {
        for kind in [HKind::H0, HKind::H1, HKind::H2, HKind::H3] {
            let function = RadiusFn::for_choice(kind, choice);
            for interval in domain_of(&function) {
                for lambda in scan_points(&surface.interval(interval), n) {
                    let Ok(value) = function.eval(surface, lambda) else {
                        continue;
                    };
                    rows.push(HscanRow {
                        kind: function.kind_name(),
                        ell1: choice.ell1.name(),
                        ell2: choice.ell2.name(),
                        ell3: choice.ell3.name(),
                        interval,
                        lambda,
                        value,
                    });
                }
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_points_stay_inside() {
        for iv in [
            OpenInterval::new(-1.0, 0.0),
            OpenInterval::new(f64::NEG_INFINITY, -1.0),
            OpenInterval::new(2.0, f64::INFINITY),
        ] {
            let pts = scan_points(&iv, 16);
            assert_eq!(pts.len(), 16);
            assert!(pts.iter().all(|&x| iv.contains(x)));
            assert!(pts.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
