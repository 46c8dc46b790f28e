//! The 24 small resolutions at the compound `A3` point over `P∞`, the radius
//! functions `h0..h3`, and where the conic preimages meet the exceptional curves.
//!
//! A resolution blows up along `ℓ1 = 0`, then `ℓ2 = 0`, then `ℓ3 = 0`, giving
//! the exceptional chain `Γ1, Γ2, Γ3` with affine coordinates
//! `u = ξ/ℓ1`, `v = ξ/ℓ1ℓ2`, `w = ξ/ℓ1ℓ2ℓ3`. On the plane `x0 = λ x1` the
//! ratios `x1/ℓ` depend only on `λ`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conics::b_value;
use crate::series::Series;
use crate::surface::{Surface, SurfaceParams};

type C = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("needs f(λ) < 0, got f({lambda}) = {f}")]
    NeedsNegativeF { lambda: f64, f: f64 },
    #[error("needs f(λ) > 0, got f({lambda}) = {f}")]
    NeedsPositiveF { lambda: f64, f: f64 },
    #[error("λ = {lambda} is the double root λ0")]
    AtLambda0 { lambda: f64 },
    #[error("linear form {form} vanishes at λ = {lambda}")]
    FormVanishes { form: LinearForm, lambda: f64 },
    #[error("α = {alpha} lies outside the reality window [{lo}, {hi}]")]
    OutsideRealityWindow { alpha: f64, lo: f64, hi: f64 },
    #[error("series order {0} exceeds the supported maximum of 6")]
    OrderTooLarge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LinearForm {
    X0,
    X1,
    X0plusX1,
    AX0minusBX1,
}

impl LinearForm {
    pub const ALL: [LinearForm; 4] = [Self::X0, Self::X1, Self::X0plusX1, Self::AX0minusBX1];

    /// Value on the plane `x0 = λ x1`, divided by `x1`.
    pub fn restricted(self, params: &SurfaceParams, lambda: f64) -> f64 {
        match self {
            Self::X0 => lambda,
            Self::X1 => 1.0,
            Self::X0plusX1 => lambda + 1.0,
            Self::AX0minusBX1 => params.a * lambda - params.b,
        }
    }

    /// The `λ` at which the restriction vanishes.
    pub fn zero(self, params: &SurfaceParams) -> Option<f64> {
        match self {
            Self::X0 => Some(0.0),
            Self::X1 => None,
            Self::X0plusX1 => Some(-1.0),
            Self::AX0minusBX1 => Some(params.b_over_a()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::X0 => "X0",
            Self::X1 => "X1",
            Self::X0plusX1 => "X0plusX1",
            Self::AX0minusBX1 => "AX0minusBX1",
        }
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseFormError {
    #[error("unknown linear form `{0}` (expected X0, X1, X0plusX1 or AX0minusBX1)")]
    UnknownForm(String),
    #[error("a resolution needs three forms separated by commas, got `{0}`")]
    WrongArity(String),
    #[error("the forms of a resolution must be distinct")]
    Repeated,
}

impl FromStr for LinearForm {
    type Err = ParseFormError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        Self::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| ParseFormError::UnknownForm(t.to_string()))
    }
}

/// Which preimage component of a conic is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Component {
    Plus,
    Minus,
}

impl Component {
    pub fn opposite(self) -> Self {
        match self {
            Self::Plus => Self::Minus,
            Self::Minus => Self::Plus,
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Plus => "Plus",
            Self::Minus => "Minus",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ResolutionChoice {
    pub ell1: LinearForm,
    pub ell2: LinearForm,
    pub ell3: LinearForm,
}

impl ResolutionChoice {
    pub fn new(
        ell1: LinearForm,
        ell2: LinearForm,
        ell3: LinearForm,
    ) -> Result<Self, ParseFormError> {
        if ell1 == ell2 || ell1 == ell3 || ell2 == ell3 {
            return Err(ParseFormError::Repeated);
        }
        Ok(Self { ell1, ell2, ell3 })
    }

    pub fn forms(&self) -> [LinearForm; 3] {
        [self.ell1, self.ell2, self.ell3]
    }

    /// The form not used by this resolution.
    pub fn missing(&self) -> LinearForm {
        LinearForm::ALL
            .into_iter()
            .find(|f| !self.forms().contains(f))
            .expect("three distinct forms out of four")
    }
}

impl fmt::Display for ResolutionChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.ell1, self.ell2, self.ell3)
    }
}

impl FromStr for ResolutionChoice {
    type Err = ParseFormError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(ParseFormError::WrongArity(s.to_string()));
        };
        Self::new(a.parse()?, b.parse()?, c.parse()?)
    }
}

/// All ordered triples of distinct forms, lexicographic in [`LinearForm::ALL`] order.
pub fn all_resolutions() -> Vec<ResolutionChoice> {
    let mut out = Vec::with_capacity(24);
    for a in LinearForm::ALL {
        for b in LinearForm::ALL {
            for c in LinearForm::ALL {
                if let Ok(choice) = ResolutionChoice::new(a, b, c) {
                    out.push(choice);
                }
            }
        }
    }
    out
}

/// `B(λ)` of the special family; requires `f(λ) < 0`.
pub fn b_fun(params: &SurfaceParams, lambda: f64) -> Result<f64, DomainError> {
    b_value(params, lambda).ok_or(DomainError::NeedsNegativeF {
        lambda,
        f: params.f(lambda),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HKind {
    H0,
    H1,
    H2,
    H3,
}

/// A radius function with only the forms it actually depends on:
/// `h1` uses `ℓ1`, `h2` the unordered pair `{ℓ1, ℓ2}`, `h3` the unordered triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "forms")]
pub enum RadiusFn {
    H0,
    H1(LinearForm),
    H2([LinearForm; 2]),
    H3([LinearForm; 3]),
}

impl RadiusFn {
    pub fn for_choice(kind: HKind, choice: &ResolutionChoice) -> Self {
        match kind {
            HKind::H0 => Self::H0,
            HKind::H1 => Self::H1(choice.ell1),
            HKind::H2 => Self::h2(choice.ell1, choice.ell2),
            HKind::H3 => Self::h3(choice.ell1, choice.ell2, choice.ell3),
        }
    }

    pub fn h2(a: LinearForm, b: LinearForm) -> Self {
        let mut p = [a, b];
        p.sort();
        Self::H2(p)
    }

    pub fn h3(a: LinearForm, b: LinearForm, c: LinearForm) -> Self {
        let mut t = [a, b, c];
        t.sort();
        Self::H3(t)
    }

    pub fn kind(&self) -> HKind {
        match self {
            Self::H0 => HKind::H0,
            Self::H1(_) => HKind::H1,
            Self::H2(_) => HKind::H2,
            Self::H3(_) => HKind::H3,
        }
    }

    pub fn forms(&self) -> Vec<LinearForm> {
        match self {
            Self::H0 => Vec::new(),
            Self::H1(a) => vec![*a],
            Self::H2(p) => p.to_vec(),
            Self::H3(t) => t.to_vec(),
        }
    }

    /// Whether the function lives on `f > 0` (`h0`, `h2`) or `f < 0` (`h1`, `h3`).
    pub fn needs_positive_f(&self) -> bool {
        matches!(self, Self::H0 | Self::H2(_))
    }

    fn form_product(&self, params: &SurfaceParams, lambda: f64) -> Result<f64, DomainError> {
        let mut prod = 1.0;
        for form in self.forms() {
            let v = form.restricted(params, lambda);
            if v == 0.0 {
                return Err(DomainError::FormVanishes { form, lambda });
            }
            prod *= v;
        }
        Ok(prod)
    }

    fn check_sign(&self, params: &SurfaceParams, lambda: f64) -> Result<f64, DomainError> {
        let f = params.f(lambda);
        match (self.needs_positive_f(), f > 0.0, f < 0.0) {
            (true, true, _) | (false, _, true) => Ok(f),
            (true, false, _) => Err(DomainError::NeedsPositiveF { lambda, f }),
            (false, _, false) => Err(DomainError::NeedsNegativeF { lambda, f }),
        }
    }

    pub fn eval(&self, surface: &Surface, lambda: f64) -> Result<f64, DomainError> {
        let params = surface.params();
        let f = self.check_sign(params, lambda)?;
        let prod = self.form_product(params, lambda)?.abs();
        match self {
            Self::H0 => {
                if lambda == surface.lambda0() {
                    return Err(DomainError::AtLambda0 { lambda });
                }
                let d = params.disc(lambda).max(0.0);
                Ok((params.q(lambda) + d.sqrt()) / f.sqrt())
            }
            Self::H1(_) => Ok(2.0 * b_fun(params, lambda)? / prod),
            Self::H2(_) => Ok(f.sqrt() / prod),
            Self::H3(_) => Ok(-f / (2.0 * b_fun(params, lambda)? * prod)),
        }
    }

    /// `sqrt(f) x1^2 / ℓ1ℓ2` without the absolute value.
    pub fn h2_signed(&self, params: &SurfaceParams, lambda: f64) -> Result<f64, DomainError> {
        match self {
            Self::H2(_) => {
                let f = self.check_sign(params, lambda)?;
                Ok(f.sqrt() / self.form_product(params, lambda)?)
            }
            _ => Err(DomainError::NeedsPositiveF {
                lambda,
                f: params.f(lambda),
            }),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::H0 => "h0".to_string(),
            _ => {
                let names: Vec<&str> = self.forms().iter().map(|f| f.name()).collect();
                format!("{}{{{}}}", self.kind_name(), names.join(","))
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::H0 => "h0",
            Self::H1(_) => "h1",
            Self::H2(_) => "h2",
            Self::H3(_) => "h3",
        }
    }
}

impl fmt::Display for RadiusFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub fn h_function(
    kind: HKind,
    choice: &ResolutionChoice,
    surface: &Surface,
    lambda: f64,
) -> Result<f64, DomainError> {
    RadiusFn::for_choice(kind, choice).eval(surface, lambda)
}

fn product_of(
    forms: &[LinearForm],
    params: &SurfaceParams,
    lambda: f64,
) -> Result<f64, DomainError> {
    forms.iter().try_fold(1.0, |acc, &form| {
        let v = form.restricted(params, lambda);
        if v == 0.0 {
            Err(DomainError::FormVanishes { form, lambda })
        } else {
            Ok(acc * v)
        }
    })
}

/// Where the special conic's components meet the chain: `u ∈ Γ1` for `L+`
/// and `w ∈ Γ3` for `L-`. `L+` misses `Γ2, Γ3` and `L-` misses `Γ1, Γ2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialIntersections {
    pub u: C,
    pub w: C,
}

pub fn special_intersections(
    choice: &ResolutionChoice,
    params: &SurfaceParams,
    lambda: f64,
    theta: f64,
) -> Result<SpecialIntersections, DomainError> {
    let bb = b_fun(params, lambda)?;
    let f = params.f(lambda);
    let l1 = product_of(&choice.forms()[..1], params, lambda)?;
    let l123 = product_of(&choice.forms(), params, lambda)?;
    let i = C::i();
    let u = -2.0 * i * bb * C::from_polar(1.0, -theta) / l1;
    let w = -i * C::from_polar(1.0, theta) * f / (2.0 * bb * l123);
    Ok(SpecialIntersections { u, w })
}

/// The two points `v±` in which the orbit conic's components meet `Γ2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitIntersections {
    pub v_plus: C,
    pub v_minus: C,
}

pub fn orbit_intersections(
    choice: &ResolutionChoice,
    params: &SurfaceParams,
    lambda: f64,
    alpha: f64,
) -> Result<OrbitIntersections, DomainError> {
    let f = params.f(lambda);
    if !(f > 0.0) {
        return Err(DomainError::NeedsPositiveF { lambda, f });
    }
    let q = params.q(lambda);
    let s = f.sqrt();
    let (lo, hi) = (-q - s, -q + s);
    if !(lo..=hi).contains(&alpha) {
        return Err(DomainError::OutsideRealityWindow { alpha, lo, hi });
    }
    let l12 = product_of(&choice.forms()[..2], params, lambda)?;
    let shifted = alpha + q;
    let radicand = f - shifted * shifted;
    // rounding at the window ends
    let z = if radicand <= 4.0 * f64::EPSILON * f {
        0.0
    } else {
        radicand.sqrt()
    };
    Ok(OrbitIntersections {
        v_plus: C::new(z, shifted) / l12,
        v_minus: C::new(-z, shifted) / l12,
    })
}

/// Expansions along one preimage component of a special conic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSeries {
    pub z: Vec<C>,
    pub xi: Vec<C>,
    pub eta: Vec<C>,
}

/// Maclaurin expansions in `x1` of the special conic near `P∞`.
/// The double cover is `z^2 + (x2 + Q x1^2)^2 = f x1^4`, and
/// `ξ = z + i(x2 + Q x1^2)`, `η = z - i(x2 + Q x1^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPresentation {
    pub lambda: f64,
    pub theta: f64,
    pub order: usize,
    pub x2: Vec<C>,
    pub plus: ComponentSeries,
    pub minus: ComponentSeries,
}

impl SeriesPresentation {
    pub fn component(&self, c: Component) -> &ComponentSeries {
        match c {
            Component::Plus => &self.plus,
            Component::Minus => &self.minus,
        }
    }

    fn eval(coeffs: &[C], x: C) -> C {
        coeffs
            .iter()
            .rev()
            .fold(C::new(0.0, 0.0), |acc, c| acc * x + c)
    }

    /// `|z^2 + (x2 + Q x1^2)^2 - f x1^4|` with the truncated series substituted.
    pub fn cover_residual(&self, params: &SurfaceParams, component: Component, x1: C) -> f64 {
        let q = params.q(self.lambda);
        let f = params.f(self.lambda);
        let z = Self::eval(&self.component(component).z, x1);
        let t = Self::eval(&self.x2, x1) + q * x1 * x1;
        (z * z + t * t - f * x1.powi(4)).norm()
    }

    /// `|ξ η - f x1^4|` with the truncated series substituted.
    pub fn product_residual(&self, params: &SurfaceParams, component: Component, x1: C) -> f64 {
        let f = params.f(self.lambda);
        let s = self.component(component);
        (Self::eval(&s.xi, x1) * Self::eval(&s.eta, x1) - f * x1.powi(4)).norm()
    }
}

pub fn series_presentation(
    params: &SurfaceParams,
    lambda: f64,
    theta: f64,
    order: usize,
) -> Result<SeriesPresentation, DomainError> {
    if order > 6 {
        return Err(DomainError::OrderTooLarge(order));
    }
    let bb = b_fun(params, lambda)?;
    let f = params.f(lambda);
    let q = params.q(lambda);
    let root = params.disc(lambda).sqrt();
    let n = order.max(1);
    let i = C::i();
    let rot = C::from_polar(1.0, theta);
    let x = Series::variable(n);
    // g(x) = (B e^{-iθ} + sqrt(Q^2 - f) x) / (1 + B e^{iθ} x)
    let num = &Series::constant(bb * rot.conj(), n) + &x.scale(C::new(root, 0.0));
    let den = &Series::constant(C::new(1.0, 0.0), n) + &x.scale(bb * rot);
    let g = num.div(&den).expect("unit constant term");
    let x2 = -&g.shift(1);
    // k^2 = (f - Q^2) x^2 + 2 Q g x - g^2, so that z = k x1 on the conic
    let radicand = &(&x.shift(1).scale(C::new(f - q * q, 0.0))
        + &g.shift(1).scale(C::new(2.0 * q, 0.0)))
        - &(&g * &g);
    let quad = Series::variable(n).shift(1).scale(i * q);
    let build = |k0: C| -> ComponentSeries {
        let k = radicand.sqrt_with(k0).expect("B > 0");
        let z = k.shift(1);
        let ig = g.shift(1).scale(i);
        let xi = &(&z - &ig) + &quad;
        let eta = &(&z + &ig) - &quad;
        let trunc = |s: Series| s.coeffs()[..=order].to_vec();
        ComponentSeries {
            z: trunc(z),
            xi: trunc(xi),
            eta: trunc(eta),
        }
    };
    let k0 = i * bb * rot.conj();
    Ok(SeriesPresentation {
        lambda,
        theta,
        order,
        x2: x2.coeffs()[..=order].to_vec(),
        plus: build(-k0),
        minus: build(k0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{find_valid_params, SearchConfig, ValidationConfig};
    use proptest::prelude::*;
    use std::collections::HashSet;
    use std::f64::consts::PI;
    use std::sync::OnceLock;

    fn surface() -> &'static Surface {
        static S: OnceLock<Surface> = OnceLock::new();
        S.get_or_init(|| {
            let p = find_valid_params(&SearchConfig::default()).unwrap();
            Surface::new(p, &ValidationConfig::default()).unwrap()
        })
    }

    fn choice(s: &str) -> ResolutionChoice {
        s.parse().unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn twenty_four_distinct_resolutions() {
        let all = all_resolutions();
        assert_eq!(all.len(), 24);
        let set: HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), 24);
        assert!(all.contains(&choice("X1,X0plusX1,X0")));
        assert!(all
            .iter()
            .all(|c| c.ell1 != c.ell2 && c.ell2 != c.ell3 && c.ell1 != c.ell3));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            "X0,X0,X1".parse::<ResolutionChoice>(),
            Err(ParseFormError::Repeated)
        ));
        assert!(matches!(
            "X0,X1".parse::<ResolutionChoice>(),
            Err(ParseFormError::WrongArity(_))
        ));
        assert!(matches!(
            "X0,X1,Y".parse::<ResolutionChoice>(),
            Err(ParseFormError::UnknownForm(_))
        ));
        let c = choice("AX0minusBX1,X0,X0plusX1");
        assert_eq!(c.to_string(), "AX0minusBX1,X0,X0plusX1");
        assert_eq!(c.missing(), LinearForm::X1);
    }

    #[test]
    fn form_zeros() {
        let p = surface().params();
        for form in LinearForm::ALL {
            if let Some(z) = form.zero(p) {
                assert_eq!(form.restricted(p, z), 0.0);
            }
        }
        assert_eq!(LinearForm::X1.zero(p), None);
    }

    #[test]
    fn b_identities() {
        let p = surface().params();
        for lambda in [-5.0, -1.5, -1.01, 0.01, 0.5, 0.99] {
            let b = b_fun(p, lambda).unwrap();
            assert!(b > 0.0);
            let (q, f) = (p.q(lambda), p.f(lambda));
            let s = (q * q - f).sqrt();
            assert!((4.0 * b * b + 2.0 * q - 2.0 * s).abs() <= 1e-12 * (q.abs() + s));
            assert!(
                (4.0 * b.powi(4) + 4.0 * q * b * b + f).abs()
                    <= 1e-12 * (4.0 * (q * b * b).abs() + f.abs())
            );
        }
        assert!(matches!(
            b_fun(p, -0.5),
            Err(DomainError::NeedsNegativeF { .. })
        ));
    }

    #[test]
    fn h2_square_for_x0_x1() {
        let s = surface();
        let (a, b) = (s.params().a, s.params().b);
        let c = choice("X0,X1,X0plusX1");
        for lambda in [-0.8, -0.2, 1.5, 4.0] {
            let h = h_function(HKind::H2, &c, s, lambda).unwrap();
            let expected = (lambda + 1.0) * (a * lambda - b) / lambda;
            assert!(rel(h * h, expected) < 1e-12);
        }
    }

    #[test]
    fn h1_for_x1() {
        let s = surface();
        let c = choice("X1,X0,X0plusX1");
        for lambda in [-3.0, -1.2, 0.4] {
            let h = h_function(HKind::H1, &c, s, lambda).unwrap();
            let (q, f) = (s.q(lambda), s.f(lambda));
            assert!(rel(h * h, 2.0 * ((q * q - f).sqrt() - q)) < 1e-9);
        }
        let near = h_function(HKind::H1, &c, s, -1.0 - 1e-12).unwrap();
        assert!(near < 1e-5);
    }

    #[test]
    fn domain_errors() {
        let s = surface();
        let c = choice("X0,X1,X0plusX1");
        assert!(matches!(
            h_function(HKind::H1, &c, s, -0.5),
            Err(DomainError::NeedsNegativeF { .. })
        ));
        assert!(matches!(
            h_function(HKind::H2, &c, s, -2.0),
            Err(DomainError::NeedsPositiveF { .. })
        ));
        assert!(matches!(
            h_function(HKind::H0, &c, s, s.lambda0()),
            Err(DomainError::AtLambda0 { .. })
        ));
    }

    #[test]
    fn h2_ignores_third_form() {
        let s = surface();
        let a = h_function(HKind::H2, &choice("X0,X1,X0plusX1"), s, -0.4).unwrap();
        let b = h_function(HKind::H2, &choice("X1,X0,AX0minusBX1"), s, -0.4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn h2_signed_keeps_sign() {
        let s = surface();
        let h = RadiusFn::h2(LinearForm::X0, LinearForm::X1);
        assert!(h.h2_signed(s.params(), -0.5).unwrap() < 0.0);
        assert_eq!(
            h.h2_signed(s.params(), -0.5).unwrap().abs(),
            h.eval(s, -0.5).unwrap()
        );
    }

    #[test]
    fn special_circle_winds_once() {
        let s = surface();
        let c = choice("X0,X1,X0plusX1");
        let lambda = -2.0;
        let h1 = h_function(HKind::H1, &c, s, lambda).unwrap();
        let mut total = 0.0;
        let mut prev: Option<C> = None;
        for k in 0..=24 {
            let theta = 2.0 * PI * k as f64 / 24.0;
            let p = special_intersections(&c, s.params(), lambda, theta).unwrap();
            assert!(rel(p.u.norm(), h1) < 1e-12);
            if let Some(q) = prev {
                total += (p.u / q).arg();
            }
            prev = Some(p.u);
        }
        assert!(((total / (2.0 * PI)).abs() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn orbit_window_endpoints() {
        let s = surface();
        let c = choice("X0,X1,X0plusX1");
        let lambda = -0.5;
        let (q, f) = (s.q(lambda), s.f(lambda));
        let end = orbit_intersections(&c, s.params(), lambda, -q + f.sqrt()).unwrap();
        assert_eq!(end.v_plus, end.v_minus);
        assert_eq!(end.v_plus.re, 0.0);
        let mid = orbit_intersections(&c, s.params(), lambda, -q).unwrap();
        assert_eq!(mid.v_plus.im, 0.0);
        let err = orbit_intersections(&c, s.params(), lambda, -q + f.sqrt() + 1e-3);
        assert!(matches!(err, Err(DomainError::OutsideRealityWindow { .. })));
    }

    #[test]
    fn series_leading_coefficients() {
        let s = surface();
        let (lambda, theta) = (-2.5, 0.7);
        let p = s.params();
        let sp = series_presentation(p, lambda, theta, 4).unwrap();
        let b = b_fun(p, lambda).unwrap();
        let (q, f) = (p.q(lambda), p.f(lambda));
        let root = (q * q - f).sqrt();
        let rot = C::from_polar(1.0, theta);
        let i = C::i();
        let close = |a: C, b: C| (a - b).norm() <= 1e-12 * b.norm().max(1.0);
        assert!(close(sp.x2[1], -b * rot.conj()));
        assert!(close(sp.x2[2], C::new(-(root + q) / 2.0, 0.0)));
        assert!(close(sp.x2[3], b * rot * (root + q) / 2.0));
        assert!(close(sp.plus.xi[1], -2.0 * i * b * rot.conj()));
        assert!(sp.plus.eta[1].norm() < 1e-14 && sp.plus.eta[2].norm() < 1e-12);
        assert!(close(sp.plus.eta[3], i * rot * f / (2.0 * b)));
        assert!(close(sp.minus.eta[1], 2.0 * i * b * rot.conj()));
        assert!(matches!(
            series_presentation(p, lambda, theta, 7),
            Err(DomainError::OrderTooLarge(7))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn reciprocity_of_h1_and_h3(t in 0.02f64..0.98, left in any::<bool>(), k in 0usize..24) {
            let s = surface();
            let lambda = if left { -1.0 - 6.0 * t } else { t * s.params().b_over_a() };
            let c = all_resolutions()[k];
            let h3 = h_function(HKind::H3, &c, s, lambda).unwrap();
            let h1 = RadiusFn::H1(c.missing()).eval(s, lambda).unwrap();
            let all: f64 = LinearForm::ALL.iter().map(|f| f.restricted(s.params(), lambda)).product();
            prop_assert!(rel(h3 * h1, -s.f(lambda) / all.abs()) < 1e-12);
        }

        #[test]
        fn orbit_radius_is_h2(t in 0.0f64..=1.0, lambda in -0.95f64..-0.05, k in 0usize..24) {
            let s = surface();
            let c = all_resolutions()[k];
            let (q, f) = (s.q(lambda), s.f(lambda));
            let alpha = -q - f.sqrt() + 2.0 * f.sqrt() * t;
            let v = orbit_intersections(&c, s.params(), lambda, alpha).unwrap();
            let h2 = h_function(HKind::H2, &c, s, lambda).unwrap();
            prop_assert!(rel(v.v_plus.norm(), h2) < 1e-12);
            prop_assert!(rel(v.v_minus.norm(), h2) < 1e-12);
        }

        #[test]
        fn series_solves_cover_equation(t in 0.02f64..0.98, left in any::<bool>(), theta in 0.0f64..(2.0 * PI), arg in 0.0f64..(2.0 * PI)) {
            let s = surface();
            let lambda = if left { -1.0 - 4.0 * t } else { t * s.params().b_over_a() };
            let sp = series_presentation(s.params(), lambda, theta, 4).unwrap();
            let x1 = C::from_polar(1e-2, arg);
            for comp in [Component::Plus, Component::Minus] {
                prop_assert!(sp.cover_residual(s.params(), comp, x1) < 1e-8);
                prop_assert!(sp.product_residual(s.params(), comp, x1) < 1e-8);
            }
        }
    }
}
