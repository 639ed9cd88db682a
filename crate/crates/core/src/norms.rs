//! Norm evaluators for `Λ_{p,w}`, `Γ_{p,w}` and Orlicz spaces, plus the
//! fundamental function `φ(t) = ‖χ_(0,t)‖`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{golden_min, integrate, QUAD_REL_TOL};
use crate::orlicz::{modular, OrliczSpec};
use crate::rearrange::{maximal_curve, rearrange, CurveSegment};
use crate::step::{self, Alpha, StepFunction};
use crate::weight::WeightSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrliczFlavor {
    Luxemburg,
    Orlicz,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceKind {
    LorentzLambda { p: f64, weight: WeightSpec },
    LorentzGamma { p: f64, weight: WeightSpec },
    Orlicz { psi: OrliczSpec, flavor: OrliczFlavor },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct RawSpace {
    #[serde(flatten)]
    kind: SpaceKind,
    alpha: Alpha,
}

/// A tagged norm evaluator on `[0, alpha)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct SpaceHandle {
    kind: SpaceKind,
    alpha: Alpha,
}

impl RawSpace {
    pub(crate) fn into_handle(self) -> Result<SpaceHandle> {
        SpaceHandle::new(self.kind, self.alpha)
    }
}

impl TryFrom<RawSpace> for SpaceHandle {
    type Error = Error;
    fn try_from(raw: RawSpace) -> Result<Self> {
        SpaceHandle::new(raw.kind, raw.alpha)
    }
}

impl From<SpaceHandle> for RawSpace {
    fn from(s: SpaceHandle) -> Self {
        RawSpace {
            kind: s.kind,
            alpha: s.alpha,
        }
    }
}

impl SpaceHandle {
    /// Restricts weights to `(0, alpha)` and checks `p > 0`; `Γ` additionally
    /// requires the weight to be in `D_p`.
    pub fn new(kind: SpaceKind, alpha: Alpha) -> Result<Self> {
        let kind = match kind {
            SpaceKind::LorentzLambda { p, weight } => {
                check_p(p)?;
                let weight = weight.restrict(alpha)?;
                if !weight.locally_integrable() {
                    return Err(Error::InvalidWeight("W(t) = inf near the origin".into()));
                }
                SpaceKind::LorentzLambda { p, weight }
            }
            SpaceKind::LorentzGamma { p, weight } => {
                check_p(p)?;
                let weight = weight.restrict(alpha)?;
                weight.require_dp(p)?;
                SpaceKind::LorentzGamma { p, weight }
            }
            k @ SpaceKind::Orlicz { .. } => k,
        };
        Ok(SpaceHandle { kind, alpha })
    }

    pub fn lambda(p: f64, weight: WeightSpec, alpha: Alpha) -> Result<Self> {
        Self::new(SpaceKind::LorentzLambda { p, weight }, alpha)
    }

    pub fn gamma(p: f64, weight: WeightSpec, alpha: Alpha) -> Result<Self> {
        Self::new(SpaceKind::LorentzGamma { p, weight }, alpha)
    }

    pub fn orlicz(psi: OrliczSpec, flavor: OrliczFlavor, alpha: Alpha) -> Self {
        SpaceHandle {
            kind: SpaceKind::Orlicz { psi, flavor },
            alpha,
        }
    }

    /// `L^p` realised as the Luxemburg Orlicz space of `|u|^p`.
    pub fn lp(p: f64, alpha: Alpha) -> Self {
        Self::orlicz(OrliczSpec::power(p), OrliczFlavor::Luxemburg, alpha)
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn norm(&self, x: &StepFunction) -> Result<f64> {
        if x.alpha() != self.alpha {
            return Err(Error::AlphaMismatch(format!(
                "function on [0, {}) evaluated in a space on [0, {})",
                x.alpha(),
                self.alpha
            )));
        }
        match &self.kind {
            SpaceKind::LorentzLambda { p, weight } => lambda_norm(x, *p, weight),
            SpaceKind::LorentzGamma { p, weight } => gamma_norm(x, *p, weight),
            SpaceKind::Orlicz { psi, flavor } => match flavor {
                OrliczFlavor::Luxemburg => luxemburg_norm(x, psi),
                OrliczFlavor::Orlicz => orlicz_norm(x, psi),
            },
        }
    }

    /// `‖x − y‖`.
    pub fn distance(&self, x: &StepFunction, y: &StepFunction) -> Result<f64> {
        self.norm(&step::sub(x, y)?)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("p must be in (0, inf), got {p}")))
    }
}

/// `(∫ (x*)^p w)^{1/p}`, exact per piece of `x*` through increments of `W`.
pub fn lambda_norm(x: &StepFunction, p: f64, w: &WeightSpec) -> Result<f64> {
    check_p(p)?;
    let w = w.restrict(x.alpha())?;
    let mut acc = 0.0;
    for piece in rearrange(x).pieces() {
        let dw = w.moment(piece.t0, piece.t1, 0.0)?;
        if dw.is_infinite() {
            return Err(Error::Divergent("W is infinite near the origin".into()));
        }
        acc += piece.v.powf(p) * dw;
    }
    Ok(acc.powf(1.0 / p))
}

/// Largest integer exponent handled by binomial expansion in [`gamma_norm`].
const BINOMIAL_MAX_P: f64 = 16.0;

/// `∫_{t0}^{t1} (level + mass/t)^p w(t) dt` on one refinement cell.
fn gamma_cell(seg: CurveSegment, t0: f64, t1: f64, p: f64, w: &WeightSpec) -> Result<f64> {
    let CurveSegment { mass, level } = seg;
    if mass == 0.0 {
        return Ok(level.powf(p) * w.moment(t0, t1, 0.0)?);
    }
    if level == 0.0 {
        return Ok(mass.powf(p) * w.moment(t0, t1, -p)?);
    }
    if p.fract() == 0.0 && p <= BINOMIAL_MAX_P {
        // (B + A/t)^n = Σ C(n,k) B^{n-k} A^k t^{-k}; every term is >= 0.
        let n = p as i32;
        let mut binom = 1.0;
        let mut acc = 0.0;
        for k in 0..=n {
            acc += binom * level.powi(n - k) * mass.powi(k) * w.moment(t0, t1, -(k as f64))?;
            binom = binom * (n - k) as f64 / (k + 1) as f64;
        }
        return Ok(acc);
    }
    let mut acc = 0.0;
    for piece in w.pieces() {
        let lo = piece.t0.max(t0);
        let hi = piece.t1.min(t1);
        if hi <= lo || piece.c == 0.0 {
            continue;
        }
        // u = ln t keeps the integrand smooth across decades.
        acc += integrate(
            |u: f64| {
                let t = u.exp();
                (level + mass / t).powf(p) * piece.eval(t) * t
            },
            lo.ln(),
            hi.ln(),
            QUAD_REL_TOL,
            0.0,
        )?;
    }
    Ok(acc)
}

/// `(∫ (x**)^p w)^{1/p}`.
///
/// Cells of `x*` before the first jump carry `x** = x*(0)` and cells past the
/// support carry `x** = ∫x*/t`; both integrate in closed form through the
/// weight moments. Interior cells use binomial expansion for integer `p` and
/// adaptive quadrature otherwise.
pub fn gamma_norm(x: &StepFunction, p: f64, w: &WeightSpec) -> Result<f64> {
    check_p(p)?;
    let w = w.restrict(x.alpha())?;
    w.require_dp(p)?;
    if x.is_zero() {
        return Ok(0.0);
    }
    let curve = maximal_curve(x);
    let extra: Vec<f64> = w.pieces().iter().map(|pc| pc.t1).collect();
    let mut acc = 0.0;
    for (t0, t1, seg) in curve.refined_segments(&extra) {
        acc += gamma_cell(seg, t0, t1, p, &w)?;
    }
    if !acc.is_finite() {
        return Err(Error::Divergent("Gamma integral".into()));
    }
    Ok(acc.powf(1.0 / p))
}

/// Bisection bound on the number of halvings in [`luxemburg_norm`].
const LUX_MAX_ITERS: usize = 2_000;

/// `inf{λ > 0 : ρ_ψ(x/λ) <= 1}`, by bracketing and bisection on the
/// nonincreasing map `λ ↦ ρ_ψ(x/λ)`; returns the upper bracket.
pub fn luxemburg_norm(x: &StepFunction, psi: &OrliczSpec) -> Result<f64> {
    if x.is_zero() {
        return Ok(0.0);
    }
    let rho = |lambda: f64| modular(&step::scale(x, 1.0 / lambda).expect("finite"), psi);
    let mut hi = x.sup_abs();
    let mut n = 0;
    while !(rho(hi) <= 1.0) {
        hi *= 2.0;
        n += 1;
        if n > LUX_MAX_ITERS || !hi.is_finite() {
            return Err(Error::Domain("Luxemburg search unbounded: modular never <= 1".into()));
        }
    }
    let mut lo = hi;
    n = 0;
    while rho(lo) <= 1.0 {
        lo *= 0.5;
        n += 1;
        if n > LUX_MAX_ITERS || lo == 0.0 {
            return Err(Error::Domain("Luxemburg search: modular stays <= 1 near 0".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-15 * hi || mid <= lo || mid >= hi {
            break;
        }
        if rho(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Orlicz (dual) norm in Amemiya form, `inf_{k>0} (1 + ρ_ψ(kx)) / k`.
///
/// With `s = 1/k` the objective `s + s ρ_ψ(x/s)` is a perspective of a
/// convex function, hence convex in `s`; its minimum lies in `(0, 2‖x‖_ψ]`
/// because the Luxemburg norm `L` gives `g(L) <= 2L`.
pub fn orlicz_norm(x: &StepFunction, psi: &OrliczSpec) -> Result<f64> {
    if x.is_zero() {
        return Ok(0.0);
    }
    let lux = luxemburg_norm(x, psi)?;
    let g = |s: f64| s + s * modular(&step::scale(x, 1.0 / s).expect("finite"), psi);
    let hi = 2.0 * lux;
    let lo = (1e-12 * lux).max(x.sup_abs() / psi.finite_domain_end());
    let (_, val) = golden_min(lo, hi, 1e-13 * hi, g);
    Ok(val.min(g(lux)))
}

/// `φ(t) = ‖χ_(0,t)‖` in the given space.
///
/// `Γ` uses `(W(t) + W_p(t))^{1/p}`, `Λ` uses `W(t)^{1/p}`; Orlicz spaces go
/// through the generic norm path.
pub fn fundamental_function(space: &SpaceHandle, t: f64) -> Result<f64> {
    let end = space.alpha().as_f64();
    if !(t > 0.0 && t <= end && t.is_finite()) {
        return Err(Error::Domain(format!("t = {t} outside (0, {})", space.alpha())));
    }
    match space.kind() {
        SpaceKind::LorentzLambda { p, weight } => Ok(weight.big_w(t)?.powf(1.0 / p)),
        SpaceKind::LorentzGamma { p, weight } => {
            Ok((weight.big_w(t)? + weight.big_w_p(*p, t)?).powf(1.0 / p))
        }
        SpaceKind::Orlicz { .. } => space.norm(&StepFunction::indicator(space.alpha(), 0.0, t, 1.0)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::step::Alpha::Infinite;
    use crate::weight::WeightPiece;

    fn f(triples: &[(f64, f64, f64)]) -> StepFunction {
        StepFunction::from_triples(Infinite, triples).unwrap()
    }

    #[test]
    fn lambda_examples() {
        let x = f(&[(0.0, 1.0, 3.0), (4.0, 6.0, -1.5)]);
        let lp = (3f64.powi(2) + 2.0 * 1.5f64.powi(2)).sqrt();
        assert!((lambda_norm(&x, 2.0, &WeightSpec::constant(1.0)).unwrap() - lp).abs() < 1e-14);
        let chi = f(&[(0.0, 1.0, 1.0)]);
        let v = lambda_norm(&chi, 2.0, &WeightSpec::power(1.0, -0.5)).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(lambda_norm(&StepFunction::zero(Infinite), 2.0, &WeightSpec::constant(1.0)).unwrap(), 0.0);
    }

    #[test]
    fn gamma_indicator_identity() {
        for w in [WeightSpec::constant(1.0), WeightSpec::power(1.0, -0.5)] {
            for p in [1.5, 2.0, 3.0] {
                for t in [0.3, 1.0, 7.5] {
                    let chi = f(&[(0.0, t, 1.0)]);
                    let want = (w.big_w(t).unwrap() + w.big_w_p(p, t).unwrap()).powf(1.0 / p);
                    let got = gamma_norm(&chi, p, &w).unwrap();
                    assert!((got - want).abs() < 1e-12 * want, "{p} {t}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn gamma_rejects_non_dp() {
        let chi = f(&[(0.0, 1.0, 1.0)]);
        assert!(matches!(
            gamma_norm(&chi, 2.0, &WeightSpec::power(1.0, 1.5)),
            Err(Error::NotInDp(_))
        ));
        assert!(SpaceHandle::gamma(2.0, WeightSpec::power(1.0, -1.0), Infinite).is_err());
    }

    #[test]
    fn gamma_integer_and_fractional_paths_agree() {
        // p = 2 by binomial expansion vs. p = 2 + 1e-9 by quadrature.
        let x = f(&[(0.0, 1.0, 3.0), (2.0, 3.5, 1.0), (5.0, 5.5, 2.0)]);
        let w = WeightSpec::new(vec![
            WeightPiece::new(0.0, 2.0, 1.0, -0.5, 0.0),
            WeightPiece::new(2.0, f64::INFINITY, 0.5, -0.3, 0.5),
        ])
        .unwrap();
        let a = gamma_norm(&x, 2.0, &w).unwrap();
        let b = gamma_norm(&x, 2.0 + 1e-9, &w).unwrap();
        assert!((a - b).abs() < 1e-7 * a, "{a} vs {b}");
    }

    #[test]
    fn orlicz_examples() {
        let chi4 = f(&[(0.0, 4.0, 1.0)]);
        assert!((luxemburg_norm(&chi4, &OrliczSpec::power(2.0)).unwrap() - 2.0).abs() < 1e-12);
        let chi1 = f(&[(0.0, 1.0, 1.0)]);
        let sp = OrliczSpec::shifted_power(1.0, 2.0).unwrap();
        assert!((luxemburg_norm(&chi1, &sp).unwrap() - 0.5).abs() < 1e-12);
        assert!((orlicz_norm(&chi1, &OrliczSpec::power(2.0)).unwrap() - 2.0).abs() < 1e-9);
        let z = StepFunction::zero(Infinite);
        assert_eq!(luxemburg_norm(&z, &OrliczSpec::power(2.0)).unwrap(), 0.0);
        assert_eq!(orlicz_norm(&z, &OrliczSpec::power(2.0)).unwrap(), 0.0);
    }

    #[test]
    fn orlicz_norm_of_l1_is_l1() {
        let x = f(&[(0.0, 1.0, 3.0), (2.0, 4.0, -0.5)]);
        let v = orlicz_norm(&x, &OrliczSpec::power(1.0)).unwrap();
        assert!((v - 4.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn fundamental_examples() {
        let g = SpaceHandle::gamma(2.0, WeightSpec::constant(1.0), Infinite).unwrap();
        assert!((fundamental_function(&g, 1.0).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        let l3 = SpaceHandle::lp(3.0, Infinite);
        for t in [0.5, 2.0, 10.0] {
            let v = fundamental_function(&l3, t).unwrap();
            assert!((v - t.powf(1.0 / 3.0)).abs() < 1e-12);
        }
        assert!(fundamental_function(&g, 1e-12).unwrap() < 1e-5);
        assert!(fundamental_function(&g, 0.0).is_err());
    }

    #[test]
    fn space_json() {
        let s: SpaceHandle = serde_json::from_str(
            r#"{"kind":"lorentz_gamma","p":2,"alpha":"inf","weight":{"pieces":[{"t0":0,"t1":"inf","c":1,"a":-0.5}]}}"#,
        )
        .unwrap();
        assert!(matches!(s.kind(), SpaceKind::LorentzGamma { .. }));
        let o: SpaceHandle = serde_json::from_str(
            r#"{"kind":"orlicz","psi":{"family":"power","params":{"p":2}},"flavor":"luxemburg","alpha":"1"}"#,
        )
        .unwrap();
        assert_eq!(o.alpha(), Alpha::Unit);
        let back: SpaceHandle = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<SpaceHandle>(
            r#"{"kind":"lorentz_gamma","p":2,"alpha":"inf","weight":{"pieces":[{"t0":0,"t1":"inf","c":1,"a":1.5}]}}"#
        )
        .is_err());
    }
}
