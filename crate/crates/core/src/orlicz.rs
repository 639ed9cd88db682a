//! Orlicz functions from a few named families, their Young conjugates and
//! the modular `ρ_ψ(x) = ∫ ψ(x(t)) dt`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::num::golden_min;
use crate::step::StepFunction;

/// An even convex Orlicz function, described by family and parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOrlicz", into = "RawOrlicz")]
pub enum OrliczSpec {
    /// `c · |u|^p`, `p >= 1`.
    Power { p: f64, c: f64 },
    /// `max(0, |u| − a)^p`, vanishing on `[−a, a]`.
    ShiftedPower { a: f64, p: f64 },
    /// `e^{|u|} − 1`.
    ExpMinusOne,
    /// Piecewise-linear interpolation of `(u, ψ(u))` knots with linear
    /// extension past the last knot, or `+∞` past `infinite_beyond`.
    Table {
        points: Vec<(f64, f64)>,
        infinite_beyond: Option<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawOrlicz {
    family: String,
    #[serde(default)]
    params: Value,
}

impl TryFrom<RawOrlicz> for OrliczSpec {
    type Error = Error;

    fn try_from(raw: RawOrlicz) -> Result<Self> {
        let num = |key: &str| -> Result<Option<f64>> {
            match raw.params.get(key) {
                None | Some(Value::Null) => Ok(None),
                Some(v) => v
                    .as_f64()
                    .map(Some)
                    .ok_or_else(|| Error::InvalidOrlicz(format!("parameter {key} must be a number"))),
            }
        };
        let need = |key: &str| -> Result<f64> {
            num(key)?.ok_or_else(|| Error::InvalidOrlicz(format!("{} needs parameter {key}", raw.family)))
        };
        match raw.family.as_str() {
            "power" => OrliczSpec::power_scaled(need("p")?, num("c")?.unwrap_or(1.0)),
            "shifted_power" => OrliczSpec::shifted_power(need("a")?, need("p")?),
            "exp_minus_one" => Ok(OrliczSpec::ExpMinusOne),
            "table" => {
                let points: Vec<(f64, f64)> = serde_json::from_value(
                    raw.params.get("points").cloned().unwrap_or(Value::Null),
                )
                .map_err(|e| Error::InvalidOrlicz(format!("table points: {e}")))?;
                OrliczSpec::table(points, num("infinite_beyond")?)
            }
            other => Err(Error::InvalidOrlicz(format!("unknown family {other:?}"))),
        }
    }
}

impl From<OrliczSpec> for RawOrlicz {
    fn from(s: OrliczSpec) -> Self {
        let (family, params) = match s {
            OrliczSpec::Power { p, c } => ("power", json!({ "p": p, "c": c })),
            OrliczSpec::ShiftedPower { a, p } => ("shifted_power", json!({ "a": a, "p": p })),
            OrliczSpec::ExpMinusOne => ("exp_minus_one", json!({})),
            OrliczSpec::Table {
                points,
                infinite_beyond,
            } => (
                "table",
                json!({ "points": points, "infinite_beyond": infinite_beyond }),
            ),
        };
        RawOrlicz {
            family: family.to_string(),
            params,
        }
    }
}

impl OrliczSpec {
    /// `|u|^p`.
    pub fn power(p: f64) -> Self {
        OrliczSpec::Power { p, c: 1.0 }
    }

    pub fn power_scaled(p: f64, c: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidOrlicz(format!("power exponent must be >= 1, got {p}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidOrlicz(format!("power coefficient must be > 0, got {c}")));
        }
        Ok(OrliczSpec::Power { p, c })
    }

    pub fn shifted_power(a: f64, p: f64) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Error::InvalidOrlicz(format!("shift must be >= 0, got {a}")));
        }
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidOrlicz(format!("exponent must be >= 1, got {p}")));
        }
        Ok(OrliczSpec::ShiftedPower { a, p })
    }

    /// Validates knots: `ψ(0) = 0` (inserted when missing), nondecreasing
    /// slopes, and a positive final slope so that `ψ → ∞`.
    pub fn table(mut points: Vec<(f64, f64)>, infinite_beyond: Option<f64>) -> Result<Self> {
        if points.iter().any(|&(u, v)| !(u.is_finite() && v.is_finite() && u >= 0.0 && v >= 0.0)) {
            return Err(Error::InvalidOrlicz("table knots must be finite and nonnegative".into()));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        points.dedup_by(|b, a| a.0 == b.0);
        match points.first() {
            Some(&(0.0, v)) if v != 0.0 => {
                return Err(Error::InvalidOrlicz("table must vanish at 0".into()))
            }
            Some(&(0.0, _)) => {}
            _ => points.insert(0, (0.0, 0.0)),
        }
        if points.len() < 2 {
            return Err(Error::InvalidOrlicz("table needs a knot besides 0".into()));
        }
        let slopes: Vec<f64> = points
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        if slopes.windows(2).any(|s| s[1] < s[0] * (1.0 - 1e-12) - 1e-300) {
            return Err(Error::InvalidOrlicz("table is not convex".into()));
        }
        if let Some(cap) = infinite_beyond {
            if !(cap > 0.0) {
                return Err(Error::InvalidOrlicz("infinite_beyond must be > 0".into()));
            }
        } else if !(*slopes.last().expect("nonempty") > 0.0) {
            return Err(Error::InvalidOrlicz("table must grow to infinity".into()));
        }
        Ok(OrliczSpec::Table {
            points,
            infinite_beyond,
        })
    }

    pub fn is_finite_valued(&self) -> bool {
        !matches!(
            self,
            OrliczSpec::Table {
                infinite_beyond: Some(_),
                ..
            }
        )
    }

    /// Families whose limit behaviour is known in closed form.
    pub fn is_analytic(&self) -> bool {
        !matches!(self, OrliczSpec::Table { .. })
    }

    pub fn eval(&self, u: f64) -> f64 {
        let u = u.abs();
        match self {
            OrliczSpec::Power { p, c } => c * u.powf(*p),
            OrliczSpec::ShiftedPower { a, p } => (u - a).max(0.0).powf(*p),
            OrliczSpec::ExpMinusOne => u.exp_m1(),
            OrliczSpec::Table {
                points,
                infinite_beyond,
            } => {
                if let Some(cap) = infinite_beyond {
                    if u > *cap {
                        return f64::INFINITY;
                    }
                }
                let k = points.partition_point(|&(x, _)| x <= u);
                let (i, j) = if k >= points.len() {
                    (points.len() - 2, points.len() - 1)
                } else {
                    (k - 1, k)
                };
                let (u0, v0) = points[i];
                let (u1, v1) = points[j];
                v0 + (v1 - v0) * (u - u0) / (u1 - u0)
            }
        }
    }

    /// Right derivative `ψ'(u+)` for `u >= 0`.
    pub fn derivative(&self, u: f64) -> f64 {
        let u = u.abs();
        match self {
            OrliczSpec::Power { p, c } => {
                if *p == 1.0 {
                    *c
                } else {
                    c * p * u.powf(p - 1.0)
                }
            }
            OrliczSpec::ShiftedPower { a, p } => {
                if u < *a {
                    0.0
                } else if *p == 1.0 {
                    1.0
                } else {
                    p * (u - a).powf(p - 1.0)
                }
            }
            OrliczSpec::ExpMinusOne => u.exp(),
            OrliczSpec::Table {
                points,
                infinite_beyond,
            } => {
                if let Some(cap) = infinite_beyond {
                    if u >= *cap {
                        return f64::INFINITY;
                    }
                }
                let k = points.partition_point(|&(x, _)| x <= u).min(points.len() - 1).max(1);
                let (u0, v0) = points[k - 1];
                let (u1, v1) = points[k];
                (v1 - v0) / (u1 - u0)
            }
        }
    }

    /// Smallest knot, for tables; used to tell probed data from extrapolation.
    pub fn smallest_positive_knot(&self) -> Option<(f64, f64)> {
        match self {
            OrliczSpec::Table { points, .. } => points.iter().copied().find(|&(_, v)| v > 0.0),
            _ => None,
        }
    }

    /// Sup of the region where ψ is finite.
    pub fn finite_domain_end(&self) -> f64 {
        match self {
            OrliczSpec::Table {
                infinite_beyond: Some(cap),
                ..
            } => *cap,
            _ => f64::INFINITY,
        }
    }
}

/// `ψ_Y(u) = sup_{v>0} (|u| v − ψ(v))`, closed form where available.
pub fn young_conjugate(psi: &OrliczSpec, u: f64) -> f64 {
    let u = u.abs();
    if u == 0.0 {
        return 0.0;
    }
    match psi {
        OrliczSpec::Power { p, c } => power_conjugate(*p, *c, u),
        OrliczSpec::ShiftedPower { a, p } => {
            // v = a + w, the shift contributes |u| a.
            a * u + power_conjugate(*p, 1.0, u)
        }
        OrliczSpec::ExpMinusOne => {
            if u <= 1.0 {
                0.0
            } else {
                u * u.ln() - u + 1.0
            }
        }
        OrliczSpec::Table { .. } => young_conjugate_numeric(psi, u),
    }
}

fn power_conjugate(p: f64, c: f64, u: f64) -> f64 {
    if p == 1.0 {
        return if u <= c { 0.0 } else { f64::INFINITY };
    }
    let v = (u / (c * p)).powf(1.0 / (p - 1.0));
    u * v * (p - 1.0) / p
}

/// Golden-section evaluation of the conjugate on the concave objective
/// `v ↦ |u| v − ψ(v)`. Returns `+∞` when `ψ'` never exceeds `|u|`.
pub fn young_conjugate_numeric(psi: &OrliczSpec, u: f64) -> f64 {
    let u = u.abs();
    if u == 0.0 {
        return 0.0;
    }
    let end = psi.finite_domain_end();
    let mut hi = 1.0f64.min(end);
    while psi.derivative(hi) <= u && hi < end {
        hi *= 2.0;
        if hi > 1e300 {
            return f64::INFINITY;
        }
        hi = hi.min(end);
    }
    let (_, neg) = golden_min(0.0, hi, 1e-10 * hi.max(1.0), |v| psi.eval(v) - u * v);
    (-neg).max(0.0)
}

/// `ρ_ψ(x) = Σ |piece| · ψ(v)`; `+∞` when some value leaves the finite domain.
pub fn modular(x: &StepFunction, psi: &OrliczSpec) -> f64 {
    x.pieces().iter().map(|p| p.len() * psi.eval(p.v)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::step::Alpha;

    #[test]
    fn conjugate_examples() {
        let half_square = OrliczSpec::power_scaled(2.0, 0.5).unwrap();
        assert!((young_conjugate(&half_square, 1.0) - 0.5).abs() < 1e-15);
        // ψ = |t|^p / p has conjugate |u|^{p'} / p'.
        let p = 3.0;
        let q = p / (p - 1.0);
        let psi = OrliczSpec::power_scaled(p, 1.0 / p).unwrap();
        for u in [0.3f64, 1.0, 2.5] {
            let want = u.powf(q) / q;
            assert!((young_conjugate(&psi, u) - want).abs() < 1e-12 * want.max(1.0));
        }
        assert_eq!(young_conjugate(&OrliczSpec::power(2.0), 0.0), 0.0);
    }

    #[test]
    fn conjugate_closed_forms_match_search() {
        let families = [
            OrliczSpec::power(2.0),
            OrliczSpec::power_scaled(3.5, 0.7).unwrap(),
            OrliczSpec::shifted_power(1.0, 2.0).unwrap(),
            OrliczSpec::ExpMinusOne,
        ];
        for psi in &families {
            for u in [0.2, 0.9, 1.7, 4.0] {
                let a = young_conjugate(psi, u);
                let n = young_conjugate_numeric(psi, u);
                assert!((a - n).abs() < 1e-8 * a.max(1.0), "{psi:?} u={u}: {a} vs {n}");
            }
        }
        assert_eq!(young_conjugate(&OrliczSpec::power(1.0), 2.0), f64::INFINITY);
        assert_eq!(young_conjugate_numeric(&OrliczSpec::power(1.0), 2.0), f64::INFINITY);
        assert_eq!(young_conjugate(&OrliczSpec::power(1.0), 0.5), 0.0);
    }

    #[test]
    fn modular_examples() {
        let sq = OrliczSpec::power(2.0);
        let chi = StepFunction::indicator(Alpha::Infinite, 0.0, 4.0, 1.0).unwrap();
        assert_eq!(modular(&chi, &sq), 4.0);
        assert_eq!(modular(&StepFunction::zero(Alpha::Infinite), &sq), 0.0);
        let x = StepFunction::from_triples(Alpha::Infinite, &[(0.0, 1.0, 2.0), (1.0, 3.0, 1.0)]).unwrap();
        assert_eq!(modular(&x, &sq), 6.0);
    }

    #[test]
    fn table_family() {
        let t = OrliczSpec::table(vec![(1.0, 0.0), (2.0, 1.0), (3.0, 3.0)], None).unwrap();
        assert_eq!(t.eval(0.5), 0.0);
        assert_eq!(t.eval(-1.5), 0.5);
        assert_eq!(t.eval(4.0), 5.0);
        assert!(OrliczSpec::table(vec![(1.0, 2.0), (2.0, 3.0)], None).is_err(), "concave");
        let capped = OrliczSpec::table(vec![(1.0, 0.0), (2.0, 1.0)], Some(2.0)).unwrap();
        assert_eq!(capped.eval(2.5), f64::INFINITY);
        assert!(!capped.is_finite_valued());
    }

    #[test]
    fn json_schema() {
        let p: OrliczSpec = serde_json::from_str(r#"{"family":"power","params":{"p":2}}"#).unwrap();
        assert_eq!(p, OrliczSpec::power(2.0));
        let e: OrliczSpec = serde_json::from_str(r#"{"family":"exp_minus_one"}"#).unwrap();
        assert_eq!(e, OrliczSpec::ExpMinusOne);
        let s: OrliczSpec =
            serde_json::from_str(r#"{"family":"shifted_power","params":{"a":1,"p":2}}"#).unwrap();
        let back: OrliczSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(s, back);
        assert!(serde_json::from_str::<OrliczSpec>(r#"{"family":"power","params":{"p":0.5}}"#).is_err());
        assert!(serde_json::from_str::<OrliczSpec>(r#"{"family":"cosh"}"#).is_err());
    }
}
