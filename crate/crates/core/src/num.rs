//! Small numeric helpers: extended reals for JSON, tolerant comparison,
//! golden-section search and adaptive Gauss–Kronrod quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonnegative extended real as it appears in the JSON schemas: either a
/// number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub fn from_f64(v: f64) -> Self {
        if v == f64::INFINITY {
            Extended::Infinite
        } else {
            Extended::Finite(v)
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Extended::Finite(v) => v,
            Extended::Infinite => f64::INFINITY,
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => s.serialize_f64(*v),
            Extended::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Extended {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Extended::Finite(v)),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(Extended::Infinite),
                other => other
                    .parse::<f64>()
                    .map(Extended::from_f64)
                    .map_err(|_| serde::de::Error::custom(format!("expected number or \"inf\", got {other:?}"))),
            },
        }
    }
}

/// Serializes an `f64` that may be `+∞` as `"inf"`.
pub mod ext_f64 {
    use super::Extended;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        Extended::from_f64(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Extended::deserialize(d)?.as_f64())
    }
}

/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization of a unimodal `f` on `[a, b]`, stopping when
/// the bracket is narrower than `xtol`. Returns `(argmin, min)`; the
/// endpoints are included in the comparison so monotone objectives resolve
/// to the boundary.
pub fn golden_min(mut a: f64, mut b: f64, xtol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let fa0 = f(a);
    let fb0 = f(b);
    let (a0, b0) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iters = 0;
    while (b - a).abs() > xtol && iters < 400 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iters += 1;
    }
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    if fa0 < best.1 {
        best = (a0, fa0);
    }
    if fb0 < best.1 {
        best = (b0, fb0);
    }
    best
}

// Gauss–Kronrod 7/15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut lo = [0.0; 7];
    let mut hi = [0.0; 7];
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_k = kron.abs();
    for j in 0..7 {
        let dx = h * XGK[j];
        lo[j] = f(c - dx);
        hi[j] = f(c + dx);
        kron += WGK[j] * (lo[j] + hi[j]);
        abs_k += WGK[j] * (lo[j].abs() + hi[j].abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo[j] + hi[j]);
        }
    }
    let result = kron * h;
    let mut err = ((kron - gauss) * h).abs();
    // QUADPACK-style rescaling of the raw Kronrod-Gauss difference.
    let mean = 0.5 * kron;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((lo[j] - mean).abs() + (hi[j] - mean).abs());
    }
    asc *= h.abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (1f64).min((200.0 * err / asc).powf(1.5));
    }
    let res_abs = abs_k * h.abs();
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err)
}

/// Relative tolerance used by every quadrature in the crate.
pub const QUAD_REL_TOL: f64 = 1e-9;
/// Hard cap on subintervals per call.
pub const QUAD_MAX_SUBDIVISIONS: usize = 10_000;

/// Adaptive Gauss–Kronrod integration of `f` over the finite interval
/// `[a, b]`, bisecting the interval with the largest error estimate until the
/// total estimate drops below `max(abs_tol, rel_tol * |I|)`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("integrate needs a finite interval, got [{a}, {b}]")));
    }
    let (r0, e0) = gk15(&f, a, b);
    let mut segs: Vec<(f64, f64, f64, f64)> = vec![(a, b, r0, e0)];
    let mut total = r0;
    let mut err = e0;
    while err > abs_tol.max(rel_tol * total.abs()) {
        if segs.len() >= QUAD_MAX_SUBDIVISIONS {
            return Err(Error::QuadratureCap {
                cap: QUAD_MAX_SUBDIVISIONS,
                lo: a,
                hi: b,
            });
        }
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        if segs[idx].3 == 0.0 {
            break;
        }
        let (lo, hi, r, e) = segs.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval is at machine resolution; accept it as is.
            segs.push((lo, hi, r, 0.0));
            err -= e;
            continue;
        }
        let (r1, e1) = gk15(&f, lo, mid);
        let (r2, e2) = gk15(&f, mid, hi);
        total += r1 + r2 - r;
        err += e1 + e2 - e;
        segs.push((lo, mid, r1, e1));
        segs.push((mid, hi, r2, e2));
        if !total.is_finite() {
            return Err(Error::Divergent(format!("integrand is not finite on [{a}, {b}]")));
        }
    }
    // Re-sum to shed accumulated cancellation from the running updates.
    Ok(segs.iter().map(|s| s.2).sum())
}

/// Geometric grid of `per_decade` points per decade on `[lo, hi]`,
/// endpoints included.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = ((decades * per_decade as f64).round() as usize).max(1);
    (0..=n)
        .map(|i| lo * 10f64.powf(decades * i as f64 / n as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_polynomial_and_smooth() {
        let v = integrate(|x| x * x, 0.0, 3.0, 1e-12, 0.0).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
        let v = integrate(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12, 0.0).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn quadrature_endpoint_singularity() {
        let v = integrate(|x: f64| x.powf(-0.5), 0.0, 4.0, 1e-9, 0.0).unwrap();
        assert!((v - 4.0).abs() < 1e-7, "{v}");
    }

    #[test]
    fn golden_finds_parabola_min() {
        let (x, fx) = golden_min(-3.0, 5.0, 1e-10, |x| (x - 1.25).powi(2) + 0.5);
        assert!((x - 1.25).abs() < 1e-8);
        assert!((fx - 0.5).abs() < 1e-14);
    }

    #[test]
    fn golden_monotone_goes_to_boundary() {
        let (x, _) = golden_min(0.0, 1.0, 1e-10, |x| x);
        assert_eq!(x, 0.0);
    }

    #[test]
    fn extended_json() {
        let v: Extended = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(v, Extended::Infinite);
        let v: Extended = serde_json::from_str("2.5").unwrap();
        assert_eq!(v, Extended::Finite(2.5));
        assert_eq!(serde_json::to_string(&Extended::Infinite).unwrap(), "\"inf\"");
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-2, 1e2, 17);
        assert_eq!(g.len(), 69);
        assert!((g[0] - 1e-2).abs() < 1e-16);
        assert!((g[68] - 1e2).abs() < 1e-10);
    }
}
