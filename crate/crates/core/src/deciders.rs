//! Decision procedures for structural properties of Orlicz and Lorentz
//! spaces, and the associate/dual weight constructions.
//!
//! Limits are decided from the closed-form exponents of each family whenever
//! possible; numeric probes only corroborate. When neither route settles a
//! question the verdict is `inconclusive` and records the probed range.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{fundamental_function, OrliczFlavor, SpaceHandle, SpaceKind};
use crate::num::{ext_f64, integrate, log_grid, QUAD_REL_TOL};
use crate::orlicz::OrliczSpec;
use crate::step::{dedup_sorted, Alpha};
use crate::weight::{WeightPiece, WeightSpec};

/// Points per decade of every limit probe.
pub const PROBE_PER_DECADE: usize = 17;
/// Default range of geometric probes, `[1e-8, 1e8]`.
pub const PROBE_RANGE: (f64, f64) = (1e-8, 1e8);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

/// A location and value justifying a failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(with = "ext_f64")]
    pub at: f64,
    #[serde(with = "ext_f64")]
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<(f64, f64)>,
    pub note: String,
}

impl Witness {
    pub fn new(at: f64, value: f64, note: impl Into<String>) -> Self {
        Witness {
            at,
            value,
            interval: None,
            note: note.into(),
        }
    }
}

/// Grid and values examined by a numeric probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeLog {
    pub quantity: String,
    #[serde(with = "ext_pair")]
    pub range: (f64, f64),
    pub points: Vec<(f64, f64)>,
}

mod ext_pair {
    use crate::num::Extended;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &(f64, f64), s: S) -> Result<S::Ok, S::Error> {
        (Extended::from_f64(v.0), Extended::from_f64(v.1)).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(f64, f64), D::Error> {
        let (a, b) = <(Extended, Extended)>::deserialize(d)?;
        Ok((a.as_f64(), b.as_f64()))
    }
}

impl ProbeLog {
    pub fn new(quantity: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        let lo = points.first().map_or(0.0, |p| p.0);
        let hi = points.last().map_or(0.0, |p| p.0);
        ProbeLog {
            quantity: quantity.into(),
            range: (lo.min(hi), lo.max(hi)),
            points,
        }
    }

    pub fn with_range(quantity: impl Into<String>, range: (f64, f64), points: Vec<(f64, f64)>) -> Self {
        ProbeLog {
            quantity: quantity.into(),
            range,
            points,
        }
    }
}

/// Outcome of a decider. `fails` always carries a witness and
/// `inconclusive` always carries at least one probe log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub reason: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probe_log: Vec<ProbeLog>,
    /// A constant certifying `holds` (Δ2's `K`, RB_p's `A`, embedding's `d`).
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_ext")]
    pub estimate: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<(String, Verdict)>,
}

mod opt_ext {
    use crate::num::Extended;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(Extended::from_f64).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Extended>::deserialize(d)?.map(Extended::as_f64))
    }
}

impl Verdict {
    pub fn holds(reason: impl Into<String>) -> Self {
        Verdict {
            status: Status::Holds,
            reason: reason.into(),
            witness: None,
            probe_log: Vec::new(),
            estimate: None,
            parts: Vec::new(),
        }
    }

    pub fn fails(reason: impl Into<String>, witness: Witness) -> Self {
        Verdict {
            status: Status::Fails,
            witness: Some(witness),
            ..Verdict::holds(reason)
        }
    }

    pub fn inconclusive(reason: impl Into<String>, log: ProbeLog) -> Self {
        Verdict {
            status: Status::Inconclusive,
            probe_log: vec![log],
            ..Verdict::holds(reason)
        }
    }

    pub fn with_estimate(mut self, v: f64) -> Self {
        self.estimate = Some(v);
        self
    }

    pub fn with_log(mut self, log: ProbeLog) -> Self {
        self.probe_log.push(log);
        self
    }

    pub fn with_part(mut self, name: &str, v: Verdict) -> Self {
        self.parts.push((name.to_string(), v));
        self
    }

    pub fn is_holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn is_fails(&self) -> bool {
        self.status == Status::Fails
    }

    /// Checks the structural invariants of the type.
    pub fn well_formed(&self) -> bool {
        let own = match self.status {
            Status::Holds => true,
            Status::Fails => self.witness.is_some(),
            Status::Inconclusive => !self.probe_log.is_empty(),
        };
        own && self.parts.iter().all(|(_, v)| v.well_formed())
    }
}

/// Conjunction: the first failing part decides, else the first
/// inconclusive part, else `holds`. Witnesses and logs are propagated.
pub fn conjunction(reason: &str, parts: Vec<(&str, Verdict)>) -> Verdict {
    let failing = parts.iter().find(|(_, v)| v.status == Status::Fails);
    let pending = parts.iter().find(|(_, v)| v.status == Status::Inconclusive);
    let mut out = if let Some((name, v)) = failing {
        let w = v.witness.clone().expect("fails carries a witness");
        Verdict::fails(format!("{reason}: {name} fails"), w)
    } else if let Some((name, v)) = pending {
        let mut out = Verdict::holds(format!("{reason}: {name} is inconclusive"));
        out.status = Status::Inconclusive;
        out.probe_log = v.probe_log.clone();
        out
    } else {
        Verdict::holds(reason.to_string())
    };
    for (name, v) in parts {
        out = out.with_part(name, v);
    }
    out
}

/// `sup{t > 0 : ψ(t) = 0}`.
pub fn a_psi(psi: &OrliczSpec) -> f64 {
    match psi {
        OrliczSpec::Power { .. } | OrliczSpec::ExpMinusOne => 0.0,
        OrliczSpec::ShiftedPower { a, .. } => *a,
        OrliczSpec::Table {
            points,
            infinite_beyond,
        } => {
            // Convex and piecewise linear: ψ vanishes up to the last zero
            // knot, or forever if the extrapolated slope is zero too.
            let cap = infinite_beyond.unwrap_or(f64::INFINITY);
            let zeros = points.iter().take_while(|&&(_, v)| v == 0.0).count();
            let z = if zeros == points.len() {
                f64::INFINITY
            } else {
                points[zeros - 1].0
            };
            z.min(cap)
        }
    }
}

/// Δ2: `ψ(2u) <= K ψ(u)` for all `u`. Table functions are scanned on a
/// geometric grid of `range` and never certified.
pub fn is_delta2(psi: &OrliczSpec, range: (f64, f64)) -> Result<Verdict> {
    let (lo, hi) = range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Domain(format!("probe range must satisfy 0 < u_min < u_max, got {range:?}")));
    }
    Ok(match psi {
        OrliczSpec::Power { p, .. } => {
            let k = 2f64.powf(*p);
            Verdict::holds(format!("ψ(2u) = 2^p ψ(u) with p = {p}")).with_estimate(k)
        }
        OrliczSpec::ShiftedPower { a, p } if *a == 0.0 => {
            Verdict::holds(format!("ψ(2u) = 2^p ψ(u) with p = {p}")).with_estimate(2f64.powf(*p))
        }
        OrliczSpec::ShiftedPower { a, .. } => Verdict::fails(
            "ψ vanishes on (0, a] but not on (a, 2a]",
            Witness::new(*a, f64::INFINITY, "ψ(u) = 0 < ψ(2u)"),
        ),
        OrliczSpec::ExpMinusOne => {
            let u: f64 = 20.0;
            let ratio = psi.eval(2.0 * u) / psi.eval(u);
            Verdict::fails(
                "ψ(2u)/ψ(u) = e^u + 1 is unbounded",
                Witness::new(u, ratio, "ψ(2u)/ψ(u)"),
            )
        }
        OrliczSpec::Table { .. } => {
            let mut points = Vec::new();
            let mut sup: f64 = 0.0;
            for u in log_grid(lo, hi, PROBE_PER_DECADE) {
                let (a, b) = (psi.eval(u), psi.eval(2.0 * u));
                if b > 0.0 && (a == 0.0 || b.is_infinite()) && a.is_finite() {
                    return Ok(Verdict::fails(
                        "ψ(2u) > 0 is not controlled by ψ(u)",
                        Witness::new(u, f64::INFINITY, format!("ψ(u) = {a}, ψ(2u) = {b}")),
                    ));
                }
                if a > 0.0 && a.is_finite() {
                    let r = b / a;
                    sup = sup.max(r);
                    points.push((u, r));
                }
            }
            Verdict::inconclusive(
                "tabulated ψ: ratio bounded on the probed range only",
                ProbeLog::with_range("psi(2u)/psi(u)", range, points),
            )
            .with_estimate(sup)
        }
    })
}

/// `lim_{t→0} ψ(t)/t = 0`.
pub fn is_n_at_zero(psi: &OrliczSpec) -> Verdict {
    match psi {
        OrliczSpec::Power { p, c } => {
            if *p > 1.0 {
                Verdict::holds(format!("ψ(t)/t = c t^(p-1) → 0 with p = {p}"))
            } else {
                Verdict::fails("ψ(t)/t ≡ c", Witness::new(1e-8, *c, "ψ(t)/t"))
            }
        }
        OrliczSpec::ShiftedPower { a, p } => {
            if *a > 0.0 || *p > 1.0 {
                Verdict::holds("ψ vanishes near 0 or grows faster than t")
            } else {
                Verdict::fails("ψ(t)/t ≡ 1", Witness::new(1e-8, 1.0, "ψ(t)/t"))
            }
        }
        OrliczSpec::ExpMinusOne => {
            let t: f64 = 1e-8;
            Verdict::fails(
                "ψ(t)/t = (e^t - 1)/t → 1",
                Witness::new(t, t.exp_m1() / t, "ψ(t)/t"),
            )
        }
        OrliczSpec::Table { .. } => {
            let points: Vec<(f64, f64)> = (0..=8)
                .map(|k| {
                    let t = 10f64.powi(-k);
                    (t, psi.eval(t) / t)
                })
                .collect();
            let log = ProbeLog::new("psi(t)/t", points.clone());
            let last = points.last().expect("nonempty").1;
            let prev = points[points.len() - 2].1;
            let monotone = points.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-12));
            if last == 0.0 {
                Verdict::holds("ψ vanishes near 0").with_log(log)
            } else if monotone && (last - prev).abs() <= 1e-12 * last {
                // The ratio has stopped decreasing: ψ is linear near 0.
                Verdict::fails(
                    "ψ(t)/t settles at a positive constant",
                    Witness::new(points.last().expect("nonempty").0, last, "ψ(t)/t"),
                )
                .with_log(log)
            } else {
                Verdict::inconclusive("ψ(t)/t still decreasing at the end of the probe", log)
            }
        }
    }
}

/// K-order continuity of `L^ψ` on `[0, α)`: Δ2, plus N-at-zero when `α = ∞`.
pub fn orlicz_koc_decider(psi: &OrliczSpec, alpha: Alpha) -> Result<Verdict> {
    let mut parts = vec![("delta2", is_delta2(psi, PROBE_RANGE)?)];
    if alpha.is_infinite() {
        parts.push(("n_at_zero", is_n_at_zero(psi)));
    }
    Ok(conjunction("K-order continuity", parts))
}

/// Agreement of `a_ψ = 0` with `φ(t) → ∞` for `L^ψ[0, ∞)`, the latter read
/// off the log-slope of `φ` on `t = 10^k`, `k = 0..8`.
pub fn a_psi_vs_phi_infty(psi: &OrliczSpec) -> Result<Verdict> {
    let a = a_psi(psi);
    let space = SpaceHandle::orlicz(psi.clone(), OrliczFlavor::Luxemburg, Alpha::Infinite);
    let mut points = Vec::new();
    for k in 0..=8 {
        let t = 10f64.powi(k);
        points.push((t, fundamental_function(&space, t)?));
    }
    let log = ProbeLog::new("phi(t)", points.clone());
    let n = points.len();
    let slope = (points[n - 1].1 / points[n - 2].1).log10();
    if let (OrliczSpec::Table { .. }, true) = (psi, a == 0.0) {
        // φ(∞) is decided by ψ below the first positive knot, where a table
        // has no samples; the probe sees either interpolation or a plateau.
        let knot = psi.smallest_positive_knot().map_or(f64::NAN, |(u, _)| u);
        return Ok(Verdict::inconclusive(
            format!("a_ψ = 0 but ψ is not sampled below u = {knot}"),
            log,
        ));
    }
    let diverges = if slope >= 1e-2 {
        true
    } else if slope <= 1e-3 {
        false
    } else {
        return Ok(Verdict::inconclusive(
            format!("log-slope {slope:.3e} of φ is ambiguous"),
            log,
        ));
    };
    let agree = (a == 0.0) == diverges;
    let reason = format!(
        "a_ψ = {a}, φ {} (log-slope {slope:.3e})",
        if diverges { "diverges" } else { "stays bounded" }
    );
    Ok(if agree {
        Verdict::holds(reason).with_estimate(a).with_log(log)
    } else {
        let (t, v) = points[n - 1];
        Verdict::fails(reason, Witness::new(t, v, "φ(t)")).with_log(log)
    })
}

fn require_infinite(alpha: Alpha, what: &str) -> Result<()> {
    if alpha.is_infinite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} needs alpha = inf")))
    }
}

/// Whether a space on `[0, ∞)` embeds in `L¹`, i.e. `d = lim φ(t)/t > 0`.
///
/// The probe log lists `φ(t)/t` and `t/φ(t)` (the fundamental function of
/// the associate space) on `t = 10^k`.
pub fn embeds_in_l1(space: &SpaceHandle) -> Result<Verdict> {
    require_infinite(space.alpha(), "embeds_in_L1")?;
    let mut ratio = Vec::new();
    let mut assoc = Vec::new();
    for k in 0..=8 {
        let t = 10f64.powi(k);
        let phi = fundamental_function(space, t)?;
        ratio.push((t, phi / t));
        assoc.push((t, t / phi));
    }
    let logs = [
        ProbeLog::new("phi(t)/t", ratio.clone()),
        ProbeLog::new("associate_fundamental t/phi(t)", assoc),
    ];
    let last = *ratio.last().expect("nonempty");
    let not_embedded = |reason: String| {
        Verdict::fails(reason, Witness::new(last.0, last.1, "φ(t)/t")).with_estimate(0.0)
    };
    let mut v = match space.kind() {
        SpaceKind::LorentzGamma { p, .. } => not_embedded(format!(
            "φ(t)^p / t^p = W(t)/t^p + ∫_t^∞ s^-p w → 0 for w in D_p (p = {p})"
        )),
        SpaceKind::LorentzLambda { p, weight } => {
            let tail = weight.tail_piece();
            let (c, a, b) = (tail.c, tail.a, tail.b);
            let growth = if c == 0.0 || a < -1.0 { 0.0 } else { (a + 1.0) / p };
            if growth > 1.0 || (growth == 1.0 && b > 0.0) {
                Verdict::holds("W(t)^(1/p) grows at least linearly").with_estimate(f64::INFINITY)
            } else if growth == 1.0 && b == 0.0 {
                let d = (c / (a + 1.0)).powf(1.0 / p);
                Verdict::holds("W(t)^(1/p) ~ d t").with_estimate(d)
            } else {
                not_embedded(format!("W(t)^(1/p) grows like t^{growth} at most"))
            }
        }
        SpaceKind::Orlicz { psi, .. } => {
            // φ(t)/t → lim_{u→0} ψ(u)/u.
            let n0 = is_n_at_zero(psi);
            match n0.status {
                Status::Holds => not_embedded("ψ(u)/u → 0, so φ(t)/t → 0".into()),
                Status::Fails => {
                    let d = n0.witness.as_ref().map_or(f64::NAN, |w| w.value);
                    Verdict::holds("ψ(u)/u → d > 0").with_estimate(d)
                }
                Status::Inconclusive => {
                    Verdict::inconclusive("limit of ψ(u)/u at 0 undecided", n0.probe_log[0].clone())
                }
            }
            .with_part("n_at_zero", n0)
        }
    };
    v.probe_log.extend(logs);
    Ok(v)
}

fn check_p_gt_1(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("p must be in (1, inf), got {p}")))
    }
}

fn infinite_weight(w: &WeightSpec) -> Result<()> {
    if w.alpha() == Alpha::Infinite {
        Ok(())
    } else {
        Err(Error::AlphaMismatch("weight must live on (0, inf)".into()))
    }
}

/// `∫_0^t w s^{-p} = ∞` for every `t > 0`.
fn origin_p_divergent(w: &WeightSpec, p: f64) -> bool {
    let f = w.first_piece();
    f.c > 0.0 && f.a - p <= -1.0
}

/// `W(∞) = ∞` from the tail piece.
fn w_unbounded(w: &WeightSpec) -> bool {
    let t = w.tail_piece();
    t.c > 0.0 && (t.a > -1.0 || (t.a == -1.0 && t.b >= -1.0))
}

/// Sample of `v(t) = t^{p'-1} W W_p / (W + W_p)^{p'+1}`.
fn reflexive_density(w: &WeightSpec, p: f64, t: f64) -> Result<f64> {
    let q = p / (p - 1.0);
    let big = w.big_w(t)?;
    let bp = w.big_w_p(p, t)?;
    if big + bp == 0.0 {
        return Ok(0.0);
    }
    Ok(t.powf(q - 1.0) * big * bp / (big + bp).powf(q + 1.0))
}

/// Reflexivity of `Γ_{p,w}[0, ∞)`: the origin prerequisite, `W(∞) = ∞`, and
/// `V(∞) = ∞` for the density [`reflexive_density`].
pub fn gamma_reflexive_decider(p: f64, w: &WeightSpec) -> Result<Verdict> {
    check_p_gt_1(p)?;
    infinite_weight(w)?;
    w.require_dp(p)?;
    let first = *w.first_piece();
    if !origin_p_divergent(w, p) {
        let ts = [first.t1.min(1.0) * 1e-4, first.t1.min(1.0) * 1e-2, first.t1.min(1.0)];
        let points = ts
            .iter()
            .map(|&t| Ok((t, w.moment(0.0, t, -p)?)))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Verdict::inconclusive(
            format!(
                "prerequisite fails: ∫_0^t w s^-p < ∞ (first piece c = {}, a - p = {})",
                first.c,
                first.a - p
            ),
            ProbeLog::new("int_0^t w(s) s^-p ds", points),
        ));
    }
    let stage1 = Verdict::holds("∫_0^t w s^-p = ∞ for all t > 0");
    if !w_unbounded(w) {
        let total = w.big_w_total()?;
        let stage2 = Verdict::fails(
            "W(∞) < ∞",
            Witness::new(f64::INFINITY, total, "W(∞)"),
        );
        return Ok(conjunction("reflexivity", vec![("prerequisite", stage1), ("w_unbounded", stage2)]));
    }
    let stage2 = Verdict::holds("W(∞) = ∞ by the tail exponent");

    // Exponent and log power of v at infinity.
    let q = p / (p - 1.0);
    let tail = *w.tail_piece();
    let (e, l) = if tail.a == -1.0 {
        (q - 1.0, 0.0)
    } else if tail.a < p - 1.0 {
        (-tail.a / (p - 1.0), tail.b * (1.0 - q) + 0.0)
    } else {
        (-1.0, tail.b - q * (tail.b + 1.0))
    };
    let diverges = e > -1.0 || (e == -1.0 && l >= -1.0);
    let (lo, hi) = (1e-8, 1e6);
    let mut cuts = log_grid(lo, hi, 1);
    cuts.extend(w.pieces().iter().map(|pc| pc.t1).filter(|t| *t > lo && *t < hi));
    cuts.sort_by(f64::total_cmp);
    dedup_sorted(&mut cuts);
    let mut v_int = 0.0;
    let mut points = Vec::new();
    for win in cuts.windows(2) {
        v_int += integrate(
            |u: f64| {
                let t = u.exp();
                reflexive_density(w, p, t).unwrap_or(f64::NAN) * t
            },
            win[0].ln(),
            win[1].ln(),
            QUAD_REL_TOL,
            0.0,
        )?;
        points.push((win[1], v_int));
    }
    let log = ProbeLog::new("V(t) = int_1e-8^t v", points);
    let stage3 = if diverges {
        Verdict::holds(format!("v(t) ~ t^{e} (log power {l}) is not integrable at ∞"))
            .with_estimate(v_int)
            .with_log(log)
    } else {
        Verdict::fails(
            format!("v(t) ~ t^{e} (log power {l}) is integrable at ∞"),
            Witness::new(hi, v_int, "V(t)"),
        )
        .with_log(log)
    };
    Ok(conjunction(
        "reflexivity",
        vec![("prerequisite", stage1), ("w_unbounded", stage2), ("v_unbounded", stage3)],
    ))
}

/// Approximative compactness of `Γ_{p,w}`: reflexive and `W` strictly
/// increasing (no piece with `c = 0`).
pub fn gamma_approx_compact_decider(p: f64, w: &WeightSpec) -> Result<Verdict> {
    let refl = gamma_reflexive_decider(p, w)?;
    let strict = match w.flat_piece() {
        Some(pc) => {
            let level = w.big_w(pc.t0.max(f64::MIN_POSITIVE))?;
            let mut wit = Witness::new(pc.t0, level, "W is constant on this interval");
            wit.interval = Some((pc.t0, pc.t1));
            Verdict::fails("W is not strictly increasing", wit)
        }
        None => Verdict::holds("every weight piece has c > 0"),
    };
    Ok(conjunction(
        "approximative compactness",
        vec![("reflexive", refl), ("w_strictly_increasing", strict)],
    ))
}

/// A density tabulated as power pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedWeight {
    pub weight: WeightSpec,
    /// `∫_0^∞ v = ∞`.
    pub v_infinite: bool,
    pub hypotheses: Verdict,
}

/// Log-log interpolation of `density` between grid points, with analytic
/// power exponents on `(0, grid[0])` and `(grid[last], ∞)`.
fn tabulate(
    w: &WeightSpec,
    density: impl Fn(&WeightPiece, f64) -> Result<f64>,
    origin_exp: f64,
    tail_exp: f64,
) -> Result<WeightSpec> {
    let inner: Vec<f64> = w
        .pieces()
        .iter()
        .map(|pc| pc.t1)
        .filter(|t| t.is_finite())
        .collect();
    let lo = inner.iter().fold(PROBE_RANGE.0, |m, &t| m.min(t / 10.0));
    let hi = inner.iter().fold(PROBE_RANGE.1, |m, &t| m.max(t * 10.0));
    let mut grid = log_grid(lo, hi, PROBE_PER_DECADE);
    grid.extend(inner);
    grid.sort_by(f64::total_cmp);
    dedup_sorted(&mut grid);
    let piece_of = |mid: f64| {
        let idx = w.pieces().partition_point(|pc| pc.t1 <= mid);
        &w.pieces()[idx.min(w.pieces().len() - 1)]
    };
    let mut pieces = Vec::new();
    let first = piece_of(grid[0] * 0.5);
    let v0 = density(first, grid[0])?;
    pieces.push(WeightPiece::new(0.0, grid[0], v0 / grid[0].powf(origin_exp), origin_exp, 0.0));
    for win in grid.windows(2) {
        let (l, r) = (win[0], win[1]);
        let pc = piece_of(0.5 * (l + r));
        let (vl, vr) = (density(pc, l)?, density(pc, r)?);
        if !(vl >= 0.0 && vr >= 0.0 && vl.is_finite() && vr.is_finite()) {
            return Err(Error::Domain(format!("density not finite/nonnegative near t = {l}")));
        }
        let piece = if vl == 0.0 || vr == 0.0 {
            WeightPiece::new(l, r, 0.0, 0.0, 0.0)
        } else {
            let a = (vr / vl).ln() / (r / l).ln();
            WeightPiece::new(l, r, vl / l.powf(a), a, 0.0)
        };
        pieces.push(piece);
    }
    let last = *grid.last().expect("nonempty");
    let vt = density(piece_of(last * 2.0), last)?;
    pieces.push(WeightPiece::new(last, f64::INFINITY, vt / last.powf(tail_exp), tail_exp, 0.0));
    WeightSpec::new(pieces)
}

/// Bounded `W(2t)/W(t)` on the probe grid.
fn w_doubling(w: &WeightSpec) -> Result<Verdict> {
    if w.first_piece().c == 0.0 {
        return Ok(Verdict::fails(
            "W vanishes near 0, so W(2t)/W(t) is undefined",
            Witness::new(w.first_piece().t1, 0.0, "W(t)"),
        ));
    }
    let mut points = Vec::new();
    let mut sup: f64 = 0.0;
    for t in log_grid(PROBE_RANGE.0, PROBE_RANGE.1, PROBE_PER_DECADE) {
        let r = w.big_w(2.0 * t)? / w.big_w(t)?;
        sup = sup.max(r);
        points.push((t, r));
    }
    Ok(Verdict::holds("W(2t)/W(t) bounded on the probe grid")
        .with_estimate(sup)
        .with_log(ProbeLog::new("W(2t)/W(t)", points)))
}

/// Associate-space weight of `Λ_{p,w}`: `v = (t/W(t))^{p'} w`, so that
/// `(Λ_{p,w})' = Γ_{p',v}`.
pub fn lambda_associate_weight(p: f64, w: &WeightSpec) -> Result<DerivedWeight> {
    check_p_gt_1(p)?;
    infinite_weight(w)?;
    if !w.locally_integrable() {
        return Err(Error::Hypothesis("W(t) = ∞ near 0".into()));
    }
    let doubling = w_doubling(w)?;
    let unbounded = if w_unbounded(w) {
        Verdict::holds("W(∞) = ∞ by the tail exponent")
    } else {
        Verdict::fails("W(∞) < ∞", Witness::new(f64::INFINITY, w.big_w_total()?, "W(∞)"))
    };
    let hyp = conjunction("Λ associate hypotheses", vec![("w_doubling", doubling), ("w_unbounded", unbounded)]);
    if !hyp.is_holds() {
        return Err(Error::Hypothesis(hyp.reason));
    }
    let q = p / (p - 1.0);
    let density = |pc: &WeightPiece, t: f64| -> Result<f64> {
        let big = w.big_w(t)?;
        Ok((t / big).powf(q) * pc.eval(t))
    };
    let origin_exp = w.first_piece().a * (1.0 - q);
    let tail_exp = w.tail_piece().a * (1.0 - q);
    let weight = tabulate(w, density, origin_exp, tail_exp)?;
    let v_infinite = weight.big_w_total()?.is_infinite();
    Ok(DerivedWeight {
        weight,
        v_infinite,
        hypotheses: hyp,
    })
}

/// RB_p: `W(t) <= A W_p(t)` for all `t > 0`.
pub fn rbp_check(p: f64, w: &WeightSpec) -> Result<Verdict> {
    check_p_gt_1(p)?;
    infinite_weight(w)?;
    w.require_dp(p)?;
    let first = *w.first_piece();
    let tail = *w.tail_piece();
    let mut grid = log_grid(PROBE_RANGE.0, PROBE_RANGE.1, PROBE_PER_DECADE);
    grid.extend(w.pieces().iter().map(|pc| pc.t0).filter(|&t| t > 0.0 && t.is_finite()));
    grid.sort_by(f64::total_cmp);
    dedup_sorted(&mut grid);
    let mut points = Vec::new();
    let mut sup: (f64, f64) = (0.0, 0.0);
    for &t in &grid {
        let (big, bp) = (w.big_w(t)?, w.big_w_p(p, t)?);
        if bp == 0.0 {
            if big > 0.0 {
                return Ok(Verdict::fails(
                    "W_p(t) = 0 < W(t)",
                    Witness::new(t, f64::INFINITY, "W(t)/W_p(t)"),
                )
                .with_log(ProbeLog::new("W(t)/W_p(t)", points)));
            }
            continue;
        }
        let r = big / bp;
        if r > sup.1 {
            sup = (t, r);
        }
        points.push((t, r));
    }
    let log = ProbeLog::new("W(t)/W_p(t)", points);
    // Origin: W ~ c t^{a+1}/(a+1); W_p is comparable only if a - p < -1.
    let origin = if first.c == 0.0 {
        0.0
    } else if first.a - p < -1.0 {
        (p - 1.0 - first.a) / (first.a + 1.0)
    } else if first.a - p == -1.0 {
        0.0
    } else {
        return Ok(Verdict::fails(
            "W(t)/W_p(t) ~ t^(a+1-p) → ∞ as t → 0",
            Witness::new(PROBE_RANGE.0, w.big_w(PROBE_RANGE.0)? / w.big_w_p(p, PROBE_RANGE.0)?, "W(t)/W_p(t)"),
        )
        .with_log(log));
    };
    // Tail: comparable only when W grows like a power with a > -1.
    if tail.c == 0.0 || tail.a <= -1.0 {
        let t = PROBE_RANGE.1;
        return Ok(Verdict::fails(
            "W(t)/W_p(t) → ∞ as t → ∞",
            Witness::new(t, w.big_w(t)? / w.big_w_p(p, t)?, "W(t)/W_p(t)"),
        )
        .with_log(log));
    }
    let at_inf = (p - 1.0 - tail.a) / (tail.a + 1.0);
    let a = sup.1.max(origin).max(at_inf);
    Ok(Verdict::holds(format!(
        "sup W/W_p over the grid and both limits (origin {origin}, tail {at_inf})"
    ))
    .with_estimate(a)
    .with_log(log))
}

/// Dual weight of `Γ_{p,w}`: `v = d/dt J(t)^{-1/(p-1)}` with
/// `J(t) = ∫_t^∞ w s^{-p} ds`, which is `J^{-p'} w t^{-p} / (p-1)`.
pub fn gamma_dual_weight(p: f64, w: &WeightSpec) -> Result<DerivedWeight> {
    check_p_gt_1(p)?;
    infinite_weight(w)?;
    let unbounded = if w_unbounded(w) {
        Verdict::holds("W(∞) = ∞ by the tail exponent")
    } else {
        Verdict::fails("W(∞) < ∞", Witness::new(f64::INFINITY, w.big_w_total()?, "W(∞)"))
    };
    let origin = if origin_p_divergent(w, p) {
        Verdict::holds("∫_0^1 w s^-p = ∞")
    } else {
        Verdict::fails(
            "∫_0^1 w s^-p < ∞",
            Witness::new(0.0, w.moment(0.0, 1.0, -p)?, "∫_0^1 w s^-p"),
        )
    };
    let rbp = rbp_check(p, w)?;
    let hyp = conjunction(
        "Γ dual hypotheses",
        vec![("w_unbounded", unbounded), ("origin_divergent", origin), ("rb_p", rbp)],
    );
    if !hyp.is_holds() {
        return Err(Error::Hypothesis(hyp.reason));
    }
    let q = p / (p - 1.0);
    let density = |pc: &WeightPiece, t: f64| -> Result<f64> {
        let j = w.tail_moment(p, t)?;
        Ok(j.powf(-q) * pc.eval(t) * t.powf(-p) / (p - 1.0))
    };
    let origin_exp = -w.first_piece().a / (p - 1.0);
    let tail_exp = -w.tail_piece().a / (p - 1.0);
    let weight = tabulate(w, density, origin_exp, tail_exp)?;
    // V(t) = J(t)^{-1/(p-1)} and J(t) → 0.
    let v_infinite = weight.big_w_total()?.is_infinite();
    Ok(DerivedWeight {
        weight,
        v_infinite,
        hypotheses: hyp,
    })
}

/// Names accepted by [`check`].
pub const CHECKS: [&str; 6] = ["reflexive", "approx-compact", "koc", "embeds-l1", "rbp", "delta2"];

/// Runs a named check against a space description.
pub fn check(name: &str, space: &SpaceHandle) -> Result<Verdict> {
    let lorentz = || match space.kind() {
        SpaceKind::LorentzGamma { p, weight } | SpaceKind::LorentzLambda { p, weight } => {
            Ok((*p, weight))
        }
        SpaceKind::Orlicz { .. } => Err(Error::Domain(format!("check {name} needs a Lorentz space"))),
    };
    let orlicz = || match space.kind() {
        SpaceKind::Orlicz { psi, .. } => Ok(psi),
        _ => Err(Error::Domain(format!("check {name} needs an Orlicz space"))),
    };
    match name {
        "reflexive" => {
            let (p, w) = lorentz()?;
            gamma_reflexive_decider(p, w)
        }
        "approx-compact" => {
            let (p, w) = lorentz()?;
            gamma_approx_compact_decider(p, w)
        }
        "rbp" => {
            let (p, w) = lorentz()?;
            rbp_check(p, w)
        }
        "koc" => orlicz_koc_decider(orlicz()?, space.alpha()),
        "delta2" => is_delta2(orlicz()?, PROBE_RANGE),
        "embeds-l1" => embeds_in_l1(space),
        other => Err(Error::Domain(format!("unknown check {other:?}; expected one of {CHECKS:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_psi_examples() {
        assert_eq!(a_psi(&OrliczSpec::power(2.0)), 0.0);
        assert_eq!(a_psi(&OrliczSpec::shifted_power(1.0, 2.0).unwrap()), 1.0);
        assert_eq!(a_psi(&OrliczSpec::ExpMinusOne), 0.0);
        let t = OrliczSpec::table(vec![(0.5, 0.0), (1.0, 1.0)], None).unwrap();
        assert_eq!(a_psi(&t), 0.5);
    }

    #[test]
    fn delta2_examples() {
        let v = is_delta2(&OrliczSpec::power(3.0), PROBE_RANGE).unwrap();
        assert!(v.is_holds());
        assert_eq!(v.estimate, Some(8.0));
        let v = is_delta2(&OrliczSpec::ExpMinusOne, PROBE_RANGE).unwrap();
        let w = v.witness.unwrap();
        assert_eq!(w.at, 20.0);
        assert!((w.value / 20f64.exp() - 1.0).abs() < 1e-8);
        let t = OrliczSpec::table(vec![(1.0, 1.0), (2.0, 3.0)], None).unwrap();
        let v = is_delta2(&t, (1.0, 1.5)).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
        assert_eq!(v.probe_log[0].range, (1.0, 1.5));
        assert!(is_delta2(&t, (1.0, 0.5)).is_err());
    }

    #[test]
    fn koc_examples() {
        assert!(orlicz_koc_decider(&OrliczSpec::power(2.0), Alpha::Infinite).unwrap().is_holds());
        assert!(orlicz_koc_decider(&OrliczSpec::ExpMinusOne, Alpha::Unit).unwrap().is_fails());
        let l1 = OrliczSpec::power(1.0);
        let v = orlicz_koc_decider(&l1, Alpha::Infinite).unwrap();
        assert!(v.is_fails());
        assert_eq!(v.parts[1].0, "n_at_zero");
        assert!(orlicz_koc_decider(&l1, Alpha::Unit).unwrap().is_holds());
    }

    #[test]
    fn verdicts_are_well_formed() {
        let w = WeightSpec::power(1.0, -0.5);
        for v in [
            gamma_reflexive_decider(2.0, &w).unwrap(),
            gamma_approx_compact_decider(2.0, &w).unwrap(),
            rbp_check(2.0, &w).unwrap(),
            a_psi_vs_phi_infty(&OrliczSpec::power(2.0)).unwrap(),
        ] {
            assert!(v.well_formed());
            let back: Verdict = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
            assert_eq!(back.status, v.status);
        }
    }
}
