//! Randomized property suites and finite reproductions of the standard
//! counterexample constructions.
//!
//! Random step functions: the piece count is uniform in `[1, max_pieces]`,
//! lengths are log-uniform in `length_range`, values are uniform in
//! `value_range` with a random sign, and after each piece the next one
//! either abuts it or follows a log-uniform gap (even odds). On `[0, 1)` the
//! layout is rescaled to end at a uniform point of `[0.3, 1)`. Trial `i`
//! draws from ChaCha8 seeded with `seed` on stream `i`, so every trial
//! replays on its own.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deciders::{
    a_psi, embeds_in_l1, is_delta2, orlicz_koc_decider, conjunction, Verdict, Witness, PROBE_RANGE,
};
use crate::error::{Error, Result};
use crate::norms::{fundamental_function, SpaceHandle, SpaceKind};
use crate::rearrange::{hlp_dominates, hlp_dominates_default, default_hlp_tol, maximal_curve, rearrange};
use crate::step::{self, Alpha, Piece, StepFunction};
use crate::weight::WeightSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrialConfig {
    pub seed: u64,
    pub trials: usize,
    pub max_pieces: usize,
    pub value_range: (f64, f64),
    pub length_range: (f64, f64),
    pub tolerance: f64,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            seed: 0,
            trials: 1000,
            max_pieces: 6,
            value_range: (0.1, 10.0),
            length_range: (0.05, 5.0),
            tolerance: 1e-9,
        }
    }
}

impl TrialConfig {
    pub fn new(seed: u64, trials: usize) -> Self {
        TrialConfig {
            seed,
            trials,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok_range = |(lo, hi): (f64, f64)| lo > 0.0 && hi > lo && hi.is_finite();
        if self.trials == 0 {
            return Err(Error::Domain("trials must be >= 1".into()));
        }
        if self.max_pieces == 0 {
            return Err(Error::Domain("max_pieces must be >= 1".into()));
        }
        if !ok_range(self.value_range) || !ok_range(self.length_range) {
            return Err(Error::Domain("value and length ranges must be nonempty positive intervals".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::Domain("tolerance must be >= 0".into()));
        }
        Ok(())
    }

    /// The generator of trial `trial`.
    pub fn rng(&self, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        rng
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

/// A random step function on `[0, alpha)` following the module's recipe.
pub fn random_step(rng: &mut ChaCha8Rng, cfg: &TrialConfig, alpha: Alpha) -> StepFunction {
    let n = rng.random_range(1..=cfg.max_pieces);
    let mut pieces = Vec::with_capacity(n);
    let mut t = 0.0;
    for _ in 0..n {
        if rng.random_bool(0.5) {
            t += log_uniform(rng, cfg.length_range);
        }
        let len = log_uniform(rng, cfg.length_range);
        let mag = rng.random_range(cfg.value_range.0..=cfg.value_range.1);
        let v = if rng.random_bool(0.5) { mag } else { -mag };
        pieces.push(Piece::new(t, t + len, v));
        t += len;
    }
    if alpha == Alpha::Unit {
        let s = rng.random_range(0.3..1.0) / t;
        for p in &mut pieces {
            p.t0 *= s;
            p.t1 = (p.t1 * s).min(1.0);
        }
    }
    StepFunction::new(alpha, pieces).expect("generated pieces are valid")
}

/// A nonnegative random step function.
pub fn random_nonneg(rng: &mut ChaCha8Rng, cfg: &TrialConfig, alpha: Alpha) -> StepFunction {
    step::abs(&random_step(rng, cfg, alpha))
}

/// `f` with its values on `[a, b)` replaced by their mean.
pub fn block_average(f: &StepFunction, a: f64, b: f64) -> Result<StepFunction> {
    if !(b > a) {
        return Err(Error::Domain(format!("empty block [{a}, {b})")));
    }
    let inside = f.restrict(a, b);
    let mean = inside.pieces().iter().map(|p| p.v * p.len()).sum::<f64>() / (b - a);
    let outside = step::sub(f, &inside)?;
    step::add(&outside, &StepFunction::indicator(f.alpha(), a, b, mean)?)
}

/// `x = y*` averaged over a random block of its breakpoints, possibly
/// spreading into the zero tail; `x ≺ y` by construction.
fn averaged_below(rng: &mut ChaCha8Rng, y: &StepFunction) -> Result<StepFunction> {
    let ys = rearrange(y);
    let mut cuts = ys.breakpoints();
    let end = ys.support_end();
    let room = ys.alpha().as_f64().min(2.0 * end);
    if room > end {
        cuts.push(rng.random_range(end..=room));
    }
    if cuts.len() < 2 {
        return Ok(ys);
    }
    let i = rng.random_range(0..cuts.len() - 1);
    let j = rng.random_range(i + 1..cuts.len());
    block_average(&ys, cuts[i], cuts[j])
}

/// A serialized counterexample: enough to replay the check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationWitness {
    pub check: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial: Option<usize>,
    pub inputs: Vec<StepFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<f64>,
    pub values: Vec<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "witness", rename_all = "kebab-case")]
pub enum ProbeVerdict {
    NoViolationFound,
    Violation(Box<ViolationWitness>),
}

/// Violations kept per report; the count is always exact.
pub const MAX_REPORTED_VIOLATIONS: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub property: String,
    pub trials: usize,
    pub violation_count: usize,
    pub violations: Vec<ViolationWitness>,
    pub verdict: ProbeVerdict,
}

impl ProbeReport {
    fn from_violations(property: &str, trials: usize, all: Vec<ViolationWitness>) -> Self {
        let verdict = match all.first() {
            Some(w) => ProbeVerdict::Violation(Box::new(w.clone())),
            None => ProbeVerdict::NoViolationFound,
        };
        ProbeReport {
            property: property.to_string(),
            trials,
            violation_count: all.len(),
            violations: all.into_iter().take(MAX_REPORTED_VIOLATIONS).collect(),
            verdict,
        }
    }

    pub fn found_violation(&self) -> bool {
        self.violation_count > 0
    }
}

/// Runs `trial` for every index in parallel and merges witnesses in trial
/// order, so the report does not depend on scheduling.
fn run_trials(
    property: &str,
    cfg: &TrialConfig,
    trial: impl Fn(usize, &mut ChaCha8Rng) -> Result<Vec<ViolationWitness>> + Sync,
) -> Result<ProbeReport> {
    cfg.validate()?;
    let per_trial = (0..cfg.trials)
        .into_par_iter()
        .map(|i| trial(i, &mut cfg.rng(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeReport::from_violations(
        property,
        cfg.trials,
        per_trial.into_iter().flatten().collect(),
    ))
}

struct Recorder<'a> {
    cfg: &'a TrialConfig,
    trial: Option<usize>,
    out: Vec<ViolationWitness>,
}

impl Recorder<'_> {
    fn flag(&mut self, check: &str, inputs: &[&StepFunction], at: Option<f64>, values: Vec<f64>, detail: String) {
        self.out.push(ViolationWitness {
            check: check.to_string(),
            seed: self.cfg.seed,
            trial: self.trial,
            inputs: inputs.iter().map(|f| (*f).clone()).collect(),
            at,
            values,
            detail,
        });
    }
}

/// `t ↦ (1/t)∫_0^t s` for a given (claimed) decreasing rearrangement `s`.
fn average_curve(s: &StepFunction) -> impl Fn(f64) -> f64 + '_ {
    move |t: f64| {
        let mass: f64 = s
            .pieces()
            .iter()
            .map(|p| p.v * (p.t1.min(t) - p.t0).max(0.0))
            .sum();
        mass / t
    }
}

/// Probe points: every breakpoint, every midpoint, and a point past the end.
fn probe_points(fs: &[&StepFunction]) -> Vec<f64> {
    let mut pts: Vec<f64> = fs.iter().flat_map(|f| f.breakpoints()).filter(|&t| t > 0.0).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mids: Vec<f64> = pts.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let end = pts.last().copied().unwrap_or(0.5);
    if let Some(&first) = pts.first() {
        pts.push(0.5 * first);
    }
    pts.extend(mids);
    let alpha = fs[0].alpha().as_f64();
    if 2.0 * end < alpha {
        pts.push(2.0 * end);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn test_spaces(alpha: Alpha) -> Vec<SpaceHandle> {
    let w = WeightSpec::power(1.0, -0.5);
    vec![
        SpaceHandle::lambda(2.0, w.clone(), alpha).expect("valid"),
        SpaceHandle::gamma(2.0, w, alpha).expect("valid"),
        SpaceHandle::lp(3.0, alpha),
    ]
}

/// Core rearrangement laws with the library's own rearrangement.
pub fn run_core_suite(cfg: &TrialConfig) -> Result<ProbeReport> {
    run_core_suite_with(cfg, rearrange)
}

/// Core laws against an arbitrary rearrangement routine (the self-test
/// plants a broken one).
pub fn run_core_suite_with(
    cfg: &TrialConfig,
    rearr: fn(&StepFunction) -> StepFunction,
) -> Result<ProbeReport> {
    run_trials("core", cfg, |i, rng| core_trial(cfg, i, rng, rearr))
}

/// Replays trial `trial` of [`run_core_suite_with`].
pub fn replay_core_trial(
    cfg: &TrialConfig,
    trial: usize,
    rearr: fn(&StepFunction) -> StepFunction,
) -> Result<Vec<ViolationWitness>> {
    core_trial(cfg, trial, &mut cfg.rng(trial), rearr)
}

fn core_trial(
    cfg: &TrialConfig,
    trial: usize,
    rng: &mut ChaCha8Rng,
    rearr: fn(&StepFunction) -> StepFunction,
) -> Result<Vec<ViolationWitness>> {
    let alpha = if trial.is_multiple_of(2) { Alpha::Infinite } else { Alpha::Unit };
    let x = random_step(rng, cfg, alpha);
    let y = random_step(rng, cfg, alpha);
    let z = random_step(rng, cfg, alpha);
    let mut rec = Recorder {
        cfg,
        trial: Some(trial),
        out: Vec::new(),
    };
    let tol = cfg.tolerance;
    let scale = |f: &StepFunction| tol * f.sup_abs().max(1.0);

    // x* <= x** and x** nonincreasing.
    let xs = rearr(&x);
    let xss = average_curve(&xs);
    let pts = probe_points(&[&x, &xs]);
    let mut prev = f64::INFINITY;
    for &t in &pts {
        let (a, b) = (xs.value_at(t), xss(t));
        if a > b + scale(&x) {
            rec.flag("star_le_starstar", &[&x], Some(t), vec![a, b], "x*(t) > x**(t)".into());
            break;
        }
        if b > prev + scale(&x) {
            rec.flag("starstar_nonincreasing", &[&x], Some(t), vec![prev, b], "x** increases".into());
            break;
        }
        prev = b;
    }

    // (x+y)** <= x** + y**.
    let sum = step::add(&x, &y)?;
    let (ss, ys) = (rearr(&sum), rearr(&y));
    let (sss, yss) = (average_curve(&ss), average_curve(&ys));
    for &t in &probe_points(&[&x, &y, &sum, &xs, &ys, &ss]) {
        let (l, r) = (sss(t), xss(t) + yss(t));
        if l > r + tol * r.max(1.0) {
            rec.flag("subadditive", &[&x, &y], Some(t), vec![l, r], "(x+y)** > x** + y**".into());
            break;
        }
    }

    // x + y + z ≺ x* + y* + z*.
    let lhs = step::sum(&[&x, &y, &z])?;
    let zs = rearr(&z);
    let rhs = step::sum(&[&xs, &ys, &zs])?;
    if !hlp_dominates(&lhs, &rhs, tol * rhs.sup_abs().max(1.0)) {
        rec.flag("sum_dominated_by_rearranged_sum", &[&x, &y, &z], None, vec![], "x+y+z not ≺ x*+y*+z*".into());
    }

    // Equimeasurable functions have equal norms: compare x with x*.
    for space in test_spaces(alpha) {
        let (a, b) = (space.norm(&x)?, space.norm(&xs)?);
        if (a - b).abs() > tol * a.max(b).max(1.0) {
            rec.flag(
                "equimeasurable_norms",
                &[&x, &xs],
                None,
                vec![a, b],
                format!("{:?}", space.kind()),
            );
        }
    }

    // Transitivity on a chain built to satisfy both premises.
    let mid = step::add(&rearrange(&x), &rearrange(&step::abs(&y)))?;
    let top = step::add(&mid, &rearrange(&step::abs(&z)))?;
    let premises = hlp_dominates_default(&x, &mid) && hlp_dominates_default(&mid, &top);
    if premises && !hlp_dominates_default(&x, &top) {
        rec.flag("transitivity", &[&x, &mid, &top], None, vec![], "x ≺ m ≺ t but not x ≺ t".into());
    }
    Ok(rec.out)
}

/// K-monotonicity: `x ≺ y ⇒ ‖x‖ <= ‖y‖` on pairs built to satisfy `x ≺ y`.
/// Even trials average `y*` over a block; odd trials take
/// `y = x* + b*` for a random nonnegative bump `b`.
pub fn run_kmono_suite(space: &SpaceHandle, cfg: &TrialConfig) -> Result<ProbeReport> {
    run_trials("kmono", cfg, |i, rng| {
        let alpha = space.alpha();
        let (x, y) = if i % 2 == 0 {
            let y = random_step(rng, cfg, alpha);
            (averaged_below(rng, &y)?, y)
        } else {
            let x = random_step(rng, cfg, alpha);
            let bump = random_nonneg(rng, cfg, alpha);
            let y = step::add(&rearrange(&x), &rearrange(&bump))?;
            (x, y)
        };
        let mut rec = Recorder {
            cfg,
            trial: Some(i),
            out: Vec::new(),
        };
        if !hlp_dominates_default(&x, &y) {
            rec.flag("construction", &[&x, &y], None, vec![], "constructed pair is not x ≺ y".into());
        }
        let (nx, ny) = (space.norm(&x)?, space.norm(&y)?);
        if nx > ny + cfg.tolerance * ny.max(1.0) {
            rec.flag("kmono", &[&x, &y], None, vec![nx, ny], "x ≺ y but ‖x‖ > ‖y‖".into());
        }
        Ok(rec.out)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DukmRow {
    pub n: usize,
    pub norm_x: f64,
    pub norm_y: f64,
    /// `‖y_n* − x_n*‖`.
    pub norm_diff: f64,
    /// `φ(2n)/(2n)`.
    pub phi_ratio: f64,
    pub chain_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DukmTable {
    pub rows: Vec<DukmRow>,
    pub chain_verified: bool,
}

fn dukm_x(n: usize) -> Result<StepFunction> {
    let m = 2.0 * n as f64;
    StepFunction::indicator(Alpha::Infinite, 0.0, m, 1.0 / m)
}

fn dukm_y(n: usize) -> Result<StepFunction> {
    let m = n as f64;
    StepFunction::indicator(Alpha::Infinite, 0.0, m, 1.0 / m)
}

/// `x_n = (1/2n)χ_[0,2n)`, `y_n = (1/n)χ_[0,n)` for `n = 1..=n_max`, with
/// the chain `x_{n+1} ≺ x_n ≺ y_n` and `‖y_n* − x_n*‖ = φ(2n)/(2n)`.
pub fn dukm_sequence_run(space: &SpaceHandle, n_max: usize) -> Result<DukmTable> {
    if !space.alpha().is_infinite() {
        return Err(Error::Domain("the sequence needs alpha = inf".into()));
    }
    let rows = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let (x, y, next) = (dukm_x(n)?, dukm_y(n)?, dukm_x(n + 1)?);
            let chain_holds = hlp_dominates_default(&next, &x) && hlp_dominates_default(&x, &y);
            let m = 2.0 * n as f64;
            Ok(DukmRow {
                n,
                norm_x: space.norm(&x)?,
                norm_y: space.norm(&y)?,
                norm_diff: space.distance(&rearrange(&y), &rearrange(&x))?,
                phi_ratio: fundamental_function(space, m)? / m,
                chain_holds,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let chain_verified = rows.iter().all(|r| r.chain_holds);
    Ok(DukmTable { rows, chain_verified })
}

impl DukmTable {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).map_err(|e| Error::Domain(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Domain(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitsReport {
    /// `φ(∞) = ∞`.
    pub phi_infinite: Verdict,
    /// Embedding in `L¹`, i.e. `lim φ(t)/t > 0`.
    pub embeds_in_l1: Verdict,
    /// Order continuity.
    pub order_continuous: Verdict,
    /// `E` is K-order continuous and `φ(∞) = ∞` (Orlicz spaces only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub koc_and_phi_infinite: Option<Verdict>,
    /// `E` is order continuous and not embedded in `L¹`.
    pub oc_and_not_embedded: Verdict,
    /// Whether the two sides agree when both are decided.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consistent: Option<bool>,
}

fn negate(v: Verdict, what: &str) -> Verdict {
    use crate::deciders::Status;
    match v.status {
        Status::Holds => {
            let (t, val) = v
                .probe_log
                .first()
                .and_then(|l| l.points.last().copied())
                .unwrap_or((f64::INFINITY, v.estimate.unwrap_or(f64::NAN)));
            Verdict::fails(format!("{what} fails"), Witness::new(t, val, v.reason.clone())).with_part(what, v)
        }
        Status::Fails => Verdict::holds(format!("{what} holds")).with_part(what, v),
        Status::Inconclusive => {
            let log = v.probe_log[0].clone();
            Verdict::inconclusive(format!("{what} undecided"), log).with_part(what, v)
        }
    }
}

/// Behaviour of `φ` at infinity, checked against the characterization
/// "K-order continuous with `φ(∞) = ∞` iff order continuous and not in `L¹`".
pub fn fundamental_limits(space: &SpaceHandle) -> Result<LimitsReport> {
    if !space.alpha().is_infinite() {
        return Err(Error::Domain("fundamental_limits needs alpha = inf".into()));
    }
    let weight_unbounded = |w: &WeightSpec, p: f64| -> Result<Verdict> {
        let total = w.big_w_total()?;
        Ok(if total.is_infinite() {
            Verdict::holds("W(∞) = ∞")
        } else {
            Verdict::fails("W(∞) < ∞", Witness::new(f64::INFINITY, total.powf(1.0 / p), "φ(∞)"))
        })
    };
    let (phi_infinite, order_continuous, koc) = match space.kind() {
        SpaceKind::LorentzGamma { p, weight } | SpaceKind::LorentzLambda { p, weight } => {
            let v = weight_unbounded(weight, *p)?;
            let oc = Verdict {
                reason: format!("order continuous iff W(∞) = ∞ ({})", v.reason),
                ..v.clone()
            };
            (v, oc, None)
        }
        SpaceKind::Orlicz { psi, .. } => {
            let a = a_psi(psi);
            let phi = if a == 0.0 {
                Verdict::holds("a_ψ = 0")
            } else {
                let cap = fundamental_function(space, PROBE_RANGE.1)?;
                Verdict::fails(format!("a_ψ = {a} > 0"), Witness::new(PROBE_RANGE.1, cap, "φ(t)"))
                    .with_estimate(a)
            };
            let oc = is_delta2(psi, PROBE_RANGE)?;
            let koc = orlicz_koc_decider(psi, Alpha::Infinite)?;
            let both = conjunction("K-order continuous and φ(∞) = ∞", vec![("koc", koc), ("phi_infinite", phi.clone())]);
            (phi, oc, Some(both))
        }
    };
    let embeds = embeds_in_l1(space)?;
    let not_embedded = negate(embeds.clone(), "embedding in L1");
    let rhs = conjunction(
        "order continuous and not embedded in L1",
        vec![("order_continuous", order_continuous.clone()), ("not_embedded", not_embedded)],
    );
    use crate::deciders::Status::Inconclusive;
    let consistent = koc.as_ref().and_then(|l| {
        (l.status != Inconclusive && rhs.status != Inconclusive).then(|| l.status == rhs.status)
    });
    Ok(LimitsReport {
        phi_infinite,
        embeds_in_l1: embeds,
        order_continuous,
        koc_and_phi_infinite: koc,
        oc_and_not_embedded: rhs,
        consistent,
    })
}

/// Minimum `‖x − y‖` for a rotundity witness to count as `x ≠ y`.
pub const ROTUNDITY_SEPARATION: f64 = 1e-3;

fn normalize(space: &SpaceHandle, f: &StepFunction) -> Result<Option<StepFunction>> {
    let n = space.norm(f)?;
    if n == 0.0 || !n.is_finite() {
        return Ok(None);
    }
    Ok(Some(step::scale(f, 1.0 / n)?))
}

/// Searches the unit sphere of step functions on `dim_grid` equal cells of
/// `[0, 1)` for `x ≠ y` with `‖x + y‖ >= 2 − tolerance`. Seeds: two disjoint
/// cells, and a cell against the same cell plus half a neighbour.
pub fn rotundity_probe(space: &SpaceHandle, dim_grid: usize, cfg: &TrialConfig) -> Result<ProbeReport> {
    if dim_grid < 2 {
        return Err(Error::Domain("rotundity probe needs at least 2 cells".into()));
    }
    cfg.validate()?;
    let alpha = space.alpha();
    let width = 1.0 / dim_grid as f64;
    let cells = |vals: &[f64]| StepFunction::from_cells(alpha, width, vals);
    let check = |x: &StepFunction, y: &StepFunction, trial: Option<usize>| -> Result<Option<ViolationWitness>> {
        let (Some(x), Some(y)) = (normalize(space, x)?, normalize(space, y)?) else {
            return Ok(None);
        };
        let sep = space.distance(&x, &y)?;
        let s = space.norm(&step::add(&x, &y)?)?;
        Ok((sep >= ROTUNDITY_SEPARATION && s >= 2.0 - cfg.tolerance).then(|| ViolationWitness {
            check: "rotundity".into(),
            seed: cfg.seed,
            trial,
            inputs: vec![x, y],
            at: None,
            values: vec![s, sep],
            detail: "‖x‖ = ‖y‖ = 1, x ≠ y, ‖x + y‖ = 2".into(),
        }))
    };
    let mut e1 = vec![0.0; dim_grid];
    e1[0] = 1.0;
    let mut e2 = vec![0.0; dim_grid];
    e2[1] = 1.0;
    let mut e12 = e1.clone();
    e12[1] = 0.5;
    let mut seeded = Vec::new();
    for (a, b) in [(&e1, &e2), (&e1, &e12)] {
        if let Some(w) = check(&cells(a)?, &cells(b)?, None)? {
            seeded.push(w);
        }
    }
    let random = run_trials("rotundity", cfg, |i, rng| {
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..dim_grid)
                .map(|_| {
                    if rng.random_bool(0.3) {
                        0.0
                    } else {
                        rng.random_range(-cfg.value_range.1..=cfg.value_range.1)
                    }
                })
                .collect()
        };
        let x = draw(rng);
        let mut y = draw(rng);
        let score = |y: &[f64]| -> Result<f64> {
            let (Some(xn), Some(yn)) = (normalize(space, &cells(&x)?)?, normalize(space, &cells(y)?)?) else {
                return Ok(f64::NEG_INFINITY);
            };
            if space.distance(&xn, &yn)? < ROTUNDITY_SEPARATION {
                return Ok(f64::NEG_INFINITY);
            }
            space.norm(&step::add(&xn, &yn)?)
        };
        // Local refinement: perturb y, keep improvements of ‖x + y‖.
        let mut best = score(&y)?;
        for k in 0..20 {
            let scale = cfg.value_range.1 * 0.5f64.powi(k / 4);
            let mut cand = y.clone();
            let j = rng.random_range(0..dim_grid);
            cand[j] += rng.random_range(-scale..=scale);
            let s = score(&cand)?;
            if s > best {
                best = s;
                y = cand;
            }
        }
        Ok(check(&cells(&x)?, &cells(&y)?, Some(i))?.into_iter().collect())
    })?;
    let count = seeded.len() + random.violation_count;
    let mut all = seeded;
    all.extend(random.violations);
    let mut report = ProbeReport::from_violations("rotundity", cfg.trials, all);
    report.violation_count = count;
    Ok(report)
}

/// Minimum `sup |x* − y*|` for two functions to count as distinct.
pub const SKM_DISTINCT: f64 = 1e-6;

fn sup_diff(a: &StepFunction, b: &StepFunction) -> Result<f64> {
    Ok(step::sub(a, b)?.sup_abs())
}

/// Searches for `x ≺ y` with `x* ≠ y*` and `‖x‖ = ‖y‖`. Seeds: the pair
/// straddling a flat piece `[a, b]` of a `Γ` weight (`y* = χ_[0,m)`,
/// `x* = χ_[0,a) + ((m−a)/(b−a))χ_[a,b)`, `m = (a+b)/2`) and
/// `x = χ_[0,2s)`, `y = 2χ_[0,s)`.
pub fn skm_probe(space: &SpaceHandle, cfg: &TrialConfig) -> Result<ProbeReport> {
    cfg.validate()?;
    let alpha = space.alpha();
    let judge = |x: &StepFunction, y: &StepFunction, trial: Option<usize>| -> Result<Option<ViolationWitness>> {
        if !hlp_dominates(x, y, default_hlp_tol(y)) {
            return Ok(None);
        }
        let d = sup_diff(&rearrange(x), &rearrange(y))?;
        if d <= SKM_DISTINCT {
            return Ok(None);
        }
        let (nx, ny) = (space.norm(x)?, space.norm(y)?);
        Ok(((nx - ny).abs() <= cfg.tolerance * ny.max(1.0)).then(|| ViolationWitness {
            check: "strict_k_monotone".into(),
            seed: cfg.seed,
            trial,
            inputs: vec![x.clone(), y.clone()],
            at: None,
            values: vec![nx, ny, d],
            detail: "x ≺ y, x* ≠ y*, ‖x‖ = ‖y‖".into(),
        }))
    };
    let mut seeded = Vec::new();
    if let SpaceKind::LorentzGamma { weight, .. } = space.kind() {
        if let Some(pc) = weight.flat_piece().filter(|pc| pc.t0 > 0.0 && pc.t1.is_finite()) {
            let (a, b) = (pc.t0, pc.t1);
            let m = 0.5 * (a + b);
            let y = StepFunction::indicator(alpha, 0.0, m, 1.0)?;
            let x = StepFunction::from_triples(alpha, &[(0.0, a, 1.0), (a, b, (m - a) / (b - a))])?;
            seeded.extend(judge(&x, &y, None)?);
        }
    }
    let s = if alpha.is_infinite() { 1.0 } else { 0.25 };
    let x = StepFunction::indicator(alpha, 0.0, 2.0 * s, 1.0)?;
    let y = StepFunction::indicator(alpha, 0.0, s, 2.0)?;
    seeded.extend(judge(&x, &y, None)?);
    let random = run_trials("skm", cfg, |i, rng| {
        let y = random_step(rng, cfg, alpha);
        let x = averaged_below(rng, &y)?;
        Ok(judge(&x, &y, Some(i))?.into_iter().collect())
    })?;
    let count = seeded.len() + random.violation_count;
    let mut all = seeded;
    all.extend(random.violations);
    let mut report = ProbeReport::from_violations("skm", cfg.trials, all);
    report.violation_count = count;
    Ok(report)
}

/// `x**` of a function, exposed for replaying witnesses.
pub fn starstar_at(x: &StepFunction, t: f64) -> f64 {
    maximal_curve(x).eval(t)
}
