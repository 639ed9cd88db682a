//! Best approximation from finite candidate sets and their convex hulls.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deciders::{orlicz_koc_decider, Verdict, Witness};
use crate::error::{Error, Result};
use crate::norms::{OrliczFlavor, SpaceHandle};
use crate::num::golden_min;
use crate::orlicz::OrliczSpec;
use crate::rearrange::{hlp_dominates_default, hlp_violation, default_hlp_tol, rearrange};
use crate::step::{self, Alpha, StepFunction};

/// Members within this relative distance of the minimum are all minimizers.
pub const TIE_TOL: f64 = 1e-10;
/// Default stopping tolerance of [`project_hull`].
pub const HULL_TOL: f64 = 1e-6;
/// Line-search budget of [`project_hull`].
pub const MAX_LINE_SEARCHES: usize = 100_000;
/// Largest hull handled by [`project_hull`].
pub const MAX_HULL_MEMBERS: usize = 12;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawCandidates {
    members: Vec<StepFunction>,
    #[serde(default)]
    hull: bool,
    #[serde(default)]
    rearrangement_closed: bool,
}

/// A finite candidate set, optionally standing for its convex hull.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCandidates", into = "RawCandidates")]
pub struct CandidateSet {
    members: Vec<StepFunction>,
    hull: bool,
    rearrangement_closed: bool,
}

impl TryFrom<RawCandidates> for CandidateSet {
    type Error = Error;
    fn try_from(r: RawCandidates) -> Result<Self> {
        CandidateSet::new(r.members, r.hull, r.rearrangement_closed)
    }
}

impl From<CandidateSet> for RawCandidates {
    fn from(c: CandidateSet) -> Self {
        RawCandidates {
            members: c.members,
            hull: c.hull,
            rearrangement_closed: c.rearrangement_closed,
        }
    }
}

/// Index of a member whose decreasing rearrangement is not itself a member.
fn closure_gap(members: &[StepFunction]) -> Option<usize> {
    members.iter().position(|a| {
        let star = rearrange(a);
        !members.iter().any(|b| b.approx_eq(&star, 1e-11))
    })
}

impl CandidateSet {
    /// Rejects empty sets, mixed domains, and a `rearrangement_closed` flag
    /// the members do not honour.
    pub fn new(members: Vec<StepFunction>, hull: bool, rearrangement_closed: bool) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::InvalidCandidates("candidate set is empty".into()));
        };
        let alpha = first.alpha();
        if members.iter().any(|m| m.alpha() != alpha) {
            return Err(Error::InvalidCandidates("members live on different domains".into()));
        }
        if rearrangement_closed {
            if let Some(i) = closure_gap(&members) {
                return Err(Error::InvalidCandidates(format!(
                    "flagged rearrangement-closed but member {i}'s rearrangement is missing"
                )));
            }
        }
        Ok(CandidateSet {
            members,
            hull,
            rearrangement_closed,
        })
    }

    pub fn finite(members: Vec<StepFunction>) -> Result<Self> {
        Self::new(members, false, false)
    }

    pub fn hull(members: Vec<StepFunction>) -> Result<Self> {
        Self::new(members, true, false)
    }

    pub fn members(&self) -> &[StepFunction] {
        &self.members
    }

    pub fn is_hull(&self) -> bool {
        self.hull
    }

    pub fn is_rearrangement_closed(&self) -> bool {
        self.rearrangement_closed
    }

    pub fn alpha(&self) -> Alpha {
        self.members[0].alpha()
    }

    /// `Σ θ_i a_i`.
    pub fn combination(&self, theta: &[f64]) -> Result<StepFunction> {
        step::linear_combination(theta, &self.members)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimizer {
    pub coefficients: Vec<f64>,
    pub point: StepFunction,
    /// `‖x − point‖ − distance`.
    pub gap: f64,
}

/// One accepted optimizer step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub objective: f64,
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionResult {
    pub distance: f64,
    pub minimizers: Vec<Minimizer>,
    pub iterations: usize,
    /// Objective values along the optimizer trajectory, nonincreasing.
    pub certificate: Vec<TraceEntry>,
}

impl ProjectionResult {
    pub fn cardinality(&self) -> usize {
        self.minimizers.len()
    }
}

fn check_alpha(x: &StepFunction, a: &CandidateSet, space: &SpaceHandle) -> Result<()> {
    if x.alpha() != a.alpha() || x.alpha() != space.alpha() {
        return Err(Error::AlphaMismatch(format!(
            "target on [0, {}), candidates on [0, {}), space on [0, {})",
            x.alpha(),
            a.alpha(),
            space.alpha()
        )));
    }
    Ok(())
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

/// Exact projection onto the members themselves; all ties are reported.
pub fn project_finite(x: &StepFunction, a: &CandidateSet, space: &SpaceHandle) -> Result<ProjectionResult> {
    check_alpha(x, a, space)?;
    let dists = a
        .members()
        .par_iter()
        .map(|m| space.distance(x, m))
        .collect::<Result<Vec<f64>>>()?;
    let best = dists.iter().copied().fold(f64::INFINITY, f64::min);
    let n = dists.len();
    let minimizers: Vec<Minimizer> = dists
        .iter()
        .enumerate()
        .filter(|(_, &d)| d - best <= TIE_TOL * best.max(1.0))
        .map(|(i, &d)| Minimizer {
            coefficients: unit(n, i),
            point: a.members()[i].clone(),
            gap: d - best,
        })
        .collect();
    let certificate = vec![TraceEntry {
        iteration: n,
        objective: best,
        coefficients: minimizers[0].coefficients.clone(),
    }];
    Ok(ProjectionResult {
        distance: best,
        minimizers,
        iterations: n,
        certificate,
    })
}

/// Minimizes `θ ↦ ‖x − Σθ_i a_i‖` over the simplex by pairwise coordinate
/// descent: each line search moves weight between two members along
/// `e_i − e_j` with golden-section search. Stops once a full sweep improves
/// the objective by less than `tol`.
pub fn project_hull(x: &StepFunction, a: &CandidateSet, space: &SpaceHandle, tol: f64) -> Result<ProjectionResult> {
    check_alpha(x, a, space)?;
    let n = a.members().len();
    if n > MAX_HULL_MEMBERS {
        return Err(Error::Domain(format!(
            "hull projection supports at most {MAX_HULL_MEMBERS} members, got {n}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be > 0, got {tol}")));
    }
    let objective = |theta: &[f64]| -> f64 {
        a.combination(theta)
            .and_then(|c| space.distance(x, &c))
            .unwrap_or(f64::INFINITY)
    };
    let start = project_finite(x, a, space)?;
    let mut theta = start.minimizers[0].coefficients.clone();
    let mut best = start.distance;
    let mut trace = vec![TraceEntry {
        iteration: 0,
        objective: best,
        coefficients: theta.clone(),
    }];
    let mut searches = 0;
    loop {
        let sweep_start = best;
        for i in 0..n {
            for j in (i + 1)..n {
                if searches >= MAX_LINE_SEARCHES {
                    return Err(Error::NonConvergence {
                        iterations: searches,
                        best,
                    });
                }
                searches += 1;
                let (lo, hi) = (-theta[i], theta[j]);
                if hi - lo <= 0.0 {
                    continue;
                }
                let along = |s: f64| {
                    let mut t = theta.clone();
                    t[i] += s;
                    t[j] -= s;
                    t[i] = t[i].max(0.0);
                    t[j] = t[j].max(0.0);
                    t
                };
                let (s, val) = golden_min(lo, hi, 1e-12 * (hi - lo).max(1.0), |s| objective(&along(s)));
                if val < best {
                    theta = along(s);
                    best = val;
                    trace.push(TraceEntry {
                        iteration: searches,
                        objective: best,
                        coefficients: theta.clone(),
                    });
                }
            }
        }
        if sweep_start - best < tol {
            break;
        }
    }
    let point = a.combination(&theta)?;
    Ok(ProjectionResult {
        distance: best,
        minimizers: vec![Minimizer {
            coefficients: theta,
            point,
            gap: 0.0,
        }],
        iterations: searches,
        certificate: trace,
    })
}

/// Dispatches on [`CandidateSet::is_hull`].
pub fn project(x: &StepFunction, a: &CandidateSet, space: &SpaceHandle, tol: f64) -> Result<ProjectionResult> {
    if a.is_hull() {
        project_hull(x, a, space, tol)
    } else {
        project_finite(x, a, space)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceStep {
    pub point: StepFunction,
    /// `point − x`.
    pub residual: StepFunction,
    /// `‖x − point‖ − dist(x, A)`.
    pub gap: f64,
}

/// `n` iterates sampled evenly from the optimizer trajectory (the last one
/// repeated when the trajectory is shorter), with nonincreasing gaps.
pub fn minimizing_sequence(
    x: &StepFunction,
    a: &CandidateSet,
    space: &SpaceHandle,
    n: usize,
) -> Result<Vec<SequenceStep>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let res = project(x, a, space, HULL_TOL)?;
    let trace = &res.certificate;
    let m = trace.len();
    (0..n)
        .map(|k| {
            let idx = if n == 1 { m - 1 } else { (k * (m - 1) + (n - 1) / 2) / (n - 1) };
            let entry = &trace[idx.min(m - 1)];
            let point = a.combination(&entry.coefficients)?;
            Ok(SequenceStep {
                residual: step::sub(&point, x)?,
                point,
                gap: entry.objective - res.distance,
            })
        })
        .collect()
}

/// Whether `a' ≺ a` for every member `a'`.
pub fn k_upper_bound_check(a: &StepFunction, set: &CandidateSet) -> bool {
    set.members().iter().all(|m| hlp_dominates_default(m, a))
}

/// Hypotheses and outcome of projecting `x*` onto a candidate set in
/// `L^ψ` with the Luxemburg norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rearrangement_closed: Verdict,
    /// `a ≺ x` for every member.
    pub members_dominated_by_x: Verdict,
    /// `x ≺ a` for every member.
    pub x_dominated_by_members: Verdict,
    pub koc: Verdict,
    pub hypotheses_hold: bool,
    pub projection: ProjectionResult,
    pub nonempty: bool,
}

fn domination_verdict(
    pairs: impl Iterator<Item = (usize, Option<(f64, f64)>)>,
    what: &str,
) -> Verdict {
    for (i, v) in pairs {
        if let Some((t, diff)) = v {
            return Verdict::fails(
                format!("{what} fails for member {i}"),
                Witness::new(t, diff, format!("member {i}: excess of the left maximal function")),
            );
        }
    }
    Verdict::holds(format!("{what} for every member"))
}

pub fn dominated_projection_experiment(
    x: &StepFunction,
    set: &CandidateSet,
    psi: &OrliczSpec,
    alpha: Alpha,
) -> Result<ExperimentReport> {
    let space = SpaceHandle::orlicz(psi.clone(), OrliczFlavor::Luxemburg, alpha);
    let closed = match closure_gap(set.members()) {
        None => Verdict::holds("every member's rearrangement is a member"),
        Some(i) => Verdict::fails(
            "not closed under rearrangement",
            Witness::new(i as f64, 0.0, format!("member {i}: rearrangement missing")),
        ),
    };
    let members = set.members();
    let below = domination_verdict(
        members.iter().enumerate().map(|(i, m)| (i, hlp_violation(m, x, default_hlp_tol(x)))),
        "a ≺ x",
    );
    let above = domination_verdict(
        members.iter().enumerate().map(|(i, m)| (i, hlp_violation(x, m, default_hlp_tol(m)))),
        "x ≺ a",
    );
    let koc = orlicz_koc_decider(psi, alpha)?;
    let projection = project(&rearrange(x), set, &space, HULL_TOL)?;
    let hypotheses_hold = closed.is_holds() && below.is_holds() && koc.is_holds();
    Ok(ExperimentReport {
        rearrangement_closed: closed,
        members_dominated_by_x: below,
        x_dominated_by_members: above,
        koc,
        hypotheses_hold,
        nonempty: !projection.minimizers.is_empty(),
        projection,
    })
}
