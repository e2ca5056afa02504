//! Monte Carlo drivers: event frequencies against their closed forms,
//! isolated and pendant occurrence counts, and a percolation probe.
//!
//! Every driver is a pure function of its arguments and seed. Trial `i`
//! draws from the stream `seeds::stream(seed, &[i])`, trials run in
//! parallel, and results are folded in trial order.

use std::collections::BTreeMap;
use std::time::Instant;

use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{
    build_complex, combinatorially_equivalent, Flavor, SimplicialComplex, VertexMap,
};
use crate::detection::{
    connected_components_in, verify_isolated, verify_pendant, OccurrenceReport,
};
use crate::error::{Error, Result};
use crate::fixtures::plant_pendant;
use crate::genericity::{
    default_dim_cap, is_representation, representation_dim_cap, stability_radius,
};
use crate::geometry::{ball_volume, dist, Cuboid, PointSet};
use crate::poisson::{sample_window, SamplingMode};
use crate::seeds;

/// Version of the [`ExperimentReport`] JSON layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Closed-form probability that each of `n_vertices` disjoint `delta`-balls
/// holds exactly one point and the rest of `W_I` none:
/// `(t kappa_d delta^d)^n exp(-t vol_wi)`.
///
/// It is a probability only when `t kappa_d delta^d <= 1`; see
/// [`c_a_is_probability`].
pub fn predict_c_a(t: f64, d: usize, delta: f64, n_vertices: usize, vol_wi: f64) -> Result<f64> {
    if !(t > 0.0) || d == 0 || !(delta > 0.0) || n_vertices == 0 || !(vol_wi >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "c_A needs t, delta, n > 0 and vol >= 0 (t={t}, d={d}, delta={delta}, n={n_vertices}, vol={vol_wi})"
        )));
    }
    let per_ball = t * ball_volume(d) * delta.powi(d as i32);
    Ok(per_ball.powi(n_vertices as i32) * (-t * vol_wi).exp())
}

pub fn c_a_is_probability(t: f64, d: usize, delta: f64) -> bool {
    t * ball_volume(d) * delta.powi(d as i32) <= 1.0
}

/// Void probability of the shell `W_O \ W_I`: `exp(-t (vol_wo - vol_wi))`.
pub fn predict_c_b(t: f64, vol_wo: f64, vol_wi: f64) -> Result<f64> {
    if !(t > 0.0) || !(vol_wi >= 0.0) || !(vol_wo >= vol_wi) {
        return Err(Error::InvalidParameter(format!(
            "c_B needs t > 0 and vol_wo >= vol_wi >= 0 (t={t}, vol_wo={vol_wo}, vol_wi={vol_wi})"
        )));
    }
    Ok((-t * (vol_wo - vol_wi)).exp())
}

/// Empirical frequency with its binomial standard error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub count: u64,
    pub trials: u64,
    pub p: f64,
    pub stderr: f64,
}

impl Frequency {
    pub fn new(count: u64, trials: u64) -> Self {
        let p = if trials == 0 {
            0.0
        } else {
            count as f64 / trials as f64
        };
        Frequency {
            count,
            trials,
            p,
            stderr: binomial_sigma(p, trials),
        }
    }
}

fn binomial_sigma(p: f64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        (p * (1.0 - p) / n as f64).sqrt()
    }
}

/// Sample mean with its standard error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<f64> = values.into_iter().collect();
        let n = v.len() as f64;
        if v.is_empty() {
            return Estimate {
                mean: 0.0,
                stderr: 0.0,
            };
        }
        let mean = v.iter().sum::<f64>() / n;
        let var = if v.len() > 1 {
            v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Estimate {
            mean,
            stderr: (var / n).sqrt(),
        }
    }

    pub fn scaled(&self, f: f64) -> Self {
        Estimate {
            mean: self.mean * f,
            stderr: self.stderr * f.abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Events,
    Isolation,
    Pendant,
    Percolation,
}

/// Result of one experiment run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    pub config: serde_json::Value,
    pub seed: u64,
    pub trials: u64,
    #[serde(default)]
    pub per_trial_counts: Vec<u64>,
    #[serde(default)]
    pub frequencies: BTreeMap<String, Frequency>,
    #[serde(default)]
    pub estimates: BTreeMap<String, Estimate>,
    #[serde(default)]
    pub predictions: BTreeMap<String, f64>,
    #[serde(default)]
    pub checks: Vec<Check>,
    #[serde(default)]
    pub warnings: Vec<String>,
    /// Reports found in trial 0, as a sample.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub occurrences: Vec<OccurrenceReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl ExperimentReport {
    fn new(kind: ExperimentKind, config: serde_json::Value, seed: u64, trials: u64) -> Self {
        ExperimentReport {
            schema_version: SCHEMA_VERSION,
            kind,
            config,
            seed,
            trials,
            per_trial_counts: Vec::new(),
            frequencies: BTreeMap::new(),
            estimates: BTreeMap::new(),
            predictions: BTreeMap::new(),
            checks: Vec::new(),
            warnings: Vec::new(),
            occurrences: Vec::new(),
            timings_ms: None,
        }
    }

    pub fn all_checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Drops wall-clock timings, leaving only seed-determined content.
    pub fn without_timings(mut self) -> Self {
        self.timings_ms = None;
        self
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    fn time(&mut self, key: &str, since: Instant) {
        self.timings_ms
            .get_or_insert_with(BTreeMap::new)
            .insert(key.to_string(), since.elapsed().as_secs_f64() * 1e3);
    }
}

/// A target complex together with a point set realizing it.
#[derive(Clone, Debug)]
pub struct Realization {
    pub target: SimplicialComplex,
    pub points: PointSet,
    pub rho: f64,
    pub flavor: Flavor,
    /// Point index to target vertex.
    pub witness: VertexMap,
}

impl Realization {
    /// Fails unless the flavor's complex on `points` at `rho` is
    /// equivalent to `target`.
    pub fn new(
        target: SimplicialComplex,
        points: PointSet,
        rho: f64,
        flavor: Flavor,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("realization"));
        }
        let witness = is_representation(&points, rho, &target, flavor)?.ok_or_else(|| {
            Error::InvalidParameter("points do not represent the target complex".into())
        })?;
        Ok(Realization {
            target,
            points,
            rho,
            flavor,
            witness,
        })
    }

    /// Uses the complex built on `points` as the target.
    pub fn from_points(points: PointSet, rho: f64, flavor: Flavor) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("realization"));
        }
        let target = build_complex(&points, rho, default_dim_cap(&points, flavor), flavor)?.complex;
        Realization::new(target, points, rho, flavor)
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Cap used when building sampled complexes for comparison.
    pub fn dim_cap(&self) -> usize {
        representation_dim_cap(&self.points, &self.target)
    }

    pub fn stability_radius(&self) -> f64 {
        stability_radius(&self.points, self.rho, self.flavor)
    }

    /// Smallest pairwise distance (infinite for one point).
    pub fn min_distance(&self) -> f64 {
        self.points.min_pairwise_distance().unwrap_or(f64::INFINITY)
    }

    /// `min(alpha / 2, stability radius)`, or `rho / 4` when both are
    /// infinite.
    pub fn default_delta(&self) -> f64 {
        let d = (self.min_distance() / 2.0).min(self.stability_radius());
        if d.is_finite() {
            d
        } else {
            self.rho / 4.0
        }
    }

    /// The bounding box `W` (possibly degenerate).
    pub fn bounding_box(&self) -> Cuboid {
        self.points.bounding_box().expect("nonempty")
    }

    /// Largest side of `W`.
    pub fn width(&self) -> f64 {
        self.bounding_box().sides().into_iter().fold(0.0, f64::max)
    }

    fn check_delta(&self, delta: f64) -> Result<()> {
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must be positive, got {delta}"
            )));
        }
        let stable = self.stability_radius();
        if delta > stable {
            return Err(Error::InvalidParameter(format!(
                "delta = {delta} exceeds the stability radius {stable}"
            )));
        }
        let half = self.min_distance() / 2.0;
        if delta > half {
            return Err(Error::InvalidParameter(format!(
                "delta = {delta} exceeds half the minimum vertex distance {half}"
            )));
        }
        Ok(())
    }

    fn echo(&self) -> serde_json::Value {
        serde_json::json!({
            "rho": self.rho,
            "flavor": self.flavor,
            "points": self.points.to_rows(),
            "target": self.target,
        })
    }
}

fn check_intensity(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "intensity must be positive, got {t}"
        )))
    }
}

#[derive(Clone, Copy, Default)]
struct EventOutcome {
    a: bool,
    b: bool,
    equivalent: bool,
}

/// Frequencies of the events behind the closed forms `c_A` and `c_B`.
///
/// With `W` the bounding box of the representation, `W_I = W + delta B`
/// and `W_O = W + (delta + rho) B`, each trial samples the process on `W_O`
/// and records
/// * `A_hat`: exactly one point in each open `delta`-ball around a vertex
///   and no other point in `W_I`;
/// * `B_hat`: no point in `W_O \ W_I`;
/// * `equivalent`: the complex on the points of `W_I` is equivalent to the
///   target.
pub fn estimate_event_probabilities(
    real: &Realization,
    delta: f64,
    t: f64,
    trials: u64,
    seed: u64,
) -> Result<ExperimentReport> {
    check_intensity(t)?;
    real.check_delta(delta)?;
    let started = Instant::now();
    let d = real.dim();
    let w = real.bounding_box();
    let vol_wi = w.dilated_volume(delta);
    let vol_wo = w.dilated_volume(delta + real.rho);
    let region = w.expanded_unchecked(delta + real.rho);
    let cap = real.dim_cap();
    let n = real.len();

    let outcomes: Vec<Result<EventOutcome>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = seeds::stream(seed, &[trial]);
            let sample = sample_window(&mut rng, &region, t);
            let mut in_ball = vec![0u32; n];
            let mut stray = 0u32;
            let mut shell = 0u32;
            let mut inner = Vec::new();
            for p in sample.iter() {
                let dw = w.distance_to(p);
                if dw > delta + real.rho {
                    continue;
                }
                if dw > delta {
                    shell += 1;
                    continue;
                }
                inner.push(p);
                match (0..n).find(|&i| dist(real.points.get(i), p) < delta) {
                    Some(i) => in_ball[i] += 1,
                    None => stray += 1,
                }
            }
            let a = stray == 0 && in_ball.iter().all(|&c| c == 1);
            let equivalent = inner.len() == n && {
                let y = PointSet::with_duplicates(d, &inner)?;
                let g = build_complex(&y, real.rho, cap, real.flavor)?;
                combinatorially_equivalent(&g.complex, &real.target)?.is_some()
            };
            Ok(EventOutcome {
                a,
                b: shell == 0,
                equivalent,
            })
        })
        .collect();
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;

    let count = |f: &dyn Fn(&EventOutcome) -> bool| outcomes.iter().filter(|o| f(o)).count() as u64;
    let fa = Frequency::new(count(&|o| o.a), trials);
    let fb = Frequency::new(count(&|o| o.b), trials);
    let feq = Frequency::new(count(&|o| o.equivalent), trials);
    let feq_b = Frequency::new(count(&|o| o.equivalent && o.b), trials);
    let fa_b = Frequency::new(count(&|o| o.a && o.b), trials);
    let violations = count(&|o| o.a && !o.equivalent);

    let c_a = predict_c_a(t, d, delta, n, vol_wi)?;
    let c_b = predict_c_b(t, vol_wo, vol_wi)?;

    let mut config = real.echo();
    config["delta"] = delta.into();
    config["intensity"] = t.into();
    let mut r = ExperimentReport::new(ExperimentKind::Events, config, seed, trials);
    if !c_a_is_probability(t, d, delta) {
        r.warnings
            .push("t * kappa_d * delta^d > 1: c_A is not a probability bound".into());
    }
    r.predictions.insert("c_A".into(), c_a);
    r.predictions.insert("c_B".into(), c_b);
    r.predictions.insert("c_A*c_B".into(), c_a * c_b);
    r.predictions.insert("vol_W_I".into(), vol_wi);
    r.predictions.insert("vol_W_O".into(), vol_wo);

    let within = |name: &str, f: &Frequency, expect: f64| {
        let sigma = binomial_sigma(expect, trials);
        let dev = (f.p - expect).abs();
        Check::new(
            name,
            dev <= 3.0 * sigma,
            format!(
                "observed {} vs predicted {expect:e}, |diff| = {dev:e}, 3 sigma = {:e}",
                f.p,
                3.0 * sigma
            ),
        )
    };
    r.checks.push(within("A_hat matches c_A", &fa, c_a));
    r.checks.push(within("B_hat matches c_B", &fb, c_b));
    r.checks.push(Check::new(
        "A_hat implies equivalent",
        violations == 0,
        format!("{violations} trials with A_hat but a different complex"),
    ));
    r.checks.push(Check::new(
        "equivalent at least A_hat",
        feq.p >= fa.p,
        format!("{} >= {}", feq.p, fa.p),
    ));
    let q = fa.p * fb.p;
    let sigma_q = binomial_sigma(q, trials);
    r.checks.push(Check::new(
        "equivalent and B_hat at least A_hat times B_hat",
        feq_b.p >= q - 3.0 * sigma_q,
        format!("{} >= {q:e} - 3 * {sigma_q:e}", feq_b.p),
    ));

    r.frequencies.insert("A_hat".into(), fa);
    r.frequencies.insert("B_hat".into(), fb);
    r.frequencies.insert("equivalent".into(), feq);
    r.frequencies.insert("equivalent_and_B_hat".into(), feq_b);
    r.frequencies.insert("A_hat_and_B_hat".into(), fa_b);
    r.time("total", started);
    Ok(r)
}

/// Cell size `gamma = beta + 2 (delta + rho)` of the disjoint-cell lattice.
pub fn cell_size(real: &Realization, delta: f64) -> f64 {
    real.width() + 2.0 * (delta + real.rho)
}

struct IsolationTrial {
    count: u64,
    undecided: u64,
    unsound: u64,
    cells: Vec<u32>,
    reports: Vec<OccurrenceReport>,
}

/// Counts interior-certified isolated copies of the target in a sampled
/// window, overall and per cell of the `gamma` lattice anchored at the
/// window's lower corner. An occurrence belongs to the cell holding its
/// lowest-labelled vertex; occurrences in the leftover strip past the last
/// full cell count only toward the total.
pub fn run_isolation_experiment(
    real: &Realization,
    t: f64,
    window: &Cuboid,
    trials: u64,
    seed: u64,
) -> Result<ExperimentReport> {
    check_intensity(t)?;
    if window.dim() != real.dim() {
        return Err(Error::DimensionMismatch {
            expected: real.dim(),
            found: window.dim(),
        });
    }
    let started = Instant::now();
    let delta = real.default_delta();
    let gamma = cell_size(real, delta);
    let mut per_axis = Vec::with_capacity(window.dim());
    for axis in 0..window.dim() {
        let side = window.side(axis);
        if side < gamma {
            return Err(Error::WindowTooSmall { axis, side, gamma });
        }
        per_axis.push((side / gamma).floor() as usize);
    }
    let num_cells: usize = per_axis.iter().product();
    let cap = real.dim_cap();

    let results: Vec<Result<IsolationTrial>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = seeds::stream(seed, &[trial]);
            let sample = sample_window(&mut rng, window, t);
            let g = build_complex(&sample, real.rho, cap, real.flavor)?;
            let dec = connected_components_in(&g, window);
            let reports = dec.isolated_occurrences(&g, &real.target)?;
            let mut cells = vec![0u32; num_cells];
            for r in &reports {
                let p = g.points.get(r.vertices[0] as usize);
                let mut index = 0;
                let mut inside = true;
                for axis in 0..p.len() {
                    let k = ((p[axis] - window.lo()[axis]) / gamma).floor() as usize;
                    if k >= per_axis[axis] {
                        inside = false;
                        break;
                    }
                    index = index * per_axis[axis] + k;
                }
                if inside {
                    cells[index] += 1;
                }
            }
            let unsound = reports
                .iter()
                .filter(|r| !verify_isolated(&g, &real.target, r))
                .count() as u64;
            Ok(IsolationTrial {
                count: reports.len() as u64,
                undecided: reports.iter().filter(|r| r.undecided).count() as u64,
                unsound,
                cells,
                reports: if trial == 0 { reports } else { Vec::new() },
            })
        })
        .collect();
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;

    let d = real.dim();
    let vol_wi = real.bounding_box().dilated_volume(delta);
    let vol_wo = real.bounding_box().dilated_volume(delta + real.rho);
    let c_a = predict_c_a(t, d, delta, real.len(), vol_wi)?;
    let c_b = predict_c_b(t, vol_wo, vol_wi)?;
    let eroded: f64 = window
        .sides()
        .iter()
        .map(|s| (s - 2.0 * real.rho).max(0.0))
        .product();

    let mut config = real.echo();
    config["intensity"] = t.into();
    config["window"] = serde_json::to_value(window)?;
    config["delta"] = delta.into();
    let mut r = ExperimentReport::new(ExperimentKind::Isolation, config, seed, trials);
    r.per_trial_counts = results.iter().map(|x| x.count).collect();
    let count = Estimate::of(results.iter().map(|x| x.count as f64));
    let per_cell = Estimate::of(
        results
            .iter()
            .map(|x| x.cells.iter().map(|&c| c as f64).sum::<f64>() / num_cells as f64),
    );
    r.predictions.insert("gamma".into(), gamma);
    r.predictions.insert("cells".into(), num_cells as f64);
    r.predictions.insert("c_A".into(), c_a);
    r.predictions.insert("c_B".into(), c_b);
    r.predictions.insert("c_A*c_B".into(), c_a * c_b);
    r.predictions.insert("eroded_volume".into(), eroded);
    r.checks.push(Check::new(
        "per-cell mean at least c_A*c_B",
        per_cell.mean >= c_a * c_b - 3.0 * per_cell.stderr,
        format!(
            "{} >= {:e} - 3 * {}",
            per_cell.mean,
            c_a * c_b,
            per_cell.stderr
        ),
    ));
    let unsound: u64 = results.iter().map(|x| x.unsound).sum();
    r.checks.push(Check::new(
        "isolated reports verified",
        unsound == 0,
        format!("{unsound} reports failed brute-force verification"),
    ));
    if eroded > 0.0 {
        r.estimates
            .insert("count_per_eroded_volume".into(), count.scaled(1.0 / eroded));
    }
    if real.len() == 1 && eroded > 0.0 {
        let intensity = t * (-t * ball_volume(d) * real.rho.powi(d as i32)).exp();
        r.predictions
            .insert("isolated_point_intensity".into(), intensity);
        let observed = count.scaled(1.0 / eroded);
        r.checks.push(Check::new(
            "isolated points match t exp(-t kappa_d rho^d)",
            (observed.mean - intensity).abs() <= 3.0 * observed.stderr,
            format!(
                "{} vs {intensity}, 3 sigma = {}",
                observed.mean,
                3.0 * observed.stderr
            ),
        ));
    }
    if num_cells >= 2 {
        let first: Vec<f64> = results
            .iter()
            .map(|x| (x.cells[0] > 0) as u8 as f64)
            .collect();
        let last: Vec<f64> = results
            .iter()
            .map(|x| (x.cells[num_cells - 1] > 0) as u8 as f64)
            .collect();
        if let Some(rho) = correlation(&first, &last) {
            let bound = 3.0 / (trials as f64).sqrt();
            r.estimates.insert(
                "cell_correlation".into(),
                Estimate {
                    mean: rho,
                    stderr: 1.0 / (trials as f64).sqrt(),
                },
            );
            r.checks.push(Check::new(
                "distant cells uncorrelated",
                rho.abs() <= bound,
                format!("|{rho}| <= {bound}"),
            ));
        }
    }
    let undecided: u64 = results.iter().map(|x| x.undecided).sum();
    if undecided > 0 {
        r.warnings
            .push(format!("{undecided} occurrences undecided (search cap)"));
    }
    r.estimates.insert("count".into(), count);
    r.estimates.insert("per_cell".into(), per_cell);
    r.occurrences = results
        .into_iter()
        .next()
        .map(|x| x.reports)
        .unwrap_or_default();
    r.time("total", started);
    Ok(r)
}

fn correlation(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

/// Runs [`run_isolation_experiment`] on each window (window `k` with seed
/// `derive_seed(seed, [k])`) and checks that counts per unit of eroded
/// volume agree within 3 sigma of the first window.
pub fn isolation_scaling(
    real: &Realization,
    t: f64,
    windows: &[Cuboid],
    trials: u64,
    seed: u64,
) -> Result<ExperimentReport> {
    if windows.is_empty() {
        return Err(Error::Empty("isolation scaling"));
    }
    let started = Instant::now();
    let runs = windows
        .iter()
        .enumerate()
        .map(|(k, w)| {
            run_isolation_experiment(real, t, w, trials, seeds::derive_seed(seed, &[k as u64]))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut config = real.echo();
    config["intensity"] = t.into();
    config["windows"] = serde_json::to_value(windows)?;
    let mut r = ExperimentReport::new(ExperimentKind::Isolation, config, seed, trials);
    let density = |x: &ExperimentReport| x.estimates.get("count_per_eroded_volume").cloned();
    for (k, run) in runs.iter().enumerate() {
        for (name, e) in &run.estimates {
            r.estimates.insert(format!("window_{k}.{name}"), e.clone());
        }
        for (name, p) in &run.predictions {
            r.predictions.insert(format!("window_{k}.{name}"), *p);
        }
        for c in &run.checks {
            r.checks.push(Check::new(
                &format!("window_{k}: {}", c.name),
                c.passed,
                c.detail.clone(),
            ));
        }
        r.warnings
            .extend(run.warnings.iter().map(|w| format!("window_{k}: {w}")));
        if k > 0 {
            if let (Some(a), Some(b)) = (density(&runs[0]), density(run)) {
                let sigma = a.stderr.hypot(b.stderr);
                r.checks.push(Check::new(
                    &format!("window_{k}: count scales with eroded volume"),
                    (a.mean - b.mean).abs() <= 3.0 * sigma,
                    format!("{} vs {}, 3 sigma = {}", a.mean, b.mean, 3.0 * sigma),
                ));
            }
        }
    }
    r.per_trial_counts = runs
        .iter()
        .flat_map(|x| x.per_trial_counts.iter().copied())
        .collect();
    r.time("total", started);
    Ok(r)
}

struct PendantTrial {
    has_host: bool,
    reports: u64,
    planted_found: bool,
    unsound: u64,
    sample: Vec<OccurrenceReport>,
}

/// Counts pendant copies of the target on the window-crossing component.
/// With `plant`, a copy joined to a window-spanning backbone is planted in
/// every sample first (planar only) and its recovery is checked.
pub fn run_pendant_experiment(
    real: &Realization,
    t: f64,
    window: &Cuboid,
    trials: u64,
    seed: u64,
    plant: bool,
) -> Result<ExperimentReport> {
    check_intensity(t)?;
    let started = Instant::now();
    let cap = real.dim_cap();
    let results: Vec<Result<PendantTrial>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = seeds::stream(seed, &[trial]);
            let mut sample = sample_window(&mut rng, window, t);
            let mut planted = None;
            if plant {
                let p = plant_pendant(&sample, &real.points, real.rho, window)?;
                sample = p.points;
                planted = Some(p.copy);
            }
            let g = build_complex(&sample, real.rho, cap, real.flavor)?;
            let dec = connected_components_in(&g, window);
            let Some(host) = dec.crossing(&g, 0) else {
                return Ok(PendantTrial {
                    has_host: false,
                    reports: 0,
                    planted_found: false,
                    unsound: 0,
                    sample: Vec::new(),
                });
            };
            let reports = dec.pendant_occurrences(&g, &real.target, host)?;
            let unsound = reports
                .iter()
                .filter(|r| !verify_pendant(&g, &dec, &real.target, r))
                .count() as u64;
            let planted_found = planted
                .as_ref()
                .is_some_and(|copy| reports.iter().any(|r| &r.vertices == copy));
            Ok(PendantTrial {
                has_host: true,
                reports: reports.len() as u64,
                planted_found,
                unsound,
                sample: if trial == 0 { reports } else { Vec::new() },
            })
        })
        .collect();
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut config = real.echo();
    config["intensity"] = t.into();
    config["window"] = serde_json::to_value(window)?;
    config["plant"] = plant.into();
    let mut r = ExperimentReport::new(ExperimentKind::Pendant, config, seed, trials);
    r.per_trial_counts = results.iter().map(|x| x.reports).collect();
    let no_host = Frequency::new(
        results.iter().filter(|x| !x.has_host).count() as u64,
        trials,
    );
    if no_host.p > 0.5 {
        r.warnings.push(format!(
            "no crossing host in {:.0}% of trials; t may be below the percolation threshold",
            100.0 * no_host.p
        ));
    }
    r.frequencies.insert("no_host".into(), no_host);
    r.estimates.insert(
        "reports".into(),
        Estimate::of(results.iter().map(|x| x.reports as f64)),
    );
    if plant {
        let found = results.iter().filter(|x| x.planted_found).count() as u64;
        r.checks.push(Check::new(
            "planted copy recovered in every trial",
            found == trials,
            format!("{found} of {trials}"),
        ));
        r.frequencies
            .insert("planted_found".into(), Frequency::new(found, trials));
    }
    let unsound: u64 = results.iter().map(|x| x.unsound).sum();
    r.checks.push(Check::new(
        "pendant reports verified",
        unsound == 0,
        format!("{unsound} reports failed brute-force verification"),
    ));
    r.occurrences = results
        .into_iter()
        .next()
        .map(|x| x.sample)
        .unwrap_or_default();
    r.time("total", started);
    Ok(r)
}

/// One point of a crossing-probability curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub window: f64,
    pub crossing_fraction: f64,
    pub stderr: f64,
    /// Isotonic (nondecreasing in `t`) fit at this window size.
    pub smoothed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PercolationCurve {
    pub rho: f64,
    pub dim: usize,
    pub trials: u64,
    pub seed: u64,
    pub points: Vec<CurvePoint>,
    /// Where the smoothed curve of the largest window crosses 1/2.
    pub t_hat: Option<f64>,
    /// Percentile bootstrap interval (2.5%, 97.5%) for `t_hat`.
    pub t_hat_interval: Option<[f64; 2]>,
    /// Every raw fraction lies within 3 sigma of its isotonic fit.
    pub monotone: bool,
}

impl PercolationCurve {
    /// Columns `t,window,crossing_fraction,stderr`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,window,crossing_fraction,stderr\n");
        for p in &self.points {
            s.push_str(&format!(
                "{},{},{},{}\n",
                p.t, p.window, p.crossing_fraction, p.stderr
            ));
        }
        s
    }

    pub fn fraction(&self, t: f64, window: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.t == t && p.window == window)
            .map(|p| p.crossing_fraction)
    }

    pub fn to_report(&self, config: serde_json::Value) -> ExperimentReport {
        let mut r =
            ExperimentReport::new(ExperimentKind::Percolation, config, self.seed, self.trials);
        for p in &self.points {
            let count = (p.crossing_fraction * self.trials as f64).round() as u64;
            r.per_trial_counts.push(count);
            r.frequencies.insert(
                format!("crossing[t={},window={}]", p.t, p.window),
                Frequency::new(count, self.trials),
            );
        }
        if let Some(t) = self.t_hat {
            r.predictions.insert("t_hat".into(), t);
        }
        if let Some([lo, hi]) = self.t_hat_interval {
            r.predictions.insert("t_hat_lower".into(), lo);
            r.predictions.insert("t_hat_upper".into(), hi);
        }
        r.checks.push(Check::new(
            "crossing fraction monotone in t",
            self.monotone,
            "raw fractions within 3 sigma of the isotonic fit".into(),
        ));
        r
    }
}

/// Pool-adjacent-violators fit: the nondecreasing sequence closest to `y`
/// in least squares.
pub fn isotonic_fit(y: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::new();
    for &v in y {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (b, nb) = blocks[blocks.len() - 1];
            let (a, na) = blocks[blocks.len() - 2];
            if a <= b {
                break;
            }
            blocks.pop();
            let last = blocks.last_mut().expect("two blocks");
            *last = ((a * na as f64 + b * nb as f64) / (na + nb) as f64, na + nb);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(v, n)| std::iter::repeat_n(v, n))
        .collect()
}

/// First `t` where `curve` reaches 1/2, linearly interpolated.
fn half_crossing(t: &[f64], curve: &[f64]) -> Option<f64> {
    if curve.first().is_some_and(|&c| c >= 0.5) {
        return t.first().copied();
    }
    (1..t.len()).find(|&i| curve[i] >= 0.5).map(|i| {
        let (a, b) = (curve[i - 1], curve[i]);
        t[i - 1] + (0.5 - a) * (t[i] - t[i - 1]) / (b - a)
    })
}

const BOOTSTRAP: usize = 200;

/// Fraction of samples on `[0, L]^d` whose Rips 1-skeleton at `rho` has a
/// component within `rho` of both faces orthogonal to the first axis, for
/// each intensity in `t_values` (ascending) and side `L` in `window_sides`.
pub fn percolation_probe(
    rho: f64,
    dim: usize,
    t_values: &[f64],
    window_sides: &[f64],
    trials: u64,
    seed: u64,
) -> Result<PercolationCurve> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rho must be positive, got {rho}"
        )));
    }
    if t_values.is_empty() || window_sides.is_empty() {
        return Err(Error::Empty("percolation probe"));
    }
    if t_values.windows(2).any(|w| !(w[0] < w[1])) || t_values.iter().any(|&t| !(t >= 0.0)) {
        return Err(Error::InvalidParameter(
            "t_values must be nonnegative and strictly ascending".into(),
        ));
    }
    let windows = window_sides
        .iter()
        .map(|&l| Cuboid::cube(dim, l))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize, u64)> = (0..t_values.len())
        .flat_map(|i| (0..windows.len()).flat_map(move |j| (0..trials).map(move |k| (i, j, k))))
        .collect();
    let hits: Vec<Result<bool>> = jobs
        .par_iter()
        .map(|&(i, j, k)| {
            let t = t_values[i];
            if t == 0.0 {
                return Ok(false);
            }
            let mut rng = seeds::stream(seed, &[i as u64, j as u64, k]);
            let sample = sample_window(&mut rng, &windows[j], t);
            let g = build_complex(&sample, rho, 1, Flavor::Rips)?;
            Ok(connected_components_in(&g, &windows[j])
                .crossing(&g, 0)
                .is_some())
        })
        .collect();
    let hits = hits.into_iter().collect::<Result<Vec<_>>>()?;
    let success = |i: usize, j: usize| -> u64 {
        let base = (i * windows.len() + j) * trials as usize;
        hits[base..base + trials as usize]
            .iter()
            .filter(|&&h| h)
            .count() as u64
    };

    let mut points = Vec::new();
    let mut monotone = true;
    let mut largest_raw = Vec::new();
    let largest = (0..windows.len())
        .max_by(|&a, &b| window_sides[a].total_cmp(&window_sides[b]))
        .expect("nonempty");
    let mut smoothed_by_window = Vec::new();
    for j in 0..windows.len() {
        let raw: Vec<f64> = (0..t_values.len())
            .map(|i| Frequency::new(success(i, j), trials).p)
            .collect();
        let fit = isotonic_fit(&raw);
        for (i, (&p, &s)) in raw.iter().zip(&fit).enumerate() {
            let sigma = binomial_sigma(s, trials);
            if (p - s).abs() > 3.0 * sigma + 1e-12 {
                monotone = false;
            }
            points.push(CurvePoint {
                t: t_values[i],
                window: window_sides[j],
                crossing_fraction: p,
                stderr: binomial_sigma(p, trials),
                smoothed: s,
            });
        }
        if j == largest {
            largest_raw = raw;
        }
        smoothed_by_window.push(fit);
    }
    points.sort_by(|a, b| a.window.total_cmp(&b.window).then(a.t.total_cmp(&b.t)));

    let t_hat = half_crossing(t_values, &smoothed_by_window[largest]);
    let mut rng = seeds::stream(seed, &[u64::MAX]);
    let mut boot = Vec::with_capacity(BOOTSTRAP);
    for _ in 0..BOOTSTRAP {
        let resampled: Vec<f64> = largest_raw
            .iter()
            .map(|&p| {
                let b = Binomial::new(trials, p.clamp(0.0, 1.0)).expect("valid binomial");
                b.sample(&mut rng) as f64 / trials as f64
            })
            .collect();
        if let Some(t) = half_crossing(t_values, &isotonic_fit(&resampled)) {
            boot.push(t);
        }
    }
    boot.sort_by(f64::total_cmp);
    let t_hat_interval = (!boot.is_empty()).then(|| {
        let at =
            |q: f64| boot[((q * (boot.len() - 1) as f64).round() as usize).min(boot.len() - 1)];
        [at(0.025), at(0.975)]
    });
    Ok(PercolationCurve {
        rho,
        dim,
        trials,
        seed,
        points,
        t_hat,
        t_hat_interval,
        monotone,
    })
}

/// The `[process]` section of an experiment file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessSection {
    pub intensity: Option<f64>,
    pub window: Option<Cuboid>,
    #[serde(default)]
    pub seed: u64,
    /// Read by the `sample` command only; the drivers sample directly.
    #[serde(default)]
    pub mode: SamplingMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSection {
    pub rho: f64,
    #[serde(default)]
    pub flavor: Flavor,
}

/// Target given by its representation; without `maximal_faces` the
/// complex built on the points is the target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSection {
    pub points: Vec<Vec<f64>>,
    pub maximal_faces: Option<Vec<Vec<u32>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub kind: ExperimentKind,
    pub trials: u64,
    pub delta: Option<f64>,
    #[serde(default)]
    pub plant: bool,
    /// Extra windows for isolation scaling; `[process].window` comes first.
    #[serde(default)]
    pub windows: Vec<Cuboid>,
    #[serde(default)]
    pub t_values: Vec<f64>,
    #[serde(default)]
    pub window_sides: Vec<f64>,
    pub dim: Option<usize>,
}

/// A whole experiment file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_process")]
    pub process: ProcessSection,
    pub complex: ComplexSection,
    pub target: Option<TargetSection>,
    pub experiment: ExperimentSection,
}

fn default_process() -> ProcessSection {
    ProcessSection {
        intensity: None,
        window: None,
        seed: 0,
        mode: SamplingMode::Direct,
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    fn intensity(&self) -> Result<f64> {
        self.process
            .intensity
            .ok_or_else(|| Error::InvalidParameter("[process] intensity is required".into()))
    }

    fn window(&self) -> Result<Cuboid> {
        self.process
            .window
            .clone()
            .ok_or_else(|| Error::InvalidParameter("[process] window is required".into()))
    }

    pub fn realization(&self) -> Result<Realization> {
        let target = self
            .target
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("a [target] section is required".into()))?;
        let points = PointSet::from_rows(&target.points)?;
        let (rho, flavor) = (self.complex.rho, self.complex.flavor);
        match &target.maximal_faces {
            None => Realization::from_points(points, rho, flavor),
            Some(faces) => {
                let vertices: Vec<u32> = (0..points.len() as u32).collect();
                let cap = faces
                    .iter()
                    .map(|f| f.len().saturating_sub(1))
                    .max()
                    .unwrap_or(0)
                    .max(1);
                let k = SimplicialComplex::from_maximal_faces(cap, &vertices, faces)?;
                Realization::new(k, points, rho, flavor)
            }
        }
    }
}

/// Runs the experiment a config describes. Timings are recorded; strip them
/// with [`ExperimentReport::without_timings`] for byte-stable output.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let seed = cfg.process.seed;
    let trials = cfg.experiment.trials;
    let mut report = match cfg.experiment.kind {
        ExperimentKind::Events => {
            let real = cfg.realization()?;
            let delta = cfg.experiment.delta.unwrap_or_else(|| real.default_delta());
            estimate_event_probabilities(&real, delta, cfg.intensity()?, trials, seed)?
        }
        ExperimentKind::Isolation => {
            let real = cfg.realization()?;
            let mut windows = vec![cfg.window()?];
            windows.extend(cfg.experiment.windows.iter().cloned());
            if windows.len() == 1 {
                run_isolation_experiment(&real, cfg.intensity()?, &windows[0], trials, seed)?
            } else {
                isolation_scaling(&real, cfg.intensity()?, &windows, trials, seed)?
            }
        }
        ExperimentKind::Pendant => {
            let real = cfg.realization()?;
            run_pendant_experiment(
                &real,
                cfg.intensity()?,
                &cfg.window()?,
                trials,
                seed,
                cfg.experiment.plant,
            )?
        }
        ExperimentKind::Percolation => {
            let started = Instant::now();
            let curve = percolation_probe(
                cfg.complex.rho,
                cfg.experiment.dim.unwrap_or(2),
                &cfg.experiment.t_values,
                &cfg.experiment.window_sides,
                trials,
                seed,
            )?;
            let mut r = curve.to_report(serde_json::Value::Null);
            r.time("total", started);
            r
        }
    };
    report.config = serde_json::to_value(cfg)?;
    Ok(report)
}
