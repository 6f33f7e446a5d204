//! Symplectic integration of the full lattice and drift experiments for the
//! normal-form integrals.
//!
//! Two symmetric second-order splittings are available:
//!
//! * [`Scheme::Verlet`]: kick-drift-kick for `T(p) + V(q)`. Every operation
//!   is sitewise, so the step commutes bitwise with `R` and `S`.
//! * [`Scheme::LinearSplit`]: half kick by the quartic force, exact flow of
//!   the linear lattice, half kick. Exact when `β = 0`, and its error is
//!   `O(β dt²)` rather than `O(dt²)`, which is what lets small-`ε` drift
//!   rise above the integrator floor.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::lattice::{forces_into, Boundary, LatticeParams, LatticeState};
use crate::normalform::{Integral, NormalFormContext};
use crate::par::{self, Exec};
use crate::phonon::{ModalState, PhononBasis};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub steps: usize,
    pub record_every: usize,
}

impl IntegratorConfig {
    pub fn new(dt: f64, steps: usize, record_every: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        if record_every == 0 || (steps > 0 && record_every > steps) {
            return Err(Error::InvalidParameter(format!(
                "record_every must lie in 1..={steps}, got {record_every}"
            )));
        }
        Ok(Self {
            dt,
            steps,
            record_every,
        })
    }

    pub fn total_time(&self) -> f64 {
        self.dt * self.steps as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    Verlet,
    LinearSplit,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "verlet" => Ok(Scheme::Verlet),
            "linear-split" | "split" => Ok(Scheme::LinearSplit),
            _ => Err(Error::InvalidParameter(format!("unknown scheme {s:?}"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Verlet => "verlet",
            Scheme::LinearSplit => "linear-split",
        })
    }
}

/// `min(0.01, 0.05 / max ω)`.
pub fn default_dt(basis: &PhononBasis) -> f64 {
    0.01f64.min(0.05 / basis.spectrum().max())
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    Ok(())
}

fn verlet_in_place(params: &LatticeParams, s: &mut LatticeState, f: &mut [f64], dt: f64) {
    let h = 0.5 * dt;
    forces_into(params, &s.q, f);
    for (p, fj) in s.p.iter_mut().zip(f.iter()) {
        *p += h * fj;
    }
    for (q, p) in s.q.iter_mut().zip(&s.p) {
        *q += dt * p;
    }
    forces_into(params, &s.q, f);
    for (p, fj) in s.p.iter_mut().zip(f.iter()) {
        *p += h * fj;
    }
    s.t += dt;
}

/// One kick-drift-kick step. Negative `dt` runs the step backwards.
pub fn step_verlet(params: &LatticeParams, s: &LatticeState, dt: f64) -> Result<LatticeState> {
    if dt == 0.0 || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("dt must be nonzero, got {dt}")));
    }
    s.check_len(params.n_particles)?;
    let mut out = s.clone();
    let mut f = vec![0.0; s.len()];
    verlet_in_place(params, &mut out, &mut f, dt);
    Ok(out)
}

/// Exact flow of the linear lattice `q'' = -K q` over a fixed time step.
#[derive(Debug, Clone)]
pub struct LinearPropagator {
    cos: DMatrix<f64>,
    sin_over: DMatrix<f64>,
    minus_sin_times: DMatrix<f64>,
    dt: f64,
}

impl LinearPropagator {
    pub fn new(params: &LatticeParams, dt: f64) -> Result<Self> {
        let n = params.n_particles;
        let linear = params.with_beta(0.0);
        // K e_j = -force(e_j) at β = 0
        let mut k = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut f = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            forces_into(&linear, &e, &mut f);
            for i in 0..n {
                k[(i, j)] = -f[i];
            }
            e[j] = 0.0;
        }
        let eig = SymmetricEigen::new(k);
        if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
            return Err(Error::Precondition(
                "linear lattice must be stable (positive stiffness)".into(),
            ));
        }
        let v = &eig.eigenvectors;
        let build = |g: &dyn Fn(f64) -> f64| {
            let d = DVector::from_iterator(n, eig.eigenvalues.iter().map(|&l| g(l.sqrt())));
            v * DMatrix::from_diagonal(&d) * v.transpose()
        };
        Ok(Self {
            cos: build(&|w| (w * dt).cos()),
            sin_over: build(&|w| (w * dt).sin() / w),
            minus_sin_times: build(&|w| -(w * dt).sin() * w),
            dt,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn apply(&self, s: &mut LatticeState) {
        let q = DVector::from_column_slice(&s.q);
        let p = DVector::from_column_slice(&s.p);
        let q1 = &self.cos * &q + &self.sin_over * &p;
        let p1 = &self.minus_sin_times * &q + &self.cos * &p;
        s.q.copy_from_slice(q1.as_slice());
        s.p.copy_from_slice(p1.as_slice());
        s.t += self.dt;
    }
}

/// Stateful stepper for either scheme.
#[derive(Debug, Clone)]
pub struct Stepper {
    params: LatticeParams,
    scheme: Scheme,
    dt: f64,
    linear: Option<LinearPropagator>,
    work: Vec<f64>,
}

impl Stepper {
    /// A negative `dt` steps backwards in time.
    pub fn new(params: &LatticeParams, scheme: Scheme, dt: f64) -> Result<Self> {
        if dt == 0.0 || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be nonzero, got {dt}")));
        }
        let linear = match scheme {
            Scheme::Verlet => None,
            Scheme::LinearSplit => Some(LinearPropagator::new(params, dt)?),
        };
        Ok(Self {
            params: *params,
            scheme,
            dt,
            linear,
            work: vec![0.0; params.n_particles],
        })
    }

    pub fn step(&mut self, s: &mut LatticeState) {
        match (&self.scheme, &self.linear) {
            (Scheme::LinearSplit, Some(lin)) => {
                let h = 0.5 * self.dt * self.params.beta;
                for (p, q) in s.p.iter_mut().zip(&s.q) {
                    *p -= h * q * q * q;
                }
                lin.apply(s);
                for (p, q) in s.p.iter_mut().zip(&s.q) {
                    *p -= h * q * q * q;
                }
            }
            _ => verlet_in_place(&self.params, s, &mut self.work, self.dt),
        }
    }
}

/// A lattice-state observable for [`integrate`].
pub type StateFn<'a> = dyn Fn(&LatticeState) -> Result<f64> + Sync + 'a;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<LatticeState>,
    /// `values[i][r]` is observable `i` at record `r`.
    pub values: Vec<Vec<f64>>,
}

/// Integrates from `s0`, recording the state and every observable at
/// `t = 0` and after every `record_every` steps.
pub fn integrate(
    params: &LatticeParams,
    s0: &LatticeState,
    cfg: &IntegratorConfig,
    scheme: Scheme,
    observables: &[&StateFn<'_>],
) -> Result<Trajectory> {
    s0.check_len(params.n_particles)?;
    let mut stepper = Stepper::new(params, scheme, cfg.dt)?;
    let mut s = s0.clone();
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        values: vec![Vec::new(); observables.len()],
    };
    let record = |s: &LatticeState, traj: &mut Trajectory| -> Result<()> {
        traj.times.push(s.t);
        traj.states.push(s.clone());
        for (slot, f) in traj.values.iter_mut().zip(observables) {
            slot.push(f(s)?);
        }
        Ok(())
    };
    record(&s, &mut traj)?;
    for step in 1..=cfg.steps {
        stepper.step(&mut s);
        if s.q.iter().chain(&s.p).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { step });
        }
        if step % cfg.record_every == 0 {
            record(&s, &mut traj)?;
        }
    }
    Ok(traj)
}

/// `T(ε) = c / ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonRule {
    pub c: f64,
}

impl Default for HorizonRule {
    fn default() -> Self {
        Self { c: 1.0 }
    }
}

impl HorizonRule {
    pub fn horizon(&self, eps: f64) -> f64 {
        if eps > 0.0 {
            self.c / eps
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftOptions {
    /// `None` selects [`default_dt`].
    pub dt: Option<f64>,
    pub scheme: Scheme,
    pub exec: Exec,
}

impl Default for DriftOptions {
    fn default() -> Self {
        Self {
            dt: None,
            scheme: Scheme::LinearSplit,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftRow {
    pub epsilon: f64,
    pub observable: String,
    pub initial: f64,
    pub max_deviation: f64,
    /// `max_deviation / |initial|`, or the absolute deviation when the
    /// initial value is below `1e-12` in magnitude.
    pub drift: f64,
    pub relative: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    pub n: usize,
    pub beta: f64,
    pub dt: f64,
    pub seed: u64,
    pub scheme: Scheme,
    /// Sorted by `ε`, then by observable order.
    pub rows: Vec<DriftRow>,
    /// Least-squares slope of `log drift` against `log ε` per observable,
    /// over the rows with `ε > 0` and positive drift.
    pub slopes: Vec<(String, Option<f64>)>,
    pub warnings: Vec<String>,
}

impl DriftReport {
    pub fn observables(&self) -> Vec<String> {
        self.slopes.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn series(&self, observable: &str) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.observable == observable)
            .map(|r| (r.epsilon, r.drift))
            .collect()
    }

    pub fn slope(&self, observable: &str) -> Option<f64> {
        self.slopes
            .iter()
            .find(|(n, _)| n == observable)
            .and_then(|(_, s)| *s)
    }

    /// Drift never grows as `ε` decreases.
    pub fn is_monotone(&self, observable: &str) -> bool {
        self.series(observable).windows(2).all(|w| w[0].1 <= w[1].1)
    }

    pub fn max_drift(&self) -> f64 {
        self.rows.iter().map(|r| r.drift).fold(0.0, f64::max)
    }
}

/// Least-squares slope of `y` against `x`; `None` with fewer than two points.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Unit vector in `ℝ^{2N}` (scaled `(Q, P)`), Gaussian-normalized.
pub fn random_direction(n: usize, seed: u64) -> ModalState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..2 * n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    let p = v.split_off(n);
    ModalState::new(v, p, true).expect("sizes match")
}

/// Tracked observables: `H₂` followed by the integrals of the normal form.
pub fn drift_observables(ctx: &NormalFormContext) -> Vec<Integral> {
    let mut v = vec![Integral::H2];
    v.extend(ctx.integrals());
    v
}

/// For each `ε` starts from `ε · d`, with `d` one seeded random unit
/// direction in scaled phonon space, integrates to `T(ε)` and records the
/// largest deviation of each tracked integral.
pub fn drift_experiment(
    params: &LatticeParams,
    eps_list: &[f64],
    horizon: HorizonRule,
    seed: u64,
    opts: &DriftOptions,
) -> Result<DriftReport> {
    if params.boundary != Boundary::Periodic {
        return Err(Error::Precondition(
            "drift experiments run on the periodic lattice".into(),
        ));
    }
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter("empty ε list".into()));
    }
    if eps_list.iter().any(|&e| !(e >= 0.0 && e.is_finite())) {
        return Err(Error::InvalidParameter("ε must be finite and nonnegative".into()));
    }
    if eps_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("ε list must be strictly increasing".into()));
    }
    let n = params.n_particles;
    let basis = PhononBasis::for_params(params)?;
    let dt = opts.dt.unwrap_or_else(|| default_dt(&basis));
    check_dt(dt)?;
    let ctx = NormalFormContext::new(basis.spectrum().clone(), params.beta);
    let names = drift_observables(&ctx);
    let dir = random_direction(n, seed);
    let mut warnings: Vec<String> = eps_list
        .iter()
        .filter(|&&e| e >= 1.0)
        .map(|e| format!("amplitude ε = {e} is not small; normal-form estimates do not apply"))
        .collect();

    let run = |eps: f64| -> Result<Vec<DriftRow>> {
        let start = ModalState::new(
            dir.q.iter().map(|x| eps * x).collect(),
            dir.p.iter().map(|x| eps * x).collect(),
            true,
        )?;
        let mut s = basis.from_modal(&start)?;
        let eval = |s: &LatticeState| -> Result<Vec<f64>> {
            let m = basis.to_scaled(s)?;
            names.iter().map(|&i| ctx.evaluate(i, &m)).collect()
        };
        let initial = eval(&s)?;
        let mut dev = vec![0.0f64; names.len()];
        let steps = (horizon.horizon(eps) / dt).ceil() as usize;
        let mut stepper = Stepper::new(params, opts.scheme, dt)?;
        for step in 1..=steps {
            stepper.step(&mut s);
            if s.q.iter().chain(&s.p).any(|x| !x.is_finite()) {
                return Err(Error::NonFinite { step });
            }
            for ((d, v), v0) in dev.iter_mut().zip(eval(&s)?).zip(&initial) {
                *d = d.max((v - v0).abs());
            }
        }
        Ok(names
            .iter()
            .zip(initial.iter().zip(&dev))
            .map(|(name, (&v0, &d))| {
                let relative = v0.abs() > 1e-12;
                DriftRow {
                    epsilon: eps,
                    observable: name.to_string(),
                    initial: v0,
                    max_deviation: d,
                    drift: if relative { d / v0.abs() } else { d },
                    relative,
                }
            })
            .collect())
    };

    let runs = par::map(opts.exec, eps_list.to_vec(), run);
    let mut rows = Vec::new();
    for r in runs {
        rows.extend(r?);
    }
    let slopes = names
        .iter()
        .map(|name| {
            let name = name.to_string();
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.observable == name && r.epsilon > 0.0 && r.drift > 0.0)
                .map(|r| (r.epsilon.ln(), r.drift.ln()))
                .collect();
            (name, fit_slope(&pts))
        })
        .collect::<Vec<_>>();
    if slopes.iter().any(|(_, s)| s.is_none()) && eps_list.iter().filter(|&&e| e > 0.0).count() >= 2
    {
        warnings.push("some observables had zero drift; their slopes are undefined".into());
    }
    Ok(DriftReport {
        n,
        beta: params.beta,
        dt,
        seed,
        scheme: opts.scheme,
        rows,
        slopes,
        warnings,
    })
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Drift statistics over several random directions.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftEnsemble {
    pub seeds: Vec<u64>,
    pub runs: Vec<DriftReport>,
    /// Rows hold the per-`ε` median over seeds of the deviation and drift;
    /// `initial` is the median initial value.
    pub median: DriftReport,
}

impl DriftEnsemble {
    /// Smallest fitted slope of `observable` over the individual runs.
    pub fn min_run_slope(&self, observable: &str) -> Option<f64> {
        self.runs
            .iter()
            .map(|r| r.slope(observable))
            .collect::<Option<Vec<f64>>>()
            .map(|v| v.into_iter().fold(f64::INFINITY, f64::min))
    }
}

/// Runs [`drift_experiment`] once per seed and summarizes with medians.
pub fn drift_ensemble(
    params: &LatticeParams,
    eps_list: &[f64],
    horizon: HorizonRule,
    seeds: &[u64],
    opts: &DriftOptions,
) -> Result<DriftEnsemble> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("need at least one seed".into()));
    }
    let runs = par::map(opts.exec, seeds.to_vec(), |seed| {
        drift_experiment(params, eps_list, horizon, seed, opts)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let first = &runs[0];
    let rows: Vec<DriftRow> = first
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut init: Vec<f64> = runs.iter().map(|x| x.rows[i].initial).collect();
            let mut dev: Vec<f64> = runs.iter().map(|x| x.rows[i].max_deviation).collect();
            let mut drift: Vec<f64> = runs.iter().map(|x| x.rows[i].drift).collect();
            DriftRow {
                epsilon: r.epsilon,
                observable: r.observable.clone(),
                initial: median(&mut init),
                max_deviation: median(&mut dev),
                drift: median(&mut drift),
                relative: runs.iter().all(|x| x.rows[i].relative),
            }
        })
        .collect();
    let slopes = first
        .observables()
        .into_iter()
        .map(|name| {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.observable == name && r.epsilon > 0.0 && r.drift > 0.0)
                .map(|r| (r.epsilon.ln(), r.drift.ln()))
                .collect();
            (name, fit_slope(&pts))
        })
        .collect();
    let mut warnings: Vec<String> = runs.iter().flat_map(|r| r.warnings.clone()).collect();
    warnings.dedup();
    let median = DriftReport {
        rows,
        slopes,
        warnings,
        seed: seeds[0],
        ..first.clone()
    };
    Ok(DriftEnsemble {
        seeds: seeds.to_vec(),
        runs,
        median,
    })
}
