use kg_lattice::algebra::{rat, residue_certificate, Rational};
use kg_lattice::dynamics::{
    drift_ensemble, drift_experiment, integrate, random_direction, DriftOptions,
    DriftReport, HorizonRule, IntegratorConfig, Scheme, StateFn,
};
use kg_lattice::lattice::{
    apply_r, apply_r_inv, apply_s, embed_dirichlet, hamiltonian, LatticeParams, LatticeState,
};
use kg_lattice::normalform::{
    h4bar_periodic, hopf_from_modal, kam_hessian_dirichlet, kam_hessians_odd, Integral,
    NormalFormContext,
};
use kg_lattice::par::Exec;
use kg_lattice::phonon::{frequencies, PhononBasis};
use kg_lattice::resonance::{verify_assertion, ResonanceTuple, SearchConfig};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cli::*;
use crate::config::{BoundaryArg, List, Settings};
use crate::error::{CliError, Result};
use crate::output::{num, Document, Report, Table};

fn required<T>(key: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| CliError::usage(format!("missing required value: --{}", key.replace('_', "-"))))
}

fn exec(s: &mut Settings, sequential: bool) -> Result<Exec> {
    Ok(if s.switch("sequential", sequential)? {
        Exec::Sequential
    } else {
        Exec::Parallel
    })
}

fn join(v: &[usize]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn matrix_report(m: &DMatrix<f64>) -> Report {
    let mut r = Report::new();
    for (i, row) in m.row_iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|&x| num(x)).collect();
        r.put(format!("row_{}", i + 1), cells.join(","));
    }
    r
}

/// Fraction with denominator at most `2^16` within `1e-12` of `x`, by
/// continued fractions. The bound keeps chance matches out: a generic real
/// is only approximable to about `1/den²` at that size.
pub fn recognize(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut y = x;
    for _ in 0..40 {
        let a = y.floor();
        if a.abs() > 1e12 {
            return None;
        }
        let a = a as i64;
        let (h2, k2) = (a.checked_mul(h1)?.checked_add(h0)?, a.checked_mul(k1)?.checked_add(k0)?);
        if k2 > 1 << 16 {
            return None;
        }
        if (h2 as f64 / k2 as f64 - x).abs() <= 1e-12 * x.abs().max(1.0) {
            return Some(rat(h2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = y - a as f64;
        if frac == 0.0 {
            return None;
        }
        y = 1.0 / frac;
    }
    None
}

pub fn spectrum(s: &mut Settings, a: &SpectrumArgs) -> Result<Document> {
    let n = required("n", s.optional("n", a.n)?)?;
    let aa = s.value("a", a.a, 1.0)?;
    let w = frequencies(n, aa)?;
    let mut t = Table::new(["k", "omega", "omega_sq"]);
    for k in 1..=n {
        let o = w.omega(k);
        t.push(vec![k.to_string(), num(o), num(o * o)]);
    }
    let mut d = Document::default();
    d.table("spectrum", t);
    Ok(d)
}

fn lattice(s: &mut Settings, n: Option<usize>, a: Option<f64>, beta: Option<f64>) -> Result<LatticeParams> {
    let n = required("n", s.optional("n", n)?)?;
    let a = s.value("a", a, 1.0)?;
    let beta = s.value("beta", beta, 1.0)?;
    Ok(LatticeParams::periodic(n, a, beta)?)
}

pub fn simulate(s: &mut Settings, a: &SimulateArgs) -> Result<Document> {
    let n = required("n", s.optional("n", a.n)?)?;
    let aa = s.value("a", a.a, 1.0)?;
    let beta = s.value("beta", a.beta, 1.0)?;
    let boundary = s.value("boundary", a.boundary, BoundaryArg::Periodic)?;
    let params = match boundary {
        BoundaryArg::Periodic => LatticeParams::periodic(n, aa, beta)?,
        BoundaryArg::Fixed => LatticeParams::dirichlet(n, aa, beta)?,
    };
    let scheme = s.value("scheme", a.scheme, Scheme::Verlet)?;
    let dt = s.value("dt", a.dt, 0.01)?;
    let steps = s.value("steps", a.steps, 1000)?;
    let every = s.value("record_every", a.record_every, 10)?;
    let seed = s.value("seed", a.seed, 0u64)?;
    let eps = s.value("eps", a.eps, 0.1)?;
    let q0: Option<List<f64>> = s.optional("q0", a.q0.clone())?;
    let p0: Option<List<f64>> = s.optional("p0", a.p0.clone())?;

    let s0 = match (q0, p0) {
        (None, None) => {
            let mut d = random_direction(n, seed);
            d.q.iter_mut().chain(d.p.iter_mut()).for_each(|x| *x *= eps);
            match boundary {
                BoundaryArg::Periodic => PhononBasis::for_params(&params)?.from_modal(&d)?,
                BoundaryArg::Fixed => LatticeState::new(d.q, d.p)?,
            }
        }
        (q, p) => {
            let q = q.map(|l| l.0).unwrap_or_else(|| vec![0.0; n]);
            let p = p.map(|l| l.0).unwrap_or_else(|| vec![0.0; n]);
            LatticeState::new(q, p)?
        }
    };
    if s0.len() != n {
        return Err(CliError::usage(format!("initial state has {} sites, expected {n}", s0.len())));
    }
    let cfg = IntegratorConfig::new(dt, steps, every)?;
    let energy = |st: &LatticeState| hamiltonian(&params, st);
    let obs: [&StateFn; 1] = [&energy];
    let traj = integrate(&params, &s0, &cfg, scheme, &obs)?;

    let mut cols = vec!["t".to_string(), "H".to_string()];
    cols.extend((1..=n).map(|j| format!("q_{j}")));
    cols.extend((1..=n).map(|j| format!("p_{j}")));
    let mut t = Table::new(cols);
    for (i, st) in traj.states.iter().enumerate() {
        let mut row = vec![num(traj.times[i]), num(traj.values[0][i])];
        row.extend(st.q.iter().chain(&st.p).map(|&x| num(x)));
        t.push(row);
    }
    let h0 = traj.values[0][0];
    let dev = traj.values[0].iter().fold(0.0f64, |m, h| m.max((h - h0).abs()));
    let mut r = Report::new();
    r.put_f64("initial_energy", h0).put_f64("max_energy_deviation", dev);
    let mut d = Document::default();
    d.table("trajectory", t);
    d.report("summary", r);
    Ok(d)
}

fn drift_table(rep: &DriftReport) -> Table {
    let mut t = Table::new(["epsilon", "observable", "initial", "max_deviation", "drift", "relative"]);
    for row in &rep.rows {
        t.push(vec![
            num(row.epsilon),
            row.observable.clone(),
            num(row.initial),
            num(row.max_deviation),
            num(row.drift),
            row.relative.to_string(),
        ]);
    }
    t
}

pub fn drift(s: &mut Settings, a: &DriftArgs, seq: bool) -> Result<Document> {
    let params = lattice(s, a.n, a.a, a.beta)?;
    let eps = s.value("eps", a.eps.clone(), List(vec![0.02, 0.05, 0.1, 0.2]))?;
    let c = s.value("horizon", a.horizon, 1.0)?;
    let dt = s.optional("dt", a.dt)?;
    let scheme = s.value("scheme", a.scheme, Scheme::LinearSplit)?;
    let seed = s.value("seed", a.seed, 0u64)?;
    let runs = s.value("seeds", a.seeds, 1usize)?;
    let exec = exec(s, seq)?;
    if runs == 0 {
        return Err(CliError::usage("--seeds must be at least 1"));
    }
    let opts = DriftOptions { dt, scheme, exec };
    let horizon = HorizonRule { c };
    let mut d = Document::default();
    let mut summary = Report::new();
    let median = if runs == 1 {
        drift_experiment(&params, &eps.0, horizon, seed, &opts)?
    } else {
        let seeds: Vec<u64> = (0..runs as u64).map(|i| seed + i).collect();
        let ens = drift_ensemble(&params, &eps.0, horizon, &seeds, &opts)?;
        let mut lo = Report::new();
        for name in ens.median.observables() {
            lo.put(&name, ens.min_run_slope(&name).map_or("none".into(), num));
        }
        summary.nest("lowest_single_seed_slope", lo);
        ens.median
    };
    summary.put_f64("dt", median.dt);
    let mut slopes = Report::new();
    let mut mono = Report::new();
    for name in median.observables() {
        slopes.put(&name, median.slope(&name).map_or("none".into(), num));
        mono.put(&name, median.is_monotone(&name));
    }
    summary.nest("slope", slopes).nest("monotone", mono);
    let mut w = Report::new();
    for (i, msg) in median.warnings.iter().enumerate() {
        w.put(format!("w{}", i + 1), msg);
    }
    summary.nest("warnings", w);
    d.table(if runs == 1 { "drift" } else { "median_drift" }, drift_table(&median));
    d.report("summary", summary);
    Ok(d)
}

fn tuple_row(t: &ResonanceTuple) -> Vec<String> {
    vec![
        t.relation.to_string(),
        join(t.lhs()),
        join(t.rhs()),
        num(t.residual),
        t.trivial.to_string(),
    ]
}

pub fn resonances(s: &mut Settings, a: &ResonancesArgs, seq: bool) -> Result<Document> {
    let n = required("n", s.optional("n", a.n)?)?;
    let aa = s.value("a", a.a, 1.0)?;
    let def = SearchConfig::default();
    let tol = s.value("tol", a.tol, def.tol)?;
    let bits = s.value("bits", a.bits, def.precision_bits)?;
    let budget = s.value("budget", a.budget, def.budget)?;
    let exec = exec(s, seq)?;
    let cfg = SearchConfig { tol, precision_bits: bits, budget, exec, ..def };
    let rep = verify_assertion(n, aa, &cfg)?;
    let mut t = Table::new(["relation", "lhs", "rhs", "residual", "trivial"]);
    let mut all: Vec<&ResonanceTuple> = rep.other.iter().chain(&rep.type4).collect();
    all.sort_by(|x, y| (x.relation, &x.indices).cmp(&(y.relation, &y.indices)));
    for tup in all {
        t.push(tuple_row(tup));
    }
    let mut r = Report::new();
    r.put("trivial_pairings", rep.type4.len() - rep.nontrivial.len())
        .put("nontrivial_pairings", rep.nontrivial.len())
        .put("other_relations", rep.other.len())
        .put("sum_filter_hits", rep.sum_filter_hits)
        .put("sum_filter_covers_trivial", rep.sum_filter_covers_trivial)
        .put("verdict", if rep.pass { "PASS" } else { "FAIL" })
        .put("note", rep.note());
    let mut d = Document::default();
    d.table("relations", t);
    d.report("assertion", r);
    Ok(d)
}

pub fn kam(s: &mut Settings, a: &KamArgs) -> Result<Document> {
    let n = required("n", s.optional("n", a.n)?)?;
    let aa = s.value("a", a.a, 1.0)?;
    let beta = s.value("beta", a.beta, 1.0)?;
    let odd = s.switch("odd", a.odd)?;
    let fixed = s.switch("fixed", a.fixed)?;
    let rep = match (odd, fixed) {
        (true, true) => return Err(CliError::usage("--odd and --fixed are exclusive")),
        (false, false) => return Err(CliError::usage("choose --odd (periodic, odd N) or --fixed (n interior sites)")),
        (true, false) => kam_hessians_odd(&frequencies(n, aa)?, beta)?,
        (false, true) => kam_hessian_dirichlet(&frequencies(2 * n + 2, aa)?, beta, n)?,
    };
    let mut r = Report::new();
    r.nest("action_hessian", matrix_report(&rep.hessian_a));
    if rep.hessian_b.nrows() > 0 {
        r.nest("b_hessian", matrix_report(&rep.hessian_b));
    }
    r.put_f64("det_a", rep.det_a).put_f64("det_b", rep.det_b);
    if let Some(cf) = rep.closed_form_det {
        r.put_f64("closed_form_det", cf);
        r.put("closed_form_det_fraction", recognize(cf).map_or("none".into(), |q| q.to_string()));
    }
    r.put_f64("true_det", rep.true_det);
    if let (Some(f), Some(det)) = (&rep.f_matrix, rep.f_det) {
        let mut fm = Report::new();
        for (i, row) in f.row_iter().enumerate() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            fm.put(format!("row_{}", i + 1), cells.join(","));
        }
        r.nest("f_matrix", fm).put("f_det", det);
    }
    r.put("nondegenerate", rep.nondegenerate);
    let mut d = Document::default();
    d.report("kam", r);
    Ok(d)
}

pub fn residue(s: &mut Settings, a: &ResidueArgs) -> Result<Document> {
    let order = s.value("order", a.order, 12i32)?;
    let eval = s.optional("eval", a.eval.clone())?;
    let cert = residue_certificate(order)?;
    let mut r = Report::new();
    r.put("order", cert.order)
        .put("residue", &cert.residue)
        .put("bracket", &cert.bracket)
        .put("factor", cert.factor.as_ref().map_or("none".into(), ToString::to_string))
        .put("residue_g3_1", &cert.residue_g3_one)
        .put("positive_for_positive_a", cert.positive_for_positive_a)
        .put("certifies", cert.certifies());
    if let Some(p) = eval {
        let mut e = Report::new();
        e.put("a", &p.a)
            .put("g3", &p.g3)
            .put("residue", cert.residue.eval(&p.a, &p.g3))
            .put("bracket", cert.bracket.eval(&p.a, &p.g3));
        r.nest("eval", e);
    }
    let mut d = Document::default();
    d.report("residue", r);
    Ok(d)
}

pub fn symmetry(s: &mut Settings, a: &SymmetryArgs) -> Result<Document> {
    let params = lattice(s, a.n, a.a, a.beta)?;
    let n = params.n_particles;
    let seed = s.value("seed", a.seed, 0u64)?;
    let samples = s.value("samples", a.samples, 100usize)?;
    let steps = s.value("steps", a.steps, 1000usize)?;
    let dt = s.value("dt", a.dt, 0.01)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |scale: f64, n: usize| {
        let v: Vec<f64> = (0..2 * n).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
        LatticeState::new(v[..n].to_vec(), v[n..].to_vec()).expect("sizes match")
    };
    let basis = PhononBasis::for_params(&params)?;
    let h4 = |st: &LatticeState| -> Result<f64> {
        let hopf = hopf_from_modal(&basis.to_scaled(st)?)?;
        Ok(h4bar_periodic(&hopf, basis.spectrum(), params.beta)?)
    };
    let (mut group, mut dh, mut dh4, mut emb) = (true, 0.0f64, 0.0f64, 0.0f64);
    let fixed = LatticeParams::dirichlet(n, params.a, params.beta)?;
    let cover = fixed.periodic_cover()?;
    for _ in 0..samples {
        let st = draw(1.0, n);
        let mut x = st.clone();
        for _ in 0..n {
            x = apply_r(&x);
        }
        group &= x == st && apply_s(&apply_s(&st)) == st;
        group &= apply_s(&apply_r(&st)) == apply_r_inv(&apply_s(&st));
        let h = hamiltonian(&params, &st)?;
        let q = h4(&st)?;
        for img in [apply_r(&st), apply_s(&st)] {
            dh = dh.max((hamiltonian(&params, &img)? - h).abs() / h.abs().max(1.0));
            dh4 = dh4.max((h4(&img)? - q).abs() / q.abs().max(1.0));
        }
        let hp = hamiltonian(&cover, &embed_dirichlet(&st))?;
        let hd = hamiltonian(&fixed, &st)?;
        emb = emb.max((hp - 2.0 * hd).abs() / hp.abs().max(1.0));
    }
    let s0 = draw(0.5, n);
    let cfg = IntegratorConfig::new(dt, steps, steps)?;
    let end = |st: &LatticeState| -> Result<LatticeState> {
        let tr = integrate(&params, st, &cfg, Scheme::Verlet, &[])?;
        Ok(tr.states.last().expect("final state").clone())
    };
    let base = end(&s0)?;
    let mut flow = 0.0f64;
    for map in [apply_r, apply_s] {
        flow = flow.max(map(&base).max_abs_diff(&end(&map(&s0))?));
    }
    let mut r = Report::new();
    r.put("group_relations_exact", group)
        .put_f64("energy_invariance", dh)
        .put_f64("normal_form_invariance", dh4)
        .put_f64("flow_commutation", flow)
        .put_f64("embedding_identity", emb);
    let pass = group && dh <= 1e-12 && dh4 <= 1e-12 && flow <= 1e-10 && emb <= 1e-13;
    r.put("verdict", if pass { "PASS" } else { "FAIL" });
    let mut d = Document::default();
    d.report("symmetry", r);
    Ok(d)
}

pub fn normalform_eval(s: &mut Settings, a: &NormalFormArgs) -> Result<Document> {
    let params = lattice(s, a.n, a.a, a.beta)?;
    let n = params.n_particles;
    let seed = s.value("seed", a.seed, 0u64)?;
    let eps = s.value("eps", a.eps, 0.1)?;
    let q: Option<List<f64>> = s.optional("q", a.q.clone())?;
    let p: Option<List<f64>> = s.optional("p", a.p.clone())?;
    let basis = PhononBasis::for_params(&params)?;
    let st = match (q, p) {
        (None, None) => {
            let mut d = random_direction(n, seed);
            d.q.iter_mut().chain(d.p.iter_mut()).for_each(|x| *x *= eps);
            basis.from_modal(&d)?
        }
        (q, p) => LatticeState::new(
            q.map_or_else(|| vec![0.0; n], |l| l.0),
            p.map_or_else(|| vec![0.0; n], |l| l.0),
        )?,
    };
    let m = basis.to_scaled(&st)?;
    let ctx = NormalFormContext::new(basis.spectrum().clone(), params.beta);
    let nf = ctx.normal_form();
    let mut values = Report::new();
    let mut brackets = Report::new();
    values.put_f64("H", hamiltonian(&params, &st)?);
    for i in [Integral::H2, nf].into_iter().chain(ctx.integrals()) {
        values.put_f64(i.to_string(), ctx.evaluate(i, &m)?);
    }
    for i in ctx.integrals() {
        brackets.put_f64(i.to_string(), ctx.bracket(i, nf, &m)?);
    }
    let mut d = Document::default();
    d.report("values", values);
    d.report(format!("brackets_with_{nf}"), brackets);
    Ok(d)
}
