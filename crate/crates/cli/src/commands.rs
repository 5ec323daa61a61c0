use nhbraid_core::dilation::{build_dilation, verify_embedding, DilationBundle};
use nhbraid_core::eps::{charge, ep_order, trace_ep_paths, transition_alpha_from, EpOrder, EventKind};
use nhbraid_core::linalg::{c, min_hermitian_eigenvalue, normalized, real, CMat3, CVec3, C64};
use nhbraid_core::model::{hamiltonian, loop_point, Loop, ModelParams};
use nhbraid_core::pipeline::{loop_braid, MIN_SAMPLES};
use nhbraid_core::reconstruct::{forward_ratios, noise_study, solve_eigenvalues};
use nhbraid_core::spectral::{eigenvalues_at, label_order};
use serde_json::{json, Value};

use crate::args::{BraidScan, DilateVerify, EpAtlas, ReconstructDemo, Transition};
use crate::report::{invalid, Outcome, Report, Series};

fn cx(z: C64) -> Value {
    json!([z.re, z.im])
}

fn positive(name: &str, v: f64) -> Outcome<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        invalid(format!("--{name} must be positive, got {v}"))
    }
}

fn finite(name: &str, v: f64) -> Outcome<()> {
    if v.is_finite() {
        Ok(())
    } else {
        invalid(format!("--{name} must be finite"))
    }
}

pub fn braid_scan(a: &BraidScan, config: Value) -> Outcome<Report> {
    finite("alpha", a.alpha)?;
    positive("r", a.r)?;
    if a.n_samples < MIN_SAMPLES {
        return invalid(format!("--n-samples must be at least {MIN_SAMPLES}, got {}", a.n_samples));
    }
    let lp = Loop::new(a.alpha, a.r, (a.center.0, a.center.1))?;
    let b = loop_braid(&lp, a.n_samples)?;
    let mut rep = Report::new(config);
    let mut s = Series::new(&[
        "theta", "phi12", "phi23", "phi31", "re_e1", "im_e1", "re_e2", "im_e2", "re_e3", "im_e3",
    ]);
    let path = &b.phases.path;
    for j in 0..path.len() {
        let mut row = vec![json!(path.thetas[j])];
        row.extend(b.phases.phi.iter().map(|p| json!(p[j])));
        for e in path.at(j) {
            row.extend([json!(e.re), json!(e.im)]);
        }
        s.push(row);
    }
    rep.series = s;
    rep.events = Value::Array(
        b.crossings
            .iter()
            .map(|c| json!({ "kind": "crossing", "theta": c.theta, "tau": c.label(), "i": c.i, "j": c.j }))
            .collect(),
    );
    rep.braid = json!({
        "word": b.word.to_string(),
        "reduced": b.reduced.to_string(),
        "identity": b.reduced.is_empty(),
        "permutation": b.permutation.one_based(),
        "closure": b.closure.one_based(),
        "exponent_sum": b.exponent_sum,
    });
    rep.diagnostics = json!({ "samples": path.len(), "crossings": b.crossings.len() });
    Ok(rep)
}

fn order_json(alpha: f64, o: &EpOrder) -> Value {
    json!({
        "alpha": alpha,
        "point": [o.point.0, o.point.1],
        "order": o.order,
        "degenerate_pair": o.degenerate_pair,
        "fidelity": o.fidelity,
        "eigenvalues": o.eigenvalues.iter().map(|&z| cx(z)).collect::<Vec<_>>(),
        "residual": o.residual,
    })
}

pub fn ep_atlas(a: &EpAtlas, config: Value) -> Outcome<Report> {
    let (lo, hi) = (a.alpha_range.0, a.alpha_range.1);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return invalid(format!("--alpha-range must be increasing, got {lo},{hi}"));
    }
    positive("step", a.step)?;
    for q in &a.order_at {
        finite("order-at", q.alpha + q.k1 + q.k2)?;
    }
    for q in &a.charge_at {
        finite("charge-at", q.alpha + q.k1 + q.k2)?;
        positive("charge-at radius", q.radius)?;
    }
    let trajectories = trace_ep_paths((lo, hi), a.step)?;
    let mut rep = Report::new(config);
    let mut s = Series::new(&["label", "charge", "alpha", "k1", "k2"]);
    let mut events = Vec::new();
    let mut merges = Vec::new();
    for t in &trajectories {
        let label = format!("{:?}", t.label);
        for &(al, k1, k2) in &t.samples {
            s.push(vec![json!(label), json!(t.charge), json!(al), json!(k1), json!(k2)]);
        }
        for ev in &t.events {
            events.push(json!({
                "label": label,
                "kind": format!("{:?}", ev.kind).to_lowercase(),
                "alpha": ev.alpha,
                "position": [ev.position.0, ev.position.1],
            }));
            if ev.kind == EventKind::Merge && !merges.iter().any(|m: &(f64, (f64, f64))| m.0 == ev.alpha) {
                merges.push((ev.alpha, ev.position));
            }
        }
    }
    let merge_orders = merges
        .iter()
        .map(|&(al, p)| ep_order(al, p).map(|o| order_json(al, &o)))
        .collect::<Result<Vec<_>, _>>()?;
    let orders = a
        .order_at
        .iter()
        .map(|q| ep_order(q.alpha, (q.k1, q.k2)).map(|o| order_json(q.alpha, &o)))
        .collect::<Result<Vec<_>, _>>()?;
    let charges = a
        .charge_at
        .iter()
        .map(|q| {
            charge(q.alpha, (q.k1, q.k2), q.radius)
                .map(|n| json!({ "alpha": q.alpha, "center": [q.k1, q.k2], "radius": q.radius, "charge": n }))
        })
        .collect::<Result<Vec<_>, _>>()?;
    rep.series = s;
    rep.events = Value::Array(events);
    rep.eps = json!({
        "trajectories": trajectories
            .iter()
            .map(|t| json!({ "label": format!("{:?}", t.label), "charge": t.charge, "samples": t.samples.len() }))
            .collect::<Vec<_>>(),
        "merges": merge_orders,
        "orders": orders,
        "charges": charges,
    });
    rep.diagnostics = json!({ "trajectories": trajectories.len() });
    Ok(rep)
}

pub fn transition(a: &Transition, config: Value) -> Outcome<Report> {
    positive("r", a.r)?;
    positive("step", a.step)?;
    let trajectories = trace_ep_paths((0.0, 3.0), a.step)?;
    let alpha0 = transition_alpha_from(&trajectories, a.r)?;
    let mut rep = Report::new(config);
    let side = |al: f64| -> Outcome<Value> {
        if !(0.0..=3.5).contains(&al) {
            return Ok(Value::Null);
        }
        let b = loop_braid(&Loop::centered(al, a.r)?, nhbraid_core::pipeline::DEFAULT_SAMPLES)?;
        Ok(json!({ "alpha": al, "word": b.word.to_string(), "identity": b.reduced.is_empty() }))
    };
    rep.braid = json!({ "before": side(alpha0 - 0.1)?, "after": side(alpha0 + 0.1)? });
    rep.events = json!([{ "kind": "transition", "alpha": alpha0 }]);
    if let Some(u) = trajectories.iter().find(|t| t.label == nhbraid_core::EpLabel::U) {
        let mut s = Series::new(&["alpha", "k1", "k2", "r_u"]);
        for &(al, k1, k2) in &u.samples {
            s.push(vec![json!(al), json!(k1), json!(k2), json!(k1.hypot(k2))]);
        }
        rep.series = s;
    }
    rep.diagnostics = json!({ "alpha0": alpha0 });
    Ok(rep)
}

const MARGIN: f64 = 1e-3;
const MAX_M0_DOUBLINGS: usize = 60;

/// Smallest `m0 * 2^n` whose metric stays `MARGIN` above the identity.
fn dilation_with_margin(h: &CMat3, a: &DilateVerify) -> Outcome<(DilationBundle, f64)> {
    let mut m0 = a.m0;
    for _ in 0..MAX_M0_DOUBLINGS {
        if let Ok(b) = build_dilation(h, a.t, &(CMat3::identity() * real(m0)), a.steps, a.s) {
            if b.metric_margin() > MARGIN {
                return Ok((b, m0));
            }
        }
        m0 *= 2.0;
    }
    Err(crate::report::Failure::Numerical(format!("metric margin {MARGIN} not reached by raising M0")))
}

pub fn dilate_verify(a: &DilateVerify, config: Value) -> Outcome<Report> {
    positive("T", a.t)?;
    positive("s", a.s)?;
    positive("m0", a.m0)?;
    if a.m0 <= 1.0 {
        return invalid("--m0 must exceed 1");
    }
    if a.steps == 0 {
        return invalid("--steps must be positive");
    }
    let p = ModelParams::new(a.alpha, a.k.0, a.k.1)?;
    let h = hamiltonian(&p);
    let (b, m0) = dilation_with_margin(&h, a)?;
    let psi0 = normalized(&CVec3::new(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)));
    let residual = verify_embedding(&b, &h, &psi0, a.t)?;
    let mut rep = Report::new(config);
    let mut s = Series::new(&["t", "metric_margin"]);
    for (t, m) in b.time_grid.iter().zip(&b.m) {
        s.push(vec![json!(t), json!(min_hermitian_eigenvalue(&(m - CMat3::identity())))]);
    }
    rep.series = s;
    rep.diagnostics = json!({
        "residual": residual,
        "m0": m0,
        "metric_margin": b.metric_margin(),
        "hermiticity_defect": b.hermiticity_defect(),
    });
    Ok(rep)
}

pub fn reconstruct_demo(a: &ReconstructDemo, config: Value) -> Outcome<Report> {
    finite("alpha", a.alpha)?;
    finite("theta", a.theta)?;
    positive("r", a.r)?;
    if !(a.noise >= 0.0 && a.noise.is_finite()) {
        return invalid("--noise must be a nonnegative fraction");
    }
    if a.noise > 0.0 && a.seed.is_none() {
        return invalid("--seed is required when --noise > 0");
    }
    if a.trials == 0 {
        return invalid("--trials must be positive");
    }
    let p = loop_point(&Loop::centered(a.alpha, a.r)?, a.theta);
    let exact = label_order(eigenvalues_at(&p));
    let ratios = forward_ratios(&p, a.pair.map(|q| [q.0, q.1]))?;
    let rec = solve_eigenvalues(&ratios)?;
    let err = (0..3).map(|i| (rec.eigenvalues[i] - exact[i]).norm()).fold(0.0, f64::max);
    let mut rep = Report::new(config);
    let mut diag = json!({
        "point": p,
        "pair": ratios.which,
        "ratios": { "a": ratios.a, "b": ratios.b },
        "exact": exact.iter().map(|&z| cx(z)).collect::<Vec<_>>(),
        "recovered": rec.eigenvalues.iter().map(|&z| cx(z)).collect::<Vec<_>>(),
        "max_error": err,
        "residual": rec.residual,
        "constraint_residual": rec.constraint_residual,
    });
    if a.noise > 0.0 {
        let st = noise_study(&ratios, &exact, a.noise, a.trials, 0.1, a.seed.unwrap_or_default())?;
        diag["noise"] = json!({
            "sigma": a.noise,
            "trials": st.trials,
            "failures": st.failures,
            "within": st.within,
            "tolerance": st.tolerance,
            "mean": st.mean.iter().map(|&z| cx(z)).collect::<Vec<_>>(),
            "std": st.std,
        });
    }
    let mut s = Series::new(&["band", "re_exact", "im_exact", "re_recovered", "im_recovered"]);
    for i in 0..3 {
        s.push(vec![
            json!(i + 1),
            json!(exact[i].re),
            json!(exact[i].im),
            json!(rec.eigenvalues[i].re),
            json!(rec.eigenvalues[i].im),
        ]);
    }
    rep.series = s;
    rep.diagnostics = diag;
    Ok(rep)
}
