use serde::Serialize;

use super::{charge, dedup_zeros, find_eps, isolating_radius, newton_zero, Rect, ZERO_RESIDUAL};
use crate::error::{Error, Result};
use crate::model::{poly_coeffs, ModelParams};
use crate::reconstruct::lm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EpLabel {
    X,
    Y,
    U,
    V,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EventKind {
    Creation,
    Annihilation,
    Merge,
    /// Entered or left the tracked disk.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathEvent {
    pub kind: EventKind,
    pub alpha: f64,
    pub position: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpTrajectory {
    pub label: EpLabel,
    pub charge: i32,
    /// `(alpha, k1, k2)`
    pub samples: Vec<(f64, f64, f64)>,
    pub events: Vec<PathEvent>,
}

impl EpTrajectory {
    pub fn event(&self, kind: EventKind) -> Option<&PathEvent> {
        self.events.iter().find(|e| e.kind == kind)
    }

    /// Position at `alpha` by Newton from the interpolated samples.
    pub fn position_at(&self, alpha: f64) -> Option<(f64, f64)> {
        let s = &self.samples;
        if s.is_empty() || alpha < s[0].0 || alpha > s[s.len() - 1].0 {
            return None;
        }
        let j = s.partition_point(|x| x.0 <= alpha).clamp(1, s.len() - 1);
        let (a, b) = (s[j - 1], s[j]);
        let w = if b.0 > a.0 { (alpha - a.0) / (b.0 - a.0) } else { 0.0 };
        let guess = (a.1 + w * (b.1 - a.1), a.2 + w * (b.2 - a.2));
        let (k, r) = newton_zero(alpha, guess);
        (r <= ZERO_RESIDUAL).then_some(k)
    }
}

/// Continuation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceConfig {
    /// Zeros are tracked inside the disk `|k| <= region_radius`.
    pub region_radius: f64,
    /// Seed lattice for the per-step rescan.
    pub grid: usize,
    pub min_step: f64,
    /// Largest displacement accepted for one step.
    pub max_move: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self { region_radius: 3.0, grid: 24, min_step: 1e-5, max_move: 0.2 }
    }
}

#[derive(Debug, Clone, Copy)]
struct Zero {
    k: (f64, f64),
    charge: i32,
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn mid(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1))
}

/// All zeros in the disk with charges; `None` when some charge is not `+-1`.
fn zeros_at(alpha: f64, seeds: &[(f64, f64)], cfg: &TraceConfig) -> Result<Option<Vec<Zero>>> {
    let r = cfg.region_radius;
    let region = Rect::square((0.0, 0.0), r)?;
    let mut found: Vec<((f64, f64), f64)> =
        find_eps(alpha, &region, cfg.grid)?.into_iter().map(|e| (e.position, e.residual)).collect();
    for &s in seeds {
        let (k, res) = newton_zero(alpha, s);
        if res <= ZERO_RESIDUAL {
            found.push((k, res));
        }
    }
    let pts: Vec<(f64, f64)> = dedup_zeros(found)
        .into_iter()
        .map(|(k, _)| k)
        .filter(|k| k.0.hypot(k.1) <= r)
        .collect();
    let mut out = Vec::with_capacity(pts.len());
    for &k in &pts {
        let rad = isolating_radius(k, &pts, 0.05);
        let q = match charge(alpha, k, rad) {
            Ok(q) if q == 1 || q == -1 => q,
            _ => return Ok(None),
        };
        out.push(Zero { k, charge: q });
    }
    Ok(Some(out))
}

/// Number of distinct zeros within `radius` of `center`.
fn count_near(alpha: f64, center: (f64, f64), radius: f64) -> usize {
    let n = 7;
    let mut found = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let s = (
                center.0 + radius * (2.0 * (a as f64 + 0.5) / n as f64 - 1.0),
                center.1 + radius * (2.0 * (b as f64 + 0.5) / n as f64 - 1.0),
            );
            let (k, r) = newton_zero(alpha, s);
            if r <= ZERO_RESIDUAL && dist(k, center) <= radius {
                found.push((k, r));
            }
        }
    }
    dedup_zeros(found).len()
}

/// Bisects the `alpha` at which the number of zeros near `center` changes.
/// `present_at_hi` tells on which side the zeros exist.
fn bisect_event(lo: f64, hi: f64, center: (f64, f64), radius: f64, present_at_hi: bool) -> f64 {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..60 {
        if b - a < 1e-12 {
            break;
        }
        let m = 0.5 * (a + b);
        let present = count_near(m, center, radius) >= 2;
        if present == present_at_hi {
            b = m;
        } else {
            a = m;
        }
    }
    if present_at_hi {
        b
    } else {
        a
    }
}

#[derive(Debug, Clone)]
struct Track {
    charge: i32,
    samples: Vec<(f64, f64, f64)>,
    events: Vec<PathEvent>,
    alive: bool,
}

impl Track {
    fn last(&self) -> (f64, f64) {
        let s = self.samples[self.samples.len() - 1];
        (s.1, s.2)
    }

    fn predict(&self, alpha: f64) -> (f64, f64) {
        let n = self.samples.len();
        if n < 2 {
            return self.last();
        }
        let (a, b) = (self.samples[n - 2], self.samples[n - 1]);
        if b.0 - a.0 <= 0.0 {
            return (b.1, b.2);
        }
        let w = (alpha - b.0) / (b.0 - a.0);
        (b.1 + w * (b.1 - a.1), b.2 + w * (b.2 - a.2))
    }
}

/// Charge-preserving assignment of alive tracks to zeros minimizing the total
/// distance to the predictions. Returns `(track, zero)` index pairs.
fn assign(preds: &[(usize, (f64, f64), i32)], zeros: &[Zero]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for q in [1, -1] {
        let ts: Vec<_> = preds.iter().filter(|p| p.2 == q).collect();
        let zs: Vec<usize> = (0..zeros.len()).filter(|&j| zeros[j].charge == q).collect();
        // exhaustive over injections of the smaller side; class sizes are tiny
        let mut best: (f64, Vec<(usize, usize)>) = (f64::INFINITY, Vec::new());
        let m = ts.len().min(zs.len());
        let mut used_t = vec![false; ts.len()];
        let mut used_z = vec![false; zs.len()];
        #[allow(clippy::too_many_arguments)]
        fn rec(
            depth: usize,
            m: usize,
            ts: &[&(usize, (f64, f64), i32)],
            zs: &[usize],
            zeros: &[Zero],
            used_t: &mut [bool],
            used_z: &mut [bool],
            cur: &mut Vec<(usize, usize)>,
            cost: f64,
            best: &mut (f64, Vec<(usize, usize)>),
        ) {
            if cost >= best.0 {
                return;
            }
            if depth == m {
                *best = (cost, cur.clone());
                return;
            }
            for (a, t) in ts.iter().enumerate() {
                if used_t[a] {
                    continue;
                }
                // fix the lowest unused track when tracks outnumber zeros only via skipping
                for (b, &z) in zs.iter().enumerate() {
                    if used_z[b] {
                        continue;
                    }
                    used_t[a] = true;
                    used_z[b] = true;
                    cur.push((t.0, z));
                    let d = dist(t.1, zeros[z].k);
                    rec(depth + 1, m, ts, zs, zeros, used_t, used_z, cur, cost + d, best);
                    cur.pop();
                    used_t[a] = false;
                    used_z[b] = false;
                }
            }
        }
        let mut cur = Vec::new();
        rec(0, m, &ts, &zs, zeros, &mut used_t, &mut used_z, &mut cur, 0.0, &mut best);
        out.extend(best.1);
    }
    out
}

/// Pairs unmatched points into opposite-charge pairs closer than `pair_dist`;
/// leftovers near the disk boundary are returned separately.
#[allow(clippy::type_complexity)]
fn pair_up(
    items: &[(usize, (f64, f64), i32)],
    pair_dist: f64,
    boundary: f64,
) -> Option<(Vec<(usize, usize)>, Vec<usize>)> {
    let mut used = vec![false; items.len()];
    let mut pairs = Vec::new();
    let mut cands: Vec<(f64, usize, usize)> = Vec::new();
    for a in 0..items.len() {
        for b in a + 1..items.len() {
            if items[a].2 != items[b].2 {
                cands.push((dist(items[a].1, items[b].1), a, b));
            }
        }
    }
    cands.sort_by(|x, y| x.0.total_cmp(&y.0));
    for (d, a, b) in cands {
        if d <= pair_dist && !used[a] && !used[b] {
            used[a] = true;
            used[b] = true;
            pairs.push((items[a].0, items[b].0));
        }
    }
    let mut edge = Vec::new();
    for (a, it) in items.iter().enumerate() {
        if !used[a] {
            if it.1 .0.hypot(it.1 .1) < boundary {
                return None;
            }
            edge.push(it.0);
        }
    }
    Some((pairs, edge))
}

/// Continues every zero of the discriminant inside the disk over
/// `alpha_range` with the default [`TraceConfig`].
pub fn trace_ep_paths(alpha_range: (f64, f64), step: f64) -> Result<Vec<EpTrajectory>> {
    trace_ep_paths_with(alpha_range, step, &TraceConfig::default())
}

pub fn trace_ep_paths_with(
    alpha_range: (f64, f64),
    step: f64,
    cfg: &TraceConfig,
) -> Result<Vec<EpTrajectory>> {
    let (a0, a1) = alpha_range;
    if !(a0.is_finite() && a1.is_finite() && 0.0 <= a0 && a0 < a1 && a1 <= 3.5) {
        return Err(Error::InvalidInput(format!("alpha range ({a0}, {a1}) must lie in [0, 3.5]")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidInput("step must be positive".into()));
    }
    let boundary = cfg.region_radius - 2.0 * cfg.max_move;

    // a start exactly on a coalescence has an uncharged zero; nudge past it
    let mut start = a0;
    let initial = loop {
        if let Some(z) = zeros_at(start, &[], cfg)? {
            break z;
        }
        start += cfg.min_step;
        if start >= a1 {
            return Err(Error::ContinuationStalled { alpha: a0 });
        }
    };
    // likewise stop just short of an end on a coalescence
    let mut a1 = a1;
    while zeros_at(a1, &[], cfg)?.is_none() {
        a1 -= cfg.min_step;
        if a1 <= start {
            return Err(Error::ContinuationStalled { alpha: start });
        }
    }
    let mut tracks: Vec<Track> = initial
        .iter()
        .map(|z| Track { charge: z.charge, samples: vec![(start, z.k.0, z.k.1)], events: vec![], alive: true })
        .collect();

    let mut alpha = start;
    let mut h = step;
    while alpha < a1 - 1e-12 {
        let h_try = h.min(a1 - alpha);
        let a_new = alpha + h_try;
        let alive: Vec<usize> = (0..tracks.len()).filter(|&i| tracks[i].alive).collect();
        let preds: Vec<(usize, (f64, f64), i32)> =
            alive.iter().map(|&i| (i, tracks[i].predict(a_new), tracks[i].charge)).collect();
        let seeds: Vec<(f64, f64)> = preds.iter().map(|p| p.1).collect();

        let attempt = (|| -> Result<Option<_>> {
            let Some(zs) = zeros_at(a_new, &seeds, cfg)? else { return Ok(None) };
            let matched = assign(&preds, &zs);
            for &(t, z) in &matched {
                let moved = dist(tracks[t].last(), zs[z].k);
                let crowd = zs
                    .iter()
                    .enumerate()
                    .filter(|&(j, o)| j != z && o.charge == zs[z].charge)
                    .map(|(_, o)| dist(o.k, zs[z].k))
                    .fold(f64::INFINITY, f64::min);
                if moved > cfg.max_move || moved > 0.5 * crowd {
                    return Ok(None);
                }
            }
            let gone: Vec<(usize, (f64, f64), i32)> = preds
                .iter()
                .filter(|p| !matched.iter().any(|m| m.0 == p.0))
                .map(|p| (p.0, tracks[p.0].last(), p.2))
                .collect();
            let born: Vec<(usize, (f64, f64), i32)> = (0..zs.len())
                .filter(|j| !matched.iter().any(|m| m.1 == *j))
                .map(|j| (j, zs[j].k, zs[j].charge))
                .collect();
            let Some(gone_pairs) = pair_up(&gone, 2.0 * cfg.max_move, boundary) else { return Ok(None) };
            let Some(born_pairs) = pair_up(&born, 2.0 * cfg.max_move, boundary) else { return Ok(None) };
            Ok(Some((zs, matched, gone_pairs, born_pairs)))
        })()?;

        let Some((zs, matched, (gone_pairs, gone_edge), (born_pairs, born_edge))) = attempt else {
            if h_try <= cfg.min_step {
                return Err(Error::ContinuationStalled { alpha });
            }
            h = 0.5 * h_try;
            continue;
        };

        for &(t, z) in &matched {
            tracks[t].samples.push((a_new, zs[z].k.0, zs[z].k.1));
        }
        for (t1, t2) in gone_pairs {
            let c = mid(tracks[t1].last(), tracks[t2].last());
            let rad = (dist(tracks[t1].last(), tracks[t2].last())).max(1e-3);
            let at = bisect_event(alpha, a_new, c, rad, false);
            let pos = match (tracks[t1].clone().position_at_end(at), tracks[t2].clone().position_at_end(at)) {
                (Some(p), Some(q)) => mid(p, q),
                _ => c,
            };
            for t in [t1, t2] {
                tracks[t].samples.push((at, pos.0, pos.1));
                tracks[t].events.push(PathEvent { kind: EventKind::Annihilation, alpha: at, position: pos });
                tracks[t].alive = false;
            }
        }
        for t in gone_edge {
            let p = tracks[t].last();
            tracks[t].events.push(PathEvent { kind: EventKind::Boundary, alpha, position: p });
            tracks[t].alive = false;
        }
        for (z1, z2) in born_pairs {
            let c = mid(zs[z1].k, zs[z2].k);
            let rad = dist(zs[z1].k, zs[z2].k).max(1e-3);
            let at = bisect_event(alpha, a_new, c, rad, true);
            for z in [z1, z2] {
                let ev = PathEvent { kind: EventKind::Creation, alpha: at, position: c };
                let mut samples = vec![(at, c.0, c.1)];
                if a_new > at {
                    samples.push((a_new, zs[z].k.0, zs[z].k.1));
                }
                tracks.push(Track { charge: zs[z].charge, samples, events: vec![ev], alive: true });
            }
        }
        for z in born_edge {
            let k = zs[z].k;
            tracks.push(Track {
                charge: zs[z].charge,
                samples: vec![(a_new, k.0, k.1)],
                events: vec![PathEvent { kind: EventKind::Boundary, alpha: a_new, position: k }],
                alive: true,
            });
        }
        alpha = a_new;
        h = (2.0 * h_try).min(step);
    }

    detect_merges(&mut tracks);
    Ok(label(tracks))
}

impl Track {
    /// Newton-corrected position at `alpha` from the track's own samples,
    /// extrapolating past the end if needed.
    fn position_at_end(self, alpha: f64) -> Option<(f64, f64)> {
        let guess = self.predict(alpha);
        let (k, r) = newton_zero(alpha, guess);
        (r <= ZERO_RESIDUAL).then_some(k)
    }
}

/// Separation of the two zeros nearest `center` at `alpha` (0 if only one).
fn local_separation(alpha: f64, center: (f64, f64), radius: f64) -> f64 {
    let n = 7;
    let mut found = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let s = (
                center.0 + radius * (2.0 * (a as f64 + 0.5) / n as f64 - 1.0),
                center.1 + radius * (2.0 * (b as f64 + 0.5) / n as f64 - 1.0),
            );
            let (k, r) = newton_zero(alpha, s);
            if r <= ZERO_RESIDUAL {
                found.push((k, r));
            }
        }
    }
    let mut pts: Vec<(f64, f64)> = dedup_zeros(found).into_iter().map(|(k, _)| k).collect();
    pts.sort_by(|a, b| dist(*a, center).total_cmp(&dist(*b, center)));
    match pts.len() {
        0 => f64::INFINITY,
        1 => 0.0,
        _ => dist(pts[0], pts[1]),
    }
}

/// `P'` and `P` at the inflection `E = -a/3`; both vanish at a triple root.
fn triple_residual(x: &[f64]) -> Vec<f64> {
    let Ok(p) = ModelParams::new(x[0], x[1], x[2]) else { return vec![1e6; 4] };
    let [a, b, c] = poly_coeffs(&p).monic();
    let d = b - a * a / 3.0;
    let v = c - a * b / 3.0 + a * a * a * (2.0 / 27.0);
    vec![d.re, d.im, v.re, v.im]
}

/// Snaps a merge found by separation search onto the exact triple root,
/// if one lies within `TRIPLE_SNAP` in every coordinate.
fn refine_triple(alpha: f64, center: (f64, f64)) -> Option<(f64, (f64, f64))> {
    let r = lm::minimize(&triple_residual, &[alpha, center.0, center.1], &lm::LmOptions::default());
    let moved = (r.x[0] - alpha).abs().max((r.x[1] - center.0).abs()).max((r.x[2] - center.1).abs());
    (r.residual < TRIPLE_RESIDUAL && moved < TRIPLE_SNAP).then_some((r.x[0], (r.x[1], r.x[2])))
}

const TRIPLE_RESIDUAL: f64 = 1e-12;
const TRIPLE_SNAP: f64 = 1e-2;
const MERGE_SCAN: f64 = 0.2;
const MERGE_TOL: f64 = 1e-3;

/// Finds opposite-charge tracks that meet and pass through each other.
fn detect_merges(tracks: &mut [Track]) {
    let n = tracks.len();
    for a in 0..n {
        for b in a + 1..n {
            if tracks[a].charge == tracks[b].charge {
                continue;
            }
            let common: Vec<(f64, (f64, f64), (f64, f64))> = tracks[a]
                .samples
                .iter()
                .filter_map(|sa| {
                    tracks[b]
                        .samples
                        .iter()
                        .find(|sb| sb.0 == sa.0)
                        .map(|sb| (sa.0, (sa.1, sa.2), (sb.1, sb.2)))
                })
                .collect();
            let sep: Vec<f64> = common.iter().map(|c| dist(c.1, c.2)).collect();
            for j in 1..common.len().saturating_sub(1) {
                if !(sep[j] <= sep[j - 1] && sep[j] <= sep[j + 1] && sep[j] < MERGE_SCAN) {
                    continue;
                }
                let center = mid(common[j].1, common[j].2);
                let radius = (2.0 * sep[j - 1].max(sep[j + 1])).max(1e-3);
                let f = |al: f64| local_separation(al, center, radius);
                // golden-section search on the separation
                let (mut lo, mut hi) = (common[j - 1].0, common[j + 1].0);
                let g = 0.5 * (5f64.sqrt() - 1.0);
                let mut x1 = hi - g * (hi - lo);
                let mut x2 = lo + g * (hi - lo);
                let (mut f1, mut f2) = (f(x1), f(x2));
                for _ in 0..80 {
                    if hi - lo < 1e-10 {
                        break;
                    }
                    if f1 <= f2 {
                        hi = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = hi - g * (hi - lo);
                        f1 = f(x1);
                    } else {
                        lo = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = lo + g * (hi - lo);
                        f2 = f(x2);
                    }
                }
                let at = 0.5 * (lo + hi);
                if f(at).min(f1.min(f2)) > MERGE_TOL {
                    continue;
                }
                let (at, pos) = match refine_triple(at, center) {
                    Some(hit) => hit,
                    None => {
                        let (k, r) = newton_zero(at, center);
                        (at, if r <= ZERO_RESIDUAL { k } else { center })
                    }
                };
                for t in [a, b] {
                    let tr = &mut tracks[t];
                    tr.events.push(PathEvent { kind: EventKind::Merge, alpha: at, position: pos });
                    let idx = tr.samples.partition_point(|s| s.0 < at);
                    tr.samples.insert(idx, (at, pos.0, pos.1));
                }
            }
        }
    }
}

/// Tracks that have this kind of event, paired by shared event `alpha`.
fn event_pairs(tracks: &[Track], kind: EventKind) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..tracks.len() {
        for b in a + 1..tracks.len() {
            let ea = tracks[a].events.iter().find(|e| e.kind == kind);
            let eb = tracks[b].events.iter().find(|e| e.kind == kind);
            if let (Some(x), Some(y)) = (ea, eb) {
                if x.alpha == y.alpha && tracks[a].charge != tracks[b].charge {
                    out.push((a, b));
                }
            }
        }
    }
    out
}

fn label(tracks: Vec<Track>) -> Vec<EpTrajectory> {
    let mut labels = vec![EpLabel::Other; tracks.len()];
    let pos_neg = |t: &Track, plus: EpLabel, minus: EpLabel| if t.charge > 0 { plus } else { minus };
    for (a, b) in event_pairs(&tracks, EventKind::Creation) {
        labels[a] = pos_neg(&tracks[a], EpLabel::X, EpLabel::Y);
        labels[b] = pos_neg(&tracks[b], EpLabel::X, EpLabel::Y);
    }
    for (a, b) in event_pairs(&tracks, EventKind::Annihilation) {
        if labels[a] == EpLabel::Other && labels[b] == EpLabel::Other {
            labels[a] = pos_neg(&tracks[a], EpLabel::U, EpLabel::V);
            labels[b] = pos_neg(&tracks[b], EpLabel::U, EpLabel::V);
        }
    }
    // otherwise the tabulated pair at alpha = 1 identifies X, Y
    let reference = [(0.46, -1.06), (-0.46, 1.06)];
    for (i, t) in tracks.iter().enumerate() {
        if labels[i] != EpLabel::Other {
            continue;
        }
        let at_one = t.samples.iter().find(|s| (s.0 - 1.0).abs() < 1e-9);
        if let Some(s) = at_one {
            if reference.iter().any(|q| dist(*q, (s.1, s.2)) < 0.05) {
                labels[i] = pos_neg(t, EpLabel::X, EpLabel::Y);
            }
        }
    }
    let mut out: Vec<EpTrajectory> = tracks
        .into_iter()
        .zip(labels)
        .map(|(t, label)| EpTrajectory { label, charge: t.charge, samples: t.samples, events: t.events })
        .collect();
    let rank = |l: EpLabel| match l {
        EpLabel::X => 0,
        EpLabel::Y => 1,
        EpLabel::U => 2,
        EpLabel::V => 3,
        EpLabel::Other => 4,
    };
    out.sort_by(|a, b| {
        rank(a.label)
            .cmp(&rank(b.label))
            .then(a.samples[0].0.total_cmp(&b.samples[0].0))
            .then(a.samples[0].1.total_cmp(&b.samples[0].1))
    });
    out
}

/// `alpha_0` where the traced `U` reaches distance `r` from the origin.
pub fn transition_alpha_from(trajectories: &[EpTrajectory], r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {r}")));
    }
    let u = trajectories
        .iter()
        .find(|t| t.label == EpLabel::U)
        .ok_or_else(|| Error::OutOfRange("no U trajectory in the traced range".into()))?;
    let f = |k: (f64, f64)| k.0.hypot(k.1) - r;
    let s = &u.samples;
    for w in s.windows(2) {
        let (fa, fb) = (f((w[0].1, w[0].2)), f((w[1].1, w[1].2)));
        if fa == 0.0 {
            return Ok(w[0].0);
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        let (mut lo, mut hi) = (w[0].0, w[1].0);
        let mut flo = fa;
        for _ in 0..100 {
            if hi - lo < 1e-12 {
                break;
            }
            let m = 0.5 * (lo + hi);
            let Some(k) = u.position_at(m) else { break };
            let fm = f(k);
            if fm.signum() == flo.signum() {
                lo = m;
                flo = fm;
            } else {
                hi = m;
            }
        }
        return Ok(0.5 * (lo + hi));
    }
    Err(Error::OutOfRange(format!("r = {r} is not reached by the U trajectory")))
}

/// Traces `alpha` in `[0, 3]` and solves `r_U(alpha) = r`.
pub fn transition_alpha(r: f64) -> Result<f64> {
    let tr = trace_ep_paths((0.0, 3.0), 0.01)?;
    transition_alpha_from(&tr, r)
}
