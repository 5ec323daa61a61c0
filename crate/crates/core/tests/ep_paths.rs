use std::sync::OnceLock;

use nhbraid_core::eps::{ep_order, trace_ep_paths, transition_alpha_from, EpLabel, EpTrajectory, EventKind};
use nhbraid_core::model::Loop;
use nhbraid_core::pipeline::loop_braid;

fn traced() -> &'static [EpTrajectory] {
    static T: OnceLock<Vec<EpTrajectory>> = OnceLock::new();
    T.get_or_init(|| trace_ep_paths((0.0, 3.2), 0.01).unwrap())
}

fn by_label(l: EpLabel) -> &'static EpTrajectory {
    traced().iter().find(|t| t.label == l).unwrap_or_else(|| panic!("no {l:?}"))
}

#[test]
fn four_labelled_branches() {
    for (l, q) in [(EpLabel::X, 1), (EpLabel::Y, -1), (EpLabel::U, 1), (EpLabel::V, -1)] {
        assert_eq!(by_label(l).charge, q, "{l:?}");
    }
}

#[test]
fn xy_created_at_origin() {
    for l in [EpLabel::X, EpLabel::Y] {
        let ev = by_label(l).event(EventKind::Creation).unwrap();
        assert!((ev.alpha - 0.39).abs() < 0.01, "{}", ev.alpha);
        assert!(ev.position.0.hypot(ev.position.1) < 1e-3);
    }
}

#[test]
fn xy_merge_into_ep3() {
    let ev = by_label(EpLabel::X).event(EventKind::Merge).unwrap();
    assert!((ev.alpha - 3.0).abs() < 1e-9, "{}", ev.alpha);
    assert!(ev.position.0.hypot(ev.position.1) < 1e-9);
    assert_eq!(ep_order(ev.alpha, ev.position).unwrap().order, 3);
    assert_eq!(ep_order(3.0, ev.position).unwrap().order, 3);
}

#[test]
fn uv_annihilate_inside_gamma_before_merge() {
    let alpha0 = transition_alpha_from(traced(), 1.4).unwrap();
    let u = by_label(EpLabel::U).event(EventKind::Annihilation).unwrap();
    let v = by_label(EpLabel::V).event(EventKind::Annihilation).unwrap();
    assert_eq!(u.alpha, v.alpha);
    assert!(alpha0 < u.alpha && u.alpha < 3.0);
    assert!(u.position.0.hypot(u.position.1) < 1.4);
    // regression value from this solver
    assert!((u.alpha - 1.3429).abs() < 1e-3, "{}", u.alpha);
}

#[test]
fn uv_symmetric_about_origin() {
    let u = by_label(EpLabel::U);
    let v = by_label(EpLabel::V);
    for a in [0.2, 0.8, 1.2] {
        let (p, q) = (u.position_at(a).unwrap(), v.position_at(a).unwrap());
        assert!((p.0 + q.0).abs() < 1e-8 && (p.1 + q.1).abs() < 1e-8);
    }
}

#[test]
fn reference_positions_on_xy_branches() {
    let x = by_label(EpLabel::X).position_at(1.0).unwrap();
    let y = by_label(EpLabel::Y).position_at(1.0).unwrap();
    assert!((x.0 + 0.46).abs() < 0.01 && (x.1 - 1.06).abs() < 0.01, "{x:?}");
    assert!((y.0 - 0.46).abs() < 0.01 && (y.1 + 1.06).abs() < 0.01, "{y:?}");
}

#[test]
fn transition_point() {
    let a0 = transition_alpha_from(traced(), 1.4).unwrap();
    assert!((a0 - 0.83).abs() < 0.01, "{a0}");
    let below = loop_braid(&Loop::centered(a0 - 0.1, 1.4).unwrap(), 256).unwrap();
    let above = loop_braid(&Loop::centered(a0 + 0.1, 1.4).unwrap(), 256).unwrap();
    assert!(below.reduced.is_empty());
    assert!(!above.reduced.is_empty());
}

#[test]
fn transition_near_start() {
    let r0 = {
        let s = by_label(EpLabel::U).samples[0];
        assert_eq!(s.0, 0.0);
        s.1.hypot(s.2)
    };
    let a = transition_alpha_from(traced(), r0 - 1e-4).unwrap();
    assert!(a < 0.01, "{a}");
    assert!(transition_alpha_from(traced(), r0 + 0.5).is_err());
}

#[test]
fn range_ending_on_ep3() {
    let a0 = nhbraid_core::eps::transition_alpha(1.4).unwrap();
    assert!((a0 - 0.83).abs() < 0.01, "{a0}");
}
