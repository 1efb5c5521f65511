#![allow(dead_code)]

pub mod checks;
pub mod oracle;

use rand::seq::SliceRandom;
use rand::Rng;
use tanglefloer::chain::{SignKind, Variant};
use tanglefloer::moves::{apply_move, parse_script, MoveSpec};
use tanglefloer::{tgl, BranchPair, Surface, Tangle};

pub const FIXTURES: [&str; 6] = ["figure8", "tilted", "henon_pair", "chaos", "badflip_pre", "badflip"];

pub fn fixture_text(name: &str) -> String {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn fixture(name: &str) -> Tangle {
    tgl::parse(&fixture_text(&format!("{name}.tgl"))).unwrap()
}

fn pairs(t: &Tangle) -> Vec<BranchPair> {
    let mut v: Vec<BranchPair> = t.points().iter().map(|p| p.branch_pair()).collect();
    v.sort();
    v.dedup();
    v
}

/// Anchors on one branch: points with iterate in `-1..=1` and, for the
/// stable branch, the fixed point.
fn anchors(t: &Tangle, unstable: bool, positive: bool) -> Vec<String> {
    let mut v: Vec<String> = t
        .points()
        .iter()
        .filter(|p| p.iterate.abs() <= 1)
        .filter(|p| (if unstable { p.t_u } else { p.t_s } > 0.0) == positive)
        .map(|p| p.reference().to_string())
        .collect();
    if !unstable {
        v.push("x".into());
    }
    v
}

/// A random creation move that applies to `t`, as script text.
pub fn random_create(t: &Tangle, rng: &mut impl Rng, tries: usize) -> Option<(MoveSpec, Tangle)> {
    let ps = pairs(t);
    for _ in 0..tries {
        let pair = *ps.choose(rng)?;
        let u = anchors(t, true, pair.u_positive);
        let s = anchors(t, false, pair.s_positive);
        let (Some(au), Some(as_)) = (u.choose(rng), s.choose(rng)) else { continue };
        let sign = if rng.gen_bool(0.5) { "+1" } else { "-1" };
        let label = match t.surface {
            Surface::Plane => "()",
            _ => "(0)",
        };
        let order = if rng.gen_bool(0.5) { "" } else { " order=parallel" };
        let line = format!("mv create {pair} after_u={au} after_s={as_} sign={sign} label={label}{order}");
        let spec = parse_script(&line).unwrap().remove(0);
        if let Ok(after) = apply_move(t, &spec) {
            return Some((spec, after));
        }
    }
    None
}

/// A csi-preserving sequence of up to `len` moves starting at `t`: random
/// creations, sometimes undone by annihilating the most recent pair.
pub fn random_sequence(t: &Tangle, rng: &mut impl Rng, len: usize) -> Vec<(MoveSpec, Tangle)> {
    let mut steps: Vec<(MoveSpec, Tangle)> = Vec::new();
    let mut created: Vec<MoveSpec> = Vec::new();
    for _ in 0..len {
        let cur = steps.last().map_or(t, |s| &s.1).clone();
        let next = if !created.is_empty() && rng.gen_bool(0.3) {
            let spec = created.pop().unwrap().inverse();
            apply_move(&cur, &spec).ok().map(|a| (spec, a))
        } else {
            random_create(&cur, rng, 50).inspect(|(s, _)| created.push(s.clone()))
        };
        let Some((spec, after)) = next else { break };
        if !tanglefloer::classify::validate(&after).csi {
            if spec.direction == tanglefloer::moves::Direction::Create {
                created.pop();
            }
            continue;
        }
        steps.push((spec, after));
    }
    steps
}

/// Every integer variant and sign system applicable to `t`.
pub fn sign_systems() -> Vec<(Variant, SignKind)> {
    use tanglefloer::chain::Orientation::*;
    vec![
        (Variant::Primary, SignKind::M),
        (Variant::Primary, SignKind::N(UPlus)),
        (Variant::Primary, SignKind::N(UMinus)),
        (Variant::Primary, SignKind::N(SPlus)),
        (Variant::Primary, SignKind::N(SMinus)),
        (Variant::SemiPrimary, SignKind::M),
        (Variant::Chaotic, SignKind::Nu),
    ]
}
