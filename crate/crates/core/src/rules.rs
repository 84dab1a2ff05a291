//! The core rule catalog as executable, oracle-verified rewrites.
//!
//! Each rule is a pair of parameterized diagram builders. For every admitted
//! parameter tuple the two sides have equal semantics, scalars included;
//! `verify_rule` checks this with the tensor oracle, and the acceptance
//! suite sweeps all rules over their admissible arities with random phases
//! and labels. A small set of rules also supports in-place application on
//! concrete diagrams (`apply`), with exact-subgraph matching at a caller
//! supplied site.
//!
//! Scalar bookkeeping note: the well-tempered convention makes most rules
//! exactly scalar-free. Where a side needs an explicit scalar it is carried
//! by zero-legged generators (a bare Z-spider is `sqrt(2)`, a bare H-box is
//! its label), never by an out-of-band constant.

use crate::diagram::{compose, tensor_product, x_spider, Diagram, Endpoint, Generator, NodeId};
use crate::error::{Error, Result};
use crate::semantics::{equal_semantics_with_limit, SemanticEquality};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Oracle budget used when verifying rules and derived identities.
pub const VERIFY_LIMIT: usize = 96;

pub const RULE_NAMES: [&str; 11] = [
    "zs1", "zs2", "hs1", "hs2", "ba1", "ba2", "m", "i", "a", "o", "u",
];

/// Parameters accepted by the rule builders. Each rule reads the fields it
/// needs: `m`/`n` are arities, `a`/`b` H-box labels, `alpha`/`beta` spider
/// phases.
#[derive(Clone, Debug)]
pub struct RuleParams {
    pub m: usize,
    pub n: usize,
    pub a: Complex64,
    pub b: Complex64,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for RuleParams {
    fn default() -> Self {
        RuleParams {
            m: 1,
            n: 1,
            a: Complex64::new(2.0, 0.0),
            b: Complex64::new(3.0, 0.0),
            alpha: 0.0,
            beta: 0.0,
        }
    }
}

fn zero_z_scalar() -> Diagram {
    // a zero-legged spider evaluates to sqrt(2)
    let mut d = Diagram::new();
    d.z(0.0);
    d
}

/// Build both sides of a named rule at the given parameters.
pub fn build_rule(name: &str, p: &RuleParams) -> Result<(Diagram, Diagram)> {
    match name {
        "zs1" => {
            // spiders connected by one wire fuse, adding phases
            let mut l = Diagram::new();
            let s1 = l.z(p.alpha);
            let s2 = l.z(p.beta);
            l.wire(s1, s2);
            for _ in 0..p.m {
                let i = l.input();
                l.wire(i, s1);
            }
            for _ in 0..p.n {
                let o = l.output();
                l.wire(s2, o);
            }
            Ok((l, Diagram::z_spider(p.m, p.n, p.alpha + p.beta)))
        }
        "zs2" => Ok((Diagram::z_spider(1, 1, 0.0), Diagram::id_wire())),
        "hs1" => {
            // one-legged H-boxes on a shared spider fuse, multiplying labels
            let build = |labels: &[Complex64]| {
                let mut d = Diagram::new();
                let s = d.z0();
                for _ in 0..p.m {
                    let i = d.input();
                    d.wire(i, s);
                }
                for _ in 0..p.n {
                    let o = d.output();
                    d.wire(s, o);
                }
                for l in labels {
                    let h = d.h_labeled(*l);
                    d.wire(s, h);
                }
                d
            };
            Ok((build(&[p.a, p.b]), build(&[p.a * p.b])))
        }
        "hs2" => {
            let h = Diagram::hadamard;
            Ok((compose(&h(), &h())?, Diagram::id_wire()))
        }
        "ba1" => {
            // XOR merge then copy equals copies then XOR merges
            let lhs = compose(&Diagram::z_spider(1, p.n, 0.0), &x_spider(p.m, 1))?;
            let mut r = Diagram::new();
            let copies: Vec<NodeId> = (0..p.m)
                .map(|_| {
                    let z = r.z0();
                    let i = r.input();
                    r.wire(i, z);
                    z
                })
                .collect();
            let merges: Vec<NodeId> = (0..p.n).map(|_| r.z0()).collect();
            for z in &copies {
                for x in &merges {
                    let h = r.h();
                    r.wire(*z, h);
                    r.wire(h, *x);
                }
            }
            for x in &merges {
                let h = r.h();
                r.wire(*x, h);
                let o = r.output();
                r.wire(h, o);
            }
            Ok((lhs, r))
        }
        "ba2" => {
            // the X unit state is copied by the spider
            let lhs = compose(&Diagram::z_spider(1, p.n, 0.0), &x_spider(0, 1))?;
            let mut rhs = Diagram::scalar_diagram(Complex64::new(1.0, 0.0));
            for _ in 0..p.n {
                rhs = tensor_product(&rhs, &x_spider(0, 1));
            }
            Ok((lhs, rhs))
        }
        "m" => {
            // labels multiply: copied inputs feed H(a) and H(b), outputs
            // merge on a spider
            let mut l = Diagram::new();
            let ha = l.h_labeled(p.a);
            let hb = l.h_labeled(p.b);
            for _ in 0..p.m {
                let i = l.input();
                let c = l.z0();
                l.wire(i, c);
                l.wire(c, ha);
                l.wire(c, hb);
            }
            let zm = l.z0();
            l.wire(ha, zm);
            l.wire(hb, zm);
            let o = l.output();
            l.wire(zm, o);
            Ok((l, Diagram::h_box(p.m, 1, p.a * p.b)))
        }
        "a" => {
            // labels add: the zero-killed XOR merge of two H-box states is
            // the H-box state of the summed label
            let mut l = Diagram::new();
            let sa = l.h_labeled(p.a);
            let sb = l.h_labeled(p.b);
            let za = l.z0();
            let zb = l.z0();
            l.wire(sa, za);
            l.wire(sb, zb);
            let h0 = l.h_labeled(Complex64::new(0.0, 0.0));
            l.wire(za, h0);
            l.wire(zb, h0);
            let zc = l.z0();
            for z in [za, zb] {
                let h = l.h();
                l.wire(z, h);
                l.wire(h, zc);
            }
            let h_out = l.h();
            l.wire(zc, h_out);
            let o = l.output();
            l.wire(h_out, o);
            l.z(0.0); // sqrt(2)
            Ok((l, Diagram::h_box(0, 1, p.a + p.b)))
        }
        "i" => {
            // plugging the one-legged spider state averages the label with 1
            let lhs = compose(&Diagram::h_box(1, 1, p.a), &Diagram::z_spider(0, 1, 0.0))?;
            let rhs = tensor_product(
                &zero_z_scalar(),
                &Diagram::h_box(0, 1, (Complex64::new(1.0, 0.0) + p.a) / 2.0),
            );
            Ok((lhs, rhs))
        }
        "o" => {
            // pairing the 0-labelled state against its NOT image vanishes
            let zero = Complex64::new(0.0, 0.0);
            let states = tensor_product(
                &Diagram::h_box(0, 1, zero),
                &compose(&crate::diagram::not_gate(), &Diagram::h_box(0, 1, zero))?,
            );
            let lhs = compose(&Diagram::cap_diagram(), &states)?;
            Ok((lhs, Diagram::h_box(0, 0, zero)))
        }
        "u" => Ok((
            Diagram::h_box(0, 1, Complex64::new(1.0, 0.0)),
            Diagram::z_spider(0, 1, 0.0),
        )),
        other => Err(Error::UnknownRule(other.into())),
    }
}

/// Oracle check of one rule instance.
pub fn verify_rule(name: &str, p: &RuleParams, tol: f64) -> Result<SemanticEquality> {
    let (lhs, rhs) = build_rule(name, p)?;
    equal_semantics_with_limit(&lhs, &rhs, tol, VERIFY_LIMIT)
}

fn random_label(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
}

/// Parameter sweep for a rule: every arity where both sides stay within
/// `wire_budget` wires, with `draws` random phase/label draws when the rule
/// has continuous parameters.
pub fn sweep_params(
    name: &str,
    seed: u64,
    draws: usize,
    wire_budget: usize,
) -> Result<Vec<RuleParams>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labelled = matches!(name, "zs1" | "hs1" | "m" | "i" | "a");
    // which arity knobs the rule actually reads
    let (use_m, use_n) = match name {
        "zs1" | "hs1" | "ba1" => (true, true),
        "m" => (true, false),
        "ba2" => (false, true),
        _ => (false, false),
    };
    let mut out = Vec::new();
    for m in 0..=6usize {
        if !use_m && m > 0 {
            break;
        }
        for n in 0..=6usize {
            if !use_n && n > 0 {
                break;
            }
            let candidate = RuleParams {
                m,
                n,
                ..Default::default()
            };
            let Ok((l, r)) = build_rule(name, &candidate) else {
                continue;
            };
            if l.wires().len() > wire_budget || r.wires().len() > wire_budget {
                continue;
            }
            let reps = if labelled { draws } else { 1 };
            for _ in 0..reps {
                out.push(RuleParams {
                    m,
                    n,
                    a: random_label(&mut rng),
                    b: random_label(&mut rng),
                    alpha: rng.gen_range(-3.2..3.2),
                    beta: rng.gen_range(-3.2..3.2),
                });
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// In-place application
// ---------------------------------------------------------------------------

/// A match site for `apply`: the concrete nodes playing the rule's roles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleSite {
    Single(NodeId),
    Pair(NodeId, NodeId),
}

fn wires_between(d: &Diagram, u: NodeId, v: NodeId) -> Vec<usize> {
    d.wires()
        .iter()
        .enumerate()
        .filter(|(_, (a, b))| {
            matches!((a, b), (Endpoint::Node(x, _), Endpoint::Node(y, _))
                if (*x == u && *y == v) || (*x == v && *y == u))
        })
        .map(|(i, _)| i)
        .collect()
}

fn endpoints_of(d: &Diagram, u: NodeId) -> Vec<(usize, Endpoint)> {
    let mut out = Vec::new();
    for (i, (a, b)) in d.wires().iter().enumerate() {
        if matches!(a, Endpoint::Node(x, _) if *x == u) {
            out.push((i, *b));
        }
        if matches!(b, Endpoint::Node(x, _) if *x == u) {
            out.push((i, *a));
        }
    }
    out
}

/// Apply a rule at a site. Supported in-place rules: `zs1` (spider fusion),
/// `zs2` (identity removal), `hs1` (one-legged H-box fusion), `hs2`
/// (Hadamard cancellation). The remaining catalog rules have closed sides
/// and are used through `build_rule` and composition instead.
pub fn apply(name: &str, d: &Diagram, site: &RuleSite) -> Result<Diagram> {
    if !RULE_NAMES.contains(&name) {
        return Err(Error::UnknownRule(name.into()));
    }
    match (name, site) {
        ("zs1", RuleSite::Pair(u, v)) => apply_zs1(d, *u, *v),
        ("zs2", RuleSite::Single(u)) => apply_zs2(d, *u),
        ("hs1", RuleSite::Pair(u, v)) => apply_hs1(d, *u, *v),
        ("hs2", RuleSite::Pair(u, v)) => apply_hs2(d, *u, *v),
        (n, s) => Err(Error::NoMatch(format!(
            "rule `{n}` cannot be applied at site {s:?}"
        ))),
    }
}

fn spider_phase(d: &Diagram, u: NodeId) -> Result<f64> {
    match d.nodes().get(&u) {
        Some(Generator::ZSpider { phase }) => Ok(*phase),
        _ => Err(Error::NoMatch(format!("{u:?} is not a Z-spider"))),
    }
}

fn hbox_label(d: &Diagram, u: NodeId) -> Result<Complex64> {
    match d.nodes().get(&u) {
        Some(Generator::HBox { label }) => Ok(*label),
        _ => Err(Error::NoMatch(format!("{u:?} is not an H-box"))),
    }
}

fn apply_zs1(d: &Diagram, u: NodeId, v: NodeId) -> Result<Diagram> {
    if u == v {
        return Err(Error::NoMatch("fusion needs two distinct spiders".into()));
    }
    let pu = spider_phase(d, u)?;
    let pv = spider_phase(d, v)?;
    let bridge = wires_between(d, u, v);
    if bridge.len() != 1 {
        return Err(Error::NoMatch(format!(
            "spiders must be joined by exactly one wire, found {}",
            bridge.len()
        )));
    }
    let mut out = d.clone();
    let w = out.z(pu + pv);
    let bridge_idx = bridge[0];
    let mut wires = std::mem::take(out.raw_wires_mut());
    wires.remove(bridge_idx);
    for (a, b) in wires.iter_mut() {
        for e in [a, b] {
            if let Endpoint::Node(x, _) = e {
                if *x == u || *x == v {
                    *e = Endpoint::Node(w, 0);
                }
            }
        }
    }
    *out.raw_wires_mut() = wires;
    out.nodes_mut().remove(&u);
    out.nodes_mut().remove(&v);
    out.compact_ports();
    out.validate()?;
    Ok(out)
}

fn apply_zs2(d: &Diagram, u: NodeId) -> Result<Diagram> {
    let phase = spider_phase(d, u)?;
    if phase != 0.0 {
        return Err(Error::NoMatch(
            "identity removal needs a phase-free spider".into(),
        ));
    }
    let eps = endpoints_of(d, u);
    if eps.len() != 2 {
        return Err(Error::NoMatch(format!(
            "spider has degree {}, expected 2",
            eps.len()
        )));
    }
    let mut out = d.clone();
    let (w1, e1) = eps[0];
    let (w2, e2) = eps[1];
    let mut wires = std::mem::take(out.raw_wires_mut());
    if w1 == w2 {
        // self-loop: a closed circle through the spider evaluates to 2
        wires.remove(w1);
        out.mul_scalar(Complex64::new(2.0, 0.0));
    } else {
        let (hi, lo) = if w1 > w2 { (w1, w2) } else { (w2, w1) };
        wires.remove(hi);
        wires.remove(lo);
        wires.push((e1, e2));
    }
    *out.raw_wires_mut() = wires;
    out.nodes_mut().remove(&u);
    out.compact_ports();
    out.validate()?;
    Ok(out)
}

fn apply_hs1(d: &Diagram, u: NodeId, v: NodeId) -> Result<Diagram> {
    if u == v {
        return Err(Error::NoMatch("fusion needs two distinct H-boxes".into()));
    }
    let la = hbox_label(d, u)?;
    let lb = hbox_label(d, v)?;
    let eu = endpoints_of(d, u);
    let ev = endpoints_of(d, v);
    if eu.len() != 1 || ev.len() != 1 {
        return Err(Error::NoMatch("both H-boxes must be one-legged".into()));
    }
    let (host_u, host_v) = match (eu[0].1, ev[0].1) {
        (Endpoint::Node(x, _), Endpoint::Node(y, _)) => (x, y),
        _ => return Err(Error::NoMatch("H-box legs must attach to a spider".into())),
    };
    if host_u != host_v {
        return Err(Error::NoMatch("H-boxes must share one spider".into()));
    }
    spider_phase(d, host_u)?;
    let mut out = d.clone();
    let mut wires = std::mem::take(out.raw_wires_mut());
    wires.remove(ev[0].0);
    *out.raw_wires_mut() = wires;
    out.nodes_mut().remove(&v);
    out.nodes_mut()
        .insert(u, Generator::HBox { label: la * lb });
    out.compact_ports();
    out.validate()?;
    Ok(out)
}

fn apply_hs2(d: &Diagram, u: NodeId, v: NodeId) -> Result<Diagram> {
    if u == v {
        return Err(Error::NoMatch(
            "cancellation needs two distinct H-boxes".into(),
        ));
    }
    let minus_one = Complex64::new(-1.0, 0.0);
    if hbox_label(d, u)? != minus_one || hbox_label(d, v)? != minus_one {
        return Err(Error::NoMatch(
            "both boxes must carry the default label".into(),
        ));
    }
    let eu = endpoints_of(d, u);
    let ev = endpoints_of(d, v);
    if eu.len() != 2 || ev.len() != 2 {
        return Err(Error::NoMatch("both H-boxes must be two-legged".into()));
    }
    let bridge = wires_between(d, u, v);
    let mut out = d.clone();
    let mut wires = std::mem::take(out.raw_wires_mut());
    match bridge.len() {
        1 => {
            let outer_u = eu
                .iter()
                .find(|(w, _)| *w != bridge[0])
                .ok_or_else(|| Error::NoMatch("missing outer wire".into()))?;
            let outer_v = ev
                .iter()
                .find(|(w, _)| *w != bridge[0])
                .ok_or_else(|| Error::NoMatch("missing outer wire".into()))?;
            let mut remove = vec![bridge[0], outer_u.0, outer_v.0];
            remove.sort_unstable();
            remove.dedup();
            for idx in remove.into_iter().rev() {
                wires.remove(idx);
            }
            wires.push((outer_u.1, outer_v.1));
        }
        2 => {
            // closed Hadamard pair: trace of the identity
            for idx in [bridge[1], bridge[0]] {
                wires.remove(idx);
            }
            out.mul_scalar(Complex64::new(2.0, 0.0));
        }
        k => return Err(Error::NoMatch(format!("H-boxes joined by {k} wires"))),
    }
    *out.raw_wires_mut() = wires;
    out.nodes_mut().remove(&u);
    out.nodes_mut().remove(&v);
    out.compact_ports();
    out.validate()?;
    Ok(out)
}

/// Enumerate valid sites for an in-place rule.
pub fn find_sites(name: &str, d: &Diagram) -> Vec<RuleSite> {
    let ids: Vec<NodeId> = d.nodes().keys().copied().collect();
    let mut sites = Vec::new();
    match name {
        "zs2" => {
            for u in &ids {
                if apply_zs2(d, *u).is_ok() {
                    sites.push(RuleSite::Single(*u));
                }
            }
        }
        "zs1" | "hs1" | "hs2" => {
            for (i, u) in ids.iter().enumerate() {
                for v in &ids[i + 1..] {
                    let site = RuleSite::Pair(*u, *v);
                    if apply(name, d, &site).is_ok() {
                        sites.push(site);
                    }
                }
            }
        }
        _ => {}
    }
    sites
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::equal_semantics_with_limit;
    use rand::seq::SliceRandom;

    const TOL: f64 = 1e-9;

    #[test]
    fn all_rules_verify_at_defaults() {
        for name in RULE_NAMES {
            let eq = verify_rule(name, &RuleParams::default(), TOL).unwrap();
            assert!(eq.equal, "rule {name} differs by {}", eq.max_diff);
        }
    }

    #[test]
    fn zs2_is_the_identity_wire() {
        let eq = verify_rule("zs2", &RuleParams::default(), TOL).unwrap();
        assert!(eq.equal);
    }

    #[test]
    fn m_rule_at_spec_labels() {
        let p = RuleParams {
            m: 1,
            a: Complex64::new(2.0, 0.0),
            b: Complex64::new(3.0, 0.0),
            ..Default::default()
        };
        assert!(verify_rule("m", &p, TOL).unwrap().equal);
        // and the labels really multiply: the fused box carries 6
        let (_, rhs) = build_rule("m", &p).unwrap();
        let labels: Vec<Complex64> = rhs
            .nodes()
            .values()
            .filter_map(|g| match g {
                Generator::HBox { label } => Some(*label),
                _ => None,
            })
            .collect();
        assert_eq!(labels, vec![Complex64::new(6.0, 0.0)]);
    }

    #[test]
    fn u_rule_fixed_arity() {
        assert!(verify_rule("u", &RuleParams::default(), TOL).unwrap().equal);
    }

    #[test]
    fn sweeps_pass_for_every_rule() {
        for name in RULE_NAMES {
            let params = sweep_params(name, 17, 4, 10).unwrap();
            assert!(!params.is_empty(), "{name} sweep empty");
            for p in &params {
                let eq = verify_rule(name, p, TOL).unwrap();
                assert!(eq.equal, "{name} at {p:?} differs by {}", eq.max_diff);
            }
        }
    }

    #[test]
    fn unknown_rule_is_reported() {
        assert!(matches!(
            verify_rule("zs3", &RuleParams::default(), TOL),
            Err(Error::UnknownRule(_))
        ));
    }

    #[test]
    fn apply_zs1_fuses() {
        // Z(0.3)(1,2) . Z(0.2)(1,1) built as two spiders joined by a wire
        let mut d = Diagram::new();
        let s1 = d.z(0.2);
        let s2 = d.z(0.3);
        d.wire(s1, s2);
        let i = d.input();
        d.wire(i, s1);
        for _ in 0..2 {
            let o = d.output();
            d.wire(s2, o);
        }
        let fused = apply("zs1", &d, &RuleSite::Pair(s1, s2)).unwrap();
        assert_eq!(fused.nodes().len(), 1);
        let eq = equal_semantics_with_limit(&d, &fused, TOL, VERIFY_LIMIT).unwrap();
        assert!(eq.equal);
    }

    #[test]
    fn apply_hs1_fuses_boxes_on_a_spider() {
        let mut d = Diagram::new();
        let s = d.z0();
        let o = d.output();
        d.wire(s, o);
        let ha = d.h_labeled(Complex64::new(0.5, 1.0));
        let hb = d.h_labeled(Complex64::new(-2.0, 0.25));
        d.wire(s, ha);
        d.wire(s, hb);
        assert_eq!(d.nodes().len(), 3);
        let fused = apply("hs1", &d, &RuleSite::Pair(ha, hb)).unwrap();
        assert_eq!(fused.nodes().len(), 2);
        let eq = equal_semantics_with_limit(&d, &fused, TOL, VERIFY_LIMIT).unwrap();
        assert!(eq.equal, "differs by {}", eq.max_diff);
    }

    #[test]
    fn apply_rejects_non_matching_site() {
        let mut d = Diagram::new();
        let s = d.z0();
        let h = d.h();
        d.wire(s, h);
        let i = d.input();
        let o = d.output();
        d.wire(i, s);
        d.wire(h, o);
        // hs2 needs two H-boxes
        assert!(matches!(
            apply("hs2", &d, &RuleSite::Pair(s, h)),
            Err(Error::NoMatch(_))
        ));
        // zs1 needs two spiders
        assert!(matches!(
            apply("zs1", &d, &RuleSite::Pair(s, h)),
            Err(Error::NoMatch(_))
        ));
    }

    fn random_diagram(rng: &mut ChaCha8Rng) -> Diagram {
        let mut d = Diagram::new();
        let mut stubs = Vec::new();
        let n_nodes = rng.gen_range(2..6);
        for _ in 0..n_nodes {
            let id = if rng.gen_bool(0.5) {
                d.z(if rng.gen_bool(0.5) {
                    0.0
                } else {
                    rng.gen_range(-3.0..3.0)
                })
            } else if rng.gen_bool(0.5) {
                d.h()
            } else {
                d.h_labeled(Complex64::new(
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                ))
            };
            for _ in 0..rng.gen_range(1..4) {
                stubs.push(id);
            }
        }
        stubs.shuffle(rng);
        while stubs.len() >= 2 {
            let a = stubs.pop().unwrap();
            let b = stubs.pop().unwrap();
            if rng.gen_bool(0.2) {
                // route via the boundary instead
                let o = d.output();
                d.wire(a, o);
                let i = d.input();
                d.wire(i, b);
            } else {
                d.wire(a, b);
            }
        }
        if let Some(last) = stubs.pop() {
            let o = d.output();
            d.wire(last, o);
        }
        d.validate().unwrap();
        d
    }

    #[test]
    fn apply_preserves_semantics_metamorphically() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut applications = 0;
        for _ in 0..40 {
            let d = random_diagram(&mut rng);
            for name in ["zs1", "zs2", "hs1", "hs2"] {
                for site in find_sites(name, &d).into_iter().take(2) {
                    let rewritten = apply(name, &d, &site).unwrap();
                    let eq = equal_semantics_with_limit(&d, &rewritten, TOL, VERIFY_LIMIT).unwrap();
                    assert!(eq.equal, "{name} at {site:?} differs by {}", eq.max_diff);
                    applications += 1;
                }
            }
        }
        assert!(
            applications > 20,
            "only {applications} applications exercised"
        );
    }
}
