//! Derived graph-theoretic identities: local complementation on graph
//! states, hyper local complementation, and the regular hyper pivot, each in
//! plain and scalable form.
//!
//! Every builder returns a `(lhs, rhs)` pair of diagrams transcribed once
//! and gated by the tensor oracle; the builders, not prose, are the source
//! of truth. The well-tempered convention makes all of them exactly
//! scalar-free: no side needs a loose normalisation factor.

use crate::bang::graph_state;
use crate::bitmatrix::BitMatrix;
use crate::diagram::{compose, Diagram, NodeId};
use crate::error::{Error, Result};
use crate::nests::phase_gadget;
use crate::rules::{build_rule, RuleParams};
use crate::scalable::{ScalableDiagram, ScalableGenerator};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

fn minus_one() -> Complex64 {
    Complex64::new(-1.0, 0.0)
}

// ---------------------------------------------------------------------------
// Local complementation
// ---------------------------------------------------------------------------

/// Toggle all edges among the neighbours of `v`.
fn complement_neighbourhood(adj: &BitMatrix, v: usize) -> BitMatrix {
    let n = adj.rows();
    let mut out = adj.clone();
    for u in 0..n {
        if u == v || !adj.get(v, u) {
            continue;
        }
        for w in u + 1..n {
            if w == v || !adj.get(v, w) {
                continue;
            }
            let toggled = !out.get(u, w);
            out.set(u, w, toggled);
            out.set(w, u, toggled);
        }
    }
    out
}

/// Local complementation at `v`: the graph state of `g` equals the graph
/// state of `g` with its neighbourhood of `v` complemented, decorated by a
/// Hadamard-conjugated quarter phase on `v` and opposite quarter phases on
/// the neighbours. The equality is exact with scalar one.
pub fn local_complementation(adj: &BitMatrix, v: usize) -> Result<(Diagram, Diagram)> {
    let n = adj.rows();
    if v >= n {
        return Err(Error::Range(format!(
            "vertex {v} out of range for {n} vertices"
        )));
    }
    let lhs = graph_state(adj)?;

    let complemented = complement_neighbourhood(adj, v);
    let base = graph_state(&complemented)?;
    // decoration layer: H Z(pi/2) H on v, Z(-pi/2) on each neighbour
    let mut layer = Diagram::new();
    for w in 0..n {
        let i = layer.input();
        let o = layer.output();
        if w == v {
            let h1 = layer.h();
            let z = layer.z(FRAC_PI_2);
            let h2 = layer.h();
            layer.wire(i, h1);
            layer.wire(h1, z);
            layer.wire(z, h2);
            layer.wire(h2, o);
        } else if adj.get(v, w) {
            let z = layer.z(-FRAC_PI_2);
            layer.wire(i, z);
            layer.wire(z, o);
        } else {
            layer.wire(i, o);
        }
    }
    let rhs = compose(&layer, &base)?;
    Ok((lhs, rhs))
}

// ---------------------------------------------------------------------------
// Hyper local complementation
// ---------------------------------------------------------------------------

/// The engine behind local complementation, as a diagonal identity on `n`
/// wires: the full phase gadget at `i = e^{i pi / 2}` equals quarter-phase
/// taps on every wire together with a Hadamard edge on every pair. Both
/// sides are exactly scalar-free.
pub fn hyper_local_complementation(n: usize) -> Result<(Diagram, Diagram)> {
    if n == 0 {
        return Err(Error::Range(
            "hyper local complementation needs n >= 1".into(),
        ));
    }
    let i_phase = Complex64::new(0.0, 1.0);
    let lhs = phase_gadget(n, (1 << n) - 1, i_phase);

    let mut rhs = Diagram::new();
    let wires: Vec<NodeId> = (0..n)
        .map(|_| {
            let z = rhs.z0();
            let inp = rhs.input();
            let out = rhs.output();
            rhs.wire(inp, z);
            rhs.wire(z, out);
            z
        })
        .collect();
    for z in &wires {
        let tap = rhs.h_labeled(i_phase);
        rhs.wire(*z, tap);
    }
    for a in 0..n {
        for b in a + 1..n {
            let edge = rhs.h_labeled(minus_one());
            rhs.wire(wires[a], edge);
            rhs.wire(edge, wires[b]);
        }
    }
    Ok((lhs, rhs))
}

/// The two halves of the complete-graph incidence matrix: each pair row
/// keeps only its first (respectively second) endpoint, so each half has at
/// most one 1 per row.
fn incidence_halves(n: usize) -> (BitMatrix, BitMatrix) {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let mut p1 = BitMatrix::zeros(pairs.len(), n);
    let mut p2 = BitMatrix::zeros(pairs.len(), n);
    for (row, (u, v)) in pairs.iter().enumerate() {
        p1.set(row, *u, true);
        p2.set(row, *v, true);
    }
    (p1, p2)
}

/// Scalable form of hyper local complementation on a thick wire of size `n`:
/// the gadget side collapses the wire through a full-ones arrow onto a
/// single tap, the nest side splits the complete-graph incidence into its
/// two endpoint halves and pairs them through a scaled H-box layer.
pub fn hlc_scalable(n: usize) -> Result<(ScalableDiagram, ScalableDiagram)> {
    if n == 0 {
        return Err(Error::Range(
            "hyper local complementation needs n >= 1".into(),
        ));
    }
    let i_phase = Complex64::new(0.0, 1.0);

    let mut lhs = ScalableDiagram::new();
    {
        let inp = lhs.input(n);
        let out = lhs.output(n);
        let copy = lhs.add_node(ScalableGenerator::ScaledZ {
            phases: vec![0.0; n],
            ins: 1,
            outs: 2,
        });
        lhs.wire(inp, copy, n);
        lhs.wire(copy, out, n);
        let parity = lhs.add_node(ScalableGenerator::RedArrow {
            matrix: BitMatrix::ones(1, n),
        });
        lhs.wire(copy, parity, n);
        let tap = lhs.add_node(ScalableGenerator::ScaledH {
            labels: vec![i_phase],
            ins: 1,
            outs: 0,
        });
        lhs.wire(parity, tap, 1);
    }

    let mut rhs = ScalableDiagram::new();
    {
        let c = n * (n - 1) / 2;
        let inp = rhs.input(n);
        let out = rhs.output(n);
        let copy = rhs.add_node(ScalableGenerator::ScaledZ {
            phases: vec![0.0; n],
            ins: 1,
            outs: 4,
        });
        rhs.wire(inp, copy, n);
        rhs.wire(copy, out, n);
        // quarter-phase taps on every wire
        let singles = rhs.add_node(ScalableGenerator::ScaledH {
            labels: vec![i_phase; n],
            ins: 1,
            outs: 0,
        });
        rhs.wire(copy, singles, n);
        // Hadamard edges on every pair, via the two halves of the incidence
        let (p1, p2) = incidence_halves(n);
        let sel1 = rhs.add_node(ScalableGenerator::RedArrow { matrix: p1 });
        rhs.wire(copy, sel1, n);
        let sel2 = rhs.add_node(ScalableGenerator::RedArrow { matrix: p2 });
        rhs.wire(copy, sel2, n);
        let edges = rhs.add_node(ScalableGenerator::ScaledH {
            labels: vec![minus_one(); c],
            ins: 2,
            outs: 0,
        });
        rhs.wire(sel1, edges, c);
        rhs.wire(sel2, edges, c);
    }
    Ok((lhs, rhs))
}

// ---------------------------------------------------------------------------
// Regular hyper pivot
// ---------------------------------------------------------------------------

/// Regular hyper pivot. The rows of `a` are the hyper-edges of the first
/// internal spider over the first group of wires (one H-box per row, legs on
/// the row's support plus the spider), and likewise `b` for the second
/// spider over the second group; the two spiders are joined by a Hadamard
/// box. Eliminating the pair leaves one H-box per row pair, with legs on the
/// union of the two supports. Exact with scalar one on both sides.
pub fn regular_hyper_pivot(a: &BitMatrix, b: &BitMatrix) -> Result<(Diagram, Diagram)> {
    let (rows_a, p) = (a.rows(), a.cols());
    let (rows_b, q) = (b.rows(), b.cols());

    let mut lhs = Diagram::new();
    let xs: Vec<NodeId> = (0..p)
        .map(|_| {
            let z = lhs.z0();
            let i = lhs.input();
            let o = lhs.output();
            lhs.wire(i, z);
            lhs.wire(z, o);
            z
        })
        .collect();
    let ys: Vec<NodeId> = (0..q)
        .map(|_| {
            let z = lhs.z0();
            let i = lhs.input();
            let o = lhs.output();
            lhs.wire(i, z);
            lhs.wire(z, o);
            z
        })
        .collect();
    let u = lhs.z0();
    let w = lhs.z0();
    for i in 0..rows_a {
        let hbox = lhs.h_labeled(minus_one());
        lhs.wire(u, hbox);
        for (k, x) in xs.iter().enumerate() {
            if a.get(i, k) {
                lhs.wire(*x, hbox);
            }
        }
    }
    let bridge = lhs.h_labeled(minus_one());
    lhs.wire(u, bridge);
    lhs.wire(bridge, w);
    for j in 0..rows_b {
        let hbox = lhs.h_labeled(minus_one());
        lhs.wire(w, hbox);
        for (l, y) in ys.iter().enumerate() {
            if b.get(j, l) {
                lhs.wire(*y, hbox);
            }
        }
    }

    let mut rhs = Diagram::new();
    let xs: Vec<NodeId> = (0..p)
        .map(|_| {
            let z = rhs.z0();
            let i = rhs.input();
            let o = rhs.output();
            rhs.wire(i, z);
            rhs.wire(z, o);
            z
        })
        .collect();
    let ys: Vec<NodeId> = (0..q)
        .map(|_| {
            let z = rhs.z0();
            let i = rhs.input();
            let o = rhs.output();
            rhs.wire(i, z);
            rhs.wire(z, o);
            z
        })
        .collect();
    for i in 0..rows_a {
        for j in 0..rows_b {
            let hbox = rhs.h_labeled(minus_one());
            for (k, x) in xs.iter().enumerate() {
                if a.get(i, k) {
                    rhs.wire(*x, hbox);
                }
            }
            for (l, y) in ys.iter().enumerate() {
                if b.get(j, l) {
                    rhs.wire(*y, hbox);
                }
            }
        }
    }
    Ok((lhs, rhs))
}

/// Scalable form of the regular hyper pivot: the boolean arrows compute the
/// row conjunctions (a NOT-conjugated yellow arrow), a full-ones red arrow
/// collapses them to their parity, and the pivot pair reduces to a single
/// Hadamard edge between the two parities.
pub fn regular_hyper_pivot_scalable(
    a: &BitMatrix,
    b: &BitMatrix,
) -> Result<(ScalableDiagram, ScalableDiagram)> {
    let (rows_a, p) = (a.rows(), a.cols());
    let (rows_b, q) = (b.rows(), b.cols());
    if rows_a == 0 || rows_b == 0 || p == 0 || q == 0 {
        return Err(Error::Range("pivot needs nonempty matrices".into()));
    }
    let pi = std::f64::consts::PI;

    // conjunction image: NOT layer, yellow arrow, NOT layer; then parity
    let and_parity = |s: &mut ScalableDiagram,
                      src: crate::scalable::SNodeId,
                      width: usize,
                      rows: usize,
                      m: &BitMatrix| {
        let h1 = s.add_node(ScalableGenerator::ScaledH {
            labels: vec![minus_one(); width],
            ins: 1,
            outs: 1,
        });
        let zp = s.add_node(ScalableGenerator::ScaledZ {
            phases: vec![pi; width],
            ins: 1,
            outs: 1,
        });
        let h2 = s.add_node(ScalableGenerator::ScaledH {
            labels: vec![minus_one(); width],
            ins: 1,
            outs: 1,
        });
        s.wire(src, h1, width);
        s.wire(h1, zp, width);
        s.wire(zp, h2, width);
        let or = s.add_node(ScalableGenerator::YellowArrow { matrix: m.clone() });
        s.wire(h2, or, width);
        let h3 = s.add_node(ScalableGenerator::ScaledH {
            labels: vec![minus_one(); rows],
            ins: 1,
            outs: 1,
        });
        let zp2 = s.add_node(ScalableGenerator::ScaledZ {
            phases: vec![pi; rows],
            ins: 1,
            outs: 1,
        });
        let h4 = s.add_node(ScalableGenerator::ScaledH {
            labels: vec![minus_one(); rows],
            ins: 1,
            outs: 1,
        });
        s.wire(or, h3, rows);
        s.wire(h3, zp2, rows);
        s.wire(zp2, h4, rows);
        let parity = s.add_node(ScalableGenerator::RedArrow {
            matrix: BitMatrix::ones(1, rows),
        });
        s.wire(h4, parity, rows);
        parity
    };

    let build = |with_pivot_pair: bool| -> Result<ScalableDiagram> {
        let mut s = ScalableDiagram::new();
        let xin = s.input(p);
        let xout = s.output(p);
        let xcopy = s.add_node(ScalableGenerator::ScaledZ {
            phases: vec![0.0; p],
            ins: 1,
            outs: 2,
        });
        s.wire(xin, xcopy, p);
        s.wire(xcopy, xout, p);
        let yin = s.input(q);
        let yout = s.output(q);
        let ycopy = s.add_node(ScalableGenerator::ScaledZ {
            phases: vec![0.0; q],
            ins: 1,
            outs: 2,
        });
        s.wire(yin, ycopy, q);
        s.wire(ycopy, yout, q);
        let pa = and_parity(&mut s, xcopy, p, rows_a, a);
        let pb = and_parity(&mut s, ycopy, q, rows_b, b);
        if with_pivot_pair {
            let u = s.add_node(ScalableGenerator::ScaledZ {
                phases: vec![0.0],
                ins: 1,
                outs: 1,
            });
            let w = s.add_node(ScalableGenerator::ScaledZ {
                phases: vec![0.0],
                ins: 1,
                outs: 1,
            });
            let ea = s.add_node(ScalableGenerator::ScaledH {
                labels: vec![minus_one()],
                ins: 2,
                outs: 0,
            });
            s.wire(pa, ea, 1);
            s.wire(u, ea, 1);
            let bridge = s.add_node(ScalableGenerator::ScaledH {
                labels: vec![minus_one()],
                ins: 2,
                outs: 0,
            });
            s.wire(u, bridge, 1);
            s.wire(w, bridge, 1);
            let eb = s.add_node(ScalableGenerator::ScaledH {
                labels: vec![minus_one()],
                ins: 2,
                outs: 0,
            });
            s.wire(w, eb, 1);
            s.wire(pb, eb, 1);
        } else {
            let edge = s.add_node(ScalableGenerator::ScaledH {
                labels: vec![minus_one()],
                ins: 2,
                outs: 0,
            });
            s.wire(pa, edge, 1);
            s.wire(pb, edge, 1);
        }
        Ok(s)
    };
    Ok((build(true)?, build(false)?))
}

/// The bridging lemma of the scalable pivot proof: a bipartite pattern of
/// Hadamard edges with incidence `A^T B` (product over F2) between two wire
/// groups equals, row by row of the common index, a single Hadamard edge
/// between the parities of the two supports. Holds for any boolean matrices
/// with a common row count.
pub fn rhp_lemma(a: &BitMatrix, b: &BitMatrix) -> Result<(Diagram, Diagram)> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols(),
        ));
    }
    let (rows, p, q) = (a.rows(), a.cols(), b.cols());
    let c = a.transpose().mul_f2(b)?;

    let mut lhs = Diagram::new();
    let xs: Vec<NodeId> = (0..p)
        .map(|_| {
            let z = lhs.z0();
            let i = lhs.input();
            let o = lhs.output();
            lhs.wire(i, z);
            lhs.wire(z, o);
            z
        })
        .collect();
    let ys: Vec<NodeId> = (0..q)
        .map(|_| {
            let z = lhs.z0();
            let i = lhs.input();
            let o = lhs.output();
            lhs.wire(i, z);
            lhs.wire(z, o);
            z
        })
        .collect();
    for (k, x) in xs.iter().enumerate() {
        for (l, y) in ys.iter().enumerate() {
            if c.get(k, l) {
                let h = lhs.h_labeled(minus_one());
                lhs.wire(*x, h);
                lhs.wire(h, *y);
            }
        }
    }

    let mut rhs = Diagram::new();
    let xs: Vec<NodeId> = (0..p)
        .map(|_| {
            let z = rhs.z0();
            let i = rhs.input();
            let o = rhs.output();
            rhs.wire(i, z);
            rhs.wire(z, o);
            z
        })
        .collect();
    let ys: Vec<NodeId> = (0..q)
        .map(|_| {
            let z = rhs.z0();
            let i = rhs.input();
            let o = rhs.output();
            rhs.wire(i, z);
            rhs.wire(z, o);
            z
        })
        .collect();
    for i in 0..rows {
        let pa = rhs.z0();
        for (k, x) in xs.iter().enumerate() {
            if a.get(i, k) {
                let h = rhs.h_labeled(minus_one());
                rhs.wire(*x, h);
                rhs.wire(h, pa);
            }
        }
        let pb = rhs.z0();
        for (l, y) in ys.iter().enumerate() {
            if b.get(i, l) {
                let h = rhs.h_labeled(minus_one());
                rhs.wire(*y, h);
                rhs.wire(h, pb);
            }
        }
        let edge = rhs.h_labeled(minus_one());
        rhs.wire(pa, edge);
        rhs.wire(edge, pb);
    }
    Ok((lhs, rhs))
}

// ---------------------------------------------------------------------------
// Rule specialisations of the pivot
// ---------------------------------------------------------------------------

/// The pivot instance with terminal Hadamard edges: `m` inputs each
/// H-connected to the first internal spider, `n` outputs H-connected to the
/// second. Eliminating the pair leaves a complete bipartite pattern of
/// H-boxes over copy spiders. Exact with scalar one.
pub fn rhp_boundary_instance(m: usize, n: usize) -> (Diagram, Diagram) {
    let mut lhs = Diagram::new();
    let u = lhs.z0();
    let w = lhs.z0();
    for _ in 0..m {
        let i = lhs.input();
        let h = lhs.h_labeled(minus_one());
        lhs.wire(i, h);
        lhs.wire(h, u);
    }
    let bridge = lhs.h_labeled(minus_one());
    lhs.wire(u, bridge);
    lhs.wire(bridge, w);
    for _ in 0..n {
        let o = lhs.output();
        let h = lhs.h_labeled(minus_one());
        lhs.wire(w, h);
        lhs.wire(h, o);
    }

    let mut rhs = Diagram::new();
    let gs: Vec<NodeId> = (0..m)
        .map(|_| {
            let z = rhs.z0();
            let i = rhs.input();
            rhs.wire(i, z);
            z
        })
        .collect();
    let hs: Vec<NodeId> = (0..n)
        .map(|_| {
            let z = rhs.z0();
            let o = rhs.output();
            rhs.wire(z, o);
            z
        })
        .collect();
    for g in &gs {
        for h in &hs {
            let edge = rhs.h_labeled(minus_one());
            rhs.wire(*g, edge);
            rhs.wire(edge, *h);
        }
    }
    (lhs, rhs)
}

/// How each specialisation of the pivot reproduces a catalog rule: the
/// boundary pivot instance at the given sizes equals the rule's two sides
/// composed with a Hadamard layer on the outputs (for `hs2` the instance is
/// the bare Hadamard chain itself). Returns
/// `((pivot_lhs, pivot_rhs), (dressed_rule_lhs, dressed_rule_rhs))`.
pub fn rhp_specialization(
    rule: &str,
    m: usize,
    n: usize,
) -> Result<((Diagram, Diagram), (Diagram, Diagram))> {
    let h_layer = |n: usize| -> Diagram {
        let mut d = Diagram::new();
        for _ in 0..n {
            let i = d.input();
            let h = d.h_labeled(minus_one());
            let o = d.output();
            d.wire(i, h);
            d.wire(h, o);
        }
        d
    };
    match rule {
        "hs2" => {
            let pivot = rhp_boundary_instance(1, 1);
            let (rl, rr) = build_rule("hs2", &RuleParams::default())?;
            // H . (H . H) against H . id
            let dressed = (
                compose(&rl, &Diagram::hadamard())?,
                compose(&rr, &Diagram::hadamard())?,
            );
            let _ = pivot.0.validate();
            Ok((pivot, dressed))
        }
        "ba1" => {
            let pivot = rhp_boundary_instance(m, n);
            let (rl, rr) = build_rule(
                "ba1",
                &RuleParams {
                    m,
                    n,
                    ..Default::default()
                },
            )?;
            let dressed = (compose(&h_layer(n), &rl)?, compose(&h_layer(n), &rr)?);
            Ok((pivot, dressed))
        }
        "ba2" => {
            let pivot = rhp_boundary_instance(0, n);
            let (rl, rr) = build_rule(
                "ba2",
                &RuleParams {
                    m: 0,
                    n,
                    ..Default::default()
                },
            )?;
            let dressed = (compose(&h_layer(n), &rl)?, compose(&h_layer(n), &rr)?);
            Ok((pivot, dressed))
        }
        other => Err(Error::UnknownRule(other.into())),
    }
}
