//! The exact tensor-contraction oracle.
//!
//! Evaluation works as a path sum. Z-spiders, cups, caps, swaps and bare
//! boundary-to-boundary wires are delta elements: they force all wires they
//! touch to carry one shared bit. Union-find over wires therefore reduces a
//! diagram to a set of binary *classes*; Z-spider phases attach weights
//! `e^{i alpha v}` to their class and H-boxes become factors `a^{v1 ... vk}`
//! over the classes of their legs. The semantics is the sum over all class
//! assignments, scattered into the boundary tensor, times the well-tempered
//! scalar `2^{q/4}` whose integer exponent `q` is accumulated symbolically.
//!
//! The contraction limit bounds the number of wire indices (and so the
//! number of classes); exceeding it means the instance is too large for the
//! oracle, not that the diagram is invalid.

use crate::diagram::{Diagram, Endpoint, Generator, NodeId};
use crate::error::{Error, Result};
use crate::tensor::Tensor;
use num_complex::Complex64;
use std::collections::BTreeMap;

pub const DEFAULT_CONTRACTION_LIMIT: usize = 24;

/// Well-tempered scalar exponent of a generator at the given degree, in
/// quarter powers of two: `2^{q/4}`.
pub fn well_tempered_quarter_exponent(gen: &Generator, degree: usize) -> i64 {
    match gen {
        Generator::ZSpider { .. } => degree as i64 - 2,
        Generator::HBox { .. } => -(degree as i64),
        Generator::Cup | Generator::Cap | Generator::Swap => 0,
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // lower root wins, keeping class numbering deterministic
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

struct PathSum {
    /// number of classes
    classes: usize,
    /// per-class accumulated spider phase (radians)
    class_phase: Vec<f64>,
    /// H-box factors: (label, classes that must all be 1)
    hbox_factors: Vec<(Complex64, Vec<usize>)>,
    /// boundary classes: outputs then inputs, most significant first
    out_classes: Vec<usize>,
    in_classes: Vec<usize>,
    /// global prefactor
    prefactor: Complex64,
}

/// Dense factor over a sorted set of class variables; `vars[0]` is the most
/// significant bit of the data index.
struct Factor {
    vars: Vec<usize>,
    data: Vec<Complex64>,
}

impl Factor {
    fn from_hbox(label: Complex64, mut vars: Vec<usize>) -> Factor {
        vars.sort_unstable();
        vars.dedup();
        let len = 1usize << vars.len();
        let mut data = vec![Complex64::new(1.0, 0.0); len];
        data[len - 1] = label;
        Factor { vars, data }
    }

    fn phase(var: usize, phase: f64) -> Factor {
        Factor {
            vars: vec![var],
            data: vec![Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, phase)],
        }
    }

    fn value(&self, assignment: impl Fn(usize) -> usize) -> Complex64 {
        let mut idx = 0usize;
        for v in &self.vars {
            idx = (idx << 1) | assignment(*v);
        }
        self.data[idx]
    }
}

/// Multiply the given factors together and sum out variable `v`.
fn merge_and_sum(factors: Vec<Factor>, v: usize) -> Factor {
    let mut vars: Vec<usize> = factors
        .iter()
        .flat_map(|f| f.vars.iter().copied())
        .collect();
    vars.sort_unstable();
    vars.dedup();
    vars.retain(|x| *x != v);
    let len = 1usize << vars.len();
    let mut data = vec![Complex64::new(0.0, 0.0); len];
    for (idx, slot) in data.iter_mut().enumerate() {
        for vbit in 0..2usize {
            let assignment = |var: usize| -> usize {
                if var == v {
                    vbit
                } else {
                    let pos = vars.iter().position(|x| *x == var).expect("var present");
                    idx >> (vars.len() - 1 - pos) & 1
                }
            };
            let mut term = Complex64::new(1.0, 0.0);
            for f in &factors {
                term *= f.value(assignment);
            }
            *slot += term;
        }
    }
    Factor { vars, data }
}

fn build_path_sum(d: &Diagram, limit: usize) -> Result<PathSum> {
    d.validate()?;
    let wire_count = d.wires().len();
    if wire_count > limit {
        return Err(Error::Capacity {
            wires: wire_count,
            limit,
        });
    }
    // the result tensor has 2^(in + out) entries, so the boundary width is
    // capped independently of the wire budget
    let open = d.inputs().len() + d.outputs().len();
    if open > limit.min(26) {
        return Err(Error::Capacity {
            wires: open,
            limit: limit.min(26),
        });
    }

    // wire slots per node, in port order
    let mut node_wires: BTreeMap<NodeId, Vec<(u16, usize)>> = BTreeMap::new();
    let mut boundary_wire: BTreeMap<u32, usize> = BTreeMap::new();
    for (w, (a, b)) in d.wires().iter().enumerate() {
        for e in [a, b] {
            match e {
                Endpoint::Node(id, port) => node_wires.entry(*id).or_default().push((*port, w)),
                Endpoint::Boundary(bid) => {
                    boundary_wire.insert(bid.0, w);
                }
            }
        }
    }
    for v in node_wires.values_mut() {
        v.sort_unstable();
    }

    let mut uf = UnionFind::new(wire_count);
    let mut quarter: i64 = 0;
    let mut prefactor = d.scalar();

    for (id, gen) in d.nodes() {
        let wires: Vec<usize> = node_wires
            .get(id)
            .map(|v| v.iter().map(|(_, w)| *w).collect())
            .unwrap_or_default();
        quarter += well_tempered_quarter_exponent(gen, wires.len());
        match gen {
            Generator::ZSpider { phase } => {
                if wires.is_empty() {
                    // closed spider: 2^{-1/2} (1 + e^{i phase})
                    prefactor *= Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, *phase);
                } else {
                    for w in &wires[1..] {
                        uf.union(wires[0], *w);
                    }
                }
            }
            Generator::HBox { label } => {
                if wires.is_empty() {
                    // closed H-box evaluates to its label
                    prefactor *= *label;
                }
            }
            Generator::Cup | Generator::Cap => {
                uf.union(wires[0], wires[1]);
            }
            Generator::Swap => {
                // ports 0,1 feed ports 3,2
                uf.union(wires[0], wires[3]);
                uf.union(wires[1], wires[2]);
            }
        }
    }

    // name classes in order of their smallest wire
    let mut class_index: BTreeMap<usize, usize> = BTreeMap::new();
    for w in 0..wire_count {
        let root = uf.find(w);
        let next = class_index.len();
        class_index.entry(root).or_insert(next);
    }
    let classes = class_index.len();

    let mut class_phase = vec![0.0f64; classes];
    for (id, gen) in d.nodes() {
        if let Generator::ZSpider { phase } = gen {
            if let Some(v) = node_wires.get(id) {
                if !v.is_empty() {
                    let root = uf.find(v[0].1);
                    class_phase[class_index[&root]] += phase;
                }
            }
        }
    }

    let mut hbox_factors = Vec::new();
    for (id, gen) in d.nodes() {
        if let Generator::HBox { label } = gen {
            let wires: Vec<usize> = node_wires
                .get(id)
                .map(|v| v.iter().map(|(_, w)| *w).collect())
                .unwrap_or_default();
            if wires.is_empty() {
                continue;
            }
            let mut vars: Vec<usize> = wires.iter().map(|w| class_index[&uf.find(*w)]).collect();
            vars.sort_unstable();
            vars.dedup();
            hbox_factors.push((*label, vars));
        }
    }

    let class_of_boundary = |bid: u32, uf: &mut UnionFind| -> usize {
        let w = boundary_wire[&bid];
        class_index[&uf.find(w)]
    };
    let out_classes: Vec<usize> = d
        .outputs()
        .iter()
        .map(|b| class_of_boundary(b.0, &mut uf))
        .collect();
    let in_classes: Vec<usize> = d
        .inputs()
        .iter()
        .map(|b| class_of_boundary(b.0, &mut uf))
        .collect();

    prefactor *= 2f64.powf(quarter as f64 / 4.0);

    Ok(PathSum {
        classes,
        class_phase,
        hbox_factors,
        out_classes,
        in_classes,
        prefactor,
    })
}

fn evaluate(ps: &PathSum, limit: usize, reverse_order: bool) -> Result<Tensor> {
    let n_out = ps.out_classes.len();
    let n_in = ps.in_classes.len();
    let mut prefactor = ps.prefactor;

    // factor graph over class variables
    let mut factors: Vec<Factor> = ps
        .hbox_factors
        .iter()
        .map(|(label, vars)| Factor::from_hbox(*label, vars.clone()))
        .collect();
    for (c, p) in ps.class_phase.iter().enumerate() {
        if *p != 0.0 {
            factors.push(Factor::phase(c, *p));
        }
    }

    let mut bound = vec![false; ps.classes];
    for c in ps.out_classes.iter().chain(ps.in_classes.iter()) {
        bound[*c] = true;
    }

    // greedy elimination of internal variables, smallest merged factor first
    let mut alive: Vec<bool> = vec![true; ps.classes];
    loop {
        let mut best: Option<(usize, usize)> = None; // (merged rank, var)
        for v in 0..ps.classes {
            if !alive[v] || bound[v] {
                continue;
            }
            let mut vars: Vec<usize> = factors
                .iter()
                .filter(|f| f.vars.contains(&v))
                .flat_map(|f| f.vars.iter().copied())
                .collect();
            vars.sort_unstable();
            vars.dedup();
            let rank = vars.len().saturating_sub(1);
            let better = match best {
                None => true,
                Some((r, bv)) => {
                    rank < r || (rank == r && if reverse_order { v > bv } else { v < bv })
                }
            };
            if better {
                best = Some((rank, v));
            }
        }
        let Some((rank, v)) = best else { break };
        // intermediate factors are dense; cap their rank for memory safety
        let rank_cap = limit.min(26);
        if rank > rank_cap {
            return Err(Error::Capacity {
                wires: rank,
                limit: rank_cap,
            });
        }
        let (touching, rest): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|f| f.vars.contains(&v));
        factors = rest;
        if touching.is_empty() {
            // unconstrained internal wire: bare sum over its two values
            prefactor *= 2.0;
        } else {
            factors.push(merge_and_sum(touching, v));
        }
        alive[v] = false;
    }

    // all remaining factor variables are boundary classes
    let bound_vars: Vec<usize> = (0..ps.classes).filter(|c| bound[*c]).collect();
    let mut t = Tensor::zeros(n_out, n_in);
    let total = 1u64 << bound_vars.len();
    for step in 0..total {
        let assign = if reverse_order {
            total - 1 - step
        } else {
            step
        };
        let value_of = |var: usize| -> usize {
            let pos = bound_vars
                .iter()
                .position(|x| *x == var)
                .expect("bound var");
            (assign >> pos & 1) as usize
        };
        let mut term = prefactor;
        for f in &factors {
            term *= f.value(value_of);
        }
        let mut row = 0usize;
        for (k, c) in ps.out_classes.iter().enumerate() {
            row |= value_of(*c) << (n_out - 1 - k);
        }
        let mut col = 0usize;
        for (k, c) in ps.in_classes.iter().enumerate() {
            col |= value_of(*c) << (n_in - 1 - k);
        }
        t.add_assign_at(row, col, term);
    }
    Ok(t)
}

pub fn semantics_with_limit(d: &Diagram, limit: usize) -> Result<Tensor> {
    let ps = build_path_sum(d, limit)?;
    evaluate(&ps, limit, false)
}

pub fn semantics(d: &Diagram) -> Result<Tensor> {
    semantics_with_limit(d, DEFAULT_CONTRACTION_LIMIT)
}

/// Same sum evaluated with the opposite elimination preference and reversed
/// accumulation order; used to check that the result does not depend on
/// contraction order beyond float rounding.
pub fn semantics_alt_order(d: &Diagram, limit: usize) -> Result<Tensor> {
    let ps = build_path_sum(d, limit)?;
    evaluate(&ps, limit, true)
}

/// `equal_semantics` with an explicit contraction limit.
pub fn equal_semantics_with_limit(
    d1: &Diagram,
    d2: &Diagram,
    tol: f64,
    limit: usize,
) -> Result<SemanticEquality> {
    if d1.inputs().len() != d2.inputs().len() {
        return Err(Error::ArityMismatch {
            expected: d1.inputs().len(),
            found: d2.inputs().len(),
        });
    }
    if d1.outputs().len() != d2.outputs().len() {
        return Err(Error::ArityMismatch {
            expected: d1.outputs().len(),
            found: d2.outputs().len(),
        });
    }
    let t1 = semantics_with_limit(d1, limit)?;
    let t2 = semantics_with_limit(d2, limit)?;
    let (max_diff, r, c) = t1.max_abs_diff(&t2).expect("arities match");
    Ok(SemanticEquality {
        equal: max_diff <= tol,
        max_diff,
        witness: if max_diff > tol { Some((r, c)) } else { None },
    })
}

#[derive(Clone, Debug)]
pub struct SemanticEquality {
    pub equal: bool,
    pub max_diff: f64,
    /// first entry attaining the maximum difference, as (row, col)
    pub witness: Option<(usize, usize)>,
}

/// Compare two diagrams by their semantics; scalars matter.
pub fn equal_semantics(d1: &Diagram, d2: &Diagram, tol: f64) -> Result<SemanticEquality> {
    if d1.inputs().len() != d2.inputs().len() {
        return Err(Error::ArityMismatch {
            expected: d1.inputs().len(),
            found: d2.inputs().len(),
        });
    }
    if d1.outputs().len() != d2.outputs().len() {
        return Err(Error::ArityMismatch {
            expected: d1.outputs().len(),
            found: d2.outputs().len(),
        });
    }
    let t1 = semantics(d1)?;
    let t2 = semantics(d2)?;
    let (max_diff, r, c) = t1.max_abs_diff(&t2).expect("arities match");
    Ok(SemanticEquality {
        equal: max_diff <= tol,
        max_diff,
        witness: if max_diff > tol { Some((r, c)) } else { None },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{compose, not_gate, tensor_product, x_spider};
    use num_complex::Complex64;

    const EPS: f64 = 1e-12;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn phaseless_z_one_one_is_identity() {
        let t = semantics(&Diagram::z_spider(1, 1, 0.0)).unwrap();
        assert!(t.approx_eq(&Tensor::identity(1), EPS));
    }

    #[test]
    fn default_h_box_is_the_hadamard_gate() {
        let t = semantics(&Diagram::hadamard()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expect = Tensor::from_fn(1, 1, |r, col| {
            if (r, col) == (1, 1) {
                c(-s, 0.0)
            } else {
                c(s, 0.0)
            }
        });
        assert!(t.approx_eq(&expect, EPS));
    }

    #[test]
    fn z_zero_two_is_bell_ket() {
        // 2^{(0+2-2)/4} = 1, so exactly |00> + |11>
        let t = semantics(&Diagram::z_spider(0, 2, 0.0)).unwrap();
        let mut expect = Tensor::zeros(2, 0);
        expect.set(0b00, 0, c(1.0, 0.0));
        expect.set(0b11, 0, c(1.0, 0.0));
        assert!(t.approx_eq(&expect, EPS));
    }

    #[test]
    fn bare_wires_bend_through_cups_and_caps() {
        let cup = Diagram::cup_diagram();
        let cap = Diagram::cap_diagram();
        let mut expect_cup = Tensor::zeros(2, 0);
        expect_cup.set(0b00, 0, c(1.0, 0.0));
        expect_cup.set(0b11, 0, c(1.0, 0.0));
        assert!(semantics(&cup).unwrap().approx_eq(&expect_cup, EPS));

        // yanking with a swap threaded through the bend:
        // (id (x) cap) . (swap (x) id) . (id (x) cup) = id
        let lhs = compose(
            &compose(
                &tensor_product(&Diagram::id_wire(), &cap),
                &tensor_product(&Diagram::swap_diagram(), &Diagram::id_wire()),
            )
            .unwrap(),
            &tensor_product(&Diagram::id_wire(), &cup),
        )
        .unwrap();
        assert!(semantics(&lhs)
            .unwrap()
            .approx_eq(&Tensor::identity(1), EPS));
    }

    #[test]
    fn compose_matches_matrix_product() {
        let h = Diagram::hadamard();
        let hh = compose(&h, &h).unwrap();
        assert!(semantics(&hh).unwrap().approx_eq(&Tensor::identity(1), EPS));

        let z = Diagram::z_spider(1, 2, 0.3);
        let x = x_spider(2, 1);
        let zx = compose(&z, &x).unwrap();
        let expect = semantics(&z).unwrap().matmul(&semantics(&x).unwrap());
        assert!(semantics(&zx).unwrap().approx_eq(&expect, EPS));
    }

    #[test]
    fn tensor_product_matches_kronecker() {
        let h = Diagram::hadamard();
        let t = semantics(&tensor_product(&h, &h)).unwrap();
        let hh = semantics(&h).unwrap();
        assert!(t.approx_eq(&hh.kron(&hh), EPS));
    }

    #[test]
    fn not_gate_is_exact_x() {
        let t = semantics(&not_gate()).unwrap();
        let mut expect = Tensor::zeros(1, 1);
        expect.set(0, 1, c(1.0, 0.0));
        expect.set(1, 0, c(1.0, 0.0));
        assert!(t.approx_eq(&expect, EPS));

        // applying it twice gives the identity; the definitional expansion
        // produces scalar exactly 1 (frozen as a regression value)
        let nn = compose(&not_gate(), &not_gate()).unwrap();
        assert!(semantics(&nn).unwrap().approx_eq(&Tensor::identity(1), EPS));
    }

    #[test]
    fn x_spider_small_cases() {
        // (1,1) is the identity under the definitional expansion
        assert!(semantics(&x_spider(1, 1))
            .unwrap()
            .approx_eq(&Tensor::identity(1), EPS));
        // state (0,1) is 2^{1/4} |0>
        let t = semantics(&x_spider(0, 1)).unwrap();
        let mut expect = Tensor::zeros(1, 0);
        expect.set(0, 0, c(2f64.powf(0.25), 0.0));
        assert!(t.approx_eq(&expect, EPS));
        // plugging Z(1,0) on the X state gives the scalar 1
        let plugged = compose(&Diagram::z_spider(1, 0, 0.0), &x_spider(0, 1)).unwrap();
        let t = semantics(&plugged).unwrap();
        assert!((t.get(0, 0) - c(1.0, 0.0)).norm() < EPS);
    }

    #[test]
    fn equal_semantics_reports_witness() {
        let d = Diagram::hadamard();
        let eq = equal_semantics(&d, &d, 1e-9).unwrap();
        assert!(eq.equal);

        let z = Diagram::z_spider(1, 1, 0.0);
        let neq = equal_semantics(&Diagram::hadamard(), &z, 1e-9).unwrap();
        assert!(!neq.equal);
        assert!(neq.witness.is_some());

        let wide = Diagram::z_spider(2, 1, 0.0);
        assert!(equal_semantics(&wide, &z, 1e-9).is_err());
    }

    #[test]
    fn topology_invariance_under_port_permutation() {
        // same spider built with different wiring orders
        let mut a = Diagram::new();
        let za = a.z(0.7);
        let i1 = a.input();
        let i2 = a.input();
        let o = a.output();
        a.wire(i1, za);
        a.wire(i2, za);
        a.wire(za, o);

        let mut b = Diagram::new();
        let zb = b.z(0.7);
        let i1 = b.input();
        let i2 = b.input();
        let o = b.output();
        b.wire(zb, o);
        b.wire(i2, zb);
        b.wire(i1, zb);

        let eq = equal_semantics(&a, &b, 0.0).unwrap();
        assert!(eq.equal, "max diff {}", eq.max_diff);
    }

    #[test]
    fn capacity_error_on_oversized_diagram() {
        let d = Diagram::id_wires(30);
        match semantics(&d) {
            Err(Error::Capacity { wires, limit }) => {
                assert_eq!(wires, 30);
                assert_eq!(limit, DEFAULT_CONTRACTION_LIMIT);
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn well_tempered_exponents_match_closed_forms() {
        for m in 0..4usize {
            for n in 0..4usize {
                let deg = m + n;
                assert_eq!(
                    well_tempered_quarter_exponent(&Generator::z(0.0), deg),
                    (m + n) as i64 - 2
                );
                assert_eq!(
                    well_tempered_quarter_exponent(&Generator::h(), deg),
                    -((m + n) as i64)
                );
            }
        }
        assert_eq!(well_tempered_quarter_exponent(&Generator::Cup, 2), 0);
    }

    #[test]
    fn alternate_order_agrees_tightly() {
        let mut d = Diagram::z_spider(2, 2, 0.3);
        let h = d.h_labeled(c(0.5, 0.25));
        let z2 = d.z(1.1);
        d.wire(h, z2);
        d.wire(z2, h);
        let a = semantics(&d).unwrap();
        let b = semantics_alt_order(&d, DEFAULT_CONTRACTION_LIMIT).unwrap();
        let (diff, _, _) = a.max_abs_diff(&b).unwrap();
        assert!(diff <= 1e-12);
    }

    #[test]
    fn closed_scalars() {
        // zero-legged Z spider: 2^{-1/2} (1 + 1) = sqrt(2)
        let t = semantics(&Diagram::z_spider(0, 0, 0.0)).unwrap();
        assert!((t.get(0, 0) - c(2f64.sqrt(), 0.0)).norm() < EPS);
        // zero-legged H box: its label
        let t = semantics(&Diagram::h_box(0, 0, c(0.25, -3.0))).unwrap();
        assert!((t.get(0, 0) - c(0.25, -3.0)).norm() < EPS);
    }
}
