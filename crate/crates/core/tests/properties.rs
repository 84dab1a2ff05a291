//! Property tests for the semantic oracle and the diagram IR.

use num_complex::Complex64;
use proptest::prelude::*;
use szh_core::diagram::{compose, tensor_product, Diagram, Generator, Plug};
use szh_core::semantics::{semantics_alt_order, semantics_with_limit};

const LIMIT: usize = 64;

#[derive(Clone, Debug)]
enum Gen {
    Z(f64),
    H(f64, f64),
}

/// A small random diagram: nodes with declared stub counts, stubs paired off
/// randomly, leftovers routed to the boundary.
fn arb_diagram(max_nodes: usize, max_boundary: usize) -> impl Strategy<Value = Diagram> {
    let node = prop_oneof![
        (-3.2f64..3.2).prop_map(Gen::Z),
        ((-2.0f64..2.0), (-2.0f64..2.0)).prop_map(|(re, im)| Gen::H(re, im)),
    ];
    (
        prop::collection::vec((node, 1usize..4), 1..=max_nodes),
        prop::collection::vec(any::<u32>(), 0..=max_boundary),
        any::<u64>(),
    )
        .prop_map(move |(nodes, extra_wires, shuffle_seed)| {
            let mut d = Diagram::new();
            let mut stubs = Vec::new();
            for (gen, degree) in nodes {
                let id = match gen {
                    Gen::Z(p) => d.z(p),
                    Gen::H(re, im) => d.h_labeled(Complex64::new(re, im)),
                };
                for _ in 0..degree {
                    stubs.push(id);
                }
            }
            // deterministic shuffle from the seed
            let mut state = shuffle_seed | 1;
            for i in (1..stubs.len()).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                let j = (state >> 33) as usize % (i + 1);
                stubs.swap(i, j);
            }
            let mut toggle = false;
            while stubs.len() >= 2 {
                let a = stubs.pop().unwrap();
                let b = stubs.pop().unwrap();
                d.wire(a, b);
                toggle = !toggle;
            }
            if let Some(last) = stubs.pop() {
                let o = d.output();
                d.wire(last, o);
            }
            for (k, _) in extra_wires.iter().enumerate() {
                if k % 2 == 0 {
                    let i = d.input();
                    let o = d.output();
                    d.wire(i, o);
                }
            }
            d
        })
}

/// Same nodes and wires, with the wire list rotated and the boundary
/// reattached through explicit ports in a different order.
fn permuted_wires(d: &Diagram, rot: usize) -> Diagram {
    let json = d.to_json();
    let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let wires = v["wires"].as_array().unwrap().clone();
    let n = wires.len().max(1);
    let rotated: Vec<_> = (0..wires.len())
        .map(|i| wires[(i + rot) % n].clone())
        .collect();
    v["wires"] = serde_json::Value::Array(rotated);
    Diagram::from_json(&serde_json::to_string(&v).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// semantics(compose) is the matrix product; semantics(tensor) the
    /// Kronecker product.
    #[test]
    fn functoriality(a in arb_diagram(5, 2), b in arb_diagram(5, 2)) {
        let ta = semantics_with_limit(&a, LIMIT).unwrap();
        let tb = semantics_with_limit(&b, LIMIT).unwrap();

        let prod = tensor_product(&a, &b);
        let tp = semantics_with_limit(&prod, LIMIT).unwrap();
        let (d, _, _) = tp.max_abs_diff(&ta.kron(&tb)).unwrap();
        prop_assert!(d <= 1e-9, "tensor product differs by {d}");

        // compose only when the arities line up
        if a.inputs().len() == b.outputs().len() {
            let c = compose(&a, &b).unwrap();
            let tc = semantics_with_limit(&c, LIMIT).unwrap();
            let (d, _, _) = tc.max_abs_diff(&ta.matmul(&tb)).unwrap();
            prop_assert!(d <= 1e-9, "composition differs by {d}");
        }
    }

    /// permuting the wire list never changes the semantics
    #[test]
    fn topology_invariance(d in arb_diagram(6, 3), rot in 0usize..7) {
        let t1 = semantics_with_limit(&d, LIMIT).unwrap();
        let t2 = semantics_with_limit(&permuted_wires(&d, rot), LIMIT).unwrap();
        let (diff, _, _) = t1.max_abs_diff(&t2).unwrap();
        // exact up to float accumulation order
        prop_assert!(diff <= 1e-12, "wire order changed the result by {diff}");
    }

    /// evaluation order changes results only at rounding level
    #[test]
    fn contraction_order_independence(d in arb_diagram(6, 3)) {
        let t1 = semantics_with_limit(&d, LIMIT).unwrap();
        let t2 = semantics_alt_order(&d, LIMIT).unwrap();
        let (diff, _, _) = t1.max_abs_diff(&t2).unwrap();
        prop_assert!(diff <= 1e-12, "orders differ by {diff}");
    }

    /// the JSON codec is lossless
    #[test]
    fn json_round_trip(d in arb_diagram(6, 3)) {
        let j1 = d.to_json();
        let back = Diagram::from_json(&j1).unwrap();
        prop_assert_eq!(j1, back.to_json());
        let t1 = semantics_with_limit(&d, LIMIT).unwrap();
        let t2 = semantics_with_limit(&back, LIMIT).unwrap();
        let (diff, _, _) = t1.max_abs_diff(&t2).unwrap();
        prop_assert!(diff == 0.0);
    }
}

#[test]
fn spider_self_loop_contributes_a_root_two() {
    // a self-loop raises the spider's arity by two, so the well-tempered
    // scalar picks up exactly 2^{1/2}
    let mut a = Diagram::new();
    let z = a.z(0.4);
    let i = a.input();
    let o = a.output();
    a.wire(i, z);
    a.wire(z, o);
    a.wire(z, z);

    let b = Diagram::z_spider(1, 1, 0.4);
    let ta = semantics_with_limit(&a, LIMIT).unwrap();
    let tb = semantics_with_limit(&b, LIMIT)
        .unwrap()
        .scale(Complex64::new(2f64.sqrt(), 0.0));
    let (d, _, _) = ta.max_abs_diff(&tb).unwrap();
    assert!(d <= 1e-12);
}

#[test]
fn generator_fixed_degrees_are_enforced() {
    let mut d = Diagram::new();
    let c = d.cup();
    let o = d.output();
    d.wire(Plug::Port(c, 0), o);
    assert!(d.validate().is_err(), "cup with one wire must be rejected");

    let mut d = Diagram::new();
    let s = d.add_node(Generator::Swap);
    for _ in 0..3 {
        let o = d.output();
        d.wire(s, o);
    }
    assert!(d.validate().is_err(), "swap needs four wires");
}
