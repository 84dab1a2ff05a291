//! DOT export with stable node ordering.

use num_complex::Complex64;
use szh_core::diagram::{Diagram, Endpoint, Generator};
use szh_core::scalable::{SEndpoint, ScalableDiagram, ScalableGenerator};

fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else {
        format!("{}{}{}i", c.re, if c.im < 0.0 { "" } else { "+" }, c.im)
    }
}

pub fn diagram_to_dot(d: &Diagram) -> String {
    let mut out = String::from("graph diagram {\n  rankdir=LR;\n");
    for (id, gen) in d.nodes() {
        let (label, shape) = match gen {
            Generator::ZSpider { phase } => (format!("Z({phase})"), "circle"),
            Generator::HBox { label } => (format!("H({})", fmt_complex(*label)), "box"),
            Generator::Cup => ("cup".into(), "point"),
            Generator::Cap => ("cap".into(), "point"),
            Generator::Swap => ("swap".into(), "point"),
        };
        out.push_str(&format!(
            "  n{} [label=\"{label}\", shape={shape}];\n",
            id.0
        ));
    }
    for (k, b) in d.inputs().iter().enumerate() {
        out.push_str(&format!("  b{} [label=\"in{k}\", shape=plaintext];\n", b.0));
    }
    for (k, b) in d.outputs().iter().enumerate() {
        out.push_str(&format!(
            "  b{} [label=\"out{k}\", shape=plaintext];\n",
            b.0
        ));
    }
    let name = |e: &Endpoint| match e {
        Endpoint::Node(id, _) => format!("n{}", id.0),
        Endpoint::Boundary(id) => format!("b{}", id.0),
    };
    for (a, b) in d.wires() {
        out.push_str(&format!("  {} -- {};\n", name(a), name(b)));
    }
    out.push_str("}\n");
    out
}

fn fmt_matrix(m: &szh_core::BitMatrix) -> String {
    (0..m.rows())
        .map(|r| {
            (0..m.cols())
                .map(|c| if m.get(r, c) { '1' } else { '0' })
                .collect::<String>()
        })
        .collect::<Vec<_>>()
        .join(";")
}

pub fn scalable_to_dot(d: &ScalableDiagram) -> String {
    let mut out = String::from("graph scalable {\n  rankdir=LR;\n");
    for (id, gen) in d.nodes() {
        let (label, shape) = match gen {
            ScalableGenerator::ScaledZ { phases, .. } => {
                (format!("Z[{}]({:?})", phases.len(), phases), "circle")
            }
            ScalableGenerator::ScaledH { labels, .. } => {
                let ls: Vec<String> = labels.iter().map(|l| fmt_complex(*l)).collect();
                (format!("H[{}]({})", labels.len(), ls.join(",")), "box")
            }
            ScalableGenerator::Divider { n } => (format!("divider({n})"), "triangle"),
            ScalableGenerator::Gatherer { n } => (format!("gatherer({n})"), "invtriangle"),
            ScalableGenerator::RedArrow { matrix } => {
                (format!("arrow({})", fmt_matrix(matrix)), "rarrow")
            }
            ScalableGenerator::YellowArrow { matrix } => {
                (format!("arrow*({})", fmt_matrix(matrix)), "rarrow")
            }
            ScalableGenerator::ThickCup { n } => (format!("cup({n})"), "point"),
            ScalableGenerator::ThickCap { n } => (format!("cap({n})"), "point"),
            ScalableGenerator::ThickSwap { a, b } => (format!("swap({a},{b})"), "point"),
        };
        out.push_str(&format!(
            "  n{} [label=\"{label}\", shape={shape}];\n",
            id.0
        ));
    }
    for (k, (b, size)) in d.inputs().iter().enumerate() {
        out.push_str(&format!(
            "  b{} [label=\"in{k} ({size})\", shape=plaintext];\n",
            b.0
        ));
    }
    for (k, (b, size)) in d.outputs().iter().enumerate() {
        out.push_str(&format!(
            "  b{} [label=\"out{k} ({size})\", shape=plaintext];\n",
            b.0
        ));
    }
    let name = |e: &SEndpoint| match e {
        SEndpoint::Node(id, _) => format!("n{}", id.0),
        SEndpoint::Boundary(id) => format!("b{}", id.0),
    };
    for (a, b, size) in d.wires() {
        out.push_str(&format!(
            "  {} -- {} [label=\"{size}\"];\n",
            name(a),
            name(b)
        ));
    }
    out.push_str("}\n");
    out
}
