//! Scalable ZH: sized wires, dividers and gatherers, scaled generators and
//! matrix arrows, with the wire-stripping functor back to plain diagrams.
//!
//! A scalable wire carries a size `n` and strips to `n` parallel strands
//! (strand 0 is the most significant bit of the wire's `2^n`-dimensional
//! interpretation). Dividers, gatherers and thick structural wires strip to
//! identity relays, which are exact under the well-tempered scalar
//! convention. Matrix arrows expand into their bipartite graph form: the red
//! arrow connects a row of copy spiders to XOR nodes and realises
//! `|x> -> 2^{(m-n)/4} |Ax>` over F2, the yellow arrow connects NOT-dressed
//! copy spiders to AND boxes (de Morgan) and realises the boolean product
//! `|x> -> 2^{(m-n)/4} |A.x>`.

use crate::bitmatrix::{mul_bool, mul_f2, BitMatrix};
use crate::diagram::{Diagram, NodeId, Plug};
use crate::error::{Error, Result};
use crate::semantics::{equal_semantics_with_limit, semantics_with_limit};
use crate::tensor::Tensor;
use num_complex::Complex64;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SNodeId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SBoundaryId(pub u32);

/// Wire type `(n_1) + ... + (n_m)` of a scalable boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireType {
    pub sizes: Vec<usize>,
}

impl WireType {
    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScalableGenerator {
    /// `k` parallel Z-spiders with per-strand phases; type `(k)^ins -> (k)^outs`.
    ScaledZ {
        phases: Vec<f64>,
        ins: usize,
        outs: usize,
    },
    /// `k` parallel H-boxes with per-strand labels; type `(k)^ins -> (k)^outs`.
    ScaledH {
        labels: Vec<Complex64>,
        ins: usize,
        outs: usize,
    },
    /// `(n+1) -> (1) + (n)`
    Divider {
        n: usize,
    },
    /// `(1) + (n) -> (n+1)`
    Gatherer {
        n: usize,
    },
    /// `|x> -> 2^{(m-n)/4} |Ax>` over F2; type `(cols) -> (rows)`.
    RedArrow {
        matrix: BitMatrix,
    },
    /// `|x> -> 2^{(m-n)/4} |A.x>` over the boolean semiring.
    YellowArrow {
        matrix: BitMatrix,
    },
    ThickCup {
        n: usize,
    },
    ThickCap {
        n: usize,
    },
    ThickSwap {
        a: usize,
        b: usize,
    },
}

impl ScalableGenerator {
    /// Port sizes in port order.
    pub fn port_sizes(&self) -> Vec<usize> {
        match self {
            ScalableGenerator::ScaledZ { phases, ins, outs } => {
                vec![phases.len(); ins + outs]
            }
            ScalableGenerator::ScaledH { labels, ins, outs } => {
                vec![labels.len(); ins + outs]
            }
            ScalableGenerator::Divider { n } => vec![n + 1, 1, *n],
            ScalableGenerator::Gatherer { n } => vec![1, *n, n + 1],
            ScalableGenerator::RedArrow { matrix } | ScalableGenerator::YellowArrow { matrix } => {
                vec![matrix.cols(), matrix.rows()]
            }
            ScalableGenerator::ThickCup { n } | ScalableGenerator::ThickCap { n } => vec![*n, *n],
            ScalableGenerator::ThickSwap { a, b } => vec![*a, *b, *b, *a],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SEndpoint {
    Node(SNodeId, u16),
    Boundary(SBoundaryId),
}

#[derive(Clone, Copy, Debug)]
pub enum SPlug {
    Node(SNodeId),
    Port(SNodeId, u16),
    Boundary(SBoundaryId),
}

impl From<SNodeId> for SPlug {
    fn from(n: SNodeId) -> Self {
        SPlug::Node(n)
    }
}

impl From<SBoundaryId> for SPlug {
    fn from(b: SBoundaryId) -> Self {
        SPlug::Boundary(b)
    }
}

#[derive(Clone, Debug)]
pub struct ScalableDiagram {
    nodes: BTreeMap<SNodeId, ScalableGenerator>,
    /// wires carry their size annotation
    wires: Vec<(SEndpoint, SEndpoint, usize)>,
    inputs: Vec<(SBoundaryId, usize)>,
    outputs: Vec<(SBoundaryId, usize)>,
    scalar: Complex64,
    next_node: u32,
    next_boundary: u32,
    port_counts: BTreeMap<SNodeId, u16>,
}

impl Default for ScalableDiagram {
    fn default() -> Self {
        Self::new()
    }
}

impl ScalableDiagram {
    pub fn new() -> Self {
        ScalableDiagram {
            nodes: BTreeMap::new(),
            wires: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            scalar: Complex64::new(1.0, 0.0),
            next_node: 0,
            next_boundary: 0,
            port_counts: BTreeMap::new(),
        }
    }

    pub fn add_node(&mut self, gen: ScalableGenerator) -> SNodeId {
        let id = SNodeId(self.next_node);
        self.next_node += 1;
        self.nodes.insert(id, gen);
        self.port_counts.insert(id, 0);
        id
    }

    pub fn input(&mut self, size: usize) -> SBoundaryId {
        let id = SBoundaryId(self.next_boundary);
        self.next_boundary += 1;
        self.inputs.push((id, size));
        id
    }

    pub fn output(&mut self, size: usize) -> SBoundaryId {
        let id = SBoundaryId(self.next_boundary);
        self.next_boundary += 1;
        self.outputs.push((id, size));
        id
    }

    fn resolve(&mut self, p: SPlug) -> SEndpoint {
        match p {
            SPlug::Node(id) => {
                let c = self.port_counts.entry(id).or_insert(0);
                let port = *c;
                *c += 1;
                SEndpoint::Node(id, port)
            }
            SPlug::Port(id, port) => {
                let c = self.port_counts.entry(id).or_insert(0);
                *c = (*c).max(port + 1);
                SEndpoint::Node(id, port)
            }
            SPlug::Boundary(b) => SEndpoint::Boundary(b),
        }
    }

    pub fn wire(&mut self, a: impl Into<SPlug>, b: impl Into<SPlug>, size: usize) {
        let ea = self.resolve(a.into());
        let eb = self.resolve(b.into());
        self.wires.push((ea, eb, size));
    }

    pub fn mul_scalar(&mut self, c: Complex64) {
        self.scalar *= c;
    }

    pub fn scalar(&self) -> Complex64 {
        self.scalar
    }

    pub fn nodes(&self) -> &BTreeMap<SNodeId, ScalableGenerator> {
        &self.nodes
    }

    pub fn wires(&self) -> &[(SEndpoint, SEndpoint, usize)] {
        &self.wires
    }

    pub fn inputs(&self) -> &[(SBoundaryId, usize)] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[(SBoundaryId, usize)] {
        &self.outputs
    }

    pub fn input_type(&self) -> WireType {
        WireType {
            sizes: self.inputs.iter().map(|(_, s)| *s).collect(),
        }
    }

    pub fn output_type(&self) -> WireType {
        WireType {
            sizes: self.outputs.iter().map(|(_, s)| *s).collect(),
        }
    }

    fn boundary_size(&self, id: SBoundaryId) -> Option<usize> {
        self.inputs
            .iter()
            .chain(self.outputs.iter())
            .find(|(b, _)| *b == id)
            .map(|(_, s)| *s)
    }

    /// Check wiring: every boundary port used exactly once, node ports dense
    /// and fully wired, and every wire size equal to the sizes of the ports
    /// it connects.
    pub fn typecheck(&self) -> Result<()> {
        let mut seen_boundary: BTreeMap<SBoundaryId, usize> = BTreeMap::new();
        let mut node_ports: BTreeMap<SNodeId, Vec<(u16, usize)>> = BTreeMap::new();
        for (a, b, size) in &self.wires {
            for e in [a, b] {
                match e {
                    SEndpoint::Boundary(id) => {
                        *seen_boundary.entry(*id).or_insert(0) += 1;
                        match self.boundary_size(*id) {
                            Some(s) if s == *size => {}
                            Some(s) => {
                                return Err(Error::TypeMismatch(format!(
                                    "boundary {id:?} has size {s}, wire has size {size}"
                                )))
                            }
                            None => {
                                return Err(Error::TypeMismatch(format!(
                                    "wire references undeclared boundary {id:?}"
                                )))
                            }
                        }
                    }
                    SEndpoint::Node(id, port) => {
                        node_ports.entry(*id).or_default().push((*port, *size));
                    }
                }
            }
        }
        for (id, count) in &seen_boundary {
            if *count != 1 {
                return Err(Error::TypeMismatch(format!(
                    "boundary {id:?} used {count} times"
                )));
            }
        }
        if seen_boundary.len() != self.inputs.len() + self.outputs.len() {
            return Err(Error::TypeMismatch("unwired boundary port".into()));
        }
        for (id, gen) in &self.nodes {
            let expected = gen.port_sizes();
            let mut ports = node_ports.remove(id).unwrap_or_default();
            ports.sort_unstable();
            if ports.len() != expected.len() {
                return Err(Error::TypeMismatch(format!(
                    "node {id:?} has {} wires, expected {}",
                    ports.len(),
                    expected.len()
                )));
            }
            for (i, (port, size)) in ports.iter().enumerate() {
                if *port as usize != i {
                    return Err(Error::TypeMismatch(format!("node {id:?} ports not dense")));
                }
                if *size != expected[i] {
                    return Err(Error::TypeMismatch(format!(
                        "node {id:?} port {port}: wire size {size}, expected {}",
                        expected[i]
                    )));
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Wire stripping
// ---------------------------------------------------------------------------

/// Append the NOT expansion to `d`, returning its (input, output) plugs.
pub(crate) fn append_not(d: &mut Diagram) -> (Plug, Plug) {
    let h_in = d.h();
    let core = d.z0();
    let tap = d.h_labeled(Complex64::new(-1.0, 0.0));
    let h_out = d.h();
    d.wire(h_in, core);
    d.wire(core, tap);
    d.wire(core, h_out);
    (Plug::Node(h_in), Plug::Node(h_out))
}

/// Strip a scalable diagram to `|a| -> |b|` plain wires.
pub fn strip(s: &ScalableDiagram) -> Result<Diagram> {
    s.typecheck()?;
    let mut d = Diagram::new();
    d.set_scalar(s.scalar());

    // realisation of each node: per port, per strand, a plug in `d`
    let mut stubs: BTreeMap<SNodeId, Vec<Vec<Plug>>> = BTreeMap::new();
    for (id, gen) in &s.nodes {
        let ports = match gen {
            ScalableGenerator::ScaledZ { phases, ins, outs } => {
                let spiders: Vec<NodeId> = phases.iter().map(|p| d.z(*p)).collect();
                (0..ins + outs)
                    .map(|_| spiders.iter().map(|z| Plug::Node(*z)).collect())
                    .collect()
            }
            ScalableGenerator::ScaledH { labels, ins, outs } => {
                let boxes: Vec<NodeId> = labels.iter().map(|l| d.h_labeled(*l)).collect();
                (0..ins + outs)
                    .map(|_| boxes.iter().map(|h| Plug::Node(*h)).collect())
                    .collect()
            }
            ScalableGenerator::Divider { n } => {
                let relays: Vec<NodeId> = (0..n + 1).map(|_| d.z0()).collect();
                vec![
                    relays.iter().map(|r| Plug::Node(*r)).collect(),
                    vec![Plug::Node(relays[0])],
                    relays[1..].iter().map(|r| Plug::Node(*r)).collect(),
                ]
            }
            ScalableGenerator::Gatherer { n } => {
                let relays: Vec<NodeId> = (0..n + 1).map(|_| d.z0()).collect();
                vec![
                    vec![Plug::Node(relays[0])],
                    relays[1..].iter().map(|r| Plug::Node(*r)).collect(),
                    relays.iter().map(|r| Plug::Node(*r)).collect(),
                ]
            }
            ScalableGenerator::RedArrow { matrix } => {
                let (m, n) = (matrix.rows(), matrix.cols());
                let greens: Vec<NodeId> = (0..n).map(|_| d.z0()).collect();
                let mut outs = Vec::with_capacity(m);
                for j in 0..m {
                    let core = d.z0();
                    for (i, green) in greens.iter().enumerate() {
                        if matrix.get(j, i) {
                            let h = d.h();
                            d.wire(*green, h);
                            d.wire(h, core);
                        }
                    }
                    let h_out = d.h();
                    d.wire(core, h_out);
                    outs.push(Plug::Node(h_out));
                }
                vec![greens.iter().map(|g| Plug::Node(*g)).collect(), outs]
            }
            ScalableGenerator::YellowArrow { matrix } => {
                let (m, n) = (matrix.rows(), matrix.cols());
                // column side: NOT then copy spider
                let mut col_in = Vec::with_capacity(n);
                let mut col_copy = Vec::with_capacity(n);
                for _ in 0..n {
                    let (not_in, not_out) = append_not(&mut d);
                    let g = d.z0();
                    d.wire(not_out, g);
                    col_in.push(not_in);
                    col_copy.push(g);
                }
                // row side: AND box, then Hadamard, then NOT
                let mut outs = Vec::with_capacity(m);
                for j in 0..m {
                    let and_box = d.h();
                    for (i, g) in col_copy.iter().enumerate() {
                        if matrix.get(j, i) {
                            d.wire(*g, and_box);
                        }
                    }
                    let h = d.h();
                    d.wire(and_box, h);
                    let (not_in, not_out) = append_not(&mut d);
                    d.wire(h, not_in);
                    outs.push(not_out);
                }
                vec![col_in, outs]
            }
            ScalableGenerator::ThickCup { n } | ScalableGenerator::ThickCap { n } => {
                let relays: Vec<NodeId> = (0..*n).map(|_| d.z0()).collect();
                vec![
                    relays.iter().map(|r| Plug::Node(*r)).collect(),
                    relays.iter().map(|r| Plug::Node(*r)).collect(),
                ]
            }
            ScalableGenerator::ThickSwap { a, b } => {
                let ra: Vec<NodeId> = (0..*a).map(|_| d.z0()).collect();
                let rb: Vec<NodeId> = (0..*b).map(|_| d.z0()).collect();
                vec![
                    ra.iter().map(|r| Plug::Node(*r)).collect(),
                    rb.iter().map(|r| Plug::Node(*r)).collect(),
                    rb.iter().map(|r| Plug::Node(*r)).collect(),
                    ra.iter().map(|r| Plug::Node(*r)).collect(),
                ]
            }
        };
        stubs.insert(*id, ports);
    }

    // boundary realisation in declared order
    let mut boundary_stubs: BTreeMap<SBoundaryId, Vec<Plug>> = BTreeMap::new();
    for (id, size) in &s.inputs {
        let plugs = (0..*size).map(|_| Plug::Boundary(d.input())).collect();
        boundary_stubs.insert(*id, plugs);
    }
    for (id, size) in &s.outputs {
        let plugs = (0..*size).map(|_| Plug::Boundary(d.output())).collect();
        boundary_stubs.insert(*id, plugs);
    }

    for (a, b, size) in &s.wires {
        for j in 0..*size {
            let pa = stub_for(&stubs, &boundary_stubs, a, j);
            let pb = stub_for(&stubs, &boundary_stubs, b, j);
            d.wire(pa, pb);
        }
    }
    Ok(d)
}

fn stub_for(
    stubs: &BTreeMap<SNodeId, Vec<Vec<Plug>>>,
    boundary: &BTreeMap<SBoundaryId, Vec<Plug>>,
    e: &SEndpoint,
    strand: usize,
) -> Plug {
    match e {
        SEndpoint::Node(id, port) => stubs[id][*port as usize][strand],
        SEndpoint::Boundary(id) => boundary[id][strand],
    }
}

// ---------------------------------------------------------------------------
// Composition of scalable diagrams
// ---------------------------------------------------------------------------

impl ScalableDiagram {
    fn absorb(
        &mut self,
        other: &ScalableDiagram,
    ) -> (
        BTreeMap<SNodeId, SNodeId>,
        BTreeMap<SBoundaryId, SBoundaryId>,
    ) {
        let mut node_map = BTreeMap::new();
        for (id, gen) in &other.nodes {
            let fresh = SNodeId(self.next_node);
            self.next_node += 1;
            self.nodes.insert(fresh, gen.clone());
            self.port_counts
                .insert(fresh, *other.port_counts.get(id).unwrap_or(&0));
            node_map.insert(*id, fresh);
        }
        let mut bmap = BTreeMap::new();
        for (id, _) in other.inputs.iter().chain(other.outputs.iter()) {
            let fresh = SBoundaryId(self.next_boundary);
            self.next_boundary += 1;
            bmap.insert(*id, fresh);
        }
        for (a, b, size) in &other.wires {
            let map = |e: &SEndpoint| match e {
                SEndpoint::Node(id, p) => SEndpoint::Node(node_map[id], *p),
                SEndpoint::Boundary(id) => SEndpoint::Boundary(bmap[id]),
            };
            self.wires.push((map(a), map(b), *size));
        }
        self.scalar *= other.scalar;
        (node_map, bmap)
    }
}

/// Sequential composition of scalable diagrams: `d2` feeds `d1`. Junction
/// boundary types must agree size by size.
pub fn sc_compose(d1: &ScalableDiagram, d2: &ScalableDiagram) -> Result<ScalableDiagram> {
    if d1.inputs.len() != d2.outputs.len()
        || d1
            .inputs
            .iter()
            .zip(d2.outputs.iter())
            .any(|((_, a), (_, b))| a != b)
    {
        return Err(Error::TypeMismatch(format!(
            "composition type mismatch: {:?} vs {:?}",
            d1.input_type(),
            d2.output_type()
        )));
    }
    let mut out = ScalableDiagram::new();
    out.scalar = Complex64::new(1.0, 0.0);
    let (_, bmap2) = out.absorb(d2);
    let (_, bmap1) = out.absorb(d1);
    out.inputs = d2.inputs.iter().map(|(b, s)| (bmap2[b], *s)).collect();
    out.outputs = d1.outputs.iter().map(|(b, s)| (bmap1[b], *s)).collect();

    let junctions: Vec<(SBoundaryId, SBoundaryId, usize)> = d2
        .outputs
        .iter()
        .zip(d1.inputs.iter())
        .map(|((o, s), (i, _))| (bmap2[o], bmap1[i], *s))
        .collect();
    for (jo, ji, size) in junctions {
        for (a, b, _) in out.wires.iter_mut() {
            for e in [a, b] {
                if *e == SEndpoint::Boundary(ji) {
                    *e = SEndpoint::Boundary(jo);
                }
            }
        }
        let j = SEndpoint::Boundary(jo);
        let touching: Vec<usize> = out
            .wires
            .iter()
            .enumerate()
            .filter(|(_, (a, b, _))| *a == j || *b == j)
            .map(|(i, _)| i)
            .collect();
        match touching.as_slice() {
            [single] => {
                let (a, b, _) = out.wires[*single];
                if a == j && b == j {
                    out.wires.remove(*single);
                    out.scalar *= Complex64::new(2f64.powi(size as i32), 0.0);
                } else {
                    return Err(Error::TypeMismatch(
                        "dangling junction in composition".into(),
                    ));
                }
            }
            [w1, w2] => {
                let (a1, b1, _) = out.wires[*w1];
                let (a2, b2, _) = out.wires[*w2];
                let other1 = if a1 == j { b1 } else { a1 };
                let other2 = if a2 == j { b2 } else { a2 };
                out.wires.remove(*w2);
                out.wires.remove(*w1);
                out.wires.push((other1, other2, size));
            }
            _ => return Err(Error::TypeMismatch("junction used more than twice".into())),
        }
    }
    Ok(out)
}

pub fn sc_tensor(d1: &ScalableDiagram, d2: &ScalableDiagram) -> ScalableDiagram {
    let mut out = ScalableDiagram::new();
    let (_, bmap1) = out.absorb(d1);
    let (_, bmap2) = out.absorb(d2);
    out.inputs = d1
        .inputs
        .iter()
        .map(|(b, s)| (bmap1[b], *s))
        .chain(d2.inputs.iter().map(|(b, s)| (bmap2[b], *s)))
        .collect();
    out.outputs = d1
        .outputs
        .iter()
        .map(|(b, s)| (bmap1[b], *s))
        .chain(d2.outputs.iter().map(|(b, s)| (bmap2[b], *s)))
        .collect();
    out
}

// ---------------------------------------------------------------------------
// Stock scalable diagrams
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArrowKind {
    Red,
    Yellow,
}

pub fn arrow_diagram(kind: ArrowKind, matrix: &BitMatrix) -> ScalableDiagram {
    let mut s = ScalableDiagram::new();
    let gen = match kind {
        ArrowKind::Red => ScalableGenerator::RedArrow {
            matrix: matrix.clone(),
        },
        ArrowKind::Yellow => ScalableGenerator::YellowArrow {
            matrix: matrix.clone(),
        },
    };
    let (m, n) = (matrix.rows(), matrix.cols());
    let node = s.add_node(gen);
    let i = s.input(n);
    let o = s.output(m);
    s.wire(i, node, n);
    s.wire(node, o, m);
    s
}

pub fn scaled_z_diagram(phases: &[f64], ins: usize, outs: usize) -> ScalableDiagram {
    let k = phases.len();
    let mut s = ScalableDiagram::new();
    let node = s.add_node(ScalableGenerator::ScaledZ {
        phases: phases.to_vec(),
        ins,
        outs,
    });
    for _ in 0..ins {
        let i = s.input(k);
        s.wire(i, node, k);
    }
    for _ in 0..outs {
        let o = s.output(k);
        s.wire(node, o, k);
    }
    s
}

pub fn scaled_h_diagram(labels: &[Complex64], ins: usize, outs: usize) -> ScalableDiagram {
    let k = labels.len();
    let mut s = ScalableDiagram::new();
    let node = s.add_node(ScalableGenerator::ScaledH {
        labels: labels.to_vec(),
        ins,
        outs,
    });
    for _ in 0..ins {
        let i = s.input(k);
        s.wire(i, node, k);
    }
    for _ in 0..outs {
        let o = s.output(k);
        s.wire(node, o, k);
    }
    s
}

/// Scaled Hadamard layer `(k) -> (k)`.
pub fn hadamard_layer(k: usize) -> ScalableDiagram {
    scaled_h_diagram(&vec![Complex64::new(-1.0, 0.0); k], 1, 1)
}

/// Scaled NOT layer `(k) -> (k)`.
pub fn not_layer(k: usize) -> ScalableDiagram {
    let pi = vec![std::f64::consts::PI; k];
    let h = hadamard_layer(k);
    sc_compose(&h, &sc_compose(&scaled_z_diagram(&pi, 1, 1), &h).unwrap()).unwrap()
}

/// Strand-wise XOR merge `(k) + (k) -> (k)` (scaled X-spider).
pub fn xor_merge(k: usize) -> ScalableDiagram {
    let hh = sc_tensor(&hadamard_layer(k), &hadamard_layer(k));
    let merge = scaled_z_diagram(&vec![0.0; k], 2, 1);
    sc_compose(&hadamard_layer(k), &sc_compose(&merge, &hh).unwrap()).unwrap()
}

/// Strand-wise zero state `() -> (k)` (scaled X unit).
pub fn zero_state(k: usize) -> ScalableDiagram {
    sc_compose(&hadamard_layer(k), &scaled_z_diagram(&vec![0.0; k], 0, 1)).unwrap()
}

/// Strand-wise AND merge `(k) + (k) -> (k)`.
pub fn and_merge(k: usize) -> ScalableDiagram {
    let minus_ones = vec![Complex64::new(-1.0, 0.0); k];
    let merge = scaled_h_diagram(&minus_ones, 2, 1);
    sc_compose(&hadamard_layer(k), &merge).unwrap()
}

/// Strand-wise OR merge `(k) + (k) -> (k)`, by de Morgan.
pub fn or_merge(k: usize) -> ScalableDiagram {
    let nn = sc_tensor(&not_layer(k), &not_layer(k));
    sc_compose(&not_layer(k), &sc_compose(&and_merge(k), &nn).unwrap()).unwrap()
}

// ---------------------------------------------------------------------------
// Direct interpretations
// ---------------------------------------------------------------------------

/// Strand bits use index 0 as the most significant bit; bit-matrix vectors
/// use mask bit `i` for component `i`. These helpers convert.
pub fn index_to_mask(index: usize, width: usize) -> usize {
    let mut m = 0;
    for i in 0..width {
        if index >> (width - 1 - i) & 1 == 1 {
            m |= 1 << i;
        }
    }
    m
}

pub fn mask_to_index(mask: usize, width: usize) -> usize {
    index_to_mask(mask, width)
}

/// Closed-form tensor of a matrix arrow (no graph expansion).
pub fn interpret_arrow_checked(kind: ArrowKind, matrix: &BitMatrix) -> Result<Tensor> {
    let (m, n) = (matrix.rows(), matrix.cols());
    if m + n > 26 {
        return Err(Error::Capacity {
            wires: m + n,
            limit: 26,
        });
    }
    Ok(interpret_arrow(kind, matrix))
}

/// Closed-form tensor of a matrix arrow; panics only on absurd sizes, use
/// [`interpret_arrow_checked`] for fallible callers.
pub fn interpret_arrow(kind: ArrowKind, matrix: &BitMatrix) -> Tensor {
    let (m, n) = (matrix.rows(), matrix.cols());
    let scale = 2f64.powf((m as f64 - n as f64) / 4.0);
    let mut t = Tensor::zeros(m, n);
    for col in 0..1usize << n {
        let x = index_to_mask(col, n);
        let y = match kind {
            ArrowKind::Red => matrix.apply_f2(x),
            ArrowKind::Yellow => matrix.apply_bool(x),
        };
        let row = mask_to_index(y, m);
        t.set(row, col, Complex64::new(scale, 0.0));
    }
    t
}

/// Closed-form tensor of a scaled spider or scaled H-box.
pub fn interpret_scaled(gen: &ScalableGenerator) -> Result<Tensor> {
    let total_legs: usize = gen.port_sizes().iter().sum();
    if total_legs > 26 {
        return Err(Error::Capacity {
            wires: total_legs,
            limit: 26,
        });
    }
    match gen {
        ScalableGenerator::ScaledZ { phases, ins, outs } => {
            let k = phases.len();
            let scale = 2f64.powf(k as f64 * (*ins as f64 + *outs as f64 - 2.0) / 4.0);
            let mut t = Tensor::zeros(k * outs, k * ins);
            for x in 0..1usize << k {
                let mut phase = 0.0;
                for (j, p) in phases.iter().enumerate() {
                    if x >> (k - 1 - j) & 1 == 1 {
                        phase += p;
                    }
                }
                let mut row = 0usize;
                for _ in 0..*outs {
                    row = (row << k) | x;
                }
                let mut col = 0usize;
                for _ in 0..*ins {
                    col = (col << k) | x;
                }
                t.add_assign_at(row, col, Complex64::from_polar(scale, phase));
            }
            Ok(t)
        }
        ScalableGenerator::ScaledH { labels, ins, outs } => {
            let k = labels.len();
            let total = ins + outs;
            let scale = 2f64.powf(-(k as f64) * total as f64 / 4.0);
            if total == 0 {
                let v = labels
                    .iter()
                    .fold(Complex64::new(1.0, 0.0), |acc, a| acc * a);
                return Ok(Tensor::scalar(v * scale));
            }
            let t = Tensor::from_fn(k * outs, k * ins, |row, col| {
                let mut entry = Complex64::new(1.0, 0.0);
                for (j, a) in labels.iter().enumerate() {
                    // strand j of every port must carry 1 for this label to fire
                    let mut all = true;
                    for p in 0..*outs {
                        all &= row >> (k * (outs - 1 - p) + (k - 1 - j)) & 1 == 1;
                    }
                    for p in 0..*ins {
                        all &= col >> (k * (ins - 1 - p) + (k - 1 - j)) & 1 == 1;
                    }
                    if all {
                        entry *= a;
                    }
                }
                entry
            });
            Ok(t.scale(Complex64::new(scale, 0.0)))
        }
        _ => Err(Error::TypeMismatch(
            "interpret_scaled expects a scaled generator".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Arrow laws
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArrowLaw {
    CopyGreen,
    EraseGreen,
    CocopyRed,
    CoeraseRed,
    CocopyYellow,
    CoeraseYellow,
    ComposeRed,
    ComposeYellow,
    HadamardFlip,
    RedEqYellowRowCond,
}

impl ArrowLaw {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "copy-green" => ArrowLaw::CopyGreen,
            "erase-green" => ArrowLaw::EraseGreen,
            "cocopy-red" => ArrowLaw::CocopyRed,
            "coerase-red" => ArrowLaw::CoeraseRed,
            "cocopy-yellow" => ArrowLaw::CocopyYellow,
            "coerase-yellow" => ArrowLaw::CoeraseYellow,
            "compose-red" => ArrowLaw::ComposeRed,
            "compose-yellow" => ArrowLaw::ComposeYellow,
            "hadamard-flip" => ArrowLaw::HadamardFlip,
            "red-eq-yellow-rowcond" => ArrowLaw::RedEqYellowRowCond,
            other => return Err(Error::UnknownRule(other.into())),
        })
    }

    pub const ALL: [ArrowLaw; 10] = [
        ArrowLaw::CopyGreen,
        ArrowLaw::EraseGreen,
        ArrowLaw::CocopyRed,
        ArrowLaw::CoeraseRed,
        ArrowLaw::CocopyYellow,
        ArrowLaw::CoeraseYellow,
        ArrowLaw::ComposeRed,
        ArrowLaw::ComposeYellow,
        ArrowLaw::HadamardFlip,
        ArrowLaw::RedEqYellowRowCond,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ArrowLaw::CopyGreen => "copy-green",
            ArrowLaw::EraseGreen => "erase-green",
            ArrowLaw::CocopyRed => "cocopy-red",
            ArrowLaw::CoeraseRed => "coerase-red",
            ArrowLaw::CocopyYellow => "cocopy-yellow",
            ArrowLaw::CoeraseYellow => "coerase-yellow",
            ArrowLaw::ComposeRed => "compose-red",
            ArrowLaw::ComposeYellow => "compose-yellow",
            ArrowLaw::HadamardFlip => "hadamard-flip",
            ArrowLaw::RedEqYellowRowCond => "red-eq-yellow-rowcond",
        }
    }
}

/// Stripped arrow expansions carry many more wires than their thick
/// originals, so law checking runs the oracle with a wider index budget.
pub const VERIFY_LIMIT: usize = 96;

fn oracle_equal_scalable(lhs: &ScalableDiagram, rhs: &ScalableDiagram, tol: f64) -> Result<bool> {
    let l = strip(lhs)?;
    let r = strip(rhs)?;
    Ok(equal_semantics_with_limit(&l, &r, tol, VERIFY_LIMIT)?.equal)
}

/// Build both sides of an arrow law as scalable diagrams, strip, and compare
/// by the oracle. `b` is only used by the composition laws.
pub fn arrow_laws_check(
    law: ArrowLaw,
    a: &BitMatrix,
    b: Option<&BitMatrix>,
    tol: f64,
) -> Result<bool> {
    let (m, n) = (a.rows(), a.cols());
    match law {
        ArrowLaw::CopyGreen => {
            for kind in [ArrowKind::Red, ArrowKind::Yellow] {
                let arrow = arrow_diagram(kind, a);
                let lhs = sc_compose(&scaled_z_diagram(&vec![0.0; m], 1, 2), &arrow)?;
                let rhs = sc_compose(
                    &sc_tensor(&arrow_diagram(kind, a), &arrow_diagram(kind, a)),
                    &scaled_z_diagram(&vec![0.0; n], 1, 2),
                )?;
                if !oracle_equal_scalable(&lhs, &rhs, tol)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        ArrowLaw::EraseGreen => {
            for kind in [ArrowKind::Red, ArrowKind::Yellow] {
                let arrow = arrow_diagram(kind, a);
                let lhs = sc_compose(&scaled_z_diagram(&vec![0.0; m], 1, 0), &arrow)?;
                let rhs = scaled_z_diagram(&vec![0.0; n], 1, 0);
                if !oracle_equal_scalable(&lhs, &rhs, tol)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        ArrowLaw::CocopyRed => {
            let arrow = arrow_diagram(ArrowKind::Red, a);
            let lhs = sc_compose(&arrow, &xor_merge(n))?;
            let rhs = sc_compose(
                &xor_merge(m),
                &sc_tensor(
                    &arrow_diagram(ArrowKind::Red, a),
                    &arrow_diagram(ArrowKind::Red, a),
                ),
            )?;
            oracle_equal_scalable(&lhs, &rhs, tol)
        }
        ArrowLaw::CoeraseRed => {
            let lhs = sc_compose(&arrow_diagram(ArrowKind::Red, a), &zero_state(n))?;
            let rhs = zero_state(m);
            oracle_equal_scalable(&lhs, &rhs, tol)
        }
        ArrowLaw::CocopyYellow => {
            let arrow = arrow_diagram(ArrowKind::Yellow, a);
            let lhs = sc_compose(&arrow, &or_merge(n))?;
            let rhs = sc_compose(
                &or_merge(m),
                &sc_tensor(
                    &arrow_diagram(ArrowKind::Yellow, a),
                    &arrow_diagram(ArrowKind::Yellow, a),
                ),
            )?;
            oracle_equal_scalable(&lhs, &rhs, tol)
        }
        ArrowLaw::CoeraseYellow => {
            let lhs = sc_compose(&arrow_diagram(ArrowKind::Yellow, a), &zero_state(n))?;
            let rhs = zero_state(m);
            oracle_equal_scalable(&lhs, &rhs, tol)
        }
        ArrowLaw::ComposeRed | ArrowLaw::ComposeYellow => {
            let b =
                b.ok_or_else(|| Error::Precondition("composition law needs two matrices".into()))?;
            let (kind, product) = match law {
                ArrowLaw::ComposeRed => (ArrowKind::Red, mul_f2(b, a)?),
                _ => (ArrowKind::Yellow, mul_bool(b, a)?),
            };
            let lhs = sc_compose(&arrow_diagram(kind, b), &arrow_diagram(kind, a))?;
            let rhs = arrow_diagram(kind, &product);
            oracle_equal_scalable(&lhs, &rhs, tol)
        }
        ArrowLaw::HadamardFlip => {
            let lhs = sc_compose(
                &hadamard_layer(m),
                &sc_compose(&arrow_diagram(ArrowKind::Red, a), &hadamard_layer(n))?,
            )?;
            let flipped = strip(&arrow_diagram(ArrowKind::Red, &a.transpose()))?;
            let lhs_t = semantics_with_limit(&strip(&lhs)?, VERIFY_LIMIT)?;
            let rhs_t = semantics_with_limit(&flipped, VERIFY_LIMIT)?.transposed();
            Ok(lhs_t.approx_eq(&rhs_t, tol))
        }
        ArrowLaw::RedEqYellowRowCond => {
            if !a.at_most_one_per_row() {
                return Err(Error::Precondition(
                    "red-eq-yellow requires at most one 1 in each row".into(),
                ));
            }
            let lhs = arrow_diagram(ArrowKind::Red, a);
            let rhs = arrow_diagram(ArrowKind::Yellow, a);
            oracle_equal_scalable(&lhs, &rhs, tol)
        }
    }
}

// ---------------------------------------------------------------------------
// JSON representation
// ---------------------------------------------------------------------------

mod json {
    use super::*;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize)]
    struct MatrixRepr {
        rows: usize,
        cols: usize,
        /// row-major 0/1 entries
        data: Vec<u8>,
    }

    impl MatrixRepr {
        fn from(m: &BitMatrix) -> Self {
            let data = (0..m.rows())
                .flat_map(|r| (0..m.cols()).map(move |c| (r, c)))
                .map(|(r, c)| u8::from(m.get(r, c)))
                .collect();
            MatrixRepr {
                rows: m.rows(),
                cols: m.cols(),
                data,
            }
        }

        fn into_matrix(self) -> Result<BitMatrix> {
            if self.data.len() != self.rows * self.cols {
                return Err(Error::Malformed("matrix data length mismatch".into()));
            }
            let mut m = BitMatrix::zeros(self.rows, self.cols);
            for r in 0..self.rows {
                for c in 0..self.cols {
                    m.set(r, c, self.data[r * self.cols + c] != 0);
                }
            }
            Ok(m)
        }
    }

    #[derive(Serialize, Deserialize)]
    struct NodeRepr {
        id: u32,
        kind: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        sizes: Option<Vec<usize>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        phases: Option<Vec<f64>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<[f64; 2]>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        matrix: Option<MatrixRepr>,
    }

    #[derive(Serialize, Deserialize)]
    pub(super) struct ScalableRepr {
        nodes: Vec<NodeRepr>,
        wires: Vec<(String, String, usize)>,
        inputs: Vec<(String, usize)>,
        outputs: Vec<(String, usize)>,
        scalar: [f64; 2],
    }

    fn endpoint_str(e: &SEndpoint) -> String {
        match e {
            SEndpoint::Node(SNodeId(id), port) => format!("n{id}:{port}"),
            SEndpoint::Boundary(SBoundaryId(id)) => format!("b{id}"),
        }
    }

    fn parse_endpoint(s: &str) -> Result<SEndpoint> {
        if let Some(rest) = s.strip_prefix('n') {
            let (id, port) = rest
                .split_once(':')
                .ok_or_else(|| Error::Malformed(format!("bad endpoint `{s}`")))?;
            Ok(SEndpoint::Node(
                SNodeId(
                    id.parse()
                        .map_err(|_| Error::Malformed(format!("bad endpoint `{s}`")))?,
                ),
                port.parse()
                    .map_err(|_| Error::Malformed(format!("bad endpoint `{s}`")))?,
            ))
        } else if let Some(rest) = s.strip_prefix('b') {
            Ok(SEndpoint::Boundary(SBoundaryId(rest.parse().map_err(
                |_| Error::Malformed(format!("bad endpoint `{s}`")),
            )?)))
        } else {
            Err(Error::Malformed(format!("bad endpoint `{s}`")))
        }
    }

    impl ScalableRepr {
        pub(super) fn from_diagram(d: &ScalableDiagram) -> Self {
            let nodes = d
                .nodes
                .iter()
                .map(|(SNodeId(id), gen)| {
                    let mut repr = NodeRepr {
                        id: *id,
                        kind: String::new(),
                        sizes: None,
                        phases: None,
                        labels: None,
                        matrix: None,
                    };
                    match gen {
                        ScalableGenerator::ScaledZ { phases, ins, outs } => {
                            repr.kind = "scaled_z".into();
                            repr.sizes = Some(vec![phases.len(), *ins, *outs]);
                            repr.phases = Some(phases.clone());
                        }
                        ScalableGenerator::ScaledH { labels, ins, outs } => {
                            repr.kind = "scaled_h".into();
                            repr.sizes = Some(vec![labels.len(), *ins, *outs]);
                            repr.labels = Some(labels.iter().map(|l| [l.re, l.im]).collect());
                        }
                        ScalableGenerator::Divider { n } => {
                            repr.kind = "divider".into();
                            repr.sizes = Some(vec![*n]);
                        }
                        ScalableGenerator::Gatherer { n } => {
                            repr.kind = "gatherer".into();
                            repr.sizes = Some(vec![*n]);
                        }
                        ScalableGenerator::RedArrow { matrix } => {
                            repr.kind = "red_arrow".into();
                            repr.matrix = Some(MatrixRepr::from(matrix));
                        }
                        ScalableGenerator::YellowArrow { matrix } => {
                            repr.kind = "yellow_arrow".into();
                            repr.matrix = Some(MatrixRepr::from(matrix));
                        }
                        ScalableGenerator::ThickCup { n } => {
                            repr.kind = "thick_cup".into();
                            repr.sizes = Some(vec![*n]);
                        }
                        ScalableGenerator::ThickCap { n } => {
                            repr.kind = "thick_cap".into();
                            repr.sizes = Some(vec![*n]);
                        }
                        ScalableGenerator::ThickSwap { a, b } => {
                            repr.kind = "thick_swap".into();
                            repr.sizes = Some(vec![*a, *b]);
                        }
                    }
                    repr
                })
                .collect();
            ScalableRepr {
                nodes,
                wires: d
                    .wires
                    .iter()
                    .map(|(a, b, size)| (endpoint_str(a), endpoint_str(b), *size))
                    .collect(),
                inputs: d
                    .inputs
                    .iter()
                    .map(|(SBoundaryId(id), s)| (format!("b{id}"), *s))
                    .collect(),
                outputs: d
                    .outputs
                    .iter()
                    .map(|(SBoundaryId(id), s)| (format!("b{id}"), *s))
                    .collect(),
                scalar: [d.scalar.re, d.scalar.im],
            }
        }

        pub(super) fn into_diagram(self) -> Result<ScalableDiagram> {
            let mut d = ScalableDiagram::new();
            for n in self.nodes {
                let sizes = n.sizes.clone().unwrap_or_default();
                let need = |k: usize| -> Result<Vec<usize>> {
                    if sizes.len() != k {
                        return Err(Error::Malformed(format!(
                            "node {} needs {k} size entries",
                            n.id
                        )));
                    }
                    Ok(sizes.clone())
                };
                let gen = match n.kind.as_str() {
                    "scaled_z" => {
                        let s = need(3)?;
                        let phases = n.phases.clone().unwrap_or_default();
                        if phases.len() != s[0] {
                            return Err(Error::Malformed("phase vector length mismatch".into()));
                        }
                        ScalableGenerator::ScaledZ {
                            phases,
                            ins: s[1],
                            outs: s[2],
                        }
                    }
                    "scaled_h" => {
                        let s = need(3)?;
                        let labels: Vec<Complex64> = n
                            .labels
                            .clone()
                            .unwrap_or_default()
                            .into_iter()
                            .map(|[re, im]| Complex64::new(re, im))
                            .collect();
                        if labels.len() != s[0] {
                            return Err(Error::Malformed("label vector length mismatch".into()));
                        }
                        ScalableGenerator::ScaledH {
                            labels,
                            ins: s[1],
                            outs: s[2],
                        }
                    }
                    "divider" => ScalableGenerator::Divider { n: need(1)?[0] },
                    "gatherer" => ScalableGenerator::Gatherer { n: need(1)?[0] },
                    "red_arrow" | "yellow_arrow" => {
                        let m = n
                            .matrix
                            .ok_or_else(|| Error::Malformed("arrow node needs a matrix".into()))?
                            .into_matrix()?;
                        if n.kind == "red_arrow" {
                            ScalableGenerator::RedArrow { matrix: m }
                        } else {
                            ScalableGenerator::YellowArrow { matrix: m }
                        }
                    }
                    "thick_cup" => ScalableGenerator::ThickCup { n: need(1)?[0] },
                    "thick_cap" => ScalableGenerator::ThickCap { n: need(1)?[0] },
                    "thick_swap" => {
                        let s = need(2)?;
                        ScalableGenerator::ThickSwap { a: s[0], b: s[1] }
                    }
                    other => return Err(Error::Malformed(format!("unknown node kind `{other}`"))),
                };
                let id = SNodeId(n.id);
                if d.nodes.insert(id, gen).is_some() {
                    return Err(Error::Malformed(format!("duplicate node id {}", n.id)));
                }
                d.port_counts.insert(id, 0);
                d.next_node = d.next_node.max(n.id + 1);
            }
            for (s, size) in &self.inputs {
                match parse_endpoint(s)? {
                    SEndpoint::Boundary(b) => {
                        d.inputs.push((b, *size));
                        d.next_boundary = d.next_boundary.max(b.0 + 1);
                    }
                    _ => return Err(Error::Malformed(format!("`{s}` is not a boundary port"))),
                }
            }
            for (s, size) in &self.outputs {
                match parse_endpoint(s)? {
                    SEndpoint::Boundary(b) => {
                        d.outputs.push((b, *size));
                        d.next_boundary = d.next_boundary.max(b.0 + 1);
                    }
                    _ => return Err(Error::Malformed(format!("`{s}` is not a boundary port"))),
                }
            }
            for (a, b, size) in &self.wires {
                let ea = parse_endpoint(a)?;
                let eb = parse_endpoint(b)?;
                for e in [&ea, &eb] {
                    if let SEndpoint::Node(id, port) = e {
                        let c = d.port_counts.entry(*id).or_insert(0);
                        *c = (*c).max(port + 1);
                    }
                }
                d.wires.push((ea, eb, *size));
            }
            d.scalar = Complex64::new(self.scalar[0], self.scalar[1]);
            d.typecheck()?;
            Ok(d)
        }
    }
}

impl ScalableDiagram {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&json::ScalableRepr::from_diagram(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<ScalableDiagram> {
        let repr: json::ScalableRepr = serde_json::from_str(s)?;
        repr.into_diagram()
    }
}
