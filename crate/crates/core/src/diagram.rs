//! Open-graph intermediate representation for ZH diagrams.
//!
//! A diagram is a collection of generators and undirected wires between
//! generator ports and boundary ports, together with an ordered boundary
//! (inputs and outputs) and a global complex scalar. Wires are a multiset of
//! unordered endpoint pairs; only the topology matters for the semantics, so
//! port numbers on spiders and H-boxes are bookkeeping, not meaning.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundaryId(pub u32);

/// A single generator occurrence. Spiders and H-boxes take any number of
/// wires; `Cup`, `Cap` and `Swap` have fixed degree (2, 2 and 4).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Generator {
    ZSpider { phase: f64 },
    HBox { label: Complex64 },
    Cup,
    Cap,
    Swap,
}

impl Generator {
    pub fn z(phase: f64) -> Self {
        Generator::ZSpider { phase }
    }

    /// H-box with the default label `-1`.
    pub fn h() -> Self {
        Generator::HBox {
            label: Complex64::new(-1.0, 0.0),
        }
    }

    pub fn h_labeled(label: Complex64) -> Self {
        Generator::HBox { label }
    }

    pub fn fixed_degree(&self) -> Option<usize> {
        match self {
            Generator::Cup | Generator::Cap => Some(2),
            Generator::Swap => Some(4),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    /// Port `port` of node `node`.
    Node(NodeId, u16),
    Boundary(BoundaryId),
}

/// Wiring target accepted by [`Diagram::wire`]: a node (next free port is
/// allocated automatically), an explicit node port, or a boundary port.
#[derive(Clone, Copy, Debug)]
pub enum Plug {
    Node(NodeId),
    Port(NodeId, u16),
    Boundary(BoundaryId),
}

impl From<NodeId> for Plug {
    fn from(n: NodeId) -> Self {
        Plug::Node(n)
    }
}

impl From<BoundaryId> for Plug {
    fn from(b: BoundaryId) -> Self {
        Plug::Boundary(b)
    }
}

impl From<Endpoint> for Plug {
    fn from(e: Endpoint) -> Self {
        match e {
            Endpoint::Node(n, p) => Plug::Port(n, p),
            Endpoint::Boundary(b) => Plug::Boundary(b),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Diagram {
    nodes: BTreeMap<NodeId, Generator>,
    wires: Vec<(Endpoint, Endpoint)>,
    inputs: Vec<BoundaryId>,
    outputs: Vec<BoundaryId>,
    scalar: Complex64,
    next_node: u32,
    next_boundary: u32,
    port_counts: BTreeMap<NodeId, u16>,
}

impl Default for Diagram {
    fn default() -> Self {
        Self::new()
    }
}

impl Diagram {
    pub fn new() -> Self {
        Diagram {
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

    pub fn add_node(&mut self, gen: Generator) -> NodeId {
        let id = NodeId(self.next_node);
        self.next_node += 1;
        self.nodes.insert(id, gen);
        self.port_counts.insert(id, 0);
        id
    }

    pub fn z(&mut self, phase: f64) -> NodeId {
        self.add_node(Generator::z(phase))
    }

    pub fn z0(&mut self) -> NodeId {
        self.z(0.0)
    }

    pub fn h(&mut self) -> NodeId {
        self.add_node(Generator::h())
    }

    pub fn h_labeled(&mut self, label: Complex64) -> NodeId {
        self.add_node(Generator::h_labeled(label))
    }

    pub fn cup(&mut self) -> NodeId {
        self.add_node(Generator::Cup)
    }

    pub fn cap(&mut self) -> NodeId {
        self.add_node(Generator::Cap)
    }

    pub fn swap(&mut self) -> NodeId {
        self.add_node(Generator::Swap)
    }

    /// Fresh boundary port appended to the input list.
    pub fn input(&mut self) -> BoundaryId {
        let id = BoundaryId(self.next_boundary);
        self.next_boundary += 1;
        self.inputs.push(id);
        id
    }

    /// Fresh boundary port appended to the output list.
    pub fn output(&mut self) -> BoundaryId {
        let id = BoundaryId(self.next_boundary);
        self.next_boundary += 1;
        self.outputs.push(id);
        id
    }

    fn resolve(&mut self, p: Plug) -> Endpoint {
        match p {
            Plug::Node(id) => {
                let c = self.port_counts.entry(id).or_insert(0);
                let port = *c;
                *c += 1;
                Endpoint::Node(id, port)
            }
            Plug::Port(id, port) => {
                let c = self.port_counts.entry(id).or_insert(0);
                *c = (*c).max(port + 1);
                Endpoint::Node(id, port)
            }
            Plug::Boundary(b) => Endpoint::Boundary(b),
        }
    }

    pub fn wire(&mut self, a: impl Into<Plug>, b: impl Into<Plug>) {
        let ea = self.resolve(a.into());
        let eb = self.resolve(b.into());
        self.wires.push((ea, eb));
    }

    pub fn mul_scalar(&mut self, c: Complex64) {
        self.scalar *= c;
    }

    pub fn set_scalar(&mut self, c: Complex64) {
        self.scalar = c;
    }

    pub fn scalar(&self) -> Complex64 {
        self.scalar
    }

    pub fn nodes(&self) -> &BTreeMap<NodeId, Generator> {
        &self.nodes
    }

    pub fn wires(&self) -> &[(Endpoint, Endpoint)] {
        &self.wires
    }

    pub fn inputs(&self) -> &[BoundaryId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[BoundaryId] {
        &self.outputs
    }

    pub fn degree(&self, n: NodeId) -> usize {
        self.wires
            .iter()
            .flat_map(|(a, b)| [a, b])
            .filter(|e| matches!(e, Endpoint::Node(id, _) if *id == n))
            .count()
    }

    /// Check the structural invariants: every boundary port is used exactly
    /// once, node ports are dense and distinct, fixed-degree generators have
    /// their full complement of wires.
    pub fn validate(&self) -> Result<()> {
        let mut seen_boundary: BTreeMap<BoundaryId, usize> = BTreeMap::new();
        let mut node_ports: BTreeMap<NodeId, Vec<u16>> = BTreeMap::new();
        for (a, b) in &self.wires {
            for e in [a, b] {
                match e {
                    Endpoint::Boundary(id) => *seen_boundary.entry(*id).or_insert(0) += 1,
                    Endpoint::Node(id, port) => {
                        if !self.nodes.contains_key(id) {
                            return Err(Error::Malformed(format!(
                                "wire references missing node {id:?}"
                            )));
                        }
                        node_ports.entry(*id).or_default().push(*port);
                    }
                }
            }
        }
        for id in self.inputs.iter().chain(self.outputs.iter()) {
            match seen_boundary.get(id) {
                Some(1) => {}
                Some(k) => {
                    return Err(Error::Malformed(format!(
                        "boundary port {id:?} used {k} times"
                    )))
                }
                None => return Err(Error::Malformed(format!("boundary port {id:?} is unwired"))),
            }
        }
        if seen_boundary.len() != self.inputs.len() + self.outputs.len() {
            return Err(Error::Malformed(
                "wire references an undeclared boundary port".into(),
            ));
        }
        for (id, io) in self.inputs.iter().map(|i| (i, "input")) {
            if self.outputs.contains(id) {
                return Err(Error::Malformed(format!(
                    "{io} {id:?} also appears as output"
                )));
            }
        }
        for (id, gen) in &self.nodes {
            let mut ports = node_ports.remove(id).unwrap_or_default();
            ports.sort_unstable();
            for (i, p) in ports.iter().enumerate() {
                if *p as usize != i {
                    return Err(Error::Malformed(format!(
                        "node {id:?} has non-dense or duplicate ports {ports:?}"
                    )));
                }
            }
            if let Some(required) = gen.fixed_degree() {
                if ports.len() != required {
                    return Err(Error::Malformed(format!(
                        "node {id:?} requires degree {required}, found {}",
                        ports.len()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Exchange the roles of inputs and outputs. Since wires are undirected
    /// this is the matrix transpose in the computational basis.
    pub fn transposed(&self) -> Diagram {
        let mut d = self.clone();
        std::mem::swap(&mut d.inputs, &mut d.outputs);
        d
    }

    /// Reorder the output list by `perm`: new output `k` is old output `perm[k]`.
    pub fn permute_outputs(&self, perm: &[usize]) -> Diagram {
        let mut d = self.clone();
        d.outputs = perm.iter().map(|&i| self.outputs[i]).collect();
        d
    }

    pub fn permute_inputs(&self, perm: &[usize]) -> Diagram {
        let mut d = self.clone();
        d.inputs = perm.iter().map(|&i| self.inputs[i]).collect();
        d
    }

    pub(crate) fn nodes_mut(&mut self) -> &mut BTreeMap<NodeId, Generator> {
        &mut self.nodes
    }

    pub(crate) fn raw_wires_mut(&mut self) -> &mut Vec<(Endpoint, Endpoint)> {
        &mut self.wires
    }

    /// Renumber every node's ports densely (0..degree) in wire order; used
    /// after rewrites that remove wires.
    pub(crate) fn compact_ports(&mut self) {
        let mut next: BTreeMap<NodeId, u16> = BTreeMap::new();
        let mut wires = std::mem::take(&mut self.wires);
        for (a, b) in wires.iter_mut() {
            for e in [a, b] {
                if let Endpoint::Node(id, port) = e {
                    let fresh = next.entry(*id).or_insert(0);
                    *port = *fresh;
                    *fresh += 1;
                }
            }
        }
        self.wires = wires;
        for (id, count) in &next {
            self.port_counts.insert(*id, *count);
        }
        for id in self.nodes.keys() {
            if !next.contains_key(id) {
                self.port_counts.insert(*id, 0);
            }
        }
    }

    /// Copy `other` into `self` with fresh ids; returns the id maps for
    /// nodes and boundary ports.
    fn absorb(
        &mut self,
        other: &Diagram,
    ) -> (BTreeMap<NodeId, NodeId>, BTreeMap<BoundaryId, BoundaryId>) {
        let mut node_map = BTreeMap::new();
        for (id, gen) in &other.nodes {
            let fresh = NodeId(self.next_node);
            self.next_node += 1;
            self.nodes.insert(fresh, *gen);
            self.port_counts
                .insert(fresh, *other.port_counts.get(id).unwrap_or(&0));
            node_map.insert(*id, fresh);
        }
        let mut boundary_map = BTreeMap::new();
        for id in other.inputs.iter().chain(other.outputs.iter()) {
            let fresh = BoundaryId(self.next_boundary);
            self.next_boundary += 1;
            boundary_map.insert(*id, fresh);
        }
        for (a, b) in &other.wires {
            let map = |e: &Endpoint| match e {
                Endpoint::Node(id, p) => Endpoint::Node(node_map[id], *p),
                Endpoint::Boundary(id) => Endpoint::Boundary(boundary_map[id]),
            };
            self.wires.push((map(a), map(b)));
        }
        self.scalar *= other.scalar;
        (node_map, boundary_map)
    }
}

/// Sequential composition: `d2` feeds `d1`, so the result computes
/// `semantics(d1) . semantics(d2)`.
pub fn compose(d1: &Diagram, d2: &Diagram) -> Result<Diagram> {
    if d1.inputs.len() != d2.outputs.len() {
        return Err(Error::ArityMismatch {
            expected: d1.inputs.len(),
            found: d2.outputs.len(),
        });
    }
    let mut out = Diagram::new();
    out.scalar = Complex64::new(1.0, 0.0);
    let (_, bmap2) = out.absorb(d2);
    let (_, bmap1) = out.absorb(d1);
    out.inputs = d2.inputs.iter().map(|b| bmap2[b]).collect();
    out.outputs = d1.outputs.iter().map(|b| bmap1[b]).collect();

    // Junction ports to be eliminated pairwise.
    let junctions: Vec<(BoundaryId, BoundaryId)> = d2
        .outputs
        .iter()
        .zip(d1.inputs.iter())
        .map(|(o, i)| (bmap2[o], bmap1[i]))
        .collect();
    for (jo, ji) in junctions {
        // Rename ji to jo, then splice jo out of the wire list.
        for (a, b) in out.wires.iter_mut() {
            for e in [a, b] {
                if *e == Endpoint::Boundary(ji) {
                    *e = Endpoint::Boundary(jo);
                }
            }
        }
        let j = Endpoint::Boundary(jo);
        let touching: Vec<usize> = out
            .wires
            .iter()
            .enumerate()
            .filter(|(_, (a, b))| *a == j || *b == j)
            .map(|(i, _)| i)
            .collect();
        match touching.as_slice() {
            [single] => {
                let (a, b) = out.wires[*single];
                if a == j && b == j {
                    // closed loop: a bare circle evaluates to 2
                    out.wires.remove(*single);
                    out.scalar *= Complex64::new(2.0, 0.0);
                } else {
                    return Err(Error::Malformed("dangling junction in composition".into()));
                }
            }
            [w1, w2] => {
                let (a1, b1) = out.wires[*w1];
                let (a2, b2) = out.wires[*w2];
                let other1 = if a1 == j { b1 } else { a1 };
                let other2 = if a2 == j { b2 } else { a2 };
                // remove higher index first
                out.wires.remove(*w2);
                out.wires.remove(*w1);
                out.wires.push((other1, other2));
            }
            _ => return Err(Error::Malformed("junction used more than twice".into())),
        }
    }
    Ok(out)
}

/// Parallel composition; `d1`'s boundary ports come first.
pub fn tensor_product(d1: &Diagram, d2: &Diagram) -> Diagram {
    let mut out = Diagram::new();
    let (_, bmap1) = out.absorb(d1);
    let (_, bmap2) = out.absorb(d2);
    out.inputs = d1
        .inputs
        .iter()
        .map(|b| bmap1[b])
        .chain(d2.inputs.iter().map(|b| bmap2[b]))
        .collect();
    out.outputs = d1
        .outputs
        .iter()
        .map(|b| bmap1[b])
        .chain(d2.outputs.iter().map(|b| bmap2[b]))
        .collect();
    out
}

// ---------------------------------------------------------------------------
// Stock diagrams
// ---------------------------------------------------------------------------

impl Diagram {
    /// A single plain wire.
    pub fn id_wire() -> Diagram {
        let mut d = Diagram::new();
        let i = d.input();
        let o = d.output();
        d.wire(i, o);
        d
    }

    /// `n` parallel plain wires.
    pub fn id_wires(n: usize) -> Diagram {
        let mut d = Diagram::new();
        for _ in 0..n {
            let i = d.input();
            let o = d.output();
            d.wire(i, o);
        }
        d
    }

    /// Z-spider with `m` inputs and `n` outputs.
    pub fn z_spider(m: usize, n: usize, phase: f64) -> Diagram {
        let mut d = Diagram::new();
        let z = d.z(phase);
        for _ in 0..m {
            let i = d.input();
            d.wire(i, z);
        }
        for _ in 0..n {
            let o = d.output();
            d.wire(z, o);
        }
        d
    }

    /// H-box with `m` inputs, `n` outputs and the given label.
    pub fn h_box(m: usize, n: usize, label: Complex64) -> Diagram {
        let mut d = Diagram::new();
        let h = d.h_labeled(label);
        for _ in 0..m {
            let i = d.input();
            d.wire(i, h);
        }
        for _ in 0..n {
            let o = d.output();
            d.wire(h, o);
        }
        d
    }

    /// The Hadamard gate: a 1-to-1 H-box with default label.
    pub fn hadamard() -> Diagram {
        Diagram::h_box(1, 1, Complex64::new(-1.0, 0.0))
    }

    /// Bare cup (0 to 2 wires).
    pub fn cup_diagram() -> Diagram {
        let mut d = Diagram::new();
        let c = d.cup();
        let o1 = d.output();
        let o2 = d.output();
        d.wire(Plug::Port(c, 0), o1);
        d.wire(Plug::Port(c, 1), o2);
        d
    }

    /// Bare cap (2 to 0 wires).
    pub fn cap_diagram() -> Diagram {
        let mut d = Diagram::new();
        let c = d.cap();
        let i1 = d.input();
        let i2 = d.input();
        d.wire(i1, Plug::Port(c, 0));
        d.wire(i2, Plug::Port(c, 1));
        d
    }

    /// Swap of two wires as an explicit generator.
    pub fn swap_diagram() -> Diagram {
        let mut d = Diagram::new();
        let s = d.swap();
        let i1 = d.input();
        let i2 = d.input();
        let o1 = d.output();
        let o2 = d.output();
        // ports 0,1 are inputs; semantics ties port 3 to port 0 and 2 to 1
        d.wire(i1, Plug::Port(s, 0));
        d.wire(i2, Plug::Port(s, 1));
        d.wire(Plug::Port(s, 2), o1);
        d.wire(Plug::Port(s, 3), o2);
        d
    }

    /// Closed diagram holding just a scalar.
    pub fn scalar_diagram(c: Complex64) -> Diagram {
        let mut d = Diagram::new();
        d.scalar = c;
        d
    }
}

/// X-spider with `m` inputs and `n` outputs, defined as a Z-spider
/// conjugated by Hadamard boxes on every leg.
pub fn x_spider(m: usize, n: usize) -> Diagram {
    x_spider_phased(m, n, 0.0)
}

/// X-spider carrying a phase, realised as a one-legged H-box tap
/// `diag(1, e^{i alpha})` on the central Z-spider.
pub fn x_spider_phased(m: usize, n: usize, phase: f64) -> Diagram {
    let mut d = Diagram::new();
    let z = d.z0();
    if phase != 0.0 {
        let tap = d.h_labeled(Complex64::from_polar(1.0, phase));
        d.wire(z, tap);
    }
    for _ in 0..m {
        let i = d.input();
        let h = d.h();
        d.wire(i, h);
        d.wire(h, z);
    }
    for _ in 0..n {
        let o = d.output();
        let h = d.h();
        d.wire(z, h);
        d.wire(h, o);
    }
    d
}

/// The NOT gate expansion: Hadamard-conjugated `diag(1, -1)`.
pub fn not_gate() -> Diagram {
    x_spider_phased(1, 1, std::f64::consts::PI)
}

// ---------------------------------------------------------------------------
// JSON representation
// ---------------------------------------------------------------------------

mod json {
    use super::*;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize)]
    struct NodeRepr {
        id: u32,
        kind: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        phase: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        label_re: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        label_im: Option<f64>,
    }

    #[derive(Serialize, Deserialize)]
    pub(super) struct DiagramRepr {
        nodes: Vec<NodeRepr>,
        wires: Vec<[String; 2]>,
        inputs: Vec<String>,
        outputs: Vec<String>,
        scalar: [f64; 2],
    }

    fn endpoint_str(e: &Endpoint) -> String {
        match e {
            Endpoint::Node(NodeId(id), port) => format!("n{id}:{port}"),
            Endpoint::Boundary(BoundaryId(id)) => format!("b{id}"),
        }
    }

    fn parse_endpoint(s: &str) -> Result<Endpoint> {
        if let Some(rest) = s.strip_prefix('n') {
            let (id, port) = rest
                .split_once(':')
                .ok_or_else(|| Error::Malformed(format!("bad endpoint `{s}`")))?;
            let id: u32 = id
                .parse()
                .map_err(|_| Error::Malformed(format!("bad endpoint `{s}`")))?;
            let port: u16 = port
                .parse()
                .map_err(|_| Error::Malformed(format!("bad endpoint `{s}`")))?;
            Ok(Endpoint::Node(NodeId(id), port))
        } else if let Some(rest) = s.strip_prefix('b') {
            let id: u32 = rest
                .parse()
                .map_err(|_| Error::Malformed(format!("bad endpoint `{s}`")))?;
            Ok(Endpoint::Boundary(BoundaryId(id)))
        } else {
            Err(Error::Malformed(format!("bad endpoint `{s}`")))
        }
    }

    impl DiagramRepr {
        pub(super) fn from_diagram(d: &Diagram) -> Self {
            let nodes = d
                .nodes
                .iter()
                .map(|(NodeId(id), gen)| match gen {
                    Generator::ZSpider { phase } => NodeRepr {
                        id: *id,
                        kind: "z".into(),
                        phase: Some(*phase),
                        label_re: None,
                        label_im: None,
                    },
                    Generator::HBox { label } => NodeRepr {
                        id: *id,
                        kind: "h".into(),
                        phase: None,
                        label_re: Some(label.re),
                        label_im: Some(label.im),
                    },
                    Generator::Cup => NodeRepr {
                        id: *id,
                        kind: "cup".into(),
                        phase: None,
                        label_re: None,
                        label_im: None,
                    },
                    Generator::Cap => NodeRepr {
                        id: *id,
                        kind: "cap".into(),
                        phase: None,
                        label_re: None,
                        label_im: None,
                    },
                    Generator::Swap => NodeRepr {
                        id: *id,
                        kind: "swap".into(),
                        phase: None,
                        label_re: None,
                        label_im: None,
                    },
                })
                .collect();
            DiagramRepr {
                nodes,
                wires: d
                    .wires
                    .iter()
                    .map(|(a, b)| [endpoint_str(a), endpoint_str(b)])
                    .collect(),
                inputs: d
                    .inputs
                    .iter()
                    .map(|BoundaryId(id)| format!("b{id}"))
                    .collect(),
                outputs: d
                    .outputs
                    .iter()
                    .map(|BoundaryId(id)| format!("b{id}"))
                    .collect(),
                scalar: [d.scalar.re, d.scalar.im],
            }
        }

        pub(super) fn into_diagram(self) -> Result<Diagram> {
            let mut d = Diagram::new();
            for n in self.nodes {
                let gen = match n.kind.as_str() {
                    "z" => Generator::ZSpider {
                        phase: n.phase.unwrap_or(0.0),
                    },
                    "h" => Generator::HBox {
                        label: Complex64::new(
                            n.label_re.unwrap_or(-1.0),
                            n.label_im.unwrap_or(0.0),
                        ),
                    },
                    "cup" => Generator::Cup,
                    "cap" => Generator::Cap,
                    "swap" => Generator::Swap,
                    other => return Err(Error::Malformed(format!("unknown node kind `{other}`"))),
                };
                let id = NodeId(n.id);
                if d.nodes.insert(id, gen).is_some() {
                    return Err(Error::Malformed(format!("duplicate node id {}", n.id)));
                }
                d.port_counts.insert(id, 0);
                d.next_node = d.next_node.max(n.id + 1);
            }
            let parse_boundary = |s: &str| -> Result<BoundaryId> {
                match parse_endpoint(s)? {
                    Endpoint::Boundary(b) => Ok(b),
                    _ => Err(Error::Malformed(format!("`{s}` is not a boundary port"))),
                }
            };
            for s in &self.inputs {
                let b = parse_boundary(s)?;
                d.inputs.push(b);
                d.next_boundary = d.next_boundary.max(b.0 + 1);
            }
            for s in &self.outputs {
                let b = parse_boundary(s)?;
                d.outputs.push(b);
                d.next_boundary = d.next_boundary.max(b.0 + 1);
            }
            for [a, b] in &self.wires {
                let ea = parse_endpoint(a)?;
                let eb = parse_endpoint(b)?;
                for e in [&ea, &eb] {
                    if let Endpoint::Node(id, port) = e {
                        let c = d.port_counts.entry(*id).or_insert(0);
                        *c = (*c).max(port + 1);
                    }
                }
                d.wires.push((ea, eb));
            }
            d.scalar = Complex64::new(self.scalar[0], self.scalar[1]);
            d.validate()?;
            Ok(d)
        }
    }
}

impl Diagram {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&json::DiagramRepr::from_diagram(self)).expect("serializable")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&json::DiagramRepr::from_diagram(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Diagram> {
        let repr: json::DiagramRepr = serde_json::from_str(s)?;
        repr.into_diagram()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_rejects_reused_boundary() {
        let mut d = Diagram::new();
        let i = d.input();
        let z = d.z0();
        d.wire(i, z);
        d.wire(i, z);
        assert!(d.validate().is_err());
    }

    #[test]
    fn validate_accepts_spider() {
        let d = Diagram::z_spider(2, 3, 0.1);
        d.validate().unwrap();
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let mut d = Diagram::z_spider(1, 2, 0.1234567890123);
        let h = d.h_labeled(Complex64::new(-0.5, 1.0 / 3.0));
        let z = *d.nodes().keys().next().unwrap();
        d.wire(z, h);
        d.mul_scalar(Complex64::new(0.25, -1.5));
        let s1 = d.to_json();
        let d2 = Diagram::from_json(&s1).unwrap();
        let s2 = d2.to_json();
        assert_eq!(s1, s2);
    }

    #[test]
    fn compose_arity_mismatch() {
        let a = Diagram::z_spider(2, 2, 0.0);
        let b = Diagram::z_spider(1, 1, 0.0);
        assert!(compose(&a, &b).is_err());
    }
}
