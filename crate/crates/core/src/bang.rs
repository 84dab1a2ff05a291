//! !-box templates and their instantiation, annotated (indexed) boxes, the
//! dictionary between !-boxes and matrix arrows, and graph states.
//!
//! A template is a diagram fragment together with boxes marking replicable
//! regions. Instantiation replicates each box's contents `count` times; a
//! wire whose endpoints live in different boxes (or one box and the fixed
//! part) is replicated over the product of the relevant counts, which makes
//! the connection pattern of two overlapping boxes a complete bipartite
//! graph. Strictly nested boxes expand outermost-first; replication over
//! membership tuples implements exactly that. Annotated boxes fix their
//! index set and may give each copy of a node its own phase or label, which
//! is the trapeze construct; a conditional cross wire (present for the index
//! pairs where an incidence matrix has a 1) then makes matrix arrows
//! expressible as two annotated boxes.

use crate::bitmatrix::BitMatrix;
use crate::diagram::{BoundaryId, Diagram, Endpoint, Generator, NodeId, Plug};
use crate::error::{Error, Result};
use crate::scalable::{append_not, ArrowKind};
use num_complex::Complex64;
use std::collections::{BTreeMap, BTreeSet};

/// Per-copy parameter of an annotated node.
#[derive(Clone, Debug)]
pub enum ParamExpr {
    /// copy `i` takes `values[i]` as its H-box label
    Lookup(Vec<Complex64>),
    /// copy `i` takes `phases[i]` as its Z-spider phase
    LookupPhase(Vec<f64>),
    /// copy `i` takes `base^{popcount(i)}` as its H-box label
    PowerByWeight { base: Complex64 },
}

impl ParamExpr {
    fn label_at(&self, i: usize) -> Result<Complex64> {
        match self {
            ParamExpr::Lookup(v) => v
                .get(i)
                .copied()
                .ok_or_else(|| Error::MalformedBoxes(format!("lookup index {i} out of range"))),
            ParamExpr::PowerByWeight { base } => {
                Ok((0..i.count_ones()).fold(Complex64::new(1.0, 0.0), |acc, _| acc * base))
            }
            ParamExpr::LookupPhase(_) => Err(Error::MalformedBoxes(
                "phase parameter used on an H-box".into(),
            )),
        }
    }

    fn phase_at(&self, i: usize) -> Result<f64> {
        match self {
            ParamExpr::LookupPhase(v) => v
                .get(i)
                .copied()
                .ok_or_else(|| Error::MalformedBoxes(format!("lookup index {i} out of range"))),
            _ => Err(Error::MalformedBoxes(
                "label parameter used on a Z-spider".into(),
            )),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BangBox {
    pub id: String,
    pub nodes: BTreeSet<NodeId>,
    pub boundary: BTreeSet<BoundaryId>,
    /// fixed index set `[n]`; `None` leaves the count free
    pub index_set: Option<usize>,
    /// per-copy parameters of owned nodes
    pub params: Vec<(NodeId, ParamExpr)>,
}

impl BangBox {
    pub fn plain(id: &str, nodes: impl IntoIterator<Item = NodeId>) -> Self {
        BangBox {
            id: id.to_string(),
            nodes: nodes.into_iter().collect(),
            boundary: BTreeSet::new(),
            index_set: None,
            params: Vec::new(),
        }
    }

    pub fn with_boundary(mut self, ports: impl IntoIterator<Item = BoundaryId>) -> Self {
        self.boundary.extend(ports);
        self
    }

    pub fn annotated(mut self, n: usize) -> Self {
        self.index_set = Some(n);
        self
    }

    pub fn with_param(mut self, node: NodeId, expr: ParamExpr) -> Self {
        self.params.push((node, expr));
        self
    }
}

/// How a conditional cross wire connects its two copies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossKind {
    Plain,
    Hadamard,
}

/// Wire between a node of `box_a` (copy `i`) and a node of `box_b` (copy
/// `j`), present iff `incidence[j][i] = 1` (all pairs when `None`).
#[derive(Clone, Debug)]
pub struct CrossWire {
    pub box_a: String,
    pub node_a: NodeId,
    pub box_b: String,
    pub node_b: NodeId,
    pub kind: CrossKind,
    pub incidence: Option<BitMatrix>,
}

#[derive(Clone, Debug)]
pub struct BangTemplate {
    pub base: Diagram,
    pub boxes: Vec<BangBox>,
    pub cross_wires: Vec<CrossWire>,
}

impl BangTemplate {
    pub fn plain(base: Diagram, boxes: Vec<BangBox>) -> Self {
        BangTemplate {
            base,
            boxes,
            cross_wires: Vec::new(),
        }
    }

    fn box_of(&self, id: &str) -> Result<&BangBox> {
        self.boxes
            .iter()
            .find(|b| b.id == id)
            .ok_or_else(|| Error::MalformedBoxes(format!("unknown box `{id}`")))
    }

    /// Boxes containing a node, in declaration order.
    fn membership(&self, n: NodeId) -> Vec<usize> {
        self.boxes
            .iter()
            .enumerate()
            .filter(|(_, b)| b.nodes.contains(&n))
            .map(|(i, _)| i)
            .collect()
    }

    fn boundary_membership(&self, p: BoundaryId) -> Vec<usize> {
        self.boxes
            .iter()
            .enumerate()
            .filter(|(_, b)| b.boundary.contains(&p))
            .map(|(i, _)| i)
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let mut ids = BTreeSet::new();
        for b in &self.boxes {
            if !ids.insert(b.id.clone()) {
                return Err(Error::MalformedBoxes(format!(
                    "duplicate box id `{}`",
                    b.id
                )));
            }
            for (n, _) in &b.params {
                if !b.nodes.contains(n) {
                    return Err(Error::MalformedBoxes(format!(
                        "parameter for node {n:?} outside box `{}`",
                        b.id
                    )));
                }
            }
        }
        for n in self.base.nodes().keys() {
            if self.membership(*n).len() > 2 {
                return Err(Error::MalformedBoxes(format!(
                    "node {n:?} belongs to more than two boxes; only pairwise overlap is supported"
                )));
            }
        }
        for p in self.base.inputs().iter().chain(self.base.outputs().iter()) {
            if self.boundary_membership(*p).len() > 1 {
                return Err(Error::MalformedBoxes(format!(
                    "boundary port {p:?} belongs to more than one box"
                )));
            }
        }
        for (a, b) in self.base.wires() {
            if let (Endpoint::Boundary(p), Endpoint::Node(n, _)) = (a, b) {
                self.check_crossing_boundary(*p, *n)?;
            }
            if let (Endpoint::Node(n, _), Endpoint::Boundary(p)) = (a, b) {
                self.check_crossing_boundary(*p, *n)?;
            }
        }
        for cw in &self.cross_wires {
            let a = self.box_of(&cw.box_a)?;
            let b = self.box_of(&cw.box_b)?;
            if !a.nodes.contains(&cw.node_a) || !b.nodes.contains(&cw.node_b) {
                return Err(Error::MalformedBoxes(
                    "cross wire endpoint outside its box".into(),
                ));
            }
        }
        Ok(())
    }

    /// A wire from a boxed node to an unboxed boundary port cannot fan out:
    /// boundary ports have exactly one wire.
    fn check_crossing_boundary(&self, p: BoundaryId, n: NodeId) -> Result<()> {
        let pm: BTreeSet<usize> = self.boundary_membership(p).into_iter().collect();
        let nm: BTreeSet<usize> = self.membership(n).into_iter().collect();
        if !nm.is_subset(&pm) {
            return Err(Error::MalformedBoxes(format!(
                "wire from boxed node {n:?} to boundary port {p:?} outside the box"
            )));
        }
        Ok(())
    }
}

/// Multi-index over the counts of a set of boxes.
fn tuples(counts: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &c in counts {
        let mut next = Vec::with_capacity(out.len() * c.max(1));
        for t in &out {
            for i in 0..c {
                let mut t2 = t.clone();
                t2.push(i);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

/// Instantiate a template at the given per-box counts.
pub fn instantiate(t: &BangTemplate, counts: &BTreeMap<String, usize>) -> Result<Diagram> {
    t.validate()?;
    let mut box_count = Vec::with_capacity(t.boxes.len());
    for b in &t.boxes {
        let c = *counts
            .get(&b.id)
            .ok_or_else(|| Error::MissingCount(b.id.clone()))?;
        if let Some(n) = b.index_set {
            if c != n {
                return Err(Error::MalformedBoxes(format!(
                    "box `{}` is annotated with [{}] but instantiated at count {c}",
                    b.id, n
                )));
            }
        }
        box_count.push(c);
    }

    let mut d = Diagram::new();
    d.set_scalar(t.base.scalar());

    // replicate nodes over membership tuples
    let mut node_copies: BTreeMap<NodeId, BTreeMap<Vec<usize>, NodeId>> = BTreeMap::new();
    for (id, gen) in t.base.nodes() {
        let boxes = t.membership(*id);
        let dims: Vec<usize> = boxes.iter().map(|b| box_count[*b]).collect();
        let mut copies = BTreeMap::new();
        for tuple in tuples(&dims) {
            let mut gen = *gen;
            for (bpos, bidx) in boxes.iter().enumerate() {
                for (pnode, expr) in &t.boxes[*bidx].params {
                    if pnode == id {
                        gen = match gen {
                            Generator::HBox { .. } => Generator::HBox {
                                label: expr.label_at(tuple[bpos])?,
                            },
                            Generator::ZSpider { .. } => Generator::ZSpider {
                                phase: expr.phase_at(tuple[bpos])?,
                            },
                            other => other,
                        };
                    }
                }
            }
            copies.insert(tuple.clone(), d.add_node(gen));
        }
        node_copies.insert(*id, copies);
    }

    // replicate boundary ports in declared order
    let mut boundary_copies: BTreeMap<BoundaryId, Vec<BoundaryId>> = BTreeMap::new();
    for p in t.base.inputs() {
        let boxes = t.boundary_membership(*p);
        let n = boxes.iter().map(|b| box_count[*b]).product::<usize>();
        boundary_copies.insert(*p, (0..n).map(|_| d.input()).collect());
    }
    for p in t.base.outputs() {
        let boxes = t.boundary_membership(*p);
        let n = boxes.iter().map(|b| box_count[*b]).product::<usize>();
        boundary_copies.insert(*p, (0..n).map(|_| d.output()).collect());
    }

    // replicate wires over the union of their endpoints' memberships
    for (a, b) in t.base.wires() {
        let membership_of = |e: &Endpoint| -> Vec<usize> {
            match e {
                Endpoint::Node(n, _) => t.membership(*n),
                Endpoint::Boundary(p) => t.boundary_membership(*p),
            }
        };
        let ma = membership_of(a);
        let mb = membership_of(b);
        let mut union: Vec<usize> = ma.iter().chain(mb.iter()).copied().collect();
        union.sort_unstable();
        union.dedup();
        let dims: Vec<usize> = union.iter().map(|x| box_count[*x]).collect();
        for tuple in tuples(&dims) {
            let project = |mem: &[usize]| -> Vec<usize> {
                mem.iter()
                    .map(|bx| tuple[union.iter().position(|u| u == bx).expect("member")])
                    .collect()
            };
            let plug_of = |e: &Endpoint, idx: Vec<usize>| -> Plug {
                match e {
                    Endpoint::Node(n, _) => Plug::Node(node_copies[n][&idx]),
                    Endpoint::Boundary(p) => {
                        let boxes = t.boundary_membership(*p);
                        let mut flat = 0usize;
                        for (k, bx) in boxes.iter().enumerate() {
                            flat = flat * box_count[*bx] + idx[k];
                        }
                        Plug::Boundary(boundary_copies[p][flat])
                    }
                }
            };
            let pa = plug_of(a, project(&ma));
            let pb = plug_of(b, project(&mb));
            d.wire(pa, pb);
        }
    }

    // conditional cross wires
    for cw in &t.cross_wires {
        let ia = t
            .boxes
            .iter()
            .position(|b| b.id == cw.box_a)
            .expect("validated");
        let ib = t
            .boxes
            .iter()
            .position(|b| b.id == cw.box_b)
            .expect("validated");
        let (ca, cb) = (box_count[ia], box_count[ib]);
        if let Some(m) = &cw.incidence {
            if m.rows() != cb || m.cols() != ca {
                return Err(Error::MalformedBoxes(format!(
                    "cross-wire incidence is {}x{}, counts are ({cb},{ca})",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        for i in 0..ca {
            for j in 0..cb {
                let present = cw.incidence.as_ref().is_none_or(|m| m.get(j, i));
                if !present {
                    continue;
                }
                let na = node_copies[&cw.node_a][&vec![i]];
                let nb = node_copies[&cw.node_b][&vec![j]];
                match cw.kind {
                    CrossKind::Plain => d.wire(na, nb),
                    CrossKind::Hadamard => {
                        let h = d.h();
                        d.wire(na, h);
                        d.wire(h, nb);
                    }
                }
            }
        }
    }

    d.validate()?;
    Ok(d)
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
        data: Vec<u8>,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(tag = "kind", rename_all = "snake_case")]
    enum ParamRepr {
        Lookup { labels: Vec<[f64; 2]> },
        LookupPhase { phases: Vec<f64> },
        PowerByWeight { base: [f64; 2] },
    }

    #[derive(Serialize, Deserialize)]
    struct BoxRepr {
        id: String,
        nodes: Vec<u32>,
        #[serde(default)]
        boundary: Vec<u32>,
        count_var: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        index_set: Option<usize>,
        #[serde(skip_serializing_if = "Vec::is_empty", default)]
        params: Vec<(u32, ParamRepr)>,
    }

    #[derive(Serialize, Deserialize)]
    struct CrossRepr {
        box_a: String,
        node_a: u32,
        box_b: String,
        node_b: u32,
        kind: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        incidence: Option<MatrixRepr>,
    }

    #[derive(Serialize, Deserialize)]
    pub(super) struct TemplateRepr {
        base: serde_json::Value,
        boxes: Vec<BoxRepr>,
        #[serde(skip_serializing_if = "Vec::is_empty", default)]
        cross_wires: Vec<CrossRepr>,
    }

    impl TemplateRepr {
        pub(super) fn from_template(t: &BangTemplate) -> Result<Self> {
            let base = serde_json::from_str(&t.base.to_json())?;
            let boxes = t
                .boxes
                .iter()
                .map(|b| BoxRepr {
                    id: b.id.clone(),
                    nodes: b.nodes.iter().map(|n| n.0).collect(),
                    boundary: b.boundary.iter().map(|p| p.0).collect(),
                    count_var: b.id.clone(),
                    index_set: b.index_set,
                    params: b
                        .params
                        .iter()
                        .map(|(n, e)| {
                            let repr = match e {
                                ParamExpr::Lookup(v) => ParamRepr::Lookup {
                                    labels: v.iter().map(|c| [c.re, c.im]).collect(),
                                },
                                ParamExpr::LookupPhase(v) => {
                                    ParamRepr::LookupPhase { phases: v.clone() }
                                }
                                ParamExpr::PowerByWeight { base } => ParamRepr::PowerByWeight {
                                    base: [base.re, base.im],
                                },
                            };
                            (n.0, repr)
                        })
                        .collect(),
                })
                .collect();
            let cross_wires = t
                .cross_wires
                .iter()
                .map(|cw| CrossRepr {
                    box_a: cw.box_a.clone(),
                    node_a: cw.node_a.0,
                    box_b: cw.box_b.clone(),
                    node_b: cw.node_b.0,
                    kind: match cw.kind {
                        CrossKind::Plain => "plain".into(),
                        CrossKind::Hadamard => "hadamard".into(),
                    },
                    incidence: cw.incidence.as_ref().map(|m| MatrixRepr {
                        rows: m.rows(),
                        cols: m.cols(),
                        data: (0..m.rows())
                            .flat_map(|r| (0..m.cols()).map(move |c| (r, c)))
                            .map(|(r, c)| u8::from(m.get(r, c)))
                            .collect(),
                    }),
                })
                .collect();
            Ok(TemplateRepr {
                base,
                boxes,
                cross_wires,
            })
        }

        pub(super) fn into_template(self) -> Result<BangTemplate> {
            let base = Diagram::from_json(&serde_json::to_string(&self.base)?)?;
            let boxes = self
                .boxes
                .into_iter()
                .map(|b| {
                    let params = b
                        .params
                        .into_iter()
                        .map(|(n, repr)| {
                            let expr = match repr {
                                ParamRepr::Lookup { labels } => ParamExpr::Lookup(
                                    labels
                                        .into_iter()
                                        .map(|[re, im]| Complex64::new(re, im))
                                        .collect(),
                                ),
                                ParamRepr::LookupPhase { phases } => ParamExpr::LookupPhase(phases),
                                ParamRepr::PowerByWeight { base } => ParamExpr::PowerByWeight {
                                    base: Complex64::new(base[0], base[1]),
                                },
                            };
                            (NodeId(n), expr)
                        })
                        .collect();
                    BangBox {
                        id: b.id,
                        nodes: b.nodes.into_iter().map(NodeId).collect(),
                        boundary: b.boundary.into_iter().map(BoundaryId).collect(),
                        index_set: b.index_set,
                        params,
                    }
                })
                .collect();
            let cross_wires = self
                .cross_wires
                .into_iter()
                .map(|cw| {
                    let kind = match cw.kind.as_str() {
                        "plain" => Ok(CrossKind::Plain),
                        "hadamard" => Ok(CrossKind::Hadamard),
                        other => Err(Error::MalformedBoxes(format!(
                            "unknown cross kind `{other}`"
                        ))),
                    }?;
                    let incidence = match cw.incidence {
                        Some(m) => {
                            if m.data.len() != m.rows * m.cols {
                                return Err(Error::MalformedBoxes(
                                    "incidence data mismatch".into(),
                                ));
                            }
                            let mut bm = BitMatrix::zeros(m.rows, m.cols);
                            for r in 0..m.rows {
                                for c in 0..m.cols {
                                    bm.set(r, c, m.data[r * m.cols + c] != 0);
                                }
                            }
                            Some(bm)
                        }
                        None => None,
                    };
                    Ok(CrossWire {
                        box_a: cw.box_a,
                        node_a: NodeId(cw.node_a),
                        box_b: cw.box_b,
                        node_b: NodeId(cw.node_b),
                        kind,
                        incidence,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let t = BangTemplate {
                base,
                boxes,
                cross_wires,
            };
            t.validate()?;
            Ok(t)
        }
    }
}

impl BangTemplate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&json::TemplateRepr::from_template(
            self,
        )?)?)
    }

    pub fn from_json(s: &str) -> Result<BangTemplate> {
        let repr: json::TemplateRepr = serde_json::from_str(s)?;
        repr.into_template()
    }
}

// ---------------------------------------------------------------------------
// Arrow dictionary
// ---------------------------------------------------------------------------

/// Express a matrix arrow as a pair of annotated boxes with a conditional
/// cross wire. All-ones matrices turn into a plain overlap (no incidence
/// annotation), matching the convention that an unlabelled arrow is full of
/// ones.
pub fn arrow_to_bang(kind: ArrowKind, matrix: &BitMatrix) -> BangTemplate {
    let (m, n) = (matrix.rows(), matrix.cols());
    let all_ones = (0..m).all(|r| (0..n).all(|c| matrix.get(r, c)));
    let incidence = if all_ones { None } else { Some(matrix.clone()) };
    let mut d = Diagram::new();
    match kind {
        ArrowKind::Red => {
            let ib = d.input();
            let g = d.z0();
            d.wire(ib, g);
            let core = d.z0();
            let h_out = d.h();
            let ob = d.output();
            d.wire(core, h_out);
            d.wire(h_out, ob);
            let cols = BangBox::plain("cols", [g]).with_boundary([ib]).annotated(n);
            let rows = BangBox::plain("rows", [core, h_out])
                .with_boundary([ob])
                .annotated(m);
            BangTemplate {
                base: d,
                boxes: vec![cols, rows],
                cross_wires: vec![CrossWire {
                    box_a: "cols".into(),
                    node_a: g,
                    box_b: "rows".into(),
                    node_b: core,
                    kind: CrossKind::Hadamard,
                    incidence,
                }],
            }
        }
        ArrowKind::Yellow => {
            let ib = d.input();
            let (not_in, not_out) = append_not(&mut d);
            let g = d.z0();
            d.wire(ib, not_in);
            d.wire(not_out, g);
            let col_nodes: Vec<NodeId> = d.nodes().keys().copied().collect();

            let and_box = d.h();
            let h = d.h();
            d.wire(and_box, h);
            let (nin2, nout2) = append_not(&mut d);
            d.wire(h, nin2);
            let ob = d.output();
            d.wire(nout2, ob);
            let row_nodes: Vec<NodeId> = d
                .nodes()
                .keys()
                .copied()
                .filter(|x| !col_nodes.contains(x))
                .collect();

            let cols = BangBox::plain("cols", col_nodes)
                .with_boundary([ib])
                .annotated(n);
            let rows = BangBox::plain("rows", row_nodes)
                .with_boundary([ob])
                .annotated(m);
            BangTemplate {
                base: d,
                boxes: vec![cols, rows],
                cross_wires: vec![CrossWire {
                    box_a: "cols".into(),
                    node_a: g,
                    box_b: "rows".into(),
                    node_b: and_box,
                    kind: CrossKind::Plain,
                    incidence,
                }],
            }
        }
    }
}

fn is_plain_h(gen: &Generator) -> bool {
    matches!(gen, Generator::HBox { label } if (label + Complex64::new(1.0, 0.0)).norm() == 0.0)
}

fn is_phase_free_z(gen: &Generator) -> bool {
    matches!(gen, Generator::ZSpider { phase } if *phase == 0.0)
}

/// Recognise the dictionary shapes produced by [`arrow_to_bang`] and recover
/// the arrow. Anything else fails with a diagnostic: the translation is a
/// heuristic, not a decision procedure.
pub fn bang_to_arrow(t: &BangTemplate) -> Result<(ArrowKind, BitMatrix)> {
    t.validate()?;
    if t.boxes.len() != 2 || t.cross_wires.len() != 1 {
        return Err(Error::Dictionary(format!(
            "expected two boxes and one cross wire, found {} boxes and {} cross wires",
            t.boxes.len(),
            t.cross_wires.len()
        )));
    }
    let cw = &t.cross_wires[0];
    let cols = t.box_of(&cw.box_a)?;
    let rows = t.box_of(&cw.box_b)?;
    let n = cols
        .index_set
        .ok_or_else(|| Error::Dictionary("column box has no index annotation".into()))?;
    let m = rows
        .index_set
        .ok_or_else(|| Error::Dictionary("row box has no index annotation".into()))?;
    let matrix = match &cw.incidence {
        Some(a) => {
            if a.rows() != m || a.cols() != n {
                return Err(Error::Dictionary(
                    "incidence does not match annotations".into(),
                ));
            }
            a.clone()
        }
        None => BitMatrix::ones(m, n),
    };
    match cw.kind {
        CrossKind::Hadamard => {
            // red shape: copy spider in the column box; Z core and trailing
            // H-box in the row box
            let col_ok = cols.nodes.len() == 1
                && cols
                    .nodes
                    .iter()
                    .all(|x| is_phase_free_z(&t.base.nodes()[x]));
            let row_ok = rows.nodes.len() == 2
                && rows
                    .nodes
                    .iter()
                    .any(|x| is_phase_free_z(&t.base.nodes()[x]))
                && rows.nodes.iter().any(|x| is_plain_h(&t.base.nodes()[x]));
            if !(col_ok && row_ok) {
                return Err(Error::Dictionary(
                    "boxes do not match the red arrow shape".into(),
                ));
            }
            Ok((ArrowKind::Red, matrix))
        }
        CrossKind::Plain => {
            // yellow shape: NOT + copy spider per column; AND box + H + NOT
            // per row, with the cross wire between the copy spider and the
            // AND box
            let col_ok = cols.nodes.len() == 5 && is_phase_free_z(&t.base.nodes()[&cw.node_a]);
            let row_ok = rows.nodes.len() == 6 && is_plain_h(&t.base.nodes()[&cw.node_b]);
            if !(col_ok && row_ok) {
                return Err(Error::Dictionary(
                    "boxes do not match the yellow arrow shape".into(),
                ));
            }
            Ok((ArrowKind::Yellow, matrix))
        }
    }
}

// ---------------------------------------------------------------------------
// Graph states
// ---------------------------------------------------------------------------

/// Incidence matrix of the complete graph on `n` vertices: one row per
/// unordered pair (lexicographic), entry 1 iff the vertex lies in the pair.
pub fn complete_incidence(n: usize) -> BitMatrix {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let mut k = BitMatrix::zeros(pairs.len(), n);
    for (row, (u, v)) in pairs.iter().enumerate() {
        k.set(row, *u, true);
        k.set(row, *v, true);
    }
    k
}

fn check_adjacency(adj: &BitMatrix) -> Result<usize> {
    if !adj.is_symmetric() {
        return Err(Error::Precondition(
            "adjacency matrix must be symmetric".into(),
        ));
    }
    if !adj.zero_diagonal() {
        return Err(Error::Precondition(
            "adjacency matrix must have zero diagonal".into(),
        ));
    }
    Ok(adj.rows())
}

/// Graph state: one copy spider per vertex and a CZ (plain H-box edge) per
/// graph edge.
pub fn graph_state(adj: &BitMatrix) -> Result<Diagram> {
    let n = check_adjacency(adj)?;
    let mut d = Diagram::new();
    let verts: Vec<NodeId> = (0..n)
        .map(|_| {
            let z = d.z0();
            let o = d.output();
            d.wire(z, o);
            z
        })
        .collect();
    for u in 0..n {
        for v in u + 1..n {
            if adj.get(u, v) {
                let h = d.h();
                d.wire(verts[u], h);
                d.wire(h, verts[v]);
            }
        }
    }
    Ok(d)
}

/// The same state built through the complete-graph incidence matrix: every
/// vertex pair gets an H-box, labelled -1 on edges and +1 on non-edges.
pub fn graph_state_incidence(adj: &BitMatrix) -> Result<Diagram> {
    let n = check_adjacency(adj)?;
    let k = complete_incidence(n);
    let mut d = Diagram::new();
    let verts: Vec<NodeId> = (0..n)
        .map(|_| {
            let z = d.z0();
            let o = d.output();
            d.wire(z, o);
            z
        })
        .collect();
    for row in 0..k.rows() {
        let members: Vec<usize> = (0..n).filter(|v| k.get(row, *v)).collect();
        let (u, v) = (members[0], members[1]);
        let label = if adj.get(u, v) { -1.0 } else { 1.0 };
        let h = d.h_labeled(Complex64::new(label, 0.0));
        d.wire(verts[u], h);
        d.wire(h, verts[v]);
    }
    Ok(d)
}

// ---------------------------------------------------------------------------
// !-box forms of the variadic rules
// ---------------------------------------------------------------------------

/// The rule families that need dots in their flat form, as template pairs.
/// Instantiating both sides at equal counts gives a semantic equality.
pub fn rule_family_templates(name: &str) -> Result<(BangTemplate, BangTemplate)> {
    match name {
        "zs1" => {
            // two spiders joined by one wire fuse
            let mut l = Diagram::new();
            let s1 = l.z0();
            let s2 = l.z0();
            l.wire(s1, s2);
            let i = l.input();
            let o = l.output();
            l.wire(i, s1);
            l.wire(s2, o);
            let lt = BangTemplate::plain(
                l,
                vec![
                    BangBox::plain("m", []).with_boundary([i]),
                    BangBox::plain("n", []).with_boundary([o]),
                ],
            );

            let mut r = Diagram::new();
            let s = r.z0();
            let i = r.input();
            let o = r.output();
            r.wire(i, s);
            r.wire(s, o);
            let rt = BangTemplate::plain(
                r,
                vec![
                    BangBox::plain("m", []).with_boundary([i]),
                    BangBox::plain("n", []).with_boundary([o]),
                ],
            );
            Ok((lt, rt))
        }
        "hs1" => {
            // one-legged H-boxes on a shared spider fuse, multiplying labels
            let a = Complex64::new(0.5, 0.25);
            let b = Complex64::new(-2.0, 1.0);
            let mut l = Diagram::new();
            let s = l.z0();
            let ha = l.h_labeled(a);
            let hb = l.h_labeled(b);
            l.wire(s, ha);
            l.wire(s, hb);
            let o = l.output();
            l.wire(s, o);
            let lt = BangTemplate::plain(l, vec![BangBox::plain("n", []).with_boundary([o])]);

            let mut r = Diagram::new();
            let s = r.z0();
            let hab = r.h_labeled(a * b);
            r.wire(s, hab);
            let o = r.output();
            r.wire(s, o);
            let rt = BangTemplate::plain(r, vec![BangBox::plain("n", []).with_boundary([o])]);
            Ok((lt, rt))
        }
        "ba1" => {
            // bialgebra: XOR merge then copy = copies then XOR merges
            let mut l = Diagram::new();
            let zx = l.z0();
            let hmid = l.h();
            let zc = l.z0();
            l.wire(zx, hmid);
            l.wire(hmid, zc);
            let i = l.input();
            let hin = l.h();
            l.wire(i, hin);
            l.wire(hin, zx);
            let o = l.output();
            l.wire(zc, o);
            let lt = BangTemplate::plain(
                l,
                vec![
                    BangBox::plain("m", [hin]).with_boundary([i]),
                    BangBox::plain("n", []).with_boundary([o]),
                ],
            );

            let mut r = Diagram::new();
            let zcopy = r.z0();
            let i = r.input();
            r.wire(i, zcopy);
            let xcore = r.z0();
            let hout = r.h();
            r.wire(xcore, hout);
            let o = r.output();
            r.wire(hout, o);
            let rt = BangTemplate {
                base: r,
                boxes: vec![
                    BangBox::plain("m", [zcopy]).with_boundary([i]),
                    BangBox::plain("n", [xcore, hout]).with_boundary([o]),
                ],
                cross_wires: vec![CrossWire {
                    box_a: "m".into(),
                    node_a: zcopy,
                    box_b: "n".into(),
                    node_b: xcore,
                    kind: CrossKind::Hadamard,
                    incidence: None,
                }],
            };
            Ok((lt, rt))
        }
        "ba2" => {
            // an X state is copied by the spider
            let mut l = Diagram::new();
            let zx = l.z0();
            let hx = l.h();
            let zc = l.z0();
            l.wire(zx, hx);
            l.wire(hx, zc);
            let o = l.output();
            l.wire(zc, o);
            let lt = BangTemplate::plain(l, vec![BangBox::plain("n", []).with_boundary([o])]);

            let mut r = Diagram::new();
            let zx = r.z0();
            let hx = r.h();
            r.wire(zx, hx);
            let o = r.output();
            r.wire(hx, o);
            let rt = BangTemplate::plain(r, vec![BangBox::plain("n", [zx, hx]).with_boundary([o])]);
            Ok((lt, rt))
        }
        other => Err(Error::UnknownRule(other.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalable::{arrow_diagram, strip, VERIFY_LIMIT};
    use crate::semantics::{equal_semantics_with_limit, semantics_with_limit};

    const TOL: f64 = 1e-9;

    fn counts(pairs: &[(&str, usize)]) -> BTreeMap<String, usize> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    /// The introductory family: a spider with a boxed H-box leg.
    fn spider_with_boxed_leg() -> BangTemplate {
        let mut d = Diagram::new();
        let z = d.z0();
        let i = d.input();
        d.wire(i, z);
        let h = d.h();
        d.wire(z, h);
        let o = d.output();
        d.wire(h, o);
        BangTemplate::plain(d, vec![BangBox::plain("k", [h]).with_boundary([o])])
    }

    fn family_member(k: usize) -> Diagram {
        let mut d = Diagram::new();
        let z = d.z0();
        let i = d.input();
        d.wire(i, z);
        for _ in 0..k {
            let h = d.h();
            d.wire(z, h);
            let o = d.output();
            d.wire(h, o);
        }
        d
    }

    #[test]
    fn def_bang_family_members() {
        let t = spider_with_boxed_leg();
        for k in 0..=3usize {
            let inst = instantiate(&t, &counts(&[("k", k)])).unwrap();
            let expect = family_member(k);
            let eq = equal_semantics_with_limit(&inst, &expect, TOL, VERIFY_LIMIT).unwrap();
            assert!(eq.equal, "k = {k}: differs by {}", eq.max_diff);
        }
    }

    #[test]
    fn count_one_is_the_base_diagram() {
        let t = spider_with_boxed_leg();
        let inst = instantiate(&t, &counts(&[("k", 1)])).unwrap();
        let eq = equal_semantics_with_limit(&inst, &t.base, TOL, VERIFY_LIMIT).unwrap();
        assert!(eq.equal);
    }

    #[test]
    fn overlap_gives_complete_bipartite() {
        let mut d = Diagram::new();
        let za = d.z0();
        let ia = d.input();
        d.wire(ia, za);
        let zb = d.z0();
        let ob = d.output();
        d.wire(zb, ob);
        d.wire(za, zb);
        let t = BangTemplate::plain(
            d,
            vec![
                BangBox::plain("a", [za]).with_boundary([ia]),
                BangBox::plain("b", [zb]).with_boundary([ob]),
            ],
        );
        let inst = instantiate(&t, &counts(&[("a", 2), ("b", 2)])).unwrap();
        // must equal the K_{2,2} pattern of copy spiders
        let mut e = Diagram::new();
        let z1 = e.z0();
        let z2 = e.z0();
        let w1 = e.z0();
        let w2 = e.z0();
        for z in [z1, z2] {
            let ib = e.input();
            e.wire(ib, z);
        }
        for w in [w1, w2] {
            let ob = e.output();
            e.wire(w, ob);
        }
        for z in [z1, z2] {
            for w in [w1, w2] {
                e.wire(z, w);
            }
        }
        let eq = equal_semantics_with_limit(&inst, &e, TOL, VERIFY_LIMIT).unwrap();
        assert!(eq.equal, "differs by {}", eq.max_diff);
    }

    #[test]
    fn missing_count_is_an_error() {
        let t = spider_with_boxed_leg();
        assert!(matches!(
            instantiate(&t, &counts(&[])),
            Err(Error::MissingCount(_))
        ));
    }

    #[test]
    fn dictionary_round_trip_small() {
        for kind in [ArrowKind::Red, ArrowKind::Yellow] {
            for a in BitMatrix::enumerate_all(2, 2) {
                let t = arrow_to_bang(kind, &a);
                let (k2, a2) = bang_to_arrow(&t).unwrap();
                assert_eq!(k2, kind);
                assert_eq!(a2, a);
            }
        }
    }

    #[test]
    fn dictionary_instantiation_matches_strip() {
        let a = BitMatrix::from_rows(&[&[1, 1], &[0, 1]]);
        for kind in [ArrowKind::Red, ArrowKind::Yellow] {
            let t = arrow_to_bang(kind, &a);
            let inst = instantiate(&t, &counts(&[("cols", a.cols()), ("rows", a.rows())])).unwrap();
            let stripped = strip(&arrow_diagram(kind, &a)).unwrap();
            let eq = equal_semantics_with_limit(&inst, &stripped, TOL, VERIFY_LIMIT).unwrap();
            assert!(eq.equal, "{kind:?} differs by {}", eq.max_diff);
        }
    }

    #[test]
    fn full_ones_arrow_is_a_plain_overlap() {
        let t = arrow_to_bang(ArrowKind::Red, &BitMatrix::ones(2, 3));
        assert!(t.cross_wires[0].incidence.is_none());
        let (k, a) = bang_to_arrow(&t).unwrap();
        assert_eq!(k, ArrowKind::Red);
        assert_eq!(a, BitMatrix::ones(2, 3));
    }

    #[test]
    fn zero_count_matches_zero_width_arrow() {
        // a full-ones template scales to any counts, including zero
        let mut t = arrow_to_bang(ArrowKind::Red, &BitMatrix::ones(2, 1));
        for b in &mut t.boxes {
            b.index_set = None;
        }
        let inst = instantiate(&t, &counts(&[("cols", 0), ("rows", 2)])).unwrap();
        let stripped = strip(&arrow_diagram(ArrowKind::Red, &BitMatrix::ones(2, 0))).unwrap();
        let eq = equal_semantics_with_limit(&inst, &stripped, TOL, VERIFY_LIMIT).unwrap();
        assert!(eq.equal, "differs by {}", eq.max_diff);
    }

    #[test]
    fn non_dictionary_template_fails_with_diagnostic() {
        // a triangle of three boxes is outside the dictionary
        let mut d = Diagram::new();
        let z1 = d.z0();
        let z2 = d.z0();
        let z3 = d.z0();
        d.wire(z1, z2);
        d.wire(z2, z3);
        d.wire(z3, z1);
        let t = BangTemplate::plain(
            d,
            vec![
                BangBox::plain("a", [z1]),
                BangBox::plain("b", [z2]),
                BangBox::plain("c", [z3]),
            ],
        );
        match bang_to_arrow(&t) {
            Err(Error::Dictionary(msg)) => assert!(msg.contains("two boxes")),
            other => panic!("expected dictionary failure, got {other:?}"),
        }
    }

    #[test]
    fn graph_state_routes_agree() {
        // empty graph on 2 vertices: 2^{-1/2} sum over all basis states
        let adj = BitMatrix::zeros(2, 2);
        let t = semantics_with_limit(&graph_state(&adj).unwrap(), VERIFY_LIMIT).unwrap();
        let c = 2f64.powf(-0.5);
        for x in 0..4usize {
            assert!((t.get(x, 0).re - c).abs() < TOL);
        }

        // single edge: CZ |++> pattern, -1 on |11>
        let adj = BitMatrix::from_rows(&[&[0, 1], &[1, 0]]);
        let t = semantics_with_limit(&graph_state(&adj).unwrap(), VERIFY_LIMIT).unwrap();
        for x in 0..4usize {
            let sign = if x == 3 { -1.0 } else { 1.0 };
            assert!((t.get(x, 0).re - sign * c).abs() < TOL);
        }

        // both construction routes agree on several graphs, including K3
        for adj in [
            BitMatrix::zeros(2, 2),
            BitMatrix::from_rows(&[&[0, 1], &[1, 0]]),
            BitMatrix::from_rows(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]),
            BitMatrix::from_rows(&[&[0, 1, 0], &[1, 0, 1], &[0, 1, 0]]),
        ] {
            let direct = graph_state(&adj).unwrap();
            let incidence = graph_state_incidence(&adj).unwrap();
            let eq = equal_semantics_with_limit(&direct, &incidence, TOL, VERIFY_LIMIT).unwrap();
            assert!(eq.equal, "{adj:?} differs by {}", eq.max_diff);
        }
    }

    #[test]
    fn triangle_incidence_matrix_shape() {
        let k3 = complete_incidence(3);
        assert_eq!((k3.rows(), k3.cols()), (3, 3));
        for r in 0..3 {
            assert_eq!(k3.row_weight(r), 2);
        }
    }

    #[test]
    fn non_symmetric_adjacency_rejected() {
        let adj = BitMatrix::from_rows(&[&[0, 1], &[0, 0]]);
        assert!(graph_state(&adj).is_err());
    }

    #[test]
    fn rule_families_hold_for_small_counts() {
        for name in ["zs1", "hs1", "ba1", "ba2"] {
            let (lt, rt) = rule_family_templates(name).unwrap();
            let box_ids: Vec<String> = lt.boxes.iter().map(|b| b.id.clone()).collect();
            let assignments: Vec<Vec<usize>> = match box_ids.len() {
                1 => (0..=3).map(|a| vec![a]).collect(),
                2 => (0..=3)
                    .flat_map(|a| (0..=3).map(move |b| vec![a, b]))
                    .collect(),
                _ => unreachable!(),
            };
            for assign in assignments {
                let cs: BTreeMap<String, usize> = box_ids
                    .iter()
                    .cloned()
                    .zip(assign.iter().copied())
                    .collect();
                let lhs = instantiate(&lt, &cs).unwrap();
                let rhs = instantiate(&rt, &cs).unwrap();
                let eq = equal_semantics_with_limit(&lhs, &rhs, TOL, VERIFY_LIMIT).unwrap();
                assert!(eq.equal, "{name} at {assign:?} differs by {}", eq.max_diff);
            }
        }
    }

    #[test]
    fn template_json_round_trip() {
        let a = BitMatrix::from_rows(&[&[1, 0], &[1, 1]]);
        let t = arrow_to_bang(ArrowKind::Red, &a);
        let j = t.to_json().unwrap();
        let back = BangTemplate::from_json(&j).unwrap();
        assert_eq!(j, back.to_json().unwrap());
        let (k, a2) = bang_to_arrow(&back).unwrap();
        assert_eq!(k, ArrowKind::Red);
        assert_eq!(a2, a);
    }

    #[test]
    fn nested_boxes_expand_outermost_first() {
        // inner box strictly inside an outer box: the inner content
        // replicates once per outer copy
        let mut d = Diagram::new();
        let s = d.z0();
        let o = d.output();
        d.wire(s, o);
        let inner_tap = d.h_labeled(Complex64::new(0.0, 1.0));
        d.wire(s, inner_tap);
        let outer_tap = d.h_labeled(Complex64::new(-1.0, 0.0));
        d.wire(s, outer_tap);
        let t = BangTemplate::plain(
            d,
            vec![
                BangBox::plain("outer", [inner_tap, outer_tap]),
                BangBox::plain("inner", [inner_tap]),
            ],
        );
        let inst = instantiate(&t, &counts(&[("outer", 2), ("inner", 3)])).unwrap();
        // 2 outer copies, each holding one -1 tap and 3 i taps
        let mut e = Diagram::new();
        let s = e.z0();
        let o = e.output();
        e.wire(s, o);
        for _ in 0..2 {
            let m = e.h_labeled(Complex64::new(-1.0, 0.0));
            e.wire(s, m);
            for _ in 0..3 {
                let tap = e.h_labeled(Complex64::new(0.0, 1.0));
                e.wire(s, tap);
            }
        }
        let eq = equal_semantics_with_limit(&inst, &e, TOL, VERIFY_LIMIT).unwrap();
        assert!(eq.equal, "differs by {}", eq.max_diff);
    }

    #[test]
    fn annotated_lookup_parameters() {
        // trapeze: boxed one-legged H-boxes with per-copy labels on a spider
        let mut d = Diagram::new();
        let z = d.z0();
        let o = d.output();
        d.wire(z, o);
        let h = d.h();
        d.wire(z, h);
        let labels = vec![
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.5, 0.5),
        ];
        let t = BangTemplate::plain(
            d,
            vec![BangBox::plain("t", [h])
                .annotated(3)
                .with_param(h, ParamExpr::Lookup(labels.clone()))],
        );
        let inst = instantiate(&t, &counts(&[("t", 3)])).unwrap();

        let mut e = Diagram::new();
        let z = e.z0();
        let o = e.output();
        e.wire(z, o);
        for l in &labels {
            let h = e.h_labeled(*l);
            e.wire(z, h);
        }
        let eq = equal_semantics_with_limit(&inst, &e, TOL, VERIFY_LIMIT).unwrap();
        assert!(eq.equal, "differs by {}", eq.max_diff);
    }
}
