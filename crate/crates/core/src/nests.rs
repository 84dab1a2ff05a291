//! Phase gadgets, generalized hyper-edges, diagrammatic transforms, spider
//! nest identities and their exact prover, identity mining, and the Fourier
//! hyper pivot.
//!
//! The two gadget families are diagonal maps on `n` wires:
//! a phase gadget scales by `lambda^{s.x}` (parity of the support bits) and
//! a generalized hyper-edge by `lambda^{delta_{s <= x}}` (all support bits
//! set). Both constructions are exactly scalar-free under the well-tempered
//! convention, so a nest of gadgets realises precisely the pointwise product
//! of its terms. A spider-nest identity is a nest equal to the identity up
//! to a scalar; the prover decides this by exact rational arithmetic on the
//! exponents (Kravchuk inversion for weight-symmetric nests, full
//! enumeration otherwise), entirely independently of the tensor oracle.

use crate::bitmatrix::BitMatrix;
use crate::diagram::{Diagram, NodeId};
use crate::error::{Error, Result};
use crate::phase::PhaseElement;
use crate::scalable::{ScalableDiagram, ScalableGenerator};
use crate::transforms::{
    binomial, fourier, kravchuk, mobius, mobius_from_fourier, vacuum_scalar, PhaseFunction,
};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GadgetKind {
    PhaseGadget,
    HyperEdge,
}

/// One diagonal term of a nest: kind, support mask (bit `i` = wire `i`) and
/// parameter.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GadgetTerm {
    pub kind: GadgetKind,
    pub support: usize,
    pub lambda: PhaseElement,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NestSpec {
    pub n: usize,
    pub terms: Vec<GadgetTerm>,
    pub claimed_scalar: PhaseElement,
}

// ---------------------------------------------------------------------------
// Gadget diagrams
// ---------------------------------------------------------------------------

fn wire_spiders(d: &mut Diagram, n: usize) -> Vec<NodeId> {
    (0..n)
        .map(|_| {
            let z = d.z0();
            let i = d.input();
            let o = d.output();
            d.wire(i, z);
            d.wire(z, o);
            z
        })
        .collect()
}

fn attach_phase_gadget(d: &mut Diagram, wires: &[NodeId], support: usize, lambda: Complex64) {
    let core = d.z0();
    for (i, z) in wires.iter().enumerate() {
        if support >> i & 1 == 1 {
            let h = d.h();
            d.wire(*z, h);
            d.wire(h, core);
        }
    }
    let h = d.h();
    let tap = d.z0();
    d.wire(core, h);
    d.wire(h, tap);
    let label = d.h_labeled(lambda);
    d.wire(tap, label);
}

fn attach_hyper_edge(d: &mut Diagram, wires: &[NodeId], support: usize, lambda: Complex64) {
    let label = d.h_labeled(lambda);
    for (i, z) in wires.iter().enumerate() {
        if support >> i & 1 == 1 {
            d.wire(*z, label);
        }
    }
}

/// The phase gadget `|x> -> lambda^{s.x} |x>` on `n` wires, exactly (the
/// construction carries no residual scalar).
pub fn phase_gadget(n: usize, support: usize, lambda: Complex64) -> Diagram {
    let mut d = Diagram::new();
    let wires = wire_spiders(&mut d, n);
    attach_phase_gadget(&mut d, &wires, support, lambda);
    d
}

/// The generalized hyper-edge `|x> -> lambda^{delta_{s <= x}} |x>` on `n`
/// wires, exactly. An empty support is a global scalar `lambda`.
pub fn hyper_edge(n: usize, support: usize, lambda: Complex64) -> Diagram {
    let mut d = Diagram::new();
    let wires = wire_spiders(&mut d, n);
    attach_hyper_edge(&mut d, &wires, support, lambda);
    d
}

/// A whole nest as one diagram: shared wire spiders, one attachment per
/// term.
pub fn nest_diagram(spec: &NestSpec) -> Diagram {
    let mut d = Diagram::new();
    let wires = wire_spiders(&mut d, spec.n);
    for term in &spec.terms {
        match term.kind {
            GadgetKind::PhaseGadget => {
                attach_phase_gadget(&mut d, &wires, term.support, term.lambda.value())
            }
            GadgetKind::HyperEdge => {
                attach_hyper_edge(&mut d, &wires, term.support, term.lambda.value())
            }
        }
    }
    d
}

/// Exact diagonal function of a nest, at the exponent level when every
/// parameter is exact.
pub fn nest_function(spec: &NestSpec) -> PhaseFunction {
    let n = spec.n;
    let values = (0..1usize << n)
        .map(|x| {
            let mut acc = PhaseElement::one();
            for term in &spec.terms {
                let fires = match term.kind {
                    GadgetKind::PhaseGadget => (term.support & x).count_ones() % 2 == 1,
                    GadgetKind::HyperEdge => term.support & !x == 0,
                };
                if fires {
                    acc = acc.mul(&term.lambda);
                }
            }
            acc
        })
        .collect();
    PhaseFunction::new(n, values).expect("sized")
}

// ---------------------------------------------------------------------------
// The subset incidence matrix
// ---------------------------------------------------------------------------

/// `2^n x n` matrix with one row per subset (binary counting, LSB = wire 0)
/// and entry 1 iff the wire lies in the subset.
pub fn delta_matrix(n: usize) -> Result<BitMatrix> {
    if n == 0 || n > 20 {
        return Err(Error::Range(format!(
            "delta matrix needs 1 <= n <= 20, got {n}"
        )));
    }
    let mut m = BitMatrix::zeros(1 << n, n);
    for s in 0..1usize << n {
        for i in 0..n {
            if s >> i & 1 == 1 {
                m.set(s, i, true);
            }
        }
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// Diagrammatic transforms
// ---------------------------------------------------------------------------

/// Realise `diag(f)` as a nest of phase gadgets with one gadget per row of
/// the subset incidence matrix, the Fourier coefficients in the gadget
/// labels, and the vacuum scalar as an explicit zero-legged H-box (the
/// empty-support gadget itself contributes nothing).
pub fn fourier_diagram(f: &PhaseFunction) -> Diagram {
    let n = f.n();
    let fh = fourier(f);
    if n == 0 {
        return Diagram::scalar_diagram(f.value(0).value());
    }
    let delta = delta_matrix(n).expect("capacity checked by the caller");
    let mut d = Diagram::new();
    let wires = wire_spiders(&mut d, n);
    for row in 1..delta.rows() {
        attach_phase_gadget(&mut d, &wires, delta.row_mask(row), fh.value(row).value());
    }
    let vac = d.h_labeled(vacuum_scalar(&fh).value());
    let _ = vac;
    d
}

/// Realise `diag(f)` as a nest of hyper-edges with one box per row of the
/// subset incidence matrix and the Möbius coefficients in the box labels;
/// the empty-support box carries the vacuum.
pub fn mobius_diagram(f: &PhaseFunction) -> Diagram {
    let n = f.n();
    let ft = mobius(f);
    if n == 0 {
        return Diagram::scalar_diagram(f.value(0).value());
    }
    let delta = delta_matrix(n).expect("capacity checked by the caller");
    let mut d = Diagram::new();
    let wires = wire_spiders(&mut d, n);
    for row in 1..delta.rows() {
        attach_hyper_edge(&mut d, &wires, delta.row_mask(row), ft.value(row).value());
    }
    let vac = d.h_labeled(ft.value(0).value());
    let _ = vac;
    d
}

// ---------------------------------------------------------------------------
// The two stock identities
// ---------------------------------------------------------------------------

/// Decomposition of the full phase gadget at `omega = e^{i pi / 4}` into
/// hyper-edges: `omega` on singles, `-i` on pairs, `-1` on triples, nothing
/// above. Returned as an identity nest: the inverted gadget times the
/// decomposition.
pub fn mobius_gadget_identity(n: usize) -> Result<NestSpec> {
    if n == 0 {
        return Err(Error::Range("the gadget needs at least one wire".into()));
    }
    let full = (1usize << n) - 1;
    let mut terms = vec![GadgetTerm {
        kind: GadgetKind::PhaseGadget,
        support: full,
        lambda: PhaseElement::omega().inverse(),
    }];
    for s in 1..=full {
        let (kind, lambda) = match s.count_ones() {
            1 => (GadgetKind::HyperEdge, PhaseElement::omega()),
            2 => (GadgetKind::HyperEdge, PhaseElement::minus_i()),
            3 => (GadgetKind::HyperEdge, PhaseElement::minus_one()),
            _ => continue,
        };
        terms.push(GadgetTerm {
            kind,
            support: s,
            lambda,
        });
    }
    Ok(NestSpec {
        n,
        terms,
        claimed_scalar: PhaseElement::one(),
    })
}

/// The same content as a two-sided equation: the full `omega` gadget versus
/// its 3-local hyper-edge decomposition.
pub fn mobius_gadget_sides(n: usize) -> Result<(Diagram, Diagram)> {
    if n == 0 {
        return Err(Error::Range("the gadget needs at least one wire".into()));
    }
    let full = (1usize << n) - 1;
    let omega = PhaseElement::omega();
    let lhs = phase_gadget(n, full, omega.value());
    let mut rhs = Diagram::new();
    let wires = wire_spiders(&mut rhs, n);
    for s in 1..=full {
        let lambda = match s.count_ones() {
            1 => omega.value(),
            2 => PhaseElement::minus_i().value(),
            3 => PhaseElement::minus_one().value(),
            _ => continue,
        };
        attach_hyper_edge(&mut rhs, &wires, s, lambda);
    }
    Ok((lhs, rhs))
}

/// The symmetric phase-gadget nest with Fourier-side coefficients
/// `Shat(1) = e^{i pi (n-2)(n-3)/8}`, `Shat(2) = e^{-i pi (n-3)/4}`,
/// `Shat(3) = e^{i pi / 4}`, `Shat(n) = e^{-i pi / 4}` and 1 elsewhere;
/// an identity for every `n >= 4`.
///
/// These are twice the exponents of the usual half-angle table for this
/// nest. At half angles the inverted exponent is constant only modulo 1,
/// not modulo 2 (its residue jumps by exactly 1 at weight 4), so the
/// half-angle assignment is not an identity of diagrams; doubling every
/// exponent is, and mining over the pi/16 lattice confirms the doubled
/// family is the only one of this shape.
pub fn tof_nest_identity(n: usize) -> Result<NestSpec> {
    if n < 4 {
        return Err(Error::Range(format!("nest needs n >= 4, got {n}")));
    }
    let shat = tof_shat_theta(n);
    let mut terms = Vec::new();
    for w in [1usize, 2, 3, n] {
        let theta = &shat[w];
        if theta.is_zero() {
            continue;
        }
        let lambda = PhaseElement::from_rational_theta(theta.clone());
        for support in weight_masks(n, w) {
            terms.push(GadgetTerm {
                kind: GadgetKind::PhaseGadget,
                support,
                lambda: lambda.clone(),
            });
        }
    }
    Ok(NestSpec {
        n,
        terms,
        claimed_scalar: PhaseElement::one(),
    })
}

/// All masks over `n` wires with exactly `w` bits set, ascending.
fn weight_masks(n: usize, w: usize) -> Vec<usize> {
    if w > n {
        return Vec::new();
    }
    if w == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    // Gosper-style successor over fixed popcount
    let mut s: usize = (1 << w) - 1;
    let limit = 1usize << n;
    while s < limit {
        out.push(s);
        let c = s & s.wrapping_neg();
        let r = s + c;
        if r >= limit {
            break;
        }
        s = (((r ^ s) >> 2) / c) | r;
    }
    out
}

/// Exponents of the symmetric Fourier assignment above, as rationals.
fn tof_shat_theta(n: usize) -> Vec<BigRational> {
    let n_i = n as i64;
    let mut shat = vec![BigRational::zero(); n + 1];
    shat[1] = BigRational::new(BigInt::from((n_i - 2) * (n_i - 3)), BigInt::from(8));
    shat[2] = BigRational::new(BigInt::from(-(n_i - 3)), BigInt::from(4));
    shat[3] = BigRational::new(BigInt::one(), BigInt::from(4));
    let extra = BigRational::new(BigInt::from(-1), BigInt::from(4));
    shat[n] += extra;
    shat
}

// ---------------------------------------------------------------------------
// The exact nest prover
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NestReport {
    pub identity: bool,
    /// weight (symmetric route) or mask (general route) of the first point
    /// where the inverted function deviates from its vacuum value
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<usize>,
    pub scalar: PhaseElement,
    pub term_count: usize,
    /// true when the weight-symmetric Kravchuk route decided the verdict
    pub symmetric_route: bool,
    /// false when any parameter left the exact tier
    pub exact: bool,
}

/// Group the terms by (kind, weight) and check each class is complete with a
/// uniform exact parameter; returns per-weight exponents if so.
fn symmetric_profile(spec: &NestSpec) -> Option<(Vec<BigRational>, Vec<BigRational>)> {
    let n = spec.n;
    let mut gadget: Vec<Option<BigRational>> = vec![None; n + 1];
    let mut edge: Vec<Option<BigRational>> = vec![None; n + 1];
    let mut counts = vec![(0usize, 0usize); n + 1];
    for term in &spec.terms {
        let theta = term.lambda.raw_theta()?.clone();
        let w = term.support.count_ones() as usize;
        let (slot, count) = match term.kind {
            GadgetKind::PhaseGadget => (&mut gadget[w], &mut counts[w].0),
            GadgetKind::HyperEdge => (&mut edge[w], &mut counts[w].1),
        };
        match slot {
            None => *slot = Some(theta),
            Some(existing) => {
                // uniform parameters per class, compared modulo 2
                if !PhaseElement::from_unreduced_theta(existing.clone())
                    .eq_value(&PhaseElement::from_unreduced_theta(theta), 0.0)
                {
                    return None;
                }
            }
        }
        *count += 1;
    }
    for w in 0..=n {
        let class_size = binomial(n as i64, w as i64);
        let full: BigInt = class_size;
        if gadget[w].is_some() && BigInt::from(counts[w].0) != full {
            return None;
        }
        if edge[w].is_some() && BigInt::from(counts[w].1) != full {
            return None;
        }
    }
    Some((
        gadget
            .into_iter()
            .map(|v| v.unwrap_or_else(BigRational::zero))
            .collect(),
        edge.into_iter()
            .map(|v| v.unwrap_or_else(BigRational::zero))
            .collect(),
    ))
}

/// Exponent of the induced symmetric function at Hamming weight `m`:
/// complete gadget classes contribute through the odd-overlap count
/// `(C(n,w) - K^n_w(m)) / 2` and hyper-edge classes through `C(m,w)`.
fn symmetric_exponent(
    n: usize,
    gadget_theta: &[BigRational],
    edge_theta: &[BigRational],
    m: usize,
) -> BigRational {
    let mut acc = BigRational::zero();
    for w in 0..=n {
        if !gadget_theta[w].is_zero() {
            let odd = (binomial(n as i64, w as i64) - kravchuk(n, w, m).expect("range"))
                / BigInt::from(2);
            acc += &gadget_theta[w] * BigRational::from_integer(odd);
        }
        if !edge_theta[w].is_zero() {
            acc += &edge_theta[w] * BigRational::from_integer(binomial(m as i64, w as i64));
        }
    }
    acc
}

/// Decide whether a nest is an identity (constant diagonal), by exact
/// rational arithmetic. Weight-symmetric nests go through the Kravchuk
/// route, which scales to large `n`; general exact nests are enumerated over
/// all inputs; nests with approximate parameters are evaluated numerically.
pub fn verify_nest(spec: &NestSpec) -> Result<NestReport> {
    let n = spec.n;
    let term_count = spec.terms.len();
    let exact = spec.terms.iter().all(|t| t.lambda.is_exact());

    if exact {
        if let Some((gadget_theta, edge_theta)) = symmetric_profile(spec) {
            let base = symmetric_exponent(n, &gadget_theta, &edge_theta, 0);
            let scalar = PhaseElement::from_unreduced_theta(base.clone());
            for m in 1..=n {
                let theta = symmetric_exponent(n, &gadget_theta, &edge_theta, m);
                let diff = PhaseElement::from_unreduced_theta(theta - &base);
                if !diff.is_one(0.0) {
                    return Ok(NestReport {
                        identity: false,
                        witness: Some(m),
                        scalar,
                        term_count,
                        symmetric_route: true,
                        exact,
                    });
                }
            }
            return Ok(NestReport {
                identity: true,
                witness: None,
                scalar,
                term_count,
                symmetric_route: true,
                exact,
            });
        }
    }

    if n > 22 {
        return Err(Error::Capacity {
            wires: n,
            limit: 22,
        });
    }
    let f = nest_function(spec);
    let base = f.value(0).clone();
    for x in 1..1usize << n {
        if !f.value(x).eq_value(&base, 1e-9) {
            return Ok(NestReport {
                identity: false,
                witness: Some(x),
                scalar: base,
                term_count,
                symmetric_route: false,
                exact,
            });
        }
    }
    Ok(NestReport {
        identity: true,
        witness: None,
        scalar: base,
        term_count,
        symmetric_route: false,
        exact,
    })
}

/// The half-angle closed form `S_half(m) = m^3/12 - 3m^2/8 + 5m/12 -
/// n^3/96 + n^2/16 - 11n/96 + (-1)^m/16`. The prover's inverted exponent
/// for the stock nest is exactly twice this, compared modulo 2.
pub fn tof_closed_form_theta(n: usize, m: usize) -> BigRational {
    let m = BigInt::from(m);
    let n = BigInt::from(n);
    let sign = if (&m % BigInt::from(2)).is_zero() {
        BigInt::one()
    } else {
        BigInt::from(-1)
    };
    BigRational::new(&m * &m * &m, BigInt::from(12))
        - BigRational::new(BigInt::from(3) * &m * &m, BigInt::from(8))
        + BigRational::new(BigInt::from(5) * &m, BigInt::from(12))
        - BigRational::new(&n * &n * &n, BigInt::from(96))
        + BigRational::new(&n * &n, BigInt::from(16))
        - BigRational::new(BigInt::from(11) * &n, BigInt::from(96))
        + BigRational::new(sign, BigInt::from(16))
}

/// The m-dependent half-angle part `E(m) = m^3/12 - 3m^2/8 + 5m/12 +
/// (-1)^m/16`. `E(24k + l) - E(l)` is an even integer, and every residue
/// satisfies `E(l) = 1/16` modulo 1; the doubled exponent `2 E(l)` is
/// therefore `1/8` modulo 2 for all `l`, which is the constancy the nest
/// needs.
pub fn residue_exponent(m: usize) -> BigRational {
    let m = BigInt::from(m);
    let sign = if (&m % BigInt::from(2)).is_zero() {
        BigInt::one()
    } else {
        BigInt::from(-1)
    };
    BigRational::new(&m * &m * &m, BigInt::from(12))
        - BigRational::new(BigInt::from(3) * &m * &m, BigInt::from(8))
        + BigRational::new(BigInt::from(5) * &m, BigInt::from(12))
        + BigRational::new(sign, BigInt::from(16))
}

/// The prover's inverted exponent for the stock nest at weight `m` (exact).
pub fn tof_inverted_theta(n: usize, m: usize) -> BigRational {
    let shat = tof_shat_theta(n);
    let mut acc = BigRational::zero();
    for (k, theta) in shat.iter().enumerate() {
        if !theta.is_zero() {
            let kv = kravchuk(n, k, m).expect("range");
            acc += theta
                * BigRational::from_integer(kv)
                * BigRational::new(BigInt::from(-1), BigInt::from(2));
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Mining
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct MiningLattice {
    /// exponents range over `j / denominator` for `j` in `[0, 2 *
    /// denominator)`, i.e. phases in steps of `pi / denominator`
    pub denominator: u32,
    /// weights whose phase-gadget coefficient may be nontrivial
    pub weights: Vec<usize>,
    /// weights whose hyper-edge coefficient may be nontrivial
    pub edge_weights: Vec<usize>,
    /// cap on the number of enumerated assignments
    pub cap: u64,
}

impl MiningLattice {
    pub fn gadgets_only(denominator: u32, weights: Vec<usize>, cap: u64) -> Self {
        MiningLattice {
            denominator,
            weights,
            edge_weights: Vec::new(),
            cap,
        }
    }
}

/// Enumerate weight-symmetric assignments over the lattice (phase-gadget
/// slots and optionally hyper-edge slots) and return those whose exact
/// inversion is constant modulo 2. Enumeration is lexicographic over the
/// slots, so the order is deterministic. A gadget class at weight `w`
/// contributes through the odd-overlap count `(C(n,w) - K^n_w(m))/2`, a
/// hyper-edge class through `C(m,w)`.
pub fn mine_nests(n: usize, lattice: &MiningLattice) -> Result<Vec<NestSpec>> {
    if n < 1 {
        return Err(Error::Range("mining needs at least one wire".into()));
    }
    for &w in lattice.weights.iter().chain(&lattice.edge_weights) {
        if w < 1 || w > n {
            return Err(Error::Range(format!("weight {w} out of range for n = {n}")));
        }
    }
    let den = lattice.denominator as i128;
    let slots = (lattice.weights.len() + lattice.edge_weights.len()) as u32;
    let options = 2 * den as u64;
    let total = (options as u128).pow(slots);
    if total > lattice.cap as u128 {
        return Err(Error::SearchSpace {
            candidates: total.min(u64::MAX as u128) as u64,
            cap: lattice.cap,
        });
    }

    // integer arithmetic on exponents scaled by 2 * den: the difference of
    // inverted exponents must vanish modulo 4 * den. Gadget slots use
    // K_w(0) - K_w(m) (the odd-overlap difference times two), edge slots use
    // 2 (C(m,w) - C(0,w)).
    let coeff: Vec<Vec<i128>> = lattice
        .weights
        .iter()
        .map(|&w| {
            (0..=n)
                .map(|m| {
                    let k0 = i128::try_from(kravchuk(n, w, 0).expect("range")).expect("size");
                    let km = i128::try_from(kravchuk(n, w, m).expect("range")).expect("size");
                    k0 - km
                })
                .collect::<Vec<i128>>()
        })
        .chain(lattice.edge_weights.iter().map(|&w| {
            (0..=n)
                .map(|m| {
                    let c = i128::try_from(binomial(m as i64, w as i64)).expect("size");
                    2 * c
                })
                .collect::<Vec<i128>>()
        }))
        .collect();
    let modulus = 4 * den;

    let mut found = Vec::new();
    let mut assignment = vec![0i128; slots as usize];
    'outer: for code in 0..total {
        let mut c = code;
        for slot in assignment.iter_mut() {
            *slot = (c % options as u128) as i128;
            c /= options as u128;
        }
        for m in 1..=n {
            let acc: i128 = assignment
                .iter()
                .zip(&coeff)
                .map(|(j, col)| j * col[m])
                .sum();
            if acc.rem_euclid(modulus) != 0 {
                continue 'outer;
            }
        }
        let mut terms = Vec::new();
        let kinds = lattice
            .weights
            .iter()
            .map(|w| (GadgetKind::PhaseGadget, *w))
            .chain(
                lattice
                    .edge_weights
                    .iter()
                    .map(|w| (GadgetKind::HyperEdge, *w)),
            );
        for (slot, (kind, w)) in kinds.enumerate() {
            let j = assignment[slot];
            if j == 0 {
                continue;
            }
            let lambda = PhaseElement::from_theta(j as i64, den as i64);
            for s in 0..1usize << n {
                if s.count_ones() as usize == w {
                    terms.push(GadgetTerm {
                        kind,
                        support: s,
                        lambda: lambda.clone(),
                    });
                }
            }
        }
        let spec = NestSpec {
            n,
            terms,
            claimed_scalar: PhaseElement::one(),
        };
        debug_assert!(verify_nest(&spec).map(|r| r.identity).unwrap_or(false));
        found.push(spec);
    }
    Ok(found)
}

// ---------------------------------------------------------------------------
// Fourier hyper pivot
// ---------------------------------------------------------------------------

/// The grid Fourier coefficients: `Lambda(t) = lambda_i` when `t` is the
/// column word of `i` (bits `(j, i)` for all `j`), else 1.
fn grid_lambda(n: usize, m: usize, lambda: &[PhaseElement]) -> PhaseFunction {
    let nm = n * m;
    let mut values = vec![PhaseElement::one(); 1 << nm];
    for (i, l) in lambda.iter().enumerate() {
        let mut t = 0usize;
        for j in 0..m {
            t |= 1 << (j * n + i);
        }
        values[t] = l.clone();
    }
    PhaseFunction::new(nm, values).expect("sized")
}

/// The hyper-edge coefficients `mu_s` of the pivot, computed from the
/// appendix product `mu_s = prod_{t >= s} Lambda(t)^{(-2)^{|s|-1}}` under
/// the canonical branch; `mu_empty = prod_i lambda_i^{-1/2}`.
pub fn fhp_mu(n: usize, m: usize, lambda: &[PhaseElement]) -> PhaseFunction {
    mobius_from_fourier(&grid_lambda(n, m, lambda))
}

/// Both sides of the Fourier hyper pivot on `n + m` wires: a pair of
/// internal spiders joined by a Hadamard box, one carrying
/// `lambda_i`-labelled edges to the first `n` wires and the other plain
/// Hadamard edges to the last `m`, versus the hyper-edge nest with the
/// Möbius coefficients `mu_s` over the `n x m` grid.
pub fn fourier_hyper_pivot(
    n: usize,
    m: usize,
    lambda: &[PhaseElement],
) -> Result<(Diagram, Diagram)> {
    if n < 1 || m < 1 {
        return Err(Error::Range("pivot needs n, m >= 1".into()));
    }
    if lambda.len() != n {
        return Err(Error::Range(format!(
            "expected {n} lambdas, got {}",
            lambda.len()
        )));
    }
    if n * m > 16 {
        return Err(Error::Capacity {
            wires: n * m,
            limit: 16,
        });
    }

    // left side: u and w eliminated by the pivot
    let mut lhs = Diagram::new();
    let xs = wire_spiders(&mut lhs, n);
    let ys = wire_spiders(&mut lhs, m);
    let u = lhs.z0();
    let w = lhs.z0();
    for (i, x) in xs.iter().enumerate() {
        let lbox = lhs.h_labeled(lambda[i].value());
        lhs.wire(*x, lbox);
        lhs.wire(lbox, u);
    }
    let bridge = lhs.h();
    lhs.wire(u, bridge);
    lhs.wire(bridge, w);
    for y in &ys {
        let hbox = lhs.h();
        lhs.wire(w, hbox);
        lhs.wire(hbox, *y);
    }

    // right side: hyper-edges over the nonempty grid subsets with legs on
    // the projected wire sets. The canonical mu carries a branch constant in
    // its vacuum slot which reconstructs against the inversion formula, not
    // against the pivot: the nest without the vacuum box is already the
    // pivot's diagonal, so mu_empty stays out of the diagram.
    let mu = fhp_mu(n, m, lambda);
    let mut rhs = Diagram::new();
    let xs = wire_spiders(&mut rhs, n);
    let ys = wire_spiders(&mut rhs, m);
    for s in 1..1usize << (n * m) {
        let lam = mu.value(s);
        if lam.is_one(0.0) {
            continue;
        }
        let label = rhs.h_labeled(lam.value());
        let mut cols = 0usize;
        let mut rows = 0usize;
        for j in 0..m {
            for i in 0..n {
                if s >> (j * n + i) & 1 == 1 {
                    cols |= 1 << i;
                    rows |= 1 << j;
                }
            }
        }
        for (i, x) in xs.iter().enumerate() {
            if cols >> i & 1 == 1 {
                rhs.wire(*x, label);
            }
        }
        for (j, y) in ys.iter().enumerate() {
            if rows >> j & 1 == 1 {
                rhs.wire(*y, label);
            }
        }
    }
    Ok((lhs, rhs))
}

/// Scalable form of the pivot: boolean arrows `A` and `B` feed the two
/// sides, the `lambda` trapeze rides on the image strands via a copy fan of
/// the internal wire, and the right side is the same nest built behind the
/// arrows.
pub fn fhp_scalable(
    a: &BitMatrix,
    b: &BitMatrix,
    lambda: &[PhaseElement],
) -> Result<(ScalableDiagram, ScalableDiagram)> {
    let (n, p) = (a.rows(), a.cols());
    let (m, q) = (b.rows(), b.cols());
    if lambda.len() != n {
        return Err(Error::Range(format!(
            "expected {n} lambdas, got {}",
            lambda.len()
        )));
    }
    if n * m > 9 {
        return Err(Error::Capacity {
            wires: n * m,
            limit: 9,
        });
    }
    if n < 1 || m < 1 || p < 1 || q < 1 {
        return Err(Error::Range("pivot needs nonempty sizes".into()));
    }

    // shared prefix: copy the inputs and push one branch through the arrows
    // lhs: lambda boxes between image strands and a copy fan of u
    let mut lhs = ScalableDiagram::new();
    {
        let xin = lhs.input(p);
        let xout = lhs.output(p);
        let xcopy = lhs.add_node(ScalableGenerator::ScaledZ {
            phases: vec![0.0; p],
            ins: 1,
            outs: 2,
        });
        lhs.wire(xin, xcopy, p);
        lhs.wire(xcopy, xout, p);
        let arrow_a = lhs.add_node(ScalableGenerator::YellowArrow { matrix: a.clone() });
        lhs.wire(xcopy, arrow_a, p);

        let yin = lhs.input(q);
        let yout = lhs.output(q);
        let ycopy = lhs.add_node(ScalableGenerator::ScaledZ {
            phases: vec![0.0; q],
            ins: 1,
            outs: 2,
        });
        lhs.wire(yin, ycopy, q);
        lhs.wire(ycopy, yout, q);
        let arrow_b = lhs.add_node(ScalableGenerator::YellowArrow { matrix: b.clone() });
        lhs.wire(ycopy, arrow_b, q);

        // u fanned over n strands, w over m strands
        let u = lhs.add_node(ScalableGenerator::ScaledZ {
            phases: vec![0.0],
            ins: 1,
            outs: 1,
        });
        let w = lhs.add_node(ScalableGenerator::ScaledZ {
            phases: vec![0.0],
            ins: 1,
            outs: 1,
        });
        let bridge = lhs.add_node(ScalableGenerator::ScaledH {
            labels: vec![Complex64::new(-1.0, 0.0)],
            ins: 2,
            outs: 0,
        });
        lhs.wire(u, bridge, 1);
        lhs.wire(w, bridge, 1);
        let fan_u = lhs.add_node(ScalableGenerator::RedArrow {
            matrix: BitMatrix::ones(n, 1),
        });
        lhs.wire(u, fan_u, 1);
        let fan_w = lhs.add_node(ScalableGenerator::RedArrow {
            matrix: BitMatrix::ones(m, 1),
        });
        lhs.wire(w, fan_w, 1);
        let taps_a = lhs.add_node(ScalableGenerator::ScaledH {
            labels: lambda.iter().map(|l| l.value()).collect(),
            ins: 2,
            outs: 0,
        });
        lhs.wire(arrow_a, taps_a, n);
        lhs.wire(fan_u, taps_a, n);
        let taps_b = lhs.add_node(ScalableGenerator::ScaledH {
            labels: vec![Complex64::new(-1.0, 0.0); m],
            ins: 2,
            outs: 0,
        });
        lhs.wire(arrow_b, taps_b, m);
        lhs.wire(fan_w, taps_b, m);
    }

    // rhs: the mu nest on the image strands (the vacuum slot of mu is a
    // branch constant and stays out, as in the plain form)
    let mu = fhp_mu(n, m, lambda);
    let mut rhs = ScalableDiagram::new();
    {
        let pi = std::f64::consts::PI;
        let minus_one = Complex64::new(-1.0, 0.0);
        let xin = rhs.input(p);
        let xout = rhs.output(p);
        let xcopy = rhs.add_node(ScalableGenerator::ScaledZ {
            phases: vec![0.0; p],
            ins: 1,
            outs: 2,
        });
        rhs.wire(xin, xcopy, p);
        rhs.wire(xcopy, xout, p);
        let arrow_a = rhs.add_node(ScalableGenerator::YellowArrow { matrix: a.clone() });
        rhs.wire(xcopy, arrow_a, p);

        let yin = rhs.input(q);
        let yout = rhs.output(q);
        let ycopy = rhs.add_node(ScalableGenerator::ScaledZ {
            phases: vec![0.0; q],
            ins: 1,
            outs: 2,
        });
        rhs.wire(yin, ycopy, q);
        rhs.wire(ycopy, yout, q);
        let arrow_b = rhs.add_node(ScalableGenerator::YellowArrow { matrix: b.clone() });
        rhs.wire(ycopy, arrow_b, q);

        // image strands fan out to one branch per nonempty grid subset
        let subsets: Vec<usize> = (1..1usize << (n * m)).collect();
        let k = subsets.len();
        let fan_a = rhs.add_node(ScalableGenerator::ScaledZ {
            phases: vec![0.0; n],
            ins: 1,
            outs: k,
        });
        rhs.wire(arrow_a, fan_a, n);
        let fan_b = rhs.add_node(ScalableGenerator::ScaledZ {
            phases: vec![0.0; m],
            ins: 1,
            outs: k,
        });
        rhs.wire(arrow_b, fan_b, m);

        // conjunction of selected strands by de Morgan: NOT layers, an OR
        // collapse through the selector row, then NOT again
        let and_of = |rhs: &mut ScalableDiagram,
                      fan: crate::scalable::SNodeId,
                      width: usize,
                      sel: BitMatrix| {
            let h1 = rhs.add_node(ScalableGenerator::ScaledH {
                labels: vec![minus_one; width],
                ins: 1,
                outs: 1,
            });
            let zp = rhs.add_node(ScalableGenerator::ScaledZ {
                phases: vec![pi; width],
                ins: 1,
                outs: 1,
            });
            let h2 = rhs.add_node(ScalableGenerator::ScaledH {
                labels: vec![minus_one; width],
                ins: 1,
                outs: 1,
            });
            rhs.wire(fan, h1, width);
            rhs.wire(h1, zp, width);
            rhs.wire(zp, h2, width);
            let or = rhs.add_node(ScalableGenerator::YellowArrow { matrix: sel });
            rhs.wire(h2, or, width);
            let h3 = rhs.add_node(ScalableGenerator::ScaledH {
                labels: vec![minus_one],
                ins: 1,
                outs: 1,
            });
            let zp1 = rhs.add_node(ScalableGenerator::ScaledZ {
                phases: vec![pi],
                ins: 1,
                outs: 1,
            });
            let h4 = rhs.add_node(ScalableGenerator::ScaledH {
                labels: vec![minus_one],
                ins: 1,
                outs: 1,
            });
            rhs.wire(or, h3, 1);
            rhs.wire(h3, zp1, 1);
            rhs.wire(zp1, h4, 1);
            h4
        };

        for &s in &subsets {
            let mut cols = BitMatrix::zeros(1, n);
            let mut rows = BitMatrix::zeros(1, m);
            for j in 0..m {
                for i in 0..n {
                    if s >> (j * n + i) & 1 == 1 {
                        cols.set(0, i, true);
                        rows.set(0, j, true);
                    }
                }
            }
            let ca = and_of(&mut rhs, fan_a, n, cols);
            let cb = and_of(&mut rhs, fan_b, m, rows);
            let and = rhs.add_node(ScalableGenerator::ScaledH {
                labels: vec![minus_one],
                ins: 2,
                outs: 1,
            });
            rhs.wire(ca, and, 1);
            rhs.wire(cb, and, 1);
            let post = rhs.add_node(ScalableGenerator::ScaledH {
                labels: vec![minus_one],
                ins: 1,
                outs: 1,
            });
            rhs.wire(and, post, 1);
            let tap = rhs.add_node(ScalableGenerator::ScaledH {
                labels: vec![mu.value(s).value()],
                ins: 1,
                outs: 0,
            });
            rhs.wire(post, tap, 1);
        }
    }
    Ok((lhs, rhs))
}
