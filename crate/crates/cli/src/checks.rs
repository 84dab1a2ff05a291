//! The named verification targets behind `szh check`.

use crate::config::RunConfig;
use serde::Serialize;
use szh_core::bang::{arrow_to_bang, bang_to_arrow, instantiate, rule_family_templates};
use szh_core::bitmatrix::BitMatrix;
use szh_core::error::{Error, Result};
use szh_core::nests::{
    fourier_hyper_pivot, mobius_gadget_sides, nest_diagram, tof_nest_identity, verify_nest,
};
use szh_core::phase::PhaseElement;
use szh_core::pivots::{
    hlc_scalable, hyper_local_complementation, local_complementation, regular_hyper_pivot,
    regular_hyper_pivot_scalable, rhp_lemma, rhp_specialization,
};
use szh_core::rules::{sweep_params, verify_rule, RULE_NAMES};
use szh_core::scalable::{arrow_laws_check, strip, ArrowKind, ArrowLaw};
use szh_core::semantics::equal_semantics_with_limit;
use szh_core::semantics::semantics_with_limit;
use szh_core::tensor::Tensor;

#[derive(Clone, Debug, Serialize)]
pub struct CaseResult {
    pub case: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_diff: Option<f64>,
}

fn case(case: impl Into<String>, pass: bool, max_diff: Option<f64>) -> CaseResult {
    CaseResult {
        case: case.into(),
        pass,
        max_diff,
    }
}

pub fn check_names() -> Vec<&'static str> {
    let mut names: Vec<&'static str> = RULE_NAMES.to_vec();
    names.extend([
        "lc",
        "hlc",
        "rhp",
        "rhp-lemma",
        "fhp",
        "laws",
        "families",
        "dictionary",
        "nests",
        "all",
    ]);
    names
}

fn eq_case(
    name: String,
    lhs: &szh_core::Diagram,
    rhs: &szh_core::Diagram,
    cfg: &RunConfig,
) -> Result<CaseResult> {
    let eq = equal_semantics_with_limit(lhs, rhs, cfg.tolerance, cfg.contraction_limit)?;
    Ok(case(name, eq.equal, Some(eq.max_diff)))
}

fn rule_check(name: &str, cfg: &RunConfig, draws: usize) -> Result<Vec<CaseResult>> {
    let params = sweep_params(name, cfg.seed, draws, 10)?;
    let mut out = Vec::new();
    for p in &params {
        let eq = verify_rule(name, p, cfg.tolerance)?;
        out.push(case(
            format!("{name} m={} n={}", p.m, p.n),
            eq.equal,
            Some(eq.max_diff),
        ));
    }
    Ok(out)
}

fn lc_check(cfg: &RunConfig, seeds: usize) -> Result<Vec<CaseResult>> {
    let mut out = Vec::new();
    let staples = [
        (
            "P3 middle",
            BitMatrix::from_rows(&[&[0, 1, 0], &[1, 0, 1], &[0, 1, 0]]),
            1usize,
        ),
        (
            "K3",
            BitMatrix::from_rows(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]),
            0,
        ),
        ("isolated", BitMatrix::zeros(1, 1), 0),
    ];
    for (tag, adj, v) in staples {
        let (lhs, rhs) = local_complementation(&adj, v)?;
        out.push(eq_case(format!("lc {tag}"), &lhs, &rhs, cfg)?);
    }
    use rand::Rng;
    let mut rng = rand_chacha_seed(cfg.seed);
    for k in 0..seeds {
        let n = 4 + k % 2;
        let mut adj = BitMatrix::zeros(n, n);
        for u in 0..n {
            for w in u + 1..n {
                if rng.gen_bool(0.5) {
                    adj.set(u, w, true);
                    adj.set(w, u, true);
                }
            }
        }
        let v = rng.gen_range(0..n);
        let (lhs, rhs) = local_complementation(&adj, v)?;
        out.push(eq_case(
            format!("lc random {k} (n={n}, v={v})"),
            &lhs,
            &rhs,
            cfg,
        )?);
    }
    Ok(out)
}

fn rand_chacha_seed(seed: u64) -> impl rand::Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

fn hlc_check(cfg: &RunConfig, max_n: usize) -> Result<Vec<CaseResult>> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let (lhs, rhs) = hyper_local_complementation(n)?;
        out.push(eq_case(format!("hlc n={n}"), &lhs, &rhs, cfg)?);
        if n <= 3 {
            let (sl, sr) = hlc_scalable(n)?;
            let l = strip(&sl)?;
            let r = strip(&sr)?;
            out.push(eq_case(format!("hlc scalable n={n}"), &l, &r, cfg)?);
            out.push(eq_case(
                format!("hlc scalable vs plain n={n}"),
                &l,
                &lhs,
                cfg,
            )?);
        }
    }
    Ok(out)
}

fn rhp_check(cfg: &RunConfig, seeds: usize) -> Result<Vec<CaseResult>> {
    use rand::Rng;
    let mut out = Vec::new();
    let one = BitMatrix::from_rows(&[&[1]]);
    let (lhs, rhs) = regular_hyper_pivot(&one, &one)?;
    out.push(eq_case("rhp [1] [1]".into(), &lhs, &rhs, cfg)?);
    let mut rng = rand_chacha_seed(cfg.seed);
    for k in 0..seeds {
        let (ra, ca) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let (rb, cb) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let a = BitMatrix::random(ra, ca, &mut rng);
        let b = BitMatrix::random(rb, cb, &mut rng);
        let (lhs, rhs) = regular_hyper_pivot(&a, &b)?;
        out.push(eq_case(
            format!("rhp random {k} ({ra}x{ca}, {rb}x{cb})"),
            &lhs,
            &rhs,
            cfg,
        )?);
    }
    for k in 0..seeds.min(3) {
        let a = BitMatrix::random(2, 2, &mut rng);
        let b = BitMatrix::random(2, 2, &mut rng);
        let (sl, sr) = regular_hyper_pivot_scalable(&a, &b)?;
        out.push(eq_case(
            format!("rhp scalable {k}"),
            &strip(&sl)?,
            &strip(&sr)?,
            cfg,
        )?);
    }
    for (rule, m, n) in [("hs2", 1, 1), ("ba1", 2, 2), ("ba2", 0, 2)] {
        let ((pl, pr), (dl, dr)) = rhp_specialization(rule, m, n)?;
        out.push(eq_case(format!("rhp {rule} instance"), &pl, &pr, cfg)?);
        out.push(eq_case(format!("rhp {rule} lhs dressing"), &pl, &dl, cfg)?);
        out.push(eq_case(format!("rhp {rule} rhs dressing"), &pr, &dr, cfg)?);
    }
    Ok(out)
}

fn rhp_lemma_check(cfg: &RunConfig, seeds: usize) -> Result<Vec<CaseResult>> {
    use rand::Rng;
    let mut out = Vec::new();
    let mut rng = rand_chacha_seed(cfg.seed);
    for k in 0..seeds {
        let rows = rng.gen_range(1..=3);
        let a = BitMatrix::random(rows, rng.gen_range(1..=3), &mut rng);
        let b = BitMatrix::random(rows, rng.gen_range(1..=3), &mut rng);
        let (lhs, rhs) = rhp_lemma(&a, &b)?;
        out.push(eq_case(format!("rhp-lemma {k}"), &lhs, &rhs, cfg)?);
    }
    Ok(out)
}

fn fhp_check(cfg: &RunConfig, seeds: usize) -> Result<Vec<CaseResult>> {
    use rand::Rng;
    let mut out = Vec::new();
    let mut rng = rand_chacha_seed(cfg.seed);
    for k in 0..seeds {
        let sizes = [(1, 1), (2, 1), (1, 2), (2, 2), (3, 2)];
        let (n, m) = sizes[k % sizes.len()];
        let lambda: Vec<PhaseElement> = (0..n)
            .map(|_| PhaseElement::from_theta(rng.gen_range(-8..8), 8))
            .collect();
        let (lhs, rhs) = fourier_hyper_pivot(n, m, &lambda)?;
        out.push(eq_case(format!("fhp {k} ({n},{m})"), &lhs, &rhs, cfg)?);
    }
    // the all-minus-one family coincides with the regular pivot
    let lambda = vec![PhaseElement::minus_one(); 2];
    let (fl, fr) = fourier_hyper_pivot(2, 2, &lambda)?;
    let (rl, rr) = regular_hyper_pivot(&BitMatrix::identity(2), &BitMatrix::identity(2))?;
    out.push(eq_case("fhp lambda=-1 vs rhp lhs".into(), &fl, &rl, cfg)?);
    out.push(eq_case("fhp lambda=-1 vs rhp rhs".into(), &fr, &rr, cfg)?);
    Ok(out)
}

fn laws_check(cfg: &RunConfig, seeds: usize) -> Result<Vec<CaseResult>> {
    use rand::Rng;
    let mut out = Vec::new();
    let mut rng = rand_chacha_seed(cfg.seed);
    for law in ArrowLaw::ALL {
        for k in 0..seeds.max(1) {
            let a = loop {
                let m = BitMatrix::random(rng.gen_range(1..=3), rng.gen_range(1..=3), &mut rng);
                if law != ArrowLaw::RedEqYellowRowCond || m.at_most_one_per_row() {
                    break m;
                }
            };
            let b = BitMatrix::random(rng.gen_range(1..=3), a.rows(), &mut rng);
            let pass = arrow_laws_check(law, &a, Some(&b), cfg.tolerance)?;
            out.push(case(format!("{} {k}", law.name()), pass, None));
        }
    }
    Ok(out)
}

fn families_check(cfg: &RunConfig) -> Result<Vec<CaseResult>> {
    let mut out = Vec::new();
    for name in ["zs1", "hs1", "ba1", "ba2"] {
        let (lt, rt) = rule_family_templates(name)?;
        let ids: Vec<String> = lt.boxes.iter().map(|b| b.id.clone()).collect();
        let combos: Vec<Vec<usize>> = match ids.len() {
            1 => (0..=3).map(|a| vec![a]).collect(),
            _ => (0..=3)
                .flat_map(|a| (0..=3).map(move |b| vec![a, b]))
                .collect(),
        };
        for counts in combos {
            let assignment: std::collections::BTreeMap<String, usize> =
                ids.iter().cloned().zip(counts.iter().copied()).collect();
            let lhs = instantiate(&lt, &assignment)?;
            let rhs = instantiate(&rt, &assignment)?;
            out.push(eq_case(
                format!("family {name} counts={counts:?}"),
                &lhs,
                &rhs,
                cfg,
            )?);
        }
    }
    Ok(out)
}

fn dictionary_check(cfg: &RunConfig) -> Result<Vec<CaseResult>> {
    let mut out = Vec::new();
    for kind in [ArrowKind::Red, ArrowKind::Yellow] {
        let mut round_trips = 0usize;
        let mut ok = true;
        for a in BitMatrix::enumerate_all(2, 2) {
            let t = arrow_to_bang(kind, &a);
            let (k2, a2) = bang_to_arrow(&t)?;
            ok &= k2 == kind && a2 == a;
            round_trips += 1;
        }
        out.push(case(
            format!("dictionary {kind:?} round trips ({round_trips})"),
            ok,
            None,
        ));

        let a = BitMatrix::from_rows(&[&[1, 1], &[0, 1]]);
        let t = arrow_to_bang(kind, &a);
        let counts: std::collections::BTreeMap<String, usize> = [
            ("cols".to_string(), a.cols()),
            ("rows".to_string(), a.rows()),
        ]
        .into();
        let inst = instantiate(&t, &counts)?;
        let stripped = strip(&szh_core::scalable::arrow_diagram(kind, &a))?;
        out.push(eq_case(
            format!("dictionary {kind:?} instantiation"),
            &inst,
            &stripped,
            cfg,
        )?);
    }
    Ok(out)
}

fn nests_check(cfg: &RunConfig) -> Result<Vec<CaseResult>> {
    let mut out = Vec::new();
    for n in 1..=4usize {
        let (lhs, rhs) = mobius_gadget_sides(n)?;
        out.push(eq_case(format!("omega gadget n={n}"), &lhs, &rhs, cfg)?);
    }
    for n in [4usize, 5] {
        let spec = tof_nest_identity(n)?;
        let report = verify_nest(&spec)?;
        out.push(case(
            format!("stock nest prover n={n}"),
            report.identity,
            None,
        ));
        let t = semantics_with_limit(&nest_diagram(&spec), cfg.contraction_limit.max(400))?;
        let scalar = report.scalar.value();
        let target = Tensor::diagonal(n, |_| scalar);
        let pass = t.approx_eq(&target, cfg.tolerance);
        out.push(case(format!("stock nest oracle n={n}"), pass, None));
    }
    Ok(out)
}

/// Run one named check; `seeds` scales the randomized sweeps and `size` the
/// family sizes where applicable.
pub fn run_check(
    name: &str,
    cfg: &RunConfig,
    seeds: usize,
    size: Option<usize>,
) -> Result<Vec<CaseResult>> {
    match name {
        n if RULE_NAMES.contains(&n) => rule_check(n, cfg, seeds.max(1)),
        "lc" => lc_check(cfg, seeds),
        "hlc" => hlc_check(cfg, size.unwrap_or(3)),
        "rhp" => rhp_check(cfg, seeds),
        "rhp-lemma" => rhp_lemma_check(cfg, seeds),
        "fhp" => fhp_check(cfg, seeds),
        "laws" => laws_check(cfg, seeds.min(3)),
        "families" => families_check(cfg),
        "dictionary" => dictionary_check(cfg),
        "nests" => nests_check(cfg),
        "all" => {
            let mut out = Vec::new();
            for rule in RULE_NAMES {
                out.extend(rule_check(rule, cfg, 3)?);
            }
            out.extend(lc_check(cfg, 2)?);
            out.extend(hlc_check(cfg, 3)?);
            out.extend(rhp_check(cfg, 3)?);
            out.extend(rhp_lemma_check(cfg, 3)?);
            out.extend(fhp_check(cfg, 3)?);
            out.extend(laws_check(cfg, 1)?);
            out.extend(families_check(cfg)?);
            out.extend(dictionary_check(cfg)?);
            out.extend(nests_check(cfg)?);
            Ok(out)
        }
        other => Err(Error::UnknownRule(other.into())),
    }
}
