//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::time::Instant;

use liftcert::codes::{
    circulant_structure_check, code_dimension, css_valid, lifted_product, lifted_product_ring, tanner_code,
    tanner_from_certificate, BlockLayout, DistanceMode, GroupAlgebraMatrix, LinearCodeF2, Poly,
};
use liftcert::graphs::{lift, random_regular, RegularGraph, Signing};
use liftcert::groups::AbelianGroupSpec;
use liftcert::hikes::{connected_subgraphs, count_bounds, decode_graph, encode_graph, enumerate_hikes, EncodingMode};
use liftcert::pseudorandom::{bias_exact, biased_set_search, hoeffding_tail_check, Provenance, SigningDistribution};
use liftcert::search::{derandomized_lift_search, exponential_regime_build, replay_walk_certificate, LiftCertificate};
use liftcert::spectral::{ihara_check, lambda, spectrum_union_check};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

struct Instance {
    base: RegularGraph,
    signing: Signing,
}

fn union_instances() -> Vec<Instance> {
    let groups: [&[u32]; 5] = [&[2], &[3], &[4], &[6], &[2, 2]];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..50)
        .map(|i| {
            let n = 2 * rng.gen_range(2..=6);
            let base = random_regular(n, 3, rng.gen()).unwrap();
            let group = AbelianGroupSpec::from_factors(groups[i % groups.len()]).unwrap();
            let signing = Signing::random(&base, group, rng.gen());
            Instance { base, signing }
        })
        .collect()
}

fn criterion_1(instances: &[Instance]) -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for inst in instances {
        match spectrum_union_check(&inst.base, &inst.signing) {
            Ok(r) => {
                worst = worst.max(r.adjacency_distance).max(r.nonbacktracking_distance);
                failures += usize::from(!r.pass);
            }
            Err(_) => failures += 1,
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        failures == 0 && worst <= 1e-8 && secs <= 60.0,
        format!("50 triples, max matching distance {worst:.2e}, {failures} failures, {secs:.1}s"),
    )
}

fn criterion_2(instances: &[Instance]) -> Outcome {
    let mut min_slack = f64::INFINITY;
    let mut checks = 0;
    let trivial = AbelianGroupSpec::cyclic(1).unwrap();
    for inst in instances {
        let lifted = lift(&inst.base, &inst.signing, false).unwrap();
        let id = Signing::identity(&lifted, trivial.clone());
        let r = ihara_check(&lifted, &id, &trivial.all_characters()[0]).unwrap();
        min_slack = min_slack.min(r.slack);
        checks += 1;
        for chi in inst.signing.group().all_characters() {
            let r = ihara_check(&inst.base, &inst.signing, &chi).unwrap();
            min_slack = min_slack.min(r.slack);
            checks += 1;
        }
    }
    outcome(
        min_slack >= -1e-8,
        format!("{checks} checks (lift and per character), min slack {min_slack:.3e}"),
    )
}

fn criterion_3() -> Outcome {
    let graphs = [
        ("K4", RegularGraph::complete(4)),
        ("C8", RegularGraph::cycle(8)),
        ("Petersen", RegularGraph::petersen()),
    ];
    let mut roundtrips = 0usize;
    let mut failures = 0usize;
    for (_, g) in &graphs {
        for h in connected_subgraphs(g, 6, usize::MAX).unwrap() {
            for &start in &h.vertices {
                for mode in [EncodingMode::I, EncodingMode::II] {
                    roundtrips += 1;
                    let ok = encode_graph(g, &h, start, mode)
                        .and_then(|enc| decode_graph(&enc, g))
                        .is_ok_and(|back| back == h);
                    failures += usize::from(!ok);
                }
            }
        }
    }
    outcome(
        failures == 0,
        format!("{roundtrips} encode/decode roundtrips on K4, C8, Petersen, {failures} failures"),
    )
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut violations = 0;
    let mut checks = 0;
    let mut tightest: f64 = 0.0;
    for _ in 0..10 {
        let n = 2 * rng.gen_range(8..=15);
        let g = random_regular(n, 3, rng.gen()).unwrap();
        let r = g.bicycle_free_radius().radius;
        for k in 2..=5 {
            let count = enumerate_hikes(&g, k - 1, true, false).unwrap().count as f64;
            let bound = count_bounds(n, 3, k, r, 0.1).unwrap().bound1;
            checks += 1;
            tightest = tightest.max(count / bound);
            violations += usize::from(count > bound);
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        violations == 0 && secs <= 300.0,
        format!("{checks} (graph, k) pairs, {violations} violations, max count/bound {tightest:.2e}, {secs:.1}s"),
    )
}

fn random_support(base: &RegularGraph, l: u32, size: usize, seed: u64) -> SigningDistribution {
    let group = AbelianGroupSpec::cyclic(l).unwrap();
    let support = (0..size)
        .map(|i| {
            Signing::random(base, group.clone(), seed.wrapping_add(i as u64))
                .values()
                .to_vec()
        })
        .collect();
    SigningDistribution::new(group, base.num_edges(), support, Provenance::Explicit).unwrap()
}

fn criterion_5(certs: &mut Vec<LiftCertificate>) -> Outcome {
    let t = Instant::now();
    let threshold = 2.0 * 2f64.sqrt() + 0.1;
    let target = 2.0 * 2f64.sqrt() + 0.2;
    let n = 100;
    let base = (0u64..)
        .map(|seed| random_regular(n, 3, 500 + seed).unwrap())
        .find(|g| lambda(g).is_ok_and(|l| l <= threshold))
        .unwrap();
    let mut hits = 0;
    let mut parts = Vec::new();
    for l in [2u32, 4, 8, 16] {
        let dist = random_support(&base, l, 200, 7 * l as u64);
        let out = derandomized_lift_search(&base, &dist, None).unwrap();
        hits += usize::from(out.certificate.lambda <= target);
        parts.push(format!(
            "ℓ={l}: best λ={:.4} of {}",
            out.certificate.lambda, out.certificate.candidates_evaluated
        ));
        certs.push(out.certificate);
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        hits >= 3 && secs <= 600.0,
        format!(
            "n={n}, λ(base)={:.4}, {hits}/4 sizes reach {target:.4} ({}), {secs:.1}s",
            lambda(&base).unwrap(),
            parts.join("; ")
        ),
    )
}

fn criterion_6(certs: &mut Vec<LiftCertificate>) -> Outcome {
    let base = (0u64..)
        .map(|seed| random_regular(16, 3, seed).unwrap())
        .find(|g| g.is_connected())
        .unwrap();
    let a = exponential_regime_build(&base, 16, 64, 36, 2026).unwrap();
    let b = exponential_regime_build(&base, 16, 64, 36, 2026).unwrap();
    let identical = a.to_json_bytes() == b.to_json_bytes();
    let replay = replay_walk_certificate(&a).unwrap_or(false);
    let verified = a.verify().is_ok_and(|v| v.pass);
    let ratio = a.reference.as_ref().map_or(f64::NAN, |r| r.ratio);
    let pass = a.lambda < 3.0 && identical && replay && verified;
    let detail = format!(
        "best λ={:.4} (seed index {}), λ/(√d ln d)={ratio:.3}, byte-identical {identical}, replay {replay}",
        a.lambda, a.candidate_index
    );
    certs.push(a);
    outcome(pass, detail)
}

fn criterion_7() -> Outcome {
    let z5 = AbelianGroupSpec::cyclic(5).unwrap();
    let full = bias_exact(&SigningDistribution::uniform_exhaustive(z5.clone(), 4, 1 << 12).unwrap()).unwrap();
    let ident = bias_exact(&SigningDistribution::singleton_identity(z5, 4)).unwrap();
    let z4 = AbelianGroupSpec::cyclic(4).unwrap();
    let two = SigningDistribution::new(
        z4.clone(),
        1,
        vec![vec![z4.element(vec![0]).unwrap()], vec![z4.element(vec![1]).unwrap()]],
        Provenance::Explicit,
    )
    .unwrap();
    let two_bias = bias_exact(&two).unwrap();
    let mut emitted = 0;
    let mut bad = 0;
    for (factors, m, nu, seed) in [
        (vec![2u32], 6usize, 0.5, 1u64),
        (vec![3], 4, 0.6, 2),
        (vec![4], 3, 0.7, 3),
        (vec![2, 2], 3, 0.6, 4),
        (vec![5], 3, 1.0, 5),
        (vec![2], 3, 0.0, 6),
    ] {
        let group = AbelianGroupSpec::from_factors(&factors).unwrap();
        if let Ok(d) = biased_set_search(group, m, nu, 24, 200, seed) {
            emitted += 1;
            let claimed = match d.provenance() {
                Provenance::BiasedSet { verified_bias, .. } => *verified_bias,
                _ => f64::INFINITY,
            };
            let again = bias_exact(&d).unwrap();
            bad += usize::from(again > claimed + 1e-12 || again > nu + 1e-12);
        }
    }
    let pass = full == 0.0 && ident == 1.0 && (two_bias - 2f64.sqrt() / 2.0).abs() <= 1e-12 && emitted > 0 && bad == 0;
    outcome(
        pass,
        format!("full Z5^4 {full}, identity {ident}, Z4 pair {two_bias:.15}, {emitted} searched sets, {bad} re-verify failures"),
    )
}

fn criterion_8() -> Outcome {
    let c10 = RegularGraph::cycle(10);
    let edges: Vec<usize> = (0..10).collect();
    let mut parts = Vec::new();
    let mut pass = true;
    for t in [4.0, 8.0] {
        let r = hoeffding_tail_check(&c10, 16, 36, &edges, t, 10_000, 8).unwrap();
        pass &= r.pass;
        parts.push(format!(
            "t={t}: re {:.4}, im {:.4} vs {:.4}+3·{:.4}",
            r.empirical_re, r.empirical_im, r.bound, r.sigma
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_9() -> Outcome {
    let mut rows = Vec::new();
    let mut pass = true;
    let mut constructed = 0;
    let mut invalid = 0;
    for (l, expect) in [(2u32, (8, 2, 2)), (3, (18, 2, 3)), (4, (32, 2, 4))] {
        let a = GroupAlgebraMatrix::parse(l, &[vec!["1+x"]]).unwrap();
        let code = lifted_product(&a, &a).unwrap();
        constructed += 1;
        invalid += usize::from(!css_valid(&code));
        let d = code.min_distance(DistanceMode::Exact).unwrap().value.unwrap_or(0);
        let got = (code.n, code_dimension(&code), d);
        pass &= got == expect;
        rows.push(format!("ℓ={l}: {got:?}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..40 {
        let l = rng.gen_range(1..=6u32);
        let random = |rows: usize, cols: usize, rng: &mut ChaCha8Rng| {
            let mut m = GroupAlgebraMatrix::zeros(l, rows, cols).unwrap();
            for i in 0..rows {
                for j in 0..cols {
                    let exps: Vec<u32> = (0..l).filter(|_| rng.gen_bool(0.4)).collect();
                    m.set(i, j, Poly::from_exponents(&exps, l));
                }
            }
            m
        };
        let a = random(rng.gen_range(1..=3), rng.gen_range(1..=3), &mut rng);
        let b = random(rng.gen_range(1..=3), rng.gen_range(1..=3), &mut rng);
        for code in [lifted_product(&a, &b).unwrap(), lifted_product_ring(&a, &b).unwrap()] {
            constructed += 1;
            invalid += usize::from(!css_valid(&code));
        }
    }
    outcome(
        pass && invalid == 0,
        format!(
            "{}; {constructed} lifted products built, {invalid} fail css_valid",
            rows.join(", ")
        ),
    )
}

fn criterion_10(certs: &[LiftCertificate]) -> Outcome {
    let mut checked = 0;
    let mut failures = 0;
    let locals = [
        LinearCodeF2::even_weight(3),
        LinearCodeF2::repetition(3),
        LinearCodeF2::full_space(3),
    ];
    for cert in certs {
        for c0 in &locals {
            let ok = tanner_from_certificate(cert, c0)
                .and_then(|(h, layout)| circulant_structure_check(&h, &layout))
                .unwrap_or(false);
            checked += 1;
            failures += usize::from(!ok);
        }
    }
    let k4 = RegularGraph::complete(4);
    let h = tanner_code(&k4, &LinearCodeF2::even_weight(3)).unwrap();
    let dim = h.num_cols() - h.rank();
    let unit_rejected = {
        let mut m = liftcert::codes::BitMatrix::zeros(1, 2);
        m.set(0, 0, true);
        !circulant_structure_check(&m, &BlockLayout::cyclic(2)).unwrap()
    };
    outcome(
        failures == 0 && dim == 3 && unit_rejected,
        format!("{checked} certificate Tanner parities, {failures} not quasi-cyclic; K4 even-weight dimension {dim}"),
    )
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(usize, Outcome)> = Vec::new();
    let mut report = |i: usize, o: Outcome| {
        println!(
            "criterion {i:>2}: {} | {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push((i, o));
    };
    let instances = union_instances();
    let mut certs = Vec::new();
    report(1, criterion_1(&instances));
    report(2, criterion_2(&instances));
    report(3, criterion_3());
    report(4, criterion_4());
    report(5, criterion_5(&mut certs));
    report(6, criterion_6(&mut certs));
    report(7, criterion_7());
    report(8, criterion_8());
    report(9, criterion_9());
    for (i, s) in instances.iter().take(10).enumerate() {
        let dist = SigningDistribution::new(
            s.signing.group().clone(),
            s.base.num_edges(),
            vec![s.signing.values().to_vec()],
            Provenance::Explicit,
        )
        .unwrap();
        if i % 2 == 0 {
            certs.push(derandomized_lift_search(&s.base, &dist, None).unwrap().certificate);
        }
    }
    report(10, criterion_10(&certs));
    let secs = start.elapsed().as_secs_f64();
    report(
        11,
        outcome(
            secs <= 900.0,
            format!("acceptance suite wall-clock {secs:.1}s against a 900s budget"),
        ),
    );
    let failed: Vec<usize> = results.iter().filter(|(_, o)| !o.pass).map(|(i, _)| *i).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
