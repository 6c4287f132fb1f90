//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use socialhk::bounds::{conditional_upper_bound, conductance_lower_bound, witness_lower_bound};
use socialhk::dynamics::{
    eps_convergence_time, steady_state, verify_energy_certificates, EventKind, ExactSimulation, Limits,
    OpinionState, StopOn,
};
use socialhk::slowmerge::{
    construct_slow_state, eliminate, modal_sum, necessary_check, rpartite_no_slow_merge, sign_lemma_check,
    sufficient_check, SplitSpec, VerdictKind, DEFAULT_MAX_N,
};
use socialhk::spectral::{
    decompose, max_residual, nontermination_certificate, rpartite_eigenbasis, verify_rpartite_basis, check_spectrum_shape,
};
use socialhk::{sample_initial_state, simulate, CounterRng, Graph, PartiteSpec, SampleMode};

type Outcome = Result<String, String>;

fn first_merge(g: &Graph, s: &OpinionState) -> Option<usize> {
    let t = simulate(g, s, Limits::new(1000, StopOn::Lock)).ok()?;
    t.events().iter().find(|e| matches!(e.kind, EventKind::Merge { .. })).map(|e| e.k)
}

fn k_eps(g: &Graph, x: &[f64], r: f64, eps: f64) -> Result<usize, String> {
    let s = OpinionState::new(x.to_vec(), r).map_err(|e| e.to_string())?;
    let t = simulate(g, &s, Limits::new(20_000, StopOn::EpsConv(eps))).map_err(|e| e.to_string())?;
    let ss = steady_state(&t).map_err(|e| e.to_string())?;
    eps_convergence_time(&t, &ss, eps).map_err(|e| e.to_string())
}

fn four_path_merges() -> Outcome {
    let g = Graph::path(4).unwrap();
    let r = 1.0;
    let mut got = Vec::new();
    for (delta, want) in [(r / 4.0, 2), (r / 16.0, 4), (r / 256.0, 8)] {
        let s = OpinionState::new(vec![-r, 0.0, r, -(r - delta)], r).unwrap();
        let k = first_merge(&g, &s);
        if k != Some(want) {
            return Err(format!("delta {delta}: merge at {k:?}, expected {want}"));
        }
        got.push(want);
    }
    Ok(format!("merge steps {got:?}"))
}

fn constructed_merges() -> Outcome {
    let g = Graph::path(4).unwrap();
    let split = SplitSpec::new(&g, &[0, 1, 2], &[3]).unwrap();
    let verdict = sufficient_check(&g, &split).map_err(|e| e.to_string())?;
    if verdict.kind != VerdictKind::SufficientHolds {
        return Err(format!("verdict {:?}", verdict.kind));
    }
    let lambda = verdict.witness.as_ref().unwrap().lambda;
    if (lambda - 0.5).abs() > 1e-12 {
        return Err(format!("lambda {lambda}"));
    }
    let v0 = 0.5;
    let mut got = Vec::new();
    for (div, want) in [(2.0, 1), (8.0, 3), (32.0, 5)] {
        let st = construct_slow_state(&g, &split, &verdict, v0 / div, 1.0).map_err(|e| e.to_string())?;
        if st.v0 != v0 || st.predicted_merge != want {
            return Err(format!("v0 {} predicted {}, expected {v0} and {want}", st.v0, st.predicted_merge));
        }
        let k = first_merge(&g, &st.state);
        if k != Some(want) {
            return Err(format!("delta v0/{div}: merge at {k:?}, expected {want}"));
        }
        got.push(want);
    }
    Ok(format!("merge steps {got:?}"))
}

/// Uniform background with one linked pair `(i, j)` whose other neighbours
/// sit on opposite sides, so averaging pulls the pair apart.
fn break_prone_state(g: &Graph, rng: &mut CounterRng) -> OpinionState {
    let n = g.n();
    let mut x: Vec<f64> = (0..n).map(|_| rng.uniform_in(-1.5, 2.5)).collect();
    if !g.edges().is_empty() {
        let (mut i, mut j) = g.edges()[rng.below(g.edges().len() as u64) as usize];
        if rng.below(2) == 1 {
            std::mem::swap(&mut i, &mut j);
        }
        x[i] = 0.0;
        x[j] = rng.uniform_in(0.8, 1.0);
        for &v in g.neighbors(j) {
            if v != i && v != j {
                x[v] = x[j] + rng.uniform_in(0.5, 1.0);
            }
        }
        for &v in g.neighbors(i) {
            if v != i && v != j {
                x[v] = -rng.uniform_in(0.5, 1.0);
            }
        }
    }
    OpinionState::new(x, 1.0).unwrap()
}

fn energy_certificates() -> Outcome {
    let runs: Vec<Result<(usize, usize), String>> = (1..=200u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = CounterRng::new(seed).unwrap();
            let n = 3 + rng.below(6) as usize;
            let g = match seed % 4 {
                0 => Graph::path(n),
                1 => Graph::star(n),
                2 => Graph::dumbbell(n),
                _ => Graph::random_connected(n, 0.3, &mut rng),
            }
            .unwrap();
            let s = if seed % 2 == 0 {
                break_prone_state(&g, &mut rng)
            } else {
                let hi = 0.6 * n as f64;
                sample_initial_state(n, 1.0, SampleMode::UniformBox { lo: 0.0, hi }, seed).unwrap()
            };
            let t = simulate(&g, &s, Limits::new(400, StopOn::Horizon)).map_err(|e| e.to_string())?;
            let rep = verify_energy_certificates(&t).map_err(|e| e.to_string())?;
            match rep.failures.first() {
                Some(f) => Err(format!("seed {seed}: {f:?}")),
                None => Ok((rep.steps_checked, rep.breaks)),
            }
        })
        .collect();
    let mut steps = 0;
    let mut breaks = 0;
    for r in runs {
        let (s, b) = r?;
        steps += s;
        breaks += b;
    }
    if breaks == 0 {
        return Err("no link breaks exercised".into());
    }
    Ok(format!("200 runs, {steps} steps, {breaks} link breaks"))
}

fn conditional_bound() -> Outcome {
    let r = 1.0;
    let mut checked = 0;
    for g in [Graph::path(3).unwrap(), Graph::path(4).unwrap(), Graph::star(4).unwrap()] {
        let n = g.n();
        let d = g.diameter().unwrap();
        let dec = decompose(&g).map_err(|e| e.to_string())?;
        for i in 1..n {
            let v = dec.eigenvector(i);
            let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
            let x: Vec<f64> = v.iter().map(|a| a * 0.9 * r / (hi - lo)).collect();
            for eps in [1e-2, 1e-4] {
                let b = conditional_upper_bound(n, d, eps, r).map_err(|e| e.to_string())?;
                let k = k_eps(&g, &x, r, eps)?;
                if k as f64 > b.bound {
                    return Err(format!("n {n} mode {i} eps {eps}: k {k} > bound {}", b.bound));
                }
                checked += 1;
            }
        }
    }
    let g = Graph::path(3).unwrap();
    let x = [0.1, 0.0, -0.1];
    for eps in [1e-2, 1e-4] {
        let want = ((eps / (0.1 * 2f64.sqrt())).ln() / 0.5f64.ln()).ceil() as i64;
        let k = k_eps(&g, &x, r, eps)? as i64;
        if (k - want).abs() > 1 {
            return Err(format!("P3 pure mode eps {eps}: k {k}, expected {want} ± 1"));
        }
    }
    Ok(format!("{checked} eigenvector states within bound; P3 geometric decay matches"))
}

fn conductance_consistency() -> Outcome {
    let (eps, r) = (1e-3, 1.0);
    let mut lines = Vec::new();
    for (name, g) in [("P4", Graph::path(4).unwrap()), ("dumbbell(6)", Graph::dumbbell(6).unwrap())] {
        let phi = g.conductance().map_err(|e| e.to_string())?.value;
        if name == "P4" && (phi - 0.2).abs() > 1e-12 {
            return Err(format!("P4 conductance {phi}"));
        }
        let bound = conductance_lower_bound(phi, eps, r).map_err(|e| e.to_string())?.value;
        let w = witness_lower_bound(&g, r, 0.9).map_err(|e| e.to_string())?;
        let k = k_eps(&g, w.opinions(), r, eps)?;
        if k as f64 <= bound {
            return Err(format!("{name}: k {k} <= bound {bound}"));
        }
        lines.push(format!("{name} k={k} > {bound:.3}"));
    }
    Ok(lines.join(", "))
}

fn spectral_suite() -> Outcome {
    let results: Vec<Result<(), String>> = (1..=100u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = CounterRng::new(1000 + seed).unwrap();
            let n = 2 + rng.below(11) as usize;
            let g = Graph::random_connected(n, 0.25, &mut rng).unwrap();
            let dec = decompose(&g).map_err(|e| e.to_string())?;
            let res = max_residual(&g, &dec);
            if res > 1e-9 {
                return Err(format!("seed {seed}: residual {res}"));
            }
            let lam = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(dec.eigenvalues()));
            let rec = dec.eigenvectors() * lam * dec.inverse_eigenvectors() - g.normalized_adjacency();
            let err = rec.amax();
            if err > 1e-8 {
                return Err(format!("seed {seed}: reconstruction error {err}"));
            }
            if !g.is_complete() {
                let rep = check_spectrum_shape(&g, &dec).map_err(|e| e.to_string())?;
                if !rep.all() {
                    return Err(format!("seed {seed}: spectral flags {rep:?}"));
                }
            }
            Ok(())
        })
        .collect();
    results.into_iter().collect::<Result<Vec<()>, String>>()?;
    let mut p3 = decompose(&Graph::path(3).unwrap()).map_err(|e| e.to_string())?.eigenvalues().to_vec();
    p3.sort_by(|a, b| b.total_cmp(a));
    let want = [1.0, 0.5, -1.0 / 6.0];
    if p3.iter().zip(want).any(|(a, b)| (a - b).abs() > 1e-10) {
        return Err(format!("P3 spectrum {p3:?}"));
    }
    Ok("100 random graphs; P3 spectrum {1, 1/2, -1/6}".into())
}

fn rpartite_suite() -> Outcome {
    let mut specs = 0;
    for n in 2..=8 {
        for spec in PartiteSpec::compositions(n) {
            let basis = rpartite_eigenbasis(&spec).map_err(|e| e.to_string())?;
            let rep = verify_rpartite_basis(&spec, &basis).map_err(|e| e.to_string())?;
            if rep.max_spectrum_gap > 1e-8 {
                return Err(format!("{:?}: spectrum gap {}", spec.part_sizes(), rep.max_spectrum_gap));
            }
            if rep.max_nonunit_b_eigenvalue.is_some_and(|l| l > 1e-9) {
                return Err(format!("{:?}: positive non-unit eigenvalue {:?}", spec.part_sizes(), rep.max_nonunit_b_eigenvalue));
            }
            specs += 1;
        }
    }
    let mut checked = 0;
    for parts in [vec![1, 2], vec![2, 2], vec![1, 1, 2], vec![2, 3]] {
        let scan = rpartite_no_slow_merge(&PartiteSpec::new(parts.clone()).unwrap(), DEFAULT_MAX_N)
            .map_err(|e| e.to_string())?;
        if !scan.all_fail() {
            let o = &scan.holding[0];
            return Err(format!("K{parts:?}: split {:?}|{:?} holds", o.split.vp(), o.split.vq()));
        }
        checked += scan.pairs_checked;
    }
    let g = Graph::path(4).unwrap();
    let split = SplitSpec::new(&g, &[0, 1, 2], &[3]).unwrap();
    let v = necessary_check(&g, &split).map_err(|e| e.to_string())?;
    if v.kind != VerdictKind::NecessaryHolds {
        return Err(format!("P4 control: {:?}", v.kind));
    }
    Ok(format!("{specs} part-size lists; {checked} splits all fail; P4 control holds"))
}

fn elimination_suite() -> Outcome {
    let mut rng = CounterRng::new(8).unwrap();
    for inst in 0..1000 {
        let m = 1 + rng.below(6) as usize;
        let l = 1 + rng.below(4) as usize;
        let mut lambdas: Vec<f64> = Vec::with_capacity(m);
        for _ in 0..m {
            // Reuse values often so that sign pairs, repeats and zeros occur.
            let lam = match rng.below(5) {
                0 if !lambdas.is_empty() => -lambdas[rng.below(lambdas.len() as u64) as usize],
                1 if !lambdas.is_empty() => lambdas[rng.below(lambdas.len() as u64) as usize],
                2 => 0.0,
                _ => rng.uniform_in(-0.99, 0.99),
            };
            lambdas.push(lam);
        }
        let us: Vec<Vec<f64>> = (0..m).map(|_| (0..l + 1).map(|_| rng.normal()).collect()).collect();
        let res = eliminate(&lambdas, &us, l).map_err(|e| e.to_string())?;
        for k in 0..=8 {
            let (a, b) = (res.reconstruct(k), modal_sum(&lambdas, &us, l, k));
            let err = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            if err > 1e-10 {
                return Err(format!("instance {inst} k {k}: error {err}"));
            }
        }
    }
    let res = eliminate(&[0.5, -0.5, 0.25], &[vec![1.0, -1.0], vec![1.0, 1.0], vec![0.0, 2.0]], 2)
        .map_err(|e| e.to_string())?;
    let s2 = res.reconstruct(2);
    if s2 != [0.5, 0.125] {
        return Err(format!("worked example S[2] = {s2:?}"));
    }
    Ok("1000 random instances, k = 0..8; worked example S[2] = [0.5, 0.125]".into())
}

fn sign_suite() -> Outcome {
    let mut rng = CounterRng::new(9).unwrap();
    let mut checked = 0;
    while checked < 10_000 {
        let n = 2 + rng.below(7) as usize;
        let v: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        let mx = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mn = v.iter().copied().fold(f64::INFINITY, f64::min);
        if !(mx > 0.0 && mn < 0.0) {
            continue;
        }
        let scale = [0.01, 0.3, 1.0, 3.0, 100.0][rng.below(5) as usize];
        let u: Vec<f64> = (0..n).map(|_| scale * rng.normal()).collect();
        let gamma = rng.uniform_in(1e-4, 1.0) * (mx / mn).abs();
        let rep = sign_lemma_check(&v, &u, gamma).map_err(|e| e.to_string())?;
        if !rep.holds() {
            return Err(format!("v {v:?} u {u:?} gamma {gamma}: {rep:?}"));
        }
        checked += 1;
    }
    Ok(format!("{checked} random instances"))
}

fn nontermination_suite() -> Outcome {
    let p3 = Graph::path(3).unwrap();
    let p4 = Graph::path(4).unwrap();
    let mut cases = Vec::new();
    let mut seed = 1u64;
    while cases.len() < 100 {
        let g = if cases.len() % 2 == 0 { &p3 } else { &p4 };
        let s = sample_initial_state(g.n(), 1.0, SampleMode::NarrowSpread { center: 0.0, width: 0.5 }, seed).unwrap();
        seed += 1;
        let cert = nontermination_certificate(g, s.opinions(), 1.0).map_err(|e| e.to_string())?;
        if cert.certified {
            cases.push((g, s, cert.lambda2.abs()));
        }
    }
    let results: Vec<Result<f64, String>> = cases
        .par_iter()
        .map(|(g, s, l2)| {
            let rep = ExactSimulation::run(g, s, 10_000, 50).map_err(|e| e.to_string())?;
            if let Some(k) = rep.termination_step {
                return Err(format!("{:?}: terminated at {k}", s.opinions()));
            }
            let ratio = rep.decay_ratio.ok_or("no decay ratio")?;
            if (ratio - l2).abs() > 1e-3 {
                return Err(format!("{:?}: decay {ratio}, |lambda2| {l2}", s.opinions()));
            }
            Ok((ratio - l2).abs())
        })
        .collect();
    let mut worst: f64 = 0.0;
    for r in results {
        worst = worst.max(r?);
    }
    Ok(format!("100 states, no termination in 10^4 exact steps, max |ratio - |lambda2|| = {worst:.2e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 10] = [
        ("four-path merge times", four_path_merges, 1),
        ("constructed slow-merge states", constructed_merges, 1),
        ("energy certificates", energy_certificates, 30),
        ("conditional upper bound", conditional_bound, 5),
        ("conductance lower bound", conductance_consistency, 5),
        ("spectral decomposition", spectral_suite, 10),
        ("r-partite eigenbasis and merge scan", rpartite_suite, 60),
        ("elimination reconstruction", elimination_suite, 2),
        ("sign lemma property", sign_suite, 2),
        ("non-termination certificates", nontermination_suite, 20),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > Duration::from_secs(*budget) => {
                Err(format!("{msg}; took {elapsed:.2?}, budget {budget} s"))
            }
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} ({elapsed:.2?})", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} ({elapsed:.2?})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
