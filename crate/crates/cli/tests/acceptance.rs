//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Criteria 5-7 share one Task 1 run; 10-11 share one Task 4 run.

use std::collections::VecDeque;
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use sgs_cli::config::{CompareConfig, DiagnoseConfig, GraphModel, LowPassConfig, TrialClass};
use sgs_cli::tasks::compare::{run_compare, CompareResult};
use sgs_cli::tasks::diagnose::run_diagnose;
use sgs_cli::tasks::lowpass::run_lowpass;
use sgs_core::analytics::{ari, wasserstein_1d};
use sgs_core::embed::Objective;
use sgs_core::generators::{gen_caveman_variant, gen_erm};
use sgs_core::rng::{derive_seed, seeded, Rng as CoreRng};
use sgs_core::spectral::{eig_sym, quadratic_smoothness};
use sgs_core::stratify::{line_graph_adjacency, stratified_adjacencies};
use sgs_core::{Graph, GraphSignal, Method, RealSignal, SgsConfig, SgsEngine, VectorSignal};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Connected graph on `n` nodes: random spanning tree plus random extra pairs.
fn random_connected(rng: &mut CoreRng, n: usize) -> Graph {
    let mut pairs: Vec<(usize, usize)> = (1..n).map(|i| (i, rng.gen_range(0..i))).collect();
    let extras = rng.gen_range(0..=2 * n);
    for _ in 0..extras {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            pairs.push((a, b));
        }
    }
    Graph::from_edge_list(n, pairs).unwrap()
}

fn bfs(adj: &[Vec<usize>], source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if dist[w].is_none() {
                dist[w] = Some(dist[v].unwrap() + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

fn criterion_1() -> Outcome {
    let mut rng = seeded(101);
    let mut mismatches = 0;
    for _ in 0..50 {
        let n = rng.gen_range(2..=40);
        let g = random_connected(&mut rng, n);
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in g.edges() {
            adj[a].push(b);
            adj[b].push(a);
        }
        let dist: Vec<_> = (0..n).map(|s| bfs(&adj, s)).collect();
        let diameter = dist.iter().flatten().flatten().copied().max().unwrap();
        let fam = stratified_adjacencies(&g).unwrap();
        if fam.rho() != diameter {
            mismatches += 1;
            continue;
        }
        for st in fam.strata() {
            let a = st.adjacency_matrix();
            for x in 0..n {
                for y in 0..n {
                    let want = dist[x][y] == Some(st.k());
                    if (a[(x, y)] == 1.0) != want {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    outcome(mismatches == 0, format!("50 graphs, {mismatches} mismatched entries"))
}

fn criterion_2() -> Outcome {
    let mut rng = seeded(102);
    let (mut parseval, mut dirichlet) = (0.0f64, 0.0f64);
    for _ in 0..10 {
        let n = rng.gen_range(5..=30);
        let g = random_connected(&mut rng, n);
        let fam = stratified_adjacencies(&g).unwrap();
        let s: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for st in fam.strata() {
            let e = eig_sym(&st.laplacian()).unwrap();
            let u = &e.vectors;
            let coeff_norm = (0..n)
                .map(|i| (0..n).map(|x| u[(x, i)] * s[x]).sum::<f64>().powi(2))
                .sum::<f64>()
                .sqrt();
            let s_norm = s.iter().map(|x| x * x).sum::<f64>().sqrt();
            parseval = parseval.max((coeff_norm - s_norm).abs());
            for i in 0..n {
                let energy: f64 = st.edges().iter().map(|&(x, y)| (u[(x, i)] - u[(y, i)]).powi(2)).sum();
                dirichlet = dirichlet.max((energy - e.values[i]).abs());
            }
        }
    }
    outcome(
        parseval <= 1e-8 && dirichlet <= 1e-6,
        format!("max Parseval error {parseval:.2e} (tol 1e-8), max Dirichlet error {dirichlet:.2e} (tol 1e-6)"),
    )
}

fn criterion_3() -> Outcome {
    let g = Graph::from_edge_list(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
    let s1 = GraphSignal::from(RealSignal::new(vec![2f64.sqrt(), 0.0, 0.0, 0.0]).unwrap());
    let s2 = GraphSignal::from(RealSignal::new(vec![2.0, 1.0, 2.0, 1.0]).unwrap());
    let q1 = quadratic_smoothness(&g, &s1).unwrap();
    let q2 = quadratic_smoothness(&g, &s2).unwrap();
    let pass = (q1 - 4.0).abs() < 1e-12 && q2 == 4.0;
    outcome(pass, format!("s1 -> {q1}, s2 -> {q2}"))
}

fn criterion_4() -> Outcome {
    let mut rng = seeded(104);
    let mut mismatches = 0;
    for t in 0..50 {
        let n = rng.gen_range(3..=25);
        let g = random_connected(&mut rng, n);
        let fam = stratified_adjacencies(&g).unwrap();
        for st in fam.strata() {
            let inc = st.incidence(t);
            let product = inc.unsigned.transpose() * &inc.unsigned;
            let lg = line_graph_adjacency(&inc).unwrap();
            let edges = st.edges();
            for (i, a) in edges.iter().enumerate() {
                for (j, b) in edges.iter().enumerate() {
                    let shared = i != j && (a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1);
                    let want = if shared { 1.0 } else { 0.0 };
                    let minus = if i == j { 2.0 } else { 0.0 };
                    if product[(i, j)] - minus != want || lg[(i, j)] != want {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    outcome(mismatches == 0, format!("50 graphs, {mismatches} mismatched entries"))
}

fn criterion_5(r: &CompareResult) -> Outcome {
    let cos = r.cosine_summary();
    let pairs = r.pair_summary();
    let mut worst_best = f64::INFINITY;
    let mut worst_at = String::new();
    let mut absent = Vec::new();
    let mut undefined = Vec::new();
    for class in TrialClass::ALL {
        for k in 1..=4 {
            let cells: Vec<_> = cos.iter().filter(|((c, kk, _), _)| *c == class && *kk == k).collect();
            if cells.is_empty() {
                // No graph of this model has a stratum at this distance.
                absent.push(format!("{} K{k}", class.name()));
                continue;
            }
            let defined: Vec<f64> = cells.iter().filter(|(_, s)| s.n > 0).map(|(_, s)| s.mean).collect();
            if defined.is_empty() {
                // Every comparison had a zero-norm side, so there is no mean.
                undefined.push(format!("{} K{k}", class.name()));
                continue;
            }
            let best = defined.into_iter().fold(f64::NEG_INFINITY, f64::max);
            if best < worst_best {
                worst_best = best;
                worst_at = format!("{} K{k}", class.name());
            }
        }
    }
    let mut worst_pair = f64::INFINITY;
    let mut below = Vec::new();
    for ((class, k, a, b), s) in &pairs {
        let adj_ln = matches!((a, b), (Method::AdjDiff, Method::LnVx) | (Method::LnVx, Method::AdjDiff));
        if adj_ln && !class.is_pulse() && s.n > 0 {
            worst_pair = worst_pair.min(s.mean);
            if s.mean < 0.7 {
                below.push(format!("{} K{k} {:.3} (n={})", class.name(), s.mean, s.n));
            }
        }
    }
    outcome(
        worst_best >= 0.7 && worst_pair >= 0.7,
        format!(
            "min over class, K<=4 of best mean cosine {worst_best:.3} at {worst_at} (>= 0.7); \
             min ADJ-DIFF~LN-VX mean on random classes {worst_pair:.3} (>= 0.7), below at {below:?}; \
             no stratum at {absent:?}, no defined comparison at {undefined:?}"
        ),
    )
}

fn criterion_6(r: &CompareResult) -> Outcome {
    let mut values: [Vec<Option<f64>>; 2] = [Vec::new(), Vec::new()];
    for t in &r.trials {
        for st in &t.strata {
            for &(m, c) in &st.vs_gft {
                if m == Method::InAgg {
                    values[t.class.is_pulse() as usize].push(c);
                }
            }
        }
    }
    let mean = |v: &[Option<f64>]| {
        let xs: Vec<f64> = v.iter().flatten().copied().collect();
        xs.iter().sum::<f64>() / xs.len() as f64
    };
    let (rand, pulse) = (mean(&values[0]), mean(&values[1]));
    outcome(
        pulse - rand >= 0.1,
        format!("IN-AGG mean cosine pulse {pulse:.3}, random {rand:.3}, gap {:.3} (>= 0.1)", pulse - rand),
    )
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 0 {
        (v[m - 1] + v[m]) / 2.0
    } else {
        v[m]
    }
}

fn criterion_7(r: &CompareResult) -> Outcome {
    let by_k = r.ln_vx_mse_by_k(GraphModel::Erm);
    let mut pass = !by_k.is_empty();
    let mut parts = Vec::new();
    for (k, v) in &by_k {
        let med = median(v);
        let bound = if *k <= 4 { 0.005 } else { 0.05 };
        pass &= med <= bound;
        parts.push(format!("K{k} {med:.1e}"));
    }
    outcome(pass, format!("ERM median MSE {} (<= 0.005 K<=4, <= 0.05 all K)", parts.join(", ")))
}

fn criterion_8() -> Outcome {
    let g = gen_erm(20, 0.2, 8).unwrap();
    let fam = stratified_adjacencies(&g).unwrap();
    let engine = SgsEngine::prepare(&fam, &SgsConfig::default()).unwrap();
    let s = GraphSignal::from(VectorSignal::constant(20, &[0.4, -0.1, 0.7]).unwrap());
    let set = engine.apply(&s).unwrap();
    let mut bad = Vec::new();
    for m in Method::ELEMENTS {
        for k in 1..=fam.rho() {
            let mv = set.get(m, k).unwrap();
            if !mv.zero_norm || mv.raw.iter().any(|&x| x != 0.0) {
                bad.push(format!("{m} K{k}"));
            }
        }
    }
    outcome(bad.is_empty(), format!("{} strata x 4 methods, nonzero: {bad:?}", fam.rho()))
}

fn criterion_9() -> Outcome {
    let seeds: Vec<u64> = (0..5).map(|i| LowPassConfig::default().seed + i).collect();
    let mut counts = [0usize; 5];
    let mut notes = Vec::new();
    for &seed in &seeds {
        let cfg = LowPassConfig {
            seed,
            ..LowPassConfig::default()
        };
        let r = run_lowpass(&cfg).unwrap();
        let perfect = r.sweep.iter().any(|p| p.w_eps <= 0.3 + 1e-12 && p.ari >= 1.0 - 1e-12);
        let init_low = r.init_ari <= 0.1;
        let fiedler_up = r.fiedler2(&r.final_spectrum) > r.fiedler2(&r.init_spectrum);
        let ni = r.ens_norms(&r.init_spectrum);
        let nf = r.ens_norms(&r.final_spectrum);
        let k1_down = nf[0] < ni[0];
        let falling: Vec<usize> = (3..=ni.len()).filter(|&k| nf[k - 1] <= ni[k - 1]).collect();
        for (c, ok) in counts.iter_mut().zip([perfect, init_low, fiedler_up, k1_down, falling.is_empty()]) {
            *c += ok as usize;
        }
        notes.push(format!("seed {seed}: init ARI {:.2}, K>=3 not increasing {falling:?}", r.init_ari));
    }
    let majority = seeds.len() / 2 + 1;
    let labels = ["ARI=1 at w<=0.3", "init ARI<=0.1", "Fiedler-2 up", "|M^1| down", "|M^K| up K>=3"];
    let pass = counts.iter().all(|&c| c >= majority);
    let tally: Vec<String> = labels.iter().zip(counts).map(|(l, c)| format!("{l} {c}/5")).collect();
    outcome(pass, format!("{}; {}", tally.join(", "), notes.join("; ")))
}

fn criteria_10_11() -> (Outcome, Outcome) {
    let r = run_diagnose(&DiagnoseConfig::default()).unwrap();
    let (_, _, init_span) = r.span(|i| i.ari_init);
    let (_, _, final_span) = r.span(|i| i.ari_final);
    let c10 = outcome(
        final_span >= 0.4 && final_span > init_span,
        format!("ARI p90-p10 span final {final_span:.3} (>= 0.4), init {init_span:.3}"),
    );

    let worst = |name: &str| {
        let mut worst: Option<f64> = None;
        let mut count = 0;
        for a in r.analyses.iter().filter(|a| a.name == name) {
            for c in &a.comparisons {
                count += 1;
                let d = c.mean_distance.unwrap_or(f64::INFINITY);
                worst = Some(worst.map_or(d, |w: f64| w.max(d)));
            }
        }
        (worst, count)
    };
    let (w_init, n_init) = worst("task5_init");
    let (w_final, n_final) = worst("task7_final");
    let corr: Vec<Option<f64>> = [4, 5].iter().map(|&k| r.correlation("final", k, "ARI", "grad_norm")).collect();
    let pass = w_init.is_some_and(|w| w <= 0.05)
        && w_final.is_some_and(|w| w <= 0.08)
        && corr.iter().all(|c| c.is_some_and(|c| c >= 0.3));
    let c11 = outcome(
        pass,
        format!(
            "good {} bad {}; max Wasserstein init {w_init:.4?} over {n_init} (<= 0.05), final {w_final:.4?} \
             over {n_final} (<= 0.08); PPMCC(ARI, |grad s^K|) K4 {:.3?} K5 {:.3?} (>= 0.3)",
            r.good().len(),
            r.bad().len(),
            corr[0],
            corr[1]
        ),
    );
    (c10, c11)
}

/// Canonical labelings (restricted growth strings) of `n` points.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0]];
    for _ in 1..n {
        out = out
            .into_iter()
            .flat_map(|l: Vec<usize>| {
                let next = l.iter().max().unwrap() + 1;
                (0..=next).map(move |c| {
                    let mut l = l.clone();
                    l.push(c);
                    l
                })
            })
            .collect();
    }
    out
}

fn ari_by_pairs(a: &[usize], b: &[usize]) -> f64 {
    if a == b {
        return 1.0;
    }
    let n = a.len();
    let (mut both, mut in_a, mut in_b, mut pairs) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let (sa, sb) = (a[i] == a[j], b[i] == b[j]);
            pairs += 1.0;
            both += (sa && sb) as u8 as f64;
            in_a += sa as u8 as f64;
            in_b += sb as u8 as f64;
        }
    }
    let expected = in_a * in_b / pairs;
    (both - expected) / ((in_a + in_b) / 2.0 - expected)
}

fn quantile_integral(x: &[f64], y: &[f64], steps: usize) -> f64 {
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let q = |v: &[f64], p: f64| v[((p * v.len() as f64).floor() as usize).min(v.len() - 1)];
    (0..steps)
        .map(|i| {
            let p = (i as f64 + 0.5) / steps as f64;
            (q(&xs, p) - q(&ys, p)).abs()
        })
        .sum::<f64>()
        / steps as f64
}

fn criterion_12() -> Outcome {
    let mut ari_err = 0.0f64;
    let mut ari_cases = 0;
    for n in 2..=6 {
        let parts = partitions(n);
        for a in &parts {
            // A reversed copy exercises non-canonical label values.
            let a_rev: Vec<usize> = a.iter().map(|&x| 10 - x).collect();
            for b in &parts {
                ari_err = ari_err.max((ari(&a_rev, b).unwrap() - ari_by_pairs(a, b)).abs());
                ari_cases += 1;
            }
        }
    }

    let mut rng = seeded(112);
    let mut w_err = 0.0f64;
    for _ in 0..100 {
        let nx = rng.gen_range(1..=8);
        let ny = rng.gen_range(1..=8);
        let x: Vec<f64> = (0..nx).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let y: Vec<f64> = (0..ny).map(|_| rng.gen_range(-3.0..3.0)).collect();
        // 840 is a multiple of every sample size up to 8, so midpoints never
        // straddle a quantile jump.
        w_err = w_err.max((wasserstein_1d(&x, &y).unwrap() - quantile_integral(&x, &y, 840)).abs());
    }

    let cave = gen_caveman_variant();
    let g = &cave.graph;
    let mut g_err = 0.0f64;
    for trial in 0..10u64 {
        let mut r = seeded(derive_seed(113, trial));
        let x: Vec<f64> = (0..g.num_nodes() * 3).map(|_| r.gen_range(-1.0..1.0)).collect();
        let obj = Objective::new(g, 3, 1.0, if trial % 2 == 0 { 0.0 } else { 0.5 });
        let mut grad = vec![0.0; x.len()];
        obj.evaluate(&x, &mut grad);
        let mut scratch = vec![0.0; x.len()];
        let h = 1e-5;
        for i in 0..x.len() {
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[i] += h;
            xm[i] -= h;
            let fd = (obj.evaluate(&xp, &mut scratch).0 - obj.evaluate(&xm, &mut scratch).0) / (2.0 * h);
            let scale = grad[i].abs().max(fd.abs()).max(1e-3);
            g_err = g_err.max((grad[i] - fd).abs() / scale);
        }
    }
    outcome(
        ari_err < 1e-12 && w_err < 1e-9 && g_err < 1e-4,
        format!(
            "ARI max error {ari_err:.1e} over {ari_cases} pairs; Wasserstein max error {w_err:.1e} over 100 pairs; \
             gradient max relative error {g_err:.1e} (< 1e-4)"
        ),
    )
}

fn report(n: usize, started: Instant, o: &Outcome, failures: &mut Vec<usize>) {
    let verdict = if o.pass { "PASS" } else { "FAIL" };
    println!("criterion {n}: {verdict} ({:.1}s) {}", started.elapsed().as_secs_f64(), o.detail);
    if !o.pass {
        failures.push(n);
    }
}

fn main() -> ExitCode {
    let mut failures = Vec::new();
    let quick: [(usize, fn() -> Outcome); 4] = [(1, criterion_1), (2, criterion_2), (3, criterion_3), (4, criterion_4)];
    for (n, f) in quick {
        let t = Instant::now();
        report(n, t, &f(), &mut failures);
    }

    let t = Instant::now();
    let compare = run_compare(&CompareConfig::default()).unwrap();
    report(5, t, &criterion_5(&compare), &mut failures);
    let t = Instant::now();
    report(6, t, &criterion_6(&compare), &mut failures);
    report(7, t, &criterion_7(&compare), &mut failures);

    let t = Instant::now();
    report(8, t, &criterion_8(), &mut failures);
    let t = Instant::now();
    report(9, t, &criterion_9(), &mut failures);
    let t = Instant::now();
    let (c10, c11) = criteria_10_11();
    report(10, t, &c10, &mut failures);
    report(11, t, &c11, &mut failures);
    let t = Instant::now();
    report(12, t, &criterion_12(), &mut failures);

    if failures.is_empty() {
        println!("acceptance: all 12 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failures:?}");
        ExitCode::FAILURE
    }
}
