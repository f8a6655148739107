//! Acceptance suite. Runs every criterion in sequence so wall times are not
//! distorted by other tests, prints one line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use heavymean::data::{GroupedDataset, PointSet};
use heavymean::harness::{
    exponent_fit, privacy_audit, run_trials, sample_complexity_search, AuditMechanism, DistributionRef, EstimatorId,
    ExperimentConfig, SearchOptions, SuccessSummary,
};
use heavymean::mechanisms::{exponential_mechanism, utility_gap, PrivacyBudget};
use heavymean::moments::{
    packing_product_instance, random_unit_moment_discrete, truncated_mean_oracle, two_point_hard_instance, MomentModel,
    TestDistribution,
};
use heavymean::multivariate_pure::{match_outcome, CandidateGrid, MatchOutcome, ScoreTable, TIE_RADIUS};
use heavymean::multivariate_zcdp::{statistic_sensitivity, truncated_statistic};
use heavymean::rng::{seeded, SimRng};
use heavymean::univariate::TruncationParams;

type Check = Result<(bool, String), String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn config(
    estimator: EstimatorId,
    dist: TestDistribution,
    k: f64,
    budget: PrivacyBudget,
    alpha: f64,
    trials: usize,
    seed: u64,
) -> ExperimentConfig {
    ExperimentConfig {
        estimator,
        distribution: DistributionRef::Inline(dist),
        model: MomentModel::unit(k, 10.0).unwrap(),
        budget,
        alpha,
        beta: 0.1,
        trials,
        seed,
        n: None,
        constants: Default::default(),
        fallback_below: None,
        grid_cap: None,
    }
}

fn success(config: &ExperimentConfig) -> Result<SuccessSummary, String> {
    let records = run_trials(config).map_err(fail)?;
    Ok(SuccessSummary::from_records(&records))
}

fn univariate_accuracy() -> Check {
    let (_, two_point) = two_point_hard_instance(0.2, 2.0).map_err(fail)?;
    let pareto = TestDistribution::centered_pareto(2.0, 1.0, 0.0).map_err(fail)?;
    let budget = PrivacyBudget::pure(1.0).map_err(fail)?;
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, dist, seed) in [("two-point", two_point, 1), ("pareto", pareto, 2)] {
        let c = config(EstimatorId::Univariate, dist, 2.0, budget, 0.2, 200, seed);
        let s = success(&c)?;
        pass &= s.rate >= 0.85;
        parts.push(format!("{name} {}/{} at n={}", s.successes, s.trials, c.sample_size().map_err(fail)?));
    }
    Ok((pass, parts.join(", ")))
}

fn privacy_exponent() -> Check {
    let budget = PrivacyBudget::pure(0.1).map_err(fail)?;
    let options = SearchOptions { refine: 5, ..Default::default() };
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, want, tol) in [(2.0, 2.0, 0.3), (4.0, 4.0 / 3.0, 0.25)] {
        let mut pairs = Vec::new();
        for alpha in [0.4, 0.2, 0.1, 0.05] {
            let (_, dist) = two_point_hard_instance(alpha, k).map_err(fail)?;
            let c = config(EstimatorId::Univariate, dist, k, budget, alpha, 200, 11);
            let found = sample_complexity_search(&c, &options).map_err(fail)?;
            pairs.push((alpha, found.n_star));
        }
        let fit = exponent_fit(k, &pairs).map_err(fail)?;
        pass &= (fit.slope - want).abs() <= tol;
        let ns: Vec<String> = pairs.iter().map(|(a, n)| format!("{a}:{n}")).collect();
        parts.push(format!("k={k} slope {:.3} (want {want:.3}±{tol}) n*=[{}]", fit.slope, ns.join(" ")));
    }
    Ok((pass, parts.join("; ")))
}

fn truncation_bias() -> Check {
    let mut rng = seeded(3);
    let mut ok = 0;
    let mut worst: f64 = 0.0;
    let cases = 50;
    for i in 0..cases {
        let k = [2.0, 3.0, 4.0][i % 3];
        let dist = random_unit_moment_discrete(k, &mut rng).map_err(fail)?;
        let moment = dist.kth_central_moment(k).map_err(fail)?;
        if (moment - 1.0).abs() > 1e-9 {
            return Err(format!("fixture {i} has k-th moment {moment}"));
        }
        let mu = dist.mean().map_err(fail)?;
        let tau = rng.random_range(0.02..0.0625);
        let probe = TruncationParams::new(0.0, 6.0, tau, k).map_err(fail)?;
        // Offset the center away from the farthest atom so the far tail is clipped.
        let atoms = dist.atoms().expect("discrete fixture");
        let far = atoms.iter().map(|(x, _)| x - mu).fold(0.0, |a: f64, x| if x.abs() > a.abs() { x } else { a });
        let center = mu - far.signum() * rng.random_range(0.3..=0.5) * probe.radius;
        let radius = TruncationParams::new(center, 6.0, tau, k).map_err(fail)?.radius;
        let z = truncated_mean_oracle(&dist, center, radius).map_err(fail)?;
        let bias = (mu - z).abs();
        worst = worst.max(bias / tau);
        if bias <= tau {
            ok += 1;
        }
    }
    Ok((ok == cases, format!("{ok}/{cases} within tau, worst |bias|/tau {worst:.3}")))
}

struct GameInstance {
    groups: GroupedDataset,
    grid: CandidateGrid,
    xi: f64,
    alpha: f64,
    scale: f64,
}

fn random_point(rng: &mut SimRng, d: usize, scale: f64) -> Vec<f64> {
    let spread = if rng.random_bool(0.1) { 5.0 } else { 2.0 };
    (0..d).map(|_| rng.random_range(-spread..spread) * scale).collect()
}

fn random_game(rng: &mut SimRng, max_n: usize, max_d: usize, max_grid: usize) -> GameInstance {
    let d = rng.random_range(1..=max_d);
    let sizes: Vec<usize> = [1, 3, 5].into_iter().filter(|&m| m <= max_n).collect();
    let m = sizes[rng.random_range(0..sizes.len())];
    let g = rng.random_range(1..=max_n / m);
    let alpha = rng.random_range(0.05..0.4);
    let scale = TIE_RADIUS * alpha;
    let rows: Vec<Vec<f64>> = (0..m * g).map(|_| random_point(rng, d, scale)).collect();
    let cands: Vec<Vec<f64>> = (0..rng.random_range(2..=max_grid))
        .map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0) * scale).collect())
        .collect();
    let groups = GroupedDataset::split(&PointSet::from_rows(&rows).unwrap(), m).unwrap();
    GameInstance {
        groups,
        grid: CandidateGrid::from_points(&cands).unwrap(),
        xi: rng.random_range(0.5..3.0) * scale,
        alpha,
        scale,
    }
}

fn with_rows(groups: &GroupedDataset, edits: &[(usize, &[f64])]) -> GroupedDataset {
    let mut out = groups.clone();
    for &(i, row) in edits {
        out.points_mut().row_mut(i).copy_from_slice(row);
    }
    out
}

fn combinations(n: usize, b: usize) -> Vec<Vec<usize>> {
    if b == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for last in b - 1..n {
        for mut head in combinations(last, b - 1) {
            head.push(last);
            out.push(head);
        }
    }
    out
}

/// Fewest changed points, up to `budget`, after which `p` loses to `q`:
/// every subset of that size, every changed point tried at a few placements.
fn brute_force_defeat(inst: &GameInstance, p: &[f64], q: &[f64], budget: usize) -> Option<usize> {
    let dist: f64 = p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let far: Vec<f64> = p.iter().zip(q).map(|(a, b)| a + 2.0 * inst.xi * (b - a) / dist).collect();
    let back: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - 2.0 * inst.xi * (b - a) / dist).collect();
    let placements: [&[f64]; 4] = [&far, q, p, &back];
    let n = inst.groups.len();
    for b in 0..=budget.min(n) {
        for subset in combinations(n, b) {
            let mut choice = vec![0usize; b];
            loop {
                let edits: Vec<(usize, &[f64])> =
                    subset.iter().zip(&choice).map(|(&i, &c)| (i, placements[c])).collect();
                let changed = with_rows(&inst.groups, &edits);
                if match_outcome(&changed, p, q, inst.xi, inst.alpha).unwrap() == MatchOutcome::Lose {
                    return Some(b);
                }
                let Some(pos) = choice.iter().position(|&c| c + 1 < placements.len()) else { break };
                choice[pos] += 1;
                choice[..pos].iter_mut().for_each(|c| *c = 0);
            }
        }
    }
    None
}

fn score_sensitivity() -> Check {
    let mut rng = seeded(4);
    let mut violations = 0;
    let mut max_change = 0usize;
    for _ in 0..1000 {
        let inst = random_game(&mut rng, 60, 3, 12);
        let i = rng.random_range(0..inst.groups.len());
        let fresh = random_point(&mut rng, inst.groups.dim(), inst.scale);
        let neighbor = with_rows(&inst.groups, &[(i, &fresh)]);
        let a = ScoreTable::compute(&inst.groups, &inst.grid, inst.xi, inst.alpha).map_err(fail)?;
        let b = ScoreTable::compute(&neighbor, &inst.grid, inst.xi, inst.alpha).map_err(fail)?;
        for (x, y) in a.scores.iter().zip(&b.scores) {
            let change = x.abs_diff(*y);
            max_change = max_change.max(change);
            if change > 1 {
                violations += 1;
            }
        }
    }

    let budget = 3;
    let mut instances = 0;
    let mut mismatches = 0;
    let mut interior = 0;
    for _ in 0..400 {
        let inst = random_game(&mut rng, 8, 3, 9);
        let table = ScoreTable::compute(&inst.groups, &inst.grid, inst.xi, inst.alpha).map_err(fail)?;
        for (pi, p) in inst.grid.iter().enumerate() {
            let best = inst
                .grid
                .iter()
                .filter(|q| {
                    let d: f64 = p.iter().zip(*q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                    d > TIE_RADIUS * inst.alpha
                })
                .filter_map(|q| brute_force_defeat(&inst, p, q, budget))
                .min();
            let got = table.scores[pi];
            let agrees = match best {
                Some(b) => got == b.min(table.cap),
                None if table.cap <= budget => got == table.cap,
                None => got > budget,
            };
            if !agrees {
                mismatches += 1;
            }
            if got > 0 && got < table.cap {
                interior += 1;
            }
        }
        instances += 1;
    }
    Ok((
        violations == 0 && mismatches == 0,
        format!(
            "1000 neighbor pairs: {violations} violations, max change {max_change}; \
             brute force on {instances} instances: {mismatches} mismatches, \
             {interior} scores strictly between 0 and the cap"
        ),
    ))
}

fn zcdp_accuracy() -> Check {
    let (_, coord) = two_point_hard_instance(0.25, 2.0).map_err(fail)?;
    let dist = TestDistribution::Product { coords: vec![coord; 8] };
    let budget = PrivacyBudget::zcdp(1.0).map_err(fail)?;
    let c = config(EstimatorId::HighDim, dist, 2.0, budget, 0.5, 200, 5);
    let s = success(&c)?;
    Ok((
        s.rate >= 0.65,
        format!(
            "{}/{} at n={}, 95% CI [{:.3}, {:.3}]",
            s.successes,
            s.trials,
            c.sample_size().map_err(fail)?,
            s.ci_low,
            s.ci_high
        ),
    ))
}

fn zcdp_sensitivity() -> Check {
    let mut rng = seeded(6);
    let mut pairs = 0usize;
    let mut violations = 0usize;
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let n = rng.random_range(4..=40);
        let d = rng.random_range(1..=4);
        let r = rng.random_range(0.5..3.0);
        let center: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let near =
            |rng: &mut SimRng| -> Vec<f64> { center.iter().map(|c| c + rng.random_range(-1.5..1.5) * r).collect() };
        let rows: Vec<Vec<f64>> = (0..n).map(|_| near(&mut rng)).collect();
        let mut pool = rows.clone();
        pool.extend((0..4).map(|_| near(&mut rng)));
        pool.push(center.clone());
        pool.push(center.iter().map(|c| c + 10.0 * r).collect());
        let base = PointSet::from_rows(&rows).map_err(fail)?;
        let t = truncated_statistic(&base, &center, r).map_err(fail)?;
        for i in 0..n {
            for replacement in &pool {
                let mut swapped = base.clone();
                swapped.row_mut(i).copy_from_slice(replacement);
                let t2 = truncated_statistic(&swapped, &center, r).map_err(fail)?;
                let change = t.value.iter().zip(&t2.value).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                let ell = t.ell.min(t2.ell);
                let bound = statistic_sensitivity(r, n).max(2.0 * r / ell);
                worst = worst.max(change / bound);
                if change > bound * (1.0 + 1e-12) {
                    violations += 1;
                }
                pairs += 1;
            }
        }
    }
    Ok((violations == 0, format!("{pairs} neighbor pairs, {violations} violations, worst change/bound {worst:.4}")))
}

fn pure_accuracy() -> Check {
    let budget = PrivacyBudget::pure(2.0).map_err(fail)?;
    let (_, coord) = two_point_hard_instance(0.2, 2.0).map_err(fail)?;
    let laws = [
        (
            "point mass",
            TestDistribution::Product {
                coords: vec![TestDistribution::PointMass { at: 1.5 }, TestDistribution::PointMass { at: -2.0 }],
            },
        ),
        ("two-point product", TestDistribution::Product { coords: vec![coord.clone(), coord] }),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (name, dist)) in laws.into_iter().enumerate() {
        let c = config(EstimatorId::HighDimPure, dist, 2.0, budget, 0.2, 100, 70 + i as u64);
        let s = success(&c)?;
        pass &= s.rate >= 0.85;
        parts.push(format!("{name} {}/{} at n={}", s.successes, s.trials, c.sample_size().map_err(fail)?));
    }
    Ok((pass, parts.join(", ")))
}

fn mechanism_audits() -> Check {
    let draws = 1_000_000;
    let laplace = privacy_audit(AuditMechanism::Laplace, 1.0, draws, 8).map_err(fail)?;
    let histogram = privacy_audit(AuditMechanism::HistogramArgmax, 1.0, draws, 9).map_err(fail)?;
    let broken = privacy_audit(AuditMechanism::LaplaceHalfNoise, 1.0, draws, 10).map_err(fail)?;
    let pass = !laplace.violation && !histogram.violation && broken.violation;
    Ok((
        pass,
        format!(
            "laplace lcb {:.3} flagged={}, histogram lcb {:.3} flagged={}, half-noise lcb {:.3} flagged={}",
            laplace.max_lower_bound,
            laplace.violation,
            histogram.max_lower_bound,
            histogram.violation,
            broken.max_lower_bound,
            broken.violation
        ),
    ))
}

fn exponential_utility() -> Check {
    let mut rng = seeded(12);
    let (epsilon, beta, trials) = (1.0, 0.1, 500);
    let gap = utility_gap(25, 1.0, epsilon, beta);
    let mut ok = 0;
    for _ in 0..trials {
        let top = rng.random_range(5..=60);
        let scores: Vec<f64> = (0..25).map(|_| rng.random_range(0..=top) as f64).collect();
        let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pick = exponential_mechanism(&scores, 1.0, epsilon, &mut rng).map_err(fail)?;
        if scores[pick] >= best - gap {
            ok += 1;
        }
    }
    let rate = ok as f64 / trials as f64;
    Ok((rate >= 1.0 - beta - 0.02, format!("{ok}/{trials} within gap {gap:.3}")))
}

fn hard_fixtures() -> Check {
    let tol = 1e-12;
    let mut checked = 0;
    for k in [2.0, 3.0, 4.0] {
        for alpha in [0.05, 0.1, 0.2] {
            let (q0, q1) = two_point_hard_instance(alpha, k).map_err(fail)?;
            let TestDistribution::TwoPoint { high: tau, p_high: p, .. } = q1 else {
                return Err("unexpected fixture shape".into());
            };
            let mass = p * tau.powf(k);
            let moments = [
                q0.certified_moment(k).map_err(fail)?,
                q1.certified_moment(k).map_err(fail)?,
                q1.kth_central_moment(k).map_err(fail)?,
            ];
            let gap = q1.mean().map_err(fail)? - q0.mean().map_err(fail)?;
            if mass > 1.0 + tol || moments.iter().any(|&m| m > 1.0 + tol) || (gap - alpha).abs() > tol * alpha {
                return Ok((false, format!("k={k} alpha={alpha}: p tau^k {mass}, moments {moments:?}, gap {gap}")));
            }
            checked += 1;
        }
    }
    let mut rng = seeded(13);
    for d in [4usize, 8, 16, 32] {
        for alpha in [0.05, 0.1, 0.2] {
            let bits: Vec<bool> = (0..d).map(|_| rng.random()).collect();
            let mut flip: Vec<usize> = (0..d).collect();
            flip.shuffle(&mut rng);
            let mut other = bits.clone();
            flip[..d / 4].iter().for_each(|&j| other[j] = !other[j]);
            let a = packing_product_instance(&bits, alpha).map_err(fail)?;
            let b = packing_product_instance(&other, alpha).map_err(fail)?;
            let var = a.certified_moment(2.0).map_err(fail)?.max(b.certified_moment(2.0).map_err(fail)?);
            let (ma, mb) = (a.mean_vector().map_err(fail)?, b.mean_vector().map_err(fail)?);
            let dist = ma.iter().zip(&mb).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            if var > 1.0 + tol || (dist - alpha / 2.0).abs() > tol {
                return Ok((false, format!("packing d={d} alpha={alpha}: variance {var}, mean distance {dist}")));
            }
            checked += 1;
        }
    }
    Ok((true, format!("{checked} fixtures certified")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("univariate accuracy", Duration::from_secs(60), univariate_accuracy),
        ("privacy-term exponent", Duration::from_secs(15 * 60), privacy_exponent),
        ("truncation bias", Duration::from_secs(5), truncation_bias),
        ("score sensitivity", Duration::from_secs(10 * 60), score_sensitivity),
        ("zcdp accuracy", Duration::from_secs(5 * 60), zcdp_accuracy),
        ("zcdp sensitivity", Duration::from_secs(2 * 60), zcdp_sensitivity),
        ("pure-dp accuracy", Duration::from_secs(10 * 60), pure_accuracy),
        ("mechanism audits", Duration::from_secs(3 * 60), mechanism_audits),
        ("exponential utility", Duration::from_secs(30), exponential_utility),
        ("hard-instance fixtures", Duration::from_secs(1), hard_fixtures),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        if only.is_some_and(|o| o != i + 1) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let (pass, detail) = match outcome {
            Ok((pass, detail)) => (pass && in_time, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {name}: {} ({detail}; {:.1}s of {}s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
