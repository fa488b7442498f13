//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any failed.

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ringvcs_cli::campaign::{run_campaign, CampaignSummary, AGGREGATE_FILE};
use ringvcs_cli::plan::{ModelChoice, NodeCounts, PlanArgs};
use ringvcs_cli::trend::density_trend;
use ringvcs_core::collisions::{coordinate_space_size, expected_collisions, expected_collisions_exact};
use ringvcs_core::graph::{Adjacency, NodeId};
use ringvcs_core::mapper::{census_fractions, NeighborCensus};
use ringvcs_core::sim::{
    build_links, place_nodes, run_initialization, Field, Point, PropagationConfig, ProtocolConfig,
    SimOutcome, SINK,
};
use ringvcs_core::table::TableSet;
use ringvcs_core::{area_fractions, area_inner, area_outer, assign_coordinate, Error, RingModelParams};

const R: f64 = 10.0;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

// ---------------------------------------------------------------------------
// Independent geometry oracle: integrate the arc of each sink-centred circle
// that falls inside the node's disk, split at ring boundaries.

/// Half-angle of the arc of the circle `|x| = r` lying inside the disk of
/// radius `R` centred at distance `rho` from the origin.
fn half_arc(r: f64, rho: f64) -> f64 {
    if r + rho <= R {
        return PI;
    }
    if r <= rho - R || r >= rho + R || r == 0.0 {
        return 0.0;
    }
    ((r * r + rho * rho - R * R) / (2.0 * r * rho)).clamp(-1.0, 1.0).acos()
}

/// `∫_a^b 2 r φ(r) dr` with `r = a + (b-a)(1 - cos t)/2`, which tames the
/// square-root behaviour at tangency points.
fn radial_segment(a: f64, b: f64, rho: f64) -> f64 {
    const PANELS: usize = 4000;
    let h = PI / PANELS as f64;
    let f = |t: f64| {
        let r = a + (b - a) * (1.0 - t.cos()) / 2.0;
        2.0 * r * half_arc(r, rho) * (b - a) / 2.0 * t.sin()
    };
    let mut s = f(0.0) + f(PI);
    for i in 1..PANELS {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `(A, B, C)` areas for ring `n` and offset `delta`.
fn radial_areas(n: u32, delta: f64) -> [f64; 3] {
    let rho = f64::from(n - 1) * R + delta;
    let (inner, outer) = (f64::from(n - 1) * R, f64::from(n) * R);
    let mut cuts = vec![0.0, (rho - R).abs(), rho + R, inner, outer];
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut areas = [0.0; 3];
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let slot = if mid < inner { 0 } else if mid < outer { 1 } else { 2 };
        areas[slot] += radial_segment(w[0], w[1], rho);
    }
    areas
}

/// Intersection area of two disks with radii `r1`, `r2` at distance `d`.
fn lens(r1: f64, r2: f64, d: f64) -> f64 {
    if d >= r1 + r2 {
        return 0.0;
    }
    if d <= (r1 - r2).abs() {
        return PI * r1.min(r2).powi(2);
    }
    let a1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).acos();
    let a2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).acos();
    let k = ((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)).sqrt();
    r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * k
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let disk = PI * R * R;
    let mut worst_sum = 0.0_f64;
    let mut worst_oracle = 0.0_f64;
    let mut negative = false;
    for n in 1..=5 {
        let params = RingModelParams::new(R, n).unwrap();
        for delta in [0.0, R / 4.0, R / 2.0, 3.0 * R / 4.0, 0.99 * R] {
            let a = area_inner(&params, delta).unwrap();
            let c = area_outer(&params, delta).unwrap();
            let f = area_fractions(&params, delta).unwrap();
            let b = f.same * disk;
            negative |= a < 0.0 || b < 0.0 || c < 0.0;
            worst_sum = worst_sum.max(((a + b + c) - disk).abs() / disk);
            let oracle = radial_areas(n, delta);
            worst_sum = worst_sum.max((oracle.iter().sum::<f64>() - disk).abs() / disk);
            for (got, want) in [a, b, c].into_iter().zip(oracle) {
                worst_oracle = worst_oracle.max((got - want).abs() / disk);
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst_sum < 1e-6 && worst_oracle < 1e-6 && !negative && elapsed < Duration::from_secs(10),
        format!(
            "max |A+B+C-πR²|/πR² = {worst_sum:.2e}, max deviation from radial oracle {worst_oracle:.2e}, {elapsed:.2?}"
        ),
    )
}

fn mc_fractions(n: u32, delta: f64, samples: u64, seed: u64) -> [f64; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = f64::from(n - 1) * R + delta;
    let (inner, outer) = (f64::from(n - 1) * R, f64::from(n) * R);
    let mut hits = [0u64; 3];
    let mut taken = 0;
    while taken < samples {
        let x = rng.random_range(-R..R);
        let y = rng.random_range(-R..R);
        if x * x + y * y >= R * R {
            continue;
        }
        taken += 1;
        let r = x.hypot(y + rho);
        hits[if r < inner { 0 } else if r < outer { 1 } else { 2 }] += 1;
    }
    hits.map(|h| h as f64 / samples as f64)
}

fn criterion_2() -> Verdict {
    let disk = PI * R * R;
    let params = RingModelParams::new(R, 2).unwrap();
    let mut worst_lens = 0.0_f64;
    for delta in [0.0, 2.5, 5.0, 7.5, 9.9] {
        let got = area_inner(&params, delta).unwrap();
        worst_lens = worst_lens.max((got - lens(R, R, R + delta)).abs() / lens(R, R, R + delta));
    }
    let at_zero = area_inner(&params, 0.0).unwrap();

    const SAMPLES: u64 = 10_000_000;
    let mut worst_sigma = 0.0_f64;
    for (i, (n, delta)) in [(1, 2.5), (1, 7.5), (3, 2.5), (3, 7.5), (4, 5.0), (5, 9.0)]
        .into_iter()
        .enumerate()
    {
        let p = RingModelParams::new(R, n).unwrap();
        let f = area_fractions(&p, delta).unwrap();
        let mc = mc_fractions(n, delta, SAMPLES, 1000 + i as u64);
        for (got, est) in f.as_array().into_iter().zip(mc) {
            let sigma = (est * (1.0 - est) / SAMPLES as f64).sqrt().max(1.0 / SAMPLES as f64);
            worst_sigma = worst_sigma.max((got - est).abs() / sigma);
        }
    }
    verdict(
        worst_lens < 1e-4 && worst_sigma <= 3.0 && (at_zero - 122.837).abs() < 1e-3,
        format!(
            "A(n=2, offset 0) = {at_zero:.3} (πR² = {disk:.3}), max lens rel err {worst_lens:.2e}, max MC deviation {worst_sigma:.2}σ over 10⁷ samples"
        ),
    )
}

fn criterion_3() -> Verdict {
    let mut worst_c = 0.0_f64;
    let mut worst_a = 0.0_f64;
    for n in 1..=5 {
        let p = RingModelParams::new(R, n).unwrap();
        worst_c = worst_c.max(area_fractions(&p, 0.0).unwrap().outer.abs());
        worst_a = worst_a.max(area_fractions(&p, R * (1.0 - 1e-9)).unwrap().inner.abs());
    }
    verdict(
        worst_c < 1e-6 && worst_a < 1e-6,
        format!("max frac_C(0) = {worst_c:.2e}, max frac_A(R⁻) = {worst_a:.2e}"),
    )
}

fn criterion_4() -> Verdict {
    let mut enumeration_ok = true;
    for k in 1..=50u64 {
        let mut count = 0;
        for m in 1..=k {
            for o in 0..=k {
                for p in 0..=k {
                    if m + o + p == k {
                        count += 1;
                    }
                }
            }
        }
        enumeration_ok &= coordinate_space_size(k).unwrap() == count;
    }
    let half = expected_collisions_exact(3).unwrap() == Ratio::new(1, 2);
    let below_one = (2..=10_000).all(|k| expected_collisions(k).unwrap() < 1.0);
    verdict(
        enumeration_ok && half && below_one,
        format!(
            "N(k) matches enumeration for k ≤ 50: {enumeration_ok}, E[X](3) = 1/2: {half}, E[X] < 1 for k in 2..=10000: {below_one}"
        ),
    )
}

fn criterion_5() -> Verdict {
    let start = Instant::now();
    const TRIALS: u64 = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0_f64;
    let mut parts = Vec::new();
    for k in [5u64, 20, 50] {
        let space = coordinate_space_size(k).unwrap() as usize;
        let mut bins = vec![0u64; space];
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..TRIALS {
            bins.iter_mut().for_each(|b| *b = 0);
            for _ in 0..k {
                bins[rng.random_range(0..space)] += 1;
            }
            let pairs = bins.iter().map(|&c| c * c.saturating_sub(1) / 2).sum::<u64>() as f64;
            sum += pairs;
            sum_sq += pairs * pairs;
        }
        let mean = sum / TRIALS as f64;
        let var = (sum_sq - sum * sum / TRIALS as f64) / (TRIALS - 1) as f64;
        let expected = (k - 1) as f64 / (k + 1) as f64;
        let z = (mean - expected).abs() / (var / TRIALS as f64).sqrt();
        worst = worst.max(z);
        parts.push(format!("k={k}: {mean:.4} vs {expected:.4} ({z:.2}σ)"));
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 3.0 && elapsed < Duration::from_secs(60),
        format!("{}, {elapsed:.2?}", parts.join(", ")),
    )
}

fn criterion_6() -> Verdict {
    const PAIRS: usize = 100_000;
    let delta = 0.1;
    let tables = TableSet::build(R, 5, delta).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut distinct_entries, mut equal_coords, mut violations) = (0u64, 0u64, 0u64);
    let mut max_scaled = 0.0_f64;
    for i in 0..PAIRS {
        let ring = rng.random_range(1..=5u32);
        let a = NeighborCensus::new(
            ring,
            rng.random_range(1..=40),
            rng.random_range(0..=40),
            rng.random_range(0..=40),
        );
        // Half the pairs are near neighbours in census space, so they often
        // land on the same or adjacent table entries.
        let b = if i % 2 == 0 {
            let jitter = |x: u32, lo: u32, rng: &mut ChaCha8Rng| (x as i64 + rng.random_range(-1..=1)).max(lo as i64) as u32;
            NeighborCensus::new(
                ring,
                jitter(a.inner, 1, &mut rng),
                jitter(a.same, 0, &mut rng),
                jitter(a.outer, 0, &mut rng),
            )
        } else {
            NeighborCensus::new(
                ring,
                rng.random_range(1..=40),
                rng.random_range(0..=40),
                rng.random_range(0..=40),
            )
        };
        let table = tables.for_ring(ring);
        let ma = assign_coordinate(&a, table, R).unwrap();
        let mb = assign_coordinate(&b, table, R).unwrap();
        max_scaled = max_scaled.max(ma.scaled_distance).max(mb.scaled_distance);
        if ma.matched_offset != mb.matched_offset {
            distinct_entries += 1;
            if ma.coordinate == mb.coordinate {
                violations += 1;
            }
        }
        if ma.coordinate == mb.coordinate {
            equal_coords += 1;
            if census_fractions(&a).unwrap() != census_fractions(&b).unwrap() {
                violations += 1;
            }
        }
    }
    verdict(
        violations == 0 && max_scaled < delta,
        format!(
            "{PAIRS} pairs, {distinct_entries} on distinct entries, {equal_coords} equal coordinates (all from equal proportions), {violations} violations, max scaled distance {max_scaled:.4} < {delta}"
        ),
    )
}

fn bfs(g: &Adjacency) -> BTreeMap<NodeId, u32> {
    let mut hops = BTreeMap::from([(SINK, 0u32)]);
    let mut queue = VecDeque::from([SINK]);
    while let Some(u) = queue.pop_front() {
        let h = hops[&u];
        for &v in g.neighbors(u) {
            hops.entry(v).or_insert_with(|| {
                queue.push_back(v);
                h + 1
            });
        }
    }
    hops
}

fn criterion_7() -> Verdict {
    let field = Field::new(50.0, 50.0).unwrap();
    let sink = Point::new(25.0, 25.0);
    let (mut ring_mismatch, mut census_mismatch, mut packet_mismatch, mut checked) = (0, 0, 0, 0);
    for i in 0..100u64 {
        let count = 50 + (i as usize * 250) / 99;
        let prop = if i % 2 == 0 {
            PropagationConfig::free_space(R)
        } else {
            PropagationConfig::shadowing(R, 3.0, 4.0)
        };
        let topo = place_nodes(count, field, sink, 7000 + i).unwrap();
        let g = build_links(&topo, &prop, 8000 + i).unwrap();
        let outcome: SimOutcome = match run_initialization(&topo, &g, &ProtocolConfig::wave()) {
            Ok(o) => o,
            Err(Error::DisconnectedSink(o)) => *o,
            Err(e) => panic!("topology {i}: {e}"),
        };
        let hops = bfs(&g);
        for id in topo.sensor_ids() {
            checked += 1;
            let state = outcome.node(id);
            if state.ring != hops.get(&id).copied() {
                ring_mismatch += 1;
                continue;
            }
            let Some(&n) = hops.get(&id) else {
                packet_mismatch += usize::from(state.init_packets_sent != 0);
                continue;
            };
            let mut want = NeighborCensus::new(n, 0, 0, 0);
            for v in g.neighbors(id) {
                match hops.get(v) {
                    Some(&m) if m + 1 == n => want.inner += 1,
                    Some(&m) if m == n => want.same += 1,
                    Some(&m) if m == n + 1 => want.outer += 1,
                    _ => {}
                }
            }
            census_mismatch += usize::from(state.census != want);
            packet_mismatch += usize::from(state.init_packets_sent != 1);
        }
    }
    verdict(
        ring_mismatch + census_mismatch + packet_mismatch == 0,
        format!(
            "100 topologies, {checked} sensors: {ring_mismatch} ring, {census_mismatch} census, {packet_mismatch} packet-count mismatches"
        ),
    )
}

// ---------------------------------------------------------------------------
// Campaign criteria share the same runs.

struct Campaigns {
    free_space: CampaignSummary,
    free_space_time: Duration,
    shadowing: Option<CampaignSummary>,
    replay_identical: Option<bool>,
}

fn campaign(model: ModelChoice, out: &Path) -> CampaignSummary {
    let plan = PlanArgs {
        nodes: Some("50..750:100".parse::<NodeCounts>().unwrap()),
        replicates: Some(20),
        model: Some(model),
        seed: Some(2024),
        out: Some(out.to_path_buf()),
        ..PlanArgs::default()
    }
    .into_plan()
    .unwrap();
    run_campaign(&plan).unwrap()
}

fn criterion_8(c: &Campaigns) -> Verdict {
    let fs = &c.free_space.models["freespace"];
    let mean = fs.aggregate.global_mean();
    let a = (1.0..=3.0).contains(&mean);
    let trend = density_trend(&fs.per_count, 20..=90);
    let b = trend.is_some_and(|t| t.density_independent());
    let buckets: Vec<f64> = fs.aggregate.buckets.range(20..=90).map(|(_, b)| b.mean()).collect();
    let below = buckets.iter().filter(|&&m| m < 3.0).count();
    let c_ok = below as f64 >= 0.9 * buckets.len() as f64 && !buckets.is_empty();
    let timely = c.free_space_time < Duration::from_secs(600);
    let trend_text = match trend {
        Some(t) => format!(
            "density slope {:.3e} ± {:.3e} per node over {} buckets (t = {:.2})",
            t.count_slope,
            t.t_critical * t.count_slope_se,
            t.points,
            t.t_statistic()
        ),
        None => "no density trend fit".to_string(),
    };
    verdict(
        a && b && c_ok && timely && c.free_space.failures.is_empty(),
        format!(
            "(a) mean {mean:.3} in [1,3]: {a}; (b) {trend_text}, indistinguishable from 0: {b}; (c) {below}/{} degree buckets 20..=90 below 3: {c_ok}; {} runs in {:.2?}",
            buckets.len(),
            fs.runs,
            c.free_space_time
        ),
    )
}

fn criterion_9(c: &Campaigns) -> Verdict {
    let Some(sh) = &c.shadowing else {
        return verdict(false, "shadowing campaign did not complete".into());
    };
    let s = &sh.models["shadowing"];
    let fs_mean = c.free_space.models["freespace"].aggregate.global_mean();
    let mean = s.aggregate.global_mean();
    let trend = match density_trend(&s.per_count, 20..=90) {
        Some(t) => format!(
            "density slope {:.3e} ± {:.3e} per node (t = {:.2}, not gated)",
            t.count_slope,
            t.t_critical * t.count_slope_se,
            t.t_statistic()
        ),
        None => "no density trend fit".into(),
    };
    verdict(
        mean <= fs_mean + 0.5 && sh.failures.is_empty(),
        format!("shadowing mean {mean:.3} vs free-space {fs_mean:.3} (+0.5 allowed); {trend}"),
    )
}

fn criterion_10(c: &Campaigns) -> Verdict {
    match c.replay_identical {
        Some(same) => verdict(same, format!("replayed aggregate CSV byte-identical: {same}")),
        None => verdict(false, "replay campaign did not complete".into()),
    }
}

fn guarded(f: impl FnOnce() -> Verdict) -> Verdict {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        verdict(false, format!("panicked: {msg}"))
    })
}

fn main() {
    let titles = [
        "geometry conservation",
        "geometry oracle",
        "boundary cases",
        "combinatorics",
        "birthday Monte Carlo",
        "collision-free mapping property",
        "protocol correctness oracle",
        "free-space campaign",
        "shadowing campaign",
        "determinism",
    ];
    let mut verdicts: Vec<Verdict> = [
        criterion_1 as fn() -> Verdict,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
    ]
    .into_iter()
    .map(guarded)
    .collect();

    let dir = tempfile::tempdir().expect("temp dir");
    let start = Instant::now();
    let campaigns = catch_unwind(|| {
        let free_space = campaign(ModelChoice::FreeSpace, &dir.path().join("a"));
        let free_space_time = start.elapsed();
        let shadowing = catch_unwind(|| campaign(ModelChoice::Shadowing, &dir.path().join("s"))).ok();
        let replay_identical = catch_unwind(|| {
            campaign(ModelChoice::FreeSpace, &dir.path().join("b"));
            let read = |d: &str| fs::read(dir.path().join(d).join("freespace").join(AGGREGATE_FILE)).unwrap();
            read("a") == read("b")
        })
        .ok();
        Campaigns {
            free_space,
            free_space_time,
            shadowing,
            replay_identical,
        }
    });
    match &campaigns {
        Ok(c) => {
            verdicts.push(guarded(|| criterion_8(c)));
            verdicts.push(guarded(|| criterion_9(c)));
            verdicts.push(guarded(|| criterion_10(c)));
        }
        Err(_) => {
            for _ in 0..3 {
                verdicts.push(verdict(false, "free-space campaign did not complete".into()));
            }
        }
    }

    println!();
    let mut failed = 0;
    for (i, (title, v)) in titles.iter().zip(&verdicts).enumerate() {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!v.pass);
        println!("criterion {:>2} {tag}  {title}: {}", i + 1, v.detail);
    }
    println!("\nacceptance: {} passed, {failed} failed", verdicts.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
