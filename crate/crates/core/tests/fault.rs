use proptest::prelude::*;
use rqlsha::cell::CellLibrary;
use rqlsha::engine::{generate_engine, AdderStrategy, EngineConfig, FULL_STAGES};
use rqlsha::fault::{
    analytic_failure_prob, baseline_failure_prob, default_pgrid, detect_faulty_stage, efficiency_gain, log_grid,
    measure_avf, mining_loss_probability, monte_carlo_failure_prob, prob_more_than, region_fault_prob,
    sample_fault_map, sample_fault_map_trial, tune_ic, wilson_interval, AvfAccounting, Detection, FaultKind,
    FaultMap, FaultModel, FaultVsIc, Geometry, Region, Variant, DEFAULT_SEED,
};
use rqlsha::sha::{double_sha256, Header};

/// 1 - (1-p)^n as the alternating binomial series; only for n p well below 1.
fn series(p: f64, n: u64) -> f64 {
    let (mut term, mut sum) = (1.0f64, 0.0f64);
    for k in 1..=60u64 {
        term *= (n - k + 1) as f64 / k as f64 * p;
        if k > n {
            break;
        }
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-30 {
            break;
        }
    }
    sum
}

#[test]
fn baseline_matches_series_and_direct_power() {
    for (p, n) in [(1e-12, 3_000_000u64), (1e-9, 2_793_248), (1e-8, 3_000_000), (3e-8, 5_000_000)] {
        let want = series(p, n);
        let got = baseline_failure_prob(p, n);
        assert!((got - want).abs() <= 1e-12 * want, "p={p} n={n}: {got} vs {want}");
    }
    // where there is no cancellation the naive form is fine
    for (p, n) in [(1e-5f64, 1_000_000u64), (0.3, 10)] {
        let want = 1.0 - (1.0 - p).powi(n as i32);
        assert!((baseline_failure_prob(p, n) - want).abs() < 1e-12);
    }
    assert_eq!(region_fault_prob(1.0, 5), 1.0);
    assert_eq!(region_fault_prob(1.0, 0), 0.0);
    assert_eq!(region_fault_prob(0.0, 5), 0.0);
}

fn brute_more_than(q: &[f64], k: usize) -> f64 {
    let mut total = 0.0;
    for mask in 0u32..1 << q.len() {
        if mask.count_ones() as usize > k {
            total += q
                .iter()
                .enumerate()
                .map(|(i, &qi)| if mask >> i & 1 == 1 { qi } else { 1.0 - qi })
                .product::<f64>();
        }
    }
    total
}

/// Failure probability by enumerating every unit-fault pattern of a tiny geometry.
fn brute_failure(g: &Geometry, p: f64) -> f64 {
    let mut owners: Vec<(u8, usize, usize)> = Vec::new(); // (kind, region, block)
    for (i, &u) in g.stage_units.iter().enumerate() {
        owners.extend((0..u).map(|_| (0, i, 0)));
    }
    for (b, blocks) in g.mux_units.iter().enumerate() {
        for (k, &u) in blocks.iter().enumerate() {
            owners.extend((0..u).map(|_| (1, b, k)));
        }
    }
    owners.extend((0..g.ihc_units).map(|_| (2, 0, 0)));
    let n = owners.len();
    let mut fail = 0.0;
    for mask in 0u64..1 << n {
        let mut stages = std::collections::BTreeSet::new();
        let mut mux = std::collections::BTreeSet::new();
        let mut ihc = false;
        for (i, o) in owners.iter().enumerate() {
            if mask >> i & 1 == 1 {
                match o.0 {
                    0 => {
                        stages.insert(o.1);
                    }
                    1 => {
                        mux.insert((o.1, o.2));
                    }
                    _ => ihc = true,
                }
            }
        }
        let any = mask != 0;
        let ok = if g.spares == 0 && g.mux_units.is_empty() {
            !any
        } else {
            let tol = g.redundant_mux as usize;
            !ihc && stages.len() <= g.spares
                && (0..g.mux_units.len()).all(|b| mux.iter().filter(|m| m.0 == b).count() <= tol)
        };
        if !ok {
            let k = mask.count_ones() as i32;
            fail += p.powi(k) * (1.0 - p).powi(n as i32 - k);
        }
    }
    fail
}

fn toy(spares: usize, redundant: bool) -> Geometry {
    let mux = if spares > 0 {
        let blocks = if redundant { vec![1, 1, 2] } else { vec![1, 1] };
        vec![blocks; 2]
    } else {
        Vec::new()
    };
    Geometry {
        stage_units: vec![2, 1, 3],
        mux_units: mux,
        ihc_units: 1,
        spares,
        redundant_mux: redundant,
        uses_wk: false,
    }
}

#[test]
fn analytic_model_matches_enumeration() {
    for g in [toy(0, false), toy(1, false), toy(1, true), toy(2, true)] {
        for p in [1e-3, 0.02, 0.2, 0.6] {
            let a = analytic_failure_prob(&g, p).unwrap();
            let b = brute_failure(&g, p);
            assert!((a - b).abs() < 1e-12, "spares {} rmux {} p {p}: {a} vs {b}", g.spares, g.redundant_mux);
        }
    }
}

#[test]
fn monte_carlo_matches_enumeration_on_toy() {
    let g = toy(1, true);
    let p = 0.1;
    let m = monte_carlo_failure_prob(&g, p, 20_000, DEFAULT_SEED).unwrap();
    let b = brute_failure(&g, p);
    assert!((m.estimate - b).abs() < 4.0 * (b * (1.0 - b) / 20_000.0).sqrt(), "{} vs {b}", m.estimate);
    assert!(monte_carlo_failure_prob(&g, p, 999, 1).is_err());
}

#[test]
fn wilson_interval_known_values() {
    let (lo, hi) = wilson_interval(0, 10);
    assert_eq!(lo, 0.0);
    assert!((hi - 0.2775).abs() < 1e-3);
    let (lo, hi) = wilson_interval(50, 100);
    assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    let (lo, hi) = wilson_interval(100, 100);
    assert!(hi == 1.0 && (lo - 0.9630).abs() < 1e-3);
}

#[test]
fn grid_shape() {
    let g = default_pgrid();
    assert_eq!(g.len(), 11);
    assert!((g[0] - 1e-9).abs() < 1e-21 && (g[10] - 1e-4).abs() < 1e-16);
    assert_eq!(log_grid(1e-3, 1e-1, 1).len(), 3);
}

#[test]
fn fault_maps_are_reproducible_and_in_range() {
    let d = generate_engine(&EngineConfig::new(AdderStrategy::Csa4DelayLine).with_spares(1, true), &CellLibrary::default()).unwrap();
    let g = Geometry::from_design(&d, &CellLibrary::default());
    assert_eq!(g.stage_units.len(), FULL_STAGES + 1);
    assert_eq!(g.mux_units.len(), d.boundaries);
    let m = FaultModel::iid(1e-6, 11);
    let a = sample_fault_map_trial(&m, &g, 3).unwrap();
    assert_eq!(a, sample_fault_map_trial(&m, &g, 3).unwrap());
    assert!(a.stages.iter().all(|&s| s < g.stage_units.len()));
    let all = sample_fault_map(&FaultModel::iid(1.0, 1), &g).unwrap();
    assert_eq!(all.faulty_units, g.total_units());
    assert!(sample_fault_map(&FaultModel::iid(0.0, 1), &g).unwrap().is_empty());
    assert!(FaultModel::iid(1.5, 1).validate().is_err());
    let t = FaultModel { kind: FaultKind::TransientBit, p: 1.0, region: Region::Gate, seed: 2 };
    let tb = sample_fault_map(&t, &g).unwrap().transient.unwrap();
    assert!(tb.stage < g.stage_units.len() && tb.bit < 8 * 32 + 16 * 32 + 32);
    let r = FaultModel { kind: FaultKind::FluxTrapRegion, p: 1e-4, region: Region::Stage, seed: 2 };
    assert!(sample_fault_map(&r, &g).is_ok());
}

#[test]
fn unit_sampling_rate() {
    let g = Geometry {
        stage_units: vec![1_000_000],
        mux_units: Vec::new(),
        ihc_units: 0,
        spares: 0,
        redundant_mux: false,
        uses_wk: false,
    };
    let m = FaultModel::iid(1e-4, 5);
    let total: u64 = (0..200).map(|t| sample_fault_map_trial(&m, &g, t).unwrap().faulty_units).sum();
    let mean = total as f64 / 200.0;
    // 100 expected per map; sd of the mean is about 0.7
    assert!((mean - 100.0).abs() < 4.0, "mean {mean}");
}

#[test]
fn detection_sweeps_bypass_positions() {
    let lib = CellLibrary::default();
    let d = generate_engine(&EngineConfig::new(AdderStrategy::Rca).with_spares(1, false), &lib).unwrap();
    let h = Header([7; 80]);
    let golden = double_sha256(&h.with_nonce(5).0);
    let g = (&h, 5, &golden);
    assert_eq!(detect_faulty_stage(&d, &FaultMap::default(), g).unwrap(), Detection::Healthy);
    let mut f = FaultMap::default();
    f.stages.insert(42);
    assert_eq!(detect_faulty_stage(&d, &f, g).unwrap(), Detection::Stage(42));
    f.stages.insert(100);
    assert_eq!(detect_faulty_stage(&d, &f, g).unwrap(), Detection::NotIsolable);
    let mut spare_only = FaultMap::default();
    spare_only.stages.insert(FULL_STAGES);
    assert_eq!(detect_faulty_stage(&d, &spare_only, g).unwrap(), Detection::Healthy);
    let plain = generate_engine(&EngineConfig::new(AdderStrategy::Rca), &lib).unwrap();
    assert!(detect_faulty_stage(&plain, &f, g).is_err());
}

#[test]
fn avf_is_deterministic_and_mode_dependent() {
    let d = generate_engine(&EngineConfig::new(AdderStrategy::Rca), &CellLibrary::default()).unwrap();
    let a = measure_avf(&d, 500, 9, AvfAccounting::Occupied).unwrap();
    assert_eq!(a, measure_avf(&d, 500, 9, AvfAccounting::Occupied).unwrap());
    let b = measure_avf(&d, 2000, 9, AvfAccounting::AllBits).unwrap();
    assert!(b.avf < a.avf);
    assert!(a.ci_low <= a.avf && a.avf <= a.ci_high);
    assert!(measure_avf(&d, 0, 9, AvfAccounting::Occupied).is_err());
}

#[test]
fn btwc_tuning() {
    let lib = CellLibrary::default();
    let g = Variant::SpareBypass.geometry(&EngineConfig::new(AdderStrategy::Csa4DelayLine), &lib).unwrap();
    let grid: Vec<f64> = [38, 30, 22, 14, 10, 6].iter().map(|&u| u as f64 / 1e6).collect();
    let step = FaultVsIc::Step { threshold: 10e-6, p_high: 1e-4 };
    let r = tune_ic(&g, &grid, &step, 1).unwrap();
    assert_eq!(r.chosen_ic, 10e-6);
    assert!((r.efficiency_gain - 3.8).abs() < 1e-12);
    assert_eq!(r.steps.len(), 6);
    // fault-free everywhere: the bottom of the grid
    assert_eq!(tune_ic(&g, &grid, &FaultVsIc::Constant(0.0), 1).unwrap().chosen_ic, 6e-6);
    assert!(tune_ic(&g, &[10e-6, 20e-6], &step, 1).is_err());
    assert!(tune_ic(&g, &[], &step, 1).is_err());
    let base = Variant::Baseline.geometry(&EngineConfig::new(AdderStrategy::Csa4DelayLine), &lib).unwrap();
    assert!(tune_ic(&base, &grid, &step, 1).is_err());
    let ramp = FaultVsIc::Ramp { ic_ref: 38e-6, p_ref: 1e-12, decade: 4e-6 };
    assert!(ramp.p(30e-6) > ramp.p(38e-6) && ramp.p(1e-6) <= 1.0);
}

#[test]
fn efficiency_gain_is_inverse_ic() {
    assert!((efficiency_gain(10e-6).unwrap() - 3.8).abs() < 1e-12);
    assert!((efficiency_gain(19e-6).unwrap() - 2.0).abs() < 1e-12);
    assert!((efficiency_gain(38e-6).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(mining_loss_probability(1.0).unwrap(), 1.0 / 4_294_967_296.0);
    assert!(mining_loss_probability(2.0).is_err());
}

#[test]
fn variant_names_parse() {
    for v in Variant::ALL {
        assert_eq!(Variant::parse(v.name()).unwrap(), v);
    }
    assert!(Variant::parse("nope").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn more_than_matches_subsets(q in prop::collection::vec(0.0f64..1.0, 0..10), k in 0usize..4) {
        let a = prob_more_than(&q, k);
        let b = brute_more_than(&q, k);
        prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
    }

    #[test]
    fn toy_model_matches_enumeration(p in 0.0f64..1.0, spares in 0usize..3, rmux in any::<bool>()) {
        let g = toy(spares, rmux && spares > 0);
        prop_assert!((analytic_failure_prob(&g, p).unwrap() - brute_failure(&g, p)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sparing_dominates_and_grows_with_p(e in -10.0f64..-3.0) {
        let lib = CellLibrary::default();
        let base = EngineConfig::new(AdderStrategy::Csa4DelayLine);
        let geos: Vec<Geometry> = Variant::ALL.iter().map(|v| v.geometry(&base, &lib).unwrap()).collect();
        let p = 10f64.powf(e);
        let f: Vec<f64> = geos.iter().map(|g| analytic_failure_prob(g, p).unwrap()).collect();
        // once the baseline is certain to fail, extra mux JJs can only hurt
        if 1.0 - f[0] > 1e-12 {
            prop_assert!(f[2] <= f[1] && f[1] <= f[0], "{:?}", f);
        }
        for (g, fv) in geos.iter().zip(&f) {
            prop_assert!(analytic_failure_prob(g, p * 1.5).unwrap() >= *fv);
            prop_assert!((0.0..=1.0).contains(fv));
        }
    }
}

#[test]
fn dominance_breaks_only_past_saturation() {
    let lib = CellLibrary::default();
    let base = EngineConfig::new(AdderStrategy::Csa4DelayLine);
    let geos: Vec<Geometry> = Variant::ALL.iter().map(|v| v.geometry(&base, &lib).unwrap()).collect();
    let survive = |g: &Geometry, p: f64| 1.0 - analytic_failure_prob(g, p).unwrap();
    let mut crossed = None;
    for i in 0..=400 {
        let p = 10f64.powf(-10.0 + i as f64 * 0.0175);
        let s: Vec<f64> = geos.iter().map(|g| survive(g, p)).collect();
        if !(s[2] >= s[1] && s[1] >= s[0]) {
            assert!(s[0] < 1e-12, "dominance lost at p={p:e} with baseline survival {}", s[0]);
            crossed.get_or_insert(p);
        }
    }
    // the crossover is real: one spare stops paying for ~3e5 extra bypass JJs
    // where (1 + n q/(1-q)) e^(-extra p) = 1
    let p = crossed.expect("no crossover found");
    let extra = (geos[1].total_units() - geos[0].total_units()) as f64;
    let n = geos[1].stage_units.len() as f64;
    let units = geos[1].stage_units[0];
    let ratio = |p: f64| {
        let q = rqlsha::fault::region_fault_prob(p, units);
        (1.0 + n * q / (1.0 - q)) * (-extra * p).exp()
    };
    let (mut lo, mut hi) = (1e-6f64, 1e-4f64);
    for _ in 0..100 {
        let mid = (lo * hi).sqrt();
        if ratio(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((p / lo - 1.0).abs() < 0.05, "crossover {p:e} vs root {lo:e}");
}
