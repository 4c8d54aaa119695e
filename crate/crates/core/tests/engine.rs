use std::collections::BTreeMap;

use proptest::prelude::*;
use rqlsha::cell::CellLibrary;
use rqlsha::engine::{
    build_stage, delay_line_storage, generate_engine, live_window_slots, stage_shape, window_reads, AdderStrategy,
    EngineConfig, StorageStrategy, FULL_STAGES, ROUNDS,
};
use rqlsha::error::Error;
use rqlsha::netlist::Category;
use rqlsha::report::Study;
use rqlsha::sim::{round_step, ShaState};

fn lib() -> CellLibrary {
    CellLibrary::default()
}

#[test]
fn rca_engine_has_1200_adders() {
    let d = generate_engine(&EngineConfig::new(AdderStrategy::Rca), &lib()).unwrap();
    assert_eq!(d.adder_count, 1200);
    assert_eq!(d.layouts.len(), FULL_STAGES);
}

#[test]
fn spare_adds_one_stage_of_adders() {
    let lib = lib();
    for a in AdderStrategy::ALL {
        let base = generate_engine(&EngineConfig::new(a), &lib).unwrap();
        let ft = generate_engine(&EngineConfig::new(a).with_spares(1, false), &lib).unwrap();
        let full = base.layouts.iter().map(|l| l.adders.len()).max().unwrap();
        assert_eq!(ft.adder_count, base.adder_count + full, "{}", a.name());
        assert!(ft.jj_system() > base.jj_system());
        assert_eq!(ft.boundaries, FULL_STAGES + 2);
        let rm = generate_engine(&EngineConfig::new(a).with_spares(1, true), &lib).unwrap();
        assert!(rm.jj_system() > ft.jj_system());
    }
}

#[test]
fn breakdown_sums_to_system() {
    let lib = lib();
    for a in AdderStrategy::ALL {
        let d = generate_engine(&EngineConfig::new(a), &lib).unwrap();
        let b = d.complexity_breakdown();
        assert_eq!(b.values().sum::<u64>(), d.jj_system(), "{}", a.name());
        assert_eq!(d.jj_system(), d.jj_gate() + d.jj_interconnect());
        assert!(b[&Category::Adder] > 0 && b[&Category::Register] > 0);
    }
}

#[test]
fn cost_ordering_between_strategies() {
    let s = Study::default_study().unwrap();
    let r = |a| s.cost_report(s.design(a)).unwrap();
    let (rca, ksa, csa4) = (r(AdderStrategy::Rca), r(AdderStrategy::KsaCritical), r(AdderStrategy::Csa4));
    assert!(ksa.critical_path_depth < rca.critical_path_depth);
    // energy per hash is 1 / efficiency
    assert!(ksa.efficiency < rca.efficiency);
    let edp = |c: &rqlsha::cost::CostReport| 1.0 / (c.efficiency * c.hashrate);
    assert!(edp(&csa4) < edp(&rca));
    let dl = r(AdderStrategy::Csa4DelayLine);
    assert_eq!(dl.critical_path_depth, csa4.critical_path_depth);
    assert!(dl.jj_system < csa4.jj_system);
}

#[test]
fn invalid_configs_are_rejected() {
    let lib = lib();
    let mut c = EngineConfig::new(AdderStrategy::Rca);
    c.stages = 0;
    assert!(matches!(generate_engine(&c, &lib), Err(Error::Config(_))));
    let mut c = EngineConfig::new(AdderStrategy::Csa4DelayLine);
    c.storage = StorageStrategy::Registers;
    assert!(c.validate().is_err());
    let mut c = EngineConfig::new(AdderStrategy::Rca);
    c.redundant_mux = true;
    assert!(c.validate().is_err());
    assert!(build_stage(&EngineConfig::new(AdderStrategy::Rca), ROUNDS, &lib).is_err());
}

#[test]
fn shapes_follow_the_schedule() {
    let c = EngineConfig::new(AdderStrategy::Csa4);
    assert!(stage_shape(0, &c).msu);
    assert!(stage_shape(47, &c).msu);
    assert!(!stage_shape(48, &c).msu);
    assert!(stage_shape(62, &c).wk_next);
    assert!(!stage_shape(63, &c).wk_next);
    let d = generate_engine(&c, &lib()).unwrap();
    assert_eq!(d.shapes.len(), 3);
}

#[test]
fn delay_line_sizing() {
    let c = EngineConfig::new(AdderStrategy::Csa4DelayLine);
    // full shape: four taps and the twelve positions between them
    assert_eq!(delay_line_storage(&c, None), (4, 12));
    for r in 0..ROUNDS {
        let reads = window_reads(&c, r);
        let live = live_window_slots(&c, r);
        assert!(reads.iter().all(|j| live.contains(j)), "round {r}");
        let (taps, segs) = delay_line_storage(&c, Some(r));
        assert_eq!(taps, reads.len());
        assert_eq!(taps + segs, live.len());
    }
    // the last round reads nothing beyond its own word
    assert!(live_window_slots(&c, 63).len() <= 1);
}

fn stage_inputs(s: &ShaState, cfg: &EngineConfig) -> BTreeMap<String, u32> {
    let mut m = BTreeMap::new();
    for (k, n) in ["a", "b", "c", "d", "e", "f", "g", "h"].iter().enumerate() {
        m.insert(n.to_string(), s.regs[k]);
    }
    for j in 0..16 {
        m.insert(format!("w{j}"), s.w[j]);
    }
    if cfg.uses_wk() {
        m.insert("wk".into(), s.wk);
    }
    m
}

fn check_stage(cfg: &EngineConfig, round: usize, s: &ShaState) {
    let lib = lib();
    let (stage, _) = build_stage(cfg, round, &lib).unwrap();
    let out = stage.eval_words(&stage_inputs(s, cfg)).unwrap();
    let want = round_step(s, round, cfg.uses_wk());
    for (k, n) in ["a", "b", "c", "d", "e", "f", "g", "h"].iter().enumerate() {
        assert_eq!(out[*n], want.regs[k], "{} round {round} reg {n}", cfg.label());
    }
    match cfg.storage {
        StorageStrategy::Registers => {
            for j in 0..16 {
                assert_eq!(out[&format!("w{j}")], want.w[j], "{} round {round} w{j}", cfg.label());
            }
        }
        StorageStrategy::DelayLine => {
            assert_eq!(out["w0"], want.w[0]);
            assert_eq!(out["line8"], want.w[8]);
            assert_eq!(out["line13"], want.w[13]);
            if stage_shape(round, cfg).msu {
                assert_eq!(out["line15"], want.w[15]);
            }
        }
    }
    if stage_shape(round, cfg).wk_next {
        assert_eq!(out["wk"], want.wk);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gate_level_stage_matches_round_function(
        regs in any::<[u32; 8]>(),
        w in any::<[u32; 16]>(),
        wk in any::<u32>(),
        round in prop::sample::select(vec![0usize, 1, 17, 47, 48, 62, 63]),
    ) {
        let s = ShaState { regs, w, wk };
        for a in AdderStrategy::ALL {
            check_stage(&EngineConfig::new(a), round, &s);
        }
    }
}
