use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rqlsha::cell::CellLibrary;
use rqlsha::engine::{generate_engine, AdderStrategy, EngineConfig, EngineDesign};
use rqlsha::error::Error;
use rqlsha::sha::{digest_value, Header};
use rqlsha::sim::{hash_nonce, mine, record_activity, run_nonces, run_single, MiningJob, PipelineState};
use sha2::{Digest as _, Sha256};

fn oracle(h: &Header, nonce: u32) -> [u8; 32] {
    let first = Sha256::digest(h.with_nonce(nonce).0);
    Sha256::digest(first).into()
}

fn design(a: AdderStrategy, spares: usize) -> EngineDesign {
    generate_engine(&EngineConfig::new(a).with_spares(spares, false), &CellLibrary::default()).unwrap()
}

fn random_header(seed: u64) -> Header {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = [0u8; 80];
    rng.fill(&mut h[..]);
    Header(h)
}

#[test]
fn pipeline_streams_match_oracle() {
    for a in AdderStrategy::ALL {
        for spares in [0, 1] {
            let d = design(a, spares);
            let h = random_header(a as u64);
            let mut st = PipelineState::new(&d, h);
            let out = run_nonces(&mut st, &d, None, 1000..1200u32).unwrap();
            assert_eq!(out.len(), 200);
            for c in &out {
                assert_eq!(c.digest, oracle(&h, c.nonce), "{}", d.config.label());
            }
            // results leave in issue order, one per cycle once full
            assert!(out.windows(2).all(|w| w[1].nonce == w[0].nonce + 1 && w[1].cycle == w[0].cycle + 1));
            // one cycle to latch the nonce, one per active stage; tail spares are never reached
            assert_eq!(out[0].cycle, d.config.stages as u64 + 1);
        }
    }
}

#[test]
fn straight_line_model_matches_oracle() {
    let h = random_header(99);
    for n in [0, 1, u32::MAX, 0xdead_beef] {
        assert_eq!(hash_nonce(&h, n, false, None), oracle(&h, n));
        assert_eq!(hash_nonce(&h, n, true, None), oracle(&h, n));
    }
}

#[test]
fn any_single_bypass_position_computes_the_same_hash() {
    let d = design(AdderStrategy::Csa4DelayLine, 1);
    let h = random_header(5);
    for stage in [0, 42, 63, 64, 127, 128] {
        assert_eq!(run_single(&d, &h, &[stage], None, 77).unwrap(), oracle(&h, 77));
    }
    assert!(matches!(run_single(&d, &h, &[], None, 77), Err(Error::Dimension(_))));
}

#[test]
fn short_pipelines_cannot_hash() {
    let mut c = EngineConfig::new(AdderStrategy::Rca);
    c.stages = 64;
    let d = generate_engine(&c, &CellLibrary::default()).unwrap();
    assert!(matches!(run_single(&d, &random_header(1), &[], None, 0), Err(Error::Dimension(_))));
}

fn job(target: BigUint, start: u32, end: u32) -> MiningJob {
    MiningJob {
        header: random_header(3),
        nonce_start: start,
        nonce_end: end,
        target,
    }
}

#[test]
fn mining_accepts_everything_at_max_target() {
    let d = design(AdderStrategy::Rca, 0);
    let out = mine(&job(BigUint::from(1u8) << 256, 10, 500), &d).unwrap();
    assert_eq!(out.found.unwrap().0, 10);
    assert_eq!(out.hashes, 1);
}

#[test]
fn mining_finds_nothing_at_zero_target() {
    let d = design(AdderStrategy::Csa4, 0);
    let out = mine(&job(BigUint::from(0u8), 0, 299), &d).unwrap();
    assert!(out.found.is_none());
    assert_eq!(out.hashes, 300);
    assert_eq!(out.cycles, 300 + 128);
}

#[test]
fn mining_returns_first_qualifying_nonce() {
    let d = design(AdderStrategy::Csa4DelayLine, 0);
    let target = MiningJob::target_with_zero_bits(8);
    let j = job(target.clone(), 0, 5000);
    let want = (0..=5000u32).find(|&n| digest_value(&oracle(&j.header, n)) < target);
    let out = mine(&j, &d).unwrap();
    assert_eq!(out.found.map(|f| f.0), want);
    assert!(want.is_some());
}

#[test]
fn job_files_round_trip() {
    let j = job(MiningJob::target_with_zero_bits(20), 7, 9);
    let back = MiningJob::from_json(&j.to_json()).unwrap();
    assert_eq!(back, j);
    let bad_range = j.to_json().replace("\"nonce_start\": 7", "\"nonce_start\": 70");
    assert!(MiningJob::from_json(&bad_range).is_err());
    assert!(MiningJob::from_json("{}").is_err());
    let too_big = j.to_json().replace(&j.target.to_str_radix(16), &format!("2{}", "0".repeat(64)));
    assert!(MiningJob::from_json(&too_big).is_err());
}

#[test]
fn activity_trace() {
    let d = design(AdderStrategy::Rca, 0);
    let tr = record_activity(&d, &random_header(8), 0..400u32, true).unwrap();
    let a = tr.alpha().unwrap();
    assert!((0.35..0.5).contains(&a), "alpha {a}");
    assert_eq!(tr.warmup, 128);
    let mut csv = Vec::new();
    tr.write_csv(&mut csv).unwrap();
    assert!(String::from_utf8(csv).unwrap().starts_with("cycle,ones_count\n"));
    assert!(record_activity(&d, &random_header(8), 0..4u32, false).is_err());
}
