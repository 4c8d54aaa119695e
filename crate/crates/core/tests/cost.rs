mod common;

use common::{build_dag, dag_spec, lib};
use proptest::prelude::*;
use rqlsha::adders::{adder_block, AdderKind};
use rqlsha::cost::{
    block_critical_path, critical_path, csa_latency, derive_activity_factor, dynamic_power, energy_efficiency,
    system_jj, total_power, PhysicsConstants,
};
use rqlsha::jtl::{insert_jtls, JtlAnnotation};
use rqlsha::netlist::{Driver, Netlist};

/// Longest path by explicit enumeration: walk back from every sink through
/// every driver, summing cell delays and JTL delays on the pins crossed.
fn brute_depth(nl: &Netlist, ann: &JtlAnnotation, jd: u64) -> u64 {
    fn back(nl: &Netlist, ann: &JtlAnnotation, jd: u64, g: u32) -> u64 {
        let gate = &nl.gates[g as usize];
        let mut best = 0;
        for (k, &i) in gate.inputs.iter().enumerate() {
            if nl.is_const(i) {
                continue;
            }
            let up = match nl.driver(i) {
                Driver::Gate(d) => back(nl, ann, jd, d),
                _ => 0,
            };
            best = best.max(up + jd * ann.pin_jtls[g as usize][k] as u64);
        }
        best + 1
    }
    let mut depth = 0;
    for g in &nl.gates {
        depth = depth.max(back(nl, ann, jd, g.id));
    }
    for (k, &o) in nl.outputs.iter().enumerate() {
        if let Driver::Gate(d) = nl.driver(o) {
            depth = depth.max(back(nl, ann, jd, d) + jd * ann.output_jtls[k] as u64);
        }
    }
    depth
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn critical_path_matches_enumeration(spec in dag_spec()) {
        let lib = lib();
        let nl = build_dag(&spec, &lib);
        let ann = insert_jtls(&nl, &lib);
        let cp = critical_path(&nl, &ann, &lib, 1.0, 0.0);
        prop_assert_eq!(cp.depth, brute_depth(&nl, &ann, lib.jtl_delay() as u64));
    }

    #[test]
    fn block_path_bounds_flat_path(spec in dag_spec()) {
        let lib = lib();
        let nl = build_dag(&spec, &lib);
        let ann = insert_jtls(&nl, &lib);
        let flat = critical_path(&nl, &ann, &lib, 1.0, 0.0).depth;
        // blocks may form a cycle even when gates do not; that is an error
        if let Ok(b) = block_critical_path(&nl, &ann, &lib, 1.0, 0.0) {
            prop_assert!(b.depth >= flat);
            if nl.blocks.len() == 1 {
                prop_assert_eq!(b.depth, flat);
            }
        }
    }

    #[test]
    fn power_is_linear_in_jj_and_alpha(n in 1e3f64..1e8, alpha in 0.01f64..1.0, f in 1e8f64..1e10) {
        let phys = PhysicsConstants::default();
        let p1 = dynamic_power(n, f, phys.ic, alpha, phys.phi0).unwrap();
        let p2 = dynamic_power(2.0 * n, f, phys.ic, alpha, phys.phi0).unwrap();
        let p3 = dynamic_power(n, f, phys.ic, alpha / 2.0, phys.phi0).unwrap();
        prop_assert!((p2 / p1 - 2.0).abs() < 1e-12);
        prop_assert!((p1 / p3 - 2.0).abs() < 1e-12);
    }
}

#[test]
fn dynamic_power_oracle() {
    // (2/3) n f Ic Phi0 alpha, by hand
    let phi0 = 2.067_833_848e-15;
    let p = dynamic_power(3.0e6, 1.0e9, 38e-6, 0.5, phi0).unwrap();
    let want = 2.0 / 3.0 * 3.0e6 * 1.0e9 * 38e-6 * phi0 * 0.5;
    assert!((p - want).abs() <= want * 1e-12);
    assert_eq!(total_power(p, 300.0), 300.0 * p);
    assert!((energy_efficiency(1e9, 0.02).unwrap() - 5e10).abs() < 1.0);
    assert_eq!(PhysicsConstants::default().phi0, phi0);
}

#[test]
fn domain_errors() {
    assert!(dynamic_power(-1.0, 1e9, 38e-6, 0.5, 2e-15).is_err());
    assert!(dynamic_power(1e6, 1e9, 38e-6, 1.5, 2e-15).is_err());
    assert!(energy_efficiency(1e9, 0.0).is_err());
    assert!(csa_latency(0, 4).is_err());
    assert!(csa_latency(32, 1).is_err());
    assert!(derive_activity_factor(&[], 10).is_err());
    assert!(PhysicsConstants { ic: 0.0, ..Default::default() }.validate().is_err());
}

#[test]
fn csa_latency_formula() {
    assert_eq!(csa_latency(32, 2).unwrap(), 33);
    assert_eq!(csa_latency(32, 4).unwrap(), 35);
    assert_eq!(csa_latency(1, 3).unwrap(), 3);
}

#[test]
fn activity_factor_is_mean_fraction() {
    assert_eq!(derive_activity_factor(&[5, 5, 5], 10).unwrap(), 0.5);
    assert_eq!(derive_activity_factor(&[0, 10], 10).unwrap(), 0.5);
}

#[test]
fn system_jj_adds() {
    assert_eq!(system_jj(480, 834), 1314);
}

#[test]
fn adder_latency_ordering() {
    let lib = lib();
    let depth = |k, ops| {
        let nl = adder_block(k, 32, ops, &lib).unwrap();
        let ann = insert_jtls(&nl, &lib);
        critical_path(&nl, &ann, &lib, 1.0, 0.0).depth
    };
    let (rca, ksa, csa4) = (depth(AdderKind::Rca, 2), depth(AdderKind::Ksa, 2), depth(AdderKind::Csa, 4));
    assert!(ksa < rca);
    // a 4-operand CSA costs little more than one RCA (two extra FA rows)
    assert!(csa4 > rca && csa4 < rca + 20);
}
