use std::sync::OnceLock;

use rqlsha::engine::{AdderStrategy, EngineConfig};
use rqlsha::error::Error;
use rqlsha::report::{sweep, write_sweep_csv, Published, RefKind, ReportId, Status, Study, TableReport, Tol};

fn study() -> &'static Study {
    static S: OnceLock<Study> = OnceLock::new();
    S.get_or_init(|| Study::default_study().unwrap())
}

#[test]
fn published_constants_are_complete() {
    let p = Published::default();
    assert!(!p.version.is_empty());
    for (k, v) in &p.values {
        assert!(!v.source.is_empty(), "{k}");
        assert!(v.value.is_finite(), "{k}");
    }
    for key in ["t5.rca32.estimated", "t2.rca.hashrate", "t4.csa4dl.efficiency", "cmos.efficiency", "fig12.btwc"] {
        assert!(p.get(key).is_ok(), "{key}");
    }
    assert!(matches!(p.get("nope"), Err(Error::Validation(_))));
    assert!(Published::from_json("{").is_err());
}

#[test]
fn tolerance_semantics() {
    assert!(Tol::Rel(0.05).holds(105.0, 100.0));
    assert!(!Tol::Rel(0.05).holds(105.1, 100.0));
    assert!(Tol::Abs(1.0).holds(7.6, 6.6));
    assert!(!Tol::Abs(1.0).holds(7.7, 6.6));
    assert!(Tol::AtLeast.holds(1e4, 1e4));
    assert!(!Tol::AtLeast.holds(9999.0, 1e4));
}

#[test]
fn report_ids() {
    for id in ReportId::ALL {
        assert_eq!(ReportId::parse(id.name()).unwrap(), id);
        assert_eq!(ReportId::parse(&id.name().to_lowercase()).unwrap(), id);
    }
    assert!(matches!(ReportId::parse("T9"), Err(Error::UnknownReport(_))));
}

fn rows_named<'a>(r: &'a TableReport, needle: &str) -> Vec<&'a rqlsha::report::Row> {
    r.rows.iter().filter(|row| row.quantity.contains(needle)).collect()
}

#[test]
fn cmos_reference_is_never_computed() {
    let t2 = study().reproduce(ReportId::T2).unwrap();
    let cmos: Vec<_> = rows_named(&t2, "CMOS").into_iter().filter(|r| !r.quantity.contains(" vs ")).collect();
    assert_eq!(cmos.len(), 3);
    for r in cmos {
        assert_eq!(r.ref_kind, RefKind::Constant);
        assert!(r.computed.is_none());
    }
    let f12 = study().reproduce(ReportId::Fig12).unwrap();
    for r in rows_named(&f12, "commercial").into_iter().chain(rows_named(&f12, "CMOS reference")) {
        assert_eq!(r.ref_kind, RefKind::Constant);
    }
}

#[test]
fn t5_rows_and_rendering() {
    let t5 = study().reproduce(ReportId::T5).unwrap();
    assert!(!t5.breached());
    let text = t5.render_text();
    assert!(text.starts_with("T5 — "));
    assert!(text.contains("not computed"));
    let mut csv = Vec::new();
    t5.write_csv(&mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    assert_eq!(csv.lines().next().unwrap(), TableReport::CSV_HEADER.join(","));
    assert_eq!(csv.lines().count(), t5.rows.len() + 1);
    // every row declares where its reference comes from
    for r in &t5.rows {
        assert!(r.reference.is_none() || r.ref_kind != RefKind::None, "{}", r.quantity);
    }
}

#[test]
fn every_report_builds_and_is_reproducible() {
    let s = study();
    for id in [ReportId::T2, ReportId::T3, ReportId::T4, ReportId::T5, ReportId::Fig12] {
        let a = s.reproduce(id).unwrap();
        assert_eq!(a, s.reproduce(id).unwrap());
        assert!(a.rows.iter().any(|r| r.status != Status::Info), "{}", id.name());
    }
}

#[test]
fn sweep_rows() {
    let s = study();
    assert!(matches!(sweep(&[], s), Err(Error::Config(_))));
    let rca = EngineConfig::new(AdderStrategy::Rca);
    let mut bad = rca;
    bad.stages = 0;
    let rows = sweep(&[rca, bad, rca], s).unwrap();
    assert!(rows[1].is_err());
    assert_eq!(rows[0].as_ref().unwrap(), rows[2].as_ref().unwrap());
    let mut out = Vec::new();
    write_sweep_csv(&rows, &mut out).unwrap();
    let out = String::from_utf8(out).unwrap();
    assert_eq!(out.lines().count(), 4);
    assert!(out.lines().nth(2).unwrap().contains("invalid configuration"));
}

#[test]
fn rca_hashrate_is_the_anchor() {
    let s = study();
    assert!((s.hashrate(AdderStrategy::Rca) / 1e9 - 0.661).abs() < 1e-12);
}
