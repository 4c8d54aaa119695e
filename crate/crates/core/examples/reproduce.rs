//! Recompute every published table and figure; pass an id to pick one.

use rqlsha::report::{ReportId, Study};

fn main() -> rqlsha::Result<()> {
    let study = Study::default_study()?;
    let ids = match std::env::args().nth(1) {
        Some(id) => vec![ReportId::parse(&id)?],
        None => ReportId::ALL.to_vec(),
    };
    for id in ids {
        let r = study.reproduce(id)?;
        print!("{}", r.render_text());
        println!();
    }
    Ok(())
}
