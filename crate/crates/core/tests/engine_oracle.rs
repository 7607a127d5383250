use queryarena::sql::Database;
use queryarena::testkit::WorkloadGen;

fn run(seed: u64) -> Result<(), String> {
    let w = WorkloadGen::new(0).generate(seed);
    let mut db = Database::new();
    let mut last = None;
    for stmt in &w.statements {
        last = Some(
            db.run(stmt)
                .map_err(|e| format!("seed {seed}: `{stmt}` failed: {e}"))?,
        );
    }
    let rs = last
        .and_then(|o| o.rows().cloned())
        .ok_or("no result set")?;
    let got = rs.serialize();
    let want = w.expected();
    if got != want {
        return Err(format!(
            "seed {seed}\n{}\n--- engine\n{got}\n--- oracle\n{want}",
            w.statements.join(";\n")
        ));
    }
    Ok(())
}

#[test]
fn engine_matches_oracle_on_1000_workloads() {
    let failures: Vec<String> = (0..1000).filter_map(|s| run(s).err()).collect();
    assert!(
        failures.is_empty(),
        "{} mismatches, first:\n{}",
        failures.len(),
        failures[0]
    );
}
