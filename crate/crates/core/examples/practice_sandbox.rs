//! A player's practice table: statements pass the practice policy and may
//! only touch the player's own table.

use queryarena::game::Sandbox;
use queryarena::sql::ExecOutcome;

fn main() {
    let mut sandbox = Sandbox::provision("ana");
    let me = sandbox.name();
    println!("sandbox table: {me}");

    let script = [
        format!("SELECT * FROM {me}"),
        format!("INSERT INTO {me} VALUES (4, 'Dana', '2024-03-01')"),
        format!("DELETE FROM {me} WHERE id = 1"),
        format!("SELECT * FROM {me} ORDER BY id"),
        "SELECT * FROM ben_table".to_string(),
        format!("DROP TABLE {me}"),
        format!("SELECT * FROM {me}; DELETE FROM {me}"),
    ];
    for sql in &script {
        print!("{sql}\n  -> ");
        match sandbox.run(sql) {
            Ok(ExecOutcome::Rows(rs)) => println!("{} rows\n{}", rs.rows.len(), rs.serialize()),
            Ok(ExecOutcome::Affected(n)) => println!("{n} affected"),
            Err(e) => println!("{e}"),
        }
    }

    sandbox.reset();
    println!("after reset: {} rows", sandbox.table.rows.len());
}
