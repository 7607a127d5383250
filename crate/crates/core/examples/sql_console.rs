//! Interactive console over the bare SQL engine.
//!
//! ```bash
//! cargo run -p queryarena --example sql_console
//! ```
//!
//! Reads one statement per line from stdin. With no terminal attached it
//! runs a short demo script instead.

use std::io::{self, BufRead, IsTerminal, Write};

use queryarena::sql::{Database, ExecOutcome};

const DEMO: &[&str] = &[
    "CREATE TABLE tbl_pets (id INT NOT NULL, name VARCHAR(20), born DATE)",
    "INSERT INTO tbl_pets VALUES (1, 'Mochi', '2019-04-02'), (2, 'Biscuit', NULL)",
    "INSERT INTO tbl_pets (name, id) VALUES ('it''s Pepper', 3)",
    "UPDATE tbl_pets SET born = '2021-11-30' WHERE id = 2",
    "SELECT name, born FROM tbl_pets WHERE born IS NOT NULL ORDER BY born DESC",
    "SELECT * FROM tbl_pets WHERE name LIKE '%e%' LIMIT 2",
    "SELECT COUNT(*) FROM tbl_pets",
];

fn run(db: &mut Database, line: &str) {
    match db.run(line) {
        Ok(ExecOutcome::Rows(rs)) => {
            println!("{}", rs.columns.join(" | "));
            for row in &rs.rows {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                println!("{}", cells.join(" | "));
            }
            println!("({} rows)", rs.rows.len());
        }
        Ok(ExecOutcome::Affected(n)) => println!("ok, {n} affected"),
        Err(e) => println!("error: {e}"),
    }
}

fn main() {
    let mut db = Database::new();
    let stdin = io::stdin();
    if !stdin.is_terminal() && std::env::args().all(|a| a != "--stdin") {
        for line in DEMO {
            println!("sql> {line}");
            run(&mut db, line);
            println!();
        }
        return;
    }
    loop {
        print!("sql> ");
        io::stdout().flush().ok();
        let mut line = String::new();
        if stdin.lock().read_line(&mut line).unwrap_or(0) == 0 {
            break;
        }
        let line = line.trim();
        if !line.is_empty() {
            run(&mut db, line);
        }
    }
}
