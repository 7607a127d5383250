//! Durable registry: every change is appended to a log, snapshots compact
//! it, and reopening the directory restores the same state.

use std::sync::Arc;

use queryarena::registry::{
    ProfileDetails, Registry, RegistryConfig, SystemClock, LOG_FILE, SNAPSHOT_FILE,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("queryarena-demo-{}", std::process::id()));
    let config = RegistryConfig {
        snapshot_every: 4,
        ..RegistryConfig::fast()
    };

    let before = {
        let reg = Registry::open(&dir, config, Arc::new(SystemClock))?;
        reg.create_admin("admin", "adminpass1", ProfileDetails::default())?;
        for name in ["ana", "ben", "cyd"] {
            let code = reg.issue_verification_code("admin")?;
            reg.register_student(name, "password1", &code.code, ProfileDetails::default())?;
        }
        reg.practice("ana", "DELETE FROM ana_table WHERE id = 1")?;
        reg.export_state()
    };
    for file in [SNAPSHOT_FILE, LOG_FILE] {
        let len = std::fs::metadata(dir.join(file))
            .map(|m| m.len())
            .unwrap_or(0);
        println!("{file}: {len} bytes");
    }

    let reg = Registry::open(&dir, config, Arc::new(SystemClock))?;
    let after = reg.export_state();
    println!("accounts restored: {}", after.accounts.len());
    println!(
        "ana's sandbox rows: {}",
        reg.sandbox("ana").map_or(0, |t| t.rows.len())
    );
    assert_eq!(before, after);
    println!("state identical after reopen");

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
