//! Elo updates for head-to-head games and the paged leaderboard.

use std::sync::Arc;

use queryarena::registry::{
    elo_update, GameMode, ProfileDetails, Registry, RegistryConfig, SystemClock,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("1000 beats 1000 -> {:?}", elo_update(1000, 1000));
    println!("1200 beats 1000 -> {:?}", elo_update(1200, 1000));
    println!("1000 beats 1200 -> {:?}\n", elo_update(1000, 1200));

    let reg = Registry::in_memory(RegistryConfig::fast(), Arc::new(SystemClock));
    reg.create_admin("admin", "adminpass1", ProfileDetails::default())?;
    let names = ["ana", "ben", "cyd", "dee"];
    for name in names {
        let code = reg.issue_verification_code("admin")?;
        reg.register_student(name, "password1", &code.code, ProfileDetails::default())?;
    }
    // a round robin where the earlier name always wins
    for (i, w) in names.iter().enumerate() {
        for l in &names[i + 1..] {
            reg.update_rating(GameMode::MpCompetition, w, l)?;
        }
    }
    for e in reg.leaderboard("MP_COMPETITION", 0)? {
        println!("{:>2}. {:<4} {}", e.rank, e.username, e.rating);
    }
    Ok(())
}
