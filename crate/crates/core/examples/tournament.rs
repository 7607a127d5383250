//! Runs a double-elimination bracket for six players, with the lower seed
//! always winning, and prints each match as it is decided.

use queryarena::arena::{Bracket, EliminationMode, MatchStatus};

fn main() {
    let players: Vec<String> = ["ana", "ben", "cyd", "dee", "eli", "fay"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut bracket = Bracket::new(EliminationMode::Double, players).expect("valid roster");
    println!(
        "{} slots, {} matches including byes",
        bracket.players.len(),
        bracket.matches.len()
    );

    while bracket.champion().is_none() {
        let id = bracket.ready()[0];
        let m = bracket.get(id).expect("ready match exists").clone();
        let [a, b] = m.players().expect("ready matches have two players");
        let winner = a.min(b);
        bracket
            .record(id, winner)
            .expect("ready match accepts its player");
        println!(
            "{:?} round {}: {} beat {}",
            m.side,
            m.round,
            bracket.players[winner],
            bracket.players[a.max(b)]
        );
    }

    let walkovers = bracket
        .matches
        .iter()
        .filter(|m| matches!(m.status, MatchStatus::Walkover { .. }))
        .count();
    println!("\nchampion: {}", bracket.champion_name().unwrap_or("-"));
    println!(
        "played {} matches, {walkovers} walkovers",
        bracket.decided_count()
    );
    let standings: Vec<&str> = bracket
        .standings()
        .into_iter()
        .map(|p| bracket.players[p].as_str())
        .collect();
    println!("standings: {}", standings.join(" > "));
}
