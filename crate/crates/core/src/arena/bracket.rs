use serde::{Deserialize, Serialize};

use super::ArenaError;

pub type MatchId = usize;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EliminationMode {
    #[default]
    Single,
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Side {
    Winners,
    Losers,
    GrandFinal,
    Reset,
}

/// A bracket slot occupant. Players are referred to by seed index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Entrant {
    Player(usize),
    Bye,
}

impl Entrant {
    fn player(self) -> Option<usize> {
        match self {
            Entrant::Player(p) => Some(p),
            Entrant::Bye => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MatchStatus {
    /// At least one slot is still unknown.
    Waiting,
    /// Two real players, not yet decided.
    Ready,
    Decided {
        winner: usize,
        loser: usize,
    },
    /// A player met a bye and advanced without playing.
    Walkover {
        winner: usize,
    },
    /// Two byes met; a bye advances. Only occurs in the first losers round.
    Void,
    /// The reset final, when the winners-bracket champion took the grand final.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketMatch {
    pub id: MatchId,
    pub side: Side,
    pub round: u32,
    pub slots: [Option<Entrant>; 2],
    pub status: MatchStatus,
    winner_to: Option<(MatchId, usize)>,
    loser_to: Option<(MatchId, usize)>,
}

impl BracketMatch {
    /// Both seed indices once the match is playable or played.
    pub fn players(&self) -> Option<[usize; 2]> {
        match self.slots {
            [Some(Entrant::Player(a)), Some(Entrant::Player(b))] => Some([a, b]),
            _ => None,
        }
    }
}

/// Single or double elimination over a fixed seeded roster.
///
/// The roster is padded with byes up to a power of two. Seed `i` takes the
/// top slot of first-round match `i` until every first-round match has a
/// player, so two byes never meet in the winners bracket.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bracket {
    pub mode: EliminationMode,
    /// Usernames in seed order.
    pub players: Vec<String>,
    pub matches: Vec<BracketMatch>,
    losses: Vec<u32>,
    eliminated: Vec<usize>,
    champion: Option<usize>,
    grand_final: Option<MatchId>,
    reset: Option<MatchId>,
}

impl Bracket {
    pub fn new(mode: EliminationMode, players: Vec<String>) -> Result<Self, ArenaError> {
        let n = players.len();
        if n < 2 {
            return Err(ArenaError::NotEnoughPlayers);
        }
        let size = n.next_power_of_two();
        let k = size.trailing_zeros();
        let mut b = Bracket {
            mode,
            losses: vec![0; n],
            players,
            matches: Vec::new(),
            eliminated: Vec::new(),
            champion: None,
            grand_final: None,
            reset: None,
        };

        // Winners bracket, round by round.
        let mut wb: Vec<Vec<MatchId>> = Vec::new();
        for r in 1..=k {
            let count = size >> r;
            wb.push((0..count).map(|_| b.push(Side::Winners, r)).collect());
        }
        for r in 1..k as usize {
            for (i, &m) in wb[r - 1].iter().enumerate() {
                b.matches[m].winner_to = Some((wb[r][i / 2], i % 2));
            }
        }

        if mode == EliminationMode::Double {
            let gf = b.push(Side::GrandFinal, 1);
            let reset = b.push(Side::Reset, 1);
            b.grand_final = Some(gf);
            b.reset = Some(reset);
            let wb_final = wb[k as usize - 1][0];
            b.matches[wb_final].winner_to = Some((gf, 0));

            if k == 1 {
                b.matches[wb_final].loser_to = Some((gf, 1));
            } else {
                // Losers round 2j-1 halves the field, round 2j takes the
                // losers of winners round j+1.
                let mut prev: Vec<MatchId> = Vec::new();
                for j in 1..k {
                    let count = size >> (j + 1);
                    let odd: Vec<MatchId> = (0..count)
                        .map(|_| b.push(Side::Losers, 2 * j - 1))
                        .collect();
                    if j == 1 {
                        for (i, &m) in wb[0].iter().enumerate() {
                            b.matches[m].loser_to = Some((odd[i / 2], i % 2));
                        }
                    } else {
                        for (i, &m) in prev.iter().enumerate() {
                            b.matches[m].winner_to = Some((odd[i / 2], i % 2));
                        }
                    }
                    let even: Vec<MatchId> =
                        (0..count).map(|_| b.push(Side::Losers, 2 * j)).collect();
                    for (i, &m) in odd.iter().enumerate() {
                        b.matches[m].winner_to = Some((even[i], 0));
                    }
                    // Alternate drop-in order to delay rematches.
                    let drops = &wb[j as usize];
                    for (i, &m) in drops.iter().enumerate() {
                        let target = if j % 2 == 1 { count - 1 - i } else { i };
                        b.matches[m].loser_to = Some((even[target], 1));
                    }
                    prev = even;
                }
                b.matches[prev[0]].winner_to = Some((gf, 1));
            }
        }

        let half = size / 2;
        let first = wb[0].clone();
        for seed in 0..size {
            let entrant = if seed < n {
                Entrant::Player(seed)
            } else {
                Entrant::Bye
            };
            let (m, slot) = if seed < half {
                (first[seed], 0)
            } else {
                (first[seed - half], 1)
            };
            b.matches[m].slots[slot] = Some(entrant);
        }
        for m in first {
            b.settle(m);
        }
        Ok(b)
    }

    fn push(&mut self, side: Side, round: u32) -> MatchId {
        let id = self.matches.len();
        self.matches.push(BracketMatch {
            id,
            side,
            round,
            slots: [None, None],
            status: MatchStatus::Waiting,
            winner_to: None,
            loser_to: None,
        });
        id
    }

    /// Marks a match ready once both slots are known, resolving byes.
    fn settle(&mut self, id: MatchId) {
        let m = &self.matches[id];
        if m.status != MatchStatus::Waiting {
            return;
        }
        let [Some(a), Some(b)] = m.slots else {
            return;
        };
        match (a.player(), b.player()) {
            (Some(_), Some(_)) => self.matches[id].status = MatchStatus::Ready,
            (Some(p), None) | (None, Some(p)) => {
                self.matches[id].status = MatchStatus::Walkover { winner: p };
                self.forward(id, Entrant::Player(p), Entrant::Bye);
            }
            (None, None) => {
                self.matches[id].status = MatchStatus::Void;
                self.forward(id, Entrant::Bye, Entrant::Bye);
            }
        }
    }

    fn forward(&mut self, id: MatchId, winner: Entrant, loser: Entrant) {
        if let Some((to, slot)) = self.matches[id].winner_to {
            self.matches[to].slots[slot] = Some(winner);
            self.settle(to);
        }
        if let Some((to, slot)) = self.matches[id].loser_to {
            self.matches[to].slots[slot] = Some(loser);
            self.settle(to);
        }
    }

    pub fn get(&self, id: MatchId) -> Option<&BracketMatch> {
        self.matches.get(id)
    }

    /// Matches with two real players awaiting a result, in id order.
    pub fn ready(&self) -> Vec<MatchId> {
        self.matches
            .iter()
            .filter(|m| m.status == MatchStatus::Ready)
            .map(|m| m.id)
            .collect()
    }

    /// Records the winner of a ready match and advances both players.
    pub fn record(&mut self, id: MatchId, winner: usize) -> Result<(), ArenaError> {
        let m = self.matches.get(id).ok_or(ArenaError::UnknownMatch(id))?;
        match m.status {
            MatchStatus::Ready => {}
            MatchStatus::Waiting => return Err(ArenaError::MatchNotReady(id)),
            _ => return Err(ArenaError::MatchAlreadyResolved(id)),
        }
        let [a, b] = m.players().expect("ready matches have two players");
        let loser = if winner == a {
            b
        } else if winner == b {
            a
        } else {
            return Err(ArenaError::NotParticipant);
        };
        self.matches[id].status = MatchStatus::Decided { winner, loser };
        self.losses[loser] += 1;

        if Some(id) == self.grand_final {
            let reset = self.reset.expect("double elimination has a reset slot");
            if self.matches[id].slots[0] == Some(Entrant::Player(winner)) {
                self.matches[reset].status = MatchStatus::Skipped;
                self.finish(winner, loser);
            } else {
                self.matches[reset].slots =
                    [Some(Entrant::Player(loser)), Some(Entrant::Player(winner))];
                self.settle(reset);
            }
            return Ok(());
        }
        if Some(id) == self.reset {
            self.finish(winner, loser);
            return Ok(());
        }

        if self.is_eliminated(loser) {
            self.eliminated.push(loser);
        }
        let (w_to, l_to) = (self.matches[id].winner_to, self.matches[id].loser_to);
        match w_to {
            Some(_) => self.forward(id, Entrant::Player(winner), Entrant::Player(loser)),
            None => {
                // Final of a single-elimination bracket.
                debug_assert!(l_to.is_none());
                self.champion = Some(winner);
            }
        }
        Ok(())
    }

    fn finish(&mut self, winner: usize, loser: usize) {
        self.eliminated.push(loser);
        self.champion = Some(winner);
    }

    pub fn champion(&self) -> Option<usize> {
        self.champion
    }

    pub fn champion_name(&self) -> Option<&str> {
        self.champion.map(|p| self.players[p].as_str())
    }

    pub fn losses(&self, player: usize) -> u32 {
        self.losses[player]
    }

    pub fn is_eliminated(&self, player: usize) -> bool {
        let limit = match self.mode {
            EliminationMode::Single => 1,
            EliminationMode::Double => 2,
        };
        self.losses[player] >= limit || (self.champion.is_some() && self.champion != Some(player))
    }

    /// Matches actually played between two players.
    pub fn decided_count(&self) -> usize {
        self.matches
            .iter()
            .filter(|m| matches!(m.status, MatchStatus::Decided { .. }))
            .count()
    }

    /// Seed indices from champion down; later elimination ranks higher.
    pub fn standings(&self) -> Vec<usize> {
        let mut order: Vec<usize> = self.champion.into_iter().collect();
        order.extend(self.eliminated.iter().rev().copied());
        order
    }

    pub fn seed_of(&self, username: &str) -> Option<usize> {
        self.players.iter().position(|p| p == username)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    /// Plays every ready match, letting `pick` choose the winner.
    fn run(b: &mut Bracket, mut pick: impl FnMut(&BracketMatch) -> usize) {
        while b.champion().is_none() {
            let ready = b.ready();
            assert!(!ready.is_empty(), "stalled bracket");
            for id in ready {
                let m = b.get(id).unwrap().clone();
                let [x, y] = m.players().unwrap();
                assert!(!b.is_eliminated(x) && !b.is_eliminated(y));
                b.record(id, pick(&m)).unwrap();
            }
        }
    }

    #[test]
    fn single_two_players_one_match() {
        let mut b = Bracket::new(EliminationMode::Single, names(2)).unwrap();
        assert_eq!(b.ready().len(), 1);
        run(&mut b, |m| m.players().unwrap()[0]);
        assert_eq!(b.decided_count(), 1);
        assert_eq!(b.champion(), Some(0));
    }

    #[test]
    fn single_four_shape() {
        let b = Bracket::new(EliminationMode::Single, names(4)).unwrap();
        let r1 = b.matches.iter().filter(|m| m.round == 1).count();
        let r2 = b.matches.iter().filter(|m| m.round == 2).count();
        assert_eq!((r1, r2), (2, 1));
    }

    #[test]
    fn byes_only_meet_players_in_first_round() {
        for n in 2..=16 {
            let b = Bracket::new(EliminationMode::Double, names(n)).unwrap();
            for m in b
                .matches
                .iter()
                .filter(|m| m.side == Side::Winners && m.round == 1)
            {
                assert!(matches!(m.slots[0], Some(Entrant::Player(_))), "n={n}");
            }
        }
    }

    #[test]
    fn double_four_with_and_without_reset() {
        let mut b = Bracket::new(EliminationMode::Double, names(4)).unwrap();
        run(&mut b, |m| m.players().unwrap()[0]);
        assert_eq!(b.decided_count(), 6);

        let mut b = Bracket::new(EliminationMode::Double, names(4)).unwrap();
        run(&mut b, |m| {
            let [a, c] = m.players().unwrap();
            if m.side == Side::GrandFinal {
                c
            } else {
                a
            }
        });
        assert_eq!(b.decided_count(), 7);
    }

    #[test]
    fn double_two_players() {
        let mut b = Bracket::new(EliminationMode::Double, names(2)).unwrap();
        run(&mut b, |m| m.players().unwrap()[0]);
        assert_eq!(b.decided_count(), 2);
        assert_eq!(b.champion(), Some(0));
        assert_eq!(b.losses(1), 2);
    }

    #[test]
    fn resolved_match_rejects_second_result() {
        let mut b = Bracket::new(EliminationMode::Single, names(4)).unwrap();
        let id = b.ready()[0];
        let p = b.get(id).unwrap().players().unwrap()[0];
        b.record(id, p).unwrap();
        assert_eq!(b.record(id, p), Err(ArenaError::MatchAlreadyResolved(id)));
    }

    #[test]
    fn standings_start_with_champion() {
        let mut b = Bracket::new(EliminationMode::Single, names(5)).unwrap();
        run(&mut b, |m| m.players().unwrap()[0]);
        let s = b.standings();
        assert_eq!(s.len(), 5);
        assert_eq!(s[0], b.champion().unwrap());
    }

    #[test]
    fn too_few_players() {
        assert_eq!(
            Bracket::new(EliminationMode::Single, names(1)).unwrap_err(),
            ArenaError::NotEnoughPlayers
        );
    }
}
