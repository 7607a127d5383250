//! Drives a room state machine directly: two players race on the same
//! question, the first correct answer in arrival order takes the round, and
//! replaying the command log reproduces the same outcome.

use std::path::Path;
use std::sync::Arc;

use chrono::{TimeZone, Utc};
use queryarena::arena::{Room, RoomCommand, RoomConfig, RoomEvent};
use queryarena::guard::ingest_question;
use queryarena::registry::{read_questions, Role};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/questions.ndjson");
    let pool: Vec<_> = read_questions(&path)
        .expect("read fixture questions")
        .into_iter()
        .map(|s| Arc::new(ingest_question(s).expect("valid question")))
        .collect();
    let answer = |id: u32| {
        pool.iter()
            .find(|q| q.id == id)
            .map(|q| q.stored_answers[0].clone())
    };

    let mut room = Room::create(
        1,
        "ana",
        Role::Student,
        RoomConfig::new("lunch race"),
        pool.clone(),
    )
    .expect("valid room");
    let now = Utc.with_ymd_and_hms(2025, 3, 1, 12, 0, 0).unwrap();
    let send = |room: &mut Room, cmd: RoomCommand| {
        for out in room.handle(cmd, now) {
            match &out.event {
                RoomEvent::RoundBegin(r) => println!(
                    "#{} round {} Q{}: {}",
                    out.seq, r.round, r.question_id, r.question_text
                ),
                RoomEvent::AnswerResult {
                    player,
                    correct,
                    reason,
                    ..
                } => {
                    println!(
                        "#{} {player}: {} ({reason})",
                        out.seq,
                        if *correct { "correct" } else { "wrong" }
                    )
                }
                RoomEvent::Error { code, .. } => println!("#{} error {code}", out.seq),
                RoomEvent::GameEnd { champion, .. } => println!("#{} champion {champion}", out.seq),
                other => println!("#{} {}", out.seq, other.type_name()),
            }
        }
    };

    for user in ["ana", "ben"] {
        send(
            &mut room,
            RoomCommand::Join {
                user: user.into(),
                as_spectator: false,
            },
        );
    }
    send(
        &mut room,
        RoomCommand::Start {
            user: "ana".into(),
            seed: 42,
        },
    );

    while room.bracket().and_then(|b| b.champion()).is_none() {
        let (_, round) = room.live_round("ben").expect("a round is live");
        let text = answer(round.question.id).expect("question is in the pool");
        // ben is a hair faster; ana's identical answer arrives second
        send(
            &mut room,
            RoomCommand::Answer {
                user: "ben".into(),
                text: text.clone(),
                match_id: None,
            },
        );
        send(
            &mut room,
            RoomCommand::Answer {
                user: "ana".into(),
                text,
                match_id: None,
            },
        );
    }

    let replay = room.replay();
    assert_eq!(replay.results(), room.results());
    println!(
        "\nreplayed {} logged commands: same results",
        room.log().len()
    );
}
