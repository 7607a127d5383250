//! A solo drill: draw ten questions, answer some, skip one, submit, and
//! record the score.

use std::sync::Arc;

use queryarena::game::{SessionView, SoloMode};
use queryarena::registry::{
    read_questions, GameMode, ProfileDetails, Registry, RegistryConfig, SystemClock,
};

fn show(view: &SessionView) {
    for q in &view.questions {
        println!("  #{} [{:?}] {}", q.index, q.category, q.text);
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reg = Registry::in_memory(RegistryConfig::fast(), Arc::new(SystemClock));
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/questions.ndjson");
    reg.seed_questions(read_questions(&path)?)?;
    reg.create_admin("admin", "adminpass1", ProfileDetails::default())?;
    let code = reg.issue_verification_code("admin")?;
    reg.register_student("ana", "password1", &code.code, ProfileDetails::default())?;

    let questions = reg.draw(SoloMode::Casual, 7)?;
    let mut session = queryarena::game::SoloSession::new(
        1,
        "ana",
        SoloMode::Casual,
        questions,
        reg.clock().now(),
    );
    println!("drawn:");
    show(&session.view());

    // five right, one wrong, one skipped, the rest left blank
    let answers: Vec<String> = session
        .questions()
        .iter()
        .map(|q| q.stored_answers[0].clone())
        .collect();
    for (i, a) in answers.iter().enumerate().take(5) {
        session.answer(i, a)?;
    }
    session.answer(5, "SELECT 1")?;
    session.skip(6)?;

    let report = session.submit_all(reg.clock().now())?;
    reg.release(&session.question_ids());
    println!(
        "\nscore {}/{}",
        report.total_correct, report.total_questions
    );
    for (cat, stat) in &report.category_stats {
        println!("  {cat:?}: {}/{}", stat.correct, stat.attempted);
    }
    let rating = reg.record_solo("ana", SoloMode::Casual, &report)?;
    println!("SOLO_CASUAL points: {}", rating.rating);
    assert_eq!(
        reg.rating("ana", GameMode::SoloCasual).rating,
        rating.rating
    );
    Ok(())
}
