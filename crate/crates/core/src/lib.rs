//! Game engine for a self-hosted SQL-learning arena.
//!
//! Students write SQL against a sandboxed subset engine ([`sql`]); answers
//! are policed and graded by [`guard`] (exact string matching for
//! DDL/DML questions, blind tests on hidden shadow tables for SELECT
//! questions). [`game`] runs solo drills and practice sandboxes, [`arena`]
//! runs real-time single/double elimination rooms, and [`registry`] owns
//! accounts, ratings, lectures, the question bank and durable storage.
//!
//! Every major capability has a runnable program under `examples/`:
//!
//! ```bash
//! cargo run -p queryarena --example sql_console
//! cargo run -p queryarena --example blind_test_grading
//! cargo run -p queryarena --example solo_session
//! cargo run -p queryarena --example tournament
//! cargo run -p queryarena-server --example headless_client
//! ```

pub mod arena;
pub mod game;
pub mod guard;
pub mod registry;
pub mod sql;

#[cfg(feature = "testkit")]
pub mod testkit;
