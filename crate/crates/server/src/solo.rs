use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use parking_lot::Mutex;
use queryarena::game::{GameError, ScoreReport, SessionView, SoloMode, SoloSession};
use queryarena::registry::Registry;

use crate::error::ApiError;

fn same_user(a: &str, b: &str) -> bool {
    a.eq_ignore_ascii_case(b)
}

/// Live solo sessions. Each player has at most one unsubmitted session;
/// starting another abandons the old one and unpins its questions.
#[derive(Debug, Default)]
pub struct SoloStore {
    sessions: Mutex<HashMap<u64, SoloSession>>,
    next_id: AtomicU64,
}

impl SoloStore {
    pub fn start(
        &self,
        registry: &Registry,
        user: &str,
        mode: SoloMode,
        seed: u64,
    ) -> Result<SessionView, ApiError> {
        let questions = registry.draw(mode, seed)?;
        let id = self.next_id.fetch_add(1, Ordering::Relaxed) + 1;
        let session = SoloSession::new(id, user, mode, questions, registry.clock().now());
        let view = session.view();
        let mut sessions = self.sessions.lock();
        let stale: Vec<u64> = sessions
            .values()
            .filter(|s| same_user(&s.player, user) && !s.submitted())
            .map(|s| s.id)
            .collect();
        for old in stale {
            if let Some(s) = sessions.remove(&old) {
                registry.release(&s.question_ids());
            }
        }
        sessions.insert(id, session);
        tracing::debug!(user, id, seed, "solo session started");
        Ok(view)
    }

    /// Runs `f` on the caller's own session. Other players' sessions look
    /// the same as missing ones.
    pub fn with<T>(
        &self,
        id: u64,
        user: &str,
        f: impl FnOnce(&mut SoloSession) -> Result<T, GameError>,
    ) -> Result<T, ApiError> {
        let mut sessions = self.sessions.lock();
        match sessions.get_mut(&id) {
            Some(s) if same_user(&s.player, user) => Ok(f(s)?),
            _ => Err(ApiError::not_found(format!("unknown solo session {id}"))),
        }
    }

    /// Grades the session, records the score and unpins its questions.
    pub fn submit(
        &self,
        registry: &Registry,
        id: u64,
        user: &str,
    ) -> Result<ScoreReport, ApiError> {
        let now = registry.clock().now();
        let (report, mode, ids) = self.with(id, user, |s| {
            let report = s.submit_all(now)?;
            Ok((report, s.mode, s.question_ids()))
        })?;
        registry.release(&ids);
        registry.record_solo(user, mode, &report)?;
        // keep the submitted session readable until the player starts another
        self.sessions
            .lock()
            .retain(|_, s| !(s.submitted() && s.id != id && same_user(&s.player, user)));
        Ok(report)
    }
}
