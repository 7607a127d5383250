use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::guard::Question;

use super::GameError;

/// What happened to a delete request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Removal {
    Removed,
    /// A live session still holds the question; it leaves the bank once the
    /// last session releases it.
    Deferred,
}

/// The question bank. Questions are shared as `Arc` so sessions can keep
/// grading a question even after an admin deletes it.
#[derive(Debug, Clone, Default)]
pub struct QuestionBank {
    questions: BTreeMap<u32, Arc<Question>>,
    pins: BTreeMap<u32, usize>,
    doomed: BTreeSet<u32>,
}

impl QuestionBank {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_questions(questions: impl IntoIterator<Item = Question>) -> Self {
        let mut bank = Self::new();
        for q in questions {
            bank.upsert(q);
        }
        bank
    }

    /// Inserts or replaces by id. Replacing cancels a pending delete.
    pub fn upsert(&mut self, question: Question) -> Arc<Question> {
        let id = question.id;
        let q = Arc::new(question);
        self.doomed.remove(&id);
        self.questions.insert(id, q.clone());
        q
    }

    pub fn get(&self, id: u32) -> Option<&Arc<Question>> {
        self.questions.get(&id)
    }

    pub fn contains(&self, id: u32) -> bool {
        self.questions.contains_key(&id) && !self.doomed.contains(&id)
    }

    /// Questions eligible for new draws, in id order.
    pub fn active(&self) -> impl Iterator<Item = &Arc<Question>> {
        self.questions
            .values()
            .filter(|q| !self.doomed.contains(&q.id))
    }

    pub fn len(&self) -> usize {
        self.questions.len() - self.doomed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn next_id(&self) -> u32 {
        self.questions.keys().next_back().map_or(1, |id| id + 1)
    }

    pub fn remove(&mut self, id: u32) -> Result<Removal, GameError> {
        if !self.contains(id) {
            return Err(GameError::UnknownQuestionId(id));
        }
        if self.pins.get(&id).copied().unwrap_or(0) > 0 {
            self.doomed.insert(id);
            return Ok(Removal::Deferred);
        }
        self.questions.remove(&id);
        Ok(Removal::Removed)
    }

    pub fn pin(&mut self, ids: impl IntoIterator<Item = u32>) {
        for id in ids {
            *self.pins.entry(id).or_insert(0) += 1;
        }
    }

    /// Releases pins; returns the ids whose deferred delete just completed.
    pub fn unpin(&mut self, ids: impl IntoIterator<Item = u32>) -> Vec<u32> {
        let mut finished = Vec::new();
        for id in ids {
            let Some(count) = self.pins.get_mut(&id) else {
                continue;
            };
            *count -= 1;
            if *count == 0 {
                self.pins.remove(&id);
                if self.doomed.remove(&id) {
                    self.questions.remove(&id);
                    finished.push(id);
                }
            }
        }
        finished
    }

    pub fn is_pinned(&self, id: u32) -> bool {
        self.pins.contains_key(&id)
    }
}
