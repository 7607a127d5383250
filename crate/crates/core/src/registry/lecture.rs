use serde::{Deserialize, Serialize};

use crate::sql::Database;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LectureMode {
    Lecture,
    Tutorial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BlockContent {
    Text {
        text: String,
    },
    Image {
        url: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        caption: Option<String>,
    },
    Audio {
        url: String,
    },
    VideoEmbed {
        url: String,
    },
}

/// A query shown running in a tutorial. `setup` statements prepare a scratch
/// database; the transcript is the engine's output, captured when saved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demo {
    #[serde(default)]
    pub setup: Vec<String>,
    pub query: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    #[serde(flatten)]
    pub content: BlockContent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demo: Option<Demo>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LectureInput {
    pub title: String,
    pub mode: LectureMode,
    pub blocks: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LectureEntry {
    pub id: u64,
    pub title: String,
    pub mode: LectureMode,
    pub blocks: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LectureSummary {
    pub id: u64,
    pub title: String,
    pub mode: LectureMode,
    pub blocks: usize,
}

impl LectureEntry {
    pub fn summary(&self) -> LectureSummary {
        LectureSummary {
            id: self.id,
            title: self.title.clone(),
            mode: self.mode,
            blocks: self.blocks.len(),
        }
    }
}

fn is_web_url(url: &str) -> bool {
    let rest = url
        .strip_prefix("https://")
        .or_else(|| url.strip_prefix("http://"));
    rest.is_some_and(|r| !r.is_empty() && !r.contains(char::is_whitespace))
}

/// Runs the setup statements and the query, rendering each outcome on its
/// own line group.
pub fn demo_transcript(demo: &Demo) -> Result<String, String> {
    let mut db = Database::new();
    for stmt in &demo.setup {
        db.run(stmt).map_err(|e| format!("setup '{stmt}': {e}"))?;
    }
    let outcome = db
        .run(&demo.query)
        .map_err(|e| format!("demo query: {e}"))?;
    Ok(match outcome.rows() {
        Some(rs) => rs.serialize(),
        None => format!(
            "{} row(s) affected",
            outcome.affected().expect("non-row outcome")
        ),
    })
}

/// Checks an entry and fills in missing demo transcripts.
pub fn prepare_lecture(id: u64, input: LectureInput) -> Result<LectureEntry, String> {
    if input.title.trim().is_empty() {
        return Err("title is empty".into());
    }
    if input.blocks.is_empty() {
        return Err("a lecture needs at least one block".into());
    }
    let mut blocks = input.blocks;
    for (i, block) in blocks.iter_mut().enumerate() {
        match &block.content {
            BlockContent::Text { text } if text.trim().is_empty() => {
                return Err(format!("block {i}: empty text"));
            }
            BlockContent::Image { url, .. }
            | BlockContent::Audio { url }
            | BlockContent::VideoEmbed { url }
                if !is_web_url(url) =>
            {
                return Err(format!("block {i}: '{url}' is not an http(s) URL"));
            }
            _ => {}
        }
        if let Some(demo) = &mut block.demo {
            if input.mode != LectureMode::Tutorial {
                return Err(format!("block {i}: demos belong to tutorials"));
            }
            if demo.transcript.is_none() {
                demo.transcript =
                    Some(demo_transcript(demo).map_err(|e| format!("block {i}: {e}"))?);
            }
        }
    }
    if input.mode == LectureMode::Tutorial && blocks.iter().all(|b| b.demo.is_none()) {
        return Err("a tutorial needs at least one demo".into());
    }
    Ok(LectureEntry {
        id,
        title: input.title.trim().to_string(),
        mode: input.mode,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(t: &str) -> Block {
        Block {
            content: BlockContent::Text { text: t.into() },
            demo: None,
        }
    }

    #[test]
    fn tutorial_transcript_is_captured() {
        let mut block = text("SELECT filters rows.");
        block.demo = Some(Demo {
            setup: vec![
                "CREATE TABLE pets (id INT, name VARCHAR(10))".into(),
                "INSERT INTO pets VALUES (1, 'Rex'), (2, 'Tom')".into(),
            ],
            query: "SELECT name FROM pets WHERE id = 2".into(),
            transcript: None,
        });
        let entry = prepare_lecture(
            1,
            LectureInput {
                title: "Filtering".into(),
                mode: LectureMode::Tutorial,
                blocks: vec![block],
            },
        )
        .unwrap();
        assert_eq!(
            entry.blocks[0].demo.as_ref().unwrap().transcript.as_deref(),
            Some("name\nTom")
        );
    }

    #[test]
    fn validation() {
        let lecture = |blocks| LectureInput {
            title: "t".into(),
            mode: LectureMode::Lecture,
            blocks,
        };
        assert!(prepare_lecture(1, lecture(vec![])).is_err());
        let video = Block {
            content: BlockContent::VideoEmbed {
                url: "<iframe>".into(),
            },
            demo: None,
        };
        assert!(prepare_lecture(1, lecture(vec![video])).is_err());
        assert!(prepare_lecture(1, lecture(vec![text("ok")])).is_ok());
        let mut tut = lecture(vec![text("ok")]);
        tut.mode = LectureMode::Tutorial;
        assert!(prepare_lecture(1, tut).is_err());
    }

    #[test]
    fn block_json_shape() {
        let b: Block =
            serde_json::from_str(r#"{"kind":"VIDEO_EMBED","url":"https://v.example/x"}"#).unwrap();
        assert_eq!(
            b.content,
            BlockContent::VideoEmbed {
                url: "https://v.example/x".into()
            }
        );
    }
}
