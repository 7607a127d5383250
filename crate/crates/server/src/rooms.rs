use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use parking_lot::Mutex;
use queryarena::arena::{
    Audience, Outbound, Room, RoomCommand, RoomConfig, RoomEvent, RoomSnapshot, RoomState,
    RoomSummary, RoomType,
};
use queryarena::registry::{GameMode, Registry, Role};
use serde::Serialize;
use tokio::sync::{mpsc, oneshot};

use crate::error::ApiError;

const TICK: Duration = Duration::from_millis(200);

/// What a connection's writer task sends down the socket.
#[derive(Debug, Clone)]
pub enum Frame {
    Text(Arc<str>),
    Close(u16, String),
}

/// Messages into a room task. Everything that touches the room goes
/// through this queue, which is what fixes arrival order.
#[derive(Debug)]
pub enum RoomMsg {
    Connect {
        conn: u64,
        user: String,
        tx: mpsc::UnboundedSender<Frame>,
    },
    Disconnect {
        conn: u64,
        user: String,
    },
    Command(RoomCommand),
    Reject {
        user: String,
        code: String,
        message: String,
    },
    Snapshot(oneshot::Sender<RoomSnapshot>),
}

#[derive(Serialize)]
struct Wire {
    #[serde(rename = "type")]
    kind: &'static str,
    seq: u64,
    payload: serde_json::Value,
}

/// Renders an event as `{"type", "seq", "payload"}`.
pub fn wire_text(out: &Outbound) -> String {
    let payload = match serde_json::to_value(&out.event).expect("events serialise") {
        serde_json::Value::Object(mut m) => m.remove("payload").unwrap_or_default(),
        _ => serde_json::Value::Null,
    };
    serde_json::to_string(&Wire {
        kind: out.event.type_name(),
        seq: out.seq,
        payload,
    })
    .expect("wire message serialises")
}

#[derive(Debug, Clone)]
struct Handle {
    tx: mpsc::UnboundedSender<RoomMsg>,
    summary: Arc<Mutex<RoomSummary>>,
}

/// Directory of live rooms. Each room runs in its own task.
#[derive(Debug)]
pub struct RoomHub {
    rooms: Arc<Mutex<HashMap<u64, Handle>>>,
    next_id: AtomicU64,
    next_conn: AtomicU64,
    registry: Arc<Registry>,
}

impl RoomHub {
    pub fn new(registry: Arc<Registry>) -> Self {
        Self {
            rooms: Arc::default(),
            next_id: AtomicU64::new(1),
            next_conn: AtomicU64::new(1),
            registry,
        }
    }

    pub fn create(
        &self,
        creator: &str,
        role: Role,
        config: RoomConfig,
    ) -> Result<RoomSummary, ApiError> {
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let room = Room::create(id, creator, role, config, self.registry.question_pool())?;
        let summary = Arc::new(Mutex::new(room.summary()));
        let (tx, rx) = mpsc::unbounded_channel();
        self.rooms.lock().insert(
            id,
            Handle {
                tx,
                summary: summary.clone(),
            },
        );
        let task = RoomTask {
            room,
            subscribers: Vec::new(),
            summary: summary.clone(),
            registry: self.registry.clone(),
            rooms: self.rooms.clone(),
            recorded: false,
        };
        tokio::spawn(task.run(rx));
        tracing::info!(room = id, creator, "room created");
        let s = summary.lock().clone();
        Ok(s)
    }

    pub fn list(&self) -> Vec<RoomSummary> {
        let mut out: Vec<RoomSummary> = self
            .rooms
            .lock()
            .values()
            .map(|h| h.summary.lock().clone())
            .collect();
        out.sort_by_key(|s| s.id);
        out
    }

    pub fn sender(&self, id: u64) -> Option<mpsc::UnboundedSender<RoomMsg>> {
        self.rooms.lock().get(&id).map(|h| h.tx.clone())
    }

    pub async fn snapshot(&self, id: u64) -> Option<RoomSnapshot> {
        let tx = self.sender(id)?;
        let (reply, rx) = oneshot::channel();
        tx.send(RoomMsg::Snapshot(reply)).ok()?;
        rx.await.ok()
    }

    pub fn next_conn(&self) -> u64 {
        self.next_conn.fetch_add(1, Ordering::Relaxed)
    }
}

struct Subscriber {
    conn: u64,
    user: String,
    tx: mpsc::UnboundedSender<Frame>,
}

struct RoomTask {
    room: Room,
    subscribers: Vec<Subscriber>,
    summary: Arc<Mutex<RoomSummary>>,
    registry: Arc<Registry>,
    rooms: Arc<Mutex<HashMap<u64, Handle>>>,
    recorded: bool,
}

impl RoomTask {
    async fn run(mut self, mut rx: mpsc::UnboundedReceiver<RoomMsg>) {
        let mut tick = tokio::time::interval(TICK);
        tick.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Skip);
        loop {
            tokio::select! {
                msg = rx.recv() => match msg {
                    Some(msg) => self.on_message(msg),
                    None => break,
                },
                _ = tick.tick() => {
                    if self.room.state() == RoomState::Running {
                        self.command(RoomCommand::Tick);
                    }
                }
            }
            *self.summary.lock() = self.room.summary();
            if self.room.state() == RoomState::Finished && self.subscribers.is_empty() {
                break;
            }
        }
        self.rooms.lock().remove(&self.room.id);
        tracing::debug!(room = self.room.id, "room closed");
    }

    fn on_message(&mut self, msg: RoomMsg) {
        match msg {
            RoomMsg::Connect { conn, user, tx } => {
                self.subscribers.push(Subscriber {
                    conn,
                    user: user.clone(),
                    tx,
                });
                if self.room.is_member(&user) {
                    let out = self.room.resync(&user);
                    self.deliver(&[out]);
                }
            }
            RoomMsg::Disconnect { conn, user } => {
                self.subscribers.retain(|s| s.conn != conn);
                let still_here = self.subscribers.iter().any(|s| s.user == user);
                // a dropped connection only leaves a room that has not started
                if !still_here
                    && self.room.state() == RoomState::Lobby
                    && self.room.is_member(&user)
                {
                    self.command(RoomCommand::Leave { user });
                }
            }
            RoomMsg::Command(cmd) => self.command(cmd),
            RoomMsg::Reject {
                user,
                code,
                message,
            } => {
                let out = self.room.reject(&user, &code, &message);
                self.deliver(&[out]);
            }
            RoomMsg::Snapshot(reply) => {
                let _ = reply.send(self.room.snapshot());
            }
        }
    }

    fn command(&mut self, cmd: RoomCommand) {
        let now = self.registry.clock().now();
        let out = self.room.handle(cmd, now);
        self.deliver(&out);
        if self.recorded {
            return;
        }
        let standings = out.iter().find_map(|o| match &o.event {
            RoomEvent::GameEnd { standings, .. } => Some(standings.clone()),
            _ => None,
        });
        if let Some(standings) = standings {
            self.recorded = true;
            self.record(standings);
        }
    }

    fn record(&self, standings: Vec<String>) {
        let mode = match self.room.room_type {
            RoomType::Casual => GameMode::MpCasual,
            RoomType::Competition => GameMode::MpCompetition,
        };
        let results = self.room.results().to_vec();
        let registry = self.registry.clone();
        let (id, name) = (self.room.id, self.room.name.clone());
        tokio::task::spawn_blocking(move || {
            if let Err(e) = registry.record_room(mode, id, &name, &standings, &results) {
                tracing::error!(room = id, error = %e, "failed to record room result");
            }
        });
    }

    fn deliver(&mut self, out: &[Outbound]) {
        for o in out {
            let text: Arc<str> = wire_text(o).into();
            for s in &self.subscribers {
                let to_them = match &o.audience {
                    Audience::All => true,
                    Audience::User(u) => *u == s.user,
                };
                if to_them {
                    let _ = s.tx.send(Frame::Text(text.clone()));
                }
            }
        }
    }
}
