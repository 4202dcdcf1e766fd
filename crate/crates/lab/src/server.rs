//! Session protocol server.
//!
//! Each connection gets a reader (this connection's thread) and a writer
//! thread; each session gets its own simulation thread. They communicate
//! only through channels, and every outgoing message passes through the
//! connection's single writer, which stamps the sequence numbers.

use std::collections::HashMap;
use std::io::{self, BufReader, BufWriter};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use swarmchem::interactive::{write_log, Mode, Session, SessionConfig};
use swarmchem::metrics::{type_color, Rgb, PASSIVE_GRAY};

use crate::protocol::{
    parse_command, read_record, write_message, Command, ServerEnvelope, ServerMessage, SessionId, TileFrame,
    TileSummary, DEFAULT_FPS, PROTOCOL_VERSION,
};
use crate::write_atomic;

pub const MAX_TILES: usize = 64;
pub const MAX_FPS: f64 = 120.0;
pub const MAX_STEPS_PER_FRAME: u32 = 100;

#[derive(Debug, Clone, Default)]
pub struct ServerOptions {
    /// Where finished sessions' operator logs are written, if anywhere.
    pub log_dir: Option<PathBuf>,
}

pub struct Server {
    listener: TcpListener,
    options: ServerOptions,
    next_session: Arc<AtomicU64>,
}

/// A server running on a background thread.
pub struct ServerHandle {
    pub addr: SocketAddr,
    pub thread: JoinHandle<io::Result<()>>,
}

impl Server {
    pub fn bind<A: ToSocketAddrs>(addr: A, options: ServerOptions) -> io::Result<Self> {
        Ok(Self {
            listener: TcpListener::bind(addr)?,
            options,
            next_session: Arc::new(AtomicU64::new(1)),
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Accepts connections until the listener fails.
    pub fn serve(self) -> io::Result<()> {
        for stream in self.listener.incoming() {
            let stream = stream?;
            let ids = self.next_session.clone();
            let options = self.options.clone();
            thread::spawn(move || {
                let _ = handle_connection(stream, ids, options);
            });
        }
        Ok(())
    }

    pub fn spawn(self) -> io::Result<ServerHandle> {
        let addr = self.local_addr()?;
        let thread = thread::spawn(move || self.serve());
        Ok(ServerHandle { addr, thread })
    }
}

/// Sends messages to the connection's writer.
#[derive(Clone)]
struct Outbox(Sender<ServerMessage>);

impl Outbox {
    fn send(&self, msg: ServerMessage) -> bool {
        self.0.send(msg).is_ok()
    }

    fn error(&self, session: Option<SessionId>, reply_to: Option<u64>, message: impl Into<String>) -> bool {
        self.send(ServerMessage::Error {
            session,
            reply_to,
            message: message.into(),
        })
    }
}

fn spawn_writer(stream: TcpStream) -> (Outbox, JoinHandle<()>) {
    let (tx, rx) = mpsc::channel::<ServerMessage>();
    let handle = thread::spawn(move || {
        let mut w = BufWriter::new(stream);
        let mut seq = 0u64;
        for message in rx {
            seq += 1;
            let env = ServerEnvelope {
                v: PROTOCOL_VERSION,
                seq,
                message,
            };
            if write_message(&mut w, &env).is_err() {
                break;
            }
        }
    });
    (Outbox(tx), handle)
}

fn handle_connection(stream: TcpStream, ids: Arc<AtomicU64>, options: ServerOptions) -> io::Result<()> {
    stream.set_nodelay(true)?;
    let (out, writer) = spawn_writer(stream.try_clone()?);
    let mut reader = BufReader::new(stream);
    let mut sessions: HashMap<SessionId, (Sender<(u64, Command)>, JoinHandle<()>)> = HashMap::new();

    loop {
        let payload = match read_record(&mut reader) {
            Ok(Some(p)) => p,
            Ok(None) => break,
            Err(e) => {
                // framing is lost; report and hang up
                out.error(None, None, format!("protocol: {e}"));
                break;
            }
        };
        let env = match parse_command(&payload) {
            Ok(env) => env,
            Err((seq, message)) => {
                out.error(None, seq, message);
                continue;
            }
        };
        match env.command {
            Command::CreateSession {
                mode,
                tiles,
                seed,
                fps,
                steps_per_frame,
                config,
            } => {
                let spec = SessionSpec {
                    mode,
                    tiles,
                    seed: seed.unwrap_or_else(clock_seed),
                    fps: fps.unwrap_or(DEFAULT_FPS),
                    steps_per_frame: steps_per_frame.unwrap_or(1),
                    config: config.unwrap_or_default(),
                };
                if let Err(msg) = spec.validate() {
                    out.error(None, Some(env.seq), msg);
                    continue;
                }
                let id = ids.fetch_add(1, Ordering::Relaxed);
                let (tx, rx) = mpsc::channel();
                let out2 = out.clone();
                let log_dir = options.log_dir.clone();
                let reply_to = env.seq;
                let handle = thread::spawn(move || session_loop(id, spec, reply_to, rx, out2, log_dir));
                sessions.insert(id, (tx, handle));
            }
            cmd => {
                let id = cmd.session().expect("non-create commands name a session");
                let close = matches!(cmd, Command::CloseSession { .. });
                let delivered = sessions.get(&id).map(|(tx, _)| tx.send((env.seq, cmd)).is_ok()).unwrap_or(false);
                if !delivered {
                    out.error(Some(id), Some(env.seq), format!("unknown session {id}"));
                }
                if close {
                    if let Some((_, h)) = sessions.remove(&id) {
                        let _ = h.join();
                    }
                }
            }
        }
    }

    for (_, (tx, h)) in sessions.drain() {
        drop(tx);
        let _ = h.join();
    }
    drop(out);
    let _ = writer.join();
    Ok(())
}

fn clock_seed() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0)
}

struct SessionSpec {
    mode: Mode,
    tiles: usize,
    seed: u64,
    fps: f64,
    steps_per_frame: u32,
    config: SessionConfig,
}

impl SessionSpec {
    fn validate(&self) -> Result<(), String> {
        if self.tiles == 0 || self.tiles > MAX_TILES {
            return Err(format!("tile count must be in 1..={MAX_TILES}, got {}", self.tiles));
        }
        if !(self.fps > 0.0 && self.fps <= MAX_FPS) {
            return Err(format!("fps must be in (0, {MAX_FPS}], got {}", self.fps));
        }
        if self.steps_per_frame > MAX_STEPS_PER_FRAME {
            return Err(format!("steps_per_frame must be at most {MAX_STEPS_PER_FRAME}"));
        }
        if !(self.config.tile_side > 0.0) || self.config.tile_population == 0 || self.config.max_random_types == 0 {
            return Err("invalid session config".into());
        }
        Ok(())
    }
}

struct LiveSession {
    id: SessionId,
    session: Session,
    paused: bool,
    steps_per_frame: u32,
    fps: f64,
}

impl LiveSession {
    fn state(&self, reply_to: Option<u64>) -> ServerMessage {
        let s = &self.session;
        ServerMessage::SessionState {
            session: self.id,
            reply_to,
            mode: s.mode(),
            seed: s.seed(),
            paused: self.paused,
            steps_per_frame: self.steps_per_frame,
            fps: self.fps,
            step: s.step_count(),
            generation: s.generation(),
            tile_side: s.config().tile_side,
            tiles: s
                .tiles()
                .iter()
                .map(|t| TileSummary {
                    id: t.id,
                    types: t.recipe.len(),
                    particles: t.world.len(),
                })
                .collect(),
        }
    }

    fn frame(&self) -> ServerMessage {
        ServerMessage::TileFrames {
            session: self.id,
            step: self.session.step_count(),
            tiles: self
                .session
                .tiles()
                .iter()
                .map(|t| TileFrame {
                    id: t.id,
                    positions: t.world.particles().iter().map(|p| [p.pos.x as f32, p.pos.y as f32]).collect(),
                    colors: t
                        .world
                        .particles()
                        .iter()
                        .map(|p| hex(p.params().map(type_color).unwrap_or(PASSIVE_GRAY)))
                        .collect(),
                })
                .collect(),
        }
    }

    /// Applies one command; returns false when the session should end.
    fn handle(&mut self, seq: u64, cmd: Command, out: &Outbox) -> bool {
        let id = self.id;
        if let Some(op) = cmd.operator() {
            match self.session.apply(&op) {
                Ok(created) => {
                    out.send(ServerMessage::OperatorAck {
                        session: id,
                        reply_to: seq,
                        op,
                        created,
                    });
                    out.send(self.state(None));
                }
                Err(e) => {
                    out.error(Some(id), Some(seq), e.to_string());
                }
            }
            return true;
        }
        match cmd {
            Command::Pause { .. } => {
                self.paused = true;
                out.send(self.state(Some(seq)));
            }
            Command::Resume { .. } => {
                self.paused = false;
                out.send(self.state(Some(seq)));
            }
            Command::SetSpeed { steps_per_frame, .. } => {
                if steps_per_frame > MAX_STEPS_PER_FRAME {
                    out.error(Some(id), Some(seq), format!("steps_per_frame must be at most {MAX_STEPS_PER_FRAME}"));
                } else {
                    self.steps_per_frame = steps_per_frame;
                    out.send(self.state(Some(seq)));
                }
            }
            Command::GetState { .. } => {
                out.send(self.state(Some(seq)));
            }
            Command::GetRecipe { tile, .. } => match self.session.tile(tile) {
                Ok(t) => {
                    out.send(ServerMessage::Recipe {
                        session: id,
                        reply_to: seq,
                        tile,
                        text: t.recipe.to_text(),
                    });
                }
                Err(e) => {
                    out.error(Some(id), Some(seq), e.to_string());
                }
            },
            Command::GetLog { .. } => {
                out.send(self.log_message(seq));
            }
            Command::CloseSession { .. } => {
                out.send(self.state(Some(seq)));
                return false;
            }
            _ => unreachable!("operators and creation handled elsewhere"),
        }
        true
    }

    fn log_message(&self, reply_to: u64) -> ServerMessage {
        let s = &self.session;
        ServerMessage::OperatorLog {
            session: self.id,
            reply_to,
            mode: s.mode(),
            seed: s.seed(),
            initial_tiles: s.initial_tiles(),
            config: *s.config(),
            records: write_log(s.history()),
        }
    }
}

fn hex(c: Rgb) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

#[derive(Serialize)]
struct SavedLog<'a> {
    session: SessionId,
    mode: Mode,
    seed: u64,
    initial_tiles: usize,
    config: &'a SessionConfig,
    records: String,
}

fn session_loop(
    id: SessionId,
    spec: SessionSpec,
    reply_to: u64,
    rx: Receiver<(u64, Command)>,
    out: Outbox,
    log_dir: Option<PathBuf>,
) {
    let mut live = LiveSession {
        id,
        session: Session::new(spec.mode, spec.config, spec.seed, spec.tiles),
        paused: false,
        steps_per_frame: spec.steps_per_frame,
        fps: spec.fps,
    };
    let interval = Duration::from_secs_f64(1.0 / spec.fps);
    out.send(live.state(Some(reply_to)));
    let mut next_frame = Instant::now() + interval;

    loop {
        let received = if live.paused {
            rx.recv().map_err(|_| RecvTimeoutError::Disconnected)
        } else {
            rx.recv_timeout(next_frame.saturating_duration_since(Instant::now()))
        };
        match received {
            Ok((seq, cmd)) => {
                let was_paused = live.paused;
                if !live.handle(seq, cmd, &out) {
                    break;
                }
                if was_paused && !live.paused {
                    next_frame = Instant::now() + interval;
                }
                continue;
            }
            Err(RecvTimeoutError::Disconnected) => break,
            Err(RecvTimeoutError::Timeout) => {}
        }
        live.session.step_tiles(live.steps_per_frame as u64);
        if !out.send(live.frame()) {
            break;
        }
        next_frame += interval;
        let now = Instant::now();
        if next_frame < now {
            // fell behind: skip frames rather than bursting
            next_frame = now + interval;
        }
    }

    if let Some(dir) = log_dir {
        let saved = SavedLog {
            session: id,
            mode: live.session.mode(),
            seed: live.session.seed(),
            initial_tiles: live.session.initial_tiles(),
            config: live.session.config(),
            records: write_log(live.session.history()),
        };
        let _ = std::fs::create_dir_all(&dir);
        let json = serde_json::to_vec_pretty(&saved).expect("log serializes");
        let _ = write_atomic(&dir.join(format!("session-{id}.json")), &json);
    }
}
