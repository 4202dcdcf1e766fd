//! Session protocol: length-prefixed JSON records over a byte stream.
//!
//! Each record is the payload's byte length in ASCII decimal, a newline,
//! then the JSON payload. Every record carries the protocol version `v` and a
//! sequence number `seq`; the server's sequence numbers strictly increase on
//! each connection.
//!
//! Client commands (`cmd` field):
//!
//! | cmd | fields |
//! |---|---|
//! | `create_session` | `mode` (`niec`/`hiec`), `tiles`, optional `seed`, `fps`, `steps_per_frame` |
//! | `mutate`, `replicate`, `kill` | `session`, `tile` |
//! | `mix` | `session`, `a`, `b` |
//! | `random` | `session` |
//! | `niec_select` | `session`, `tiles` (1 or 2 ids) |
//! | `pause`, `resume`, `get_state`, `get_log`, `close_session` | `session` |
//! | `set_speed` | `session`, `steps_per_frame` |
//! | `get_recipe` | `session`, `tile` |
//!
//! Server messages (`type` field): `session_state`, `tile_frames`,
//! `operator_ack`, `recipe`, `operator_log`, `error`. Replies name the
//! command they answer in `reply_to`.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use swarmchem::interactive::{Mode, Operator, SessionConfig, TileId};

pub const PROTOCOL_VERSION: u32 = 1;
/// Records larger than this are rejected.
pub const MAX_RECORD_BYTES: usize = 16 << 20;
pub const DEFAULT_FPS: f64 = 20.0;

pub type SessionId = u64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClientEnvelope {
    pub v: u32,
    pub seq: u64,
    #[serde(flatten)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "cmd", rename_all = "snake_case")]
pub enum Command {
    CreateSession {
        mode: Mode,
        tiles: usize,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        fps: Option<f64>,
        #[serde(default)]
        steps_per_frame: Option<u32>,
        #[serde(default)]
        config: Option<SessionConfig>,
    },
    Mutate { session: SessionId, tile: TileId },
    Mix { session: SessionId, a: TileId, b: TileId },
    Replicate { session: SessionId, tile: TileId },
    Kill { session: SessionId, tile: TileId },
    Random { session: SessionId },
    NiecSelect { session: SessionId, tiles: Vec<TileId> },
    Pause { session: SessionId },
    Resume { session: SessionId },
    SetSpeed { session: SessionId, steps_per_frame: u32 },
    GetState { session: SessionId },
    GetRecipe { session: SessionId, tile: TileId },
    GetLog { session: SessionId },
    CloseSession { session: SessionId },
}

impl Command {
    pub fn session(&self) -> Option<SessionId> {
        use Command::*;
        match self {
            CreateSession { .. } => None,
            Mutate { session, .. }
            | Mix { session, .. }
            | Replicate { session, .. }
            | Kill { session, .. }
            | Random { session }
            | NiecSelect { session, .. }
            | Pause { session }
            | Resume { session }
            | SetSpeed { session, .. }
            | GetState { session }
            | GetRecipe { session, .. }
            | GetLog { session }
            | CloseSession { session } => Some(*session),
        }
    }

    /// The evolutionary operator carried by this command, if any.
    pub fn operator(&self) -> Option<Operator> {
        use Command::*;
        Some(match self {
            Mutate { tile, .. } => Operator::Mutate { tile: *tile },
            Mix { a, b, .. } => Operator::Mix { a: *a, b: *b },
            Replicate { tile, .. } => Operator::Replicate { tile: *tile },
            Kill { tile, .. } => Operator::Kill { tile: *tile },
            Random { .. } => Operator::Random,
            NiecSelect { tiles, .. } => Operator::NiecSelect { tiles: tiles.clone() },
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServerEnvelope {
    pub v: u32,
    pub seq: u64,
    #[serde(flatten)]
    pub message: ServerMessage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TileSummary {
    pub id: TileId,
    pub types: usize,
    pub particles: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TileFrame {
    pub id: TileId,
    /// `[x, y]` per particle.
    pub positions: Vec<[f32; 2]>,
    /// `#rrggbb` per particle.
    pub colors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    SessionState {
        session: SessionId,
        reply_to: Option<u64>,
        mode: Mode,
        seed: u64,
        paused: bool,
        steps_per_frame: u32,
        fps: f64,
        step: u64,
        generation: u64,
        tile_side: f64,
        tiles: Vec<TileSummary>,
    },
    TileFrames {
        session: SessionId,
        step: u64,
        tiles: Vec<TileFrame>,
    },
    OperatorAck {
        session: SessionId,
        reply_to: u64,
        #[serde(flatten)]
        op: Operator,
        created: Vec<TileId>,
    },
    Recipe {
        session: SessionId,
        reply_to: u64,
        tile: TileId,
        text: String,
    },
    OperatorLog {
        session: SessionId,
        reply_to: u64,
        mode: Mode,
        seed: u64,
        initial_tiles: usize,
        config: SessionConfig,
        /// One JSON operator record per line.
        records: String,
    },
    Error {
        session: Option<SessionId>,
        reply_to: Option<u64>,
        message: String,
    },
}

/// Writes one record.
pub fn write_record<W: Write>(w: &mut W, payload: &[u8]) -> io::Result<()> {
    write!(w, "{}\n", payload.len())?;
    w.write_all(payload)?;
    w.flush()
}

/// Reads one record; `Ok(None)` on a clean end of stream.
pub fn read_record<R: BufRead>(r: &mut R) -> io::Result<Option<Vec<u8>>> {
    let mut header = String::new();
    if r.read_line(&mut header)? == 0 {
        return Ok(None);
    }
    let len: usize = header
        .trim_end_matches(['\n', '\r'])
        .parse()
        .map_err(|_| io::Error::new(io::ErrorKind::InvalidData, format!("bad record header {header:?}")))?;
    if len > MAX_RECORD_BYTES {
        return Err(io::Error::new(io::ErrorKind::InvalidData, format!("record of {len} bytes exceeds limit")));
    }
    let mut buf = vec![0; len];
    r.read_exact(&mut buf)?;
    Ok(Some(buf))
}

pub fn write_message<W: Write, T: Serialize>(w: &mut W, msg: &T) -> io::Result<()> {
    write_record(w, &serde_json::to_vec(msg).expect("message serializes"))
}

/// Parses a client record. On failure returns the error text and the
/// client's `seq` if it could be recovered.
pub fn parse_command(payload: &[u8]) -> Result<ClientEnvelope, (Option<u64>, String)> {
    let value: serde_json::Value = serde_json::from_slice(payload).map_err(|e| (None, format!("malformed JSON: {e}")))?;
    let seq = value.get("seq").and_then(|s| s.as_u64());
    match value.get("v").and_then(|v| v.as_u64()) {
        Some(v) if v == PROTOCOL_VERSION as u64 => {}
        Some(v) => return Err((seq, format!("unsupported protocol version {v}"))),
        None => return Err((seq, "missing protocol version `v`".into())),
    }
    serde_json::from_value(value).map_err(|e| (seq, format!("malformed command: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_framing_round_trip() {
        let mut buf = Vec::new();
        write_record(&mut buf, b"{\"a\":1}").unwrap();
        write_record(&mut buf, b"").unwrap();
        assert!(buf.starts_with(b"7\n{"));
        let mut r = io::Cursor::new(buf);
        assert_eq!(read_record(&mut r).unwrap().unwrap(), b"{\"a\":1}");
        assert_eq!(read_record(&mut r).unwrap().unwrap(), b"");
        assert!(read_record(&mut r).unwrap().is_none());
    }

    #[test]
    fn bad_header_is_an_error() {
        let mut r = io::Cursor::new(b"abc\n{}".to_vec());
        assert!(read_record(&mut r).is_err());
    }

    #[test]
    fn command_json_shape() {
        let env = parse_command(br#"{"v":1,"seq":4,"cmd":"mix","session":2,"a":0,"b":3}"#).unwrap();
        assert_eq!(env.seq, 4);
        assert_eq!(env.command, Command::Mix { session: 2, a: TileId(0), b: TileId(3) });
        let env = parse_command(br#"{"v":1,"seq":1,"cmd":"create_session","mode":"hiec","tiles":6}"#).unwrap();
        assert!(matches!(env.command, Command::CreateSession { tiles: 6, mode: Mode::Hiec, .. }));
    }

    #[test]
    fn malformed_commands_keep_seq_when_possible() {
        assert_eq!(parse_command(b"not json").unwrap_err().0, None);
        assert_eq!(parse_command(br#"{"v":1,"seq":9,"cmd":"fly"}"#).unwrap_err().0, Some(9));
        assert!(parse_command(br#"{"v":2,"seq":9,"cmd":"random","session":1}"#).is_err());
        assert!(parse_command(br#"{"seq":9,"cmd":"random","session":1}"#).is_err());
    }

    #[test]
    fn ack_flattens_operator() {
        let msg = ServerEnvelope {
            v: 1,
            seq: 3,
            message: ServerMessage::OperatorAck {
                session: 1,
                reply_to: 2,
                op: Operator::Kill { tile: TileId(4) },
                created: vec![],
            },
        };
        let json = serde_json::to_value(&msg).unwrap();
        assert_eq!(json["type"], "operator_ack");
        assert_eq!(json["op"], "kill");
        assert_eq!(json["tile"], 4);
        let back: ServerEnvelope = serde_json::from_value(json).unwrap();
        assert_eq!(back, msg);
    }
}
