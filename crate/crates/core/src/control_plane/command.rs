use std::fmt;
use std::str::FromStr;

use crate::ledger::Digest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CommandKind {
    ArpRequest,
    ArpReply,
    FlowMod,
    Custom,
}

impl CommandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::ArpRequest => "ArpRequest",
            CommandKind::ArpReply => "ArpReply",
            CommandKind::FlowMod => "FlowMod",
            CommandKind::Custom => "Custom",
        }
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CommandKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ArpRequest" => Ok(CommandKind::ArpRequest),
            "ArpReply" => Ok(CommandKind::ArpReply),
            "FlowMod" => Ok(CommandKind::FlowMod),
            "Custom" => Ok(CommandKind::Custom),
            other => Err(format!("unknown command kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Destination {
    Controller(u32),
    Broadcast,
}

impl fmt::Display for Destination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Destination::Controller(id) => write!(f, "{id}"),
            Destination::Broadcast => f.write_str("Broadcast"),
        }
    }
}

impl FromStr for Destination {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("broadcast") {
            return Ok(Destination::Broadcast);
        }
        s.parse()
            .map(Destination::Controller)
            .map_err(|_| format!("bad destination `{s}`"))
    }
}

/// An inter-controller control or management message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlCommand {
    pub kind: CommandKind,
    pub src_controller: u32,
    pub dst: Destination,
    pub payload: Vec<u8>,
    pub timestamp_ms: u64,
}

impl ControlCommand {
    /// `kind|src|dst|payload_hex|timestamp_ms`, the exact bytes that get hashed.
    pub fn canonical(&self) -> String {
        let mut hex = String::with_capacity(self.payload.len() * 2);
        for b in &self.payload {
            hex.push_str(&format!("{b:02x}"));
        }
        format!(
            "{}|{}|{}|{}|{}",
            self.kind, self.src_controller, self.dst, hex, self.timestamp_ms
        )
    }

    /// Number of byte positions [`ControlCommand::flip_byte`] can address:
    /// every payload byte followed by the 8 big-endian timestamp bytes.
    pub fn mutable_len(&self) -> usize {
        self.payload.len() + 8
    }

    /// Copy with one byte inverted. Offsets wrap modulo [`Self::mutable_len`].
    pub fn flip_byte(&self, offset: usize) -> ControlCommand {
        let mut out = self.clone();
        let offset = offset % self.mutable_len();
        if offset < out.payload.len() {
            out.payload[offset] ^= 0xff;
        } else {
            let mut ts = out.timestamp_ms.to_be_bytes();
            ts[offset - out.payload.len()] ^= 0xff;
            out.timestamp_ms = u64::from_be_bytes(ts);
        }
        out
    }
}

/// MD5 over the canonical command encoding.
pub fn compute_command_digest(cmd: &ControlCommand) -> Digest {
    Digest::of(cmd.canonical())
}
