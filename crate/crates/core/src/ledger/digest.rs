use std::fmt;
use std::str::FromStr;

use md5::{Digest as _, Md5};

use super::LedgerError;

/// A 128-bit MD5 digest, displayed as 32 lowercase hex characters.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digest([u8; 16]);

impl Digest {
    /// The all-zero digest used as the genesis block's `prev_hash`.
    pub const ZERO: Digest = Digest([0; 16]);

    pub fn of(bytes: impl AsRef<[u8]>) -> Self {
        Digest(Md5::digest(bytes.as_ref()).into())
    }

    pub fn from_bytes(bytes: [u8; 16]) -> Self {
        Digest(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; 16] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.to_string()
    }
}

/// MD5 of `bytes` as lowercase hex.
pub fn md5_hex(bytes: impl AsRef<[u8]>) -> String {
    Digest::of(bytes).to_hex()
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({self})")
    }
}

impl FromStr for Digest {
    type Err = LedgerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || LedgerError::MalformedDigest(s.to_string());
        if s.len() != 32 || !s.bytes().all(|c| matches!(c, b'0'..=b'9' | b'a'..=b'f')) {
            return Err(malformed());
        }
        let mut out = [0u8; 16];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = u8::from_str_radix(&s[2 * i..2 * i + 2], 16).map_err(|_| malformed())?;
        }
        Ok(Digest(out))
    }
}
