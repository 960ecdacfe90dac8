//! Addressing primitives shared by every layer: MAC addresses, node ids,
//! link keys and rate conversions.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AddrError {
    #[error("malformed MAC address `{0}`")]
    MalformedMac(String),
    #[error("invalid node id `{0}` (allowed: ASCII letters, digits, `_`, `.`, `-`)")]
    InvalidNodeId(String),
    #[error("negative or non-finite bandwidth {0} Mbps")]
    NegativeBandwidth(String),
}

/// A 48-bit MAC address, rendered as `AA-BB-CC-DD-EE-FF`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mac([u8; 6]);

impl Mac {
    pub const fn new(octets: [u8; 6]) -> Self {
        Mac(octets)
    }

    pub fn octets(&self) -> [u8; 6] {
        self.0
    }
}

impl fmt::Display for Mac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = self.0;
        write!(
            f,
            "{:02X}-{:02X}-{:02X}-{:02X}-{:02X}-{:02X}",
            o[0], o[1], o[2], o[3], o[4], o[5]
        )
    }
}

impl FromStr for Mac {
    type Err = AddrError;

    /// Accepts `-` or `:` separators, either case.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || AddrError::MalformedMac(s.to_string());
        let parts: Vec<&str> = s.split(['-', ':']).collect();
        if parts.len() != 6 {
            return Err(err());
        }
        let mut octets = [0u8; 6];
        for (slot, part) in octets.iter_mut().zip(parts) {
            if part.len() != 2 {
                return Err(err());
            }
            *slot = u8::from_str_radix(part, 16).map_err(|_| err())?;
        }
        Ok(Mac(octets))
    }
}

/// Checks that `id` can be embedded in canonical encodings without
/// colliding with their separators.
pub fn validate_node_id(id: &str) -> Result<(), AddrError> {
    let ok = !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'));
    if ok {
        Ok(())
    } else {
        Err(AddrError::InvalidNodeId(id.to_string()))
    }
}

/// Identifies one bandwidth-matrix entry.
///
/// Inter-domain links are keyed by the controller pair they connect, intra-domain
/// links (including host access links) by their endpoint pair inside one
/// domain. Endpoints are stored sorted, so `(a, b)` and `(b, a)` name the same
/// entry.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinkKey {
    Inter { a: u32, b: u32 },
    Intra { domain: u32, a: String, b: String },
}

impl LinkKey {
    pub fn inter(x: u32, y: u32) -> Self {
        LinkKey::Inter {
            a: x.min(y),
            b: x.max(y),
        }
    }

    pub fn intra(domain: u32, x: &str, y: &str) -> Self {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        LinkKey::Intra {
            domain,
            a: a.to_string(),
            b: b.to_string(),
        }
    }
}

impl fmt::Display for LinkKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkKey::Inter { a, b } => write!(f, "inter/{a}/{b}"),
            LinkKey::Intra { domain, a, b } => write!(f, "intra/{domain}/{a}/{b}"),
        }
    }
}

/// Converts a scenario rate in Mbps to integer bits per second.
pub fn mbps_to_bps(mbps: f64) -> Result<u64, AddrError> {
    if !mbps.is_finite() || mbps < 0.0 {
        return Err(AddrError::NegativeBandwidth(mbps.to_string()));
    }
    Ok((mbps * 1e6).round() as u64)
}

pub fn bps_to_mbps(bps: f64) -> f64 {
    bps / 1e6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mac_parse_and_render() {
        let mac: Mac = "48-2c-6a-1e-59-3d".parse().unwrap();
        assert_eq!(mac.to_string(), "48-2C-6A-1E-59-3D");
        let colon: Mac = "48:2C:6A:1E:59:3D".parse().unwrap();
        assert_eq!(mac, colon);
    }

    #[test]
    fn mac_rejects_garbage() {
        for bad in [
            "",
            "48-2C-6A-1E-59",
            "48-2C-6A-1E-59-3D-00",
            "4-82C-6A-1E-59-3D",
            "GG-2C-6A-1E-59-3D",
        ] {
            assert!(bad.parse::<Mac>().is_err(), "{bad}");
        }
    }

    #[test]
    fn link_keys_are_symmetric() {
        assert_eq!(LinkKey::inter(2, 1), LinkKey::inter(1, 2));
        assert_eq!(LinkKey::intra(0, "s2", "s1"), LinkKey::intra(0, "s1", "s2"));
        assert_eq!(LinkKey::intra(3, "s9", "h1").to_string(), "intra/3/h1/s9");
        assert_eq!(LinkKey::inter(5, 0).to_string(), "inter/0/5");
    }

    #[test]
    fn rate_conversion() {
        assert_eq!(mbps_to_bps(9.4).unwrap(), 9_400_000);
        assert_eq!(mbps_to_bps(1.8).unwrap(), 1_800_000);
        assert_eq!(mbps_to_bps(0.0).unwrap(), 0);
        assert!(mbps_to_bps(-1.0).is_err());
        assert!(mbps_to_bps(f64::NAN).is_err());
    }

    #[test]
    fn node_ids() {
        assert!(validate_node_id("s10").is_ok());
        assert!(validate_node_id("host_1.a-b").is_ok());
        for bad in ["", "s|1", "s,1", "s/1", "s 1", "s;1"] {
            assert!(validate_node_id(bad).is_err(), "{bad}");
        }
    }
}
