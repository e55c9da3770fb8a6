//! Configuration digests for provenance tags and manifests.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Short hex digest of a serializable config.
///
/// Serialization uses `serde_json`, whose field order follows the struct
/// definition, so the digest is stable for a fixed config type and value.
pub fn config_digest<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_string(value).expect("config serialization cannot fail");
    let hash = Sha256::digest(json.as_bytes());
    let mut out = String::with_capacity(16);
    for byte in hash.iter().take(8) {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}
